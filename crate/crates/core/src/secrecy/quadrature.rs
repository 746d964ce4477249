use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Midpoint,
    Simpson,
}

/// Discretisation of the eavesdropper distance range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub num_intervals: usize,
    pub rule: QuadratureRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { num_intervals: 4096, rule: QuadratureRule::Simpson }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_intervals < 2 {
            return Err(Error::config("quadrature.num_intervals", "must be >= 2"));
        }
        if self.rule == QuadratureRule::Simpson && !self.num_intervals.is_multiple_of(2) {
            return Err(Error::config("quadrature.num_intervals", "must be even for the simpson rule"));
        }
        Ok(())
    }

    /// Integrates `f` over `[a, b]`. An empty or reversed range gives 0.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.validate()?;
        if !(b > a) {
            return Ok(0.0);
        }
        let n = self.num_intervals;
        let h = (b - a) / n as f64;
        match self.rule {
            QuadratureRule::Midpoint => {
                let mut sum = 0.0;
                for k in 0..n {
                    sum += f(a + (k as f64 + 0.5) * h)?;
                }
                Ok(sum * h)
            }
            QuadratureRule::Simpson => {
                let mut sum = f(a)? + f(b)?;
                for k in 1..n {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    sum += w * f(a + k as f64 * h)?;
                }
                Ok(sum * h / 3.0)
            }
        }
    }
}
