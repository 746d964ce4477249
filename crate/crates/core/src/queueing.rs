//! M/M/1 delay per serving satellite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QueueConfig {
    /// Service rate per satellite, tasks/s. A single entry applies to all.
    pub service_rates: Vec<f64>,
    /// Task generation rate of one device, tasks/s.
    pub per_device_task_rate: f64,
    /// Delay reported once utilisation crosses the guard, s.
    pub overload_delay_cap: f64,
    pub utilization_guard: f64,
}

impl Default for QueueConfig {
    fn default() -> Self {
        Self {
            service_rates: vec![10.0],
            per_device_task_rate: 0.03,
            overload_delay_cap: 1e3,
            utilization_guard: 0.999,
        }
    }
}

impl QueueConfig {
    pub fn validate(&self, num_satellites: usize) -> Result<()> {
        if self.service_rates.is_empty()
            || (self.service_rates.len() != 1 && self.service_rates.len() != num_satellites)
        {
            return Err(Error::config(
                "queue.service_rates",
                format!("expected 1 or {num_satellites} entries, got {}", self.service_rates.len()),
            ));
        }
        if self.service_rates.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::config("queue.service_rates", "all rates must be > 0"));
        }
        if !(self.per_device_task_rate > 0.0) {
            return Err(Error::config("queue.per_device_task_rate", "must be > 0"));
        }
        if !(self.overload_delay_cap > 0.0) {
            return Err(Error::config("queue.overload_delay_cap", "must be > 0"));
        }
        if !(self.utilization_guard > 0.0 && self.utilization_guard < 1.0) {
            return Err(Error::config("queue.utilization_guard", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn service_rate(&self, sat: usize) -> f64 {
        if self.service_rates.len() == 1 {
            self.service_rates[0]
        } else {
            self.service_rates[sat]
        }
    }
}

/// Task arrival rate at a satellite holding `share` of `n_devices`.
pub fn arrival_rate(share: f64, n_devices: usize, config: &QueueConfig) -> f64 {
    share * n_devices as f64 * config.per_device_task_rate
}

/// `1 / (mu - lambda)` on the stable region, the overload cap beyond the guard.
///
/// The stable branch is also clipped at the cap, which only matters for slow
/// servers where `1 / ((1 - guard) mu)` already exceeds it.
pub fn queuing_delay(arrival: f64, service: f64, config: &QueueConfig) -> f64 {
    if arrival < config.utilization_guard * service {
        (1.0 / (service - arrival)).min(config.overload_delay_cap)
    } else {
        config.overload_delay_cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrival_examples() {
        let c = QueueConfig { per_device_task_rate: 0.02, ..Default::default() };
        assert_eq!(arrival_rate(0.0, 1000, &c), 0.0);
        assert!((arrival_rate(0.25, 1000, &c) - 5.0).abs() < 1e-12);
        let total: f64 = [0.1, 0.2, 0.3, 0.4].iter().map(|s| arrival_rate(*s, 1000, &c)).sum();
        assert!((total - 20.0).abs() < 1e-12);
    }

    #[test]
    fn delay_examples() {
        let c = QueueConfig::default();
        assert!((queuing_delay(5.0, 10.0, &c) - 0.2).abs() < 1e-15);
        assert!((queuing_delay(0.0, 10.0, &c) - 0.1).abs() < 1e-15);
        assert_eq!(queuing_delay(9.999, 10.0, &c), 1e3);
        assert_eq!(queuing_delay(50.0, 10.0, &c), 1e3);
    }

    #[test]
    fn per_satellite_rates() {
        let c = QueueConfig { service_rates: vec![20.0, 10.0], ..Default::default() };
        assert!(c.validate(2).is_ok());
        assert!(c.validate(3).is_err());
        assert_eq!(c.service_rate(1), 10.0);
        assert_eq!(QueueConfig::default().service_rate(3), 10.0);
    }

    proptest::proptest! {
        #[test]
        fn delay_bounded_and_increasing(mu in 0.1f64..100.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let c = QueueConfig::default();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let d_lo = queuing_delay(lo * mu * 1.2, mu, &c);
            let d_hi = queuing_delay(hi * mu * 1.2, mu, &c);
            proptest::prop_assert!(d_lo.is_finite() && d_lo > 0.0 && d_lo <= c.overload_delay_cap);
            proptest::prop_assert!(d_hi.is_finite() && d_hi <= c.overload_delay_cap);
            if hi * 1.2 < c.utilization_guard && hi > lo {
                proptest::prop_assert!(d_hi >= d_lo);
                if d_hi < c.overload_delay_cap {
                    proptest::prop_assert!(d_hi > d_lo);
                }
            }
        }
    }
}
