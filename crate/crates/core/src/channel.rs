//! Link SNR as a function of distance.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    MeanOnly,
    ShadowedRician,
}

/// Shadowed-Rician parameters: scattered power `b`, Nakagami severity `m`,
/// line-of-sight power `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicianParams {
    pub b: f64,
    pub m: f64,
    pub omega: f64,
}

impl Default for RicianParams {
    /// Average-shadowing satellite tabulation.
    fn default() -> Self {
        Self { b: 0.126, m: 10.1, omega: 0.835 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub bandwidth_hz: f64,
    /// SNR at `reference_distance_km`, linear scale.
    pub reference_snr: f64,
    pub reference_distance_km: f64,
    pub path_loss_exponent: f64,
    pub fading_mode: FadingMode,
    pub rician: RicianParams,
    pub rng_seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e6,
            reference_snr: 1e4,
            reference_distance_km: 300.0,
            path_loss_exponent: 2.0,
            fading_mode: FadingMode::MeanOnly,
            rician: RicianParams::default(),
            rng_seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::config("channel.bandwidth_hz", "must be > 0"));
        }
        if !(self.reference_snr > 0.0) {
            return Err(Error::config("channel.reference_snr", "must be > 0"));
        }
        if !(self.reference_distance_km > 0.0) {
            return Err(Error::config("channel.reference_distance_km", "must be > 0"));
        }
        if !(self.path_loss_exponent >= 2.0) {
            return Err(Error::config("channel.path_loss_exponent", "must be >= 2"));
        }
        if self.fading_mode == FadingMode::ShadowedRician {
            let RicianParams { b, m, omega } = self.rician;
            if !(b > 0.0) {
                return Err(Error::config("channel.rician.b", "must be > 0"));
            }
            if !(m > 0.0) {
                return Err(Error::config("channel.rician.m", "must be > 0"));
            }
            if !(omega > 0.0) {
                return Err(Error::config("channel.rician.omega", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Path-loss SNR at `d_km`.
pub fn mean_snr(d_km: f64, config: &ChannelConfig) -> Result<f64> {
    if !(d_km > 0.0) {
        return Err(Error::domain(format!("link distance must be > 0 km, got {d_km}")));
    }
    Ok(config.reference_snr * (config.reference_distance_km / d_km).powf(config.path_loss_exponent))
}

/// Unit-mean shadowed-Rician power gain sampler.
#[derive(Debug, Clone)]
pub struct ShadowedRician {
    los_power: Gamma<f64>,
    scatter: Normal<f64>,
    mean_power: f64,
}

impl ShadowedRician {
    pub fn new(params: RicianParams) -> Result<Self> {
        let RicianParams { b, m, omega } = params;
        let los_power = Gamma::new(m, omega / m)
            .map_err(|e| Error::config("channel.rician", format!("invalid Nakagami parameters: {e}")))?;
        let scatter = Normal::new(0.0, b.sqrt())
            .map_err(|e| Error::config("channel.rician.b", format!("invalid scatter power: {e}")))?;
        Ok(Self { los_power, scatter, mean_power: omega + 2.0 * b })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let amplitude = self.los_power.sample(rng).sqrt();
        let phase = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let re = amplitude * phase.cos() + self.scatter.sample(rng);
        let im = amplitude * phase.sin() + self.scatter.sample(rng);
        (re * re + im * im) / self.mean_power
    }
}

/// One faded SNR draw at `d_km`. Only valid in shadowed-Rician mode.
pub fn sample_snr<R: Rng + ?Sized>(d_km: f64, config: &ChannelConfig, rng: &mut R) -> Result<f64> {
    if config.fading_mode != FadingMode::ShadowedRician {
        return Err(Error::Mode("sample_snr requires fading_mode = shadowed_rician".into()));
    }
    let mean = mean_snr(d_km, config)?;
    Ok(mean * ShadowedRician::new(config.rician)?.sample(rng))
}
