//! Secrecy capacity under a shell of randomly placed eavesdroppers.
//!
//! The aggregate eavesdropping capacity of a serving satellite is the
//! expectation of per-eavesdropper Shannon capacity over the distance
//! distribution, thinned by the probability of sitting inside the serving
//! satellite's coverage cap. [`monte_carlo`] estimates the same quantity by
//! sampling shell positions directly.

pub mod monte_carlo;
mod quadrature;

use serde::{Deserialize, Serialize};

pub use quadrature::{QuadratureConfig, QuadratureRule};

use crate::channel::{mean_snr, ChannelConfig};
use crate::error::{Error, Result};
use crate::geometry::{effective_half_angle, threat_probability, GeometryConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SecrecySettings {
    /// Multiply the legitimate `log2(1 + snr)` term by the bandwidth so both
    /// capacities are in bit/s. `false` keeps the bare spectral efficiency.
    pub legit_term_includes_bandwidth: bool,
}

impl Default for SecrecySettings {
    fn default() -> Self {
        Self { legit_term_includes_bandwidth: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub satellite_id: usize,
    pub legit_snr: f64,
    /// Aggregate eavesdropping capacity, bit/s.
    pub eavesdrop_capacity: f64,
    /// bit/s, never negative.
    pub secrecy_capacity: f64,
    pub threat_probability: f64,
    pub half_angle_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskParams {
    /// Demanded secrecy rate, bit/s.
    pub secrecy_demand: f64,
    /// Exponential growth rate of risk per bit/s of shortfall.
    pub risk_exponent: f64,
}

/// Capacity of a single eavesdropper at distance `d_e`.
pub fn eavesdrop_capacity_at(d_e: f64, channel: &ChannelConfig) -> Result<f64> {
    let snr = mean_snr(d_e, channel)?;
    Ok(channel.bandwidth_hz * (1.0 + snr).log2())
}

/// Expected number of eavesdroppers in `[d_e, d_e + delta]` that also lie
/// inside the coverage cap of `sat`.
pub fn expected_eavesdropper_count(d_e: f64, delta: f64, sat: usize, geom: &GeometryConfig) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("distance step must be > 0, got {delta}")));
    }
    let h_e = geom.eavesdropper_altitude_km;
    if d_e <= h_e || d_e > geom.max_los_distance(sat) {
        return Ok(0.0);
    }
    let r = geom.earth_radius_km;
    let p_threat = geom.threat_probability(sat)?;
    Ok(geom.num_eavesdroppers as f64 * d_e / (2.0 * r * (r + h_e)) * delta * p_threat)
}

/// Aggregate eavesdropping capacity of serving satellite `sat`.
pub fn total_eavesdrop_capacity(
    sat: usize,
    geom: &GeometryConfig,
    channel: &ChannelConfig,
    quad: &QuadratureConfig,
) -> Result<f64> {
    quad.validate()?;
    if geom.num_eavesdroppers == 0 {
        return Ok(0.0);
    }
    let r = geom.earth_radius_km;
    let h_e = geom.eavesdropper_altitude_km;
    let d_max = geom.max_los_distance(sat);
    let p_threat = geom.threat_probability(sat)?;

    let integral = quad.integrate(h_e, d_max, |d| Ok(d * (1.0 + mean_snr(d, channel)?).log2()))?;
    let k = geom.num_eavesdroppers as f64;
    Ok(k * channel.bandwidth_hz * p_threat / (2.0 * r * (r + h_e)) * integral)
}

/// `max(0, W log2(1 + snr) - C_E)`.
pub fn secrecy_capacity(legit_snr: f64, eavesdrop_capacity: f64, bandwidth_hz: f64) -> f64 {
    (bandwidth_hz * (1.0 + legit_snr).log2() - eavesdrop_capacity).max(0.0)
}

/// Exponential shortfall risk of a demand against a provided secrecy rate.
pub fn shortfall_risk(demand: f64, provided: f64, risk_exponent: f64) -> f64 {
    if demand <= provided {
        0.0
    } else {
        -(-risk_exponent * (demand - provided)).exp_m1()
    }
}

/// Probability that `report`'s secrecy capacity fails the demand in `risk`.
pub fn risk_probability(report: &SecrecyReport, risk: &RiskParams) -> f64 {
    shortfall_risk(risk.secrecy_demand, report.secrecy_capacity, risk.risk_exponent)
}

/// Mean path-loss SNR for a device placed uniformly in the coverage cap of
/// a satellite at `altitude_km`.
///
/// For a uniform cap point the squared slant range is uniform on
/// `[H^2, (R+H)^2 - R^2]`, which gives a closed form for `E[d^-n]`.
pub fn coverage_mean_snr(earth_radius_km: f64, altitude_km: f64, channel: &ChannelConfig) -> Result<f64> {
    if !(altitude_km > 0.0) || !(earth_radius_km > 0.0) {
        return Err(Error::domain("coverage SNR needs positive radius and altitude"));
    }
    let r0 = earth_radius_km + altitude_km;
    let lo = altitude_km * altitude_km;
    let hi = r0 * r0 - earth_radius_km * earth_radius_km;
    let n = channel.path_loss_exponent;
    let half = 1.0 - n / 2.0;
    let mean_inv = if half.abs() < 1e-12 {
        (hi / lo).ln() / (hi - lo)
    } else {
        (hi.powf(half) - lo.powf(half)) / (half * (hi - lo))
    };
    Ok(channel.reference_snr * channel.reference_distance_km.powf(n) * mean_inv)
}

/// Full report for `sat` given its legitimate-link SNR.
pub fn satellite_report(
    sat: usize,
    legit_snr: f64,
    geom: &GeometryConfig,
    channel: &ChannelConfig,
    quad: &QuadratureConfig,
    settings: &SecrecySettings,
) -> Result<SecrecyReport> {
    let eavesdrop = total_eavesdrop_capacity(sat, geom, channel, quad)?;
    let bandwidth = if settings.legit_term_includes_bandwidth { channel.bandwidth_hz } else { 1.0 };
    Ok(SecrecyReport {
        satellite_id: sat,
        legit_snr,
        eavesdrop_capacity: eavesdrop,
        secrecy_capacity: secrecy_capacity(legit_snr, eavesdrop, bandwidth),
        threat_probability: threat_probability(geom.earth_radius_km, geom.serving_altitude(sat))?,
        half_angle_rad: effective_half_angle(geom.earth_radius_km, geom.serving_altitude(sat))?,
    })
}
