//! The physical scenario a sweep plays on.

use rand::Rng;

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::game::{PopulationState, SatelliteMetrics, SatelliteModel};
use crate::geometry::{sample_in_cap, serving_positions, SatellitePosition, Vec3};
use crate::queueing::{arrival_rate, queuing_delay, QueueConfig};
use crate::secrecy::{coverage_mean_snr, satellite_report, SecrecyReport};
use crate::strategies::largest_remainder;

/// Secrecy reports and satellite positions at the evaluation epoch, plus
/// the queue model. Secrecy does not depend on the population state, so
/// it is computed once.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub reports: Vec<SecrecyReport>,
    pub positions: Vec<SatellitePosition>,
    pub queue: QueueConfig,
    earth_radius_km: f64,
    half_angles: Vec<f64>,
    cap_weights: Vec<f64>,
}

impl Scenario {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        let geom = &config.geometry;
        let m = geom.num_serving;
        let mut reports = Vec::with_capacity(m);
        let mut half_angles = Vec::with_capacity(m);
        for sat in 0..m {
            let snr = coverage_mean_snr(geom.earth_radius_km, geom.serving_altitude(sat), &config.channel)?;
            reports.push(satellite_report(sat, snr, geom, &config.channel, &config.quadrature, &config.secrecy)?);
            half_angles.push(geom.half_angle(sat)?);
        }
        Ok(Self {
            reports,
            positions: serving_positions(geom, geom.epoch_s),
            queue: config.queue.clone(),
            earth_radius_km: geom.earth_radius_km,
            half_angles,
            cap_weights: config.devices.cap_weights.clone(),
        })
    }

    /// Drops `n` ground devices: per-cap counts follow the cap weights by
    /// largest remainder, positions are uniform inside each cap.
    pub fn place_devices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec3> {
        let per_cap = largest_remainder(&self.cap_weights, n);
        let mut out = Vec::with_capacity(n);
        for (sat, &count) in per_cap.iter().enumerate() {
            let center = self.positions[sat].position;
            for _ in 0..count {
                out.push(sample_in_cap(&center, self.earth_radius_km, self.half_angles[sat], rng));
            }
        }
        out
    }

    pub fn delays(&self, state: &PopulationState) -> Vec<f64> {
        state
            .shares
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let arrival = arrival_rate(*x, state.n_devices, &self.queue);
                queuing_delay(arrival, self.queue.service_rate(i), &self.queue)
            })
            .collect()
    }
}

impl SatelliteModel for Scenario {
    fn num_satellites(&self) -> usize {
        self.reports.len()
    }

    fn evaluate(&self, state: &PopulationState) -> Vec<SatelliteMetrics> {
        self.reports
            .iter()
            .zip(self.delays(state))
            .map(|(report, delay)| SatelliteMetrics { report: *report, delay })
            .collect()
    }
}
