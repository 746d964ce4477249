//! Sampling estimate of the aggregate eavesdropping capacity.
//!
//! Eavesdroppers are drawn uniformly on their shell and their distance is
//! measured to the ground point beneath the serving satellite. Cap
//! membership is decided by a second, independent shell draw: the closed
//! form treats "inside the cap" and "at distance d" as independent factors,
//! and the oracle reproduces that construction without sharing any code
//! with the quadrature path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{mean_snr, ChannelConfig};
use crate::error::{Error, Result};
use crate::geometry::GeometryConfig;

const CHUNK: u64 = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Fraction of draws that landed in the cap and within line of sight.
    pub hit_fraction: f64,
}

fn unit_sphere<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Estimates the aggregate eavesdropping capacity of satellite `sat` from
/// `samples` draws. The result is independent of the rayon pool size.
pub fn eavesdrop_capacity_mc(
    sat: usize,
    geom: &GeometryConfig,
    channel: &ChannelConfig,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::config("samples", "must be >= 1"));
    }
    let r = geom.earth_radius_km;
    let h_serving = geom.serving_altitude(sat);
    let shell = r + geom.eavesdropper_altitude_km;
    let orbit = r + h_serving;
    let reach = (orbit * orbit - r * r).sqrt() + (shell * shell - r * r).sqrt();
    let cos_cap = r / orbit;
    let k = geom.num_eavesdroppers as f64;

    // Serving satellite on +x; the ground reference sits beneath it.
    let ground = [r, 0.0, 0.0];

    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<(f64, f64, u64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(samples - c * CHUNK);
            let (mut sum, mut sum_sq, mut hits) = (0.0, 0.0, 0u64);
            for _ in 0..n {
                let e = unit_sphere(&mut rng);
                let pos = [shell * e[0], shell * e[1], shell * e[2]];
                let d =
                    ((pos[0] - ground[0]).powi(2) + (pos[1] - ground[1]).powi(2) + (pos[2] - ground[2]).powi(2)).sqrt();
                // cap membership: angle to the serving direction (+x) within the cone
                let in_cap = unit_sphere(&mut rng)[0] >= cos_cap;
                if in_cap && d > geom.eavesdropper_altitude_km && d <= reach {
                    let v = k * channel.bandwidth_hz * (1.0 + mean_snr(d, channel)?).log2();
                    sum += v;
                    sum_sq += v * v;
                    hits += 1;
                }
            }
            Ok((sum, sum_sq, hits))
        })
        .collect();

    let (mut sum, mut sum_sq, mut hits) = (0.0, 0.0, 0u64);
    for p in partial {
        let (s, q, h) = p?;
        sum += s;
        sum_sq += q;
        hits += h;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), samples, hit_fraction: hits as f64 / n })
}
