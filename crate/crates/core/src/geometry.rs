//! Spherical geometry for serving and eavesdropping shells.
//!
//! Serving satellites fly ideal circular equatorial orbits; devices are
//! static points on the Earth's surface. All angles are radians internally,
//! degrees appear only in [`GeometryConfig`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard gravitational parameter of the Earth, km^3/s^2.
pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;

pub const DEFAULT_EARTH_RADIUS_KM: f64 = 6371.0;

/// Earth-centred Cartesian coordinates in km.
pub type Vec3 = [f64; 3];

pub fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(v: &Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

/// Serving altitude given either once for every satellite or per satellite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Altitudes {
    Uniform(f64),
    PerSatellite(Vec<f64>),
}

impl Altitudes {
    pub fn get(&self, sat: usize) -> f64 {
        match self {
            Altitudes::Uniform(h) => *h,
            Altitudes::PerSatellite(v) => v[sat],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub earth_radius_km: f64,
    pub serving_altitude_km: Altitudes,
    pub eavesdropper_altitude_km: f64,
    pub serving_phases_deg: Vec<f64>,
    pub num_serving: usize,
    pub num_eavesdroppers: usize,
    /// Evaluation epoch in seconds after the phase reference.
    pub epoch_s: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            earth_radius_km: DEFAULT_EARTH_RADIUS_KM,
            serving_altitude_km: Altitudes::Uniform(300.0),
            eavesdropper_altitude_km: 600.0,
            serving_phases_deg: vec![0.0, 90.0, 180.0, 270.0],
            num_serving: 4,
            num_eavesdroppers: 3,
            epoch_s: 0.0,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.earth_radius_km > 0.0) {
            return Err(Error::config("geometry.earth_radius_km", "must be > 0"));
        }
        if self.num_serving == 0 {
            return Err(Error::config("geometry.num_serving", "must be >= 1"));
        }
        match &self.serving_altitude_km {
            Altitudes::Uniform(h) if !(*h > 0.0) => {
                return Err(Error::config("geometry.serving_altitude_km", "must be > 0"));
            }
            Altitudes::PerSatellite(v) => {
                if v.len() != self.num_serving {
                    return Err(Error::config(
                        "geometry.serving_altitude_km",
                        format!("expected {} entries, got {}", self.num_serving, v.len()),
                    ));
                }
                if v.iter().any(|h| !(*h > 0.0)) {
                    return Err(Error::config("geometry.serving_altitude_km", "must be > 0"));
                }
            }
            _ => {}
        }
        if !(self.eavesdropper_altitude_km > 0.0) {
            return Err(Error::config("geometry.eavesdropper_altitude_km", "must be > 0"));
        }
        if self.serving_phases_deg.len() != self.num_serving {
            return Err(Error::config(
                "geometry.serving_phases_deg",
                format!("expected {} entries (num_serving), got {}", self.num_serving, self.serving_phases_deg.len()),
            ));
        }
        if self.serving_phases_deg.iter().any(|p| !(0.0..360.0).contains(p)) {
            return Err(Error::config("geometry.serving_phases_deg", "each phase must lie in [0, 360)"));
        }
        if !self.epoch_s.is_finite() {
            return Err(Error::config("geometry.epoch_s", "must be finite"));
        }
        Ok(())
    }

    pub fn serving_altitude(&self, sat: usize) -> f64 {
        self.serving_altitude_km.get(sat)
    }

    /// Longest serving-to-eavesdropper distance with both ends above the horizon.
    pub fn max_los_distance(&self, sat: usize) -> f64 {
        line_of_sight_bound(self.earth_radius_km, self.serving_altitude(sat), self.eavesdropper_altitude_km)
    }

    pub fn half_angle(&self, sat: usize) -> Result<f64> {
        effective_half_angle(self.earth_radius_km, self.serving_altitude(sat))
    }

    pub fn threat_probability(&self, sat: usize) -> Result<f64> {
        threat_probability(self.earth_radius_km, self.serving_altitude(sat))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatellitePosition {
    pub satellite_id: usize,
    pub position: Vec3,
    pub altitude_km: f64,
}

fn check_radius_altitude(earth_radius_km: f64, altitude_km: f64) -> Result<()> {
    if !(earth_radius_km > 0.0) {
        return Err(Error::domain(format!("earth radius must be > 0, got {earth_radius_km}")));
    }
    if !(altitude_km >= 0.0) {
        return Err(Error::domain(format!("altitude must be >= 0, got {altitude_km}")));
    }
    Ok(())
}

/// Half-angle of the coverage cone, `arccos(R / (R + H))`.
///
/// Zero altitude gives a zero cone; the angle tends to pi/2 as `H` grows.
pub fn effective_half_angle(earth_radius_km: f64, altitude_km: f64) -> Result<f64> {
    check_radius_altitude(earth_radius_km, altitude_km)?;
    if altitude_km.is_infinite() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let ratio = earth_radius_km / (earth_radius_km + altitude_km);
    Ok(ratio.clamp(-1.0, 1.0).acos())
}

/// Fraction of a shell covered by the spherical cap of the coverage cone.
pub fn threat_probability(earth_radius_km: f64, altitude_km: f64) -> Result<f64> {
    check_radius_altitude(earth_radius_km, altitude_km)?;
    if altitude_km.is_infinite() {
        return Ok(0.5);
    }
    // (1 - cos psi) / 2 with cos psi = R / (R + H), written to avoid cancellation.
    Ok(altitude_km / (2.0 * (earth_radius_km + altitude_km)))
}

/// Sum of the two horizon distances from shells at `h_serving` and `h_eaves`.
pub fn line_of_sight_bound(earth_radius_km: f64, h_serving: f64, h_eaves: f64) -> f64 {
    let horizon = |h: f64| {
        let r = earth_radius_km + h;
        (r * r - earth_radius_km * earth_radius_km).max(0.0).sqrt()
    };
    horizon(h_serving) + horizon(h_eaves)
}

/// Density of the ground-to-eavesdropper-shell distance, truncated to `(H_e, D_max]`.
pub fn distance_pdf(d_e: f64, config: &GeometryConfig, sat: usize) -> f64 {
    let h_e = config.eavesdropper_altitude_km;
    if !(d_e > h_e) || d_e > config.max_los_distance(sat) {
        return 0.0;
    }
    let r = config.earth_radius_km;
    d_e / (2.0 * r * (r + h_e))
}

/// Circular-orbit period for an orbit of the given radius, in seconds.
pub fn orbital_period_s(orbit_radius_km: f64) -> f64 {
    2.0 * std::f64::consts::PI * (orbit_radius_km.powi(3) / EARTH_MU_KM3_S2).sqrt()
}

/// Serving satellite positions at `epoch_s` seconds.
pub fn serving_positions(config: &GeometryConfig, epoch_s: f64) -> Vec<SatellitePosition> {
    (0..config.num_serving)
        .map(|sat| {
            let altitude_km = config.serving_altitude(sat);
            let r = config.earth_radius_km + altitude_km;
            let omega = 2.0 * std::f64::consts::PI / orbital_period_s(r);
            let theta = config.serving_phases_deg[sat].to_radians() + omega * epoch_s;
            SatellitePosition { satellite_id: sat, position: [r * theta.cos(), r * theta.sin(), 0.0], altitude_km }
        })
        .collect()
}

/// Uniform point on the sphere of radius `radius` inside the cap of
/// half-angle `half_angle` around direction `center`.
pub fn sample_in_cap<R: Rng + ?Sized>(center: &Vec3, radius: f64, half_angle: f64, rng: &mut R) -> Vec3 {
    let axis = scale(center, 1.0 / norm(center));
    // Orthonormal frame around the cap axis.
    let helper = if axis[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let mut u = [
        helper[1] * axis[2] - helper[2] * axis[1],
        helper[2] * axis[0] - helper[0] * axis[2],
        helper[0] * axis[1] - helper[1] * axis[0],
    ];
    u = scale(&u, 1.0 / norm(&u));
    let v = [axis[1] * u[2] - axis[2] * u[1], axis[2] * u[0] - axis[0] * u[2], axis[0] * u[1] - axis[1] * u[0]];

    let cos_min = half_angle.cos();
    let cos_t = cos_min + (1.0 - cos_min) * rng.random::<f64>();
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let dir = [
        axis[0] * cos_t + (u[0] * phi.cos() + v[0] * phi.sin()) * sin_t,
        axis[1] * cos_t + (u[1] * phi.cos() + v[1] * phi.sin()) * sin_t,
        axis[2] * cos_t + (u[2] * phi.cos() + v[2] * phi.sin()) * sin_t,
    ];
    scale(&dir, radius)
}

/// Central angle between two position vectors.
pub fn central_angle(a: &Vec3, b: &Vec3) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}
