//! Warping functions and the rotationally symmetric model spaces they define.
//!
//! A model `M_w^m` is `[0, domain_end) ×_w S^{m−1}`. Distance spheres about
//! the center have mean curvature `η_w = w'/w` (with a `1/r` pole at the
//! center) and the radial planes have sectional curvature `−w''/w`.

mod table;
mod warping;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use table::{Table, DEFAULT_ACCURACY};
pub use warping::{with_csv_base_dir, Family, Jet, WarpingDescriptor};
pub(crate) use warping::resolve_csv_path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpace {
    dimension: usize,
    warping: WarpingDescriptor,
}

impl ModelSpace {
    pub fn new(dimension: usize, warping: WarpingDescriptor) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::invalid(format!("model dimension must be at least 2, got {dimension}")));
        }
        Ok(Self { dimension, warping })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn warping(&self) -> &WarpingDescriptor {
        &self.warping
    }

    /// Volume of the distance sphere of radius `r`.
    pub fn sphere_volume(&self, r: f64) -> Result<f64> {
        sphere_volume(self.dimension, &self.warping, r)
    }
}

/// Volume of the unit `k`-sphere in `R^{k+1}`.
pub fn unit_sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_area(k - 2),
    }
}

/// `V_{m−1} · w(r)^{m−1}`.
pub fn sphere_volume(m: usize, w: &WarpingDescriptor, r: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid("model dimension must be at least 2"));
    }
    let k = (m - 1) as f64;
    Ok(unit_sphere_area(m - 1) * (k * w.log_value(r)?).exp())
}

/// `ln(V_{m−1} · w(r)^{m−1})`, for radii where the volume overflows.
pub fn log_sphere_volume(m: usize, w: &WarpingDescriptor, r: f64) -> Result<f64> {
    Ok(unit_sphere_area(m - 1).ln() + (m - 1) as f64 * w.log_value(r)?)
}

/// Hessian of the distance function on the model, applied to a unit vector
/// `X` with `⟨∇r, X⟩ = c`: `η_w(r)·(1 − c²)`.
pub fn hessian_radial(w: &WarpingDescriptor, r: f64, c: f64) -> Result<f64> {
    if !(c.abs() <= 1.0) {
        return Err(Error::Domain {
            value: c,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(w.eta(r)? * (1.0 - c * c))
}
