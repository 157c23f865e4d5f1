//! Worked examples: cones and paraboloids of revolution in `R³`, and
//! constant-mean-curvature surfaces in `H³`.
//!
//! Sign convention: `h` bounds `C(x) = −⟨∇^N r, H_S⟩` with `H_S` the averaged
//! mean curvature vector. For a surface of revolution about the z-axis that
//! is convex towards `+z` and contains the pole, `H_S` points up while the
//! normal part of `∇r` points down, so `C ≥ 0`.

use std::f64::consts::FRAC_PI_2;

use super::{ProfileKind, RadialProfile, Role};
use crate::error::{Error, Result};
use crate::geometry::WarpingDescriptor;
use crate::problem::{BoundDirection, RadialProblem};

/// Radius at which catalog problems are based.
pub const CATALOG_RHO: f64 = 1.0;

const PARABOLOID_R_MIN: f64 = 1e-3;
const PARABOLOID_R_MAX: f64 = 1e6;
const PARABOLOID_PER_DECADE: usize = 200;
const INVERSION_TOL: f64 = 1e-10;

pub const SCHWARZ_P_NOTE: &str = "Schwarz P surface: every point of R^3 is a pole, and on the boundary of a \
unit cell there are points where the radial direction is normal to the surface, so no positive tangency \
bound g exists. Under C >= 0 a hyperbolic surface must then fall under the first alternative of the \
necessary conditions; no profile is provided.";

pub const NAMES: [&str; 3] = ["cone:<half_angle>", "paraboloid:<a>", "cmc-h3:<H>"];

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub problem: RadialProblem,
}

/// Cone with vertex at the pole. The position vector is tangent to the cone,
/// so `∇^N r = 0`: `C ≡ 0` and `T ≡ 1`.
pub fn cone_profile(half_angle: f64) -> Result<(RadialProfile, RadialProfile)> {
    if !(half_angle > 0.0 && half_angle < FRAC_PI_2) {
        return Err(Error::invalid(format!("cone half angle must lie in (0, π/2), got {half_angle}")));
    }
    Ok((RadialProfile::zero(), RadialProfile::constant_g(1.0)?))
}

/// `(s², C, T)` on the paraboloid `z = a s²` at extrinsic distance `r`.
pub fn paraboloid_point(a: f64, r: f64) -> Result<(f64, f64, f64)> {
    let s2 = 2.0 * r * r / (1.0 + (1.0 + 4.0 * a * a * r * r).sqrt());
    let back = (s2 * (1.0 + a * a * s2)).sqrt();
    if (back - r).abs() > INVERSION_TOL * r {
        return Err(Error::Numerical(format!(
            "inverting r = s·√(1 + a²s²) at r = {r} missed by {:e}",
            (back - r).abs() / r
        )));
    }
    let u = a * a * s2;
    let k = 1.0 + 4.0 * u;
    // Averaged principal curvatures 2a/k^{3/2} and 2a/k^{1/2}.
    let mean = a * (k.powf(-1.5) + k.powf(-0.5));
    // −⟨x/r, ν⟩ = a s²/(r √k).
    let c = mean * a * s2 / (r * k.sqrt());
    let t2 = 1.0 - u / (k * (1.0 + u));
    Ok((s2, c, t2.sqrt()))
}

/// Tabulated bounds `h = C` and `g = T` for the paraboloid `z = a s²`,
/// sampled on a log grid and continued by `C ≈ c/r`, `T ≈ const`.
pub fn paraboloid_profile(a: f64) -> Result<(RadialProfile, RadialProfile)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("paraboloid coefficient must be positive, got {a}")));
    }
    let decades = (PARABOLOID_R_MAX / PARABOLOID_R_MIN).log10();
    let n = (decades * PARABOLOID_PER_DECADE as f64).round() as usize;
    let mut h = Vec::with_capacity(n + 1);
    let mut g = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let r = PARABOLOID_R_MIN * 10f64.powf(i as f64 / PARABOLOID_PER_DECADE as f64);
        let (_, c, t) = paraboloid_point(a, r)?;
        h.push((r, c));
        g.push((r, t.min(1.0)));
    }
    let (r_end, c_end) = h[n];
    let t_end = g[n].1;
    let h = RadialProfile::tabulated(
        &h,
        ProfileKind::PowerLaw {
            coefficient: c_end * r_end,
            exponent: -1.0,
        },
        Role::HBound,
        None,
    )?;
    let g = RadialProfile::tabulated(&g, ProfileKind::Constant(t_end), Role::GBound, None)?;
    Ok((h, g))
}

fn parse_parameter(name: &str, prefix: &str) -> Result<f64> {
    name[prefix.len()..]
        .parse::<f64>()
        .map_err(|_| Error::UnknownExample(name.to_string()))
}

/// Resolves a catalog name into a ready-to-classify problem.
pub fn lookup(name: &str) -> Result<CatalogEntry> {
    let flat = WarpingDescriptor::euclidean();
    if let Some(rest) = name.strip_prefix("cone:") {
        let angle = parse_parameter(name, "cone:")?;
        let (h, g) = cone_profile(angle)?;
        return Ok(CatalogEntry {
            name: name.to_string(),
            description: format!(
                "cone in R^3 with half angle {rest} rad, vertex at the pole: h = 0 (C ≡ 0), g = 1 (T ≡ 1)"
            ),
            problem: RadialProblem::new(2, flat, BoundDirection::Both, h, BoundDirection::Lower, Some(g), CATALOG_RHO)?,
        });
    }
    if let Some(rest) = name.strip_prefix("paraboloid:") {
        let a = parse_parameter(name, "paraboloid:")?;
        let (h, g) = paraboloid_profile(a)?;
        return Ok(CatalogEntry {
            name: name.to_string(),
            description: format!(
                "paraboloid z = {rest}·s^2 in R^3, pole at the vertex: h = C and g = T tabulated on [1e-3, 1e6]"
            ),
            problem: RadialProblem::new(2, flat, BoundDirection::Both, h, BoundDirection::Lower, Some(g), CATALOG_RHO)?,
        });
    }
    if let Some(rest) = name.strip_prefix("cmc-h3:") {
        let value = parse_parameter(name, "cmc-h3:")?;
        let h = RadialProfile::constant_h(value)?;
        return Ok(CatalogEntry {
            name: name.to_string(),
            description: format!("surface in H^3(−1) with C ≤ {rest}: h = {rest} as an upper bound, no tangency bound"),
            problem: RadialProblem::new(
                2,
                WarpingDescriptor::hyperbolic(),
                BoundDirection::Both,
                h,
                BoundDirection::Upper,
                None,
                CATALOG_RHO,
            )?,
        });
    }
    Err(Error::UnknownExample(name.to_string()))
}
