//! Finite-difference geometry on sampled surfaces of revolution, used to check
//! the catalog profiles without the closed forms they are built from.

use std::f64::consts::PI;

use parahyp::geometry::WarpingDescriptor;
use parahyp::profiles::catalog::{cone_profile, lookup, paraboloid_profile};
use parahyp::profiles::{balance, BalanceClass};

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
fn scale(a: V3, k: f64) -> V3 {
    [a[0] * k, a[1] * k, a[2] * k]
}
fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

/// Surface `(s cos φ, s sin φ, f(s))`.
struct Revolution<F: Fn(f64) -> f64> {
    profile: F,
}

struct Sample {
    r: f64,
    /// `⟨x/r, ν⟩`.
    radial_normal: f64,
    /// `−⟨∇^N r, H⟩` with `H = ΔX/2`.
    c: f64,
    /// `|∇^S r|`.
    t: f64,
    /// `⟨H, x⟩`.
    h_dot_x: f64,
}

impl<F: Fn(f64) -> f64> Revolution<F> {
    fn at(&self, s: f64, phi: f64) -> V3 {
        [s * phi.cos(), s * phi.sin(), (self.profile)(s)]
    }

    fn d_s(&self, s: f64, phi: f64, e: f64) -> V3 {
        scale(sub(self.at(s + e, phi), self.at(s - e, phi)), 0.5 / e)
    }

    fn d_phi(&self, s: f64, phi: f64, e: f64) -> V3 {
        scale(sub(self.at(s, phi + e), self.at(s, phi - e)), 0.5 / e)
    }

    /// `√G·g^{ss}` and `√G·g^{φφ}` from the sampled metric; the coordinates
    /// are orthogonal for a surface of revolution.
    fn fluxes(&self, s: f64, phi: f64, e: f64) -> (f64, f64) {
        let gs = dot(self.d_s(s, phi, e), self.d_s(s, phi, e));
        let gp = dot(self.d_phi(s, phi, e), self.d_phi(s, phi, e));
        let root = (gs * gp).sqrt();
        (root / gs, root / gp)
    }

    fn sample(&self, s: f64, phi: f64) -> Sample {
        let e = 1e-4 * s.max(1e-2);
        let x = self.at(s, phi);
        let xs = self.d_s(s, phi, e);
        let xp = self.d_phi(s, phi, e);
        let nu = scale(cross(xs, xp), 1.0 / norm(cross(xs, xp)));
        // Δ_S X by a conservative five-point stencil.
        let (fs_plus, _) = self.fluxes(s + e / 2.0, phi, e);
        let (fs_minus, _) = self.fluxes(s - e / 2.0, phi, e);
        let (_, fp) = self.fluxes(s, phi, e);
        let root = {
            let gs = dot(xs, xs);
            let gp = dot(xp, xp);
            (gs * gp).sqrt()
        };
        let ds_term = sub(
            scale(sub(self.at(s + e, phi), x), fs_plus / e),
            scale(sub(x, self.at(s - e, phi)), fs_minus / e),
        );
        let dp_term = scale(add(sub(self.at(s, phi + e), x), sub(self.at(s, phi - e), x)), fp / e);
        let lap = scale(add(ds_term, dp_term), 1.0 / (e * root));
        let h = scale(lap, 0.5);
        let r = norm(x);
        let radial_normal = dot(scale(x, 1.0 / r), nu);
        Sample {
            r,
            radial_normal,
            c: -radial_normal * dot(nu, h),
            t: (1.0 - radial_normal * radial_normal).max(0.0).sqrt(),
            h_dot_x: dot(h, x),
        }
    }
}

fn mesh_radii() -> Vec<f64> {
    (0..40).map(|i| 0.05 * 1.25f64.powi(i)).collect()
}

#[test]
fn cone_mesh_has_tangent_position_vector() {
    for angle in [PI / 4.0, PI / 6.0, PI / 3.0] {
        let cot = 1.0 / angle.tan();
        let cone = Revolution { profile: move |s: f64| s * cot };
        let (h, g) = cone_profile(angle).unwrap();
        for s in mesh_radii() {
            for phi in [0.0, 1.0, 4.0] {
                let p = cone.sample(s, phi);
                assert!(p.radial_normal.abs() < 1e-9);
                assert!(p.h_dot_x.abs() < 1e-5 * p.r.max(1.0), "H·x = {} at s = {s}", p.h_dot_x);
                assert!((p.c - h.value(p.r).unwrap()).abs() < 1e-6);
                assert!((p.t - g.value(p.r).unwrap()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn cone_balance_is_twice_the_flat_eta() {
    let (h, _) = cone_profile(std::f64::consts::FRAC_PI_4).unwrap();
    let report = balance(2, &WarpingDescriptor::euclidean(), &h).unwrap();
    assert_eq!(report.class, BalanceClass::NonNegative);
    for r in [0.1, 1.0, 10.0] {
        assert!((report.value(r).unwrap() - 2.0 / r).abs() < 1e-14);
    }
}

#[test]
fn paraboloid_profiles_match_the_mesh() {
    for a in [0.5, 1.0, 2.0] {
        let surface = Revolution { profile: move |s: f64| a * s * s };
        let (h, g) = paraboloid_profile(a).unwrap();
        for s in mesh_radii() {
            let p = surface.sample(s, 0.3);
            let (hc, gt) = (h.value(p.r).unwrap(), g.value(p.r).unwrap());
            assert!((p.c - hc).abs() < 1e-5 * hc.max(1e-3), "C at r = {}: mesh {} profile {hc}", p.r, p.c);
            assert!((p.t - gt).abs() < 1e-6, "T at r = {}: mesh {} profile {gt}", p.r, p.t);
        }
    }
}

#[test]
fn paraboloid_profile_limits() {
    let (h, g) = paraboloid_profile(1.0).unwrap();
    let radii: Vec<f64> = (0..=90).map(|i| 1e-3 * 10f64.powf(i as f64 / 10.0)).collect();
    assert!(radii.iter().all(|&r| h.value(r).unwrap() >= 0.0));
    assert!(h.value(1e6).unwrap() < 1e-5 && h.value(1e8).unwrap() < 1e-7);
    assert!((g.value(1e6).unwrap() - 1.0).abs() < 1e-6);
    assert!((g.value(1e-3).unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn unknown_names_are_rejected() {
    for name in ["torus:1", "cone", "cone:abc", ""] {
        assert!(lookup(name).is_err(), "{name}");
    }
}
