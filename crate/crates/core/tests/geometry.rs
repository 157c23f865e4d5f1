use std::f64::consts::PI;

use parahyp::geometry::{hessian_radial, sphere_volume, WarpingDescriptor};
use parahyp::quadrature::TailClass;
use proptest::prelude::*;

fn sf(b: f64) -> WarpingDescriptor {
    WarpingDescriptor::space_form(b).unwrap()
}

// Independent series evaluations.
fn sinh_series(x: f64) -> f64 {
    let (mut term, mut sum, mut k) = (x, x, 1.0);
    while term.abs() > 1e-18 * sum.abs() {
        term *= x * x / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
        k += 1.0;
    }
    sum
}

fn cosh_series(x: f64) -> f64 {
    let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 1.0);
    while term.abs() > 1e-18 * sum.abs() {
        term *= x * x / ((2.0 * k - 1.0) * (2.0 * k));
        sum += term;
        k += 1.0;
    }
    sum
}

#[test]
fn warping_values() {
    assert_eq!(sf(0.0).eval(2.0).unwrap(), 2.0);
    assert!((sf(1.0).eval(PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((sf(-1.0).eval(1.0).unwrap() - sinh_series(1.0)).abs() < 1e-12);
}

#[test]
fn eta_values() {
    assert_eq!(sf(0.0).eta(2.0).unwrap(), 0.5);
    assert!((sf(-1.0).eta(1.0).unwrap() - cosh_series(1.0) / sinh_series(1.0)).abs() < 1e-12);
    assert!((sf(1.0).eta(PI / 4.0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn radial_curvature_values() {
    assert_eq!(sf(0.0).radial_curvature(1.3).unwrap(), 0.0);
    assert!((sf(-1.0).radial_curvature(2.0).unwrap() + 1.0).abs() < 1e-12);
    assert!((sf(1.0).radial_curvature(1.0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sphere_volumes() {
    assert!((sphere_volume(2, &sf(0.0), 3.0).unwrap() - 6.0 * PI).abs() < 1e-12);
    assert!((sphere_volume(3, &sf(0.0), 1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    assert!((sphere_volume(2, &sf(-1.0), 1.0).unwrap() - 2.0 * PI * sinh_series(1.0)).abs() < 1e-12);
}

#[test]
fn hessian_values() {
    assert_eq!(hessian_radial(&sf(-1.0), 1.0, 1.0).unwrap(), 0.0);
    assert_eq!(hessian_radial(&sf(0.0), 2.0, 0.0).unwrap(), 0.5);
    let coth1 = cosh_series(1.0) / sinh_series(1.0);
    assert!((hessian_radial(&sf(-1.0), 1.0, 0.6).unwrap() - coth1 * 0.64).abs() < 1e-12);
    assert!(hessian_radial(&sf(0.0), 1.0, 1.5).is_err());
}

#[test]
fn domain_of_a_round_model_stops_at_the_antipode() {
    let w = sf(4.0);
    assert_eq!(w.domain_end(), PI / 2.0);
    assert!(w.eval(PI / 2.0).is_err());
    assert!(w.eval(0.0).is_err());
    assert!(w.eval(PI / 2.0 - 1e-9).unwrap() > 0.0);
}

#[test]
fn tabulated_sinh_reproduces_hyperbolic_derivatives() {
    let samples: Vec<(f64, f64)> = (1..=20_000).map(|i| {
        let r = i as f64 * 1e-3;
        (r, r.sinh())
    }).collect();
    let w = WarpingDescriptor::tabulated(&samples, TailClass::exponential(1.0), None).unwrap();
    let exact = sf(-1.0);
    for r in [0.05, 0.5, 1.0, 3.3, 7.0, 15.0] {
        let a = w.jet(r).unwrap();
        let b = exact.jet(r).unwrap();
        let scale = b.value.max(1.0);
        assert!((a.first - b.first).abs() < 1e-6 * scale, "w' at {r}");
        assert!((a.second - b.second).abs() < 1e-6 * scale, "w'' at {r}");
        assert!((w.eta(r).unwrap() - exact.eta(r).unwrap()).abs() < 1e-6, "η at {r}");
    }
}

#[test]
fn descriptors_round_trip_through_json() {
    for w in [sf(-0.5), WarpingDescriptor::power_tail(1.5, 2.0).unwrap(), WarpingDescriptor::exp_tail(0.7, 1.0).unwrap()] {
        let text = serde_json::to_string(&w).unwrap();
        let back: WarpingDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }
    let bad = r#"{"family": "space_form", "curvature": 0, "colour": 1}"#;
    assert!(serde_json::from_str::<WarpingDescriptor>(bad).is_err());
}

fn closed_family() -> impl Strategy<Value = WarpingDescriptor> {
    prop_oneof![
        (-4.0f64..4.0).prop_map(sf),
        (0.2f64..3.0, 0.5f64..5.0).prop_map(|(p, t)| WarpingDescriptor::power_tail(p, t).unwrap()),
        (0.1f64..3.0, -1.0f64..2.0).prop_map(|(a, q)| WarpingDescriptor::exp_tail(a, q).unwrap()),
    ]
}

proptest! {
    #[test]
    fn space_form_curvature_is_constant(b in -5.0f64..5.0, t in 0.01f64..0.99) {
        let w = sf(b);
        let r = t * w.domain_end().min(20.0);
        let k = w.radial_curvature(r).unwrap();
        prop_assert!((k - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn eta_has_the_euclidean_pole(w in closed_family()) {
        let r = 1e-4;
        prop_assert!((w.eta(r).unwrap() * r - 1.0).abs() < 1e-3);
    }

    #[test]
    fn warping_is_positive(w in closed_family(), t in 0.0001f64..0.9999) {
        let r = t * w.domain_end().min(50.0);
        prop_assert!(w.eval(r).unwrap() > 0.0);
    }

    #[test]
    fn hessian_is_even_and_peaks_tangentially(b in -3.0f64..3.0, t in 0.01f64..0.99, c in -1.0f64..1.0) {
        let w = sf(b);
        let r = t * w.domain_end().min(10.0);
        let plus = hessian_radial(&w, r, c).unwrap();
        let minus = hessian_radial(&w, r, -c).unwrap();
        prop_assert_eq!(plus, minus);
        let top = hessian_radial(&w, r, 0.0).unwrap();
        if top >= 0.0 {
            prop_assert!(plus <= top);
        } else {
            prop_assert!(plus >= top);
        }
    }
}
