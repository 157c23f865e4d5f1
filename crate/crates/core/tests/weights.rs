use std::f64::consts::{E, SQRT_2};

use parahyp::geometry::WarpingDescriptor;
use parahyp::profiles::{balance, BalanceClass, RadialProfile, Role};
use parahyp::quadrature::{
    classify_improper, integrate, integrate_to_infinity, lambda_plain, lambda_tangency, weight_series, AhlforsWeight,
    Certainty, DriftedWeight, IntegralOutcome, RadialWeight, TailClass,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn sf(b: f64) -> WarpingDescriptor {
    WarpingDescriptor::space_form(b).unwrap()
}

#[test]
fn finite_integrals() {
    let a = integrate(|t| 1.0 / t, 1.0, E, TOL).unwrap();
    assert!((a.value - 1.0).abs() <= 1e-10);
    let b = integrate(|t| 2.0 / t, 1.0, 4.0, TOL).unwrap();
    assert!((b.value - 2.0 * 4f64.ln()).abs() <= 1e-10);
    let c = integrate_to_infinity(|t| t.powi(-2), 1.0, Some(0.5), TOL).unwrap();
    assert!((c.value - 1.0).abs() <= 1e-9);
}

#[test]
fn plain_weight_values() {
    let zero = RadialProfile::zero();
    for r in [1.0, 2.0, 7.5] {
        assert!((lambda_plain(2, &sf(0.0), &zero, 1.0, r).unwrap() - 1.0 / r).abs() < 1e-12);
        assert!((lambda_plain(3, &sf(0.0), &zero, 1.0, r).unwrap() - r.powi(-2)).abs() < 1e-12);
    }
    // Λ = C·e^{0.8r}/sinh r with C = sinh²(1)·e^{−0.8}.
    let h = RadialProfile::constant_h(0.4).unwrap();
    let exact = 1f64.sinh().powi(2) * (-0.8f64).exp() * (0.8f64 * 5.0).exp() / 5f64.sinh();
    let got = lambda_plain(2, &sf(-1.0), &h, 1.0, 5.0).unwrap();
    assert!((got - exact).abs() <= 1e-10 * exact);
}

#[test]
fn tangency_weight_values() {
    let zero = RadialProfile::zero();
    let one = RadialProfile::constant_g(1.0).unwrap();
    for r in [1.0, 1.7, 4.0, 30.0] {
        let a = lambda_tangency(2, &sf(-1.0), &RadialProfile::constant_h(0.3).unwrap(), &one, 1.0, r).unwrap();
        let b = lambda_plain(2, &sf(-1.0), &RadialProfile::constant_h(0.3).unwrap(), 1.0, r).unwrap();
        assert_eq!(a, b);
    }
    assert!((lambda_tangency(2, &sf(0.0), &zero, &one, 1.0, 4.0).unwrap() - 0.25).abs() < 1e-12);
    let g = RadialProfile::constant_g(1.0 / SQRT_2).unwrap();
    assert!((lambda_tangency(2, &sf(0.0), &zero, &g, 1.0, 2.0).unwrap() - 0.125).abs() < 1e-12);
}

#[test]
fn weights_start_at_the_warping_value() {
    for (m, b, h) in [(2, 0.0, 0.0), (3, -1.0, 0.5), (4, -0.25, -2.0), (2, 0.5, 0.1)] {
        let w = sf(b);
        let h = RadialProfile::constant_h(h).unwrap();
        let weight = DriftedWeight::plain(m, &w, &h, 0.8, TOL).unwrap();
        assert_eq!(weight.value(0.8).unwrap(), w.eval(0.8).unwrap());
    }
}

#[test]
fn log_weights_survive_huge_drifts() {
    for h in [-450.0, 450.0] {
        let weight = DriftedWeight::plain(2, &sf(-1.0), &RadialProfile::constant_h(h).unwrap(), 1.0, TOL).unwrap();
        for r in [10.0, 1e3, 1e6] {
            let l = weight.log_value(r).unwrap();
            assert!(l.is_finite(), "log Λ({r}) = {l} for h = {h}");
        }
    }
}

#[test]
fn flat_models_diverge_only_in_the_plane() {
    for m in 2..=4 {
        let weight = DriftedWeight::new(m, &sf(0.0), &RadialProfile::zero(), Some(&RadialProfile::constant_g(1.0).unwrap()), 1.0, TOL).unwrap();
        let v = classify_improper(&weight, TOL);
        assert_eq!(v.is_divergent(), m == 2, "m = {m}: {v:?}");
    }
    let space = DriftedWeight::plain(3, &sf(0.0), &RadialProfile::zero(), 1.0, TOL).unwrap();
    match classify_improper(&space, TOL).outcome {
        IntegralOutcome::Finite { value, .. } => assert!((value - 1.0).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
}

#[test]
fn mean_curvature_bound_below_half_gives_a_finite_weight() {
    let weight = DriftedWeight::plain(2, &sf(-1.0), &RadialProfile::constant_h(0.4).unwrap(), 1.0, TOL).unwrap();
    let v = classify_improper(&weight, TOL);
    let IntegralOutcome::Finite { value, abs_error } = v.outcome else {
        panic!("{v:?}")
    };
    // Independent check: head to 200 by quadrature, tail bounded by
    // C·e^{0.8t}/sinh t ≤ 2C·e^{−0.2t}/(1 − e^{−400}).
    let c = 1f64.sinh().powi(2) * (-0.8f64).exp();
    let head = integrate(|t| c * (0.8 * t).exp() / t.sinh(), 1.0, 200.0, 1e-12).unwrap();
    let rest = 2.0 * c * (-0.2f64 * 200.0).exp() / 0.2 / (1.0 - (-400f64).exp());
    assert!(value >= head.value - 1e-9 && value <= head.value + rest + 1e-9);
    assert!(abs_error < 1e-8);
}

#[test]
fn fitted_tails_near_the_threshold_are_refused() {
    let samples: Vec<(f64, f64)> = (1..=4000).map(|i| {
        let r = i as f64 * 0.25;
        (r, r * (1.0 + r * r).powf(0.025))
    }).collect();
    let tail = TailClass::power(1.05).with_certainty(Certainty::Fitted { residual: 0.0 });
    let w = WarpingDescriptor::tabulated(&samples, tail, Some(1e-4)).unwrap();
    let weight = AhlforsWeight::new(&w, 2, 1.0).unwrap();
    assert!(classify_improper(&weight, TOL).is_inconclusive());
    // The same data in three dimensions decays like r^{−2.1}: finite.
    let weight = AhlforsWeight::new(&w, 3, 1.0).unwrap();
    assert!(classify_improper(&weight, TOL).is_finite());
}

#[test]
fn weight_series_reports_each_radius() {
    let weight = DriftedWeight::plain(2, &sf(0.0), &RadialProfile::zero(), 1.0, TOL).unwrap();
    let s = weight_series(&weight, &[1.0, 2.0, 4.0]).unwrap();
    assert_eq!(s, vec![(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]);
}

#[test]
fn balance_examples() {
    let flat = balance(2, &sf(0.0), &RadialProfile::zero()).unwrap();
    assert_eq!(flat.class, BalanceClass::NonNegative);
    assert!((flat.value(3.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    for w in [sf(0.0), sf(-1.0), sf(2.0), WarpingDescriptor::power_tail(0.5, 1.0).unwrap()] {
        assert_eq!(balance(3, &w, &RadialProfile::eta_of_model(w.clone())).unwrap().class, BalanceClass::IdenticallyZero);
    }
    assert_eq!(balance(2, &sf(-1.0), &RadialProfile::constant_h(0.4).unwrap()).unwrap().class, BalanceClass::NonNegative);
}

#[test]
fn hyperbolic_constant_bounds_split_at_one() {
    for (h, expect_nonneg) in [(0.2, true), (0.99, true), (1.0, true), (1.01, false), (3.0, false)] {
        let c = balance(2, &sf(-1.0), &RadialProfile::constant_h(h).unwrap()).unwrap().class;
        assert_eq!(c == BalanceClass::NonNegative, expect_nonneg, "H = {h}: {c:?}");
        if h < 1.0 {
            assert_ne!(c, BalanceClass::NonPositive);
        }
    }
}

/// Random configuration with a certified sign of the balance.
fn signed_config(rng: &mut ChaCha8Rng) -> (usize, WarpingDescriptor, RadialProfile, BalanceClass) {
    let m = rng.random_range(2..=4);
    if rng.random_bool(0.5) {
        // h = c/r against the flat η = 1/r: M = m(1 − c)/r.
        let c = rng.random_range(0.0..3.0);
        let class = if c <= 1.0 { BalanceClass::NonNegative } else { BalanceClass::NonPositive };
        (m, sf(0.0), RadialProfile::power_law(c, -1.0, Role::HBound).unwrap(), class)
    } else {
        // coth-type η ≥ √−b, so constants below it keep M ≥ 0.
        let b: f64 = -rng.random_range(0.1..2.0);
        let h = rng.random_range(-1.0..1.0) * (-b).sqrt();
        (m, sf(b), RadialProfile::constant_h(h).unwrap(), BalanceClass::NonNegative)
    }
}

#[test]
fn tangency_weight_is_ordered_by_the_balance_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let (m, w, h, class) = signed_config(&mut rng);
        assert_eq!(balance(m, &w, &h).unwrap().class, class);
        let rho = rng.random_range(0.2..2.0);
        let g = RadialProfile::constant_g(rng.random_range(0.2..1.0)).unwrap();
        let plain = DriftedWeight::plain(m, &w, &h, rho, TOL).unwrap();
        let tilted = DriftedWeight::new(m, &w, &h, Some(&g), rho, TOL).unwrap();
        for _ in 0..1000 {
            let r = rho * (1.0 + rng.random_range(0.0f64..6.0).exp2() - 1.0);
            let (a, b) = (tilted.log_value(r).unwrap(), plain.log_value(r).unwrap());
            let slack = 1e-12 * a.abs().max(b.abs()).max(1.0);
            match class {
                BalanceClass::NonNegative => assert!(a <= b + slack, "Λ_g > Λ at r = {r}"),
                BalanceClass::NonPositive => assert!(a >= b - slack, "Λ_g < Λ at r = {r}"),
                _ => unreachable!(),
            }
        }
    }
}

proptest! {
    #[test]
    fn tangency_profiles_stay_in_the_unit_interval(g0 in 0.01f64..=1.0, r in 1e-3f64..1e3) {
        let g = RadialProfile::constant_g(g0).unwrap();
        let v = g.value(r).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
    }

    #[test]
    fn tangency_profiles_above_one_are_rejected(g0 in 1.0001f64..10.0) {
        prop_assert!(RadialProfile::constant_g(g0).is_err());
    }

    #[test]
    fn weights_are_positive(m in 2usize..5, b in -2.0f64..0.0, h in -3.0f64..3.0, r in 1.0f64..50.0) {
        let w = DriftedWeight::plain(m, &sf(b), &RadialProfile::constant_h(h).unwrap(), 1.0, TOL).unwrap();
        prop_assert!(w.log_value(r).unwrap().is_finite());
        prop_assert!(w.value(r).unwrap() >= 0.0);
    }
}
