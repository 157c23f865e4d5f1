use parahyp::classifier::{
    classify_model, classify_submanifold, mp2_equivalence_check, necessary_conditions, Corollary, Known, ObligationStatus,
    Outcome, Rule,
};
use parahyp::geometry::{ModelSpace, WarpingDescriptor};
use parahyp::problem::{BoundDirection, RadialProblem};
use parahyp::profiles::{catalog, RadialProfile};
use parahyp::quadrature::IntegralOutcome;
use parahyp::Error;

fn model(b: f64, m: usize) -> ModelSpace {
    ModelSpace::new(m, WarpingDescriptor::space_form(b).unwrap()).unwrap()
}

#[test]
fn volume_criterion_on_space_forms() {
    assert_eq!(classify_model(&model(0.0, 2), 2, 1.0).unwrap().outcome, Outcome::Parabolic);
    assert_eq!(classify_model(&model(0.0, 3), 3, 1.0).unwrap().outcome, Outcome::Hyperbolic);
    let h2 = classify_model(&model(-1.0, 2), 2, 1.0).unwrap();
    assert_eq!(h2.outcome, Outcome::Hyperbolic);
    // ∫_1^∞ dt/sinh t = ln coth(1/2).
    let Some(IntegralOutcome::Finite { value, .. }) = h2.certificate.integral.map(|v| v.outcome) else {
        panic!("expected a finite integral");
    };
    let exact = (1.0 / 0.5f64.tanh()).ln();
    assert!((value - exact).abs() < 1e-9, "{value} vs {exact}");
}

#[test]
fn volume_criterion_rejects_compact_models() {
    assert!(classify_model(&model(1.0, 2), 2, 1.0).is_err());
}

#[test]
fn cone_is_parabolic_by_t1a() {
    let entry = catalog::lookup("cone:0.7854").unwrap();
    let v = classify_submanifold(&entry.problem).unwrap();
    assert_eq!(v.outcome, Outcome::Parabolic);
    assert_eq!(v.certificate.rule, Some(Rule::T1a));
    assert!(v.certificate.checklist.iter().all(|c| c.passed));
    assert!(v.replay().unwrap());
}

#[test]
fn paraboloid_is_parabolic() {
    let entry = catalog::lookup("paraboloid:1.0").unwrap();
    let v = classify_submanifold(&entry.problem).unwrap();
    assert_eq!(v.outcome, Outcome::Parabolic);
    assert_eq!(v.certificate.rule, Some(Rule::T1a));
}

#[test]
fn cmc_surfaces_in_hyperbolic_space() {
    let v = classify_submanifold(&catalog::lookup("cmc-h3:0.4").unwrap().problem).unwrap();
    assert_eq!(v.outcome, Outcome::Hyperbolic);
    assert_eq!(v.certificate.rule, Some(Rule::T2b));
    // At H = ½√−b the weight tends to a constant: ∫Λ diverges and no rule fires.
    let v = classify_submanifold(&catalog::lookup("cmc-h3:0.5").unwrap().problem).unwrap();
    assert_eq!(v.outcome, Outcome::Inconclusive);
    assert!(v.certificate.checklist.iter().any(|c| !c.passed));
}

#[test]
fn eta_bound_goes_through_corollary_three() {
    let w = WarpingDescriptor::euclidean();
    let p = RadialProblem::new(
        2,
        w.clone(),
        BoundDirection::Both,
        RadialProfile::eta_of_model(w),
        BoundDirection::Both,
        None,
        1.0,
    )
    .unwrap();
    let v = classify_submanifold(&p).unwrap();
    assert_eq!(v.outcome, Outcome::Parabolic);
    assert_eq!(v.certificate.rule, Some(Rule::Cor3));
}

#[test]
fn intrinsic_problems_match_the_volume_criterion() {
    for (b, m) in [(0.0, 2), (0.0, 3), (-1.0, 2)] {
        let w = WarpingDescriptor::space_form(b).unwrap();
        let a = classify_model(&ModelSpace::new(m, w.clone()).unwrap(), m, 1.0).unwrap();
        let intrinsic = classify_submanifold(&RadialProblem::intrinsic(m, w.clone(), 1.0).unwrap()).unwrap();
        let flat_bounds = RadialProblem::new(
            m,
            w,
            BoundDirection::Both,
            RadialProfile::zero(),
            BoundDirection::Both,
            Some(RadialProfile::constant_g(1.0).unwrap()),
            1.0,
        )
        .unwrap();
        let bounded = classify_submanifold(&flat_bounds).unwrap();
        assert_eq!(a.outcome, intrinsic.outcome);
        assert_eq!(a.outcome, bounded.outcome, "b = {b}, m = {m}");
    }
}

#[test]
fn identical_weights_use_the_finite_branch() {
    // m = 3 in flat space with C ≡ 0 and T ≡ 1: Λ = Λ_g = 1/r², so only T2B fires.
    let p = RadialProblem::new(
        3,
        WarpingDescriptor::euclidean(),
        BoundDirection::Both,
        RadialProfile::zero(),
        BoundDirection::Both,
        Some(RadialProfile::constant_g(1.0).unwrap()),
        1.0,
    )
    .unwrap();
    assert_eq!(classify_submanifold(&p).unwrap().certificate.rule, Some(Rule::T2b));
}

#[test]
fn tolerance_changes_never_flip_definite_verdicts() {
    for name in ["cone:0.5", "cmc-h3:0.3", "cmc-h3:0.45"] {
        let p = catalog::lookup(name).unwrap().problem;
        let base = parahyp::classifier::classify_submanifold_with(&p, 1e-10).unwrap().outcome;
        let loose = parahyp::classifier::classify_submanifold_with(&p, 1e-9).unwrap().outcome;
        assert!(base == loose || base == Outcome::Inconclusive || loose == Outcome::Inconclusive);
    }
}

#[test]
fn corollary_obligations() {
    let flat = WarpingDescriptor::euclidean();
    let supplied = RadialProblem::new(
        2,
        flat.clone(),
        BoundDirection::Lower,
        RadialProfile::zero(),
        BoundDirection::Lower,
        Some(RadialProfile::constant_g(1.0).unwrap()),
        1.0,
    )
    .unwrap();
    let obligations = necessary_conditions(&supplied, Known::Hyperbolic, 1e-10).unwrap();
    assert_eq!(obligations.len(), 1);
    assert_eq!(obligations[0].corollary, Corollary::Cor2A);
    assert_eq!(obligations[0].status, ObligationStatus::Fails);

    let upper = RadialProblem::new(
        2,
        flat.clone(),
        BoundDirection::Upper,
        RadialProfile::zero(),
        BoundDirection::Upper,
        None,
        1.0,
    )
    .unwrap();
    let obligations = necessary_conditions(&upper, Known::Parabolic, 1e-10).unwrap();
    assert_eq!(obligations[0].corollary, Corollary::Cor1A);
    assert_eq!(obligations[0].status, ObligationStatus::Holds);

    let steep = RadialProblem::new(
        3,
        flat,
        BoundDirection::Lower,
        RadialProfile::power_law(2.0, -1.0, parahyp::profiles::Role::HBound).unwrap(),
        BoundDirection::Lower,
        None,
        1.0,
    )
    .unwrap();
    let obligations = necessary_conditions(&steep, Known::Hyperbolic, 1e-10).unwrap();
    assert_eq!(obligations[0].corollary, Corollary::Cor2B);
    // Λ = r·exp(−3∫(1/t − 2/t)) = r⁴ diverges: the data contradict hyperbolicity.
    assert_eq!(obligations[0].status, ObligationStatus::Fails);

    assert!(matches!(
        necessary_conditions(&upper, Known::Hyperbolic, 1e-10),
        Err(Error::HypothesisMismatch(_))
    ));
}

#[test]
fn mp2_equivalence_on_closed_families() {
    let plane = RadialProblem::intrinsic(2, WarpingDescriptor::euclidean(), 1.0).unwrap();
    assert!(mp2_equivalence_check(&plane, 1e-10).unwrap());
    let cmc = catalog::lookup("cmc-h3:0.4").unwrap().problem;
    assert!(mp2_equivalence_check(&cmc, 1e-10).unwrap());
    let paraboloid = catalog::lookup("paraboloid:1").unwrap().problem;
    assert!(mp2_equivalence_check(&paraboloid, 1e-10).is_err());
}
