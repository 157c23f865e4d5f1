use parahyp::geometry::{ModelSpace, WarpingDescriptor};
use parahyp::problem::RadialProblem;
use parahyp::stochastic::{
    escape_schedule, simulate_hitting, simulate_hitting_with_log, write_exit_log, DiffusionSpec, SimConfig,
    DEFAULT_MAX_STEPS,
};

fn flat(m: usize) -> DiffusionSpec {
    DiffusionSpec::new(RadialProblem::intrinsic(m, WarpingDescriptor::euclidean(), 1.0).unwrap())
}

fn config(seed: u64, n_paths: usize, dt_max: f64) -> SimConfig {
    SimConfig {
        seed,
        n_paths,
        dt_max,
        start: 2.0,
        inner: 1.0,
        outer: 4.0,
        max_steps: DEFAULT_MAX_STEPS,
    }
}

#[test]
fn plane_hitting_probability_is_logarithmic() {
    let e = simulate_hitting(&flat(2), &config(1, 20_000, 2e-3)).unwrap();
    let exact = 2f64.ln() / 4f64.ln();
    assert_eq!(e.step_limit_hits, 0);
    assert!((e.p_hat - exact).abs() <= 3.0 * e.std_err, "{e:?}");
}

#[test]
fn space_hitting_probability_is_newtonian() {
    let e = simulate_hitting(&flat(3), &config(2, 20_000, 2e-3)).unwrap();
    let exact = (1.0 - 0.5) / (1.0 - 0.25);
    assert!((e.p_hat - exact).abs() <= 3.0 * e.std_err, "{e:?}");
}

#[test]
fn mean_curvature_drift_matches_the_weighted_potential() {
    use parahyp::dirichlet::{potential_closed_form, AnnulusSpec};
    use parahyp::problem::BoundDirection;
    use parahyp::profiles::RadialProfile;
    // Surface in H³ with |H| ≤ 0.4: drift 2·0.4 − coth r.
    let p = RadialProblem::new(
        2,
        WarpingDescriptor::hyperbolic(),
        BoundDirection::Both,
        RadialProfile::constant_h(0.4).unwrap(),
        BoundDirection::Upper,
        None,
        1.0,
    )
    .unwrap();
    let spec = AnnulusSpec::new(p.clone(), 3.0).unwrap();
    let exact = potential_closed_form(&spec, 1.8).unwrap();
    let c = SimConfig {
        start: 1.8,
        outer: 3.0,
        ..config(3, 20_000, 2e-3)
    };
    let e = simulate_hitting(&DiffusionSpec::new(p), &c).unwrap();
    assert!((e.p_hat - exact).abs() <= 3.0 * e.std_err, "{e:?} vs {exact}");
}

#[test]
fn halving_the_step_moves_the_estimate_by_less_than_the_noise() {
    let a = simulate_hitting(&flat(2), &config(4, 10_000, 4e-3)).unwrap();
    let b = simulate_hitting(&flat(2), &config(4, 10_000, 2e-3)).unwrap();
    assert!((a.p_hat - b.p_hat).abs() < 2.0 * a.std_err.max(b.std_err) * std::f64::consts::SQRT_2);
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_hitting_with_log(&flat(2), &config(5, 2_000, 2e-3)).unwrap())
    };
    let (a, la) = run(1);
    let (b, lb) = run(4);
    assert_eq!(a, b);
    assert_eq!(la, lb);
}

#[test]
fn exit_log_has_a_row_per_path() {
    let (_, log) = simulate_hitting_with_log(&flat(2), &config(6, 50, 2e-3)).unwrap();
    let mut buf = Vec::new();
    write_exit_log(&mut buf, &log).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 51);
}

#[test]
fn escape_decays_in_the_plane_and_persists_in_space() {
    let levels: Vec<f64> = (1..=8).map(|k| 2f64.powi(k + 1)).collect();
    let c = SimConfig {
        outer: 2.0,
        ..config(7, 4_000, 2e-3)
    };
    let plane = escape_schedule(&ModelSpace::new(2, WarpingDescriptor::euclidean()).unwrap(), &c, &levels).unwrap();
    let space = escape_schedule(&ModelSpace::new(3, WarpingDescriptor::euclidean()).unwrap(), &c, &levels).unwrap();
    for (p, s) in plane.iter().zip(&space) {
        // P(reach L before 1 | start 2): ln 2/ln L in the plane, (1/2)/(1 − 1/L) in space.
        let lp = 2f64.ln() / p.level.ln();
        let ls = 0.5 / (1.0 - 1.0 / s.level);
        assert!((p.estimate.p_hat - lp).abs() <= 4.0 * p.estimate.std_err + 0.02, "{p:?} vs {lp}");
        assert!((s.estimate.p_hat - ls).abs() <= 4.0 * s.estimate.std_err + 0.02, "{s:?} vs {ls}");
    }
    assert!(plane.last().unwrap().estimate.p_hat < 0.15);
    assert!(space.last().unwrap().estimate.p_hat > 0.4);
}
