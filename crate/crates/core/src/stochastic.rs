//! Monte Carlo oracle for the radial potential.
//!
//! The diffusion `dX = B(X) dt + √2 dW` with `B = M/g² − η_w` has generator
//! `ψ ↦ ψ'' + Bψ'`, so the probability of reaching `R` before `ρ` from `r₀`
//! is `ψ_{ρ,R}(r₀)`. This checks the weight, quadrature and boundary-value
//! machinery against an independent estimate. It is a statement about the
//! radial comparison operator only: the submanifold's own Brownian motion is
//! related to it by comparison inequalities, not by identity.
//!
//! Paths draw from per-path ChaCha8 streams keyed by `(seed, path index)`, so
//! estimates do not depend on the number of worker threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ModelSpace;
use crate::problem::RadialProblem;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Radial diffusion with drift `M/g² − η_w` and diffusion coefficient `√2`,
/// absorbed at both ends of the annulus.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionSpec {
    problem: RadialProblem,
}

impl DiffusionSpec {
    pub fn new(problem: RadialProblem) -> Self {
        Self { problem }
    }

    /// The radial process of the model itself, with drift `(m−1)η_w`.
    pub fn intrinsic(model: &ModelSpace, rho: f64) -> Result<Self> {
        Ok(Self::new(RadialProblem::intrinsic(model.dimension(), model.warping().clone(), rho)?))
    }

    pub fn drift(&self, r: f64) -> Result<f64> {
        self.problem.drift(r)
    }

    pub fn problem(&self) -> &RadialProblem {
        &self.problem
    }
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub dt_max: f64,
    pub start: f64,
    pub inner: f64,
    pub outer: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::invalid("need at least one path"));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(Error::invalid("dt_max must be positive"));
        }
        if !(self.inner > 0.0 && self.inner <= self.start && self.start <= self.outer && self.inner < self.outer) {
            return Err(Error::invalid(format!(
                "need 0 < ρ ≤ r₀ ≤ R, got ρ = {}, r₀ = {}, R = {}",
                self.inner, self.start, self.outer
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub n_paths: usize,
    pub step_limit_hits: usize,
}

/// How one path ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathExit {
    pub path: usize,
    /// `true` when the outer level was reached first.
    pub reached_outer: bool,
    pub steps: u64,
    pub exit_time: f64,
    /// Largest radius visited.
    pub running_max: f64,
    pub step_limit: bool,
}

#[derive(Clone, Copy)]
enum StepRule {
    /// `dt = min(dt_max, 0.1/(1+|B|)²)`.
    Plain,
    /// Same, scaled by `(X/ρ)²`, for escape runs over many scales.
    ScaleAdaptive,
}

/// Probability that a Brownian bridge with variance `2·dt` between `x` and
/// `y` (same side of `level`) touches `level`.
fn bridge_crossing(x: f64, y: f64, level: f64, dt: f64) -> f64 {
    (-(x - level) * (y - level) / dt).exp()
}

fn run_path(d: &DiffusionSpec, c: &SimConfig, path: usize, rule: StepRule) -> Result<PathExit> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    rng.set_stream(path as u64);
    let (lo, hi) = (c.inner, c.outer);
    let mut x = c.start;
    let mut t = 0.0;
    let mut steps = 0u64;
    let mut running_max = x;
    let done = |reached_outer: bool, steps: u64, t: f64, running_max: f64| PathExit {
        path,
        reached_outer,
        steps,
        exit_time: t,
        running_max,
        step_limit: false,
    };
    if x <= lo {
        return Ok(done(false, 0, 0.0, x));
    }
    if x >= hi {
        return Ok(done(true, 0, 0.0, x));
    }
    loop {
        if steps >= c.max_steps {
            return Ok(PathExit {
                step_limit: true,
                ..done(false, steps, t, running_max)
            });
        }
        let b = d.drift(x)?;
        let mut dt = c.dt_max.min(0.1 / (1.0 + b.abs()).powi(2));
        if let StepRule::ScaleAdaptive = rule {
            dt *= (x / lo).powi(2);
        }
        let z: f64 = rng.sample(StandardNormal);
        let y = x + b * dt + (2.0 * dt).sqrt() * z;
        steps += 1;
        if y <= lo {
            // Absorbed inside the step; the crossing time is interpolated.
            t += dt * (x - lo) / (x - y);
            return Ok(done(false, steps, t, running_max));
        }
        if y >= hi {
            t += dt * (hi - x) / (y - x);
            return Ok(done(true, steps, t, hi.max(running_max)));
        }
        let u_lo: f64 = rng.random();
        let u_hi: f64 = rng.random();
        t += dt;
        if u_lo < bridge_crossing(x, y, lo, dt) {
            return Ok(done(false, steps, t, running_max));
        }
        if u_hi < bridge_crossing(x, y, hi, dt) {
            return Ok(done(true, steps, t, hi));
        }
        x = y;
        running_max = running_max.max(x);
    }
}

fn run_all(d: &DiffusionSpec, c: &SimConfig, rule: StepRule) -> Result<Vec<PathExit>> {
    c.validate()?;
    d.problem.warping.check_domain(c.outer)?;
    (0..c.n_paths).into_par_iter().map(|i| run_path(d, c, i, rule)).collect()
}

fn binomial(successes: usize, n: usize, limit_hits: usize) -> HittingEstimate {
    let valid = n - limit_hits;
    let p = if valid == 0 { 0.0 } else { successes as f64 / valid as f64 };
    let std_err = if valid == 0 { f64::INFINITY } else { (p * (1.0 - p) / valid as f64).sqrt() };
    HittingEstimate {
        p_hat: p,
        std_err,
        n_paths: n,
        step_limit_hits: limit_hits,
    }
}

/// Euler–Maruyama estimate of `P(reach R before ρ | X₀ = r₀)`. Each step is
/// `dt = min(dt_max, 0.1/(1+|B(X)|)²)`; besides end points outside the
/// annulus, Brownian-bridge crossings inside a step are detected. Paths that
/// exhaust `max_steps` are reported and left out of `p_hat`.
pub fn simulate_hitting(d: &DiffusionSpec, c: &SimConfig) -> Result<HittingEstimate> {
    Ok(simulate_hitting_with_log(d, c)?.0)
}

pub fn simulate_hitting_with_log(d: &DiffusionSpec, c: &SimConfig) -> Result<(HittingEstimate, Vec<PathExit>)> {
    let exits = run_all(d, c, StepRule::Plain)?;
    let hits = exits.iter().filter(|e| e.reached_outer && !e.step_limit).count();
    let limits = exits.iter().filter(|e| e.step_limit).count();
    Ok((binomial(hits, c.n_paths, limits), exits))
}

/// Per-path exit records as CSV.
pub fn write_exit_log<W: Write>(out: W, exits: &[PathExit]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "reached_outer", "steps", "exit_time", "running_max", "step_limit"])?;
    for e in exits {
        w.write_record([
            e.path.to_string(),
            u8::from(e.reached_outer).to_string(),
            e.steps.to_string(),
            e.exit_time.to_string(),
            e.running_max.to_string(),
            u8::from(e.step_limit).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapePoint {
    pub level: f64,
    pub estimate: HittingEstimate,
}

/// Probabilities of reaching each of `levels` before `ρ`, from one batch of
/// paths run up to the highest level: a path reaches level `L` first iff its
/// running maximum before absorption is at least `L`. Steps grow like
/// `(X/ρ)²` so that every doubling costs about the same number of steps.
pub fn escape_schedule(model: &ModelSpace, c: &SimConfig, levels: &[f64]) -> Result<Vec<EscapePoint>> {
    let top = levels.iter().copied().fold(f64::NAN, f64::max);
    if levels.is_empty() || !(top > c.start) {
        return Err(Error::invalid("escape levels must lie above the starting radius"));
    }
    let d = DiffusionSpec::intrinsic(model, c.inner)?;
    let config = SimConfig { outer: top, ..c.clone() };
    let exits = run_all(&d, &config, StepRule::ScaleAdaptive)?;
    let limits = exits.iter().filter(|e| e.step_limit).count();
    Ok(levels
        .iter()
        .map(|&level| {
            let hits = exits.iter().filter(|e| !e.step_limit && e.running_max >= level).count();
            EscapePoint {
                level,
                estimate: binomial(hits, c.n_paths, limits),
            }
        })
        .collect())
}

/// Probability of reaching `r_far` before `ρ`: tends to 0 as `r_far` grows on
/// parabolic models and stays bounded away from 0 on hyperbolic ones.
pub fn estimate_escape(model: &ModelSpace, c: &SimConfig, r_far: f64) -> Result<HittingEstimate> {
    Ok(escape_schedule(model, c, &[r_far])?[0].estimate)
}
