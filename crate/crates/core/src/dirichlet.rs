//! The radial Dirichlet problem on an annulus `ρ ≤ r ≤ R`:
//!
//! ```text
//! ψ'' + ψ'·(M/g² − η_w) = 0,   ψ(ρ) = 0,   ψ(R) = 1
//! ```
//!
//! solved in closed form as `ψ(r) = ∫_ρ^r Λ_g / ∫_ρ^R Λ_g`, and independently
//! by finite differences. The drifted capacity of the annulus is
//! `Vol(∂D_ρ)·Λ_g(ρ) / ∫_ρ^R Λ_g`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{log_sphere_volume, unit_sphere_area};
use crate::problem::RadialProblem;
use crate::quadrature::{classify_improper, integrate_fallible, DriftedWeight, IntegralOutcome, QuadOptions, RadialWeight, DEFAULT_TOLERANCE};

pub const MIN_BVP_NODES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusSpec {
    pub problem: RadialProblem,
    pub outer_radius: f64,
}

impl AnnulusSpec {
    /// The annulus between `problem.rho` and `outer_radius`.
    pub fn new(problem: RadialProblem, outer_radius: f64) -> Result<Self> {
        let spec = Self { problem, outer_radius };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (rho, big_r) = (self.problem.rho, self.outer_radius);
        if !(rho > 0.0 && rho < big_r && big_r < self.problem.warping.domain_end()) {
            return Err(Error::invalid(format!(
                "annulus needs 0 < ρ < R < {}, got ρ = {rho}, R = {big_r}",
                self.problem.warping.domain_end()
            )));
        }
        Ok(())
    }

    pub fn inner_radius(&self) -> f64 {
        self.problem.rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    FiniteDifference,
    Network,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
}

impl PotentialSolution {
    /// Two-column `(r, psi)` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        crate::io::write_pairs_csv(out, ["r", "psi"], self.grid.iter().copied().zip(self.values.iter().copied()))
    }

    pub fn max_gap(&self, other: &PotentialSolution) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

/// Limit of the annulus capacity as `R → ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CapacityLimit {
    Value(CapacityEstimate),
    Inconclusive { reason: String },
}

/// Closed-form potential for one annulus, with `∫_ρ^R Λ_g` computed once.
pub struct ClosedFormPotential {
    weight: DriftedWeight,
    rho: f64,
    outer: f64,
    log_base: f64,
    total: f64,
    total_error: f64,
    tol: f64,
}

impl ClosedFormPotential {
    pub fn new(spec: &AnnulusSpec, tol: f64) -> Result<Self> {
        spec.validate()?;
        let rho = spec.inner_radius();
        let weight = spec.problem.weight(rho, tol)?;
        let log_base = weight.log_value(rho)?;
        let mut out = Self {
            weight,
            rho,
            outer: spec.outer_radius,
            log_base,
            total: 0.0,
            total_error: 0.0,
            tol,
        };
        let total = out.scaled_integral(rho, spec.outer_radius)?;
        out.total = total.0;
        out.total_error = total.1;
        Ok(out)
    }

    /// `∫_a^b Λ_g / Λ_g(ρ)` and its error estimate.
    fn scaled_integral(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let opts = QuadOptions::mixed(self.tol);
        let i = integrate_fallible(|t| Ok((self.weight.log_value(t)? - self.log_base).exp()), a, b, &opts)?;
        Ok((i.value, i.abs_error))
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= self.rho && r <= self.outer) {
            return Err(Error::Domain {
                value: r,
                lo: self.rho,
                hi: self.outer,
            });
        }
        if r == self.rho {
            return Ok(0.0);
        }
        if r == self.outer {
            return Ok(1.0);
        }
        Ok((self.scaled_integral(self.rho, r)?.0 / self.total).clamp(0.0, 1.0))
    }

    /// `ψ` on an increasing grid, accumulating panel by panel.
    pub fn solve_on(&self, grid: &[f64]) -> Result<PotentialSolution> {
        let mut values = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        let mut prev = self.rho;
        for &r in grid {
            if !(r >= prev && r <= self.outer) {
                return Err(Error::invalid("potential grid must increase within [ρ, R]"));
            }
            acc += self.scaled_integral(prev, r)?.0;
            prev = r;
            values.push(if r == self.outer { 1.0 } else { (acc / self.total).clamp(0.0, 1.0) });
        }
        Ok(PotentialSolution {
            grid: grid.to_vec(),
            values,
            method: Method::ClosedForm,
        })
    }

    /// `∫_ρ^R Λ_g / Λ_g(ρ)`.
    pub fn normalized_total(&self) -> (f64, f64) {
        (self.total, self.total_error)
    }
}

/// `ψ(r) = ∫_ρ^r Λ_g / ∫_ρ^R Λ_g`.
pub fn potential_closed_form(spec: &AnnulusSpec, r: f64) -> Result<f64> {
    ClosedFormPotential::new(spec, DEFAULT_TOLERANCE)?.eval(r)
}

/// `n` radii uniformly spaced in `log r` from `ρ` to `R`.
pub fn log_grid(rho: f64, outer: f64, n: usize) -> Vec<f64> {
    let (a, b) = (rho.ln(), outer.ln());
    (0..n)
        .map(|i| match i {
            0 => rho,
            _ if i == n - 1 => outer,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Second-order finite differences in `x = ln r`, where the equation reads
/// `ψ_xx + (r·B(r) − 1)·ψ_x = 0` with `B = M/g² − η_w`. The tridiagonal
/// system is solved by the Thomas algorithm. A cell Péclet number above 1
/// would break the discrete maximum principle and is reported as a singular
/// row.
pub fn potential_bvp(spec: &AnnulusSpec, n_nodes: usize) -> Result<PotentialSolution> {
    spec.validate()?;
    if n_nodes < MIN_BVP_NODES {
        return Err(Error::invalid(format!("need at least {MIN_BVP_NODES} nodes, got {n_nodes}")));
    }
    let rho = spec.inner_radius();
    let grid = log_grid(rho, spec.outer_radius, n_nodes);
    let h = (spec.outer_radius.ln() - rho.ln()) / (n_nodes - 1) as f64;
    let n = n_nodes - 2;
    let mut lower = vec![0.0; n];
    let mut diag = vec![-2.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let r = grid[i + 1];
        let c = r * spec.problem.drift(r)? - 1.0;
        let peclet = 0.5 * c * h;
        if !peclet.is_finite() || peclet.abs() > 1.0 {
            return Err(Error::SingularMatrix { row: i + 1 });
        }
        lower[i] = 1.0 - peclet;
        upper[i] = 1.0 + peclet;
    }
    // ψ(ρ) = 0 contributes nothing; ψ(R) = 1 moves to the right-hand side.
    rhs[n - 1] = -upper[n - 1];
    for i in 1..n {
        let factor = lower[i] / diag[i - 1];
        diag[i] -= factor * upper[i - 1];
        rhs[i] -= factor * rhs[i - 1];
        if !(diag[i].abs() > 1e-300) {
            return Err(Error::SingularMatrix { row: i + 1 });
        }
    }
    let mut interior = vec![0.0; n];
    interior[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        interior[i] = (rhs[i] - upper[i] * interior[i + 1]) / diag[i];
    }
    let mut values = Vec::with_capacity(n_nodes);
    values.push(0.0);
    values.extend(interior);
    values.push(1.0);
    Ok(PotentialSolution {
        grid,
        values,
        method: Method::FiniteDifference,
    })
}

/// Drifted capacity `Vol(∂D_ρ)·Λ_g(ρ)/∫_ρ^R Λ_g` with first-order error
/// propagation from the quadrature.
pub fn drifted_capacity(spec: &AnnulusSpec) -> Result<CapacityEstimate> {
    drifted_capacity_with(spec, DEFAULT_TOLERANCE)
}

pub fn drifted_capacity_with(spec: &AnnulusSpec, tol: f64) -> Result<CapacityEstimate> {
    let potential = ClosedFormPotential::new(spec, tol)?;
    let (total, err) = potential.normalized_total();
    // Λ_g(ρ) = w(ρ) cancels against the normalization of the integral.
    let value = log_sphere_volume(spec.problem.m, &spec.problem.warping, spec.inner_radius())?.exp() / total;
    Ok(CapacityEstimate {
        value,
        abs_error: value * err / total,
        method: Method::ClosedForm,
    })
}

/// `lim_{R→∞}` of the drifted capacity: 0 when `∫_ρ^∞ Λ_g` diverges, the
/// positive limit when it converges.
pub fn capacity_limit(problem: &RadialProblem, tol: f64) -> Result<CapacityLimit> {
    let rho = problem.rho;
    let weight = problem.weight(rho, tol)?;
    let verdict = classify_improper(&weight, tol);
    Ok(match verdict.outcome {
        IntegralOutcome::Divergent { .. } => CapacityLimit::Value(CapacityEstimate {
            value: 0.0,
            abs_error: 0.0,
            method: Method::ClosedForm,
        }),
        IntegralOutcome::Finite { value, abs_error } => {
            let m = problem.m as f64;
            let cap = unit_sphere_area(problem.m - 1) * (m * problem.warping.log_value(rho)?).exp() / value;
            CapacityLimit::Value(CapacityEstimate {
                value: cap,
                abs_error: cap * abs_error / value,
                method: Method::ClosedForm,
            })
        }
        IntegralOutcome::Inconclusive { reason } => CapacityLimit::Inconclusive { reason },
    })
}
