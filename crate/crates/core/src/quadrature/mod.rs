//! Quadrature, the radial weights and convergence classification of their
//! improper integrals.

pub mod gk;
pub mod improper;
pub mod tail;
pub mod weights;

use serde::{Deserialize, Serialize};

pub use gk::{integrate, integrate_fallible, integrate_with, Integral, QuadOptions};
pub use improper::{integrate_to_infinity, integrate_to_infinity_fallible};
pub use tail::{Certainty, TailClass, EXACT_ZERO};
pub use weights::{
    lambda_plain, lambda_tangency, weight_series, AhlforsWeight, DriftedWeight, FnWeight, Mp2Weight, RadialWeight,
    WeightTail,
};

use crate::error::Result;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Fitted exponents closer than this to −1 are refused.
pub const FITTED_BAND: f64 = 0.1;

const FIT_POINTS: usize = 64;
const FIT_DECADES: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum IntegralOutcome {
    Finite { value: f64, abs_error: f64 },
    Divergent { tail: TailClass },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralVerdict {
    pub outcome: IntegralOutcome,
    /// A lower bound for `∫_ρ^R` over some finite `R`; for finite integrals,
    /// `value − abs_error`.
    pub lower_bound_on_partial: f64,
}

impl IntegralVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self.outcome, IntegralOutcome::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.outcome, IntegralOutcome::Divergent { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.outcome, IntegralOutcome::Inconclusive { .. })
    }

    fn inconclusive(reason: impl Into<String>) -> Self {
        Self {
            outcome: IntegralOutcome::Inconclusive { reason: reason.into() },
            lower_bound_on_partial: 0.0,
        }
    }
}

/// Decides whether `∫_ρ^∞ f` converges.
///
/// With an exact tail the decision is symbolic and the value of a convergent
/// integral is computed over doubling panels. With a sampled ingredient,
/// `log f` is regressed on `(1, r, log r)` over the last two decades of the
/// data; fitted exponents within [`FITTED_BAND`] of −1 are refused.
pub fn classify_improper(weight: &dyn RadialWeight, tol: f64) -> IntegralVerdict {
    match weight.tail() {
        WeightTail::Exact(tail) => classify_exact(weight, tail, tol),
        WeightTail::Sampled { data_end } => classify_fitted(weight, data_end, tol),
        WeightTail::Unknown(reason) => IntegralVerdict::inconclusive(reason),
    }
}

fn partial_lower_bound(weight: &dyn RadialWeight, tol: f64) -> f64 {
    let rho = weight.start();
    let opts = QuadOptions::mixed(tol.max(1e-12));
    integrate_fallible(|t| weight.value(t), rho, 16.0 * rho, &opts)
        .map(|i| (i.value - i.abs_error).max(0.0))
        .unwrap_or(0.0)
}

fn classify_exact(weight: &dyn RadialWeight, tail: TailClass, tol: f64) -> IntegralVerdict {
    if !tail.integral_converges() {
        return IntegralVerdict {
            outcome: IntegralOutcome::Divergent { tail },
            lower_bound_on_partial: partial_lower_bound(weight, tol),
        };
    }
    match integrate_to_infinity_fallible(|t| weight.value(t), weight.start(), tail.doubling_ratio(), tol) {
        Ok(i) => IntegralVerdict {
            outcome: IntegralOutcome::Finite {
                value: i.value,
                abs_error: i.abs_error,
            },
            lower_bound_on_partial: i.value - i.abs_error,
        },
        Err(e) => IntegralVerdict::inconclusive(format!("convergent tail but value unavailable: {e}")),
    }
}

/// Least squares for `y ≈ X β` through the normal equations, with columns
/// scaled to unit norm first. Returns `β` and the rms residual.
fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = columns.len();
    let norms: Vec<f64> = columns.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = columns[i].iter().zip(&columns[j]).map(|(p, q)| p * q).sum::<f64>() / (norms[i] * norms[j]);
        }
        a[i][k] = columns[i].iter().zip(y).map(|(p, q)| p * q).sum::<f64>() / norms[i];
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        a.swap(col, pivot);
        if a[col][col].abs() < 1e-14 {
            return None;
        }
        for row in 0..k {
            if row != col {
                let factor = a[row][col] / a[col][col];
                for c in col..=k {
                    a[row][c] -= factor * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i] / norms[i]).collect();
    let rms = (y
        .iter()
        .enumerate()
        .map(|(n, &yn)| {
            let fit: f64 = (0..k).map(|i| beta[i] * columns[i][n]).sum();
            (yn - fit).powi(2)
        })
        .sum::<f64>()
        / y.len() as f64)
        .sqrt();
    Some((beta, rms))
}

fn classify_fitted(weight: &dyn RadialWeight, data_end: f64, tol: f64) -> IntegralVerdict {
    let rho = weight.start();
    let lo = rho.max(data_end / 10f64.powf(FIT_DECADES));
    if !(data_end > 2.0 * lo) {
        return IntegralVerdict::inconclusive(format!(
            "sampled data ends at {data_end}, too close to ρ = {rho} for a tail fit"
        ));
    }
    let radii: Vec<f64> = (0..FIT_POINTS)
        .map(|i| lo * (data_end / lo).powf(i as f64 / (FIT_POINTS - 1) as f64))
        .collect();
    let y: Result<Vec<f64>> = radii.iter().map(|&r| weight.log_value(r)).collect();
    let y = match y {
        Ok(y) => y,
        Err(e) => return IntegralVerdict::inconclusive(format!("tail samples unavailable: {e}")),
    };
    let ones = vec![1.0; FIT_POINTS];
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let Some((full, rms_full)) = least_squares(&[ones.clone(), radii.clone(), logs.clone()], &y) else {
        return IntegralVerdict::inconclusive("tail regression is degenerate");
    };
    let (c0, rate, power, residual) = if full[1].abs() * (data_end - lo) <= (10.0 * rms_full).max(1e-6) {
        match least_squares(&[ones, logs], &y) {
            Some((reduced, rms)) => (reduced[0], 0.0, reduced[1], rms),
            None => return IntegralVerdict::inconclusive("tail regression is degenerate"),
        }
    } else {
        (full[0], full[1], full[2], rms_full)
    };
    let tail = TailClass::new(rate, power, 0.0).with_certainty(Certainty::Fitted { residual });
    if rate == 0.0 && (power + 1.0).abs() < FITTED_BAND {
        return IntegralVerdict::inconclusive(format!(
            "fitted power exponent {power:.4} is within {FITTED_BAND} of −1 (residual {residual:.2e})"
        ));
    }
    if !tail.integral_converges() {
        return IntegralVerdict {
            outcome: IntegralOutcome::Divergent { tail },
            lower_bound_on_partial: partial_lower_bound(weight, tol),
        };
    }
    let opts = QuadOptions::mixed(tol);
    let head = match integrate_fallible(|t| weight.value(t), rho, data_end, &opts) {
        Ok(i) => i,
        Err(e) => return IntegralVerdict::inconclusive(format!("partial integral failed: {e}")),
    };
    let fitted = |t: f64| (c0 + rate * t + power * t.ln()).exp();
    match integrate_to_infinity(fitted, data_end, tail.doubling_ratio(), tol) {
        Ok(rest) => IntegralVerdict {
            outcome: IntegralOutcome::Finite {
                value: head.value + rest.value,
                abs_error: head.abs_error + rest.abs_error,
            },
            lower_bound_on_partial: head.value - head.abs_error,
        },
        Err(e) => IntegralVerdict::inconclusive(format!("fitted remainder failed: {e}")),
    }
}
