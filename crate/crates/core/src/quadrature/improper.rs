//! Improper integrals `∫_a^∞ f` as limits over doubling panels `[a·2^k, a·2^{k+1}]`.

use super::gk::{integrate_fallible, Integral, QuadOptions};
use crate::error::{Error, Result};

const MAX_DOUBLINGS: usize = 120;
const MIN_DOUBLINGS: usize = 4;

/// Sums doubling panels and extrapolates the remainder geometrically. When
/// the asymptotic ratio between panels is known (pure power tails) it is used
/// directly; otherwise the observed ratio of the last two panels stands in.
/// Only meaningful for integrands already known to be integrable.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, known_ratio: Option<f64>, tol: f64) -> Result<Integral> {
    integrate_to_infinity_fallible(|t| Ok(f(t)), a, known_ratio, tol)
}

/// [`integrate_to_infinity`] for integrands that can fail.
pub fn integrate_to_infinity_fallible<F: Fn(f64) -> Result<f64>>(
    f: F,
    a: f64,
    known_ratio: Option<f64>,
    tol: f64,
) -> Result<Integral> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid("improper integrals start at a positive radius"));
    }
    let opts = QuadOptions {
        abs_tol: tol / 16.0,
        rel_tol: tol / 16.0,
        ..QuadOptions::absolute(tol)
    };
    let mut pieces: Vec<f64> = Vec::new();
    let mut quad_error = 0.0;
    let mut previous_total: Option<f64> = None;
    let mut lo = a;
    for k in 0..MAX_DOUBLINGS {
        let hi = 2.0 * lo;
        let piece = integrate_fallible(&f, lo, hi, &opts)?;
        pieces.push(piece.value);
        quad_error += piece.abs_error;
        lo = hi;
        let n = pieces.len();
        let last = pieces[n - 1];
        let partial = super::gk::pairwise_sum(&pieces);
        if n >= 2 && last == 0.0 && pieces[n - 2] == 0.0 {
            return Ok(Integral {
                value: partial,
                abs_error: quad_error,
            });
        }
        let ratio = known_ratio.or_else(|| {
            let before = pieces[n.checked_sub(2)?];
            let q = last / before;
            (before != 0.0 && (0.0..1.0).contains(&q)).then_some(q)
        });
        let Some(q) = ratio else {
            previous_total = None;
            continue;
        };
        let total = partial + last * q / (1.0 - q);
        if let Some(prev) = previous_total {
            let change = (total - prev).abs();
            if k + 1 >= MIN_DOUBLINGS && change <= tol.max(tol * total.abs()) {
                return Ok(Integral {
                    value: total,
                    abs_error: change + quad_error,
                });
            }
        }
        previous_total = Some(total);
    }
    Err(Error::Convergence(format!(
        "improper integral from {a} did not settle after {MAX_DOUBLINGS} doublings"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square() {
        let r = integrate_to_infinity(|t| t.powi(-2), 1.0, Some(0.5), 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = integrate_to_infinity(|t| t.powi(-2), 1.0, None, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_decay() {
        let r = integrate_to_infinity(|t: f64| (-0.2 * t).exp(), 1.0, None, 1e-10).unwrap();
        assert!((r.value - 5.0 * (-0.2f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn inverse_sinh() {
        let r = integrate_to_infinity(|t: f64| 1.0 / t.sinh(), 1.0, None, 1e-10).unwrap();
        let exact = (1.0 / 0.5f64.tanh()).ln();
        assert!((r.value - exact).abs() < 1e-9);
    }

    #[test]
    fn slow_power_with_known_ratio() {
        let p: f64 = -1.3;
        let r = integrate_to_infinity(|t| t.powf(p), 1.0, Some(2f64.powf(p + 1.0)), 1e-10).unwrap();
        assert!((r.value - 1.0 / 0.3).abs() < 1e-8);
    }
}
