//! Asymptotic classes of positive radial functions.
//!
//! A [`TailClass`] records the leading terms of `log f(r)` as `r → ∞`:
//!
//! ```text
//! log f(r) ≈ S·r^s + a·r + p·log r + q·log log r
//! ```
//!
//! with the stretched term `S·r^s` optional (`s > 0`, `s ≠ 1`). Convergence of
//! `∫^∞ f` is then decided by lexicographic comparison of the terms in order
//! of dominance, which is what makes the improper-integral verdicts exact for
//! closed warping and profile families.

use serde::{Deserialize, Serialize};

/// Magnitudes at or below this are treated as exact zeros when comparing
/// composed tail coefficients.
pub const EXACT_ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stretched {
    pub coefficient: f64,
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Certainty {
    #[default]
    Exact,
    Fitted { residual: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailClass {
    #[serde(default)]
    pub exponential_rate: f64,
    #[serde(default)]
    pub power_exponent: f64,
    #[serde(default)]
    pub log_exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretched: Option<Stretched>,
    #[serde(default)]
    pub certainty: Certainty,
}

fn is_zero(x: f64) -> bool {
    x.abs() <= EXACT_ZERO
}

impl Default for TailClass {
    fn default() -> Self {
        Self::ZERO
    }
}

impl TailClass {
    pub const ZERO: TailClass = TailClass {
        exponential_rate: 0.0,
        power_exponent: 0.0,
        log_exponent: 0.0,
        stretched: None,
        certainty: Certainty::Exact,
    };

    pub fn new(exponential_rate: f64, power_exponent: f64, log_exponent: f64) -> Self {
        TailClass {
            exponential_rate,
            power_exponent,
            log_exponent,
            ..Self::ZERO
        }
    }

    pub fn power(p: f64) -> Self {
        Self::new(0.0, p, 0.0)
    }

    pub fn exponential(a: f64) -> Self {
        Self::new(a, 0.0, 0.0)
    }

    /// Tail of `c·r^s`, folded into the matching slot.
    pub fn from_power_term(coefficient: f64, exponent: f64) -> Self {
        if exponent <= 0.0 || is_zero(coefficient) {
            Self::ZERO
        } else if (exponent - 1.0).abs() <= EXACT_ZERO {
            Self::exponential(coefficient)
        } else {
            TailClass {
                stretched: Some(Stretched {
                    coefficient,
                    exponent,
                }),
                ..Self::ZERO
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.certainty, Certainty::Exact)
    }

    pub fn with_certainty(mut self, certainty: Certainty) -> Self {
        self.certainty = certainty;
        self
    }

    /// Sum of two tails. `None` when both carry stretched terms of different
    /// exponents, which this representation cannot hold.
    pub fn checked_add(&self, other: &TailClass) -> Option<TailClass> {
        let stretched = match (self.stretched, other.stretched) {
            (None, s) | (s, None) => s,
            (Some(a), Some(b)) if (a.exponent - b.exponent).abs() <= EXACT_ZERO => Some(Stretched {
                coefficient: a.coefficient + b.coefficient,
                exponent: a.exponent,
            }),
            _ => return None,
        };
        let certainty = match (self.certainty, other.certainty) {
            (Certainty::Exact, Certainty::Exact) => Certainty::Exact,
            (Certainty::Fitted { residual: a }, Certainty::Fitted { residual: b }) => Certainty::Fitted {
                residual: a.max(b),
            },
            (Certainty::Fitted { residual }, _) | (_, Certainty::Fitted { residual }) => {
                Certainty::Fitted { residual }
            }
        };
        Some(TailClass {
            exponential_rate: self.exponential_rate + other.exponential_rate,
            power_exponent: self.power_exponent + other.power_exponent,
            log_exponent: self.log_exponent + other.log_exponent,
            stretched,
            certainty,
        })
    }

    pub fn checked_sub(&self, other: &TailClass) -> Option<TailClass> {
        self.checked_add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, k: f64) -> TailClass {
        TailClass {
            exponential_rate: k * self.exponential_rate,
            power_exponent: k * self.power_exponent,
            log_exponent: k * self.log_exponent,
            stretched: self.stretched.map(|s| Stretched {
                coefficient: k * s.coefficient,
                exponent: s.exponent,
            }),
            certainty: self.certainty,
        }
    }

    /// `S·r^s + a·r + p·log r + q·log log r`. The log-log term needs `r > 1`.
    pub fn growth(&self, r: f64) -> f64 {
        let mut g = self.exponential_rate * r + self.power_exponent * r.ln();
        if self.log_exponent != 0.0 {
            g += self.log_exponent * r.ln().ln();
        }
        if let Some(s) = self.stretched {
            g += s.coefficient * r.powf(s.exponent);
        }
        g
    }

    pub fn growth_derivative(&self, r: f64) -> f64 {
        let mut d = self.exponential_rate + self.power_exponent / r;
        if self.log_exponent != 0.0 {
            d += self.log_exponent / (r * r.ln());
        }
        if let Some(s) = self.stretched {
            d += s.coefficient * s.exponent * r.powf(s.exponent - 1.0);
        }
        d
    }

    pub fn growth_second_derivative(&self, r: f64) -> f64 {
        let mut d = -self.power_exponent / (r * r);
        if self.log_exponent != 0.0 {
            let l = r.ln();
            d -= self.log_exponent * (l + 1.0) / (r * l).powi(2);
        }
        if let Some(s) = self.stretched {
            d += s.coefficient * s.exponent * (s.exponent - 1.0) * r.powf(s.exponent - 2.0);
        }
        d
    }

    /// Whether `∫^∞ exp(growth)` converges, by lexicographic comparison of
    /// the terms in order of dominance.
    pub fn integral_converges(&self) -> bool {
        if let Some(s) = self.stretched {
            if s.exponent > 1.0 && !is_zero(s.coefficient) {
                return s.coefficient < 0.0;
            }
        }
        if !is_zero(self.exponential_rate) {
            return self.exponential_rate < 0.0;
        }
        if let Some(s) = self.stretched {
            if s.exponent < 1.0 && !is_zero(s.coefficient) {
                return s.coefficient < 0.0;
            }
        }
        if !is_zero(self.power_exponent + 1.0) {
            return self.power_exponent < -1.0;
        }
        self.log_exponent < -1.0 && !is_zero(self.log_exponent + 1.0)
    }

    /// Pure power-law tail `r^p` with `p < −1`: the ratio between successive
    /// doubling panels is known in closed form.
    pub fn doubling_ratio(&self) -> Option<f64> {
        let pure_power = self.stretched.is_none()
            && is_zero(self.exponential_rate)
            && is_zero(self.log_exponent);
        (pure_power && self.power_exponent < -1.0).then(|| 2f64.powf(self.power_exponent + 1.0))
    }
}
