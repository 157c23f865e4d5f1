use std::cell::RefCell;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::table::{Table, DEFAULT_ACCURACY};
use crate::error::{Error, Result};
use crate::quadrature::tail::TailClass;

/// Tolerance on `w'(0) = 1` for sampled warping functions.
const SLOPE_AT_POLE_TOL: f64 = 1e-3;

/// A warping function `w` with `w(0) = 0`, `w'(0) = 1` and `w > 0` on the
/// open domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWarping", into = "RawWarping")]
pub struct WarpingDescriptor {
    family: Family,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `Q_b`: `sin(√b r)/√b`, `r` or `sinh(√−b r)/√−b`.
    SpaceForm { curvature: f64 },
    /// `r·(1 + (r/r_t)²)^((p−1)/2)`, growing like `r^p`.
    PowerTail { exponent: f64, transition_radius: f64 },
    /// `sinh(a r)/a · (1 + r²)^(q/2)`, growing like `r^q e^{a r}`.
    ExpTail { rate: f64, poly_exponent: f64 },
    /// Samples on `[0, r_n]`, continued past `r_n` by the declared tail.
    Tabulated { table: Table, tail: TailClass },
}

/// `w`, `w'`, `w''` at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// `ln(sinh(k r)/k)` without overflow.
fn ln_sinh_over(k: f64, r: f64) -> f64 {
    let x = k * r;
    if x < 20.0 {
        (x.sinh() / k).ln()
    } else {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2 - k.ln()
    }
}

/// `ln(1 + x²)` without overflow.
fn ln_1p_sq(x: f64) -> f64 {
    if x.abs() > 1e8 {
        2.0 * x.abs().ln() + (1.0 / (x * x)).ln_1p()
    } else {
        (x * x).ln_1p()
    }
}

impl WarpingDescriptor {
    pub fn space_form(curvature: f64) -> Result<Self> {
        if !curvature.is_finite() {
            return Err(Error::invalid("space-form curvature must be finite"));
        }
        Ok(Self {
            family: Family::SpaceForm { curvature },
        })
    }

    pub fn euclidean() -> Self {
        Self {
            family: Family::SpaceForm { curvature: 0.0 },
        }
    }

    pub fn hyperbolic() -> Self {
        Self {
            family: Family::SpaceForm { curvature: -1.0 },
        }
    }

    pub fn power_tail(exponent: f64, transition_radius: f64) -> Result<Self> {
        if !exponent.is_finite() || !(transition_radius > 0.0 && transition_radius.is_finite()) {
            return Err(Error::invalid(
                "power tail needs a finite exponent and a positive transition radius",
            ));
        }
        Ok(Self {
            family: Family::PowerTail {
                exponent,
                transition_radius,
            },
        })
    }

    pub fn exp_tail(rate: f64, poly_exponent: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) || !poly_exponent.is_finite() {
            return Err(Error::invalid(
                "exponential tail needs a positive rate and a finite polynomial exponent",
            ));
        }
        Ok(Self {
            family: Family::ExpTail {
                rate,
                poly_exponent,
            },
        })
    }

    /// Builds a sampled warping function. A missing `(0, 0)` sample is added;
    /// the slope at the pole must be 1 to within `1e-3`.
    pub fn tabulated(samples: &[(f64, f64)], tail: TailClass, accuracy: Option<f64>) -> Result<Self> {
        let mut table = Table::from_pairs(samples, accuracy.unwrap_or(DEFAULT_ACCURACY))?;
        if table.first() < 0.0 {
            return Err(Error::invalid("warping samples must start at r >= 0"));
        }
        if table.first() > 0.0 {
            table = table.with_leading(0.0, 0.0)?;
        } else if table.values()[0].abs() > 1e-12 * table.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) {
            return Err(Error::invalid("sampled warping function must vanish at r = 0"));
        }
        if let Some((r, w)) = table.pairs().skip(1).find(|&(_, w)| w <= 0.0) {
            return Err(Error::invalid(format!(
                "sampled warping function must be positive (w({r}) = {w})"
            )));
        }
        if (tail.log_exponent != 0.0) && table.last() <= 1.0 {
            return Err(Error::invalid(
                "a log-log tail needs samples beyond r = 1",
            ));
        }
        let [_, slope, _] = table.derivatives(0.0)?;
        if (slope - 1.0).abs() > SLOPE_AT_POLE_TOL {
            return Err(Error::invalid(format!(
                "sampled warping function has w'(0) = {slope}, expected 1"
            )));
        }
        Ok(Self {
            family: Family::Tabulated { table, tail },
        })
    }

    /// Loads a two-column `(r, w)` CSV.
    pub fn from_csv(path: &Path, tail: TailClass, accuracy: Option<f64>) -> Result<Self> {
        let pairs = crate::io::read_pairs_csv(path)?;
        Self::tabulated(&pairs, tail, accuracy)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_closed_family(&self) -> bool {
        !matches!(self.family, Family::Tabulated { .. })
    }

    /// Right end of the domain: `π/√b` for spherical space forms, else `∞`.
    pub fn domain_end(&self) -> f64 {
        match self.family {
            Family::SpaceForm { curvature } if curvature > 0.0 => PI / curvature.sqrt(),
            _ => f64::INFINITY,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.domain_end().is_infinite()
    }

    pub fn check_domain(&self, r: f64) -> Result<()> {
        let end = self.domain_end();
        if r.is_nan() || r <= 0.0 || r >= end {
            return Err(Error::Domain {
                value: r,
                lo: 0.0,
                hi: end,
            });
        }
        Ok(())
    }

    /// Past the last sample of a table, `log w` follows the declared tail.
    fn tail_log(table: &Table, tail: &TailClass, r: f64) -> f64 {
        table.last_value().ln() + tail.growth(r) - tail.growth(table.last())
    }

    pub fn jet(&self, r: f64) -> Result<Jet> {
        self.check_domain(r)?;
        let jet = match &self.family {
            &Family::SpaceForm { curvature: b } => {
                if b == 0.0 {
                    Jet {
                        value: r,
                        first: 1.0,
                        second: 0.0,
                    }
                } else if b < 0.0 {
                    let k = (-b).sqrt();
                    let s = (k * r).sinh();
                    Jet {
                        value: s / k,
                        first: (k * r).cosh(),
                        second: k * s,
                    }
                } else {
                    let k = b.sqrt();
                    let s = (k * r).sin();
                    Jet {
                        value: s / k,
                        first: (k * r).cos(),
                        second: -k * s,
                    }
                }
            }
            _ => {
                let value = self.log_value(r)?.exp();
                let eta = self.eta(r)?;
                let eta_prime = self.eta_derivative(r)?;
                Jet {
                    value,
                    first: value * eta,
                    second: value * (eta * eta + eta_prime),
                }
            }
        };
        Ok(jet)
    }

    /// `w(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        match &self.family {
            Family::SpaceForm { .. } => Ok(self.jet(r)?.value),
            Family::Tabulated { table, .. } if table.contains(r) => {
                self.check_domain(r)?;
                table.eval(r)
            }
            _ => Ok(self.log_value(r)?.exp()),
        }
    }

    /// `ln w(r)`, evaluated without overflow for large `r`.
    pub fn log_value(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        let v = match &self.family {
            &Family::SpaceForm { curvature: b } => {
                if b == 0.0 {
                    r.ln()
                } else if b < 0.0 {
                    ln_sinh_over((-b).sqrt(), r)
                } else {
                    let k = b.sqrt();
                    ((k * r).sin() / k).ln()
                }
            }
            &Family::PowerTail {
                exponent,
                transition_radius,
            } => r.ln() + 0.5 * (exponent - 1.0) * ln_1p_sq(r / transition_radius),
            &Family::ExpTail {
                rate,
                poly_exponent,
            } => ln_sinh_over(rate, r) + 0.5 * poly_exponent * ln_1p_sq(r),
            Family::Tabulated { table, tail } => {
                if table.contains(r) {
                    table.eval(r)?.ln()
                } else {
                    Self::tail_log(table, tail, r)
                }
            }
        };
        Ok(v)
    }

    /// `η_w = w'/w`, the mean curvature of the distance sphere of radius `r`.
    /// Has a `1/r` pole at the origin.
    pub fn eta(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        let v = match &self.family {
            &Family::SpaceForm { curvature: b } => {
                if b == 0.0 {
                    1.0 / r
                } else if b < 0.0 {
                    let k = (-b).sqrt();
                    k / (k * r).tanh()
                } else {
                    let k = b.sqrt();
                    k / (k * r).tan()
                }
            }
            &Family::PowerTail {
                exponent,
                transition_radius,
            } => 1.0 / r + (exponent - 1.0) * r / (transition_radius * transition_radius + r * r),
            &Family::ExpTail {
                rate,
                poly_exponent,
            } => rate / (rate * r).tanh() + poly_exponent * r / (1.0 + r * r),
            Family::Tabulated { table, tail } => {
                if table.contains(r) {
                    let [w, dw, _] = table.derivatives(r)?;
                    dw / w
                } else {
                    tail.growth_derivative(r)
                }
            }
        };
        Ok(v)
    }

    /// `η_w'`.
    pub fn eta_derivative(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        let v = match &self.family {
            &Family::SpaceForm { curvature: b } => {
                if b == 0.0 {
                    -1.0 / (r * r)
                } else if b < 0.0 {
                    let k = (-b).sqrt();
                    -(k / (k * r).sinh()).powi(2)
                } else {
                    let k = b.sqrt();
                    -(k / (k * r).sin()).powi(2)
                }
            }
            &Family::PowerTail {
                exponent,
                transition_radius,
            } => {
                let t2 = transition_radius * transition_radius;
                let d = t2 + r * r;
                -1.0 / (r * r) + (exponent - 1.0) * (t2 - r * r) / (d * d)
            }
            &Family::ExpTail {
                rate,
                poly_exponent,
            } => {
                let d = 1.0 + r * r;
                -(rate / (rate * r).sinh()).powi(2) + poly_exponent * (1.0 - r * r) / (d * d)
            }
            Family::Tabulated { table, tail } => {
                if table.contains(r) {
                    let [w, dw, d2w] = table.derivatives(r)?;
                    d2w / w - (dw / w).powi(2)
                } else {
                    tail.growth_second_derivative(r)
                }
            }
        };
        Ok(v)
    }

    /// Radial sectional curvature `−w''/w` of the model.
    pub fn radial_curvature(&self, r: f64) -> Result<f64> {
        match self.family {
            Family::SpaceForm { curvature } => {
                self.check_domain(r)?;
                Ok(curvature)
            }
            _ => {
                let eta = self.eta(r)?;
                Ok(-(eta * eta + self.eta_derivative(r)?))
            }
        }
    }

    /// Asymptotic class of `ln w(r)` as `r → ∞`. `None` for compact models.
    pub fn log_tail(&self) -> Option<TailClass> {
        match &self.family {
            &Family::SpaceForm { curvature: b } => {
                if b < 0.0 {
                    Some(TailClass::exponential((-b).sqrt()))
                } else if b == 0.0 {
                    Some(TailClass::power(1.0))
                } else {
                    None
                }
            }
            &Family::PowerTail { exponent, .. } => Some(TailClass::power(exponent)),
            &Family::ExpTail {
                rate,
                poly_exponent,
            } => Some(TailClass::new(rate, poly_exponent, 0.0)),
            Family::Tabulated { tail, .. } => Some(*tail),
        }
    }

    /// `lim_{r→∞} η_w(r)`, when it exists.
    pub fn eta_limit(&self) -> Option<f64> {
        self.log_tail().map(|t| match t.stretched {
            Some(s) if s.exponent > 1.0 => s.coefficient.signum() * f64::INFINITY,
            _ => t.exponential_rate,
        })
    }

    /// A certified lower bound for `η_w` on the whole domain, when the family
    /// admits one in closed form.
    pub fn eta_infimum(&self) -> Option<f64> {
        match self.family {
            Family::SpaceForm { curvature: b } if b <= 0.0 => Some((-b).sqrt()),
            Family::PowerTail { exponent, .. } if exponent >= 0.0 => Some(0.0),
            Family::ExpTail {
                rate,
                poly_exponent,
            } => Some(if poly_exponent >= 0.0 {
                rate
            } else {
                rate + 0.5 * poly_exponent
            }),
            _ => None,
        }
    }

    /// Largest radius carrying sample data, for tabulated descriptors.
    pub fn sample_end(&self) -> Option<f64> {
        match &self.family {
            Family::Tabulated { table, .. } => Some(table.last()),
            _ => None,
        }
    }
}

thread_local! {
    static CSV_BASE: RefCell<Option<PathBuf>> = const { RefCell::new(None) };
}

/// Runs `f` with relative `csv` paths in descriptors resolved against `dir`.
pub fn with_csv_base_dir<T>(dir: &Path, f: impl FnOnce() -> T) -> T {
    let previous = CSV_BASE.with(|b| b.replace(Some(dir.to_path_buf())));
    let out = f();
    CSV_BASE.with(|b| *b.borrow_mut() = previous);
    out
}

pub(crate) fn resolve_csv_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    CSV_BASE.with(|b| match &*b.borrow() {
        Some(base) => base.join(path),
        None => path.to_path_buf(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FamilyTag {
    SpaceForm,
    PowerTail,
    ExpTail,
    Table,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWarping {
    family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transition_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accuracy: Option<f64>,
}

fn require<T>(v: Option<T>, family: &str, key: &str) -> std::result::Result<T, String> {
    v.ok_or_else(|| format!("family `{family}` requires key `{key}`"))
}

fn reject(present: bool, family: &str, key: &str) -> std::result::Result<(), String> {
    if present {
        Err(format!("key `{key}` does not apply to family `{family}`"))
    } else {
        Ok(())
    }
}

impl TryFrom<RawWarping> for WarpingDescriptor {
    type Error = String;

    fn try_from(raw: RawWarping) -> std::result::Result<Self, String> {
        let tabular = raw.samples.is_some() || raw.csv.is_some() || raw.tail.is_some() || raw.accuracy.is_some();
        let built = match raw.family {
            FamilyTag::SpaceForm => {
                reject(tabular || raw.exponent.is_some() || raw.rate.is_some(), "space_form", "table/tail parameters")?;
                reject(raw.transition_radius.is_some() || raw.poly_exponent.is_some(), "space_form", "tail parameters")?;
                WarpingDescriptor::space_form(require(raw.curvature, "space_form", "curvature")?)
            }
            FamilyTag::PowerTail => {
                reject(tabular || raw.curvature.is_some() || raw.rate.is_some() || raw.poly_exponent.is_some(), "power_tail", "other-family parameters")?;
                WarpingDescriptor::power_tail(
                    require(raw.exponent, "power_tail", "exponent")?,
                    require(raw.transition_radius, "power_tail", "transition_radius")?,
                )
            }
            FamilyTag::ExpTail => {
                reject(tabular || raw.curvature.is_some() || raw.exponent.is_some() || raw.transition_radius.is_some(), "exp_tail", "other-family parameters")?;
                WarpingDescriptor::exp_tail(
                    require(raw.rate, "exp_tail", "rate")?,
                    raw.poly_exponent.unwrap_or(0.0),
                )
            }
            FamilyTag::Table => {
                reject(
                    raw.curvature.is_some() || raw.exponent.is_some() || raw.transition_radius.is_some() || raw.rate.is_some() || raw.poly_exponent.is_some(),
                    "table",
                    "closed-family parameters",
                )?;
                let tail = require(raw.tail, "table", "tail")?;
                match (raw.samples, raw.csv) {
                    (Some(s), None) => {
                        let pairs: Vec<(f64, f64)> = s.into_iter().map(|[r, w]| (r, w)).collect();
                        WarpingDescriptor::tabulated(&pairs, tail, raw.accuracy)
                    }
                    (None, Some(path)) => WarpingDescriptor::from_csv(&resolve_csv_path(&path), tail, raw.accuracy),
                    _ => return Err("family `table` requires exactly one of `samples` or `csv`".into()),
                }
            }
        };
        built.map_err(|e| e.to_string())
    }
}

impl From<WarpingDescriptor> for RawWarping {
    fn from(w: WarpingDescriptor) -> Self {
        let mut raw = RawWarping {
            family: FamilyTag::SpaceForm,
            curvature: None,
            exponent: None,
            transition_radius: None,
            rate: None,
            poly_exponent: None,
            samples: None,
            csv: None,
            tail: None,
            accuracy: None,
        };
        match w.family {
            Family::SpaceForm { curvature } => raw.curvature = Some(curvature),
            Family::PowerTail {
                exponent,
                transition_radius,
            } => {
                raw.family = FamilyTag::PowerTail;
                raw.exponent = Some(exponent);
                raw.transition_radius = Some(transition_radius);
            }
            Family::ExpTail {
                rate,
                poly_exponent,
            } => {
                raw.family = FamilyTag::ExpTail;
                raw.rate = Some(rate);
                raw.poly_exponent = Some(poly_exponent);
            }
            Family::Tabulated { table, tail } => {
                raw.family = FamilyTag::Table;
                raw.samples = Some(table.pairs().map(|(r, w)| [r, w]).collect());
                raw.tail = Some(tail);
                raw.accuracy = Some(table.accuracy());
            }
        }
        raw
    }
}
