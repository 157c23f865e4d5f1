//! Radial bound profiles for submanifolds.
//!
//! Two profiles control a submanifold `S^m` of an ambient manifold with a pole:
//!
//! * `h` bounds the o-radial mean convexity `C(x) = −⟨∇^N r, H_S⟩`, where
//!   `H_S` is the (averaged) mean curvature vector. `h` bounds `C`, not the
//!   scalar mean curvature, and carries no further sign translation.
//! * `g` bounds the radial tangency `T(x) = ‖∇^S r‖` from below, so
//!   `0 < g ≤ 1`.

mod balance;
pub mod catalog;

use serde::{Deserialize, Serialize};

pub use balance::{balance, balance_on, BalanceClass, BalanceReport, Grade, SCAN_HI, SCAN_LO, SCAN_SAMPLES};

use crate::error::{Error, Result};
use crate::geometry::{Table, WarpingDescriptor, DEFAULT_ACCURACY};
use crate::quadrature::gk::{integrate_fallible, QuadOptions};
use crate::quadrature::tail::TailClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    #[serde(rename = "h")]
    HBound,
    #[serde(rename = "g")]
    GBound,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind {
    Zero,
    Constant(f64),
    /// `η_w` of a (possibly different) warping function.
    EtaOfModel(WarpingDescriptor),
    /// `coefficient · r^exponent`.
    PowerLaw { coefficient: f64, exponent: f64 },
    /// Samples on `[r_0, r_n]`, continued past `r_n` by a closed tail.
    Tabulated { table: Table, tail: Box<ProfileKind> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct RadialProfile {
    kind: ProfileKind,
    role: Role,
}

impl ProfileKind {
    fn is_closed(&self) -> bool {
        !matches!(self, ProfileKind::Tabulated { .. })
    }

    /// Value at `r > 0`. Tabulated profiles are undefined below their first
    /// sample.
    pub fn value(&self, r: f64) -> Result<f64> {
        match self {
            ProfileKind::Zero => Ok(0.0),
            ProfileKind::Constant(c) => Ok(*c),
            ProfileKind::EtaOfModel(w) => w.eta(r),
            ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } => {
                if !(r > 0.0) {
                    return Err(Error::Domain {
                        value: r,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
                Ok(coefficient * r.powf(*exponent))
            }
            ProfileKind::Tabulated { table, tail } => {
                if r > table.last() {
                    tail.value(r)
                } else if r < table.first() {
                    Err(Error::Domain {
                        value: r,
                        lo: table.first(),
                        hi: f64::INFINITY,
                    })
                } else {
                    table.eval(r)
                }
            }
        }
    }

    /// `∫_a^b` of the profile, `0 < a ≤ b`. Closed kinds integrate exactly;
    /// tabulated kinds integrate the interpolant panel by panel.
    pub fn integral(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        if a > b {
            return Ok(-self.integral(b, a, tol)?);
        }
        match self {
            ProfileKind::Zero => Ok(0.0),
            ProfileKind::Constant(c) => Ok(c * (b - a)),
            ProfileKind::EtaOfModel(w) => Ok(w.log_value(b)? - w.log_value(a)?),
            &ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } => {
                if (exponent + 1.0).abs() <= f64::EPSILON {
                    Ok(coefficient * (b / a).ln())
                } else {
                    let e = exponent + 1.0;
                    Ok(coefficient * (b.powf(e) - a.powf(e)) / e)
                }
            }
            ProfileKind::Tabulated { table, tail } => {
                let mut total = 0.0;
                let end = table.last();
                if a < end {
                    let top = b.min(end);
                    let opts = QuadOptions::mixed(tol);
                    let radii = table.radii();
                    let mut lo = a;
                    let start = radii.partition_point(|&x| x <= a);
                    for &node in radii[start..].iter().chain(std::iter::once(&top)) {
                        let hi = node.min(top);
                        if hi > lo {
                            let piece = integrate_fallible(|t| table.eval(t), lo, hi, &opts)?;
                            total += piece.value;
                            lo = hi;
                        }
                        if hi >= top {
                            break;
                        }
                    }
                }
                if b > end {
                    total += tail.integral(a.max(end), b, tol)?;
                }
                Ok(total)
            }
        }
    }

    /// Asymptotic class of `r ↦ ∫^r` of the profile.
    pub fn antiderivative_tail(&self) -> Option<TailClass> {
        match self {
            ProfileKind::Zero => Some(TailClass::ZERO),
            ProfileKind::Constant(c) => Some(TailClass::exponential(*c)),
            ProfileKind::EtaOfModel(w) => w.log_tail(),
            &ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } => Some(if (exponent + 1.0).abs() <= f64::EPSILON {
                TailClass::power(coefficient)
            } else if exponent < -1.0 {
                TailClass::ZERO
            } else {
                TailClass::from_power_term(coefficient / (exponent + 1.0), exponent + 1.0)
            }),
            ProfileKind::Tabulated { tail, .. } => tail.antiderivative_tail(),
        }
    }

    /// `lim_{r→∞}` of the profile (possibly infinite).
    pub fn limit(&self) -> Option<f64> {
        match self {
            ProfileKind::Zero => Some(0.0),
            ProfileKind::Constant(c) => Some(*c),
            ProfileKind::EtaOfModel(w) => w.eta_limit(),
            &ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } => Some(if coefficient == 0.0 || exponent < 0.0 {
                0.0
            } else if exponent == 0.0 {
                coefficient
            } else {
                coefficient.signum() * f64::INFINITY
            }),
            ProfileKind::Tabulated { tail, .. } => tail.limit(),
        }
    }

    /// A certified upper bound on `(0, ∞)`, when one follows from the
    /// closed form alone.
    pub fn supremum(&self) -> Option<f64> {
        match self {
            ProfileKind::Zero => Some(0.0),
            ProfileKind::Constant(c) => Some(*c),
            &ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } => {
                if exponent == 0.0 {
                    Some(coefficient)
                } else if coefficient <= 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn sample_end(&self) -> Option<f64> {
        match self {
            ProfileKind::Tabulated { table, .. } => Some(table.last()),
            _ => None,
        }
    }
}

impl RadialProfile {
    pub fn new(kind: ProfileKind, role: Role) -> Result<Self> {
        match &kind {
            ProfileKind::Constant(c) if !c.is_finite() => return Err(Error::invalid("profile constant must be finite")),
            ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } if !(coefficient.is_finite() && exponent.is_finite()) => {
                return Err(Error::invalid("power-law parameters must be finite"))
            }
            ProfileKind::Tabulated { tail, .. } if !tail.is_closed() || matches!(**tail, ProfileKind::EtaOfModel(_)) => {
                return Err(Error::invalid(
                    "tabulated profile tails must be zero, constant or a power law",
                ))
            }
            _ => {}
        }
        if role == Role::GBound {
            check_tangency(&kind)?;
        }
        Ok(Self { kind, role })
    }

    pub fn h(kind: ProfileKind) -> Result<Self> {
        Self::new(kind, Role::HBound)
    }

    pub fn g(kind: ProfileKind) -> Result<Self> {
        Self::new(kind, Role::GBound)
    }

    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Zero,
            role: Role::HBound,
        }
    }

    pub fn constant_h(value: f64) -> Result<Self> {
        Self::h(ProfileKind::Constant(value))
    }

    pub fn constant_g(value: f64) -> Result<Self> {
        Self::g(ProfileKind::Constant(value))
    }

    pub fn eta_of_model(w: WarpingDescriptor) -> Self {
        Self {
            kind: ProfileKind::EtaOfModel(w),
            role: Role::HBound,
        }
    }

    pub fn power_law(coefficient: f64, exponent: f64, role: Role) -> Result<Self> {
        Self::new(
            ProfileKind::PowerLaw {
                coefficient,
                exponent,
            },
            role,
        )
    }

    /// Sampled profile on `[r_0, r_n]` with a closed continuation.
    pub fn tabulated(samples: &[(f64, f64)], tail: ProfileKind, role: Role, accuracy: Option<f64>) -> Result<Self> {
        let table = Table::from_pairs(samples, accuracy.unwrap_or(DEFAULT_ACCURACY))?;
        if !(table.first() > 0.0) {
            return Err(Error::invalid("tabulated profiles start at a positive radius"));
        }
        Self::new(
            ProfileKind::Tabulated {
                table,
                tail: Box::new(tail),
            },
            role,
        )
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// Same profile under another role, revalidated.
    pub fn with_role(self, role: Role) -> Result<Self> {
        if self.role == role {
            return Ok(self);
        }
        Self::new(self.kind, role)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.kind.value(r)
    }

    pub fn integral(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        self.kind.integral(a, b, tol)
    }

    pub fn antiderivative_tail(&self) -> Option<TailClass> {
        self.kind.antiderivative_tail()
    }

    pub fn limit(&self) -> Option<f64> {
        self.kind.limit()
    }

    pub fn is_closed(&self) -> bool {
        self.kind.is_closed()
    }

    /// Smallest radius where the profile is defined.
    pub fn domain_start(&self) -> f64 {
        match &self.kind {
            ProfileKind::Tabulated { table, .. } => table.first(),
            _ => 0.0,
        }
    }

    pub fn sample_end(&self) -> Option<f64> {
        self.kind.sample_end()
    }

    /// Sample radii, for tabulated profiles.
    pub fn nodes(&self) -> &[f64] {
        match &self.kind {
            ProfileKind::Tabulated { table, .. } => table.radii(),
            _ => &[],
        }
    }

    /// For a tangency bound: the constant value it takes for all large `r`.
    pub fn tail_constant(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::Constant(c) => Some(*c),
            ProfileKind::PowerLaw {
                coefficient,
                exponent: 0.0,
            } => Some(*coefficient),
            ProfileKind::Tabulated { tail, .. } => match **tail {
                ProfileKind::Constant(c) => Some(c),
                _ => None,
            },
            _ => None,
        }
    }
}

/// A tangency bound must lie in `(0, 1]` everywhere it is defined. Values
/// above 1 are rejected rather than clamped.
fn check_tangency(kind: &ProfileKind) -> Result<()> {
    let in_range = |v: f64| v > 0.0 && v <= 1.0;
    match kind {
        ProfileKind::Constant(c) if in_range(*c) => Ok(()),
        ProfileKind::PowerLaw {
            coefficient,
            exponent,
        } if *exponent == 0.0 && in_range(*coefficient) => Ok(()),
        ProfileKind::Tabulated { table, tail } => {
            if let Some((r, v)) = table.pairs().find(|&(_, v)| !in_range(v)) {
                return Err(Error::invalid(format!("tangency bound g({r}) = {v} is outside (0, 1]")));
            }
            check_tangency(tail)
        }
        other => Err(Error::invalid(format!(
            "{other:?} is not a tangency bound: g must lie in (0, 1] for all r"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Zero,
    Constant,
    EtaOfModel,
    PowerLaw,
    Table,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    family: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    warping: Option<WarpingDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    csv: Option<std::path::PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Box<RawProfile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accuracy: Option<f64>,
}

impl RawProfile {
    fn into_kind(self) -> std::result::Result<(ProfileKind, Option<Role>), String> {
        let present = |keys: &[(&str, bool)]| -> std::result::Result<(), String> {
            match keys.iter().find(|(_, p)| *p) {
                Some((k, _)) => Err(format!("key `{k}` does not apply to profile family {:?}", self.family)),
                None => Ok(()),
            }
        };
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| format!("profile family {:?} requires `{key}`", self.family));
        let kind = match self.family {
            KindTag::Zero => {
                present(&[
                    ("value", self.value.is_some()),
                    ("warping", self.warping.is_some()),
                    ("coefficient", self.coefficient.is_some()),
                    ("exponent", self.exponent.is_some()),
                    ("samples", self.samples.is_some()),
                    ("csv", self.csv.is_some()),
                    ("tail", self.tail.is_some()),
                ])?;
                ProfileKind::Zero
            }
            KindTag::Constant => {
                present(&[
                    ("warping", self.warping.is_some()),
                    ("coefficient", self.coefficient.is_some()),
                    ("exponent", self.exponent.is_some()),
                    ("samples", self.samples.is_some()),
                    ("csv", self.csv.is_some()),
                    ("tail", self.tail.is_some()),
                ])?;
                ProfileKind::Constant(need(self.value, "value")?)
            }
            KindTag::EtaOfModel => {
                present(&[
                    ("value", self.value.is_some()),
                    ("coefficient", self.coefficient.is_some()),
                    ("exponent", self.exponent.is_some()),
                    ("samples", self.samples.is_some()),
                    ("csv", self.csv.is_some()),
                    ("tail", self.tail.is_some()),
                ])?;
                ProfileKind::EtaOfModel(
                    self.warping
                        .clone()
                        .ok_or_else(|| "profile family EtaOfModel requires `warping`".to_string())?,
                )
            }
            KindTag::PowerLaw => {
                present(&[
                    ("value", self.value.is_some()),
                    ("warping", self.warping.is_some()),
                    ("samples", self.samples.is_some()),
                    ("csv", self.csv.is_some()),
                    ("tail", self.tail.is_some()),
                ])?;
                ProfileKind::PowerLaw {
                    coefficient: need(self.coefficient, "coefficient")?,
                    exponent: need(self.exponent, "exponent")?,
                }
            }
            KindTag::Table => {
                present(&[
                    ("value", self.value.is_some()),
                    ("warping", self.warping.is_some()),
                    ("coefficient", self.coefficient.is_some()),
                    ("exponent", self.exponent.is_some()),
                ])?;
                let pairs: Vec<(f64, f64)> = match (self.samples, self.csv) {
                    (Some(s), None) => s.into_iter().map(|[r, v]| (r, v)).collect(),
                    (None, Some(path)) => crate::io::read_pairs_csv(&crate::geometry::resolve_csv_path(&path))
                        .map_err(|e| e.to_string())?,
                    _ => return Err("profile family Table requires exactly one of `samples` or `csv`".into()),
                };
                let (tail, _) = self
                    .tail
                    .ok_or_else(|| "profile family Table requires `tail`".to_string())?
                    .into_kind()?;
                let table = Table::from_pairs(&pairs, self.accuracy.unwrap_or(DEFAULT_ACCURACY)).map_err(|e| e.to_string())?;
                if !(table.first() > 0.0) {
                    return Err("tabulated profiles start at a positive radius".into());
                }
                ProfileKind::Tabulated {
                    table,
                    tail: Box::new(tail),
                }
            }
        };
        Ok((kind, self.role))
    }

    fn from_kind(kind: ProfileKind, role: Option<Role>) -> Self {
        let mut raw = RawProfile {
            family: KindTag::Zero,
            role,
            value: None,
            warping: None,
            coefficient: None,
            exponent: None,
            samples: None,
            csv: None,
            tail: None,
            accuracy: None,
        };
        match kind {
            ProfileKind::Zero => {}
            ProfileKind::Constant(c) => {
                raw.family = KindTag::Constant;
                raw.value = Some(c);
            }
            ProfileKind::EtaOfModel(w) => {
                raw.family = KindTag::EtaOfModel;
                raw.warping = Some(w);
            }
            ProfileKind::PowerLaw {
                coefficient,
                exponent,
            } => {
                raw.family = KindTag::PowerLaw;
                raw.coefficient = Some(coefficient);
                raw.exponent = Some(exponent);
            }
            ProfileKind::Tabulated { table, tail } => {
                raw.family = KindTag::Table;
                raw.samples = Some(table.pairs().map(|(r, v)| [r, v]).collect());
                raw.accuracy = Some(table.accuracy());
                raw.tail = Some(Box::new(RawProfile::from_kind(*tail, None)));
            }
        }
        raw
    }
}

impl TryFrom<RawProfile> for RadialProfile {
    type Error = String;

    fn try_from(raw: RawProfile) -> std::result::Result<Self, String> {
        let (kind, role) = raw.into_kind()?;
        RadialProfile::new(kind, role.unwrap_or(Role::HBound)).map_err(|e| e.to_string())
    }
}

impl From<RadialProfile> for RawProfile {
    fn from(p: RadialProfile) -> Self {
        RawProfile::from_kind(p.kind, Some(p.role))
    }
}
