//! Sign analysis of the balance function `M(r) = m(η_w(r) − h(r))`.

use serde::{Deserialize, Serialize};

use super::{ProfileKind, RadialProfile, Role};
use crate::error::{Error, Result};
use crate::geometry::{Family, WarpingDescriptor};

pub const SCAN_LO: f64 = 1e-3;
pub const SCAN_HI: f64 = 1e3;
pub const SCAN_SAMPLES: usize = 10_000;

/// Relative size below which a sampled `M` counts as zero.
const ZERO_BAND: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceClass {
    NonNegative,
    NonPositive,
    IdenticallyZero,
    Indefinite,
}

impl BalanceClass {
    pub fn is_nonnegative(self) -> bool {
        matches!(self, BalanceClass::NonNegative | BalanceClass::IdenticallyZero)
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(self, BalanceClass::NonPositive | BalanceClass::IdenticallyZero)
    }
}

/// `Exact` classes follow from closed forms on the whole domain; `Empirical`
/// ones from dense sampling plus the limits at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grade {
    Exact,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceReport {
    pub class: BalanceClass,
    pub grade: Grade,
    /// A radius where `M` has the sign opposite to its value near the pole.
    pub witness: Option<f64>,
    #[serde(skip)]
    m: usize,
    #[serde(skip)]
    warping: Option<WarpingDescriptor>,
    #[serde(skip)]
    h: Option<RadialProfile>,
}

impl BalanceReport {
    fn new(class: BalanceClass, grade: Grade, witness: Option<f64>, m: usize, w: &WarpingDescriptor, h: &RadialProfile) -> Self {
        Self {
            class,
            grade,
            witness,
            m,
            warping: Some(w.clone()),
            h: Some(h.clone()),
        }
    }

    /// `M(r)`.
    pub fn value(&self, r: f64) -> Result<f64> {
        let (Some(w), Some(h)) = (&self.warping, &self.h) else {
            return Err(Error::invalid("balance report was deserialized without its inputs"));
        };
        balance_value(self.m, w, h, r)
    }
}

pub(crate) fn balance_value(m: usize, w: &WarpingDescriptor, h: &RadialProfile, r: f64) -> Result<f64> {
    Ok(m as f64 * (w.eta(r)? - h.value(r)?))
}

/// Classifies the sign of `M` on the default scan range `[1e−3, 1e3]`.
pub fn balance(m: usize, w: &WarpingDescriptor, h: &RadialProfile) -> Result<BalanceReport> {
    balance_on(m, w, h, SCAN_LO, SCAN_HI)
}

/// Classifies the sign of `M`. Closed forms decide first; otherwise `M` is
/// sampled at log-spaced radii on `[lo, hi]` (clipped to the domain), at a
/// few radii past `hi`, and compared with the limits of `η_w` and `h`.
pub fn balance_on(m: usize, w: &WarpingDescriptor, h: &RadialProfile, lo: f64, hi: f64) -> Result<BalanceReport> {
    if m < 2 {
        return Err(Error::invalid("submanifold dimension must be at least 2"));
    }
    if h.role() != Role::HBound {
        return Err(Error::invalid("balance needs a mean-convexity bound h"));
    }
    if let Some(class) = exact_class(w, h) {
        return Ok(BalanceReport::new(class, Grade::Exact, None, m, w, h));
    }
    let end = w.domain_end();
    let hi = if hi < end { hi } else { end * (1.0 - 1e-9) };
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::invalid(format!("empty balance scan range [{lo}, {hi}]")));
    }
    if lo < h.domain_start() {
        return Err(Error::Domain {
            value: lo,
            lo: h.domain_start(),
            hi: f64::INFINITY,
        });
    }

    let mut radii: Vec<f64> = (0..SCAN_SAMPLES)
        .map(|i| lo * (hi / lo).powf(i as f64 / (SCAN_SAMPLES - 1) as f64))
        .collect();
    if end.is_infinite() {
        radii.extend((4..=6).map(|k| hi * 10f64.powi(k - 3)));
    }

    let mut signs = Vec::with_capacity(radii.len());
    for &r in &radii {
        let eta = w.eta(r)?;
        let hv = h.value(r)?;
        let mv = m as f64 * (eta - hv);
        let scale = m as f64 * (eta.abs() + hv.abs());
        signs.push(if mv.abs() <= ZERO_BAND * scale { 0 } else { mv.signum() as i8 });
    }
    let has_pos = signs.iter().any(|&s| s > 0);
    let has_neg = signs.iter().any(|&s| s < 0);
    let mut class = match (has_pos, has_neg) {
        (true, true) => BalanceClass::Indefinite,
        (true, false) => BalanceClass::NonNegative,
        (false, true) => BalanceClass::NonPositive,
        (false, false) => BalanceClass::IdenticallyZero,
    };
    let mut witness = None;
    if class == BalanceClass::Indefinite {
        let first = signs.iter().copied().find(|&s| s != 0).unwrap_or(0);
        witness = signs
            .iter()
            .zip(&radii)
            .find(|(&s, _)| s != 0 && s != first)
            .map(|(_, &r)| r);
    } else if end.is_infinite() {
        // The limits at infinity can reveal a sign change past the scan.
        if let (Some(a), Some(b)) = (w.eta_limit(), h.limit()) {
            let diff = a - b;
            let contradicts = (diff < 0.0 && class.is_nonnegative() && class != BalanceClass::IdenticallyZero)
                || (diff > 0.0 && class.is_nonpositive() && class != BalanceClass::IdenticallyZero)
                || (diff != 0.0 && class == BalanceClass::IdenticallyZero);
            if contradicts {
                let want = diff.signum();
                witness = (7..=15)
                    .map(|k| 10f64.powi(k))
                    .find(|&r| balance_value(m, w, h, r).map(|v| v.signum() == want && v != 0.0).unwrap_or(false));
                if witness.is_some() {
                    class = BalanceClass::Indefinite;
                }
            }
        }
    }
    Ok(BalanceReport::new(class, Grade::Empirical, witness, m, w, h))
}

/// Sign classes that follow from the closed forms on the whole domain.
fn exact_class(w: &WarpingDescriptor, h: &RadialProfile) -> Option<BalanceClass> {
    match h.kind() {
        ProfileKind::EtaOfModel(v) if v == w => return Some(BalanceClass::IdenticallyZero),
        &ProfileKind::PowerLaw {
            coefficient,
            exponent,
        } if exponent == -1.0 && matches!(w.family(), Family::SpaceForm { curvature } if *curvature == 0.0) => {
            // M = m(1 − c)/r on flat space.
            return Some(if coefficient < 1.0 {
                BalanceClass::NonNegative
            } else if coefficient > 1.0 {
                BalanceClass::NonPositive
            } else {
                BalanceClass::IdenticallyZero
            });
        }
        _ => {}
    }
    match (w.eta_infimum(), h.kind().supremum()) {
        (Some(inf_eta), Some(sup_h)) if sup_h <= inf_eta => Some(BalanceClass::NonNegative),
        _ => None,
    }
}
