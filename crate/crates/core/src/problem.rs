//! The comparison setting shared by the classifier, the Dirichlet solver and
//! the stochastic oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WarpingDescriptor;
use crate::profiles::{balance_on, BalanceReport, RadialProfile, Role, SCAN_HI, SCAN_LO};
use crate::quadrature::DriftedWeight;

/// Direction of an inequality between an ambient quantity and its model
/// counterpart: `Lower` means the model value bounds the ambient one from
/// below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Lower,
    Upper,
    Both,
}

impl BoundDirection {
    pub fn includes_lower(self) -> bool {
        matches!(self, BoundDirection::Lower | BoundDirection::Both)
    }

    pub fn includes_upper(self) -> bool {
        matches!(self, BoundDirection::Upper | BoundDirection::Both)
    }
}

/// A submanifold `S^m` of an ambient manifold with a pole, described by
/// radial bound data against the model with warping function `w`:
///
/// * `curvature_bound`: radial sectional curvatures `K ≥ −w''/w` (`lower`)
///   or `≤` (`upper`);
/// * `convexity_bound`: `C(x) ≥ h(r)` (`lower`) or `C(x) ≤ h(r)` (`upper`);
/// * `g`: optional lower bound on the radial tangency.
///
/// When `intrinsic` is set the problem is the model `M_w^m` itself and `h`,
/// `g` and the bound directions are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct RadialProblem {
    pub m: usize,
    pub warping: WarpingDescriptor,
    pub curvature_bound: BoundDirection,
    pub h: RadialProfile,
    pub convexity_bound: BoundDirection,
    pub g: Option<RadialProfile>,
    pub rho: f64,
    pub intrinsic: bool,
}

impl RadialProblem {
    pub fn new(
        m: usize,
        warping: WarpingDescriptor,
        curvature_bound: BoundDirection,
        h: RadialProfile,
        convexity_bound: BoundDirection,
        g: Option<RadialProfile>,
        rho: f64,
    ) -> Result<Self> {
        let p = Self {
            m,
            warping,
            curvature_bound,
            h: h.with_role(Role::HBound)?,
            convexity_bound,
            g: g.map(|g| g.with_role(Role::GBound)).transpose()?,
            rho,
            intrinsic: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// The model `M_w^m` itself.
    pub fn intrinsic(m: usize, warping: WarpingDescriptor, rho: f64) -> Result<Self> {
        let p = Self {
            m,
            warping,
            curvature_bound: BoundDirection::Both,
            h: RadialProfile::zero(),
            convexity_bound: BoundDirection::Both,
            g: None,
            rho,
            intrinsic: true,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::invalid(format!("dimension m must be at least 2, got {}", self.m)));
        }
        self.warping.check_domain(self.rho)?;
        if self.intrinsic {
            return Ok(());
        }
        let start = self.h.domain_start().max(self.g.as_ref().map_or(0.0, RadialProfile::domain_start));
        if self.rho < start {
            return Err(Error::Domain {
                value: self.rho,
                lo: start,
                hi: self.warping.domain_end(),
            });
        }
        Ok(())
    }

    /// `h`, or zero for intrinsic problems.
    pub fn effective_h(&self) -> RadialProfile {
        if self.intrinsic {
            RadialProfile::zero()
        } else {
            self.h.clone()
        }
    }

    pub fn effective_g(&self) -> Option<&RadialProfile> {
        if self.intrinsic {
            None
        } else {
            self.g.as_ref()
        }
    }

    /// Sign class of `M = m(η_w − h)` over the scan range.
    pub fn balance(&self) -> Result<BalanceReport> {
        let h = self.effective_h();
        balance_on(self.m, &self.warping, &h, SCAN_LO.max(h.domain_start()), SCAN_HI)
    }

    /// `Λ` based at `base`.
    pub fn weight_plain(&self, base: f64, tol: f64) -> Result<DriftedWeight> {
        DriftedWeight::plain(self.m, &self.warping, &self.effective_h(), base, tol)
    }

    /// `Λ_g` when `g` is present, `Λ` otherwise.
    pub fn weight(&self, base: f64, tol: f64) -> Result<DriftedWeight> {
        DriftedWeight::new(self.m, &self.warping, &self.effective_h(), self.effective_g(), base, tol)
    }

    /// Drift `M/g² − η_w` of the radial operator `ψ'' + (M/g² − η_w)ψ'`.
    pub fn drift(&self, r: f64) -> Result<f64> {
        let eta = self.warping.eta(r)?;
        let m = self.m as f64;
        if self.intrinsic {
            return Ok((m - 1.0) * eta);
        }
        let mv = m * (eta - self.h.value(r)?);
        let g2 = match &self.g {
            Some(g) => g.value(r)?.powi(2),
            None => 1.0,
        };
        Ok(mv / g2 - eta)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    m: usize,
    warping: WarpingDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curvature_bound: Option<BoundDirection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<RadialProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    convexity_bound: Option<BoundDirection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<RadialProfile>,
    rho: f64,
    #[serde(default)]
    intrinsic: bool,
}

impl TryFrom<RawProblem> for RadialProblem {
    type Error = String;

    fn try_from(raw: RawProblem) -> std::result::Result<Self, String> {
        let built = if raw.intrinsic {
            if raw.h.is_some() || raw.g.is_some() {
                return Err("intrinsic problems take no `h` or `g`".into());
            }
            RadialProblem::intrinsic(raw.m, raw.warping, raw.rho)
        } else {
            let curvature = raw.curvature_bound.ok_or("missing key `curvature_bound`")?;
            let convexity = raw.convexity_bound.ok_or("missing key `convexity_bound`")?;
            RadialProblem::new(
                raw.m,
                raw.warping,
                curvature,
                raw.h.unwrap_or_else(RadialProfile::zero),
                convexity,
                raw.g,
                raw.rho,
            )
        };
        built.map_err(|e| e.to_string())
    }
}

impl From<RadialProblem> for RawProblem {
    fn from(p: RadialProblem) -> Self {
        if p.intrinsic {
            return RawProblem {
                m: p.m,
                warping: p.warping,
                curvature_bound: None,
                h: None,
                convexity_bound: None,
                g: None,
                rho: p.rho,
                intrinsic: true,
            };
        }
        RawProblem {
            m: p.m,
            warping: p.warping,
            curvature_bound: Some(p.curvature_bound),
            h: Some(p.h),
            convexity_bound: Some(p.convexity_bound),
            g: p.g,
            rho: p.rho,
            intrinsic: false,
        }
    }
}
