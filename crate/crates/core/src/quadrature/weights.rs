//! The radial weights whose tail integrals decide parabolicity:
//!
//! ```text
//! Λ(r)   = w(r) · exp(−∫_ρ^r M)
//! Λ_g(r) = w(r) · exp(−∫_ρ^r M/g²)
//! ```
//!
//! with `M = m(η_w − h)`. Everything is evaluated as `log Λ` and exponentiated
//! once, so weights stay representable where `w` itself overflows.

use super::gk::{integrate_fallible, QuadOptions};
use super::tail::{Certainty, TailClass};
use crate::error::{Error, Result};
use crate::geometry::WarpingDescriptor;
use crate::profiles::{RadialProfile, Role};

/// What is known about `log f(r)` as `r → ∞`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightTail {
    /// Composed from exact closed-form tails.
    Exact(TailClass),
    /// Some ingredient is only known through samples ending at `data_end`.
    Sampled { data_end: f64 },
    /// The composed tail is not representable as a [`TailClass`].
    Unknown(String),
}

/// A positive function on `[ρ, ∞)` given through its logarithm.
pub trait RadialWeight: Sync {
    fn start(&self) -> f64;
    fn log_value(&self, r: f64) -> Result<f64>;
    fn tail(&self) -> WeightTail;

    fn value(&self, r: f64) -> Result<f64> {
        Ok(self.log_value(r)?.exp())
    }
}

/// Running integral `∫_ρ^r f`, precomputed at checkpoints so that each
/// evaluation only integrates from the nearest checkpoint below `r`.
#[derive(Clone, Debug)]
struct Cumulative {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Cumulative {
    fn build(f: &dyn Fn(f64) -> Result<f64>, rho: f64, nodes: &[f64], opts: &QuadOptions) -> Result<Self> {
        let mut xs = vec![rho];
        xs.extend(nodes.iter().copied().filter(|&x| x > rho));
        xs.dedup();
        let mut values = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        values.push(0.0);
        for pair in xs.windows(2) {
            acc += integrate_fallible(f, pair[0], pair[1], opts)?.value;
            values.push(acc);
        }
        Ok(Self { nodes: xs, values })
    }

    fn eval(&self, f: &dyn Fn(f64) -> Result<f64>, r: f64, opts: &QuadOptions) -> Result<f64> {
        let i = self.nodes.partition_point(|&x| x <= r).saturating_sub(1);
        let base = self.nodes[i];
        if r == base {
            return Ok(self.values[i]);
        }
        Ok(self.values[i] + integrate_fallible(f, base, r, opts)?.value)
    }

    fn end(&self) -> f64 {
        *self.nodes.last().expect("at least the start node")
    }
}

/// `H(r) = ∫_ρ^r h`.
#[derive(Clone, Debug)]
pub(crate) struct ProfileIntegral {
    h: RadialProfile,
    rho: f64,
    tol: f64,
    cumulative: Option<Cumulative>,
}

impl ProfileIntegral {
    pub(crate) fn new(h: &RadialProfile, rho: f64, tol: f64) -> Result<Self> {
        let cumulative = match h.sample_end() {
            Some(end) if end > rho => {
                let f = |t: f64| h.value(t);
                let nodes: Vec<f64> = h.nodes().iter().copied().filter(|&x| x <= end).collect();
                Some(Cumulative::build(&f, rho, &nodes, &QuadOptions::mixed(tol))?)
            }
            _ => None,
        };
        Ok(Self {
            h: h.clone(),
            rho,
            tol,
            cumulative,
        })
    }

    pub(crate) fn eval(&self, r: f64) -> Result<f64> {
        match &self.cumulative {
            Some(c) if r <= c.end() => {
                let f = |t: f64| self.h.value(t);
                c.eval(&f, r, &QuadOptions::mixed(self.tol))
            }
            Some(c) => Ok(c.values[c.values.len() - 1] + self.h.integral(c.end(), r, self.tol)?),
            None => self.h.integral(self.rho, r, self.tol),
        }
    }
}

/// `Λ` (no tangency bound) or `Λ_g`.
#[derive(Clone, Debug)]
pub struct DriftedWeight {
    m: usize,
    w: WarpingDescriptor,
    h: RadialProfile,
    g: Option<RadialProfile>,
    rho: f64,
    tol: f64,
    log_w_rho: f64,
    h_integral: ProfileIntegral,
    /// `∫_ρ^r M/g²` at the sample radii of a tabulated `g`.
    drift: Option<Cumulative>,
}

impl DriftedWeight {
    /// `Λ`, or `Λ_g` when `g` is given.
    pub fn new(m: usize, w: &WarpingDescriptor, h: &RadialProfile, g: Option<&RadialProfile>, rho: f64, tol: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("submanifold dimension must be at least 2"));
        }
        if h.role() != Role::HBound {
            return Err(Error::invalid("weights need a mean-convexity bound h"));
        }
        if let Some(g) = g {
            if g.role() != Role::GBound {
                return Err(Error::invalid("weights need a tangency bound g with role g"));
            }
            if rho < g.domain_start() {
                return Err(Error::Domain {
                    value: rho,
                    lo: g.domain_start(),
                    hi: f64::INFINITY,
                });
            }
        }
        if rho < h.domain_start() {
            return Err(Error::Domain {
                value: rho,
                lo: h.domain_start(),
                hi: f64::INFINITY,
            });
        }
        let log_w_rho = w.log_value(rho)?;
        let h_integral = ProfileIntegral::new(h, rho, tol)?;
        let mut weight = Self {
            m,
            w: w.clone(),
            h: h.clone(),
            g: g.cloned(),
            rho,
            tol,
            log_w_rho,
            h_integral,
            drift: None,
        };
        if let Some(g) = g {
            if g.tail_constant().is_none() {
                return Err(Error::invalid("tangency bounds must settle to a constant for large r"));
            }
            if let Some(end) = g.sample_end() {
                if end > rho {
                    let mut nodes: Vec<f64> = g.nodes().iter().chain(h.nodes()).copied().filter(|&x| x <= end).collect();
                    nodes.push(end);
                    nodes.sort_by(f64::total_cmp);
                    nodes.dedup();
                    let built = {
                        let f = |t: f64| weight.drift_density(t);
                        Cumulative::build(&f, rho, &nodes, &QuadOptions::mixed(tol))?
                    };
                    weight.drift = Some(built);
                }
            }
        }
        Ok(weight)
    }

    pub fn plain(m: usize, w: &WarpingDescriptor, h: &RadialProfile, rho: f64, tol: f64) -> Result<Self> {
        Self::new(m, w, h, None, rho, tol)
    }

    /// `M(t)/g(t)²`.
    fn drift_density(&self, t: f64) -> Result<f64> {
        let mv = self.m as f64 * (self.w.eta(t)? - self.h.value(t)?);
        match &self.g {
            Some(g) => {
                let gv = g.value(t)?;
                Ok(mv / (gv * gv))
            }
            None => Ok(mv),
        }
    }

    fn far_factor(&self) -> f64 {
        let c = self.g.as_ref().and_then(RadialProfile::tail_constant).unwrap_or(1.0);
        self.m as f64 / (c * c)
    }

    /// `∫_ρ^r M/g²`. Where `g` is constant this is
    /// `(m/g²)·(ln w(r) − ln w(ρ) − H(r))`, with no quadrature in `η_w`.
    pub fn drift_integral(&self, r: f64) -> Result<f64> {
        match &self.drift {
            Some(c) if r <= c.end() => {
                let f = |t: f64| self.drift_density(t);
                c.eval(&f, r, &QuadOptions::mixed(self.tol))
            }
            Some(c) => {
                let end = c.end();
                let jump = self.w.log_value(r)? - self.w.log_value(end)? - (self.h_integral.eval(r)? - self.h_integral.eval(end)?);
                Ok(c.values[c.values.len() - 1] + self.far_factor() * jump)
            }
            None => Ok(self.far_factor() * (self.w.log_value(r)? - self.log_w_rho - self.h_integral.eval(r)?)),
        }
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn warping(&self) -> &WarpingDescriptor {
        &self.w
    }
}

fn combine_certainty(w_tail: &TailClass) -> Option<f64> {
    match w_tail.certainty {
        Certainty::Exact => None,
        Certainty::Fitted { residual } => Some(residual),
    }
}

impl RadialWeight for DriftedWeight {
    fn start(&self) -> f64 {
        self.rho
    }

    fn log_value(&self, r: f64) -> Result<f64> {
        if r < self.rho {
            return Err(Error::Domain {
                value: r,
                lo: self.rho,
                hi: self.w.domain_end(),
            });
        }
        if r == self.rho {
            return Ok(self.log_w_rho);
        }
        Ok(self.w.log_value(r)? - self.drift_integral(r)?)
    }

    fn tail(&self) -> WeightTail {
        let Some(w_tail) = self.w.log_tail() else {
            return WeightTail::Unknown("compact model".into());
        };
        if combine_certainty(&w_tail).is_some() {
            return WeightTail::Sampled {
                data_end: self.w.sample_end().unwrap_or(self.rho),
            };
        }
        let Some(h_tail) = self.h.antiderivative_tail() else {
            return WeightTail::Unknown("h has no closed tail".into());
        };
        let k = self.far_factor();
        match w_tail.scaled(1.0 - k).checked_add(&h_tail.scaled(k)) {
            Some(t) => WeightTail::Exact(t),
            None => WeightTail::Unknown("stretched terms of different orders".into()),
        }
    }
}

/// `w^{1−n}`, the weight of the volume criterion for models.
#[derive(Clone, Debug)]
pub struct AhlforsWeight {
    w: WarpingDescriptor,
    n: usize,
    rho: f64,
}

impl AhlforsWeight {
    pub fn new(w: &WarpingDescriptor, n: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("volume exponent dimension must be at least 2"));
        }
        w.check_domain(rho)?;
        Ok(Self {
            w: w.clone(),
            n,
            rho,
        })
    }
}

impl RadialWeight for AhlforsWeight {
    fn start(&self) -> f64 {
        self.rho
    }

    fn log_value(&self, r: f64) -> Result<f64> {
        Ok((1.0 - self.n as f64) * self.w.log_value(r)?)
    }

    fn tail(&self) -> WeightTail {
        match self.w.log_tail() {
            Some(t) if t.is_exact() => WeightTail::Exact(t.scaled(1.0 - self.n as f64)),
            Some(_) => WeightTail::Sampled {
                data_end: self.w.sample_end().unwrap_or(self.rho),
            },
            None => WeightTail::Unknown("compact model".into()),
        }
    }
}

/// `G^m / w^{m−1}` with `G(r) = exp(∫_ρ^r h)`.
#[derive(Clone, Debug)]
pub struct Mp2Weight {
    m: usize,
    w: WarpingDescriptor,
    h: RadialProfile,
    rho: f64,
    h_integral: ProfileIntegral,
}

impl Mp2Weight {
    pub fn new(m: usize, w: &WarpingDescriptor, h: &RadialProfile, rho: f64, tol: f64) -> Result<Self> {
        w.check_domain(rho)?;
        Ok(Self {
            m,
            w: w.clone(),
            h: h.clone(),
            rho,
            h_integral: ProfileIntegral::new(h, rho, tol)?,
        })
    }
}

impl RadialWeight for Mp2Weight {
    fn start(&self) -> f64 {
        self.rho
    }

    fn log_value(&self, r: f64) -> Result<f64> {
        let m = self.m as f64;
        Ok(m * self.h_integral.eval(r)? - (m - 1.0) * self.w.log_value(r)?)
    }

    fn tail(&self) -> WeightTail {
        let (Some(w_tail), Some(h_tail)) = (self.w.log_tail(), self.h.antiderivative_tail()) else {
            return WeightTail::Unknown("no closed tail".into());
        };
        if !w_tail.is_exact() {
            return WeightTail::Sampled {
                data_end: self.w.sample_end().unwrap_or(self.rho),
            };
        }
        let m = self.m as f64;
        match h_tail.scaled(m).checked_add(&w_tail.scaled(1.0 - m)) {
            Some(t) => WeightTail::Exact(t),
            None => WeightTail::Unknown("stretched terms of different orders".into()),
        }
    }
}

/// A weight given by a closure for `log f` and a declared tail.
pub struct FnWeight<F> {
    log: F,
    rho: f64,
    tail: WeightTail,
}

impl<F: Fn(f64) -> f64 + Sync> FnWeight<F> {
    pub fn new(log: F, rho: f64, tail: WeightTail) -> Self {
        Self { log, rho, tail }
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialWeight for FnWeight<F> {
    fn start(&self) -> f64 {
        self.rho
    }

    fn log_value(&self, r: f64) -> Result<f64> {
        Ok((self.log)(r))
    }

    fn tail(&self) -> WeightTail {
        self.tail.clone()
    }
}

/// `Λ(r) = w(r)·exp(−∫_ρ^r M)`.
pub fn lambda_plain(m: usize, w: &WarpingDescriptor, h: &RadialProfile, rho: f64, r: f64) -> Result<f64> {
    DriftedWeight::plain(m, w, h, rho, super::DEFAULT_TOLERANCE)?.value(r)
}

/// `Λ_g(r) = w(r)·exp(−∫_ρ^r M/g²)`.
pub fn lambda_tangency(m: usize, w: &WarpingDescriptor, h: &RadialProfile, g: &RadialProfile, rho: f64, r: f64) -> Result<f64> {
    DriftedWeight::new(m, w, h, Some(g), rho, super::DEFAULT_TOLERANCE)?.value(r)
}

/// `(r, f(r))` rows for export.
pub fn weight_series(weight: &dyn RadialWeight, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii.iter().map(|&r| Ok((r, weight.value(r)?))).collect()
}
