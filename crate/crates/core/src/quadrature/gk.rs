//! Adaptive Gauss–Kronrod (10, 21) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600340520190,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    /// Stops at `max(tol, tol·|I|)`.
    pub fn mixed(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, t: f64) -> Result<f64> {
    let v = f(t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteValue { at: t })
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs = WGK[10] * fc.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let lo = eval(f, center - dx)?;
        let hi = eval(f, center + dx)?;
        fv[j] = (lo, hi);
        kronrod += WGK[j] * (lo + hi);
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for (j, &(lo, hi)) in fv.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let value = kronrod * half;
    let abs = abs * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        magnitude: abs,
    })
}

/// Pairwise sum in a fixed order, so results do not depend on the order in
/// which panels were refined.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Adaptive quadrature on a finite interval. The panel with the largest
/// error estimate is bisected until the summed estimate meets the target.
/// Targets below the round-off floor `100·ε·∫|f|` are raised to it.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    if a > b {
        let r = integrate_with(f, b, a, opts)?;
        return Ok(Integral {
            value: -r.value,
            abs_error: r.abs_error,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = gk21(&f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut magnitude = first.magnitude;
    heap.push(first);
    let mut splits = 0;
    loop {
        let target = opts.target(value).max(100.0 * f64::EPSILON * magnitude);
        if error <= target {
            break;
        }
        if splits >= opts.max_subdivisions {
            return Err(Error::SubdivisionLimit {
                value,
                abs_error: error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            return Err(Error::SubdivisionLimit {
                value,
                abs_error: error,
            });
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
        splits += 1;
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    Ok(Integral {
        value: pairwise_sum(&values),
        abs_error: pairwise_sum(&errors),
    })
}

/// Like [`integrate_with`] for integrands that can fail; the first failure
/// is returned instead of a non-finite-value report.
pub fn integrate_fallible<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral> {
    let failure = std::cell::RefCell::new(None);
    let out = integrate_with(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        opts,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => out,
    }
}

/// `∫_a^b f` to absolute accuracy `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    integrate_with(f, a, b, &QuadOptions::absolute(tol))
}
