//! Sampled radial functions with local polynomial interpolation.
//!
//! Values come from a six-point Lagrange interpolant centered on the query
//! radius; a four-point interpolant on the same neighborhood provides the
//! error estimate that is checked against the table's accuracy. Derivatives
//! are fourth-order central differences of the six-point interpolant,
//! Richardson-extrapolated once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative accuracy demanded from table interpolation.
pub const DEFAULT_ACCURACY: f64 = 1e-6;

const WIDE: usize = 6;
const NARROW: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    r: Vec<f64>,
    v: Vec<f64>,
    accuracy: f64,
    #[serde(skip)]
    scale: f64,
}

impl Table {
    pub fn new(r: Vec<f64>, v: Vec<f64>, accuracy: f64) -> Result<Self> {
        if r.len() != v.len() {
            return Err(Error::invalid("table columns differ in length"));
        }
        if r.len() < WIDE {
            return Err(Error::invalid(format!(
                "a table needs at least {WIDE} samples, got {}",
                r.len()
            )));
        }
        if !(accuracy > 0.0 && accuracy.is_finite()) {
            return Err(Error::invalid("table accuracy must be positive"));
        }
        if r.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::invalid("table contains non-finite values"));
        }
        if let Some(i) = r.windows(2).position(|p| p[1] <= p[0]) {
            return Err(Error::invalid(format!(
                "table radii must be strictly increasing (row {})",
                i + 1
            )));
        }
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Table {
            r,
            v,
            accuracy,
            scale,
        })
    }

    pub fn from_pairs(pairs: &[(f64, f64)], accuracy: f64) -> Result<Self> {
        let (r, v) = pairs.iter().copied().unzip();
        Self::new(r, v, accuracy)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.r[0]
    }

    pub fn last(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn last_value(&self) -> f64 {
        self.v[self.v.len() - 1]
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().copied().zip(self.v.iter().copied())
    }

    /// Prepends a sample (used to pin `w(0) = 0`).
    pub(crate) fn with_leading(mut self, r: f64, v: f64) -> Result<Self> {
        if r >= self.r[0] {
            return Err(Error::invalid("leading sample must precede the table"));
        }
        self.r.insert(0, r);
        self.v.insert(0, v);
        self.scale = self.scale.max(v.abs());
        Ok(self)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.first() && x <= self.last()
    }

    fn interval(&self, x: f64) -> usize {
        let i = self.r.partition_point(|&ri| ri <= x);
        i.saturating_sub(1).min(self.r.len() - 2)
    }

    fn stencil(&self, interval: usize, width: usize) -> usize {
        let half = width / 2 - 1;
        interval.saturating_sub(half).min(self.r.len() - width)
    }

    fn lagrange(&self, start: usize, width: usize, x: f64) -> f64 {
        let xs = &self.r[start..start + width];
        let ys = &self.v[start..start + width];
        let mut sum = 0.0;
        for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
            let mut basis = 1.0;
            for (j, &xj) in xs.iter().enumerate() {
                if i != j {
                    basis *= (x - xj) / (xi - xj);
                }
            }
            sum += yi * basis;
        }
        sum
    }

    fn check_range(&self, x: f64) -> Result<()> {
        let slack = 1e-12 * self.last().abs().max(1.0);
        if x.is_nan() || x < self.first() - slack || x > self.last() + slack {
            return Err(Error::Domain {
                value: x,
                lo: self.first(),
                hi: self.last(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_range(x)?;
        let interval = self.interval(x);
        let wide = self.lagrange(self.stencil(interval, WIDE), WIDE, x);
        let narrow = self.lagrange(self.stencil(interval, NARROW), NARROW, x);
        let estimate = (wide - narrow).abs();
        let floor = 1e-12 * self.scale;
        if estimate > self.accuracy * wide.abs().max(floor) && estimate > floor {
            return Err(Error::Interpolation {
                r: x,
                accuracy: self.accuracy,
                estimate: estimate / wide.abs().max(floor),
            });
        }
        Ok(wide)
    }

    /// Value, first and second derivative at `x`.
    pub fn derivatives(&self, x: f64) -> Result<[f64; 3]> {
        let value = self.eval(x)?;
        let interval = self.interval(x);
        let start = self.stencil(interval, WIDE);
        let h = self.r[interval + 1] - self.r[interval];
        let p = |t: f64| self.lagrange(start, WIDE, t);
        let d1 = |h: f64| (-p(x + 2.0 * h) + 8.0 * p(x + h) - 8.0 * p(x - h) + p(x - 2.0 * h)) / (12.0 * h);
        let d2 = |h: f64| {
            (-p(x + 2.0 * h) + 16.0 * p(x + h) - 30.0 * p(x) + 16.0 * p(x - h) - p(x - 2.0 * h))
                / (12.0 * h * h)
        };
        let first = (16.0 * d1(0.5 * h) - d1(h)) / 15.0;
        let second = (16.0 * d2(0.5 * h) - d2(h)) / 15.0;
        Ok([value, first, second])
    }
}
