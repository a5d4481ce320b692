//! Large-deviation rate for heights of order `n`.
//!
//! For `0 < x < 1` the saddle point `xi` solves `x xi y'(xi) = y(xi)` on
//! `(0, rho)` and the rate is `I(x) = ln xi - ln rho - x ln y(xi)`. At `x = 1`
//! the saddle point degenerates to `0` and `I(1) = -ln rho`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::constants::real_y;
use crate::error::{Error, Result};
use crate::numeric::{ln_bigint, ln_rational};
use crate::trees::{exceed_counts, HeightLadder};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub x: f64,
    /// Saddle point; `0` at `x = 1`.
    pub xi: f64,
    pub rate: f64,
}

impl RatePoint {
    /// `|x xi y'(xi) - y(xi)|`.
    pub fn residual(&self) -> f64 {
        if self.xi == 0.0 {
            return 0.0;
        }
        let ry = real_y();
        (self.x * self.xi * ry.derivative(self.xi) - ry.value(self.xi)).abs()
    }
}

pub fn rate_point(x: f64) -> Result<RatePoint> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::usage(format!("rate function needs 0 < x <= 1, got {x}")));
    }
    let ry = real_y();
    let rho = ry.rho();
    if x == 1.0 {
        return Ok(RatePoint { x, xi: 0.0, rate: -rho.ln() });
    }
    // xi y'(xi) / y(xi) increases from 1 at 0 to infinity at rho.
    let target = 1.0 / x;
    let ratio = |xi: f64| xi * ry.derivative(xi) / ry.value(xi);
    let (mut lo, mut hi) = (0.0f64, rho);
    if !(ratio(hi) > target) {
        return Err(Error::invariant(format!("saddle bracket failed at x = {x}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid > 0.0 && ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = if lo > 0.0 { 0.5 * (lo + hi) } else { hi };
    let rate = xi.ln() - rho.ln() - x * ry.value(xi).ln();
    Ok(RatePoint { x, xi, rate })
}

/// Exact tail against the exponential bound with rate `I(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRateReport {
    pub n: usize,
    pub x: f64,
    /// `ceil(x n)`.
    pub threshold: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub exact_tail: BigRational,
    /// `-ln P / n`; infinite when the tail is empty.
    pub empirical_rate: f64,
    pub rate: f64,
    /// `I(x) - 1.5 ln(n)/n - slack`.
    pub lower_bound: f64,
    pub passed: bool,
}

fn serialize_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Constant slack absorbing the unknown prefactor.
pub const TAIL_SLACK: f64 = 0.05;

pub fn tail_rate_check(n: usize, x: f64, ladder: &HeightLadder) -> Result<TailRateReport> {
    if n < 2 || n > ladder.n_max() {
        return Err(Error::usage(format!("need 2 <= n <= {}, got {n}", ladder.n_max())));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::usage(format!("tail check needs 0 < x < 1, got {x}")));
    }
    let threshold = (x * n as f64).ceil() as usize;
    let y_n = ladder.total().coeff(n).clone();
    // Heights are at least 1 for n >= 2, so threshold >= 1 here.
    let count = if threshold == 0 {
        y_n.clone()
    } else {
        exceed_counts(ladder, threshold - 1)?.coeff(n).clone()
    };
    let exact_tail = BigRational::new(count.clone(), y_n.clone());
    let empirical_rate =
        if count.is_zero() { f64::INFINITY } else { -(ln_bigint(&count) - ln_bigint(&y_n)) / n as f64 };
    let rate = rate_point(x)?.rate;
    let lower_bound = rate - 1.5 * (n as f64).ln() / n as f64 - TAIL_SLACK;
    Ok(TailRateReport { n, x, threshold, exact_tail, empirical_rate, rate, lower_bound, passed: empirical_rate >= lower_bound })
}

/// `P(H_n = n - 1)`; exactly one tree of each size reaches that height.
pub fn caterpillar_probability(ladder: &HeightLadder, n: usize) -> Result<BigRational> {
    if n < 2 || n > ladder.n_max() {
        return Err(Error::usage(format!("need 2 <= n <= {}, got {n}", ladder.n_max())));
    }
    let at_least: BigInt = exceed_counts(ladder, n - 2)?.coeff(n).clone();
    let beyond: BigInt = exceed_counts(ladder, n - 1)?.coeff(n).clone();
    Ok(BigRational::new(at_least - beyond, ladder.total().coeff(n).clone()))
}

/// `-ln P(H_n = n - 1) / n`.
pub fn caterpillar_rate(ladder: &HeightLadder, n: usize) -> Result<f64> {
    Ok(-ln_rational(&caterpillar_probability(ladder, n)?) / n as f64)
}
