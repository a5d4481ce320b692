//! Limiting theta-type laws for the scaled height `lambda H_n / sqrt(n)` and
//! scaled diameter `lambda D_n / sqrt(n)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gamma_half, zeta_int};

/// Truncation control for the theta series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaEvalPolicy {
    /// Stop once past the peak and the term magnitude drops below this.
    pub eps: f64,
    /// Hard bound on the summation index.
    pub k_cap: usize,
}

impl Default for ThetaEvalPolicy {
    fn default() -> Self {
        ThetaEvalPolicy { eps: 1e-18, k_cap: 1_000_000 }
    }
}

impl ThetaEvalPolicy {
    pub fn new(eps: f64, k_cap: usize) -> Result<Self> {
        if !(eps > 0.0) || k_cap < 2 {
            return Err(Error::usage("theta policy needs eps > 0 and k_cap >= 2"));
        }
        Ok(ThetaEvalPolicy { eps, k_cap })
    }
}

/// Below this the density is evaluated through the dual transformation.
const DENSITY_SWITCH: f64 = 1.0;

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::usage(format!("argument must be positive and finite, got {x}")))
    }
}

/// Sums `term(k)` for `k >= 1` until `k x >= peak` and `|term| < eps`.
/// Returns `None` if `k_cap` would be exceeded first.
fn theta_sum(x: f64, peak: f64, policy: &ThetaEvalPolicy, term: impl Fn(f64) -> f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 1..=policy.k_cap {
        let kf = k as f64;
        let t = term(kf);
        // Neumaier summation: the small-x sums cancel heavily.
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
        if kf * x >= peak && t.abs() < policy.eps {
            return Some(sum + comp);
        }
    }
    None
}

fn clamp_distribution(v: f64, eps: f64, what: &str, x: f64) -> f64 {
    let c = v.clamp(0.0, 1.0 + eps);
    if c != v {
        log::debug!("{what}({x}) = {v:e} clamped to {c:e}");
    }
    c
}

fn clamp_density(v: f64, what: &str, x: f64) -> f64 {
    if v < 0.0 {
        log::debug!("{what}({x}) = {v:e} clamped to 0");
        0.0
    } else {
        v
    }
}

/// Direct summation budget for the distribution functions at small `x`.
fn small_x_budget(x: f64, policy: &ThetaEvalPolicy) -> bool {
    (40.0 / x).ceil() as usize + 2 <= policy.k_cap
}

/// `Theta(x) = sum_{k>=1} (k^2 x^2 - 2) exp(-k^2 x^2 / 4)`, the limiting
/// tail `P(lambda H_n / sqrt(n) >= x)`.
///
/// Below `x = 1` this uses `1 - Theta(x) = 32 pi^{5/2} x^{-3} sum k^2
/// exp(-4 pi^2 k^2 / x^2)`, obtained by integrating the dual form of the
/// density term by term. It converges in a handful of terms and, unlike the
/// direct sum, does not cancel down to rounding noise.
pub fn theta_tail(x: f64) -> Result<f64> {
    theta_tail_with(x, &ThetaEvalPolicy::default())
}

pub fn theta_tail_with(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    let v = if x < DENSITY_SWITCH {
        let a = 4.0 * PI * PI / (x * x);
        let s = theta_sum(1.0, 1.0, policy, |k| k * k * (-a * k * k).exp()).unwrap_or(0.0);
        1.0 - 32.0 * PI.powf(2.5) / x.powi(3) * s
    } else {
        theta_tail_series(x, policy)?
    };
    Ok(clamp_distribution(v, policy.eps, "Theta", x))
}

/// The direct series for `Theta` at any `x`, summing up to `ceil(40/x)`
/// terms; returns 1 when that exceeds `k_cap`.
pub fn theta_tail_series(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    if !small_x_budget(x, policy) {
        // Within exp(-4 pi^2 / x^2) of 1.
        return Ok(1.0);
    }
    Ok(theta_sum(x, 4.0, policy, |k| {
        let u2 = k * k * x * x;
        (u2 - 2.0) * (-u2 / 4.0).exp()
    })
    .unwrap_or(1.0))
}

fn theta_density_direct(x: f64, policy: &ThetaEvalPolicy) -> Option<f64> {
    theta_sum(x, 4.0, policy, |k| {
        let u2 = k * k * x * x;
        (u2 * u2 - 6.0 * u2) * (-u2 / 4.0).exp()
    })
    .map(|s| s / (2.0 * x))
}

/// `theta(x) = -Theta'(x)`, using the dual form
/// `theta(x) = 8 pi^{3/2} x^{-3} theta(4 pi / x)` below `x = 1`.
pub fn theta_density(x: f64) -> Result<f64> {
    theta_density_with(x, &ThetaEvalPolicy::default())
}

pub fn theta_density_with(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    let v = if x >= DENSITY_SWITCH {
        theta_density_direct(x, policy)
    } else {
        let dual = 4.0 * PI / x;
        theta_density_direct(dual, policy).map(|d| 8.0 * PI.powf(1.5) / x.powi(3) * d)
    };
    let v = v.ok_or_else(|| Error::usage(format!("k_cap too small for theta density at {x}")))?;
    Ok(clamp_density(v, "theta", x))
}

/// The direct series evaluated even below the switch; used to check the
/// dual form.
pub fn theta_density_series(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    theta_density_direct(x, policy).ok_or_else(|| Error::usage(format!("k_cap too small at {x}")))
}

/// Below this the diameter functions use their Poisson-dual series.
const DIAM_SWITCH: f64 = 2.5;

/// `exp(-16 pi^2 m^2 / x^2)` times the dual prefactor underflows to zero
/// well before this exponent.
const DUAL_EXP_LIMIT: f64 = 700.0;

/// Limiting tail of the scaled diameter,
/// `(1/96) sum (k^2-1)(k^4 x^4 - 48 k^2 x^2 + 192) exp(-k^2 x^2 / 16)`.
///
/// Poisson summation turns this into
/// `1 - sum_{m>=1} 8192 pi^{5/2} m^2 (256 pi^4 m^4 + pi^2 m^2 x^4
/// - 72 pi^2 m^2 x^2 + 3 x^4) exp(-16 pi^2 m^2 / x^2) / (3 x^9)`,
/// which is used below `x = 2.5`.
pub fn diam_tail(x: f64) -> Result<f64> {
    diam_tail_with(x, &ThetaEvalPolicy::default())
}

pub fn diam_tail_with(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    let v = if x < DIAM_SWITCH {
        let x2 = x * x;
        let x4 = x2 * x2;
        let pi2 = PI * PI;
        let s = diam_dual_sum(x, policy, |m2| {
            m2 * (256.0 * pi2 * pi2 * m2 * m2 + pi2 * m2 * x4 - 72.0 * pi2 * m2 * x2 + 3.0 * x4)
        });
        1.0 - 8192.0 * PI.powf(2.5) / 3.0 * s / x.powi(9)
    } else {
        diam_tail_series(x, policy)?
    };
    Ok(clamp_distribution(v, policy.eps, "Theta~", x))
}

/// `sum_{m>=1} poly(m^2) exp(-16 pi^2 m^2 / x^2)`, zero once the first
/// exponential underflows.
fn diam_dual_sum(x: f64, policy: &ThetaEvalPolicy, poly: impl Fn(f64) -> f64) -> f64 {
    let a = 16.0 * PI * PI / (x * x);
    if a > DUAL_EXP_LIMIT {
        return 0.0;
    }
    theta_sum(1.0, 1.0, policy, |m| poly(m * m) * (-a * m * m).exp()).unwrap_or(0.0)
}

/// The direct series for the diameter tail at any `x`.
pub fn diam_tail_series(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    if !small_x_budget(x, policy) {
        return Ok(1.0);
    }
    // k = 1 contributes nothing.
    Ok(theta_sum(x, 12.0, policy, |k| {
        if k == 1.0 {
            return 0.0;
        }
        let u2 = k * k * x * x;
        (k * k - 1.0) * (u2 * u2 - 48.0 * u2 + 192.0) * (-u2 / 16.0).exp()
    })
    .unwrap_or(96.0)
        / 96.0)
}

/// Density of the scaled diameter,
/// `(1/768) sum k(k^2-1)(k^5 x^5 - 80 k^3 x^3 + 960 k x) exp(-k^2 x^2 / 16)`,
/// with the derivative of the dual tail used below `x = 2.5`.
pub fn diam_density(x: f64) -> Result<f64> {
    diam_density_with(x, &ThetaEvalPolicy::default())
}

pub fn diam_density_with(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    let v = if x < DIAM_SWITCH {
        let x2 = x * x;
        let x4 = x2 * x2;
        let x6 = x4 * x2;
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        let s = diam_dual_sum(x, policy, |m2| {
            let m4 = m2 * m2;
            m2 * (8192.0 * pi4 * pi2 * m4 * m2 + 32.0 * pi4 * m4 * x4 - 4608.0 * pi4 * m4 * x2 - 5.0 * pi2 * m2 * x6
                + 600.0 * pi2 * m2 * x4
                - 15.0 * x6)
        });
        if s == 0.0 {
            0.0
        } else {
            8192.0 * PI.powf(2.5) / 3.0 * s / x.powi(12)
        }
    } else {
        diam_density_series(x, policy)?
    };
    Ok(clamp_density(v, "theta~", x))
}

/// The direct series for the diameter density at any `x`.
pub fn diam_density_series(x: f64, policy: &ThetaEvalPolicy) -> Result<f64> {
    check_x(x)?;
    let v = theta_sum(x, 12.0, policy, |k| {
        if k == 1.0 {
            return 0.0;
        }
        let u = k * x;
        let u2 = u * u;
        k * (k * k - 1.0) * u * (u2 * u2 - 80.0 * u2 + 960.0) * (-u2 / 16.0).exp()
    })
    .ok_or_else(|| Error::usage(format!("k_cap too small for diameter density at {x}")))?;
    Ok(v / 768.0)
}

/// `lim E[(lambda H_n / sqrt(n))^r]`.
pub fn height_limit_moment(r: u32) -> Result<f64> {
    match r {
        0 => Err(Error::usage("moment order must be >= 1")),
        1 => Ok(2.0 * PI.sqrt()),
        _ => {
            let rf = f64::from(r);
            Ok(rf * (rf - 1.0) * zeta_int(r) * gamma_half(r) * 2f64.powi(r as i32))
        }
    }
}

/// `lim E[(lambda D_n / sqrt(n))^r]`.
pub fn diam_limit_moment(r: u32) -> Result<f64> {
    match r {
        0 => Err(Error::usage("moment order must be >= 1")),
        1 => Ok(8.0 / 3.0 * PI.sqrt()),
        2 => Ok(16.0 / 3.0 * (1.0 + PI * PI / 3.0)),
        3 => Ok(64.0 * PI.sqrt()),
        _ => {
            let rf = f64::from(r);
            Ok(4f64.powi(r as i32) / 3.0
                * rf
                * (rf - 1.0)
                * (rf - 3.0)
                * gamma_half(r)
                * (zeta_int(r - 2) - zeta_int(r)))
        }
    }
}

/// `x^2 exp(-x^2/4)`, the large-`x` form of the height tail.
pub fn moderate_tail_approx(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(x * x * (-x * x / 4.0).exp())
}
