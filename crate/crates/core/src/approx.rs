//! Real-axis checks of the approximations
//! `e_h(z) ~ 2 (1-y) y^h / (1-y^h)` and `u_d(z) ~ 2 (1-y)^4 y^d / (1-y^{d/2})^4`
//! on `(0, rho]`, where `y = y(z)`.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::constants::{real_y, rho_f64};
use crate::error::{Error, Result};
use crate::series::TruncatedIntSeries;
use crate::trees::DiameterTable;

/// Chain entries below this are replaced by their leading term.
const CHAIN_FLOOR: f64 = 1e-300;

/// `z, z^2, z^4, ...` down to the floor, plus one entry past it.
fn squaring_chain(z: f64) -> Vec<f64> {
    let mut w = vec![z];
    while *w.last().unwrap() >= CHAIN_FLOOR {
        let last = *w.last().unwrap();
        w.push(last * last);
    }
    w
}

/// `y_h(z)` from `y_{j+1}(w) = w + y_j(w)^2/2 + y_j(w^2)/2`, carried along
/// the squaring chain of `z`.
pub fn eval_yh_point(z: f64, h: usize) -> Result<f64> {
    if !(z > 0.0 && z < rho_f64().sqrt()) {
        return Err(Error::usage(format!("eval_yh_point needs 0 < z < sqrt(rho), got {z}")));
    }
    let w = squaring_chain(z);
    let mut v = w.clone();
    for _ in 0..h {
        let last = v.len() - 1;
        let next: Vec<f64> = (0..=last)
            .map(|k| {
                // Past the floor y_j(w) = w to working precision.
                let deeper = if k < last { v[k + 1] } else { w[k] * w[k] };
                w[k] + 0.5 * v[k] * v[k] + 0.5 * deeper
            })
            .collect();
        v = next;
    }
    Ok(v[0])
}

fn check_z(z: f64) -> Result<()> {
    if z > 0.0 && z <= rho_f64() {
        Ok(())
    } else {
        Err(Error::usage(format!("need 0 < z <= rho, got {z}")))
    }
}

/// `e_h(z) = y(z) - y_h(z)` through
/// `e_{h+1}(w) = e_h(w)(y(w) - e_h(w)/2) + e_h(w^2)/2`, `e_0(w) = y(w) - w`.
/// Every term is non-negative, so relative accuracy survives even when
/// `e_h(z)` is far below `y(z)`.
pub fn eval_eh_point(z: f64, h: usize) -> Result<f64> {
    check_z(z)?;
    let ry = real_y();
    let w = squaring_chain(z);
    let y: Vec<f64> = w.iter().map(|&x| ry.value(x)).collect();
    let mut e: Vec<f64> = w.iter().map(|&x| ry.minus_identity(x)).collect();
    for _ in 0..h {
        let last = e.len() - 1;
        let next: Vec<f64> = (0..=last)
            .map(|k| {
                let deeper = if k < last { e[k + 1] } else { 0.0 };
                e[k] * (y[k] - 0.5 * e[k]) + 0.5 * deeper
            })
            .collect();
        e = next;
    }
    Ok(e[0])
}

/// `1 - y(z)` for `z` in `(0, rho]`.
fn one_minus_y(z: f64) -> f64 {
    real_y().complement(z)
}

/// `(1 - (1-t)^m) / t`, finite as `t -> 0` where it tends to `m`.
fn geometric_ratio(t: f64, m: f64) -> f64 {
    if t == 0.0 {
        m
    } else {
        -(m * (-t).ln_1p()).exp_m1() / t
    }
}

/// `2 (1-y) y^h / (1-y^h)`; equals `2/h` at `z = rho`.
pub fn ehat(z: f64, h: usize) -> Result<f64> {
    check_z(z)?;
    if h == 0 {
        return Err(Error::usage("ehat needs h >= 1"));
    }
    let t = one_minus_y(z);
    let hf = h as f64;
    Ok(2.0 * (hf * (-t).ln_1p()).exp() / geometric_ratio(t, hf))
}

/// `2 (1-y)^4 y^d / (1-y^{d/2})^4`; equals `32/d^4` at `z = rho`.
pub fn uhat(z: f64, d: usize) -> Result<f64> {
    check_z(z)?;
    if d == 0 {
        return Err(Error::usage("uhat needs d >= 1"));
    }
    let t = one_minus_y(z);
    let df = d as f64;
    Ok(2.0 * (df * (-t).ln_1p()).exp() / geometric_ratio(t, df / 2.0).powi(4))
}

/// `R_h = y^h / e_h - (1 - y^h) / (2 (1 - y))`.
pub fn remainder(z: f64, h: usize) -> Result<f64> {
    let e = eval_eh_point(z, h)?;
    let t = one_minus_y(z);
    let hf = h as f64;
    Ok((hf * (-t).ln_1p()).exp() / e - 0.5 * geometric_ratio(t, hf))
}

/// `h^{-1/2} (z/rho)^h`, the a-priori bound on `e_h(z)`.
pub fn eh_bound(z: f64, h: usize) -> f64 {
    let hf = h as f64;
    (hf * (z / rho_f64()).ln()).exp() / hf.sqrt()
}

/// Comparison of an exact quantity with its approximation on a grid of
/// `(z, index)` points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub grid: Vec<(f64, usize)>,
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
    pub rel_err: Vec<f64>,
    /// `R_h` per point for `e_h`; empty for `u_d`.
    pub remainder: Vec<f64>,
    /// Log-space least-squares fit of `|R_h| ~ C log(1+h)`.
    pub fitted_c: Option<f64>,
    /// Grid indices where `|R_h|` exceeds `FLAG_FACTOR * C log(1+h)`.
    pub flagged: Vec<usize>,
}

/// Tolerance factor over the fitted constant before a point is flagged.
pub const FLAG_FACTOR: f64 = 3.0;

fn rel(exact: f64, approx: f64) -> f64 {
    if exact == 0.0 {
        f64::NAN
    } else {
        ((approx - exact) / exact).abs()
    }
}

pub fn validate_eh(grid: &[(f64, usize)]) -> Result<ApproxReport> {
    let mut report = ApproxReport {
        grid: grid.to_vec(),
        exact: Vec::new(),
        approx: Vec::new(),
        rel_err: Vec::new(),
        remainder: Vec::new(),
        fitted_c: None,
        flagged: Vec::new(),
    };
    for &(z, h) in grid {
        let e = eval_eh_point(z, h)?;
        let a = ehat(z, h)?;
        report.exact.push(e);
        report.approx.push(a);
        report.rel_err.push(rel(e, a));
        report.remainder.push(remainder(z, h)?);
    }
    // ln|R_h| = ln C + ln ln(1+h) with unit slope; the intercept is the mean.
    let logs: Vec<f64> = grid
        .iter()
        .zip(&report.remainder)
        .filter(|(_, r)| r.abs() > 0.0)
        .map(|(&(_, h), r)| r.abs().ln() - (h as f64).ln_1p().ln())
        .collect();
    if !logs.is_empty() {
        let c = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
        report.fitted_c = Some(c);
        report.flagged = grid
            .iter()
            .zip(&report.remainder)
            .enumerate()
            .filter(|(_, (&(_, h), r))| r.abs() > FLAG_FACTOR * c * (h as f64).ln_1p())
            .map(|(i, _)| i)
            .collect();
    }
    Ok(report)
}

fn eval_series(s: &TruncatedIntSeries, z: f64) -> f64 {
    s.coeffs().iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64().unwrap_or(f64::INFINITY))
}

/// `u_d(z)` from the truncated series; `z` must stay well inside the
/// convergence disc for the truncation to be negligible.
pub fn eval_ud_point(table: &DiameterTable, z: f64, d: usize) -> Result<f64> {
    check_z(z)?;
    let s = table
        .series(d)
        .ok_or_else(|| Error::usage(format!("diameter {d} not in table (n_max = {})", table.n_max())))?;
    Ok(eval_series(s, z))
}

pub fn validate_ud(grid: &[(f64, usize)], table: &DiameterTable) -> Result<ApproxReport> {
    let mut report = ApproxReport {
        grid: grid.to_vec(),
        exact: Vec::new(),
        approx: Vec::new(),
        rel_err: Vec::new(),
        remainder: Vec::new(),
        fitted_c: None,
        flagged: Vec::new(),
    };
    for &(z, d) in grid {
        let u = eval_ud_point(table, z, d)?;
        let a = uhat(z, d)?;
        report.exact.push(u);
        report.approx.push(a);
        report.rel_err.push(rel(u, a));
    }
    Ok(report)
}

/// `max_h h |R_h - R_{h+1}|` over `h` in `range`, at `z`.
pub fn remainder_increment_constant(z: f64, range: std::ops::RangeInclusive<usize>) -> Result<f64> {
    let mut best: f64 = 0.0;
    let mut prev = remainder(z, *range.start())?;
    for h in range {
        let next = remainder(z, h + 1)?;
        best = best.max(h as f64 * (prev - next).abs());
        prev = next;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{height_ladder, DiameterTable};

    fn exact_series_at(s: &TruncatedIntSeries, z: f64) -> f64 {
        eval_series(s, z)
    }

    #[test]
    fn level_zero_is_identity() {
        for &z in &[0.01, 0.2, 0.5] {
            assert_eq!(eval_yh_point(z, 0).unwrap(), z);
        }
    }

    #[test]
    fn level_one_at_rho() {
        let r = rho_f64();
        let v = eval_yh_point(r, 1).unwrap();
        assert!((v - (r + r * r)).abs() < 1e-15);
        assert!((1.0 - v - 0.43).abs() < 0.01);
        assert!((eval_eh_point(r, 1).unwrap() - (1.0 - r - r * r)).abs() < 1e-14);
    }

    #[test]
    fn level_five_matches_series() {
        let ladder = height_ladder(63, 5).unwrap();
        let exact = exact_series_at(ladder.level(5).unwrap(), 0.3);
        assert!((eval_yh_point(0.3, 5).unwrap() - exact).abs() < 1e-12);
        // y_5 has degree 32 and the ladder agrees past it
        assert_eq!(ladder.level(5).unwrap().coeff(33), &num_bigint::BigInt::from(0));
    }

    #[test]
    fn both_recurrences_agree() {
        let ry = real_y();
        for &z in &[0.25, 0.35, rho_f64()] {
            for h in [1, 3, 10, 40] {
                let via_y = ry.value(z) - eval_yh_point(z, h).unwrap();
                let via_e = eval_eh_point(z, h).unwrap();
                assert!((via_y - via_e).abs() < 1e-12, "z = {z}, h = {h}");
            }
        }
    }

    #[test]
    fn e0_at_rho() {
        let e0 = eval_eh_point(rho_f64(), 0).unwrap();
        assert!((e0 - 0.597_30).abs() < 5e-6);
    }

    #[test]
    fn ehat_limits() {
        let r = rho_f64();
        for h in [1, 7, 100] {
            assert!((ehat(r, h).unwrap() - 2.0 / h as f64).abs() < 1e-14);
        }
        let y = real_y().value(0.35);
        assert!((ehat(0.35, 1).unwrap() - 2.0 * y).abs() < 1e-14);
        let ratios: Vec<f64> = (20..25).map(|h| ehat(0.35, h + 1).unwrap() / ehat(0.35, h).unwrap()).collect();
        for q in ratios {
            assert!((q - y).abs() < 1e-3);
        }
        assert!((uhat(r, 10).unwrap() - 32.0 / 1e4).abs() < 1e-15);
    }

    #[test]
    fn e_h_near_two_over_h() {
        let r = rho_f64();
        let dev: Vec<f64> =
            [50, 100, 200].iter().map(|&h| (h as f64 * eval_eh_point(r, h).unwrap() / 2.0 - 1.0).abs()).collect();
        assert!(dev[2] < 0.2);
        assert!(dev[0] > dev[1] && dev[1] > dev[2]);
    }

    #[test]
    fn eh_bound_holds() {
        for &z in &[0.1, 0.2, 0.3, rho_f64()] {
            for h in 1..=100 {
                let e = eval_eh_point(z, h).unwrap();
                assert!(e <= eh_bound(z, h), "z = {z}, h = {h}: {e} vs {}", eh_bound(z, h));
            }
        }
    }

    #[test]
    fn e_h_decreasing() {
        for &z in &[0.05, 0.3, rho_f64()] {
            let es: Vec<f64> = (0..60).map(|h| eval_eh_point(z, h).unwrap()).collect();
            assert!(es.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn remainder_bounded_and_stable() {
        let r = rho_f64();
        let grid: Vec<(f64, usize)> = [5, 10, 20, 50, 100, 200].iter().map(|&h| (r, h)).collect();
        let rep = validate_eh(&grid).unwrap();
        assert!(rep.fitted_c.unwrap().is_finite());
        assert!(rep.flagged.is_empty(), "{rep:?}");
        assert!(rep.rel_err.iter().all(|e| e.is_finite()));
        let c = remainder_increment_constant(r, 10..=200).unwrap();
        assert!(c.is_finite() && c < 10.0);
    }

    #[test]
    fn ud_ratio_improves_with_diameter() {
        // Diameters stay small enough that trees beyond the truncation do
        // not matter at these z.
        let ladder = height_ladder(400, 200).unwrap();
        let table = DiameterTable::new(&ladder).unwrap();
        for &z in &[0.4, rho_f64()] {
            let grid: Vec<(f64, usize)> = [10, 20, 30, 40].iter().map(|&d| (z, d)).collect();
            let rep = validate_ud(&grid, &table).unwrap();
            assert!(rep.rel_err.windows(2).all(|w| w[1] < w[0]), "{rep:?}");
            assert!(rep.exact.iter().zip(&rep.approx).all(|(e, a)| e < a));
        }
    }

    #[test]
    fn domains() {
        assert!(eval_yh_point(0.0, 3).is_err());
        assert!(eval_yh_point(0.7, 3).is_err());
        assert!(eval_eh_point(0.5, 3).is_err());
        assert!(ehat(0.3, 0).is_err());
    }
}
