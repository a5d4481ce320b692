//! Exact enumeration of rooted trees by size and height, and of unrooted
//! trees by size and diameter.
//!
//! Rooted trees are non-plane binary trees counted by leaves. Unrooted trees
//! have every node of degree one or three and are also counted by leaves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;
use crate::series::{record_divisibility_failure, TruncatedIntSeries};

/// Coefficients of `y(z) = z + y(z)^2/2 + y(z^2)/2` up to `z^n_max`.
///
/// Each `y_n` only depends on `y_1..y_{n-1}`, so one forward pass suffices.
pub fn rooted_series(n_max: usize) -> Result<TruncatedIntSeries> {
    if n_max < 1 {
        return Err(Error::usage("rooted_series needs n_max >= 1"));
    }
    let mut y = vec![BigInt::zero(); n_max + 1];
    y[1] = BigInt::one();
    for n in 2..=n_max {
        let mut acc = BigInt::zero();
        for i in 1..=(n - 1) / 2 {
            acc += &y[i] * &y[n - i];
        }
        acc <<= 1;
        if n % 2 == 0 {
            acc += &y[n / 2] * &y[n / 2] + &y[n / 2];
        }
        let (q, r) = acc.div_rem(&BigInt::from(2));
        if !r.is_zero() {
            record_divisibility_failure();
            return Err(Error::invariant(format!("rooted_series: odd numerator at n = {n}")));
        }
        y[n] = q;
    }
    Ok(TruncatedIntSeries::from_coeffs(y))
}

/// The bounded-height generating functions `y_0, ..., y_{h_max}` together with
/// `y`, all truncated at `z^n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightLadder {
    n_max: usize,
    h_max: usize,
    /// `levels[h] = y_h` for `h` up to `min(h_max, n_max - 1)`; higher levels
    /// coincide with `total` at this truncation.
    levels: Vec<TruncatedIntSeries>,
    total: TruncatedIntSeries,
}

impl HeightLadder {
    pub fn new(n_max: usize, h_max: usize) -> Result<Self> {
        let total = rooted_series(n_max)?;
        let last = h_max.min(n_max - 1);
        let mut levels = Vec::with_capacity(last + 1);
        levels.push(TruncatedIntSeries::monomial(1, n_max));
        for h in 0..last {
            let next = next_level(&levels[h], h)?;
            levels.push(next);
        }
        Ok(HeightLadder { n_max, h_max, levels, total })
    }

    /// Reassembles a ladder from stored levels, checking the structural
    /// invariants instead of trusting the source.
    pub fn from_parts(
        n_max: usize,
        h_max: usize,
        levels: Vec<TruncatedIntSeries>,
        total: TruncatedIntSeries,
    ) -> Result<Self> {
        if n_max < 1 || levels.len() != h_max.min(n_max - 1) + 1 {
            return Err(Error::usage("ladder parts have the wrong number of levels"));
        }
        if levels.iter().chain([&total]).any(|s| s.trunc_order() != n_max) {
            return Err(Error::usage("ladder parts have the wrong truncation order"));
        }
        if levels[0] != TruncatedIntSeries::monomial(1, n_max) {
            return Err(Error::usage("ladder level 0 must be z"));
        }
        let ladder = HeightLadder { n_max, h_max, levels, total };
        if !ladder.is_monotone() {
            return Err(Error::usage("ladder levels are not coefficient-wise monotone"));
        }
        Ok(ladder)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn h_max(&self) -> usize {
        self.h_max
    }

    pub fn total(&self) -> &TruncatedIntSeries {
        &self.total
    }

    /// The explicitly stored levels (they stop at `n_max - 1`).
    pub fn stored_levels(&self) -> &[TruncatedIntSeries] {
        &self.levels
    }

    /// Whether `y_h` is available: either built, or beyond the point where
    /// every level equals `y` at this truncation.
    pub fn covers(&self, h: usize) -> bool {
        h <= self.h_max || h + 1 >= self.n_max
    }

    pub fn level(&self, h: usize) -> Result<&TruncatedIntSeries> {
        if !self.covers(h) {
            return Err(Error::usage(format!("ladder built to h = {}, asked for {h}", self.h_max)));
        }
        Ok(self.levels.get(h).unwrap_or(&self.total))
    }

    /// `g_h`: trees of height exactly `h`. `g_0 = z`.
    pub fn exact_height(&self, h: usize) -> Result<TruncatedIntSeries> {
        if h == 0 {
            return Ok(self.levels[0].clone());
        }
        self.level(h)?.sub(self.level(h - 1)?)
    }

    /// Coefficient-wise `y_0 <= y_1 <= ... <= y`.
    pub fn is_monotone(&self) -> bool {
        self.levels.iter().chain([&self.total]).collect::<Vec<_>>().windows(2).all(|w| {
            w[0].coeffs().iter().zip(w[1].coeffs()).all(|(a, b)| a <= b)
        })
    }
}

/// `y_{h+1}` from `y_h`. Coefficients `n <= h + 1` are already final in
/// `y_h` and are copied; only the remaining ones are recomputed.
fn next_level(prev: &TruncatedIntSeries, h: usize) -> Result<TruncatedIntSeries> {
    let order = prev.trunc_order();
    let lo = h + 2;
    let mut coeffs: Vec<BigInt> = prev.coeffs().to_vec();
    if lo <= order {
        let square = prev.square_from(lo);
        let two = BigInt::from(2);
        for n in lo..=order {
            let mut numer = square[n].clone();
            if n % 2 == 0 {
                numer += prev.coeff(n / 2);
            }
            let (q, r) = numer.div_rem(&two);
            if !r.is_zero() {
                record_divisibility_failure();
                return Err(Error::invariant(format!("height ladder: odd numerator at n = {n}")));
            }
            coeffs[n] = q;
        }
    }
    Ok(TruncatedIntSeries::from_coeffs(coeffs))
}

pub fn height_ladder(n_max: usize, h_max: usize) -> Result<HeightLadder> {
    HeightLadder::new(n_max, h_max)
}

/// `e_h = y - y_h`: trees whose height exceeds `h`.
pub fn exceed_counts(ladder: &HeightLadder, h: usize) -> Result<TruncatedIntSeries> {
    if h > ladder.h_max {
        return Err(Error::usage(format!("h = {h} exceeds ladder h_max = {}", ladder.h_max)));
    }
    ladder.total.sub(ladder.level(h)?)
}

/// Exact distribution over an integer support, for trees of one size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactPmf {
    size_n: usize,
    support: Vec<usize>,
    #[serde(serialize_with = "serialize_rationals")]
    masses: Vec<BigRational>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl ExactPmf {
    /// Builds the pmf from raw counts. Zero counts are dropped from the
    /// support; the counts must add up to `total` exactly.
    pub fn from_counts(size_n: usize, counts: &[(usize, BigInt)], total: &BigInt) -> Result<Self> {
        if !total.is_positive() {
            return Err(Error::usage("pmf total must be positive"));
        }
        let sum: BigInt = counts.iter().map(|(_, c)| c).sum();
        if &sum != total {
            return Err(Error::invariant(format!(
                "pmf counts for n = {size_n} sum to {sum}, expected {total}"
            )));
        }
        let mut support = Vec::new();
        let mut masses = Vec::new();
        for (k, c) in counts {
            if c.is_negative() {
                return Err(Error::invariant(format!("negative count at {k} for n = {size_n}")));
            }
            if c.is_positive() {
                support.push(*k);
                masses.push(BigRational::new(c.clone(), total.clone()));
            }
        }
        Ok(ExactPmf { size_n, support, masses })
    }

    pub fn size_n(&self) -> usize {
        self.size_n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.support.iter().copied().zip(&self.masses)
    }

    pub fn mass(&self, k: usize) -> BigRational {
        match self.support.binary_search(&k) {
            Ok(i) => self.masses[i].clone(),
            Err(_) => BigRational::zero(),
        }
    }

    /// `P(X <= k)`.
    pub fn cdf(&self, k: usize) -> BigRational {
        self.iter().filter(|(j, _)| *j <= k).map(|(_, m)| m.clone()).sum()
    }

    /// `P(X >= k)`.
    pub fn tail(&self, k: usize) -> BigRational {
        self.iter().filter(|(j, _)| *j >= k).map(|(_, m)| m.clone()).sum()
    }

    pub fn moment(&self, r: u32) -> BigRational {
        exact_moment(self, r)
    }

    pub fn mass_f64(&self, k: usize) -> f64 {
        rational_to_f64(&self.mass(k))
    }

    pub fn tail_f64(&self, k: usize) -> f64 {
        rational_to_f64(&self.tail(k))
    }
}

/// `sum_k k^r P(X = k)`, exact.
pub fn exact_moment(pmf: &ExactPmf, r: u32) -> BigRational {
    pmf.iter()
        .map(|(k, m)| m * BigRational::from_integer(BigInt::from(k).pow(r)))
        .sum()
}

/// `P(H_n = h) = (y_{h,n} - y_{h-1,n}) / y_n`.
pub fn height_pmf(ladder: &HeightLadder, n: usize) -> Result<ExactPmf> {
    if n < 1 || n > ladder.n_max {
        return Err(Error::usage(format!("height_pmf: n = {n} outside 1..={}", ladder.n_max)));
    }
    if !ladder.covers(n - 1) {
        return Err(Error::usage(format!(
            "height_pmf: n = {n} needs h_max >= {}, ladder has {}",
            n - 1,
            ladder.h_max
        )));
    }
    let mut counts = Vec::with_capacity(n);
    let mut below = BigInt::zero();
    for h in 0..n {
        let at_most = ladder.level(h)?.coeff(n).clone();
        counts.push((h, &at_most - &below));
        below = at_most;
    }
    ExactPmf::from_counts(n, &counts, ladder.total.coeff(n))
}

/// Coefficients `u_n` of unrooted trees, via the dissimilarity count
/// `u = u^bullet - (y^2 - y(z^2)) / 2` with `u^bullet = z y + MSet3(y)`.
pub fn unrooted_series(n_max: usize) -> Result<TruncatedIntSeries> {
    if n_max < 2 {
        return Err(Error::usage("unrooted_series needs n_max >= 2"));
    }
    let y = rooted_series(n_max)?;
    let pointed = y.shift(1).add(&y.mset3()?)?;
    let half = y.square().sub(&y.substitute_power(2))?.exact_div(2, "unrooted_series")?;
    let u = pointed.sub(&half)?;
    if !u.is_nonnegative() {
        return Err(Error::invariant("unrooted_series produced a negative coefficient"));
    }
    Ok(u)
}

/// Generating function `u_d` of unrooted trees with diameter exactly `d`.
pub fn diameter_series(ladder: &HeightLadder, d: usize) -> Result<TruncatedIntSeries> {
    let order = ladder.n_max;
    match d {
        0 => return Err(Error::usage("diameter must be >= 1")),
        1 => return Ok(TruncatedIntSeries::monomial(2, order)),
        2 => return Ok(TruncatedIntSeries::monomial(3, order)),
        _ => {}
    }
    let depth = (d - 1) / 2;
    if !ladder.covers(depth) {
        return Err(Error::usage(format!(
            "diameter {d} needs ladder depth {depth}, ladder has h_max = {}",
            ladder.h_max
        )));
    }
    if d % 2 == 1 {
        // Bicentred: a central edge joining two trees of height exactly h.
        let g = ladder.exact_height(depth)?;
        g.mset2()
    } else {
        // Centred: around the centre, two or three branches of height
        // exactly h-1 and the rest of height at most h-2.
        let h = d / 2;
        let g = ladder.exact_height(h - 1)?;
        let rest = ladder.level(h - 2)?;
        let g_sq = g.square();
        let g_z2 = g.substitute_power(2);
        let numer = g_sq
            .mul(&g)?
            .add(&g_z2.mul(&g)?.scale(3))?
            .add(&g.substitute_power(3).scale(2))?
            .add(&g_sq.mul(rest)?.scale(3))?
            .add(&g_z2.mul(rest)?.scale(3))?;
        numer.exact_div(6, "diameter_series (even)")
    }
}

/// All `u_d` for `1 <= d < n_max`, plus `u`, truncated at the ladder's order.
#[derive(Clone, Debug, PartialEq)]
pub struct DiameterTable {
    n_max: usize,
    by_diameter: Vec<TruncatedIntSeries>,
    unrooted: TruncatedIntSeries,
}

impl DiameterTable {
    pub fn new(ladder: &HeightLadder) -> Result<Self> {
        let n_max = ladder.n_max;
        if n_max < 2 {
            return Err(Error::usage("diameter table needs n_max >= 2"));
        }
        let by_diameter = (1..n_max)
            .map(|d| diameter_series(ladder, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiameterTable { n_max, by_diameter, unrooted: unrooted_series(n_max)? })
    }

    pub fn from_parts(by_diameter: Vec<TruncatedIntSeries>, unrooted: TruncatedIntSeries) -> Result<Self> {
        let n_max = unrooted.trunc_order();
        if n_max < 2 || by_diameter.len() != n_max - 1 {
            return Err(Error::usage("diameter table parts have the wrong length"));
        }
        if by_diameter.iter().any(|s| s.trunc_order() != n_max) {
            return Err(Error::usage("diameter table parts have the wrong truncation order"));
        }
        Ok(DiameterTable { n_max, by_diameter, unrooted })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn unrooted(&self) -> &TruncatedIntSeries {
        &self.unrooted
    }

    /// `u_d`, for `1 <= d < n_max`.
    pub fn series(&self, d: usize) -> Option<&TruncatedIntSeries> {
        d.checked_sub(1).and_then(|i| self.by_diameter.get(i))
    }

    pub fn all_series(&self) -> &[TruncatedIntSeries] {
        &self.by_diameter
    }

    /// `P(D_n = d) = u_{d,n} / u_n`.
    pub fn pmf(&self, n: usize) -> Result<ExactPmf> {
        if n < 2 || n > self.n_max {
            return Err(Error::usage(format!("diameter_pmf: n = {n} outside 2..={}", self.n_max)));
        }
        let counts: Vec<(usize, BigInt)> =
            (1..n).map(|d| (d, self.by_diameter[d - 1].coeff(n).clone())).collect();
        ExactPmf::from_counts(n, &counts, self.unrooted.coeff(n))
    }

    /// `(sum of u_d over odd d, sum over even d)`.
    pub fn parity_split(&self) -> (TruncatedIntSeries, TruncatedIntSeries) {
        let mut odd = TruncatedIntSeries::zero(self.n_max);
        let mut even = TruncatedIntSeries::zero(self.n_max);
        for (i, s) in self.by_diameter.iter().enumerate() {
            let target = if (i + 1) % 2 == 1 { &mut odd } else { &mut even };
            *target = target.add(s).expect("equal orders");
        }
        (odd, even)
    }
}

pub fn diameter_pmf(ladder: &HeightLadder, n: usize) -> Result<ExactPmf> {
    if n < 2 || n > ladder.n_max {
        return Err(Error::usage(format!("diameter_pmf: n = {n} outside 2..={}", ladder.n_max)));
    }
    DiameterTable::new(ladder)?.pmf(n)
}

/// Trees of odd diameter (bicentred) and even diameter (centred), up to
/// `z^n_max`.
pub fn parity_split(
    ladder: &HeightLadder,
    n_max: usize,
) -> Result<(TruncatedIntSeries, TruncatedIntSeries)> {
    if n_max > ladder.n_max {
        return Err(Error::usage(format!(
            "parity_split: n_max = {n_max} exceeds ladder order {}",
            ladder.n_max
        )));
    }
    let (odd, even) = DiameterTable::new(ladder)?.parity_split();
    Ok((odd.truncate_to(n_max)?, even.truncate_to(n_max)?))
}

/// A compact floating-point view of one exact pmf row, for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct PmfRow {
    pub k: usize,
    pub mass: String,
    pub cumulative: String,
}

impl ExactPmf {
    pub fn rows(&self) -> Vec<PmfRow> {
        let mut cum = BigRational::zero();
        self.iter()
            .map(|(k, m)| {
                cum += m;
                PmfRow { k, mass: m.to_string(), cumulative: cum.to_string() }
            })
            .collect()
    }
}
