//! Truncated power series with arbitrary-precision integer coefficients.
//!
//! A [`TruncatedIntSeries`] stores `[z^0]f, ..., [z^N]f` densely, where `N` is
//! its truncation order. Every operation keeps `N` fixed; binary operations
//! require both sides to agree on it.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

static DIVISIBILITY_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// Number of times an exact halving or sixth-ing found a remainder since the
/// process started. Always zero unless the cycle-index code is broken.
pub fn divisibility_failures() -> usize {
    DIVISIBILITY_FAILURES.load(Ordering::Relaxed)
}

pub(crate) fn record_divisibility_failure() {
    DIVISIBILITY_FAILURES.fetch_add(1, Ordering::Relaxed);
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedIntSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedIntSeries {
    pub fn zero(trunc_order: usize) -> Self {
        TruncatedIntSeries { coeffs: vec![BigInt::zero(); trunc_order + 1] }
    }

    pub fn one(trunc_order: usize) -> Self {
        Self::monomial(0, trunc_order)
    }

    /// `z^exponent`, or the zero series when the exponent exceeds the order.
    pub fn monomial(exponent: usize, trunc_order: usize) -> Self {
        let mut s = Self::zero(trunc_order);
        if exponent <= trunc_order {
            s.coeffs[exponent] = BigInt::one();
        }
        s
    }

    /// Takes ownership of a coefficient vector; its length fixes the order.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant coefficient");
        TruncatedIntSeries { coeffs }
    }

    /// Builds a series from small coefficients, zero-padding up to `trunc_order`.
    /// Entries beyond the order are dropped.
    pub fn from_i64s(values: &[i64], trunc_order: usize) -> Self {
        let mut s = Self::zero(trunc_order);
        for (slot, v) in s.coeffs.iter_mut().zip(values) {
            *slot = BigInt::from(*v);
        }
        s
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `[z^n]f`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> &BigInt {
        static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
        self.coeffs.get(n).unwrap_or_else(|| ZERO.get_or_init(BigInt::zero))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Index of the first non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Drops coefficients above `order`. Raising the order is refused.
    pub fn truncate_to(&self, order: usize) -> Result<Self> {
        if order > self.trunc_order() {
            return Err(Error::usage(format!(
                "cannot extend truncation order {} to {}",
                self.trunc_order(),
                order
            )));
        }
        Ok(TruncatedIntSeries { coeffs: self.coeffs[..=order].to_vec() })
    }

    fn check_orders(&self, other: &Self, op: &str) -> Result<()> {
        if self.trunc_order() != other.trunc_order() {
            return Err(Error::usage(format!(
                "{op}: truncation orders differ ({} vs {})",
                self.trunc_order(),
                other.trunc_order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_orders(other, "add")?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedIntSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_orders(other, "sub")?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedIntSeries { coeffs })
    }

    pub fn scale(&self, factor: i64) -> Self {
        let factor = BigInt::from(factor);
        TruncatedIntSeries { coeffs: self.coeffs.iter().map(|c| c * &factor).collect() }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.trunc_order());
        for (n, c) in self.coeffs.iter().enumerate() {
            if n + k > self.trunc_order() {
                break;
            }
            out.coeffs[n + k] = c.clone();
        }
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_orders(other, "mul")?;
        let order = self.trunc_order();
        let mut out = vec![BigInt::zero(); order + 1];
        let (Some(vf), Some(vg)) = (self.valuation(), other.valuation()) else {
            return Ok(TruncatedIntSeries { coeffs: out });
        };
        for i in vf..=order {
            let a = &self.coeffs[i];
            if a.is_zero() || i + vg > order {
                continue;
            }
            for j in vg..=order - i {
                let b = &other.coeffs[j];
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(TruncatedIntSeries { coeffs: out })
    }

    /// `f^2`, using the symmetry of the convolution.
    pub fn square(&self) -> Self {
        TruncatedIntSeries { coeffs: self.square_from(0) }
    }

    /// Coefficients of `f^2` with indices `>= lo`; lower entries are left zero.
    pub(crate) fn square_from(&self, lo: usize) -> Vec<BigInt> {
        let order = self.trunc_order();
        let mut out = vec![BigInt::zero(); order + 1];
        let Some(v) = self.valuation() else {
            return out;
        };
        let c = &self.coeffs;
        for n in lo.max(2 * v)..=order {
            let mut acc = BigInt::zero();
            let mut i = v;
            while 2 * i < n {
                let (a, b) = (&c[i], &c[n - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
                i += 1;
            }
            acc <<= 1;
            if n % 2 == 0 {
                let m = &c[n / 2];
                if !m.is_zero() {
                    acc += m * m;
                }
            }
            out[n] = acc;
        }
        out
    }

    /// `f(z^k)`, truncated at the input's order.
    ///
    /// # Panics
    /// If `k < 2`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 2, "substitute_power needs k >= 2, got {k}");
        let mut out = Self::zero(self.trunc_order());
        for (n, c) in self.coeffs.iter().enumerate() {
            let m = n * k;
            if m > self.trunc_order() {
                break;
            }
            out.coeffs[m] = c.clone();
        }
        out
    }

    /// Divides every coefficient by `d`, failing if any remainder is non-zero.
    pub fn exact_div(&self, d: u32, context: &str) -> Result<Self> {
        let d = BigInt::from(d);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (n, c) in self.coeffs.iter().enumerate() {
            let (q, r) = c.div_rem(&d);
            if !r.is_zero() {
                DIVISIBILITY_FAILURES.fetch_add(1, Ordering::Relaxed);
                return Err(Error::invariant(format!(
                    "{context}: coefficient {n} = {c} is not divisible by {d}"
                )));
            }
            coeffs.push(q);
        }
        Ok(TruncatedIntSeries { coeffs })
    }

    fn require_zero_constant(&self, op: &str) -> Result<()> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::usage(format!("{op} needs a zero constant term")));
        }
        Ok(())
    }

    /// Multisets of two: `(f(z)^2 + f(z^2)) / 2`.
    pub fn mset2(&self) -> Result<Self> {
        self.require_zero_constant("mset2")?;
        self.square().add(&self.substitute_power(2))?.exact_div(2, "mset2")
    }

    /// Multisets of three: `(f(z)^3 + 3 f(z) f(z^2) + 2 f(z^3)) / 6`.
    pub fn mset3(&self) -> Result<Self> {
        self.require_zero_constant("mset3")?;
        let cube = self.square().mul(self)?;
        let mixed = self.mul(&self.substitute_power(2))?.scale(3);
        let diag = self.substitute_power(3).scale(2);
        cube.add(&mixed)?.add(&diag)?.exact_div(6, "mset3")
    }

    /// Evaluates the polynomial of stored coefficients at `x` in `f64`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::INFINITY))
    }
}

impl fmt::Debug for TruncatedIntSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(z^{})", self.trunc_order() + 1)
    }
}

impl fmt::Display for TruncatedIntSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (n, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}z")?,
                (_, true) => write!(f, "z^{n}")?,
                (_, false) => write!(f, "{mag}z^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(values: &[i64], order: usize) -> TruncatedIntSeries {
        TruncatedIntSeries::from_i64s(values, order)
    }

    #[test]
    fn add_examples() {
        assert_eq!(s(&[0, 1], 4).add(&s(&[0, 0, 1], 4)).unwrap(), s(&[0, 1, 1], 4));
        let f = s(&[0, 1, 1], 4);
        assert_eq!(f.add(&TruncatedIntSeries::zero(4)).unwrap(), f);
        assert_eq!(f.add(&f).unwrap(), s(&[0, 2, 2], 4));
    }

    #[test]
    fn mismatched_orders_are_usage_errors() {
        let err = s(&[0, 1], 3).add(&s(&[0, 1], 4)).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        assert!(matches!(s(&[0, 1], 3).mul(&s(&[0, 1], 4)), Err(Error::Usage(_))));
    }

    #[test]
    fn mul_examples() {
        let f = s(&[0, 1, 1], 6);
        assert_eq!(f.mul(&f).unwrap(), s(&[0, 0, 1, 2, 1], 6));
        assert_eq!(f.mul(&TruncatedIntSeries::one(6)).unwrap(), f);
        let y2 = s(&[0, 1, 1, 1, 1], 4);
        assert_eq!(y2.mul(&y2).unwrap(), s(&[0, 0, 1, 2, 3], 4));
    }

    #[test]
    fn square_matches_mul() {
        let f = s(&[0, 3, -1, 4, 1, 5, 9, 2, 6], 8);
        assert_eq!(f.square(), f.mul(&f).unwrap());
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(s(&[0, 1, 1], 4).substitute_power(2), s(&[0, 0, 1, 0, 1], 4));
        assert_eq!(s(&[0, 1], 4).substitute_power(3), s(&[0, 0, 0, 1], 4));
        let y2 = s(&[0, 1, 1, 1, 1], 6);
        assert_eq!(y2.substitute_power(2), s(&[0, 0, 1, 0, 1, 0, 1], 6));
    }

    #[test]
    #[should_panic]
    fn substitute_power_rejects_identity() {
        s(&[0, 1], 3).substitute_power(1);
    }

    #[test]
    fn mset2_examples() {
        assert_eq!(s(&[0, 1], 6).mset2().unwrap(), s(&[0, 0, 1], 6));
        assert_eq!(s(&[0, 1, 1], 6).mset2().unwrap(), s(&[0, 0, 1, 1, 1], 6));
        let y2 = s(&[0, 1, 1, 1, 1], 8);
        let y3 = y2.mset2().unwrap().add(&TruncatedIntSeries::monomial(1, 8)).unwrap();
        // the complete tree with eight leaves has height three
        assert_eq!(y3, s(&[0, 1, 1, 1, 2, 2, 2, 1, 1], 8));
    }

    #[test]
    fn mset3_examples() {
        assert_eq!(s(&[0, 1], 6).mset3().unwrap(), s(&[0, 0, 0, 1], 6));
        assert_eq!(s(&[0, 1, 1], 6).mset3().unwrap(), s(&[0, 0, 0, 1, 1, 1, 1], 6));
        assert!(TruncatedIntSeries::zero(6).mset3().unwrap().is_zero());
    }

    #[test]
    fn multiset_needs_zero_constant() {
        assert!(matches!(s(&[1, 1], 4).mset2(), Err(Error::Usage(_))));
        assert!(matches!(s(&[1, 1], 4).mset3(), Err(Error::Usage(_))));
    }

    #[test]
    fn exact_div_reports_remainder() {
        let before = divisibility_failures();
        let err = s(&[0, 3], 2).exact_div(2, "probe").unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
        assert!(divisibility_failures() > before);
        // Undo so suite-wide checks only see genuine failures.
        DIVISIBILITY_FAILURES.fetch_sub(1, Ordering::Relaxed);
    }

    #[test]
    fn truncate_never_extends() {
        let f = s(&[0, 1, 2, 3], 3);
        assert_eq!(f.truncate_to(2).unwrap(), s(&[0, 1, 2], 2));
        assert!(f.truncate_to(5).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(s(&[0, 1, -2, 0, 1], 4).to_string(), "z - 2z^2 + z^4");
        assert_eq!(TruncatedIntSeries::zero(2).to_string(), "0");
    }

    /// Unordered pairs of objects drawn from a family with `counts[n]`
    /// objects of size `n`, by explicit enumeration of labelled objects.
    fn brute_force_pairs(counts: &[u64], n: usize) -> u64 {
        let objects: Vec<(usize, u64)> = counts
            .iter()
            .enumerate()
            .flat_map(|(size, &c)| (0..c).map(move |label| (size, label)))
            .collect();
        let mut total = 0;
        for (i, a) in objects.iter().enumerate() {
            for b in &objects[i..] {
                if a.0 + b.0 == n {
                    total += 1;
                }
            }
        }
        total
    }

    #[test]
    fn mset2_counts_unordered_pairs() {
        let counts = [0u64, 2, 1, 3, 0, 2, 1, 1, 2, 0, 1, 1, 3];
        let vals: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        let f = s(&vals, 12);
        let m = f.mset2().unwrap();
        for n in 0..=12 {
            assert_eq!(m.coeff(n), &BigInt::from(brute_force_pairs(&counts, n)), "n = {n}");
        }
    }

    #[test]
    fn mset3_counts_unordered_triples() {
        let counts = [0u64, 2, 1, 3, 0, 2, 1, 1, 2, 0, 1, 1, 3];
        let objects: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(size, &c)| std::iter::repeat(size).take(c as usize))
            .collect();
        let mut brute = [0i64; 13];
        for i in 0..objects.len() {
            for j in i..objects.len() {
                for k in j..objects.len() {
                    let n = objects[i] + objects[j] + objects[k];
                    if n <= 12 {
                        brute[n] += 1;
                    }
                }
            }
        }
        let vals: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        assert_eq!(s(&vals, 12).mset3().unwrap(), s(&brute, 12));
    }

    fn small_series(order: usize) -> impl Strategy<Value = TruncatedIntSeries> {
        prop::collection::vec(-50i64..50, order + 1).prop_map(move |v| s(&v, order))
    }

    proptest! {
        #[test]
        fn mul_commutes(f in small_series(9), g in small_series(9)) {
            prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        }

        #[test]
        fn mul_associates(f in small_series(7), g in small_series(7), h in small_series(7)) {
            let left = f.mul(&g).unwrap().mul(&h).unwrap();
            let right = f.mul(&g.mul(&h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn substitution_composes(f in small_series(20)) {
            prop_assert_eq!(f.substitute_power(2).substitute_power(2), f.substitute_power(4));
        }

        #[test]
        fn multisets_are_integral(mut v in prop::collection::vec(-30i64..30, 12)) {
            v[0] = 0;
            let f = s(&v, 11);
            prop_assert!(f.mset2().is_ok());
            prop_assert!(f.mset3().is_ok());
        }
    }
}
