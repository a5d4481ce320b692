//! Certified values of `rho` (radius of convergence of `y`) and `lambda`
//! (coefficient of the square-root singularity), plus the Otter-type
//! estimates for `y_n` and `u_n`.
//!
//! All certified arithmetic is done in binary fixed point on big integers.
//! Every quantity is a monotone function of series with non-negative
//! coefficients, so evaluating once with all roundings down and once with all
//! roundings up (and the tail majorant added) brackets the true value. The
//! tail of `y` beyond the truncation is bounded by the Catalan majorant
//! `y_n <= C_{n-1}`, which is summable for arguments below `1/4`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;
use crate::trees::rooted_series;

/// Terms used by the cached default constants.
pub const DEFAULT_TERMS: usize = 240;
/// Precision of the cached default constants.
pub const DEFAULT_PRECISION: f64 = 1e-30;

/// An interval `[lo, hi] * 2^-bits` known to contain the true value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedConstant {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

impl VerifiedConstant {
    fn new(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        VerifiedConstant { lo, hi, bits }
    }

    fn scale(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, self.scale() << 1)
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.scale())
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.scale())
    }

    /// Midpoint rounded to `f64`.
    pub fn value(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    /// Upper bound on `|midpoint - true value|`, rounded up.
    pub fn abs_error(&self) -> f64 {
        let half = BigRational::new(&self.hi - &self.lo + 1, self.scale() << 1);
        let e = rational_to_f64(&half);
        e * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }

    /// Whether the exact value of `x` lies inside the certified interval.
    pub fn contains(&self, x: f64) -> bool {
        match BigRational::from_float(x) {
            Some(r) => self.lower() <= r && r <= self.upper(),
            None => false,
        }
    }

    /// Midpoint rounded half-up to `digits` places after the decimal point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10u32).pow(digits as u32);
        let m = self.midpoint() * BigRational::from_integer(ten.clone());
        let rounded = (m + BigRational::new(1.into(), 2.into())).floor().to_integer();
        let (int, frac) = rounded.abs().div_rem(&ten);
        let sign = if rounded.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac:0>digits$}")
        }
    }
}

impl Serialize for VerifiedConstant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("VerifiedConstant", 2)?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("abs_error", &self.abs_error())?;
        st.end()
    }
}

// Fixed-point helpers. Values are non-negative unless stated; `bits` is the
// number of fractional bits.

fn mul_floor(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a * b) >> bits
}

fn mul_ceil(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    let p = a * b;
    let q: BigInt = &p >> bits;
    if (&q << bits) == p {
        q
    } else {
        q + 1
    }
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn sqrt_floor(a: &BigInt, bits: u32) -> BigInt {
    (a << bits).sqrt()
}

fn sqrt_ceil(a: &BigInt, bits: u32) -> BigInt {
    let s: BigInt = a << bits;
    let r = s.sqrt();
    if &r * &r == s {
        r
    } else {
        r + 1
    }
}

fn from_f64_floor(x: f64, bits: u32) -> BigInt {
    let r = BigRational::from_float(x).expect("finite input") * BigRational::from_integer(BigInt::one() << bits);
    r.floor().to_integer()
}

fn from_f64_ceil(x: f64, bits: u32) -> BigInt {
    let r = BigRational::from_float(x).expect("finite input") * BigRational::from_integer(BigInt::one() << bits);
    r.ceil().to_integer()
}

/// Truncated `y` with its Catalan tail bound, evaluated in fixed point.
struct CertifiedY {
    coeffs: Vec<BigInt>,
    bits: u32,
}

impl CertifiedY {
    fn new(n_terms: usize, bits: u32) -> Result<Self> {
        let y = rooted_series(n_terms)?;
        Ok(CertifiedY { coeffs: y.into_coeffs(), bits })
    }

    fn n_terms(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    /// `sum_{n=1}^{N} y_n t^n`, rounded down (`up = false`) or up.
    fn poly(&self, t: &BigInt, up: bool) -> BigInt {
        let mul = if up { mul_ceil } else { mul_floor };
        let mut acc = BigInt::zero();
        for c in self.coeffs[1..].iter().rev() {
            acc = (c << self.bits) + mul(&acc, t, self.bits);
        }
        mul(&acc, t, self.bits)
    }

    /// `sum_{n=1}^{N} n y_n t^{n-1}`, rounded down or up.
    fn poly_deriv(&self, t: &BigInt, up: bool) -> BigInt {
        let mul = if up { mul_ceil } else { mul_floor };
        let mut acc = BigInt::zero();
        for (n, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = ((c * BigInt::from(n)) << self.bits) + mul(&acc, t, self.bits);
        }
        acc
    }

    /// `(4t)^k t / (1 - 4t)` shaped tail bounds need `4t < 1`.
    fn tail_denominator(&self, t: &BigInt) -> Option<BigInt> {
        let d: BigInt = self.one() - (t << 2u32);
        d.is_positive().then_some(d)
    }

    /// `C_N t^N`, rounded up. Built as a running product of the ratios
    /// `C_k t / C_{k-1}`, all below one, so the rounding stays at a few ulps
    /// instead of saturating at one ulp as a plain power would.
    fn catalan_term(&self, t: &BigInt) -> BigInt {
        let mut q = self.one();
        for k in 1..=self.n_terms() as u64 {
            q = mul_ceil(&q, t, self.bits);
            q = div_ceil(&(q * BigInt::from(2 * (2 * k - 1))), &BigInt::from(k + 1));
        }
        q
    }

    /// Upper bound on `sum_{n>N} y_n t^n`, or `None` when `t >= 1/4`.
    fn tail(&self, t: &BigInt) -> Option<BigInt> {
        let denom = self.tail_denominator(t)?;
        let numer = mul_ceil(&self.catalan_term(t), t, self.bits);
        Some(div_ceil(&(numer << self.bits), &denom))
    }

    /// Upper bound on `sum_{n>N} n y_n t^{n-1}`, or `None` when `t >= 1/4`.
    fn tail_deriv(&self, t: &BigInt) -> Option<BigInt> {
        let denom = self.tail_denominator(t)?;
        let numer = self.catalan_term(t) * BigInt::from(self.n_terms() + 1);
        Some(div_ceil(&(numer << self.bits), &denom))
    }

    /// Lower bound on `F(x) = x + y(x^2)/2 - 1/2`.
    fn f_lower(&self, x: &BigInt) -> BigInt {
        let t = mul_floor(x, x, self.bits);
        x + (self.poly(&t, false) >> 1u32) - (self.one() >> 1u32)
    }

    /// Upper bound on `F(x)`, or `None` when the tail bound is unavailable.
    fn f_upper(&self, x: &BigInt) -> Option<BigInt> {
        let t = mul_ceil(x, x, self.bits);
        let y = self.poly(&t, true) + self.tail(&t)?;
        Some(x + div_ceil(&y, &BigInt::from(2)) - (self.one() >> 1u32))
    }

    /// Enclosure of `y(x^2)` for `x` in `[x_lo, x_hi]`.
    fn y_of_square(&self, x_lo: &BigInt, x_hi: &BigInt) -> Option<(BigInt, BigInt)> {
        let t_lo = mul_floor(x_lo, x_lo, self.bits);
        let t_hi = mul_ceil(x_hi, x_hi, self.bits);
        let hi = self.poly(&t_hi, true) + self.tail(&t_hi)?;
        Some((self.poly(&t_lo, false), hi))
    }
}

fn bits_for(precision: f64) -> Result<u32> {
    if !(precision > 0.0 && precision.is_finite()) {
        return Err(Error::usage("precision must be a positive finite number"));
    }
    let needed = (-precision.log2()).ceil().max(0.0) as u32;
    Ok(needed.max(88) + 40)
}

/// Number of series terms whose Catalan tail at `rho^2` falls below
/// `precision / 8`, plus a few spare terms for the bisection slack.
pub fn terms_for_precision(precision: f64) -> usize {
    let t: f64 = 0.163;
    let target = (precision / 8.0).ln();
    let mut n = 8usize;
    loop {
        let nf = n as f64;
        // ln C_n ~ n ln 4 - 1.5 ln n - 0.5 ln pi
        let ln_tail = nf * 4f64.ln() - 1.5 * nf.ln() - 0.5 * PI.ln() + (nf + 1.0) * t.ln()
            - (1.0 - 4.0 * t).ln();
        if ln_tail < target {
            return n + 8;
        }
        n += 4;
    }
}

fn check_terms(n_terms: usize) -> Result<()> {
    if n_terms < 8 {
        return Err(Error::usage("need at least 8 series terms"));
    }
    Ok(())
}

fn rho_bracket(ycert: &CertifiedY) -> Result<(BigInt, BigInt)> {
    let bits = ycert.bits;
    let one = ycert.one();
    let quarter = &one >> 2u32;
    let half = &one >> 1u32;

    // Upper bound: F_lower(b) > 0 implies F(b) > 0, hence rho < b.
    // Lower bound: F_upper(c) < 0 implies F(c) < 0, hence rho > c.
    if !ycert.f_lower(&half).is_positive() {
        return Err(Error::invariant("F(1/2) is not positive"));
    }
    match ycert.f_upper(&quarter) {
        Some(v) if v.is_negative() => {}
        _ => return Err(Error::invariant("F(1/4) is not negative")),
    }

    let (mut a, mut b) = (quarter.clone(), half.clone());
    let (mut c, mut d) = (quarter, half);
    let step = |a: &mut BigInt, b: &mut BigInt, c: &mut BigInt, d: &mut BigInt| {
        let m: BigInt = (&*a + &*b) >> 1u32;
        if ycert.f_lower(&m).is_positive() {
            *b = m;
        } else {
            *a = m;
        }
        let m: BigInt = (&*c + &*d) >> 1u32;
        match ycert.f_upper(&m) {
            Some(v) if v.is_negative() => *c = m,
            _ => *d = m,
        }
    };
    for _ in 0..60 {
        step(&mut a, &mut b, &mut c, &mut d);
    }

    // Newton on the truncated F from the bracket midpoint, then certify a
    // tight enclosure around the result.
    let mut x: BigInt = (&c + &b) >> 1u32;
    for _ in 0..8 {
        let t = mul_floor(&x, &x, bits);
        let f = &x + (ycert.poly(&t, false) >> 1u32) - (&one >> 1u32);
        let fp = &one + mul_floor(&x, &ycert.poly_deriv(&t, false), bits);
        let dx = (f << bits) / fp;
        if dx.is_zero() {
            break;
        }
        x -= dx;
    }
    let delta = BigInt::one() << 24u32;
    let hi_try = &x + &delta;
    let lo_try = &x - &delta;
    if hi_try < b && ycert.f_lower(&hi_try).is_positive() {
        b = hi_try;
    }
    if lo_try > c && matches!(ycert.f_upper(&lo_try), Some(v) if v.is_negative()) {
        c = lo_try;
    }
    // Finish by bisection if Newton could not be certified (tail too large).
    for _ in 0..(bits as usize) {
        if &b - &c <= &delta << 1u32 {
            break;
        }
        step(&mut a, &mut b, &mut c, &mut d);
    }
    Ok((c, b))
}

/// `rho`, the root of `x + y(x^2)/2 = 1/2` in `[1/4, 1/2)`.
pub fn rho(n_terms: usize, precision: f64) -> Result<VerifiedConstant> {
    check_terms(n_terms)?;
    let bits = bits_for(precision)?;
    let ycert = CertifiedY::new(n_terms, bits)?;
    let (lo, hi) = rho_bracket(&ycert)?;
    let out = VerifiedConstant::new(lo, hi, bits);
    ensure_precision(&out, precision, n_terms)?;
    Ok(out)
}

fn ensure_precision(c: &VerifiedConstant, precision: f64, n_terms: usize) -> Result<()> {
    if c.abs_error() > precision {
        return Err(Error::PrecisionUnreachable {
            requested: precision,
            n_terms,
            required_terms: terms_for_precision(precision).max(n_terms + 1),
        });
    }
    Ok(())
}

/// `lambda = sqrt(2 rho + 2 rho^2 y'(rho^2))`.
pub fn lambda(n_terms: usize, precision: f64) -> Result<VerifiedConstant> {
    check_terms(n_terms)?;
    let bits = bits_for(precision / 64.0)?;
    let ycert = CertifiedY::new(n_terms, bits)?;
    let (r_lo, r_hi) = rho_bracket(&ycert)?;
    let sq_lo = mul_floor(&r_lo, &r_lo, bits);
    let sq_hi = mul_ceil(&r_hi, &r_hi, bits);
    let dy_lo = ycert.poly_deriv(&sq_lo, false);
    let tail = ycert
        .tail_deriv(&sq_hi)
        .ok_or_else(|| Error::invariant("rho^2 outside the tail-bound domain"))?;
    let dy_hi = ycert.poly_deriv(&sq_hi, true) + tail;
    let l2_lo = (&r_lo << 1u32) + (mul_floor(&sq_lo, &dy_lo, bits) << 1u32);
    let l2_hi = (&r_hi << 1u32) + (mul_ceil(&sq_hi, &dy_hi, bits) << 1u32);
    let out = VerifiedConstant::new(sqrt_floor(&l2_lo, bits), sqrt_ceil(&l2_hi, bits), bits);
    ensure_precision(&out, precision, n_terms)?;
    Ok(out)
}

/// `y(x) = 1 - sqrt(1 - 2x - y(x^2))` for `x` in `[x_lo, x_hi]`; values above
/// `rho` clamp the square root at zero.
fn y_enclosure(ycert: &CertifiedY, x_lo: &BigInt, x_hi: &BigInt) -> Result<(BigInt, BigInt)> {
    let one = ycert.one();
    let (ysq_lo, ysq_hi) = ycert
        .y_of_square(x_lo, x_hi)
        .ok_or_else(|| Error::usage("argument too large for the tail bound"))?;
    let arg_hi = &one - (x_lo << 1u32) - ysq_lo;
    let arg_lo = &one - (x_hi << 1u32) - ysq_hi;
    if arg_hi.is_negative() {
        return Err(Error::usage("argument lies beyond rho"));
    }
    let lo = &one - sqrt_ceil(&arg_hi, ycert.bits);
    let hi = if arg_lo.is_positive() { &one - sqrt_floor(&arg_lo, ycert.bits) } else { one };
    Ok((lo.max(BigInt::zero()), hi))
}

/// `y(x)` for `0 <= x <= rho`, certified.
pub fn eval_y(x: f64, n_terms: usize) -> Result<VerifiedConstant> {
    check_terms(n_terms)?;
    if !(x >= 0.0) {
        return Err(Error::usage(format!("eval_y needs x >= 0, got {x}")));
    }
    let rho = default_rho();
    if !rho.contains(x) && BigRational::from_float(x).unwrap() > rho.upper() {
        return Err(Error::usage(format!("eval_y needs x <= rho, got {x}")));
    }
    let bits = 160;
    let ycert = CertifiedY::new(n_terms, bits)?;
    let xl = from_f64_floor(x, bits);
    let xh = from_f64_ceil(x, bits);
    let (lo, hi) = y_enclosure(&ycert, &xl, &xh)?;
    Ok(VerifiedConstant::new(lo, hi, bits))
}

/// `y(rho)`, which equals 1; returned as an enclosure from the rho bracket.
pub fn eval_y_at_rho(n_terms: usize) -> Result<VerifiedConstant> {
    check_terms(n_terms)?;
    let bits = bits_for(1e-30)?;
    let ycert = CertifiedY::new(n_terms, bits)?;
    let (r_lo, r_hi) = rho_bracket(&ycert)?;
    let (lo, hi) = y_enclosure(&ycert, &r_lo, &r_hi)?;
    Ok(VerifiedConstant::new(lo, hi, bits))
}

struct Defaults {
    rho: VerifiedConstant,
    lambda: VerifiedConstant,
}

fn defaults() -> &'static Defaults {
    static CELL: OnceLock<Defaults> = OnceLock::new();
    CELL.get_or_init(|| Defaults {
        rho: rho(DEFAULT_TERMS, DEFAULT_PRECISION).expect("default rho"),
        lambda: lambda(DEFAULT_TERMS, DEFAULT_PRECISION).expect("default lambda"),
    })
}

/// `rho` to 30 digits, computed once per process.
pub fn default_rho() -> &'static VerifiedConstant {
    &defaults().rho
}

/// `lambda` to 30 digits, computed once per process.
pub fn default_lambda() -> &'static VerifiedConstant {
    &defaults().lambda
}

pub fn rho_f64() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| default_rho().value())
}

pub fn lambda_f64() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| default_lambda().value())
}

/// `ln` of `lambda / (2 sqrt(pi)) n^{-3/2} rho^{-n}`.
pub fn ln_yn_asym(n: usize) -> f64 {
    let n = n as f64;
    (lambda_f64() / (2.0 * PI.sqrt())).ln() - 1.5 * n.ln() - n * rho_f64().ln()
}

/// Leading-order estimate of `y_n`; infinite once it overflows `f64`, in
/// which case [`ln_yn_asym`] still applies.
pub fn yn_asym(n: usize) -> f64 {
    ln_yn_asym(n).exp()
}

/// `ln` of `lambda^3 / (4 sqrt(pi)) n^{-5/2} rho^{-n}`.
pub fn ln_un_asym(n: usize) -> f64 {
    let n = n as f64;
    (lambda_f64().powi(3) / (4.0 * PI.sqrt())).ln() - 2.5 * n.ln() - n * rho_f64().ln()
}

pub fn un_asym(n: usize) -> f64 {
    ln_un_asym(n).exp()
}

/// Floating-point evaluation of `y` and `y'` on `[0, rho]`.
///
/// Below `SERIES_CUTOFF` the truncated series is summed directly; above it
/// the functional equation `1 - y(x) = sqrt(1 - 2x - y(x^2))` is used, with
/// `y(x^2)` from the series. The same split gives `1 - y(x)` without
/// cancellation near `rho`.
#[derive(Clone, Debug)]
pub struct RealY {
    coeffs: Vec<f64>,
    rho: f64,
}

const SERIES_CUTOFF: f64 = 0.3;
const REAL_TERMS: usize = 400;

impl RealY {
    fn new() -> Self {
        let y = rooted_series(REAL_TERMS).expect("rooted series");
        let coeffs = y.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
        RealY { coeffs, rho: rho_f64() }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn series(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn series_deriv(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (n, c)| acc * x + n as f64 * c)
    }

    /// `1 - 2x - y(x^2)`, clamped at zero (it vanishes at `rho`, and from
    /// the nearest double to `rho` on it is taken to be zero).
    fn disc(&self, x: f64) -> f64 {
        if x >= self.rho {
            return 0.0;
        }
        (1.0 - 2.0 * x - self.series(x * x)).max(0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= SERIES_CUTOFF {
            self.series(x)
        } else {
            1.0 - self.disc(x).sqrt()
        }
    }

    /// `1 - y(x)`.
    pub fn complement(&self, x: f64) -> f64 {
        if x <= SERIES_CUTOFF {
            1.0 - self.series(x)
        } else {
            self.disc(x).sqrt()
        }
    }

    /// `y(x) - x`, accurate for small `x`.
    pub fn minus_identity(&self, x: f64) -> f64 {
        if x <= SERIES_CUTOFF {
            self.coeffs.iter().skip(2).rev().fold(0.0, |acc, c| acc * x + c) * x * x
        } else {
            self.value(x) - x
        }
    }

    /// `y'(x)`; infinite at `rho`.
    pub fn derivative(&self, x: f64) -> f64 {
        if x <= SERIES_CUTOFF {
            self.series_deriv(x)
        } else {
            (1.0 + x * self.series_deriv(x * x)) / self.disc(x).sqrt()
        }
    }
}

/// Shared [`RealY`] instance.
pub fn real_y() -> &'static RealY {
    static CELL: OnceLock<RealY> = OnceLock::new();
    CELL.get_or_init(RealY::new)
}
