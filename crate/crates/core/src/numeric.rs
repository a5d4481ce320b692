//! Small numeric helpers shared across modules.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Natural logarithm of a positive big integer, accurate to `f64` precision
/// even when the integer itself overflows `f64`.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "ln_bigint needs a positive argument");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * LN_2
}

/// `ln(p/q)` for a positive rational.
pub fn ln_rational(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Converts a rational to `f64` without overflowing on huge numerators and
/// denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let top = |x: &BigInt| -> (f64, i64) {
        let shift = x.bits().saturating_sub(900);
        let head: BigInt = x >> shift;
        (head.to_f64().unwrap(), shift as i64)
    };
    let (p, sp) = top(r.numer());
    let (q, sq) = top(r.denom());
    let exp = sp - sq;
    let mut v = p / q;
    // Apply the binary exponent in steps that cannot overflow an i32.
    let mut e = exp;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    v
}

/// Riemann zeta at an integer `s >= 2`, by Euler-Maclaurin summation.
pub fn zeta_int(s: u32) -> f64 {
    assert!(s >= 2, "zeta_int needs s >= 2");
    let s_f = f64::from(s);
    let n = 12u32;
    let mut sum: f64 = (1..n).map(|k| f64::from(k).powf(-s_f)).sum();
    let nf = f64::from(n);
    sum += nf.powf(1.0 - s_f) / (s_f - 1.0) + 0.5 * nf.powf(-s_f);
    // Bernoulli corrections B_{2j}/(2j)! * s(s+1)...(s+2j-2) * n^{-s-2j+1}.
    const B: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut rising = s_f;
    let mut fact = 2.0;
    for (j, b) in B.iter().enumerate() {
        let j = j as f64 + 1.0;
        sum += b / fact * rising * nf.powf(-s_f - 2.0 * j + 1.0);
        rising *= (s_f + 2.0 * j - 1.0) * (s_f + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    sum
}

/// `Gamma(r/2)` for a positive integer `r`, from the closed forms at integers
/// and half-integers.
pub fn gamma_half(r: u32) -> f64 {
    assert!(r >= 1, "gamma_half needs r >= 1");
    if r % 2 == 0 {
        (1..r / 2).map(f64::from).product()
    } else {
        // Gamma(k + 1/2) = sqrt(pi) * prod_{j=1}^{k} (j - 1/2)
        let k = (r - 1) / 2;
        PI.sqrt() * (1..=k).map(|j| f64::from(j) - 0.5).product::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        assert!((zeta_int(2) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta_int(4) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta_int(3) - 1.202_056_903_159_594_2).abs() < 1e-15);
        assert!((zeta_int(6) - PI.powi(6) / 945.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half(8), 6.0);
    }

    #[test]
    fn ln_of_huge_integer() {
        let x = BigInt::from(3u32).pow(2000);
        assert!((ln_bigint(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rational_conversion_of_huge_parts() {
        let p = BigInt::from(7u32).pow(900);
        let q = BigInt::from(7u32).pow(899) * BigInt::from(2u32);
        assert!((rational_to_f64(&BigRational::new(p, q)) - 3.5).abs() < 1e-9);
    }
}
