//! Independent oracles for the otterlab test suites.
//!
//! Nothing here shares code with `otterlab-core`. Trees are generated as
//! explicit objects and deduplicated by canonical form, so every count
//! obtained from this crate is a count of actual structures rather than a
//! count produced by a generating-function recurrence.

pub mod quad;
pub mod rooted;
pub mod unrooted;

/// Value iteration for `y(x) = x + y(x)^2/2 + y(x^2)/2` on `0 <= x < rho`.
///
/// Starts from `y = 0` at every level of the squaring chain and iterates the
/// functional equation until the top value stops changing.
pub fn y_by_value_iteration(x: f64) -> f64 {
    assert!((0.0..0.4).contains(&x), "oracle only covers 0 <= x < 0.4");
    let mut points = vec![x];
    while *points.last().unwrap() > 1e-300 {
        let w = *points.last().unwrap();
        points.push(w * w);
    }
    let mut vals = vec![0.0f64; points.len()];
    let mut prev = f64::NAN;
    for _ in 0..100_000 {
        let mut next = vals.clone();
        for k in 0..points.len() {
            let deeper = if k + 1 < points.len() { vals[k + 1] } else { 0.0 };
            next[k] = points[k] + 0.5 * vals[k] * vals[k] + 0.5 * deeper;
        }
        vals = next;
        if vals[0] == prev {
            break;
        }
        prev = vals[0];
    }
    vals[0]
}

/// Central finite difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_iteration_small_argument() {
        // y(x) = x + x^2 + x^3 + 2x^4 + ...
        let x: f64 = 0.01;
        let expected = x + x * x + x.powi(3) + 2.0 * x.powi(4) + 3.0 * x.powi(5) + 6.0 * x.powi(6);
        assert!((y_by_value_iteration(x) - expected).abs() < 1e-12);
    }

    #[test]
    fn central_difference_of_cubic() {
        let d = central_difference(|x| x * x * x, 2.0, 1e-3);
        assert!((d - 12.0).abs() < 1e-5);
    }
}
