use num_bigint::BigInt;
use otterlab_core::constants::{default_rho, ln_yn_asym};
use otterlab_core::numeric::{ln_bigint, rational_to_f64};
use otterlab_core::trees::{height_ladder, rooted_series, DiameterTable};
use proptest::prelude::*;

#[test]
fn conservation_up_to_200() {
    let n_max = 200;
    let ladder = height_ladder(n_max, n_max).unwrap();
    let table = DiameterTable::new(&ladder).unwrap();
    for n in 2..=n_max {
        let by_d: BigInt = table.all_series().iter().map(|s| s.coeff(n).clone()).sum();
        assert_eq!(&by_d, table.unrooted().coeff(n), "unrooted n = {n}");
        let by_h: BigInt = (0..n).map(|h| ladder.exact_height(h).unwrap().coeff(n).clone()).sum();
        assert_eq!(&by_h, ladder.total().coeff(n), "rooted n = {n}");
    }
}

#[test]
fn refined_counting_bound() {
    let y = rooted_series(2000).unwrap();
    let ln_rho_hi = rational_to_f64(&default_rho().upper()).ln();
    for n in 1..=2000usize {
        let nf = n as f64;
        let lhs = ln_bigint(y.coeff(n)) + 1.5 * nf.ln() + nf * ln_rho_hi;
        assert!(lhs < 0.5f64.ln() - 1e-6, "n = {n}: {lhs}");
    }
}

#[test]
fn otter_ratio_in_log_space() {
    let y = rooted_series(2000).unwrap();
    for n in [100usize, 500, 1000, 2000] {
        let ratio = (ln_yn_asym(n) - ln_bigint(y.coeff(n))).exp();
        assert!(n as f64 * (ratio - 1.0).abs() <= 5.0, "n = {n}: {ratio}");
    }
}

#[test]
fn ladder_stabilises_at_n_minus_one() {
    let ladder = height_ladder(40, 40).unwrap();
    for n in 2..=40 {
        assert_eq!(ladder.level(n - 1).unwrap().coeff(n), ladder.total().coeff(n));
        assert!(ladder.level(n - 2).unwrap().coeff(n) < ladder.total().coeff(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ladder_is_monotone(n_max in 2usize..60, h_frac in 0.0f64..1.0) {
        let h_max = ((n_max as f64) * h_frac) as usize;
        let ladder = height_ladder(n_max, h_max).unwrap();
        prop_assert!(ladder.is_monotone());
        for h in 0..=h_max.min(n_max - 1) {
            let g = ladder.exact_height(h).unwrap();
            prop_assert!(g.is_nonnegative());
        }
    }

    #[test]
    fn height_pmf_sums_to_one(n in 2usize..80) {
        let ladder = height_ladder(n, n).unwrap();
        let pmf = otterlab_core::trees::height_pmf(&ladder, n).unwrap();
        let total: num_rational::BigRational = pmf.masses().iter().cloned().sum();
        prop_assert_eq!(total, num_rational::BigRational::from_integer(1.into()));
        // support lies between the balanced height and the caterpillar
        prop_assert!(*pmf.support().last().unwrap() == n - 1);
        prop_assert!(pmf.support()[0] as f64 >= (n as f64).log2().ceil());
    }

    #[test]
    fn diameter_pmf_sums_to_one(n in 3usize..60) {
        let ladder = height_ladder(n, n).unwrap();
        let table = DiameterTable::new(&ladder).unwrap();
        let pmf = table.pmf(n).unwrap();
        let total: num_rational::BigRational = pmf.masses().iter().cloned().sum();
        prop_assert_eq!(total, num_rational::BigRational::from_integer(1.into()));
        prop_assert_eq!(*pmf.support().last().unwrap(), n - 1);
    }
}
