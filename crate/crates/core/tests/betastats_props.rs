use proptest::prelude::*;
use rand::Rng;
use spectra_theta_core::betastats::{
    binom_tail, equipoint, equipoint_bounds, equipoint_lower_sweep, median, median_bounds, ordering_sweep,
    phi_functions, real_simmons_report, BetaShape, EQUIPOINT_TOL, MEDIAN_TOL,
};
use spectra_theta_core::rng::stream_rng;
use spectra_theta_core::specfun::ibeta;

fn shape(s: f64, t: f64) -> BetaShape {
    BetaShape::new(s, t).unwrap()
}

fn binom_pmf_sum(p: f64, lo: u64, d: u64) -> f64 {
    let mut total = 0.0;
    for k in lo..=d {
        let mut c = 1.0;
        for i in 0..k {
            c *= (d - i) as f64 / (i + 1) as f64;
        }
        total += c * p.powi(k as i32) * (1.0 - p).powi((d - k) as i32);
    }
    total
}

#[test]
fn equipoint_table_for_ten() {
    let table = [0.111223, 0.208955, 0.306089, 0.403069, 0.5, 0.596931, 0.693911, 0.791045, 0.888777, 1.0];
    for (k, &want) in table.iter().enumerate() {
        let s = (k + 1) as f64;
        let e = equipoint(&shape(s, 10.0 - s)).unwrap();
        assert!((e - want).abs() < 1e-6, "s={s}: {e}");
    }
}

#[test]
fn equipoint_bound_examples() {
    assert_eq!(equipoint_bounds(&shape(1.0, 1.0)).unwrap(), (0.5, 0.5));
    assert_eq!(equipoint_bounds(&shape(5.0, 5.0)).unwrap(), (0.5, 0.5));
    let (lo, hi) = equipoint_bounds(&shape(8.0, 2.0)).unwrap();
    assert!((lo - 0.75).abs() < 1e-15 && (hi - 0.8).abs() < 1e-15);
    let e = equipoint(&shape(8.0, 2.0)).unwrap();
    assert!(lo <= e && e <= hi);
    assert_eq!(equipoint(&shape(1.0, 1.0)).unwrap(), 0.5);
}

#[test]
fn median_examples() {
    assert!((median(&shape(3.0, 2.0)).unwrap() - 0.614272).abs() < 5e-7);
    assert!((median(&shape(10.0, 7.0)).unwrap() - 0.591773).abs() < 5e-7);
    assert_eq!(median(&shape(2.7, 2.7)).unwrap(), 0.5);
    let (lo, hi) = median_bounds(&shape(3.0, 2.0)).unwrap();
    assert!((lo - 0.6).abs() < 1e-15 && (hi - 0.64).abs() < 1e-15);
    let (lo, hi) = median_bounds(&shape(10.0, 3.0)).unwrap();
    assert!((lo - 0.769231).abs() < 5e-7 && (hi - 0.810651).abs() < 5e-7);
    assert_eq!(median_bounds(&shape(4.0, 4.0)).unwrap(), (0.5, 0.5));
}

#[test]
fn phi_examples() {
    let (phi, _) = phi_functions(5.0, 10.0).unwrap();
    assert!((phi - ibeta(0.5, 5.0, 6.0).unwrap()).abs() < 1e-14);
    let (_, two) = phi_functions(2.0, 4.0).unwrap();
    let (_, three) = phi_functions(3.0, 4.0).unwrap();
    assert!((two - 0.6875).abs() < 1e-14);
    assert!(three >= two);
}

#[test]
fn integer_equipoint_is_binomial_equipoint() {
    for d in 2..=30u64 {
        for s in 1..d {
            let e = equipoint(&shape(s as f64, (d - s) as f64)).unwrap();
            let upper = binom_tail(e, s, d).unwrap();
            let lower = 1.0 - binom_tail(e, s + 1, d).unwrap();
            assert!((upper - lower).abs() < 1e-9, "s={s} d={d}");
        }
    }
}

#[test]
fn lower_bound_on_real_grid() {
    let v = equipoint_lower_sweep(100.0, 0.5).unwrap();
    assert!(v.is_empty(), "{:?}", &v[..v.len().min(5)]);
}

#[test]
fn ordering_chain_on_random_grid() {
    let mut rng = stream_rng(11, 0);
    let shapes: Vec<(f64, f64)> = (0..3000)
        .map(|_| {
            let s: f64 = rng.random_range(0.05..60.0);
            (s, rng.random_range(0.05..=s))
        })
        .collect();
    let v = ordering_sweep(&shapes).unwrap();
    assert!(v.is_empty(), "{:?}", &v[..v.len().min(5)]);
}

#[test]
fn real_simmons_report_runs() {
    // reported, not asserted
    let v = real_simmons_report(6.0, 0.25).unwrap();
    assert!(v.iter().all(|x| x.check == "real_simmons"));
}

proptest! {
    #[test]
    fn equipoint_residual(s in 0.05f64..150.0, t in 0.05f64..150.0) {
        let e = equipoint(&shape(s, t)).unwrap();
        let r = ibeta(e, s, t + 1.0).unwrap() + ibeta(e, s + 1.0, t).unwrap() - 1.0;
        prop_assert!(r.abs() <= EQUIPOINT_TOL);
    }

    #[test]
    fn median_residual(s in 0.05f64..150.0, t in 0.05f64..150.0) {
        let m = median(&shape(s, t)).unwrap();
        prop_assert!((ibeta(m, s, t).unwrap() - 0.5).abs() <= MEDIAN_TOL);
    }

    #[test]
    fn median_sandwich(s in 1.0f64..200.0, frac in 0.0f64..=1.0) {
        let t = 1.0 + frac * (s - 1.0);
        prop_assume!(s + t >= 3.0);
        let (lo, hi) = median_bounds(&shape(s, t)).unwrap();
        let m = median(&shape(s, t)).unwrap();
        prop_assert!(lo <= m + 1e-12 && m <= hi + 1e-12);
    }

    #[test]
    fn half_integer_equipoint_bounds(s2 in 1u32..400, t2 in 1u32..400) {
        let (s, t) = (f64::from(s2.max(t2)) / 2.0, f64::from(s2.min(t2)) / 2.0);
        let e = equipoint(&shape(s, t)).unwrap();
        let (lo, hi) = equipoint_bounds(&shape(s, t)).unwrap();
        prop_assert!(lo <= e + 1e-12 && e <= hi + 1e-12);
    }

    #[test]
    fn binomial_tail_matches_sum(p in 0.0f64..=1.0, d in 1u64..40, frac in 0.0f64..=1.0) {
        let s = (frac * d as f64).round() as u64;
        prop_assert!((binom_tail(p, s, d).unwrap() - binom_pmf_sum(p, s, d)).abs() <= 1e-10);
    }
}
