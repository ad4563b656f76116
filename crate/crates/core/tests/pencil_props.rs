use nalgebra::DMatrix;
use proptest::prelude::*;
use spectra_theta_core::linalg::{lambda_min, sym_norm};
use spectra_theta_core::pencil::{
    cube_pencil, cube_relaxation_test, cube_vertex_margin, evaluate, haar_orthogonal, in_free_spectrahedron,
    membership_margin, random_contractions, sharpness_witness, MonicPencil, SymTuple, MEMBERSHIP_TOL,
};
use spectra_theta_core::rng::stream_rng;
use spectra_theta_core::theta::theta;
use spectra_theta_core::ErrorKind;

fn sym_from(seed: u64, n: usize) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, 0);
    let g = spectra_theta_core::rng::gaussian_matrix(&mut rng, n, n);
    (&g + g.transpose()) * 0.5
}

fn random_pencil(seed: u64, g: usize, nu: usize) -> MonicPencil {
    MonicPencil::new((0..g).map(|j| sym_from(seed * 31 + j as u64, nu) * 0.3).collect()).unwrap()
}

#[test]
fn evaluate_matches_entrywise_construction() {
    let l = random_pencil(1, 3, 2);
    let x = SymTuple::new((0..3).map(|j| sym_from(100 + j, 3)).collect()).unwrap();
    let m = evaluate(&l, &x).unwrap();
    let (nu, n) = (2, 3);
    for r in 0..nu * n {
        for c in 0..nu * n {
            let (ra, rx, ca, cx) = (r / n, r % n, c / n, c % n);
            let mut want = if r == c { 1.0 } else { 0.0 };
            for j in 0..3 {
                want -= l.coeffs()[j][(ra, ca)] * x.mats()[j][(rx, cx)];
            }
            assert!((m[(r, c)] - want).abs() < 1e-14);
        }
    }
}

#[test]
fn contractions_lie_in_cube_spectrahedron() {
    let l = cube_pencil(3).unwrap();
    let mut rng = stream_rng(4, 0);
    for _ in 0..20 {
        let x = random_contractions(&mut rng, 3, 4).unwrap();
        for m in x.mats() {
            assert!(sym_norm(m).unwrap() <= 1.0 + 1e-12);
        }
        assert!(in_free_spectrahedron(&l, &x, MEMBERSHIP_TOL).unwrap());
    }
    let mut outside = SymTuple::zeros(3, 2).unwrap().into_mats();
    outside[1] = DMatrix::from_diagonal_element(2, 2, 1.0 + 1e-6);
    let x = SymTuple::new(outside).unwrap();
    assert!(!in_free_spectrahedron(&l, &x, 1e-9).unwrap());
    assert!(in_free_spectrahedron(&l, &x, 1e-5).unwrap());
}

#[test]
fn haar_columns_have_zero_mean() {
    let d = 4;
    let n = 2000;
    let mut sum = DMatrix::<f64>::zeros(d, d);
    for seed in 0..n {
        let q = haar_orthogonal(d, seed).unwrap();
        assert!((q.transpose() * &q - DMatrix::identity(d, d)).abs().max() < 1e-12);
        sum += q;
    }
    // each entry has variance 1/d
    let se = (1.0 / d as f64 / n as f64).sqrt();
    assert!((sum / n as f64).abs().max() < 4.0 * se);
}

#[test]
fn cube_relaxation_on_cube_itself() {
    for g in [1usize, 2, 3] {
        let l = cube_pencil(g).unwrap();
        let r = cube_relaxation_test(&l, 3, 40, 9).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.tightest_scale >= 1.0 - 1e-12);
        assert_eq!(r.theta, theta(2 * g as u32).unwrap().theta);
    }
    let scalar = MonicPencil::new(vec![DMatrix::from_element(1, 1, 1.0)]).unwrap();
    let r = cube_relaxation_test(&scalar, 4, 30, 2).unwrap();
    assert_eq!(r.theta, 1.0);
    assert!(r.tightest_scale >= 1.0 - 1e-12);
}

#[test]
fn relaxation_rejects_pencils_missing_the_cube() {
    let l = MonicPencil::new(vec![DMatrix::from_element(1, 1, 2.0)]).unwrap();
    assert_eq!(cube_relaxation_test(&l, 2, 5, 0).unwrap_err().kind(), ErrorKind::Domain);
    let wide = cube_pencil(21).unwrap();
    assert_eq!(cube_vertex_margin(&wide).unwrap_err().kind(), ErrorKind::Resource);
}

#[test]
fn witness_with_one_cell_is_trivial() {
    let w = sharpness_witness(2, 1, 4000, 5).unwrap();
    assert!(w.lambda_max.abs() < 0.1, "{}", w.lambda_max);
}

#[test]
fn witness_approaches_theta_for_two() {
    let w = sharpness_witness(2, 64, 200, 5).unwrap();
    assert!((w.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!(w.lambda_max >= 0.9 * w.theta, "{} vs {}", w.lambda_max, w.theta);
    assert!(w.lambda_max <= w.theta + 1e-9);
}

#[test]
fn witness_structure() {
    let d = 3;
    let w = sharpness_witness(d, 16, 64, 8).unwrap();
    for x in w.tuple.mats() {
        assert!((sym_norm(x).unwrap() - 1.0).abs() < 1e-12);
    }
    // Σ A_j is the Haar average of UᵀĴU over κ*, a multiple of I
    let mut total = DMatrix::<f64>::zeros(d, d);
    for a in w.pencil.coeffs() {
        total += a;
    }
    let off = total.clone() - DMatrix::from_diagonal_element(d, d, total.trace() / d as f64);
    assert!(off.abs().max() < 0.2);
}

proptest! {
    #[test]
    fn compression_by_isometry_keeps_margin(seed in 0u64..1000, k in 1usize..4) {
        let l = random_pencil(seed, 2, 3);
        let x = SymTuple::new(vec![sym_from(seed + 7, 4) * 0.4, sym_from(seed + 8, 4) * 0.4]).unwrap();
        let q = haar_orthogonal(4, seed).unwrap();
        let w = q.columns(0, k).into_owned();
        let before = membership_margin(&l, &x).unwrap();
        let after = membership_margin(&l, &x.compress(&w).unwrap()).unwrap();
        prop_assert!(after >= before - 1e-10);
    }

    #[test]
    fn direct_sum_margin_is_minimum(seed in 0u64..1000) {
        let l = random_pencil(seed, 2, 2);
        let x = SymTuple::new(vec![sym_from(seed + 1, 2), sym_from(seed + 2, 2)]).unwrap();
        let y = SymTuple::new(vec![sym_from(seed + 3, 3), sym_from(seed + 4, 3)]).unwrap();
        let both = membership_margin(&l, &x.direct_sum(&y).unwrap()).unwrap();
        let want = membership_margin(&l, &x).unwrap().min(membership_margin(&l, &y).unwrap());
        prop_assert!((both - want).abs() <= 1e-10);
    }

    #[test]
    fn shrinking_toward_zero_stays_inside(seed in 0u64..1000, c in 0.0f64..=1.0) {
        let l = cube_pencil(2).unwrap();
        let mut rng = stream_rng(seed, 3);
        let x = random_contractions(&mut rng, 2, 3).unwrap();
        let m = membership_margin(&l, &x.scaled(c)).unwrap();
        prop_assert!(m >= -1e-12);
        prop_assert!(m >= lambda_min(&evaluate(&l, &x).unwrap()).unwrap() - 1e-12);
    }
}
