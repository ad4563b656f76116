use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use spectra_theta_core::dilation::{
    ball_membership, blockdiag_dilation, defect_sqrt, lambda_pair, oh_to_spin_choi, sigma3, spin2_dilation,
    spin2_extreme, spin_matrices, spin_row_norm, spin_tensor_norm, Ball,
};
use spectra_theta_core::linalg::{lambda_min, max_abs, sym_norm};
use spectra_theta_core::pencil::SymTuple;
use spectra_theta_core::rng::{gaussian_matrix, normal_vector, stream_rng};
use spectra_theta_core::ErrorKind;

fn pauli() -> (DMatrix<f64>, DMatrix<f64>) {
    (DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))
}

fn random_tuple(seed: u64, g: usize, n: usize) -> SymTuple {
    let mut rng = stream_rng(seed, 0);
    SymTuple::new(
        (0..g)
            .map(|_| {
                let m = gaussian_matrix(&mut rng, n, n);
                (&m + m.transpose()) * 0.5
            })
            .collect(),
    )
    .unwrap()
}

/// Scales a pair onto the boundary of the spin ball.
fn spin_boundary_pair(seed: u64, n: usize) -> SymTuple {
    let x = random_tuple(seed, 2, n);
    let norm = sym_norm(&lambda_pair(&x).unwrap()).unwrap();
    x.scaled(1.0 / norm)
}

#[test]
fn spin_linear_combinations_square_to_scalars() {
    for g in 2..=7 {
        let spin = spin_matrices(g).unwrap();
        assert!(spin.satisfies_car());
        let dense: Vec<DMatrix<f64>> = spin.mats().iter().map(|p| p.to_dense()).collect();
        let mut rng = stream_rng(g as u64, 0);
        let x: DVector<f64> = normal_vector(&mut rng, g);
        let n = spin.size();
        let m = dense.iter().zip(x.iter()).fold(DMatrix::zeros(n, n), |acc, (p, c)| acc + p * *c);
        let want = DMatrix::identity(n, n) * x.norm_squared();
        assert!(max_abs(&(&m * &m - want)) < 1e-12, "g={g}");
    }
}

#[test]
fn spin_norms() {
    for g in 2..=6 {
        assert!((spin_tensor_norm(g).unwrap() - g as f64).abs() < 1e-10);
        assert!((spin_row_norm(g).unwrap() - (g as f64).sqrt()).abs() < 1e-10);
    }
    assert_eq!(spin_matrices(1).unwrap_err().kind(), ErrorKind::Domain);
    assert_eq!(spin_matrices(15).unwrap_err().kind(), ErrorKind::Resource);
}

#[test]
fn spin_tuple_sits_only_in_the_min_ball() {
    let p = spin_matrices(3).unwrap().to_tuple().unwrap();
    assert!(ball_membership(&p, Ball::MinSampled, 1e-9, 8, 1).unwrap().inside);
    assert!(!ball_membership(&p, Ball::Oh, 1e-9, 0, 0).unwrap().inside);
    assert!(!ball_membership(&p, Ball::Spin, 1e-9, 0, 0).unwrap().inside);
}

#[test]
fn trivial_tuples_are_in_every_ball() {
    let zero = SymTuple::zeros(3, 2).unwrap();
    let unit = SymTuple::new(vec![
        DMatrix::from_element(1, 1, 0.6),
        DMatrix::from_element(1, 1, 0.0),
        DMatrix::from_element(1, 1, -0.8),
    ])
    .unwrap();
    for x in [&zero, &unit] {
        for ball in [Ball::Oh, Ball::Spin, Ball::MinSampled] {
            assert!(ball_membership(x, ball, 1e-9, 4, 2).unwrap().inside, "{ball:?}");
        }
    }
    let m = ball_membership(&unit, Ball::MinSampled, 0.0, 0, 0).unwrap();
    assert!(m.sampled && (m.value - 1.0).abs() < 1e-12);
}

#[test]
fn ball_names_parse() {
    assert_eq!("oh".parse::<Ball>().unwrap(), Ball::Oh);
    assert_eq!("min-sampled".parse::<Ball>().unwrap(), Ball::MinSampled);
    assert!("cube".parse::<Ball>().is_err());
}

#[test]
fn blockdiag_is_exact() {
    let x = random_tuple(3, 4, 3);
    let r = blockdiag_dilation(&x).unwrap();
    assert_eq!(r.scale, 0.25);
    let res = r.residuals(&x).unwrap();
    assert!(res.isometry < 1e-14 && res.commutator == 0.0 && res.reconstruction < 1e-14);
}

#[test]
fn defect_of_pair_has_rotation_block_form() {
    let x = spin_boundary_pair(5, 3).scaled(0.9);
    let s = lambda_pair(&x).unwrap();
    let d = defect_sqrt(&s).unwrap();
    let n = 3;
    assert!(max_abs(&(&d * &d + &s * &s - DMatrix::identity(2 * n, 2 * n))) < 1e-12);
    assert!(max_abs(&(&d * &s - &s * &d)) < 1e-12);
    let d11 = d.view((0, 0), (n, n));
    let d22 = d.view((n, n), (n, n));
    let e = d.view((0, n), (n, n)).into_owned();
    let f = d.view((n, 0), (n, n)).into_owned();
    assert!(max_abs(&(d11 - d22)) < 1e-12);
    assert!(max_abs(&(&e + &f)) < 1e-12);
    assert!(max_abs(&(&e + e.transpose())) < 1e-12);
    let big = DMatrix::from_diagonal_element(2, 2, 1.5);
    assert_eq!(defect_sqrt(&big).unwrap_err().kind(), ErrorKind::Domain);
}

#[test]
fn rotation_pairs_are_extreme() {
    for phi in [0.0, 0.4, 1.3, 2.9] {
        let x = SymTuple::new(vec![
            DMatrix::from_diagonal_element(2, 2, f64::cos(phi)),
            DMatrix::from_diagonal_element(2, 2, f64::sin(phi)),
        ])
        .unwrap();
        assert!(spin2_extreme(&x, 1e-12).unwrap());
        let r = spin2_dilation(&x).unwrap();
        let res = r.residuals(&x).unwrap();
        assert!(res.isometry < 1e-14 && res.commutator < 1e-12 && res.reconstruction < 1e-14);
    }
}

#[test]
fn anticommuting_pair() {
    let (a, b) = pauli();
    let outside = SymTuple::new(vec![&a / 2f64.sqrt(), &b / 2f64.sqrt()]).unwrap();
    assert_eq!(spin2_dilation(&outside).unwrap_err().kind(), ErrorKind::Domain);
    let x = SymTuple::new(vec![&a / 2.0, &b / 2.0]).unwrap();
    assert!(ball_membership(&x, Ball::Spin, 1e-12, 0, 0).unwrap().inside);
    assert!(!spin2_extreme(&x, 1e-9).unwrap());
    let res = spin2_dilation(&x).unwrap().residuals(&x).unwrap();
    assert!(res.isometry < 1e-14 && res.commutator < 1e-12 && res.reconstruction < 1e-14);
}

#[test]
fn choi_matrix_is_positive() {
    for g in 2..=5 {
        let c = oh_to_spin_choi(g).unwrap();
        let low = lambda_min(&c).unwrap();
        assert!(low >= -1e-12, "g={g}: {low}");
        if g == 2 {
            assert!(low.abs() < 1e-12);
        }
    }
    assert_eq!(oh_to_spin_choi(9).unwrap_err().kind(), ErrorKind::Resource);
}

#[test]
fn sign_flip_symmetry_of_spin_ball() {
    let s3 = sigma3();
    let (a, b) = pauli();
    for p in [&a, &b] {
        assert!(max_abs(&(&s3 * p * s3.transpose() + p)) == 0.0);
    }
    for seed in 0..10 {
        let x = random_tuple(seed, 2, 3).scaled(0.3);
        let plus = ball_membership(&x, Ball::Spin, 0.0, 0, 0).unwrap().value;
        let minus = ball_membership(&x.scaled(-1.0), Ball::Spin, 0.0, 0, 0).unwrap().value;
        assert!((plus - minus).abs() < 1e-12);
    }
}

#[test]
fn spin_membership_implies_min_membership() {
    for seed in 0..40 {
        let g = 2 + (seed % 3) as usize;
        let x = random_tuple(seed, g, 3).scaled(0.25);
        let spin = ball_membership(&x, Ball::Spin, 1e-9, 0, 0).unwrap();
        if spin.inside {
            assert!(ball_membership(&x, Ball::MinSampled, 1e-9, 16, seed).unwrap().inside, "seed={seed}");
        }
    }
}

proptest! {
    #[test]
    fn spin2_dilation_invariants(seed in 0u64..10_000, n in 1usize..5, shrink in 0.0f64..=1.0) {
        let x = spin_boundary_pair(seed, n).scaled(shrink);
        let r = spin2_dilation(&x).unwrap();
        let res = r.residuals(&x).unwrap();
        prop_assert!(res.isometry <= 1e-12);
        prop_assert!(res.commutator <= 1e-9);
        prop_assert!(res.reconstruction <= 1e-12);
        for t in r.t.mats() {
            prop_assert!(sym_norm(t).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn blockdiag_invariants(seed in 0u64..10_000, g in 1usize..5, n in 1usize..4) {
        let x = random_tuple(seed, g, n);
        let res = blockdiag_dilation(&x).unwrap().residuals(&x).unwrap();
        prop_assert!(res.isometry <= 1e-14 && res.commutator == 0.0 && res.reconstruction <= 1e-13);
    }
}
