//! Monte-Carlo estimates of sphere averages, used as an independent check on the closed forms.
//!
//! Points ξ on S^{d−1} are normalized standard Gaussian vectors. All estimates are
//! deterministic in `(inputs, n, seed)` regardless of thread count (see [`crate::rng`]).

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use crate::error::domain;
use crate::linalg::check_symmetric;
use crate::rng::{normal_vector, sample_moments};
use crate::theta::SignDiag;
use crate::Result;

/// Default sample count for dimensions up to 8.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// A Monte-Carlo mean with its standard error (sample standard deviation / √n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// |value − target| in units of the standard error (∞ if the error is 0 and they differ).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err
        }
    }
}

/// Per-entry estimate of a matrix-valued sphere average.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEstimate {
    pub value: DMatrix<f64>,
    pub std_err: DMatrix<f64>,
    pub n_samples: u64,
    pub seed: u64,
}

fn check_samples(n: u64) -> Result<()> {
    if n == 0 {
        return Err(domain!("need at least one sample"));
    }
    Ok(())
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn quad_form(b: &DMatrix<f64>, g: &[f64]) -> f64 {
    let d = g.len();
    let mut acc = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += b[(i, j)] * g[j];
        }
        acc += g[i] * row;
    }
    acc
}

fn sphere_point(rng: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, f64) {
    let g = normal_vector(rng, d);
    let norm2 = g.iter().map(|x| x * x).sum::<f64>();
    (g.as_slice().to_vec(), norm2)
}

/// Estimate of ∫ |ξᵀBξ| dξ over the unit sphere.
pub fn sphere_abs_quadratic_integral(b: &DMatrix<f64>, n: u64, seed: u64) -> Result<McEstimate> {
    check_symmetric(b, "B")?;
    check_samples(n)?;
    let d = b.nrows();
    if d == 0 {
        return Err(domain!("B must be at least 1x1"));
    }
    let m = sample_moments(n, seed, 1, |rng, out| {
        let (g, norm2) = sphere_point(rng, d);
        out[0] = quad_form(b, &g).abs() / norm2;
    });
    Ok(McEstimate { value: m[0].mean, std_err: m[0].std_err(), n_samples: n, seed })
}

/// Estimate of ∫ sgn(ξᵀJξ) ξ_coord² dξ, with `coord` counted from 1.
///
/// Equals α for coord ≤ s and −β for coord > s.
pub fn sign_quadratic_moment(j: &SignDiag, coord: usize, n: u64, seed: u64) -> Result<McEstimate> {
    check_samples(n)?;
    let d = j.d() as usize;
    if coord == 0 || coord > d {
        return Err(domain!("coordinate {coord} outside 1..={d}"));
    }
    let diag = j.diagonal();
    let m = sample_moments(n, seed, 1, |rng, out| {
        let (g, norm2) = sphere_point(rng, d);
        let q: f64 = g.iter().zip(&diag).map(|(x, w)| w * x * x).sum();
        let c = g[coord - 1];
        out[0] = sign(q) * c * c / norm2;
    });
    Ok(McEstimate { value: m[0].mean, std_err: m[0].std_err(), n_samples: n, seed })
}

/// Estimate of E_B = ∫ sgn(ξᵀBξ) ξξᵀ dξ.
pub fn e_matrix(b: &DMatrix<f64>, n: u64, seed: u64) -> Result<MatrixEstimate> {
    check_symmetric(b, "B")?;
    check_samples(n)?;
    let d = b.nrows();
    if d == 0 {
        return Err(domain!("B must be at least 1x1"));
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |k| (i, k))).collect();
    let m = sample_moments(n, seed, pairs.len(), |rng, out| {
        let (g, norm2) = sphere_point(rng, d);
        let sg = sign(quad_form(b, &g)) / norm2;
        for (o, &(i, k)) in out.iter_mut().zip(&pairs) {
            *o = sg * g[i] * g[k];
        }
    });
    let mut value = DMatrix::zeros(d, d);
    let mut std_err = DMatrix::zeros(d, d);
    for (mm, &(i, k)) in m.iter().zip(&pairs) {
        value[(i, k)] = mm.mean;
        value[(k, i)] = mm.mean;
        std_err[(i, k)] = mm.std_err();
        std_err[(k, i)] = mm.std_err();
    }
    Ok(MatrixEstimate { value, std_err, n_samples: n, seed })
}

/// [`e_matrix`] for a sign-diagonal J.
pub fn e_j_matrix(j: &SignDiag, n: u64, seed: u64) -> Result<MatrixEstimate> {
    e_matrix(&j.to_matrix(), n, seed)
}

/// Diagonal of J(s,t;α,β), the exact value of E_J.
pub fn e_j_exact(j: &SignDiag) -> Result<DMatrix<f64>> {
    let (alpha, beta) = crate::theta::alpha_beta(j)?;
    let mut diag = vec![alpha; j.s() as usize];
    diag.extend(core::iter::repeat_n(-beta, j.t() as usize));
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}
