//! Monic linear pencils L_A(X) = I − Σ A_j ⊗ X_j and their free spectrahedra.
//!
//! Also the matrix-cube pencil, a randomized check of the cube relaxation bound
//! 𝔅^(g) ⊆ ϑ(ν)·𝒟_{L_B}, and the near-extremal witness showing ϑ(d) cannot be lowered.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::domain;
use crate::linalg::{check_symmetric, kron, lambda_max, lambda_min};
use crate::rng::{haar_orthogonal_with, stream_rng};
use crate::theta::{kappa_star, theta, SignDiag};
use crate::{par, Error, Result};

/// Default tolerance on λ_min for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Largest g for which the cube inclusion is checked by enumerating all 2^g vertices.
pub const CUBE_VERTEX_CAP: usize = 20;

/// An ordered g-tuple of symmetric n×n matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTuple {
    mats: Vec<DMatrix<f64>>,
    n: usize,
}

fn check_family(mats: &[DMatrix<f64>], what: &str) -> Result<usize> {
    let Some(first) = mats.first() else {
        return Err(domain!("{what} needs at least one matrix"));
    };
    let n = first.nrows();
    if n == 0 {
        return Err(domain!("{what} matrices must be at least 1x1"));
    }
    for (j, m) in mats.iter().enumerate() {
        if m.shape() != (n, n) {
            return Err(domain!("{what} matrix {j} is {:?}, expected {n}x{n}", m.shape()));
        }
        check_symmetric(m, what)?;
    }
    Ok(n)
}

impl SymTuple {
    pub fn new(mats: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = check_family(&mats, "tuple")?;
        Ok(Self { mats, n })
    }

    pub fn zeros(g: usize, n: usize) -> Result<Self> {
        Self::new((0..g).map(|_| DMatrix::zeros(n, n)).collect())
    }

    pub fn g(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mats(&self) -> &[DMatrix<f64>] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<DMatrix<f64>> {
        self.mats
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { mats: self.mats.iter().map(|m| m * c).collect(), n: self.n }
    }

    /// X ⊕ Y, entrywise block diagonal.
    pub fn direct_sum(&self, other: &SymTuple) -> Result<Self> {
        if self.g() != other.g() {
            return Err(domain!("direct sum of tuples with g={} and g={}", self.g(), other.g()));
        }
        let n = self.n + other.n;
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| {
                let mut m = DMatrix::zeros(n, n);
                m.view_mut((0, 0), (self.n, self.n)).copy_from(a);
                m.view_mut((self.n, self.n), (other.n, other.n)).copy_from(b);
                m
            })
            .collect();
        Ok(Self { mats, n })
    }

    /// (WᵀX_jW)_j for an n×k matrix W.
    pub fn compress(&self, w: &DMatrix<f64>) -> Result<Self> {
        if w.nrows() != self.n {
            return Err(domain!("compression has {} rows, tuple size is {}", w.nrows(), self.n));
        }
        let mats = self.mats.iter().map(|m| crate::linalg::symmetrize(&(w.transpose() * m * w))).collect();
        Self::new(mats)
    }
}

/// A monic pencil with symmetric ν×ν coefficients A_1, …, A_g.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPencil {
    coeffs: Vec<DMatrix<f64>>,
    nu: usize,
}

impl MonicPencil {
    pub fn new(coeffs: Vec<DMatrix<f64>>) -> Result<Self> {
        let nu = check_family(&coeffs, "pencil")?;
        Ok(Self { coeffs, nu })
    }

    pub fn g(&self) -> usize {
        self.coeffs.len()
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    /// L(x) = I − Σ x_j A_j at a scalar point.
    pub fn eval_scalar(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.g() {
            return Err(domain!("point has {} coordinates, pencil has g={}", x.len(), self.g()));
        }
        let mut m = DMatrix::identity(self.nu, self.nu);
        for (a, &xj) in self.coeffs.iter().zip(x) {
            m -= a * xj;
        }
        Ok(m)
    }
}

/// Σ A_j ⊗ X_j.
pub fn tensor_sum(l: &MonicPencil, x: &SymTuple) -> Result<DMatrix<f64>> {
    if l.g() != x.g() {
        return Err(domain!("pencil has g={} but tuple has g={}", l.g(), x.g()));
    }
    let size = l.nu() * x.n();
    let mut m = DMatrix::zeros(size, size);
    for (a, xj) in l.coeffs.iter().zip(&x.mats) {
        m += kron(a, xj);
    }
    Ok(m)
}

/// L_A(X) = I − Σ A_j ⊗ X_j.
pub fn evaluate(l: &MonicPencil, x: &SymTuple) -> Result<DMatrix<f64>> {
    let s = tensor_sum(l, x)?;
    Ok(DMatrix::identity(s.nrows(), s.ncols()) - s)
}

/// λ_min(L_A(X)).
pub fn membership_margin(l: &MonicPencil, x: &SymTuple) -> Result<f64> {
    lambda_min(&evaluate(l, x)?)
}

/// Whether λ_min(L_A(X)) ≥ −tol.
pub fn in_free_spectrahedron(l: &MonicPencil, x: &SymTuple, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(domain!("tolerance must be >= 0, got {tol}"));
    }
    Ok(membership_margin(l, x)? >= -tol)
}

/// The cube pencil with C_j = diag(1, −1) ⊗ E_jj, whose spectrahedron is [−1, 1]^g.
pub fn cube_pencil(g: usize) -> Result<MonicPencil> {
    if g == 0 {
        return Err(domain!("cube pencil needs g >= 1"));
    }
    let nu = 2 * g;
    let coeffs = (0..g)
        .map(|j| {
            let mut c = DMatrix::zeros(nu, nu);
            c[(j, j)] = 1.0;
            c[(g + j, g + j)] = -1.0;
            c
        })
        .collect();
    MonicPencil::new(coeffs)
}

/// Smallest λ_min(L_B(v)) over the 2^g vertices v of [−1, 1]^g.
pub fn cube_vertex_margin(b: &MonicPencil) -> Result<f64> {
    let g = b.g();
    if g > CUBE_VERTEX_CAP {
        return Err(Error::Resource(alloc::format!(
            "cube vertex enumeration is capped at g = {CUBE_VERTEX_CAP}, got {g}"
        )));
    }
    let margins = par::map_indexed(1usize << g, |mask| {
        let v: Vec<f64> = (0..g).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
        lambda_min(&b.eval_scalar(&v)?)
    });
    let mut worst = f64::INFINITY;
    for m in margins {
        worst = worst.min(m?);
    }
    Ok(worst)
}

/// Outcome of [`cube_relaxation_test`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationReport {
    pub trials: usize,
    /// Trials with λ_min(L_B(X/ϑ(ν))) < −tol.
    pub violations: usize,
    /// ϑ(ν) for the pencil's coefficient size.
    pub theta: f64,
    /// Smallest λ_min(L_B(X/ϑ(ν))) over the trials.
    pub worst_margin: f64,
    /// Smallest c over the trials such that cX ∈ 𝒟_{L_B}; at least 1/ϑ(ν) by the bound.
    pub tightest_scale: f64,
}

/// A random tuple of g symmetric d×d contractions, each QᵀDQ with Q Haar and D uniform
/// diagonal in [−1, 1].
pub fn random_contractions<R: Rng + ?Sized>(rng: &mut R, g: usize, d: usize) -> Result<SymTuple> {
    let mats = (0..g)
        .map(|_| {
            let q = haar_orthogonal_with(rng, d);
            let diag = nalgebra::DVector::from_fn(d, |_, _| rng.random_range(-1.0..=1.0));
            crate::linalg::symmetrize(&(q.transpose() * DMatrix::from_diagonal(&diag) * q))
        })
        .collect();
    SymTuple::new(mats)
}

/// Draws `trials` tuples X of d×d contractions and checks X/ϑ(ν) ∈ 𝒟_{L_B} at tolerance
/// [`MEMBERSHIP_TOL`].
///
/// B must contain the cube, [−1,1]^g ⊆ 𝒮_{L_B}, which is verified on all vertices first
/// (domain error otherwise, resource error beyond [`CUBE_VERTEX_CAP`]).
pub fn cube_relaxation_test(b: &MonicPencil, d: usize, trials: usize, seed: u64) -> Result<RelaxationReport> {
    if d == 0 {
        return Err(domain!("contraction size must be >= 1"));
    }
    let vertex = cube_vertex_margin(b)?;
    if vertex < -MEMBERSHIP_TOL {
        return Err(domain!("pencil does not contain the cube: vertex margin {vertex:e}"));
    }
    let theta = theta(b.nu() as u32)?.theta;
    let per_trial = par::map_indexed(trials, |i| -> Result<(f64, f64)> {
        let mut rng = stream_rng(seed, i as u64);
        let x = random_contractions(&mut rng, b.g(), d)?;
        let s = tensor_sum(b, &x)?;
        let top = lambda_max(&s)?;
        let margin = lambda_min(&(DMatrix::identity(s.nrows(), s.ncols()) - s / theta))?;
        let scale = if top > 0.0 { 1.0 / top } else { f64::INFINITY };
        Ok((margin, scale))
    });
    let mut report =
        RelaxationReport { trials, violations: 0, theta, worst_margin: f64::INFINITY, tightest_scale: f64::INFINITY };
    for r in per_trial {
        let (margin, scale) = r?;
        if margin < -MEMBERSHIP_TOL {
            report.violations += 1;
        }
        report.worst_margin = report.worst_margin.min(margin);
        report.tightest_scale = report.tightest_scale.min(scale);
    }
    Ok(report)
}

/// A Haar-distributed d×d orthogonal matrix.
pub fn haar_orthogonal(d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(domain!("dimension must be >= 1"));
    }
    Ok(haar_orthogonal_with(&mut stream_rng(seed, 0), d))
}

/// Pencil, tuple and λ_max(Σ A_j ⊗ X_j) from [`sharpness_witness`].
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessWitness {
    pub pencil: MonicPencil,
    pub tuple: SymTuple,
    pub lambda_max: f64,
    pub theta: f64,
}

/// A finite pencil/tuple pair whose λ_max(Σ A_j ⊗ X_j) approaches ϑ(d) as `cells` grows.
///
/// With Ĵ the κ*-optimal J(ŝ,t̂;a,b) at ŝ = ⌈d/2⌉, O(d) is split into the Voronoi cells (Frobenius
/// distance) of `cells` Haar centers U_j. A_j is the sum of UᵀĴU over the samples falling in
/// cell j, divided by κ*(d) times the total sample count; X_j = U_jᵀ J(ŝ,t̂;1,1) U_j.
pub fn sharpness_witness(d: usize, cells: usize, samples_per_cell: usize, seed: u64) -> Result<SharpnessWitness> {
    if d < 2 {
        return Err(domain!("witness needs d >= 2, got {d}"));
    }
    if cells == 0 || samples_per_cell == 0 {
        return Err(domain!("need at least one cell and one sample per cell"));
    }
    let d32 = u32::try_from(d).map_err(|_| domain!("dimension {d} too large"))?;
    let s = d32.div_ceil(2);
    let t = d32 - s;
    let ks = kappa_star(s, t)?;
    let j_hat = SignDiag::new(s, t, ks.a, ks.b)?.to_matrix();
    let j_one = SignDiag::new(s, t, 1.0, 1.0)?.to_matrix();

    let mut center_rng = stream_rng(seed, 0);
    let centers: Vec<DMatrix<f64>> = (0..cells).map(|_| haar_orthogonal_with(&mut center_rng, d)).collect();

    const CHUNK: usize = 1024;
    let total = cells * samples_per_cell;
    let chunks = total.div_ceil(CHUNK);
    let partial = par::map_indexed(chunks, |c| {
        let mut rng = stream_rng(seed, 1 + c as u64);
        let len = CHUNK.min(total - c * CHUNK);
        let mut sums: Vec<DMatrix<f64>> = (0..cells).map(|_| DMatrix::zeros(d, d)).collect();
        for _ in 0..len {
            let u = haar_orthogonal_with(&mut rng, d);
            // ‖U − C‖_F² = 2d − 2⟨U, C⟩ for orthogonal U, C
            let mut best = 0;
            let mut best_ip = f64::NEG_INFINITY;
            for (k, cm) in centers.iter().enumerate() {
                let ip = u.dot(cm);
                if ip > best_ip {
                    best_ip = ip;
                    best = k;
                }
            }
            sums[best] += u.transpose() * &j_hat * &u;
        }
        sums
    });
    let mut sums: Vec<DMatrix<f64>> = (0..cells).map(|_| DMatrix::zeros(d, d)).collect();
    for chunk in &partial {
        for (acc, m) in sums.iter_mut().zip(chunk) {
            *acc += m;
        }
    }
    let norm = 1.0 / (ks.kappa_star * total as f64);
    let coeffs = sums.iter().map(|m| crate::linalg::symmetrize(m) * norm).collect();
    let pencil = MonicPencil::new(coeffs)?;
    let tuple =
        SymTuple::new(centers.iter().map(|u| crate::linalg::symmetrize(&(u.transpose() * &j_one * u))).collect())?;
    let lambda_max = lambda_max(&tensor_sum(&pencil, &tuple)?)?;
    Ok(SharpnessWitness { pencil, tuple, lambda_max, theta: 1.0 / ks.kappa_star })
}
