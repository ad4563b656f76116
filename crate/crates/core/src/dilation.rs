//! Spin systems, matrix ball membership and explicit commuting dilations.
//!
//! A spin system is a g-tuple of symmetric matrices P_j of size 2^{g−1} obeying the canonical
//! anticommutation relations P_jP_k + P_kP_j = 2δ_{jk}I. With
//! σ₀ = I, σ₁ = diag(1,−1), σ₂ = [[0,1],[1,0]],
//!
//! ```text
//! P_1 = σ₁ ⊗ σ₀ ⊗ … ⊗ σ₀
//! P_j = σ₂^{⊗(j−1)} ⊗ σ₁ ⊗ σ₀^{⊗(g−j−1)}    (2 ≤ j ≤ g−1)
//! P_g = σ₂^{⊗(g−1)}
//! ```
//!
//! Each P_j is a signed permutation matrix, which is how it is stored.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::domain;
use crate::linalg::{check_symmetric, kron, lambda_max, lambda_min, max_abs, op_norm, sym_eigen, sym_norm};
use crate::pencil::SymTuple;
use crate::rng::{normal_vector, stream_rng};
use crate::{Error, Result};

/// Largest g for which a spin system is built (matrix size 2^13).
pub const SPIN_MAX_G: usize = 14;
/// Largest g for Σ P_j ⊗ P_j and the Choi matrix.
pub const SPIN_TENSOR_MAX_G: usize = 8;
/// Eigenvalues of I − S² in [−this, 0] are clamped to 0 by [`defect_sqrt`].
pub const DEFECT_CLAMP: f64 = 1e-12;
/// Slack on the spin-ball precondition of [`spin2_dilation`].
pub const SPIN_PRECONDITION_TOL: f64 = 1e-10;

const ASCENT_STEPS: usize = 200;

/// σ₃ = [[0,1],[−1,0]], the orthogonal matrix with σ₃σ_jσ₃ᵀ = −σ_j for j = 1, 2.
pub fn sigma3() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
}

/// A signed permutation matrix: row r has the single entry `sign[r]` in column `col[r]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPerm {
    col: Vec<u32>,
    sign: Vec<i8>,
}

impl SignedPerm {
    fn identity(n: usize) -> Self {
        Self { col: (0..n as u32).collect(), sign: vec![1; n] }
    }

    fn from_2x2(m: [[i8; 2]; 2]) -> Self {
        let mut col = vec![0; 2];
        let mut sign = vec![0; 2];
        for r in 0..2 {
            let c = if m[r][0] != 0 { 0 } else { 1 };
            col[r] = c as u32;
            sign[r] = m[r][c];
        }
        Self { col, sign }
    }

    pub fn size(&self) -> usize {
        self.col.len()
    }

    /// self ⊗ other.
    fn kron(&self, other: &SignedPerm) -> Self {
        let m = other.size();
        let n = self.size() * m;
        let mut col = Vec::with_capacity(n);
        let mut sign = Vec::with_capacity(n);
        for r1 in 0..self.size() {
            for r2 in 0..m {
                col.push(self.col[r1] * m as u32 + other.col[r2]);
                sign.push(self.sign[r1] * other.sign[r2]);
            }
        }
        Self { col, sign }
    }

    /// self · other.
    fn mul(&self, other: &SignedPerm) -> Self {
        let col = self.col.iter().map(|&c| other.col[c as usize]).collect();
        let sign = self.col.iter().zip(&self.sign).map(|(&c, &s)| s * other.sign[c as usize]).collect();
        Self { col, sign }
    }

    /// Entry (r, c) as an integer.
    pub fn entry(&self, r: usize, c: usize) -> i8 {
        if self.col[r] as usize == c {
            self.sign[r]
        } else {
            0
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, self.col[r] as usize)] = f64::from(self.sign[r]);
        }
        m
    }
}

/// The spin system P_1, …, P_g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSystem {
    g: usize,
    mats: Vec<SignedPerm>,
}

fn tensor_power(factors: &[&SignedPerm]) -> SignedPerm {
    factors.iter().fold(SignedPerm::identity(1), |acc, f| acc.kron(f))
}

/// The spin system for g variables.
pub fn spin_matrices(g: usize) -> Result<SpinSystem> {
    if g < 2 {
        return Err(domain!("spin systems need g >= 2, got {g}"));
    }
    if g > SPIN_MAX_G {
        return Err(Error::Resource(alloc::format!("spin systems are capped at g = {SPIN_MAX_G}, got {g}")));
    }
    let s0 = SignedPerm::identity(2);
    let s1 = SignedPerm::from_2x2([[1, 0], [0, -1]]);
    let s2 = SignedPerm::from_2x2([[0, 1], [1, 0]]);
    let k = g - 1;
    let mats = (1..=g)
        .map(|j| {
            let factors: Vec<&SignedPerm> = (1..=k)
                .map(|pos| {
                    if j == g || pos < j {
                        &s2
                    } else if pos == j {
                        &s1
                    } else {
                        &s0
                    }
                })
                .collect();
            tensor_power(&factors)
        })
        .collect();
    Ok(SpinSystem { g, mats })
}

impl SpinSystem {
    pub fn g(&self) -> usize {
        self.g
    }

    /// Matrix size 2^{g−1}.
    pub fn size(&self) -> usize {
        self.mats[0].size()
    }

    pub fn mats(&self) -> &[SignedPerm] {
        &self.mats
    }

    /// Exact integer check of P_jP_k + P_kP_j = 2δ_{jk}I and P_j = P_jᵀ.
    pub fn satisfies_car(&self) -> bool {
        let n = self.size();
        for (j, pj) in self.mats.iter().enumerate() {
            for r in 0..n {
                let c = pj.col[r] as usize;
                if pj.col[c] as usize != r || pj.sign[c] != pj.sign[r] {
                    return false;
                }
            }
            for pk in &self.mats[j..] {
                let ab = pj.mul(pk);
                let ba = pk.mul(pj);
                let same = core::ptr::eq(pj, pk);
                for r in 0..n {
                    // a signed permutation row has one nonzero, so the sum can only cancel or double
                    if ab.col[r] != ba.col[r] {
                        return false;
                    }
                    let sum = i16::from(ab.sign[r]) + i16::from(ba.sign[r]);
                    let want = if same && ab.col[r] as usize == r { 2 } else { 0 };
                    if sum != want {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_tuple(&self) -> Result<SymTuple> {
        SymTuple::new(self.mats.iter().map(SignedPerm::to_dense).collect())
    }
}

/// ‖Σ P_j ⊗ P_j‖ by the symmetric eigensolver, equal to g.
///
/// The sum permutes basis vectors up to sign, so it is block diagonal over the orbits of that
/// action; each block is solved separately.
pub fn spin_tensor_norm(g: usize) -> Result<f64> {
    if g > SPIN_TENSOR_MAX_G {
        return Err(Error::Resource(alloc::format!("spin tensor norm is capped at g = {SPIN_TENSOR_MAX_G}, got {g}")));
    }
    let spin = spin_matrices(g)?;
    let squares: Vec<SignedPerm> = spin.mats.iter().map(|p| p.kron(p)).collect();
    let n = squares[0].size();
    let mut component = vec![usize::MAX; n];
    let mut norm = 0.0f64;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        component[start] = start;
        while let Some(r) = queue.pop_front() {
            members.push(r);
            for q in &squares {
                let c = q.col[r] as usize;
                if component[c] == usize::MAX {
                    component[c] = start;
                    queue.push_back(c);
                }
            }
        }
        members.sort_unstable();
        let m = members.len();
        let mut block = DMatrix::zeros(m, m);
        for (i, &r) in members.iter().enumerate() {
            for q in &squares {
                let c = q.col[r] as usize;
                let k = members.binary_search(&c).map_err(|_| crate::error::numeric!("orbit is not closed"))?;
                block[(i, k)] += f64::from(q.sign[r]);
            }
        }
        norm = norm.max(sym_norm(&block)?);
    }
    Ok(norm)
}

/// ‖[P_1 … P_g]‖, equal to √g.
pub fn spin_row_norm(g: usize) -> Result<f64> {
    if g > SPIN_TENSOR_MAX_G {
        return Err(Error::Resource(alloc::format!("spin row norm is capped at g = {SPIN_TENSOR_MAX_G}, got {g}")));
    }
    let spin = spin_matrices(g)?;
    let n = spin.size();
    let mut row = DMatrix::zeros(n, g * n);
    for (j, p) in spin.mats.iter().enumerate() {
        row.view_mut((0, j * n), (n, n)).copy_from(&p.to_dense());
    }
    op_norm(&row)
}

/// The matrix balls whose level-1 slice is the Euclidean unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ball {
    /// Σ X_j² ⪯ I.
    Oh,
    /// I − Σ P_j ⊗ X_j ⪰ 0.
    Spin,
    /// ‖(vᵀX_jv)_j‖ ≤ 1 for all unit v, checked on sampled and refined v only.
    MinSampled,
}

impl FromStr for Ball {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oh" => Ok(Ball::Oh),
            "spin" => Ok(Ball::Spin),
            "min" | "min_sampled" | "min-sampled" => Ok(Ball::MinSampled),
            other => Err(domain!("unknown ball {other:?} (expected oh, spin or min_sampled)")),
        }
    }
}

/// Result of [`ball_membership`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// λ_max(Σ X_j²) for oh, λ_min(I − Σ P_j ⊗ X_j) for spin, the largest ‖vᵀXv‖ found for min.
    pub value: f64,
    /// Set for the min ball: a sampled lower bound can accept points outside, never reject
    /// points inside.
    pub sampled: bool,
}

/// Membership of X in one of the balls at tolerance `tol`. `starts` and `seed` drive the
/// sampled min-ball search and are ignored otherwise.
pub fn ball_membership(x: &SymTuple, ball: Ball, tol: f64, starts: usize, seed: u64) -> Result<Membership> {
    if tol.is_nan() || tol < 0.0 {
        return Err(domain!("tolerance must be >= 0, got {tol}"));
    }
    match ball {
        Ball::Oh => {
            let n = x.n();
            let sum = x.mats().iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m * m);
            let top = lambda_max(&sum)?;
            Ok(Membership { inside: top <= 1.0 + tol, value: top, sampled: false })
        }
        Ball::Spin => {
            if x.g() < 2 {
                return Err(domain!("the spin ball needs g >= 2"));
            }
            let spin = spin_matrices(x.g())?;
            let m = spin.size() * x.n();
            let mut l = DMatrix::identity(m, m);
            for (p, xj) in spin.mats.iter().zip(x.mats()) {
                l -= kron(&p.to_dense(), xj);
            }
            let low = lambda_min(&l)?;
            Ok(Membership { inside: low >= -tol, value: low, sampled: false })
        }
        Ball::MinSampled => {
            let value = min_ball_search(x, starts, seed)?;
            Ok(Membership { inside: value <= 1.0 + tol, value, sampled: true })
        }
    }
}

fn top_eigvec(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let eig = sym_eigen(m)?;
    let k = eig.eigenvalues.imax();
    Ok(eig.eigenvectors.column(k).into_owned())
}

fn moments_at(x: &SymTuple, v: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(x.g(), x.mats().iter().map(|m| v.dot(&(m * v))))
}

/// Largest ‖(vᵀX_jv)_j‖ found by alternating ascent from each coordinate direction and from
/// `starts` random directions: v ← top eigenvector of Σ c_jX_j, c ← (vᵀX_jv)_j normalized.
fn min_ball_search(x: &SymTuple, starts: usize, seed: u64) -> Result<f64> {
    let g = x.g();
    let mut rng = stream_rng(seed, 0);
    let mut best = 0.0f64;
    for k in 0..(2 * g + starts) {
        let mut c = if k < 2 * g {
            let mut e = DVector::zeros(g);
            e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            e
        } else {
            normal_vector(&mut rng, g)
        };
        let mut value = 0.0f64;
        for _ in 0..ASCENT_STEPS {
            let cn = c.norm();
            if cn == 0.0 {
                break;
            }
            let m =
                x.mats().iter().zip(c.iter()).fold(DMatrix::zeros(x.n(), x.n()), |acc, (xj, cj)| acc + xj * (*cj / cn));
            let v = top_eigvec(&m)?;
            let w = moments_at(x, &v);
            let wn = w.norm();
            let stalled = wn <= value * (1.0 + 1e-15);
            value = value.max(wn);
            if stalled {
                break;
            }
            c = w;
        }
        best = best.max(value);
    }
    Ok(best)
}

/// A dilation X_j = (1/scale)·VᵀT_jV with commuting T.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationResult {
    pub t: SymTuple,
    pub v: DMatrix<f64>,
    pub scale: f64,
}

/// Worst entrywise residuals of the three dilation invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationResiduals {
    /// ‖VᵀV − I‖.
    pub isometry: f64,
    /// max_{j,k} ‖T_jT_k − T_kT_j‖.
    pub commutator: f64,
    /// max_j ‖VᵀT_jV − scale·X_j‖.
    pub reconstruction: f64,
}

impl DilationResult {
    pub fn residuals(&self, x: &SymTuple) -> Result<DilationResiduals> {
        if x.g() != self.t.g() || self.v.ncols() != x.n() {
            return Err(domain!("tuple does not match the dilation"));
        }
        let k = self.v.ncols();
        let isometry = max_abs(&(self.v.transpose() * &self.v - DMatrix::identity(k, k)));
        let mut commutator = 0.0f64;
        let ts = self.t.mats();
        for j in 0..ts.len() {
            for l in (j + 1)..ts.len() {
                commutator = commutator.max(max_abs(&(&ts[j] * &ts[l] - &ts[l] * &ts[j])));
            }
        }
        let mut reconstruction = 0.0f64;
        for (tj, xj) in ts.iter().zip(x.mats()) {
            reconstruction = reconstruction.max(max_abs(&(self.v.transpose() * tj * &self.v - xj * self.scale)));
        }
        Ok(DilationResiduals { isometry, commutator, reconstruction })
    }
}

/// T_j = X_j placed in diagonal block j of a gn×gn matrix, V = (1/√g)[I; …; I], scale 1/g.
pub fn blockdiag_dilation(x: &SymTuple) -> Result<DilationResult> {
    let (g, n) = (x.g(), x.n());
    let mats = x
        .mats()
        .iter()
        .enumerate()
        .map(|(j, xj)| {
            let mut t = DMatrix::zeros(g * n, g * n);
            t.view_mut((j * n, j * n), (n, n)).copy_from(xj);
            t
        })
        .collect();
    let c = 1.0 / libm::sqrt(g as f64);
    let mut v = DMatrix::zeros(g * n, n);
    for j in 0..g {
        v.view_mut((j * n, 0), (n, n)).fill_with_identity();
        v.view_mut((j * n, 0), (n, n)).scale_mut(c);
    }
    Ok(DilationResult { t: SymTuple::new(mats)?, v, scale: 1.0 / g as f64 })
}

fn defect_with(s: &DMatrix<f64>, slack: f64) -> Result<DMatrix<f64>> {
    check_symmetric(s, "S")?;
    let eig = sym_eigen(s)?;
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        let gap = 1.0 - *v * *v;
        if gap < -slack {
            return Err(domain!("S is not a contraction (eigenvalue {v})"));
        }
        *v = libm::sqrt(gap.max(0.0));
    }
    let q = &eig.eigenvectors;
    Ok(crate::linalg::symmetrize(&(q * DMatrix::from_diagonal(&vals) * q.transpose())))
}

/// D = (I − S²)^{1/2} for a symmetric contraction S.
pub fn defect_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    defect_with(s, 2.0 * DEFECT_CLAMP)
}

/// Λ(X) = [[X₁, X₂], [X₂, −X₁]] for a pair.
pub fn lambda_pair(x: &SymTuple) -> Result<DMatrix<f64>> {
    if x.g() != 2 {
        return Err(domain!("expected a pair, got g={}", x.g()));
    }
    let n = x.n();
    let (x1, x2) = (&x.mats()[0], &x.mats()[1]);
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(x1);
    s.view_mut((0, n), (n, n)).copy_from(x2);
    s.view_mut((n, 0), (n, n)).copy_from(x2);
    s.view_mut((n, n), (n, n)).copy_from(&(-x1));
    Ok(s)
}

/// Commuting dilation of a pair in the spin ball at scale 1.
///
/// With S = Λ(X) and D = (I − S²)^{1/2} = [[d, e], [−e, d]]:
/// T₁ = [[X₁, e], [−e, X₁]], T₂ = [[X₂, d], [d, −X₂]], V = [I; 0].
pub fn spin2_dilation(x: &SymTuple) -> Result<DilationResult> {
    let s = lambda_pair(x)?;
    let norm = sym_norm(&s)?;
    if norm > 1.0 + SPIN_PRECONDITION_TOL {
        return Err(domain!("pair is outside the spin ball (norm of its block matrix is {norm})"));
    }
    let n = x.n();
    let dd = defect_with(&s, 3.0 * SPIN_PRECONDITION_TOL)?;
    let d = (dd.view((0, 0), (n, n)) + dd.view((n, n), (n, n))) * 0.5;
    let e = (dd.view((0, n), (n, n)) - dd.view((n, 0), (n, n))) * 0.5;
    let (x1, x2) = (&x.mats()[0], &x.mats()[1]);
    let mut t1 = DMatrix::zeros(2 * n, 2 * n);
    t1.view_mut((0, 0), (n, n)).copy_from(x1);
    t1.view_mut((0, n), (n, n)).copy_from(&e);
    t1.view_mut((n, 0), (n, n)).copy_from(&(-&e));
    t1.view_mut((n, n), (n, n)).copy_from(x1);
    let mut t2 = DMatrix::zeros(2 * n, 2 * n);
    t2.view_mut((0, 0), (n, n)).copy_from(x2);
    t2.view_mut((0, n), (n, n)).copy_from(&d);
    t2.view_mut((n, 0), (n, n)).copy_from(&d);
    t2.view_mut((n, n), (n, n)).copy_from(&(-x2));
    let mut v = DMatrix::zeros(2 * n, n);
    v.view_mut((0, 0), (n, n)).fill_with_identity();
    let t = SymTuple::new(vec![crate::linalg::symmetrize(&t1), crate::linalg::symmetrize(&t2)])?;
    Ok(DilationResult { t, v, scale: 1.0 })
}

/// Choi matrix of the unital map sending the OH-ball generators to the spin system:
/// blocks I/2, P_j/(2√g) in the first block row and column, and P_jP_k/(2g) elsewhere.
pub fn oh_to_spin_choi(g: usize) -> Result<DMatrix<f64>> {
    if g > SPIN_TENSOR_MAX_G {
        return Err(Error::Resource(alloc::format!("Choi matrix is capped at g = {SPIN_TENSOR_MAX_G}, got {g}")));
    }
    let spin = spin_matrices(g)?;
    let m = spin.size();
    let dense: Vec<DMatrix<f64>> = spin.mats.iter().map(SignedPerm::to_dense).collect();
    let gf = g as f64;
    let mut c = DMatrix::zeros((g + 1) * m, (g + 1) * m);
    c.view_mut((0, 0), (m, m)).copy_from(&(DMatrix::identity(m, m) * 0.5));
    let edge = 1.0 / (2.0 * libm::sqrt(gf));
    for (j, pj) in dense.iter().enumerate() {
        let b = (j + 1) * m;
        c.view_mut((0, b), (m, m)).copy_from(&(pj * edge));
        c.view_mut((b, 0), (m, m)).copy_from(&(pj * edge));
        for (k, pk) in dense.iter().enumerate() {
            let bk = (k + 1) * m;
            c.view_mut((b, bk), (m, m)).copy_from(&(pj * pk / (2.0 * gf)));
        }
    }
    Ok(c)
}

/// Whether a pair in the spin ball is an extreme point: X₁X₂ = X₂X₁ and Λ(X)² = I within `tol`.
pub fn spin2_extreme(x: &SymTuple, tol: f64) -> Result<bool> {
    let s = lambda_pair(x)?;
    let (x1, x2) = (&x.mats()[0], &x.mats()[1]);
    let comm = op_norm(&(x1 * x2 - x2 * x1))?;
    let n2 = s.nrows();
    let unit = op_norm(&(&s * &s - DMatrix::identity(n2, n2)))?;
    Ok(comm <= tol && unit <= tol)
}
