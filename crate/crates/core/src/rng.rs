//! Deterministic random streams and the random objects built from them.
//!
//! Every Monte-Carlo routine splits its samples into fixed chunks of [`CHUNK`]. Chunk `i` is
//! drawn from ChaCha8 seeded by `seed` on stream `i`, and per-chunk moments are merged in
//! chunk order, so results are bit-identical for any number of worker threads.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::par;

/// Samples per independent stream.
pub const CHUNK: u64 = 4096;

/// The generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// A Haar-distributed d×d orthogonal matrix: QR of a Gaussian matrix with the signs of R's
/// diagonal moved into Q.
pub fn haar_orthogonal_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, d, d);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.n as f64 * w;
        self.n = n;
    }

    /// Sample standard deviation over √n.
    pub fn std_err(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = self.m2 / (self.n - 1) as f64;
        libm::sqrt(var / self.n as f64)
    }
}

/// Moments of `k` statistics over `n` samples. `sample` fills one value per statistic.
pub(crate) fn sample_moments<F>(n: u64, seed: u64, k: usize, sample: F) -> Vec<Moments>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = par::map_indexed(chunks as usize, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let len = CHUNK.min(n - i as u64 * CHUNK);
        let mut acc = vec![Moments::default(); k];
        let mut buf = vec![0.0; k];
        for _ in 0..len {
            sample(&mut rng, &mut buf);
            for (m, &x) in acc.iter_mut().zip(&buf) {
                m.push(x);
            }
        }
        acc
    });
    let mut total = vec![Moments::default(); k];
    for chunk in &partial {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    total
}
