//! Equipoints, medians and means of Beta(𝔰, 𝔱), the bounds tying them together, and the
//! one-step monotone cumulative functions Φ and Φ̂.
//!
//! The equipoint e = e<sub>𝔰,𝔱</sub> solves I_e(𝔰, 𝔱+1) + I_e(𝔰+1, 𝔱) = 1. For integer
//! shapes it coincides with the binomial equipoint, P_e(S ≥ 𝔰) = P_e(S ≤ 𝔰) for
//! S ~ Bin(𝔰+𝔱, e); the ten-entry table for 𝔰+𝔱 = 10 is reproduced that way.

use alloc::vec::Vec;

use crate::error::domain;
use crate::roots::bisect;
use crate::specfun::{ibeta, reg_inc_beta_inv};
use crate::{par, Result};

/// Target residual |I_e(𝔰,𝔱+1) + I_e(𝔰+1,𝔱) − 1| of [`equipoint`].
pub const EQUIPOINT_TOL: f64 = 1e-11;
/// Final bracket width of the equipoint bisection.
pub const EQUIPOINT_XTOL: f64 = 1e-13;
/// Target residual |I_m(𝔰,𝔱) − ½| of [`median`].
pub const MEDIAN_TOL: f64 = 1e-11;
/// Slack granted to every inequality checked by the sweeps (root-finder resolution).
pub const SWEEP_TOL: f64 = 1e-12;

/// Shape pair (𝔰, 𝔱) of a Beta distribution, 𝔡 = 𝔰 + 𝔱.
///
/// 𝔱 = 0 is accepted; only [`equipoint`] gives it a meaning (e = 1 by convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaShape {
    s: f64,
    t: f64,
}

impl BetaShape {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(domain!("shape s must be finite and > 0, got {s}"));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(domain!("shape t must be finite and >= 0, got {t}"));
        }
        Ok(Self { s, t })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn d(&self) -> f64 {
        self.s + self.t
    }

    /// μ = 𝔰 / (𝔰 + 𝔱).
    pub fn mean(&self) -> f64 {
        self.s / (self.s + self.t)
    }
}

fn equipoint_residual(x: f64, s: f64, t: f64) -> Result<f64> {
    Ok(ibeta(x, s, t + 1.0)? + ibeta(x, s + 1.0, t)? - 1.0)
}

/// The equipoint e<sub>𝔰,𝔱</sub>. Returns 1 when 𝔱 = 0.
pub fn equipoint(shape: &BetaShape) -> Result<f64> {
    let (s, t) = (shape.s, shape.t);
    if t == 0.0 {
        return Ok(1.0);
    }
    if s == t {
        return Ok(0.5);
    }
    // The residual increases strictly from −1 at 0 to +1 at 1.
    bisect(|x| equipoint_residual(x, s, t), 0.0, 1.0, EQUIPOINT_XTOL)
}

/// The median m<sub>𝔰,𝔱</sub>, the solution of I_m(𝔰, 𝔱) = ½.
pub fn median(shape: &BetaShape) -> Result<f64> {
    if shape.t == 0.0 {
        return Err(domain!("the median needs t > 0"));
    }
    if shape.s == shape.t {
        return Ok(0.5);
    }
    reg_inc_beta_inv(0.5, shape.s, shape.t)
}

/// (μ, μ + (𝔰−𝔱)/(𝔰+𝔱)²), valid for 1 ≤ 𝔱 ≤ 𝔰 with 𝔰 + 𝔱 ≥ 3.
pub fn median_bounds(shape: &BetaShape) -> Result<(f64, f64)> {
    let (s, t) = (shape.s, shape.t);
    if !(1.0 <= t && t <= s && s + t >= 3.0) {
        return Err(domain!("median bounds need 1 <= t <= s and s + t >= 3, got s={s}, t={t}"));
    }
    let mu = shape.mean();
    Ok((mu, mu + (s - t) / ((s + t) * (s + t))))
}

/// ((𝔰+1)/(𝔰+𝔱+2), 𝔰/(𝔰+𝔱)) for 0 < 𝔱 ≤ 𝔰.
///
/// The lower bound holds for all real shapes in range; the upper bound is proven for
/// half-integer shapes and conjectural otherwise.
pub fn equipoint_bounds(shape: &BetaShape) -> Result<(f64, f64)> {
    let (s, t) = (shape.s, shape.t);
    if !(t > 0.0 && t <= s) {
        return Err(domain!("equipoint bounds need 0 < t <= s, got s={s}, t={t}"));
    }
    Ok(((s + 1.0) / (s + t + 2.0), s / (s + t)))
}

/// Φ(𝔰) = I_{e}(𝔰, 𝔡−𝔰+1) with e = e<sub>𝔰,𝔡−𝔰</sub>, and Φ̂(𝔰) = I_{𝔰/𝔡}(𝔰, 𝔡−𝔰+1).
pub fn phi_functions(s: f64, d: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < d && d.is_finite()) {
        return Err(domain!("phi functions need 0 < s < d, got s={s}, d={d}"));
    }
    let t = d - s;
    let e = equipoint(&BetaShape::new(s, t)?)?;
    let phi = ibeta(e, s, t + 1.0)?;
    let phi_hat = ibeta(s / d, s, t + 1.0)?;
    Ok((phi, phi_hat))
}

/// P_p(S ≥ s) for S ~ Bin(d, p), via I_p(s, d − s + 1).
pub fn binom_tail(p: f64, s: u64, d: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("p must lie in [0, 1], got {p}"));
    }
    if d == 0 || s > d {
        return Err(domain!("binom_tail needs 0 <= s <= d and d >= 1, got s={s}, d={d}"));
    }
    if s == 0 {
        return Ok(1.0);
    }
    ibeta(p, s as f64, (d - s + 1) as f64)
}

/// One failed inequality `lhs <= rhs` found by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    /// The sweep's two grid coordinates, e.g. (𝔰, 𝔱) or (𝔰, 𝔡).
    pub params: [f64; 2],
    pub lhs: f64,
    pub rhs: f64,
}

fn collect<I>(chunks: I) -> Result<Vec<Violation>>
where
    I: IntoIterator<Item = Result<Vec<Violation>>>,
{
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Half-integer Simmons inequality: e<sub>s/2,t/2</sub> ≤ s/d for integers d/2 ≤ s < d ≤ `d_max`,
/// together with the lower bound (𝔰+1)/(𝔰+𝔱+2) ≤ e on the same grid.
pub fn simmons_sweep(d_max: u32) -> Result<Vec<Violation>> {
    let rows = par::map_indexed(d_max as usize, |i| -> Result<Vec<Violation>> {
        let d = i as u32 + 1;
        let mut v = Vec::new();
        for s in d.div_ceil(2)..d {
            let t = d - s;
            let shape = BetaShape::new(s as f64 / 2.0, t as f64 / 2.0)?;
            let e = equipoint(&shape)?;
            let (lower, upper) = equipoint_bounds(&shape)?;
            if e > upper + SWEEP_TOL {
                v.push(Violation { check: "simmons", params: [shape.s, shape.t], lhs: e, rhs: upper });
            }
            if lower > e + SWEEP_TOL {
                v.push(Violation { check: "equipoint_lower", params: [shape.s, shape.t], lhs: lower, rhs: e });
            }
        }
        Ok(v)
    });
    collect(rows)
}

/// Lower bound (𝔰+1)/(𝔰+𝔱+2) ≤ e<sub>𝔰,𝔱</sub> for 1 ≤ 𝔱 ≤ 𝔰 ≤ `max` on a grid of step `step`.
pub fn equipoint_lower_sweep(max: f64, step: f64) -> Result<Vec<Violation>> {
    let grid = grid(1.0, max, step);
    let rows = par::map_indexed(grid.len(), |i| -> Result<Vec<Violation>> {
        let s = grid[i];
        let mut v = Vec::new();
        for &t in grid.iter().take_while(|&&t| t <= s) {
            let shape = BetaShape::new(s, t)?;
            let e = equipoint(&shape)?;
            let (lower, _) = equipoint_bounds(&shape)?;
            if lower > e + SWEEP_TOL {
                v.push(Violation { check: "equipoint_lower", params: [s, t], lhs: lower, rhs: e });
            }
        }
        Ok(v)
    });
    collect(rows)
}

/// e ≤ m for 0 < 𝔱 ≤ 𝔰 and m<sub>𝔰+1,𝔱+1</sub> ≤ e for 0 < 𝔱 < 𝔰 over the given shapes.
pub fn ordering_sweep(shapes: &[(f64, f64)]) -> Result<Vec<Violation>> {
    let rows = par::map_indexed(shapes.len(), |i| -> Result<Vec<Violation>> {
        let (s, t) = shapes[i];
        let mut v = Vec::new();
        if !(t > 0.0 && t <= s) {
            return Ok(v);
        }
        let e = equipoint(&BetaShape::new(s, t)?)?;
        let m = median(&BetaShape::new(s, t)?)?;
        if e > m + SWEEP_TOL {
            v.push(Violation { check: "equipoint_le_median", params: [s, t], lhs: e, rhs: m });
        }
        if t < s {
            let m1 = median(&BetaShape::new(s + 1.0, t + 1.0)?)?;
            if m1 > e + SWEEP_TOL {
                v.push(Violation { check: "shifted_median_le_equipoint", params: [s, t], lhs: m1, rhs: e });
            }
        }
        Ok(v)
    });
    collect(rows)
}

/// μ ≤ m ≤ μ + (𝔰−𝔱)/(𝔰+𝔱)² over the given shapes (out-of-range shapes are skipped).
pub fn median_bounds_sweep(shapes: &[(f64, f64)]) -> Result<Vec<Violation>> {
    let rows = par::map_indexed(shapes.len(), |i| -> Result<Vec<Violation>> {
        let (s, t) = shapes[i];
        let mut v = Vec::new();
        let shape = BetaShape::new(s, t)?;
        let Ok((lower, upper)) = median_bounds(&shape) else {
            return Ok(v);
        };
        let m = median(&shape)?;
        if lower > m + SWEEP_TOL {
            v.push(Violation { check: "median_lower", params: [s, t], lhs: lower, rhs: m });
        }
        if m > upper + SWEEP_TOL {
            v.push(Violation { check: "median_upper", params: [s, t], lhs: m, rhs: upper });
        }
        Ok(v)
    });
    collect(rows)
}

/// Φ̂(𝔰) ≤ Φ̂(𝔰+1) for real 𝔡 = step, 2·step, …, ≤ `d_max` and 𝔰 = 𝔡/2 + k·step < 𝔡 − 1.
pub fn phi_hat_monotone_sweep(d_max: f64, step: f64) -> Result<Vec<Violation>> {
    let ds = grid(step, d_max, step);
    let rows = par::map_indexed(ds.len(), |i| -> Result<Vec<Violation>> {
        let d = ds[i];
        let mut v = Vec::new();
        let mut k = 0u32;
        loop {
            let s = d / 2.0 + f64::from(k) * step;
            if s >= d - 1.0 {
                break;
            }
            let (_, lo) = phi_functions(s, d)?;
            let (_, hi) = phi_functions(s + 1.0, d)?;
            if lo > hi + SWEEP_TOL {
                v.push(Violation { check: "phi_hat_monotone", params: [s, d], lhs: lo, rhs: hi });
            }
            k += 1;
        }
        Ok(v)
    });
    collect(rows)
}

/// Φ(𝔰) ≤ Φ(𝔰+1) for half-integer 𝔰, 𝔡 with 𝔡 ≤ `d_max` and 𝔡/2 ≤ 𝔰 < 𝔡 − 1.
pub fn phi_monotone_sweep(d_max: f64) -> Result<Vec<Violation>> {
    let ds = grid(0.5, d_max, 0.5);
    let rows = par::map_indexed(ds.len(), |i| -> Result<Vec<Violation>> {
        let d = ds[i];
        let mut v = Vec::new();
        // smallest half-integer >= d/2
        let mut s = libm::ceil(d) / 2.0;
        while s < d - 1.0 {
            let (lo, _) = phi_functions(s, d)?;
            let (hi, _) = phi_functions(s + 1.0, d)?;
            if lo > hi + SWEEP_TOL {
                v.push(Violation { check: "phi_monotone", params: [s, d], lhs: lo, rhs: hi });
            }
            s += 0.5;
        }
        Ok(v)
    });
    collect(rows)
}

/// Real-parameter form of the Simmons inequality, e<sub>𝔰,𝔱</sub> ≤ 𝔰/(𝔰+𝔱) for 0 < 𝔱 ≤ 𝔰.
///
/// Only proven for half-integer shapes; this sweep reports violations and is never asserted.
pub fn real_simmons_report(max: f64, step: f64) -> Result<Vec<Violation>> {
    let g = grid(step, max, step);
    let rows = par::map_indexed(g.len(), |i| -> Result<Vec<Violation>> {
        let s = g[i];
        let mut v = Vec::new();
        for &t in g.iter().take_while(|&&t| t <= s) {
            let shape = BetaShape::new(s, t)?;
            let e = equipoint(&shape)?;
            let upper = shape.mean();
            if e > upper + SWEEP_TOL {
                v.push(Violation { check: "real_simmons", params: [s, t], lhs: e, rhs: upper });
            }
        }
        Ok(v)
    });
    collect(rows)
}

/// `start, start+step, …` up to `end` inclusive (with a little slack for rounding).
pub(crate) fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if step.is_nan() || step <= 0.0 {
        return out;
    }
    let n = libm::floor((end - start) / step + 1e-9);
    if n < 0.0 {
        return out;
    }
    for k in 0..=(n as u64) {
        out.push(start + k as f64 * step);
    }
    out
}
