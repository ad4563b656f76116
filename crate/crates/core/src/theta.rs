//! The relaxation constant ϑ(d) and the quantities that determine it.
//!
//! For a diagonal sign matrix J = J(s,t;a,b) = aI_s ⊕ (−b)I_t the sphere average
//! κ(J) = ∫|ξᵀJξ| dξ splits as s·a·α + t·b·β, where α and β are the signed second moments
//! of a positive and a negative coordinate. Minimizing κ over trace-normalized J
//! (s·a + t·b = d) gives κ*(s,t), attained where α = β, and
//! 1/ϑ(d) = min over s + t = d of κ*(s,t).
//!
//! κ*(s,t) is computed twice: by root finding for α = β along the normalized segment, and as
//! f_{s,t}(σ_{s,t}) with σ_{s,t} the interior minimizer of
//!
//! ```text
//! f_{s,t}(p) = [2(1−p)s·I_{1−p}(t/2, 1+s/2) + 2pt·I_p(s/2, 1+t/2)] / ((1−p)s + pt) − 1.
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{domain, numeric};
use crate::roots::{bisect, brent};
use crate::specfun::{ibeta, ln_gamma_unchecked};
use crate::{par, Result};

/// Required agreement of the two κ* routes.
pub const KAPPA_STAR_CROSS_TOL: f64 = 1e-9;
/// Maximum |α − β| accepted at the computed optimum.
pub const ALPHA_BETA_BALANCE_TOL: f64 = 1e-11;
/// Residual tolerance of the σ_{s,t} defining equation.
pub const SIGMA_TOL: f64 = 1e-11;
/// Agreement of the two even-d closed forms of 1/ϑ(d).
pub const EVEN_CLOSED_FORM_TOL: f64 = 1e-12;
/// Largest accepted gap between the minimizer search and a closed form.
pub const SEARCH_CONSISTENCY_TOL: f64 = 1e-8;

const ROOT_XTOL: f64 = 1e-15;
const ROOT_MAX_ITER: usize = 300;

/// The diagonal matrix J(s,t;a,b) = aI_s ⊕ (−b)I_t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignDiag {
    s: u32,
    t: u32,
    a: f64,
    b: f64,
}

impl SignDiag {
    /// Requires s ≥ 1, a, b ≥ 0 finite and a + b > 0.
    pub fn new(s: u32, t: u32, a: f64, b: f64) -> Result<Self> {
        if s == 0 {
            return Err(domain!("positive block size s must be >= 1"));
        }
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return Err(domain!("magnitudes must be finite and >= 0, got a={a}, b={b}"));
        }
        if a + b <= 0.0 {
            return Err(domain!("need a + b > 0"));
        }
        Ok(Self { s, t, a, b })
    }

    /// J(s,t;a,b) rescaled so that s·a + t·b = s + t.
    pub fn normalized(s: u32, t: u32, a: f64, b: f64) -> Result<Self> {
        let j = Self::new(s, t, a, b)?;
        let tr = j.abs_trace();
        if tr <= 0.0 {
            return Err(domain!("J(s,t;a,b) is zero on its support"));
        }
        let c = j.d() as f64 / tr;
        Self::new(s, t, a * c, b * c)
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn d(&self) -> u32 {
        self.s + self.t
    }

    /// s·a + t·b.
    pub fn abs_trace(&self) -> f64 {
        f64::from(self.s) * self.a + f64::from(self.t) * self.b
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut v = vec![self.a; self.s as usize];
        v.extend(core::iter::repeat_n(-self.b, self.t as usize));
        v
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal()))
    }
}

/// (α, β) for J(s,t;a,b). Both lie in [−1/d, 1/d].
pub fn alpha_beta(j: &SignDiag) -> Result<(f64, f64)> {
    if j.t == 0 {
        return Err(domain!("alpha_beta needs t >= 1"));
    }
    let (s, t) = (f64::from(j.s), f64::from(j.t));
    let d = s + t;
    let q = j.a / (j.a + j.b);
    let alpha = (2.0 * ibeta(q, t / 2.0, s / 2.0 + 1.0)? - 1.0) / d;
    let beta = (2.0 * ibeta(1.0 - q, s / 2.0, t / 2.0 + 1.0)? - 1.0) / d;
    Ok((alpha, beta))
}

/// κ(J) = ∫|ξᵀJξ| dξ = s·a·α + t·b·β (equal to a when t = 0).
pub fn kappa(j: &SignDiag) -> Result<f64> {
    if j.t == 0 {
        return Ok(j.a);
    }
    let (alpha, beta) = alpha_beta(j)?;
    Ok(f64::from(j.s) * j.a * alpha + f64::from(j.t) * j.b * beta)
}

fn check_pair(s: u32, t: u32) -> Result<()> {
    if s == 0 || t == 0 {
        return Err(domain!("need s, t >= 1, got s={s}, t={t}"));
    }
    Ok(())
}

fn sigma_residual(p: f64, s: f64, t: f64) -> Result<f64> {
    Ok(ibeta(p, s / 2.0, 1.0 + t / 2.0)? - ibeta(1.0 - p, t / 2.0, 1.0 + s / 2.0)?)
}

/// σ_{s,t}, the root of I_σ(s/2, 1+t/2) = I_{1−σ}(t/2, 1+s/2), for s ≥ t ≥ 1.
///
/// The root is bracketed by [(s+2)/(s+t+4), s/(s+t)]; a bracket without sign change is
/// reported as a numeric error.
pub fn sigma_st(s: u32, t: u32) -> Result<f64> {
    check_pair(s, t)?;
    if s < t {
        return Err(domain!("sigma_st needs s >= t, got s={s}, t={t}"));
    }
    if s == t {
        return Ok(0.5);
    }
    let (sf, tf) = (f64::from(s), f64::from(t));
    let lo = (sf + 2.0) / (sf + tf + 4.0);
    let hi = sf / (sf + tf);
    let sigma = bisect(|p| sigma_residual(p, sf, tf), lo, hi, 1e-15)?;
    let r = sigma_residual(sigma, sf, tf)?;
    if r.abs() > SIGMA_TOL {
        return Err(numeric!("sigma({s},{t}) residual {r} exceeds {SIGMA_TOL}"));
    }
    Ok(sigma)
}

/// Values of f_{s,t}, g_{s,t} and h_{s,t} at p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fgh {
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

/// f_{s,t}(p), g_{s,t}(p) and h_{s,t}(p) for s, t ≥ 1 and p ∈ [0, 1].
///
/// ```text
/// g(p) = 2(s·I_{1−p}(t/2, s/2+1) + t·I_p(s/2, t/2+1))/(s+t) − 1
/// h(p) = I_{1−p}(t/2, s/2+1) + I_p(s/2, t/2+1) − 1
/// ```
pub fn f_g_h(s: u32, t: u32, p: f64) -> Result<Fgh> {
    check_pair(s, t)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("p must lie in [0, 1], got {p}"));
    }
    let (s, t) = (f64::from(s), f64::from(t));
    let left = ibeta(1.0 - p, t / 2.0, 1.0 + s / 2.0)?;
    let right = ibeta(p, s / 2.0, 1.0 + t / 2.0)?;
    let f = (2.0 * (1.0 - p) * s * left + 2.0 * p * t * right) / ((1.0 - p) * s + p * t) - 1.0;
    let g = 2.0 * (s * left + t * right) / (s + t) - 1.0;
    let h = left + right - 1.0;
    Ok(Fgh { f, g, h })
}

/// Γ(s/2+t/2+1)/(Γ(s/2+1)Γ(t/2+1)) · p^{s/2}(1−p)^{t/2}, the closed form of h_{s,t}(p).
pub fn h_closed_form(s: u32, t: u32, p: f64) -> Result<f64> {
    check_pair(s, t)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("p must lie in [0, 1], got {p}"));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    let (hs, ht) = (f64::from(s) / 2.0, f64::from(t) / 2.0);
    let ln = ln_gamma_unchecked(hs + ht + 1.0) - ln_gamma_unchecked(hs + 1.0) - ln_gamma_unchecked(ht + 1.0)
        + hs * libm::log(p)
        + ht * libm::log1p(-p);
    Ok(libm::exp(ln))
}

/// f′_{s,t}(p) = 2st/((1−p)s+pt)² · (I_p(s/2,1+t/2) − I_{1−p}(t/2,1+s/2)).
pub fn f_derivative(s: u32, t: u32, p: f64) -> Result<f64> {
    check_pair(s, t)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("p must lie in [0, 1], got {p}"));
    }
    let (sf, tf) = (f64::from(s), f64::from(t));
    let den = (1.0 - p) * sf + p * tf;
    Ok(2.0 * sf * tf / (den * den) * sigma_residual(p, sf, tf)?)
}

/// κ*(s,t) and the trace-normalized magnitudes (a, b) where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaStar {
    pub kappa_star: f64,
    pub a: f64,
    pub b: f64,
}

/// κ*(s,t) = min κ(J(s,t;a,b)) over a, b ≥ 0 with s·a + t·b = s + t.
///
/// Either block may be empty, in which case the minimum is κ = 1 at J = I.
pub fn kappa_star(s: u32, t: u32) -> Result<KappaStar> {
    if s == 0 && t == 0 {
        return Err(domain!("need s + t >= 1"));
    }
    if t == 0 {
        return Ok(KappaStar { kappa_star: 1.0, a: 1.0, b: 0.0 });
    }
    if s == 0 {
        return Ok(KappaStar { kappa_star: 1.0, a: 0.0, b: 1.0 });
    }
    let (sf, tf) = (f64::from(s), f64::from(t));
    let d = sf + tf;
    let a_max = d / sf;
    let b_of = |a: f64| ((d - sf * a) / tf).max(0.0);
    let balance = |a: f64| -> Result<f64> {
        let (alpha, beta) = alpha_beta(&SignDiag::new(s, t, a, b_of(a))?)?;
        Ok(alpha - beta)
    };
    let a = brent(balance, 0.0, a_max, ROOT_XTOL * a_max, ROOT_MAX_ITER)?;
    let b = b_of(a);
    let (alpha, beta) = alpha_beta(&SignDiag::new(s, t, a, b)?)?;
    if (alpha - beta).abs() > ALPHA_BETA_BALANCE_TOL {
        return Err(numeric!("alpha - beta = {} at the optimum of ({s},{t})", alpha - beta));
    }
    let by_balance = d * alpha;

    let (hi, lo) = if s >= t { (s, t) } else { (t, s) };
    let by_sigma = f_g_h(hi, lo, sigma_st(hi, lo)?)?.f;
    if (by_balance - by_sigma).abs() > KAPPA_STAR_CROSS_TOL {
        return Err(numeric!("kappa*({s},{t}) routes disagree: balance {by_balance}, sigma {by_sigma}"));
    }
    Ok(KappaStar { kappa_star: by_balance, a, b })
}

/// θ−(d), θ+(d) and θ++(d) for odd d ≥ 3, with θ− ≤ ϑ(d) ≤ min(θ+, θ++).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddBounds {
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub theta_plusplus: f64,
}

/// Closed-form bounds on ϑ(d) for odd d ≥ 3.
///
/// ```text
/// θ++ = √(π/2) Γ((d+3)/2) / Γ(d/2+1)
/// θ−  = (d^{2d} / ((d+1)^{d+1} (d−1)^{d−1}))^{1/4} θ++
/// 1/θ+ = (d−1)/d · I_{(d+1)/(2d)}((d+1)/4, (d+3)/4) + (d+1)/d · I_{(d−1)/(2d)}((d−1)/4, (d+5)/4) − 1
/// ```
pub fn theta_odd_bounds(d: u32) -> Result<OddBounds> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(domain!("odd-d bounds need odd d >= 3, got {d}"));
    }
    let df = f64::from(d);
    let theta_plusplus =
        libm::sqrt(PI / 2.0) * libm::exp(ln_gamma_unchecked((df + 3.0) / 2.0) - ln_gamma_unchecked(df / 2.0 + 1.0));
    let ln_ratio = 2.0 * df * libm::log(df) - (df + 1.0) * libm::log(df + 1.0) - (df - 1.0) * libm::log(df - 1.0);
    let theta_minus = libm::exp(ln_ratio / 4.0) * theta_plusplus;
    let inv_plus = (df - 1.0) / df * ibeta((df + 1.0) / (2.0 * df), (df + 1.0) / 4.0, (df + 3.0) / 4.0)?
        + (df + 1.0) / df * ibeta((df - 1.0) / (2.0 * df), (df - 1.0) / 4.0, (df + 5.0) / 4.0)?
        - 1.0;
    Ok(OddBounds { theta_minus, theta_plus: 1.0 / inv_plus, theta_plusplus })
}

/// 1/ϑ(d) for even d by the two closed forms 2I_{1/2}(d/4, d/4+1) − 1 and
/// Γ(1/2+d/4)/(√π Γ(1+d/4)).
pub fn even_closed_forms(d: u32) -> Result<(f64, f64)> {
    if d == 0 || d % 2 == 1 {
        return Err(domain!("even closed forms need even d >= 2, got {d}"));
    }
    let q = f64::from(d) / 4.0;
    let by_beta = 2.0 * ibeta(0.5, q, q + 1.0)? - 1.0;
    let by_gamma = libm::exp(ln_gamma_unchecked(0.5 + q) - ln_gamma_unchecked(1.0 + q)) / libm::sqrt(PI);
    Ok((by_beta, by_gamma))
}

/// ϑ(d) together with the minimizing split and, for odd d, the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaReport {
    pub d: u32,
    pub theta: f64,
    pub kappa_star: f64,
    pub minimizer_s: u32,
    pub minimizer_t: u32,
    /// σ at the minimizing split; 1 for d = 1 where the negative block is empty.
    pub p_opt: f64,
    pub bounds_odd: Option<OddBounds>,
}

/// κ*(s, d−s) for s = ⌈d/2⌉, …, d in that order.
pub fn kappa_star_scan(d: u32) -> Result<Vec<(u32, f64)>> {
    if d == 0 {
        return Err(domain!("d must be >= 1"));
    }
    let first = d.div_ceil(2);
    let n = (d - first + 1) as usize;
    let vals = par::map_indexed(n, |i| {
        let s = first + i as u32;
        kappa_star(s, d - s).map(|k| (s, k.kappa_star))
    });
    vals.into_iter().collect()
}

/// ϑ(d) by exhaustive search over the splits s + t = d, s ≥ ⌈d/2⌉.
///
/// The minimizer must be (d/2, d/2) for even d and ((d+1)/2, (d−1)/2) for odd d, and for even
/// d the search must agree with both closed forms; anything else is a numeric error.
pub fn theta(d: u32) -> Result<ThetaReport> {
    let scan = kappa_star_scan(d)?;
    let mut best = scan[0];
    for &(s, k) in &scan[1..] {
        if k < best.1 {
            best = (s, k);
        }
    }
    let (s, kappa_star) = best;
    let t = d - s;
    let expected = d.div_ceil(2);
    if s != expected {
        return Err(numeric!("minimizer of d={d} found at s={s}, expected s={expected}"));
    }
    let p_opt = if t == 0 { 1.0 } else { sigma_st(s, t)? };
    let mut bounds_odd = None;
    if d.is_multiple_of(2) {
        let (by_beta, by_gamma) = even_closed_forms(d)?;
        if (by_beta - by_gamma).abs() > EVEN_CLOSED_FORM_TOL {
            return Err(numeric!("even closed forms of d={d} disagree: {by_beta} vs {by_gamma}"));
        }
        if (kappa_star - by_gamma).abs() > SEARCH_CONSISTENCY_TOL {
            return Err(numeric!("search {kappa_star} and closed form {by_gamma} disagree at d={d}"));
        }
    } else if d >= 3 {
        let h = h_closed_form(s, t, p_opt)?;
        if (kappa_star - h).abs() > SEARCH_CONSISTENCY_TOL {
            return Err(numeric!("search {kappa_star} and closed form {h} disagree at d={d}"));
        }
        bounds_odd = Some(theta_odd_bounds(d)?);
    }
    Ok(ThetaReport { d, theta: 1.0 / kappa_star, kappa_star, minimizer_s: s, minimizer_t: t, p_opt, bounds_odd })
}
