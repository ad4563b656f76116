//! Bracketed scalar root finding.

use crate::error::numeric;
use crate::Result;

/// Bisection on a sign-changing bracket until its width drops to `xtol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (zero counts as either). Returns the
/// midpoint of the final bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let flo = f(lo)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi)?;
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(numeric!("bisection bracket [{lo}, {hi}] has no sign change (f = {flo}, {fhi})"));
    }
    let lo_negative = flo < 0.0;
    // 2000 halvings is far more than any f64 interval supports
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brent's method on a sign-changing bracket.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(numeric!("Brent bracket [{lo}, {hi}] has no sign change (f = {fa}, {fb})"));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(numeric!("Brent iteration did not converge in {max_iter} steps on [{lo}, {hi}]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn brent_finds_cosine_fixed_point() {
        let r = brent(|x| Ok(libm::cos(x) - x), 0.0, 1.0, 1e-15, 100).unwrap();
        assert!((libm::cos(r) - r).abs() < 1e-14);
    }

    #[test]
    fn bad_brackets_error() {
        assert!(bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn decreasing_function_bisects() {
        let r = bisect(|x| Ok(0.3 - x), 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.3).abs() < 1e-13);
    }
}
