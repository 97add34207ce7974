//! Bracketed scalar root finding (Brent's method).
//!
//! Function values may be `±∞`: they carry a sign but no magnitude, and force a
//! bisection step. The shooting maps use this to encode "zero not reached".

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub value: f64,
    /// Final enclosing interval.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

/// Finds a root of `f` in `[lo, hi]` to absolute tolerance `xtol`.
///
/// `f_lo` / `f_hi` are the already-known end values (saves two evaluations of
/// an expensive map). They must have opposite signs or one must be zero.
pub fn brent<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::InvalidInput("NaN at bracket end".into()));
    }
    if f_lo == 0.0 {
        return Ok(Root { x: lo, value: 0.0, bracket: (lo, lo), iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, value: 0.0, bracket: (hi, hi), iterations: 0 });
    }
    if same_sign(f_lo, f_hi) {
        return Err(Error::BracketExhausted { lo, hi });
    }

    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if same_sign(fb, fc) {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (l, h) = if b < c { (b, c) } else { (c, b) };
            return Ok(Root { x: b, value: fb, bracket: (l, h), iterations: iter });
        }
        let finite = fa.is_finite() && fb.is_finite() && fc.is_finite();
        if finite && e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonConvergence(format!("NaN encountered at x = {b}")));
        }
    }
    Err(Error::NonConvergence(format!(
        "Brent iteration budget {max_iter} exhausted"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let f = |x: f64| x * x * x - 2.0 * x - 5.0;
        let r = brent(f, 2.0, 3.0, f(2.0), f(3.0), 1e-14, 100).unwrap();
        assert!((r.x - 2.0945514815423265).abs() < 1e-12);
    }

    #[test]
    fn infinite_values_bisect() {
        // Map that is +inf left of 1.5, smooth afterwards.
        let f = |x: f64| if x < 1.5 { f64::INFINITY } else { 2.0 - x };
        let r = brent(f, 0.0, 4.0, f64::INFINITY, f(4.0), 1e-12, 200).unwrap();
        assert!((r.x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_same_sign() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(
            brent(f, -1.0, 1.0, 2.0, 2.0, 1e-10, 50),
            Err(Error::BracketExhausted { .. })
        ));
    }

    #[test]
    fn endpoint_root() {
        let r = brent(|x| x, 0.0, 1.0, 0.0, 1.0, 1e-10, 10).unwrap();
        assert_eq!(r.x, 0.0);
    }
}
