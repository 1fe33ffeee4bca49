use crate::error::{Error, Result};
use crate::real::Real;

const MAX_ITER: usize = 500;

/// Brent's method: inverse quadratic / secant steps safeguarded by bisection.
///
/// Stops when `|f(x)| < tol` or the bracket is narrower than `tol`.
pub fn find_root<T: Real>(f: impl FnMut(T) -> T, lo: T, hi: T, tol: T) -> Result<T> {
    find_root_with(f, lo, hi, tol, tol)
}

/// [`find_root`] with separate tolerances on the bracket width and on `|f|`.
pub fn find_root_with<T: Real>(
    mut f: impl FnMut(T) -> T,
    lo: T,
    hi: T,
    x_tol: T,
    f_tol: T,
) -> Result<T> {
    if !(x_tol > T::zero()) || !(f_tol >= T::zero()) {
        return Err(Error::domain("find_root tolerances must be positive"));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
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
        let tol1 = two * T::epsilon() * b.abs() + half * x_tol;
        let xm = half * (c - b);
        if fb.abs() < f_tol || xm.abs() <= tol1 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
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
        b = if d.abs() > tol1 { b + d } else { b + tol1 * xm.signum() };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::numeric(format!("find_root: non-finite f at x = {b}")));
        }
    }
    Err(Error::NonConvergence {
        message: "find_root".into(),
        partial: b.as_f64(),
        error_estimate: (c - b).abs().as_f64(),
    })
}

/// Plain bisection; slow but independent of [`find_root`], used as an oracle.
pub fn bisect<T: Real>(mut f: impl FnMut(T) -> T, mut lo: T, mut hi: T, tol: T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: flo.as_f64(),
            f_hi: fhi.as_f64(),
        });
    }
    while hi - lo > tol {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(T::lit(0.5) * (lo + hi))
}
