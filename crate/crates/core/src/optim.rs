//! One-dimensional minimization of convex functions on an interval.

use crate::real::Real;

pub(crate) const GOLDEN_TOL: f64 = 1e-10;
pub(crate) const GOLDEN_MAX_ITER: usize = 200;

/// Golden-section search for the minimum of a convex `f` on `[lo, hi]`.
///
/// Returns the minimizer and the minimum; both endpoints are also probed so that boundary minima
/// of convex but non-strictly-convex objectives are found exactly.
pub(crate) fn golden_section<T: Real>(mut f: impl FnMut(T) -> T, lo: T, hi: T, tol: T, max_iter: usize) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a) > tol && iter < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
        iter += 1;
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}
