//! Scalar root bracketing and refinement helpers.

/// Bisect a bracketed sign change of `f` down to `x_tol`, then polish with a
/// few secant iterations. `f(lo)` and `f(hi)` must have opposite signs.
pub fn bisect_then_secant<F>(mut lo: f64, mut hi: f64, mut f: F, x_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo.signum() != fhi.signum(), "bisect: bracket required");

    for _ in 0..240 {
        if (hi - lo).abs() < x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }

    // secant polish inside the final bracket
    let (mut x0, mut x1, mut f0, mut f1) = (lo, hi, flo, fhi);
    for _ in 0..8 {
        let denom = f1 - f0;
        if denom == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.is_finite() || x2 < lo.min(hi) || x2 > lo.max(hi) {
            break;
        }
        let f2 = f(x2);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if f1 == 0.0 || (x1 - x0).abs() < 0.01 * x_tol {
            break;
        }
    }
    if f1.abs() <= f0.abs() {
        x1
    } else {
        x0
    }
}

/// Plain bisection on a predicate boundary: `pred` is false at `lo`, true at
/// `hi` (or vice versa); returns the located switch point to `x_tol`.
pub fn bisect_predicate<P>(mut lo: f64, mut hi: f64, mut pred: P, x_tol: f64) -> f64
where
    P: FnMut(f64) -> bool,
{
    let plo = pred(lo);
    for _ in 0..240 {
        if (hi - lo).abs() < x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) == plo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section refinement of a local minimum of `f` inside [lo, hi].
pub fn refine_minimum<F>(mut lo: f64, mut hi: f64, mut f: F, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (hi - lo).abs() < x_tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cosine_root() {
        let r = bisect_then_secant(1.0, 2.0, |x| x.cos(), 1e-12);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn predicate_boundary() {
        let r = bisect_predicate(0.0, 2.0, |x| x > 1.25, 1e-10);
        assert!((r - 1.25).abs() < 1e-9);
    }

    #[test]
    fn minimum_of_parabola() {
        // flat minima resolve only to about sqrt(machine eps)
        let (x, fx) = refine_minimum(-1.0, 3.0, |x| (x - 0.7) * (x - 0.7) + 2.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-12);
    }
}
