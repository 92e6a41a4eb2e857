//! Scalar root finding used by the timing solves and the shooting method.

use crate::error::{Error, Result};

/// Bisection on a bracketing interval, to absolute tolerance `xtol` on
/// the abscissa. `f(lo)` and `f(hi)` must have opposite signs.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {flo:.3e} and f({hi}) = {fhi:.3e} have the same sign"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A few Newton polish steps with a central-difference derivative,
/// keeping the best iterate by |f|. Used after bisection on smooth
/// monotone functions where the derivative is not available in closed form.
pub fn newton_polish<F>(mut f: F, x0: f64, steps: usize, fd_step: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut x = x0;
    let mut best = x0;
    let mut best_abs = f(x0).abs();
    for _ in 0..steps {
        let fx = f(x);
        let d = (f(x + fd_step) - f(x - fd_step)) / (2.0 * fd_step);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        x -= fx / d;
        if !x.is_finite() {
            return best;
        }
        let fa = f(x).abs();
        if fa < best_abs {
            best_abs = fa;
            best = x;
        }
    }
    best
}

/// Regula falsi with the Illinois modification on a bracketing interval.
///
/// Converges to `xtol` on the abscissa or `ftol` on the residual,
/// whichever comes first; the bracket never widens, so a steep interior
/// transition (as in shooting residuals near a close encounter) cannot
/// throw the iteration out.
pub fn illinois<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, ftol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {flo:.3e} and f({hi}) = {fhi:.3e} have the same sign"
        )));
    }
    let mut side = 0i8;
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..120 {
        let x = (flo * hi - fhi * lo) / (flo - fhi);
        // Guard against stagnation at an endpoint.
        let x = if !(x > lo.min(hi) && x < lo.max(hi)) { 0.5 * (lo + hi) } else { x };
        let fx = f(x)?;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 || fx.abs() <= ftol || (hi - lo).abs() <= xtol {
            return Ok(best.0);
        }
        if fx.signum() != flo.signum() {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        } else {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        }
    }
    if best.1.abs() <= ftol.max(1e-9) {
        Ok(best.0)
    } else {
        Err(Error::NoConvergence(format!(
            "illinois stalled with residual {:.3e} at x = {}",
            best.1, best.0
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bisect_finds_cubic_root() {
        let root = bisect(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(root, 2.0f64.powf(1.0 / 3.0), epsilon = 1e-12);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn newton_polish_improves_residual() {
        let f = |x: f64| x.exp() - 3.0;
        let coarse = bisect(f, 0.0, 2.0, 1e-4).unwrap();
        let fine = newton_polish(f, coarse, 3, 1e-6);
        assert!(f(fine).abs() < f(coarse).abs().max(1e-13));
        assert_abs_diff_eq!(fine, 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn illinois_handles_steep_transition() {
        // Nearly a step function: tanh with a very steep slope.
        let f = |x: f64| Ok(((x - 0.7) * 4000.0).tanh() + x * 1e-3);
        let root = illinois(f, 0.0, 1.0, 1e-13, 1e-13).unwrap();
        let fr: f64 = (((root - 0.7) * 4000.0) as f64).tanh() + root * 1e-3;
        assert!(fr.abs() < 1e-10);
    }
}
