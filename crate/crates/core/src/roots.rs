//! Derivative-free scalar root finding on a bracket.

use crate::error::{Error, Result};

/// Brent's method: bisection safeguarded inverse-quadratic interpolation.
/// Stops when the bracket is narrower than `xtol`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NoBracket { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
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
        fb = f(b);
    }
    Ok(b)
}

/// All sign changes of `f` on `[lo, hi]` found from a uniform pre-scan with
/// spacing at most `step`, each refined with [`brent`]. Roots closer than
/// `merge` are reported once.
pub fn scan_roots<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    xtol: f64,
    merge: f64,
) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && step > 0.0) {
        return Err(Error::InvalidGrid(format!("search range [{lo}, {hi}] step {step}")));
    }
    let n = (((hi - lo) / step).ceil() as usize).max(1);
    let grid: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots: Vec<f64> = Vec::new();
    for k in 0..n {
        let (x0, x1) = (grid[k], grid[k + 1]);
        let (f0, f1) = (values[k], values[k + 1]);
        let root = if f0 == 0.0 {
            Some(x0)
        } else if f1 == 0.0 {
            Some(x1)
        } else if f0.signum() != f1.signum() {
            Some(brent(&mut f, x0, x1, xtol)?)
        } else {
            None
        };
        if let Some(r) = root {
            if roots.last().is_none_or(|&last| r - last > merge) {
                roots.push(r);
            }
        }
    }
    Ok(roots)
}
