//! Small numerical kernels: adaptive Simpson quadrature, fixed-step RK4 and
//! bisection.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over [a, b] to relative tolerance `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    if !whole.is_finite() {
        return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
    }
    // absolute target derived from the coarse estimate; refined once below
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    let result = simpson_step(&f, a, b, fa, fm, fb, whole, rel_tol * scale, MAX_DEPTH)?;
    Ok(result)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Numerical(format!("non-finite integrand near {m}")));
    }
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// ∫ f over [a, b] after substituting x = a + u², which removes an
/// inverse-square-root singularity at `a`.
pub fn simpson_sqrt_endpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let span = (b - a).sqrt();
    // the transformed integrand is finite at u = 0; take its limit from a
    // point just inside the interval
    let u_min = span * 1e-12;
    adaptive_simpson(
        |u| {
            let u = u.max(u_min);
            2.0 * u * f(a + u * u)
        },
        0.0,
        span,
        rel_tol,
    )
}

/// Classic fourth-order Runge–Kutta for a scalar ODE y' = f(x, y), returning
/// the solution at every step boundary (n_steps + 1 points).
pub fn rk4<F: Fn(f64, f64) -> f64>(f: F, x0: f64, y0: f64, x1: f64, n_steps: usize) -> Vec<(f64, f64)> {
    let n = n_steps.max(1);
    let h = (x1 - x0) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push((x0, y));
    for i in 0..n {
        let x = x0 + i as f64 * h;
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(x + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((x0 + (i + 1) as f64 * h, y));
    }
    out
}

/// Bisection for a sign change of `f` on [lo, hi] down to width `x_tol`.
/// Returns the upper end of the final bracket, i.e. the first point where the
/// sign has flipped.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::Numerical(format!("no sign change on [{lo}, {hi}]")));
    }
    let lo_negative = flo < 0.0;
    while hi - lo > x_tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
