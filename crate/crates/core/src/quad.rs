//! Quadrature: adaptive Simpson on linear scale, a log-domain wrapper for
//! integrands with enormous dynamic range, and fixed Gauss-Legendre panels
//! for smooth oscillatory inner integrals.

use crate::logdomain::LogValue;

/// Nodes/weights of the 8-point Gauss-Legendre rule on [-1, 1].
pub const GL8: [(f64, f64); 8] = [
    (-0.9602898564975363, 0.10122853629037626),
    (-0.7966664774136267, 0.22238103445337448),
    (-0.525532409916329, 0.31370664587788727),
    (-0.18343464249564978, 0.3626837833783620),
    (0.18343464249564978, 0.3626837833783620),
    (0.525532409916329, 0.31370664587788727),
    (0.7966664774136267, 0.22238103445337448),
    (0.9602898564975363, 0.10122853629037626),
];

/// Integrate f over [a, b] with composite 8-point Gauss-Legendre panels.
pub fn gauss_panels<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL8 {
            s += w * f(mid + half * x);
        }
        total += s * half;
    }
    total
}

struct SimpsonCtx<'a> {
    f: &'a mut dyn FnMut(f64) -> f64,
    tol: f64,
    max_depth: u32,
    err_accum: f64,
}

fn simpson_step(ctx: &mut SimpsonCtx, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (ctx.f)(lm);
    let frm = (ctx.f)(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= ctx.max_depth || delta.abs() <= 15.0 * ctx.tol {
        ctx.err_accum += delta.abs() / 15.0;
        left + right + delta / 15.0
    } else {
        let half_tol = ctx.tol / 2.0;
        let saved = ctx.tol;
        ctx.tol = half_tol;
        let l = simpson_step(ctx, a, m, fa, flm, fm, left, depth + 1);
        let r = simpson_step(ctx, m, b, fm, frm, fb, right, depth + 1);
        ctx.tol = saved;
        l + r
    }
}

/// Adaptive Simpson quadrature; returns (value, error estimate).
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut ctx = SimpsonCtx {
        f: &mut f,
        tol,
        max_depth: 40,
        err_accum: 0.0,
    };
    let v = simpson_step(&mut ctx, a, b, fa, fm, fb, whole, 0);
    (v, ctx.err_accum)
}

/// Integrate exp(g(x)) over [a, b] where g is the natural log of a
/// nonnegative integrand, returning the result in log form.
///
/// The integrand may span thousands of nats (and may have a peak of width
/// O(1/d) hiding near an endpoint), so the domain is first scanned on a fine
/// grid to locate the maximum, then each of the `initial_splits` subintervals
/// is integrated adaptively on the rescaled integrand exp(g - g_max).
///
/// Returns (value, relative error estimate).
pub fn integrate_log<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    initial_splits: usize,
) -> (LogValue, f64) {
    assert!(b > a);
    let scan_n = (initial_splits * 16).max(512);
    let mut g_max = f64::NEG_INFINITY;
    for i in 0..=scan_n {
        let x = a + (b - a) * i as f64 / scan_n as f64;
        let v = g(x);
        if v > g_max {
            g_max = v;
        }
    }
    if g_max == f64::NEG_INFINITY {
        return (LogValue::ZERO, 0.0);
    }
    let h = |x: f64| {
        let v = g(x) - g_max;
        if v < -745.0 {
            0.0
        } else {
            v.exp()
        }
    };
    let mut total = 0.0;
    let mut err = 0.0;
    let width = (b - a) / initial_splits as f64;
    // rough scale of the integral of the rescaled integrand, for tolerance
    let scale_guess = width.min(b - a);
    for i in 0..initial_splits {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == initial_splits { b } else { lo + width };
        let (v, e) = adaptive_simpson(h, lo, hi, rel_tol * scale_guess / initial_splits as f64);
        total += v;
        err += e;
    }
    if total <= 0.0 {
        return (LogValue::ZERO, 0.0);
    }
    (
        LogValue::from_ln(g_max + total.ln(), 1),
        (err / total).abs(),
    )
}

/// Signed variant: integrand supplied as a LogValue (sign * exp(ln)).
/// Used for Bessel-product integrands that oscillate through zero.
pub fn integrate_log_signed<F: Fn(f64) -> LogValue>(
    g: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    initial_splits: usize,
) -> (LogValue, f64) {
    assert!(b > a);
    let scan_n = (initial_splits * 16).max(512);
    let mut g_max = f64::NEG_INFINITY;
    for i in 0..=scan_n {
        let x = a + (b - a) * i as f64 / scan_n as f64;
        let v = g(x);
        if v.sign != 0 && v.ln_abs > g_max {
            g_max = v.ln_abs;
        }
    }
    if g_max == f64::NEG_INFINITY {
        return (LogValue::ZERO, 0.0);
    }
    let h = |x: f64| {
        let v = g(x);
        if v.sign == 0 || v.ln_abs - g_max < -745.0 {
            0.0
        } else {
            v.sign as f64 * (v.ln_abs - g_max).exp()
        }
    };
    let mut total = 0.0;
    let mut err = 0.0;
    let width = (b - a) / initial_splits as f64;
    for i in 0..initial_splits {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == initial_splits { b } else { lo + width };
        let (v, e) = adaptive_simpson(h, lo, hi, rel_tol * width / initial_splits as f64);
        total += v;
        err += e;
    }
    if total == 0.0 {
        return (LogValue::ZERO, 0.0);
    }
    (
        LogValue::from_ln(g_max + total.abs().ln(), if total > 0.0 { 1 } else { -1 }),
        (err / total.abs()).abs(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_and_transcendental() {
        let (v, _) = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
        let (v, e) = adaptive_simpson(|x| (-x).exp(), 0.0, 5.0, 1e-12);
        assert_relative_eq!(v, 1.0 - (-5.0f64).exp(), max_relative = 1e-10);
        assert!(e < 1e-8);
    }

    #[test]
    fn gauss_panels_oscillatory() {
        let v = gauss_panels(|x| x.sin(), 0.0, 20.0, 40);
        assert_relative_eq!(v, 1.0 - 20.0f64.cos(), max_relative = 1e-12);
    }

    #[test]
    fn log_integrator_huge_exponent() {
        // int_0^1 exp(-1000 + 500 x) dx = (e^{-500} - e^{-1000}) / 500
        let (v, err) = integrate_log(|x| -1000.0 + 500.0 * x, 0.0, 1.0, 1e-10, 16);
        let want = -500.0 - 500.0f64.ln(); // ln of the dominant part
        assert_relative_eq!(v.ln_abs, want, max_relative = 1e-10);
        assert!(err < 1e-8);
    }

    #[test]
    fn log_integrator_narrow_boundary_peak() {
        // Gaussian spike of width 2e-4 centered at x = 0.9999: the scan plus
        // adaptive refinement must not lose it.
        let c = 0.9999;
        let w = 2e-4;
        let (v, _) = integrate_log(
            |x| -((x - c) / w).powi(2) / 2.0 - 300.0,
            0.0,
            1.0,
            1e-9,
            64,
        );
        let exact_ln = {
            // integral = w sqrt(pi/2) (erf((1-c)/(w sqrt2)) + erf(c/(w sqrt2)))
            let erf = |t: f64| {
                // Abramowitz-Stegun 7.1.26, enough for a 1e-3 check
                let s = t.signum();
                let t = t.abs();
                let p = 0.3275911;
                let u = 1.0 / (1.0 + p * t);
                let poly = u
                    * (0.254829592
                        + u * (-0.284496736 + u * (1.421413741 + u * (-1.453152027 + u * 1.061405429))));
                s * (1.0 - poly * (-t * t).exp())
            };
            let sqrt2 = std::f64::consts::SQRT_2;
            let integral = w * (std::f64::consts::PI / 2.0).sqrt()
                * (erf((1.0 - c) / (w * sqrt2)) + erf(c / (w * sqrt2)));
            -300.0 + integral.ln()
        };
        assert!(
            (v.ln_abs - exact_ln).abs() < 1e-3,
            "got {} want {}",
            v.ln_abs,
            exact_ln
        );
    }
}
