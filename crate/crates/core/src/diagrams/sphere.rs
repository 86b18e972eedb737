//! Loop and theta diagrams of the hyper-sphere kernel with unit-volume
//! radius (q_φ = 1), all in log domain.
//!
//! Routes: the intersection-volume (incomplete beta) forms for L3, L4,
//! T(1,2,2), T(2,2,2); nested Bessel double integrals for L5, L6, T(1,2,3);
//! and the radial Fourier representation for general loops.

use crate::error::{Error, Result};
use crate::logdomain::LogValue;
use crate::quad::{integrate_log, integrate_log_signed, GL8};
use crate::special::bessel::bessel_j_log;
use crate::special::{ln_inc_beta, ln_reg_inc_beta, log_gamma};

const LN_PI: f64 = 1.1447298858494002;

/// How far (in nats) below its peak the inner Bessel integrand is followed
/// before truncation.
const INNER_WINDOW_NATS: f64 = 40.0;

/// ln φ^{⋆3}(0) = ln[(3/2) I_{3/4}(d/2+1/2, 1/2)].
pub fn loop3_ln(d: u32) -> Result<f64> {
    let a = d as f64 / 2.0 + 0.5;
    Ok(1.5f64.ln() + ln_reg_inc_beta(a, 0.5, 0.75)?)
}

/// ln of d ∫_0^upper x^{d-1} I_{1-x²/4}(d/2+1/2, 1/2)^power dx.
///
/// Covers L4 (power 2, upper 2), T(1,2,2) (power 2, upper 1),
/// T(2,2,2) (power 3, upper 2) and the integral form of L3 (power 1, upper 1).
pub fn beta_route_ln(d: u32, power: i32, upper: f64) -> Result<(f64, f64)> {
    let df = d as f64;
    let a = df / 2.0 + 0.5;
    let g = |x: f64| {
        if x <= 0.0 || x >= 2.0 {
            return f64::NEG_INFINITY;
        }
        let arg = 1.0 - x * x / 4.0;
        match ln_reg_inc_beta(a, 0.5, arg) {
            Ok(ln_i) => (df - 1.0) * x.ln() + power as f64 * ln_i,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    // the integrand's peak narrows like 1/d near the upper endpoint, so the
    // initial split count grows with d to keep the scan from missing it
    let splits = (64 + d as usize / 16).min(512);
    let (v, err) = integrate_log(g, 0.0, upper, 1e-10, splits);
    if v.is_zero() {
        return Err(Error::Numerical(format!(
            "beta-route integral vanished (d={d}, power={power})"
        )));
    }
    Ok((df.ln() + v.ln_abs, err))
}

/// Fixed inner-quadrature nodes for ∫ k^{-s} J_ν(k)^p J_{ν-1}(kx) dk:
/// node positions, plus sign and ln-magnitude of w · k^{-s} J_ν(k)^p.
struct InnerNodes {
    ks: Vec<f64>,
    ln_pre: Vec<f64>,
    sign_pre: Vec<i8>,
}

fn inner_nodes(d: u32, p: i32, s: f64) -> InnerNodes {
    let nu = d as f64 / 2.0;
    // locate the envelope peak of k^{-s} J_ν(k)^p on a coarse grid
    let scan_hi = nu + 60.0 + 4.0 * nu.cbrt() * 10.0;
    let mut peak_ln = f64::NEG_INFINITY;
    let mut peak_k = nu.max(1.0);
    let mut k = 0.25;
    while k < scan_hi {
        let j = bessel_j_log(nu, k);
        if j.sign != 0 {
            let env = -s * k.ln() + p as f64 * j.ln_abs;
            if env > peak_ln {
                peak_ln = env;
                peak_k = k;
            }
        }
        k += 0.25;
    }
    // lower cutoff: J_ν rises monotonically below the turning point
    let mut k_lo = peak_k;
    while k_lo > 0.3 {
        let j = bessel_j_log(nu, k_lo);
        let env = -s * k_lo.ln() + p as f64 * j.ln_abs;
        if j.sign == 0 || env < peak_ln - INNER_WINDOW_NATS {
            break;
        }
        k_lo -= 0.25;
    }
    // upper cutoff from the oscillation amplitude sqrt(2/π) (k²-ν²)^{-1/4}
    let mut k_hi = peak_k.max(nu + 1.0) + 0.5;
    loop {
        let amp = 0.5 * (2.0 / std::f64::consts::PI).ln()
            - 0.25 * (k_hi * k_hi - nu * nu).ln();
        let env = -s * k_hi.ln() + p as f64 * amp;
        if env < peak_ln - INNER_WINDOW_NATS || k_hi > peak_k + 4000.0 {
            break;
        }
        k_hi += 0.5;
    }
    // composite Gauss-Legendre panels, ~4 points per unit k
    let panels = (((k_hi - k_lo) / 2.0).ceil() as usize).max(8);
    let h = (k_hi - k_lo) / panels as f64;
    let mut ks = Vec::with_capacity(panels * 8);
    let mut ln_pre = Vec::with_capacity(panels * 8);
    let mut sign_pre = Vec::with_capacity(panels * 8);
    for pnl in 0..panels {
        let mid = k_lo + (pnl as f64 + 0.5) * h;
        for (t, w) in GL8 {
            let kq = mid + 0.5 * h * t;
            let j = bessel_j_log(nu, kq);
            if j.sign == 0 {
                continue;
            }
            let ln = (w * 0.5 * h).ln() - s * kq.ln() + p as f64 * j.ln_abs;
            let sign = if p % 2 == 0 { 1 } else { j.sign };
            ks.push(kq);
            ln_pre.push(ln);
            sign_pre.push(sign);
        }
    }
    InnerNodes {
        ks,
        ln_pre,
        sign_pre,
    }
}

impl InnerNodes {
    /// ∫ k^{-s} J_ν(k)^p J_{ν-1}(kx) dk as a signed log value.
    fn eval(&self, nu: f64, x: f64) -> LogValue {
        // scale against the largest term to keep the signed sum in range
        let mut terms: Vec<(f64, f64)> = Vec::with_capacity(self.ks.len());
        let mut m = f64::NEG_INFINITY;
        for i in 0..self.ks.len() {
            let j = bessel_j_log(nu - 1.0, self.ks[i] * x);
            if j.sign == 0 {
                continue;
            }
            let ln = self.ln_pre[i] + j.ln_abs;
            let sg = self.sign_pre[i] as f64 * j.sign as f64;
            if ln > m {
                m = ln;
            }
            terms.push((ln, sg));
        }
        if terms.is_empty() {
            return LogValue::ZERO;
        }
        let mut sum = 0.0;
        for (ln, sg) in terms {
            let e = ln - m;
            if e > -745.0 {
                sum += sg * e.exp();
            }
        }
        if sum == 0.0 {
            LogValue::ZERO
        } else {
            LogValue::from_ln(m + sum.abs().ln(), if sum > 0.0 { 1 } else { -1 })
        }
    }
}

/// Nested Bessel route shared by L5 (p=3, upper 2), T(1,2,3) (p=3, upper 1)
/// and L6 (p=4, upper 2). Returns (ln value, relative error estimate).
pub fn nested_bessel_ln(d: u32, p: i32, upper: f64) -> Result<(f64, f64)> {
    let df = d as f64;
    let nu = df / 2.0;
    let a = nu + 0.5;
    let (s, ln2_coeff, n_gamma) = if p == 3 {
        (df, df, 3.0)
    } else {
        (1.5 * df, 1.5 * df, 4.0)
    };
    let pref = df.ln() + ln2_coeff * std::f64::consts::LN_2 + n_gamma * log_gamma(nu + 1.0)
        - log_gamma(0.5)
        - log_gamma(a);
    let nodes = inner_nodes(d, p, s);
    let g = |x: f64| -> LogValue {
        if x <= 0.0 || x >= 2.0 {
            return LogValue::ZERO;
        }
        let ln_b = match ln_inc_beta(a, 0.5, 1.0 - x * x / 4.0) {
            Ok(v) => v,
            Err(_) => return LogValue::ZERO,
        };
        let inner = nodes.eval(nu, x);
        if inner.sign == 0 {
            return LogValue::ZERO;
        }
        LogValue::from_ln(nu * x.ln() + ln_b + inner.ln_abs, inner.sign)
    };
    let (v, err) = integrate_log_signed(g, 0.0, upper, 1e-8, 32);
    if v.sign <= 0 {
        return Err(Error::Numerical(format!(
            "nested Bessel integral non-positive (d={d}, p={p}, upper={upper})"
        )));
    }
    // truncating the inner window contributes at most ~e^{-40} relatively
    Ok((pref + v.ln_abs, err + (-INNER_WINDOW_NATS).exp()))
}

/// General loop via the radial Fourier representation:
/// φ^{⋆n}(0) = d 2^{d(n/2-1)} Γ(d/2+1)^{n-2} ∫_0^∞ x^{-1-d(n/2-1)} J_{d/2}(x)^n dx.
pub fn loop_fourier_ln(d: u32, n: u32) -> Result<(f64, f64)> {
    let df = d as f64;
    let nu = df / 2.0;
    let nf = n as f64;
    let s = 1.0 + df * (nf / 2.0 - 1.0); // power-law exponent of the prefactor
    // decay of the envelope beyond the turning point: x^{-s} * x^{-n/2}
    let decay = s + nf / 2.0 - 1.0;
    if decay < 5.0 {
        return Err(Error::Unsupported(format!(
            "radial Fourier loop route needs faster decay (d={d}, n={n})"
        )));
    }
    let pref = df.ln() + df * (nf / 2.0 - 1.0) * std::f64::consts::LN_2
        + (nf - 2.0) * log_gamma(nu + 1.0);
    let nodes = inner_nodes(d, n as i32, s);
    // reuse the node machinery directly: sum of w x^{-s} J^n
    let mut m = f64::NEG_INFINITY;
    for ln in &nodes.ln_pre {
        if *ln > m {
            m = *ln;
        }
    }
    let mut sum = 0.0;
    for i in 0..nodes.ks.len() {
        let e = nodes.ln_pre[i] - m;
        if e > -745.0 {
            sum += nodes.sign_pre[i] as f64 * e.exp();
        }
    }
    if sum <= 0.0 {
        return Err(Error::Numerical(format!(
            "radial Fourier loop integral non-positive (d={d}, n={n})"
        )));
    }
    Ok((pref + m + sum.ln(), 1e-8 + (-INNER_WINDOW_NATS).exp()))
}

/// ln of the loop-3 asymptotic sqrt(27/(2πd)) (3/4)^{d/2}.
pub fn loop3_asymptotic_ln(d: u32) -> f64 {
    let df = d as f64;
    0.5 * (27.0 / (2.0 * std::f64::consts::PI * df)).ln() + (df / 2.0) * 0.75f64.ln()
}

/// ln of the loop-4 asymptotic sqrt(32/(3πd)) (16/27)^{d/2}.
pub fn loop4_asymptotic_ln(d: u32) -> f64 {
    let df = d as f64;
    0.5 * (32.0 / (3.0 * std::f64::consts::PI * df)).ln() + (df / 2.0) * (16.0f64 / 27.0).ln()
}

/// Corollary-level loop3 term computed through the literal Γ-and-B form
/// (3/(2√π)) Γ(d/2+1)/Γ(d/2+1/2) B(3/4; d/2+1/2, 1/2) — a partially
/// independent assembly used to cross-check loop3_ln.
pub fn loop3_corollary_ln(d: u32) -> Result<f64> {
    let a = d as f64 / 2.0 + 0.5;
    let ln_b = ln_inc_beta(a, 0.5, 0.75)?;
    Ok((1.5f64).ln() - 0.5 * LN_PI + log_gamma(a + 0.5) - log_gamma(a) + ln_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn loop3_matches_integral_form_and_corollary() {
        for d in [3u32, 10, 57, 200] {
            let closed = loop3_ln(d).unwrap();
            let (integral, _) = beta_route_ln(d, 1, 1.0).unwrap();
            assert_relative_eq!(closed, integral, max_relative = 1e-7);
            let cor = loop3_corollary_ln(d).unwrap();
            assert_relative_eq!(closed, cor, max_relative = 1e-11);
        }
    }

    #[test]
    fn loop3_deep_dimension_anchor() {
        // ln(1.32e-314) — reference from the closed form at d=5000
        let ln = loop3_ln(5000).unwrap();
        let want = 1.32e-2f64.ln() - 312.0 * 10f64.ln();
        assert!((ln - want).abs() / want.abs() < 0.005, "got {ln}, want ~{want}");
    }

    #[test]
    fn loop34_asymptotics() {
        let l3 = loop3_ln(500).unwrap().exp();
        let want3 = loop3_asymptotic_ln(500).exp();
        assert!((l3 - want3).abs() / want3 < 0.02);
        let (l4_ln, _) = beta_route_ln(200, 2, 2.0).unwrap();
        let want4 = loop4_asymptotic_ln(200);
        assert!((l4_ln.exp() - want4.exp()).abs() / want4.exp() < 0.02);
    }

    #[test]
    fn general_fourier_loop_agrees_with_beta_routes() {
        for d in [10u32, 25] {
            let (l4_beta, _) = beta_route_ln(d, 2, 2.0).unwrap();
            let (l4_fourier, _) = loop_fourier_ln(d, 4).unwrap();
            assert_relative_eq!(l4_beta, l4_fourier, max_relative = 1e-6);
        }
    }

    #[test]
    fn nested_route_anchor_small() {
        // L5 at d=10 cross-checked against the general Fourier representation
        let (l5_nested, _) = nested_bessel_ln(10, 3, 2.0).unwrap();
        let (l5_fourier, _) = loop_fourier_ln(10, 5).unwrap();
        assert_relative_eq!(l5_nested, l5_fourier, max_relative = 1e-5);
    }
}
