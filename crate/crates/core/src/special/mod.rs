//! Special functions needed by the diagram formulas: log-gamma, the
//! regularized incomplete beta function (including its logarithm, which is the
//! quantity that survives to very high dimension), and the geometry of the
//! unit-volume ball.

pub mod bessel;

use crate::error::{Error, Result};

/// Bernoulli-number coefficients B_{2n} / (2n (2n-1)) of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// ln Γ(x) for x > 0, relative error ~1e-14.
///
/// Stirling's series for x >= 10; smaller arguments are shifted up with
/// Γ(x+1) = x Γ(x).
pub fn log_gamma(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "log_gamma requires x > 0");
    let mut shift = 0.0;
    let mut z = x;
    while z < 10.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let mut series = 0.0;
    let z2 = z * z;
    let mut zp = z;
    for c in STIRLING {
        series += c / zp;
        zp *= z2;
    }
    shift + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a+b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    log_gamma(a) + log_gamma(b) - log_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (Lentz's algorithm).
///
/// Returns the CF part; the caller multiplies by x^a (1-x)^b / (a B(a,b)).
/// Converges quickly when x < (a+1)/(a+b+2).
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    let max_iter = 400;
    let eps = 1e-16;
    let tiny = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=max_iter {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < eps {
            return Ok(h);
        }
    }
    Err(Error::Numerical(format!(
        "incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )))
}

/// ln I_x(a, b), the log of the regularized incomplete beta function.
///
/// The log form matters: at a ~ 2500 the function value sits near exp(-723)
/// and the plain value underflows products downstream.
pub fn ln_reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
        let cf = beta_cf(a, b, x)?;
        Ok(ln_front + (cf / a).ln())
    } else {
        // I_x(a,b) = 1 - I_{1-x}(b,a), with the complement computed on its
        // fast-converging side.
        let ln_comp = ln_reg_inc_beta(b, a, 1.0 - x)?;
        let comp = ln_comp.exp();
        if comp >= 1.0 {
            Err(Error::Numerical(format!(
                "regularized beta lost all precision (a={a}, b={b}, x={x})"
            )))
        } else {
            Ok((-comp).ln_1p())
        }
    }
}

/// I_x(a, b); underflows to 0 when ln I < ~ -745.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    Ok(ln_reg_inc_beta(a, b, x)?.exp())
}

/// ln of the unregularized B(x; a, b) = B(a,b) I_x(a,b).
pub fn ln_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    Ok(ln_beta(a, b) + ln_reg_inc_beta(a, b, x)?)
}

/// Geometry of the d-dimensional ball.
#[derive(Debug, Clone, Copy)]
pub struct BallGeometry {
    pub d: u32,
    /// ln of the volume of the unit-radius ball.
    pub ln_unit_ball_volume: f64,
    /// ln of the surface area of the unit sphere S^{d-1}.
    pub ln_sphere_surface: f64,
    /// Radius of the ball of unit volume: pi^{-1/2} Γ(d/2+1)^{1/d}.
    pub unit_volume_radius: f64,
}

pub fn ball_geometry(d: u32) -> BallGeometry {
    assert!(d >= 1);
    let df = d as f64;
    let ln_pi = std::f64::consts::PI.ln();
    let lg = log_gamma(df / 2.0 + 1.0);
    let ln_vol = (df / 2.0) * ln_pi - lg;
    BallGeometry {
        d,
        ln_unit_ball_volume: ln_vol,
        ln_sphere_surface: df.ln() + ln_vol,
        unit_volume_radius: (lg / df - 0.5 * ln_pi).exp(),
    }
}
