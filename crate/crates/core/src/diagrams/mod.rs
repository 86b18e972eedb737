//! Loop diagrams φ^{⋆n}(0) and theta diagrams φ^{⋆n1⋆n2·n3}(0), evaluated
//! by the fastest valid route per kernel family.

pub mod grid;
pub mod sphere;

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelFamily};
use crate::logdomain::LogValue;
use crate::quad::integrate_log_signed;
use crate::ratpoly::{rat_from_f64, PiecewisePoly, Rat};
use crate::special::ball_geometry;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagramId {
    Loop(u32),
    /// Indices stored sorted ascending (the diagram is permutation invariant).
    Theta(u32, u32, u32),
}

impl DiagramId {
    pub fn theta(n1: u32, n2: u32, n3: u32) -> Self {
        let mut v = [n1, n2, n3];
        v.sort_unstable();
        DiagramId::Theta(v[0], v[1], v[2])
    }

    /// Exponent of q_φ that makes the diagram scale invariant.
    pub fn mass_exponent(&self) -> i32 {
        match self {
            DiagramId::Loop(n) => *n as i32 - 1,
            DiagramId::Theta(a, b, c) => (a + b + c) as i32 - 2,
        }
    }
}

impl fmt::Display for DiagramId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramId::Loop(n) => write!(f, "loop{n}"),
            DiagramId::Theta(a, b, c) => write!(f, "theta{a}{b}{c}"),
        }
    }
}

impl std::str::FromStr for DiagramId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(num) = s.strip_prefix("loop") {
            let n: u32 = num
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad loop id {s:?}")))?;
            if n < 2 {
                return Err(Error::InvalidInput("loop order must be >= 2".into()));
            }
            return Ok(DiagramId::Loop(n));
        }
        if let Some(rest) = s.strip_prefix("theta") {
            let digits: Vec<u32> = rest.chars().filter_map(|c| c.to_digit(10)).collect();
            if digits.len() == 3 && rest.chars().all(|c| c.is_ascii_digit()) {
                if digits.iter().any(|&n| n == 0) {
                    return Err(Error::InvalidInput("theta indices must be >= 1".into()));
                }
                return Ok(DiagramId::theta(digits[0], digits[1], digits[2]));
            }
        }
        Err(Error::InvalidInput(format!(
            "unrecognized diagram id {s:?} (expected loopN or thetaABC)"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    BetaQuadrature,
    BesselDoubleIntegral,
    GridConvolution,
    RadialFourierQuadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed_form",
            Method::BetaQuadrature => "beta_quadrature",
            Method::BesselDoubleIntegral => "bessel_double_integral",
            Method::GridConvolution => "grid_convolution",
            Method::RadialFourierQuadrature => "radial_fourier_quadrature",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramValue {
    pub value: LogValue,
    pub method: Method,
    /// Estimated relative accuracy of the value (equivalently, absolute
    /// accuracy of its natural log); closed forms report 0.
    pub abs_error_estimate: f64,
}

/// φ^{⋆n}(0).
pub fn loop_value(kernel: &Kernel, n: u32) -> Result<DiagramValue> {
    if n < 2 {
        return Err(Error::InvalidInput("loop order must be >= 2".into()));
    }
    diagram_value(kernel, DiagramId::Loop(n))
}

/// φ^{⋆n1⋆n2·n3}(0), canonicalized over permutations.
pub fn theta_value(kernel: &Kernel, n1: u32, n2: u32, n3: u32) -> Result<DiagramValue> {
    if n1 < 1 || n2 < 1 || n3 < 1 {
        return Err(Error::InvalidInput("theta indices must be >= 1".into()));
    }
    diagram_value(kernel, DiagramId::theta(n1, n2, n3))
}

/// Diagram divided by q_φ^k with k the scale-invariance exponent.
pub fn normalized_diagram(kernel: &Kernel, id: DiagramId) -> Result<DiagramValue> {
    let raw = diagram_value(kernel, id)?;
    let q_pow = kernel.log_mass.powi(id.mass_exponent());
    Ok(DiagramValue {
        value: raw.value.div(&q_pow),
        ..raw
    })
}

pub fn diagram_value(kernel: &Kernel, id: DiagramId) -> Result<DiagramValue> {
    if let Some(hit) = kernel.cache.read().expect("cache lock").get(&id) {
        return Ok(*hit);
    }
    let computed = compute_diagram(kernel, id)?;
    kernel
        .cache
        .write()
        .expect("cache lock")
        .insert(id, computed);
    Ok(computed)
}

fn compute_diagram(kernel: &Kernel, id: DiagramId) -> Result<DiagramValue> {
    let d = kernel.d();
    match &kernel.spec.family {
        KernelFamily::HyperCube { side } => {
            let l = rat_from_f64(*side)
                .ok_or_else(|| Error::InvalidKernel("cube side not finite".into()))?;
            let v1 = match id {
                DiagramId::Loop(n) => cube_loop_rational(&l, n),
                DiagramId::Theta(a, b, c) => cube_theta_rational(&l, a, b, c),
            };
            Ok(DiagramValue {
                value: LogValue::from_ln(d as f64 * ln_rat(&v1), 1),
                method: Method::ClosedForm,
                abs_error_estimate: 0.0,
            })
        }
        KernelFamily::Gaussian { amplitude, sigma } => {
            let df = d as f64;
            let base = (2.0 * std::f64::consts::PI * sigma * sigma).ln();
            let ln = match id {
                DiagramId::Loop(n) => {
                    n as f64 * amplitude.ln() - df / 2.0 * ((n as f64).ln() + base)
                }
                DiagramId::Theta(a, b, c) => {
                    let pairs = (a * b + a * c + b * c) as f64;
                    (a + b + c) as f64 * amplitude.ln() - df / 2.0 * (pairs.ln() + 2.0 * base)
                }
            };
            Ok(DiagramValue {
                value: LogValue::from_ln(ln, 1),
                method: Method::ClosedForm,
                abs_error_estimate: 0.0,
            })
        }
        KernelFamily::CoordCauchy { amplitude, gamma } => {
            let df = d as f64;
            let base = (gamma * std::f64::consts::PI).ln();
            let ln = match id {
                DiagramId::Loop(n) => n as f64 * amplitude.ln() - df * ((n as f64).ln() + base),
                DiagramId::Theta(a, b, c) => {
                    let num = (a + b + c) as f64;
                    let den = ((a + b) * (a + c) * (b + c)) as f64;
                    num.ln().mul_add(df, (a + b + c) as f64 * amplitude.ln())
                        - df * (den.ln() + 2.0 * base)
                }
            };
            Ok(DiagramValue {
                value: LogValue::from_ln(ln, 1),
                method: Method::ClosedForm,
                abs_error_estimate: 0.0,
            })
        }
        KernelFamily::HyperSphere { .. } => sphere_diagram(kernel, id),
        KernelFamily::GenericProduct { profile } => {
            let r = grid::oracle_grid_diagram(profile, id, d);
            if !(r.value_1d > 0.0) {
                return Err(Error::Numerical(format!(
                    "grid diagram {id} non-positive at d={d}"
                )));
            }
            Ok(DiagramValue {
                value: LogValue::from_ln(r.ln_value, 1),
                method: Method::GridConvolution,
                abs_error_estimate: if r.resolution_warning { 1e-4 } else { 1e-9 },
            })
        }
        KernelFamily::GenericRadial { .. } => radial_fourier_diagram(kernel, id),
    }
}

fn sphere_diagram(kernel: &Kernel, id: DiagramId) -> Result<DiagramValue> {
    let d = kernel.d();
    // unit-volume normalized value, then rescaled by the mass exponent
    let (unit_ln, method, err) = match id {
        DiagramId::Loop(2) => (0.0, Method::ClosedForm, 0.0),
        DiagramId::Loop(3) => (sphere::loop3_ln(d)?, Method::ClosedForm, 0.0),
        DiagramId::Loop(4) => {
            let (v, e) = sphere::beta_route_ln(d, 2, 2.0)?;
            (v, Method::BetaQuadrature, e)
        }
        DiagramId::Loop(5) => {
            let (v, e) = sphere::nested_bessel_ln(d, 3, 2.0)?;
            (v, Method::BesselDoubleIntegral, e)
        }
        DiagramId::Loop(6) => {
            let (v, e) = sphere::nested_bessel_ln(d, 4, 2.0)?;
            (v, Method::BesselDoubleIntegral, e)
        }
        DiagramId::Loop(n) => {
            let (v, e) = sphere::loop_fourier_ln(d, n)?;
            (v, Method::RadialFourierQuadrature, e)
        }
        DiagramId::Theta(1, 2, 2) => {
            let (v, e) = sphere::beta_route_ln(d, 2, 1.0)?;
            (v, Method::BetaQuadrature, e)
        }
        DiagramId::Theta(2, 2, 2) => {
            let (v, e) = sphere::beta_route_ln(d, 3, 2.0)?;
            (v, Method::BetaQuadrature, e)
        }
        DiagramId::Theta(1, 2, 3) => {
            let (v, e) = sphere::nested_bessel_ln(d, 3, 1.0)?;
            (v, Method::BesselDoubleIntegral, e)
        }
        DiagramId::Theta(a, b, c) => {
            return Err(Error::Unsupported(format!(
                "hyper-sphere theta({a},{b},{c}) has no implemented route"
            )))
        }
    };
    let q_pow = kernel.log_mass.powi(id.mass_exponent());
    Ok(DiagramValue {
        value: LogValue::from_ln(unit_ln, 1).mul(&q_pow),
        method,
        abs_error_estimate: err,
    })
}

fn radial_fourier_diagram(kernel: &Kernel, id: DiagramId) -> Result<DiagramValue> {
    let n = match id {
        DiagramId::Loop(n) => n,
        DiagramId::Theta(..) => {
            return Err(Error::Unsupported(
                "theta diagrams are not implemented for tabulated radial kernels".into(),
            ))
        }
    };
    let table = match &kernel.spec.family {
        KernelFamily::GenericRadial { table } => table,
        _ => unreachable!(),
    };
    let fhat = table.fourier.as_ref().ok_or_else(|| {
        Error::Unsupported("radial kernel diagrams need a tabulated Fourier transform".into())
    })?;
    let d = kernel.d();
    let df = d as f64;
    let k_max = fhat.x0 + (fhat.values.len() - 1) as f64 * fhat.dx;
    let geo = ball_geometry(d);
    let pref = geo.ln_sphere_surface - df * (2.0 * std::f64::consts::PI).ln();
    let g = |k: f64| -> LogValue {
        if k <= 0.0 {
            return LogValue::ZERO;
        }
        let f = fhat.eval(k);
        if f == 0.0 {
            return LogValue::ZERO;
        }
        let ln = (df - 1.0) * k.ln() + n as f64 * f.abs().ln();
        let sign = if f > 0.0 || n % 2 == 0 { 1 } else { -1 };
        LogValue::from_ln(ln, sign)
    };
    let (v, e) = integrate_log_signed(g, 0.0, k_max, 1e-9, 64);
    if v.sign <= 0 {
        return Err(Error::Numerical(format!(
            "radial Fourier loop{n} non-positive at d={d}"
        )));
    }
    // the tabulated transform's truncation at k_max is the dominant unknown
    Ok(DiagramValue {
        value: LogValue::from_ln(pref + v.ln_abs, 1),
        method: Method::RadialFourierQuadrature,
        abs_error_estimate: e + 1e-6,
    })
}

/// Exact 1D loop value φ₁^{⋆n}(0) for the interval indicator of length `side`.
pub fn cube_loop_rational(side: &Rat, n: u32) -> Rat {
    assert!(n >= 2);
    let ind = PiecewisePoly::indicator(side);
    let conv = ind.self_convolution(n);
    conv.eval(&Rat::from(BigInt::zero()))
}

/// Exact 1D theta value for the interval indicator of length `side`.
pub fn cube_theta_rational(side: &Rat, n1: u32, n2: u32, n3: u32) -> Rat {
    let ind = PiecewisePoly::indicator(side);
    let f1 = ind.self_convolution(n1);
    let f2 = ind.self_convolution(n2);
    let f3 = ind.self_convolution(n3);
    match f1.mul(&f2).and_then(|p| p.mul(&f3)) {
        Some(prod) => prod.integral(),
        None => Rat::from(BigInt::zero()),
    }
}

/// ln of a positive rational with arbitrarily large numerator/denominator.
pub fn ln_rat(r: &Rat) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_big(r.numer()) - ln_big(r.denom())
}

fn ln_big(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits();
    if bits <= 1020 {
        n.to_f64().expect("positive bigint").ln()
    } else {
        let shift = bits - 53;
        let top = (n >> shift).to_f64().expect("shifted bigint");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests;
