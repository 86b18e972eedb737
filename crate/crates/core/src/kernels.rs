//! Connection functions φ: the four named model families plus generic
//! product/radial kernels, with mass, pointwise evaluation and Fourier access.

use crate::diagrams::{DiagramId, DiagramValue};
use crate::error::{Error, Result};
use crate::logdomain::LogValue;
use crate::special::{ball_geometry, bessel::bessel_j_log, log_gamma};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

pub const DEFAULT_PROFILE_NODES: usize = 1 << 14;

/// Uniformly sampled 1D profile, linearly interpolated, zero outside the grid.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Profile1d {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl Profile1d {
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, nodes: usize) -> Self {
        assert!(hi > lo && nodes >= 2);
        let dx = (hi - lo) / (nodes - 1) as f64;
        Profile1d {
            x0: lo,
            dx,
            values: (0..nodes).map(|i| f(lo + i as f64 * dx)).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.dx;
        if t < 0.0 || t > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Exact integral of the piecewise-linear interpolant (trapezoid rule).
    pub fn mass(&self) -> f64 {
        let s: f64 = self.values.iter().sum();
        self.dx * (s - 0.5 * (self.values[0] + self.values[self.values.len() - 1]))
    }

    /// ∫ cos(kx) φ₁(x) dx via per-segment Simpson (segments are dx-fine).
    pub fn cos_transform(&self, k: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.values.len() - 1 {
            let a = self.x0 + i as f64 * self.dx;
            let b = a + self.dx;
            let m = 0.5 * (a + b);
            let fa = self.values[i] * (k * a).cos();
            let fm = self.eval(m) * (k * m).cos();
            let fb = self.values[i + 1] * (k * b).cos();
            total += self.dx / 6.0 * (fa + 4.0 * fm + fb);
        }
        total
    }

    /// Coarser profile keeping every other node (for Richardson checks).
    /// Both grids then hold exact samples; inserting midpoints by
    /// interpolation instead would degrade the finer grid. Needs an odd
    /// node count so the endpoints survive.
    pub fn decimated(&self) -> Option<Profile1d> {
        let n = self.values.len();
        if n < 5 || n % 2 == 0 {
            return None;
        }
        Some(Profile1d {
            x0: self.x0,
            dx: self.dx * 2.0,
            values: self.values.iter().copied().step_by(2).collect(),
        })
    }

    pub fn load_csv(path: &std::path::Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut xs: Vec<f64> = Vec::new();
        let mut vs: Vec<f64> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::InvalidInput(format!("profile CSV: {e}")))?;
            if rec.len() < 2 {
                continue;
            }
            if rec[0].trim().eq_ignore_ascii_case("x") {
                continue; // header row
            }
            let x: f64 = rec[0]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad x value {:?}", &rec[0])))?;
            let v: f64 = rec[1]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad value {:?}", &rec[1])))?;
            xs.push(x);
            vs.push(v);
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput("profile CSV needs >= 2 rows".into()));
        }
        let dx = xs[1] - xs[0];
        for w in xs.windows(2) {
            if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0) {
                return Err(Error::InvalidInput("profile grid must be uniform".into()));
            }
        }
        Ok(Profile1d {
            x0: xs[0],
            dx,
            values: vs,
        })
    }
}

/// Tabulated radial kernel: profile φ(r) plus user-supplied radial Fourier
/// transform φ̂(|k|) (no general high-dimensional Hankel transform here).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RadialTable {
    pub profile: Profile1d,
    pub fourier: Option<Profile1d>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum KernelFamily {
    HyperSphere { radius: f64 },
    HyperCube { side: f64 },
    Gaussian { amplitude: f64, sigma: f64 },
    CoordCauchy { amplitude: f64, gamma: f64 },
    GenericProduct { profile: Profile1d },
    GenericRadial { table: RadialTable },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub d: u32,
}

impl KernelSpec {
    pub fn sphere_unit_volume(d: u32) -> Self {
        KernelSpec {
            family: KernelFamily::HyperSphere {
                radius: ball_geometry(d).unit_volume_radius,
            },
            d,
        }
    }

    /// Gaussian with φ(0) = 1, i.e. A = (2πσ²)^{d/2}; uses σ̃² = σ² so that
    /// with sigma = 1/sqrt(2π) the mass is 1.
    pub fn gaussian_phi0(d: u32, sigma: f64) -> Self {
        let a = ((2.0 * PI * sigma * sigma).ln() * d as f64 / 2.0).exp();
        KernelSpec {
            family: KernelFamily::Gaussian {
                amplitude: a,
                sigma,
            },
            d,
        }
    }

    pub fn cauchy_phi0(d: u32, gamma: f64) -> Self {
        let a = ((gamma * PI).ln() * d as f64).exp();
        KernelSpec {
            family: KernelFamily::CoordCauchy {
                amplitude: a,
                gamma,
            },
            d,
        }
    }
}

/// Effective interaction range used by the neighbor search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    /// φ vanishes beyond this Euclidean radius.
    CompactEuclidean(f64),
    /// φ vanishes when any |x_j| exceeds this half-width.
    CompactPerCoordinate(f64),
    /// Truncation radius covering 99.9% of the mass per coordinate.
    Soft(f64),
    /// No useful truncation (heavy tails); use all pairs.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub closed_form_fourier: bool,
    pub closed_form_diagrams: bool,
    pub compact_support: bool,
}

pub struct Kernel {
    pub spec: KernelSpec,
    pub log_mass: LogValue,
    pub capabilities: Capabilities,
    pub(crate) cache: RwLock<HashMap<DiagramId, DiagramValue>>,
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel")
            .field("spec", &self.spec)
            .field("log_mass", &self.log_mass)
            .finish()
    }
}

pub fn build_kernel(spec: KernelSpec) -> Result<Kernel> {
    let d = spec.d;
    if d < 1 {
        return Err(Error::InvalidKernel("dimension must be >= 1".into()));
    }
    let df = d as f64;
    let (log_mass, capabilities) = match &spec.family {
        KernelFamily::HyperSphere { radius } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidKernel("sphere radius must be > 0".into()));
            }
            let ln_q = (df / 2.0) * PI.ln() + df * radius.ln() - log_gamma(df / 2.0 + 1.0);
            (
                LogValue::from_ln(ln_q, 1),
                Capabilities {
                    closed_form_fourier: true,
                    closed_form_diagrams: true,
                    compact_support: true,
                },
            )
        }
        KernelFamily::HyperCube { side } => {
            if !(*side > 0.0 && side.is_finite()) {
                return Err(Error::InvalidKernel("cube side must be > 0".into()));
            }
            (
                LogValue::from_ln(df * side.ln(), 1),
                Capabilities {
                    closed_form_fourier: true,
                    closed_form_diagrams: true,
                    compact_support: true,
                },
            )
        }
        KernelFamily::Gaussian { amplitude, sigma } => {
            if !(*sigma > 0.0 && *amplitude > 0.0) {
                return Err(Error::InvalidKernel("gaussian needs A, sigma > 0".into()));
            }
            // φ(0) = A (2πσ²)^{-d/2} must be <= 1
            let ln_phi0 = amplitude.ln() - (df / 2.0) * (2.0 * PI * sigma * sigma).ln();
            if ln_phi0 > 1e-9 {
                return Err(Error::InvalidKernel(format!(
                    "gaussian amplitude too large: φ(0) = exp({ln_phi0:.3}) > 1"
                )));
            }
            (
                LogValue::from_ln(amplitude.ln(), 1),
                Capabilities {
                    closed_form_fourier: true,
                    closed_form_diagrams: true,
                    compact_support: false,
                },
            )
        }
        KernelFamily::CoordCauchy { amplitude, gamma } => {
            if !(*gamma > 0.0 && *amplitude > 0.0) {
                return Err(Error::InvalidKernel("cauchy needs A, gamma > 0".into()));
            }
            let ln_phi0 = amplitude.ln() - df * (gamma * PI).ln();
            if ln_phi0 > 1e-9 {
                return Err(Error::InvalidKernel(format!(
                    "cauchy amplitude too large: φ(0) = exp({ln_phi0:.3}) > 1"
                )));
            }
            (
                LogValue::from_ln(amplitude.ln(), 1),
                Capabilities {
                    closed_form_fourier: true,
                    closed_form_diagrams: true,
                    compact_support: false,
                },
            )
        }
        KernelFamily::GenericProduct { profile } => {
            validate_profile(profile)?;
            let m1 = profile.mass();
            if !(m1 > 0.0) {
                return Err(Error::InvalidKernel("profile has zero mass".into()));
            }
            (
                LogValue::from_ln(df * m1.ln(), 1),
                Capabilities {
                    closed_form_fourier: false,
                    closed_form_diagrams: false,
                    compact_support: true,
                },
            )
        }
        KernelFamily::GenericRadial { table } => {
            validate_profile(&table.profile)?;
            if table.profile.x0 < 0.0 {
                return Err(Error::InvalidKernel(
                    "radial profile must start at r >= 0".into(),
                ));
            }
            // q = S_{d-1} ∫ r^{d-1} φ(r) dr, trapezoid on the profile grid
            let p = &table.profile;
            let mut s = 0.0;
            for i in 0..p.values.len() {
                let r = p.x0 + i as f64 * p.dx;
                let w = if i == 0 || i == p.values.len() - 1 {
                    0.5
                } else {
                    1.0
                };
                s += w * r.powi(d as i32 - 1) * p.values[i];
            }
            let mass = s * p.dx * ball_geometry(d).ln_sphere_surface.exp();
            if !(mass > 0.0) {
                return Err(Error::InvalidKernel("radial profile has zero mass".into()));
            }
            (
                LogValue::from_f64(mass),
                Capabilities {
                    closed_form_fourier: false,
                    closed_form_diagrams: false,
                    compact_support: true,
                },
            )
        }
    };
    Ok(Kernel {
        spec,
        log_mass,
        capabilities,
        cache: RwLock::new(HashMap::new()),
    })
}

fn validate_profile(p: &Profile1d) -> Result<()> {
    if p.values.len() < 2 || !(p.dx > 0.0) {
        return Err(Error::InvalidKernel("profile needs >= 2 uniform nodes".into()));
    }
    if p.values.iter().any(|v| !(0.0..=1.0 + 1e-12).contains(v)) {
        return Err(Error::InvalidKernel("profile values must lie in [0,1]".into()));
    }
    Ok(())
}

impl Kernel {
    pub fn d(&self) -> u32 {
        self.spec.d
    }

    /// Pointwise φ(x).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.spec.d as usize;
        assert_eq!(x.len(), d, "point dimension mismatch");
        match &self.spec.family {
            KernelFamily::HyperSphere { radius } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::HyperCube { side } => {
                let h = side / 2.0;
                if x.iter().all(|v| v.abs() <= h) {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian { amplitude, sigma } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let ln = amplitude.ln()
                    - (d as f64 / 2.0) * (2.0 * PI * sigma * sigma).ln()
                    - r2 / (2.0 * sigma * sigma);
                ln.exp()
            }
            KernelFamily::CoordCauchy { amplitude, gamma } => {
                let mut ln = amplitude.ln();
                for v in x {
                    ln += (gamma / (PI * (gamma * gamma + v * v))).ln();
                }
                ln.exp()
            }
            KernelFamily::GenericProduct { profile } => {
                let mut p = 1.0;
                for v in x {
                    p *= profile.eval(*v);
                    if p == 0.0 {
                        return 0.0;
                    }
                }
                p
            }
            KernelFamily::GenericRadial { table } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                table.profile.eval(r)
            }
        }
    }

    /// φ̂(k) = ∫ e^{ik·x} φ(x) dx (real by symmetry).
    pub fn fourier(&self, k: &[f64]) -> Result<f64> {
        match &self.spec.family {
            KernelFamily::HyperSphere { .. } | KernelFamily::GenericRadial { .. } => {
                let kr = k.iter().map(|v| v * v).sum::<f64>().sqrt();
                self.fourier_radial(kr)
            }
            KernelFamily::HyperCube { side } => {
                let mut p = 1.0;
                for kj in k {
                    p *= sinc_half(*kj * side) * side;
                }
                Ok(p)
            }
            KernelFamily::Gaussian { amplitude, sigma } => {
                let k2: f64 = k.iter().map(|v| v * v).sum();
                Ok(amplitude * (-sigma * sigma * k2 / 2.0).exp())
            }
            KernelFamily::CoordCauchy { amplitude, gamma } => {
                let l1: f64 = k.iter().map(|v| v.abs()).sum();
                Ok(amplitude * (-gamma * l1).exp())
            }
            KernelFamily::GenericProduct { profile } => {
                let mut p = 1.0;
                for kj in k {
                    p *= profile.cos_transform(*kj);
                }
                Ok(p)
            }
        }
    }

    /// φ̂ at radial |k| for radially symmetric kernels.
    pub fn fourier_radial(&self, k: f64) -> Result<f64> {
        Ok(self.fourier_radial_log(k)?.to_f64())
    }

    /// Log form of the radial Fourier transform (the sphere transform shrinks
    /// like Γ(d/2+1)^{-1} and underflows early otherwise).
    pub fn fourier_radial_log(&self, k: f64) -> Result<LogValue> {
        match &self.spec.family {
            KernelFamily::HyperSphere { radius } => {
                let d = self.spec.d as f64;
                if k == 0.0 {
                    return Ok(self.log_mass);
                }
                // φ̂(k) = (2π/(kR))^{d/2} R^d J_{d/2}(kR)
                let j = bessel_j_log(d / 2.0, k * radius);
                let ln_pref = (d / 2.0) * (2.0 * PI / (k * radius)).ln() + d * radius.ln();
                Ok(LogValue::from_ln(ln_pref, 1).mul(&j))
            }
            KernelFamily::Gaussian { .. } | KernelFamily::CoordCauchy { .. } => {
                // radial only when the direction does not matter (Gaussian);
                // for Cauchy interpret k as an axis direction magnitude
                let d = self.spec.d as usize;
                let mut v = vec![0.0; d];
                v[0] = k;
                Ok(LogValue::from_f64(self.fourier(&v)?))
            }
            KernelFamily::GenericRadial { table } => match &table.fourier {
                Some(f) => Ok(LogValue::from_f64(f.eval(k))),
                None => Err(Error::Unsupported(
                    "generic radial kernel has no tabulated Fourier transform".into(),
                )),
            },
            _ => Err(Error::Unsupported(
                "kernel is not radially symmetric".into(),
            )),
        }
    }

    /// φ̂(k)/q_φ, computed factor-wise so huge d never over/underflows.
    pub fn fourier_ratio(&self, k: &[f64]) -> Result<f64> {
        match &self.spec.family {
            KernelFamily::HyperSphere { .. } => {
                let kr = k.iter().map(|v| v * v).sum::<f64>().sqrt();
                let f = self.fourier_radial_log(kr)?;
                Ok(f.div(&self.log_mass).to_f64())
            }
            KernelFamily::HyperCube { side } => {
                Ok(k.iter().map(|kj| sinc_half(kj * side)).product())
            }
            KernelFamily::Gaussian { sigma, .. } => {
                let k2: f64 = k.iter().map(|v| v * v).sum();
                Ok((-sigma * sigma * k2 / 2.0).exp())
            }
            KernelFamily::CoordCauchy { gamma, .. } => {
                let l1: f64 = k.iter().map(|v| v.abs()).sum();
                Ok((-gamma * l1).exp())
            }
            KernelFamily::GenericProduct { profile } => {
                let m1 = profile.mass();
                Ok(k.iter().map(|kj| profile.cos_transform(*kj) / m1).product())
            }
            KernelFamily::GenericRadial { .. } => {
                let kr = k.iter().map(|v| v * v).sum::<f64>().sqrt();
                let f = self.fourier_radial_log(kr)?;
                Ok(f.div(&self.log_mass).to_f64())
            }
        }
    }

    /// Effective interaction range for neighbor search.
    pub fn range(&self) -> Range {
        match &self.spec.family {
            KernelFamily::HyperSphere { radius } => Range::CompactEuclidean(*radius),
            KernelFamily::HyperCube { side } => Range::CompactPerCoordinate(side / 2.0),
            KernelFamily::Gaussian { sigma, .. } => Range::Soft(3.2905 * sigma),
            KernelFamily::CoordCauchy { .. } => Range::Unbounded,
            KernelFamily::GenericProduct { profile } => {
                let lo = profile.x0.abs();
                let hi = (profile.x0 + (profile.values.len() - 1) as f64 * profile.dx).abs();
                Range::CompactPerCoordinate(lo.max(hi))
            }
            KernelFamily::GenericRadial { table } => {
                let p = &table.profile;
                Range::CompactEuclidean(p.x0 + (p.values.len() - 1) as f64 * p.dx)
            }
        }
    }

    /// 1D factor profile for product-form kernels (used by grid routes).
    pub fn product_profile(&self, nodes: usize) -> Option<Profile1d> {
        match &self.spec.family {
            KernelFamily::HyperCube { side } => {
                let h = side / 2.0;
                Some(Profile1d::from_fn(
                    |x| if x.abs() <= h { 1.0 } else { 0.0 },
                    -h,
                    h,
                    nodes,
                ))
            }
            KernelFamily::Gaussian { amplitude, sigma } => {
                let d = self.spec.d as f64;
                // per-coordinate factor a1 exp(-x²/2σ²)/sqrt(2πσ²), a1 = A^{1/d}
                let a1 = (amplitude.ln() / d).exp();
                let w = 8.0 * sigma;
                let s = *sigma;
                Some(Profile1d::from_fn(
                    move |x| a1 * (-x * x / (2.0 * s * s)).exp() / (2.0 * PI * s * s).sqrt(),
                    -w,
                    w,
                    nodes,
                ))
            }
            KernelFamily::CoordCauchy { amplitude, gamma } => {
                let d = self.spec.d as f64;
                let a1 = (amplitude.ln() / d).exp();
                let g = *gamma;
                let w = 2000.0 * gamma;
                Some(Profile1d::from_fn(
                    move |x| a1 * g / (PI * (g * g + x * x)),
                    -w,
                    w,
                    nodes,
                ))
            }
            KernelFamily::GenericProduct { profile } => Some(profile.clone()),
            _ => None,
        }
    }
}

/// (2/k) sin(k/2) with the k→0 limit; argument is k*side here.
fn sinc_half(ks: f64) -> f64 {
    if ks.abs() < 1e-6 {
        1.0 - ks * ks / 24.0
    } else {
        (2.0 / ks) * (ks / 2.0).sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_cube(d: u32) -> Kernel {
        build_kernel(KernelSpec {
            family: KernelFamily::HyperCube { side: 1.0 },
            d,
        })
        .unwrap()
    }

    #[test]
    fn masses_of_named_families() {
        assert_relative_eq!(unit_cube(7).log_mass.to_f64(), 1.0);
        let g = build_kernel(KernelSpec {
            family: KernelFamily::Gaussian {
                amplitude: 1.0,
                sigma: 0.5,
            },
            d: 3,
        })
        .unwrap();
        assert_relative_eq!(g.log_mass.to_f64(), 1.0);
        let s = build_kernel(KernelSpec::sphere_unit_volume(10)).unwrap();
        assert!(s.log_mass.ln_abs.abs() < 1e-12);
    }

    #[test]
    fn rejects_overweight_amplitudes() {
        let bad = build_kernel(KernelSpec {
            family: KernelFamily::Gaussian {
                amplitude: 10.0,
                sigma: 0.2,
            },
            d: 1,
        });
        assert!(bad.is_err());
        let bad = build_kernel(KernelSpec {
            family: KernelFamily::CoordCauchy {
                amplitude: 100.0,
                gamma: 1.0,
            },
            d: 1,
        });
        assert!(bad.is_err());
    }

    #[test]
    fn eval_examples() {
        let c = unit_cube(4);
        assert_eq!(c.eval(&[0.7, 0.0, 0.0, 0.0]), 0.0);
        assert_eq!(c.eval(&[0.3, -0.2, 0.49, 0.0]), 1.0);
        let g = build_kernel(KernelSpec::gaussian_phi0(3, 0.5)).unwrap();
        assert_relative_eq!(g.eval(&[0.0, 0.0, 0.0]), 1.0, max_relative = 1e-12);
        let s = build_kernel(KernelSpec::sphere_unit_volume(2)).unwrap();
        let r = ball_geometry(2).unit_volume_radius;
        assert_eq!(s.eval(&[r * 0.99, 0.0]), 1.0);
        assert_eq!(s.eval(&[r * 1.01, 0.0]), 0.0);
    }

    #[test]
    fn fourier_examples() {
        let c = unit_cube(3);
        let k = [1.0, 2.0, 0.0];
        let want = 2.0 * (0.5f64).sin() * (2.0f64 / 2.0).sin() * 1.0;
        assert_relative_eq!(c.fourier(&k).unwrap(), want, max_relative = 1e-9);
        let g = build_kernel(KernelSpec {
            family: KernelFamily::Gaussian {
                amplitude: 1.0,
                sigma: 0.5,
            },
            d: 2,
        })
        .unwrap();
        assert_relative_eq!(
            g.fourier(&[1.0, 1.0]).unwrap(),
            (-0.25f64).exp(),
            max_relative = 1e-12
        );
        let cc = build_kernel(KernelSpec::cauchy_phi0(2, 1.0)).unwrap();
        let phat = cc.fourier(&[0.5, -0.25]).unwrap();
        let q = cc.log_mass.to_f64();
        assert_relative_eq!(phat / q, (-0.75f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn sphere_fourier_matches_mass_at_zero_and_decays() {
        for d in [2u32, 5, 10, 40] {
            let s = build_kernel(KernelSpec::sphere_unit_volume(d)).unwrap();
            let f0 = s.fourier_radial(1e-9).unwrap();
            assert_relative_eq!(f0, 1.0, max_relative = 1e-6);
            assert!(s.fourier_ratio(&vec![20.0 / (d as f64).sqrt(); d as usize]).unwrap().abs() < 1.0);
        }
    }

    #[test]
    fn fourier_at_zero_equals_mass_all_families() {
        let specs = vec![
            KernelSpec {
                family: KernelFamily::HyperCube { side: 1.7 },
                d: 3,
            },
            KernelSpec::gaussian_phi0(4, 0.7),
            KernelSpec::cauchy_phi0(3, 0.4),
            KernelSpec::sphere_unit_volume(6),
            KernelSpec {
                family: KernelFamily::GenericProduct {
                    profile: Profile1d::from_fn(|x| (1.0 - x.abs()).max(0.0), -1.0, 1.0, 2001),
                },
                d: 3,
            },
        ];
        for spec in specs {
            let k = build_kernel(spec.clone()).unwrap();
            let zero = vec![0.0; spec.d as usize];
            let f0 = match spec.family {
                KernelFamily::HyperSphere { .. } => k.fourier_radial(0.0).unwrap(),
                _ => k.fourier(&zero).unwrap(),
            };
            let q = k.log_mass.to_f64();
            assert_relative_eq!(f0, q, max_relative = 1e-10);
        }
    }

    #[test]
    fn json_round_trip() {
        let spec = KernelSpec::gaussian_phi0(12, 0.9);
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"family\""));
        assert!(s.contains("\"params\""));
        assert!(s.contains("\"d\""));
        let back: KernelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(spec, back);
        let doc = r#"{"family":"hyper_cube","params":{"side":1.0},"d":5}"#;
        let parsed: KernelSpec = serde_json::from_str(doc).unwrap();
        assert_eq!(
            parsed,
            KernelSpec {
                family: KernelFamily::HyperCube { side: 1.0 },
                d: 5
            }
        );
    }

    #[test]
    fn profile_csv_round_trip() {
        let dir = std::env::temp_dir().join("perco_profile_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tri.csv");
        let mut s = String::from("x,phi\n");
        for i in 0..=200 {
            let x = -1.0 + i as f64 * 0.01;
            s.push_str(&format!("{},{}\n", x, (1.0 - x.abs() as f64).max(0.0)));
        }
        std::fs::write(&path, s).unwrap();
        let p = Profile1d::load_csv(&path).unwrap();
        assert_eq!(p.values.len(), 201);
        assert_relative_eq!(p.mass(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(p.eval(0.005), 0.995, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn symmetry_and_bounds(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = 4usize;
            let kernels = vec![
                build_kernel(KernelSpec::sphere_unit_volume(d as u32)).unwrap(),
                build_kernel(KernelSpec { family: KernelFamily::HyperCube { side: 1.3 }, d: d as u32 }).unwrap(),
                build_kernel(KernelSpec::gaussian_phi0(d as u32, 0.6)).unwrap(),
                build_kernel(KernelSpec::cauchy_phi0(d as u32, 0.8)).unwrap(),
            ];
            for k in &kernels {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                let v = k.eval(&x);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert_eq!(v, k.eval(&neg));
                // sup |φ̂| at k=0 (sampled)
                let kk: Vec<f64> = (0..d).map(|_| rng.gen_range(-8.0..8.0)).collect();
                let f = k.fourier(&kk).unwrap();
                let q = k.log_mass.to_f64();
                prop_assert!(f.abs() <= q * (1.0 + 1e-9));
            }
        }
    }
}
