//! Numerical instantiation of the decay/Fourier assumptions for a kernel:
//! the decay function g(d), the derived β(d), h(d), N(d), and empirical
//! Fourier lower-bound constants c₁, c₂.

use crate::diagrams::{normalized_diagram, DiagramId};
use crate::error::{Error, Result};
use crate::kernels::{build_kernel, Kernel, KernelFamily, KernelSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Magnitude cap for the |k| > b infimum scan, in units beyond b.
pub const FOURIER_K_SPAN: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassFlags {
    pub g_decays: bool,
    pub beta_below_one: bool,
    pub h_below_one: bool,
    pub fourier_c1_positive: bool,
    pub fourier_c2_positive: bool,
}

impl PassFlags {
    pub fn all(&self) -> bool {
        self.g_decays
            && self.beta_below_one
            && self.h_below_one
            && self.fourier_c1_positive
            && self.fourier_c2_positive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub d: u32,
    pub g: f64,
    pub beta: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: i64,
    pub fourier_b: f64,
    pub fourier_c1: f64,
    pub fourier_c2: f64,
    pub exp_decay_flag: bool,
    /// ρ of the exponential-decay clause where a closed value is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// true when the |k| > b infimum was still decreasing at the scan cap.
    pub fourier_inconclusive: bool,
    pub pass: PassFlags,
}

/// Decay bound g(d) per family: sup_x φ^{⋆m}(x)/q^{m-1} ≤ g for m ≥ 3, plus
/// the two-convolution level-set bound. Named families use their closed
/// values; generic kernels must supply a candidate g which is then verified.
///
/// For the hyper-sphere g(d) = ϱ^d holds for some ϱ < 1; the level-set clause
/// forces ϱ ≥ 2/√5 ≈ 0.894 (the overlap fraction of two unit balls at
/// distance 2r(1-ε) shrinks like (1 - r²/4)^{d/2}), so ϱ = 0.9 is used.
pub fn decay_g(spec: &KernelSpec, user_g: Option<f64>) -> Result<f64> {
    let d = spec.d;
    let df = d as f64;
    match &spec.family {
        KernelFamily::HyperSphere { .. } => Ok((df * 0.9f64.ln()).exp()),
        KernelFamily::HyperCube { .. } => Ok((df * 0.75f64.ln()).exp()),
        KernelFamily::Gaussian { amplitude, sigma } => {
            // g = (4πσ²)^{-d/2} = 2^{-d/2} φ(0)
            let ln_phi0 = amplitude.ln() - df / 2.0 * (2.0 * PI * sigma * sigma).ln();
            Ok((-df / 2.0 * 2f64.ln() + ln_phi0).exp())
        }
        KernelFamily::CoordCauchy { amplitude, gamma } => {
            // g = (2γπ)^{-d} = 2^{-d} φ(0)
            let ln_phi0 = amplitude.ln() - df * (gamma * PI).ln();
            Ok((-df * 2f64.ln() + ln_phi0).exp())
        }
        KernelFamily::GenericProduct { profile } => {
            let g = user_g.ok_or_else(|| {
                Error::InvalidInput("generic kernels need an explicit decay bound g".into())
            })?;
            verify_product_g(profile, d, g)?;
            Ok(g)
        }
        KernelFamily::GenericRadial { .. } => {
            let g = user_g.ok_or_else(|| {
                Error::InvalidInput("generic kernels need an explicit decay bound g".into())
            })?;
            verify_radial_g(spec, g)?;
            Ok(g)
        }
    }
}

/// Verify the decay clauses for a product kernel by 1D computation:
/// sup_x φ^{⋆m}(x)/q^{m-1} = (sup_x f_m(x)/q₁^{m-1})^d for separable kernels,
/// and the level-set volume is bounded by the Chernoff estimate
/// inf_t g^{-t} (∫ψ^t / q₁)^d with ψ = (φ₁⋆φ₁)/q₁ (sufficient, not sharp).
fn verify_product_g(profile: &crate::kernels::Profile1d, d: u32, g: f64) -> Result<()> {
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::InvalidInput("decay bound g must lie in (0,1)".into()));
    }
    let df = d as f64;
    let grid = crate::diagrams::grid::GridFn::from_profile(profile);
    let q1 = profile.mass();
    let mut conv = grid.convolve(&grid);
    for m in 3..=6u32 {
        conv = conv.convolve(&grid);
        let sup = conv.values.iter().cloned().fold(0.0f64, f64::max);
        let ln_norm_sup = df * (sup.ln() - (m as f64 - 1.0) * q1.ln());
        if ln_norm_sup > g.ln() + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "decay bound violated: sup φ^⋆{m}/q^{} = exp({ln_norm_sup:.6}) exceeds g",
                m - 1
            )));
        }
    }
    // level-set clause via Chernoff over a t grid
    let two = grid.convolve(&grid);
    let mut best = f64::INFINITY;
    for i in 1..=64 {
        let t = i as f64 * 0.25;
        let mut s = 0.0;
        for (j, v) in two.values.iter().enumerate() {
            let w = if j == 0 || j == two.values.len() - 1 {
                0.5
            } else {
                1.0
            };
            if *v > 0.0 {
                s += w * (v / q1).powf(t);
            }
        }
        s *= two.dx;
        let ln_bound = -t * g.ln() + df * (s / q1).ln();
        best = best.min(ln_bound);
    }
    if best > g.ln() + 1e-12 {
        return Err(Error::InvalidInput(
            "level-set clause not verifiable: Chernoff volume bound exceeds g".into(),
        ));
    }
    Ok(())
}

/// Radial generic kernels: check sup φ^{⋆m}(0)/q^{m-1} ≤ g on the loop values
/// (the sup over x of a radially non-increasing convolution sits at 0); the
/// level-set clause is not checked beyond this radial grid.
fn verify_radial_g(spec: &KernelSpec, g: f64) -> Result<()> {
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::InvalidInput("decay bound g must lie in (0,1)".into()));
    }
    let kernel = build_kernel(spec.clone())?;
    for m in [3u32, 4, 5, 6] {
        let v = normalized_diagram(&kernel, DiagramId::Loop(m))?;
        // loop(m+1)/q^m relates to the sup through φ^{⋆m}(0) ≥ sup-at-0
        if v.value.ln_abs > g.ln() + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "decay bound violated: φ^⋆{m}(0)/q^{} exceeds g",
                m - 1
            )));
        }
    }
    Ok(())
}

/// β, h, N. β = g^{1/4} under the declared exponential-decay clause, else
/// g^{1/4 - 3/(2d)} d^{-3/2}; h = L₆ + T₁₂₃ + T₂₂₂ (normalized);
/// N = ceil(ln h / ln β).
pub fn beta_h_n(
    spec: &KernelSpec,
    exp_decay_flag: bool,
    user_g: Option<f64>,
) -> Result<(f64, f64, f64, i64)> {
    let g = decay_g(spec, user_g)?;
    let df = spec.d as f64;
    let beta = if exp_decay_flag {
        g.powf(0.25)
    } else {
        g.powf(0.25 - 1.5 / df) * df.powf(-1.5)
    };
    if !(beta < 1.0) {
        return Err(Error::DiagnosticOutOfRange(format!(
            "β = {beta:.6} ≥ 1 at d = {}: the decay regime is not reached, N is undefined",
            spec.d
        )));
    }
    let kernel = build_kernel(spec.clone())?;
    let h = normalized_diagram(&kernel, DiagramId::Loop(6))?.value.to_f64()
        + normalized_diagram(&kernel, DiagramId::theta(1, 2, 3))?
            .value
            .to_f64()
        + normalized_diagram(&kernel, DiagramId::theta(2, 2, 2))?
            .value
            .to_f64();
    if !(h > 0.0) {
        return Err(Error::Numerical("h evaluated non-positive".into()));
    }
    let n = (h.ln() / beta.ln()).ceil() as i64;
    Ok((g, beta, h, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierBounds {
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c1_argmin_k: f64,
    pub c2_argmin_k: f64,
    pub k_cap: f64,
    /// The |k| > b infimum was still decreasing at the cap.
    pub inconclusive: bool,
}

/// Empirical ĉ₁ = inf_{|k|≤b} (1 - φ̂(k)/q)/|k|² and
/// ĉ₂ = inf_{b<|k|≤cap} (1 - φ̂(k)/q).
///
/// Directions: the coordinate axis, the main diagonal, and a deterministic
/// Kronecker (golden-ratio-type) sequence of `sample_budget` extra points;
/// growing the budget only adds sample points, so both estimates are
/// nonincreasing in the budget. Magnitudes are capped at b + FOURIER_K_SPAN.
pub fn fourier_bounds(kernel: &Kernel, b: f64, sample_budget: usize) -> Result<FourierBounds> {
    if !(b > 0.0) {
        return Err(Error::InvalidInput("fourier bound b must be > 0".into()));
    }
    let d = kernel.d() as usize;
    let cap = b + FOURIER_K_SPAN;
    let k_min = 1e-3 * b;

    let mut c1 = f64::INFINITY;
    let mut c1_arg = f64::NAN;
    let mut c2 = f64::INFINITY;
    let mut c2_arg = f64::NAN;

    let mut probe = |dir: &[f64], mag: f64, low: bool| -> Result<()> {
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(());
        }
        let k: Vec<f64> = dir.iter().map(|v| v * mag / norm).collect();
        let ratio = kernel.fourier_ratio(&k)?;
        let one_minus = 1.0 - ratio;
        if low {
            let c = one_minus / (mag * mag);
            if c < c1 {
                c1 = c;
                c1_arg = mag;
            }
        } else if one_minus < c2 {
            c2 = one_minus;
            c2_arg = mag;
        }
        Ok(())
    };

    // axis and diagonal magnitude scans (budget independent)
    let axis: Vec<f64> = (0..d).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect();
    let diag = vec![1.0; d];
    for i in 0..=512usize {
        let u = i as f64 / 512.0;
        let m_low = k_min + (b - k_min) * u;
        let m_high = b * (1.0 + 1e-9) + (cap - b) * u;
        for dir in [&axis, &diag] {
            probe(dir, m_low, true)?;
            probe(dir, m_high, false)?;
        }
    }

    // low-discrepancy direction/magnitude samples
    let alphas: Vec<f64> = primes()
        .take(d)
        .map(|p| (p as f64).sqrt().fract())
        .collect();
    let g1 = 0.618_033_988_749_894_9_f64; // 1/φ
    let g2 = 0.754_877_666_246_692_7_f64; // 1/plastic
    let mut dir = vec![0.0; d];
    for i in 0..sample_budget {
        let x = (i + 1) as f64;
        for j in 0..d {
            dir[j] = 2.0 * (x * alphas[j]).fract() - 1.0;
        }
        let u1 = (x * g1).fract();
        let u2 = (x * g2).fract();
        probe(&dir, k_min + (b - k_min) * u1, true)?;
        probe(&dir, b * (1.0 + 1e-9) + (cap - b) * u2 * u2, false)?;
    }

    Ok(FourierBounds {
        b,
        c1,
        c2,
        c1_argmin_k: c1_arg,
        c2_argmin_k: c2_arg,
        k_cap: cap,
        inconclusive: c2_arg > cap - 0.02 * (cap - b),
    })
}

fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|n| {
        let mut k = 2;
        while k * k <= *n {
            if n % k == 0 {
                return false;
            }
            k += 1;
        }
        true
    })
}

/// Full report: decay, β/h/N, Fourier constants, pass flags.
pub fn assumption_report(
    spec: &KernelSpec,
    b: f64,
    sample_budget: usize,
    exp_decay_flag: bool,
    user_g: Option<f64>,
) -> Result<AssumptionReport> {
    let (g, beta, h, n) = beta_h_n(spec, exp_decay_flag, user_g)?;
    let kernel = build_kernel(spec.clone())?;
    let fb = fourier_bounds(&kernel, b, sample_budget)?;
    let d = spec.d;
    let df = d as f64;
    let rho = match &spec.family {
        KernelFamily::HyperSphere { .. } => Some(4.0 * (-2.0f64).exp()),
        KernelFamily::HyperCube { .. } => Some(11.0 / 20.0),
        KernelFamily::Gaussian { amplitude, sigma } => {
            let ln_phi0 = amplitude.ln() - df / 2.0 * (2.0 * PI * sigma * sigma).ln();
            Some((ln_phi0 / df).exp() / 6f64.sqrt())
        }
        KernelFamily::CoordCauchy { amplitude, gamma } => {
            let ln_phi0 = amplitude.ln() - df * (gamma * PI).ln();
            Some((ln_phi0 / df).exp() / 6.0)
        }
        _ => None,
    };
    let pass = PassFlags {
        g_decays: g < 1.0,
        beta_below_one: beta < 1.0,
        h_below_one: h < 1.0,
        fourier_c1_positive: fb.c1 > 0.0,
        fourier_c2_positive: fb.c2 > 0.0 && !fb.inconclusive,
    };
    Ok(AssumptionReport {
        d,
        g,
        beta,
        h,
        n,
        fourier_b: fb.b,
        fourier_c1: fb.c1,
        fourier_c2: fb.c2,
        exp_decay_flag,
        rho,
        fourier_inconclusive: fb.inconclusive,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Profile1d;
    use approx::assert_relative_eq;

    fn cube_spec(d: u32) -> KernelSpec {
        KernelSpec {
            family: KernelFamily::HyperCube { side: 1.0 },
            d,
        }
    }

    #[test]
    fn cube_d20_arithmetic() {
        let (g, beta, h, n) = beta_h_n(&cube_spec(20), true, None).unwrap();
        assert_relative_eq!(g, 0.75f64.powi(20), max_relative = 1e-12);
        assert_relative_eq!(beta, 0.75f64.powi(5), max_relative = 1e-12);
        let h_want = (11.0f64 / 20.0).powi(20) + (49.0f64 / 96.0).powi(20) + 0.5f64.powi(20);
        assert_relative_eq!(h, h_want, max_relative = 1e-10);
        assert_eq!(n, (h_want.ln() / 0.75f64.powi(5).ln()).ceil() as i64);
    }

    #[test]
    fn gaussian_and_cauchy_n_bounded_by_eleven() {
        for d in [2u32, 4, 8, 16, 32, 64] {
            let (_, _, _, n) = beta_h_n(&KernelSpec::gaussian_phi0(d, 0.9), true, None).unwrap();
            assert!((1..=11).contains(&n), "gaussian d={d}: N={n}");
            let (_, _, _, n) = beta_h_n(&KernelSpec::cauchy_phi0(d, 0.7), true, None).unwrap();
            assert!((1..=11).contains(&n), "cauchy d={d}: N={n}");
        }
    }

    #[test]
    fn generic_needs_g_and_refuses_beta_ge_one() {
        let spec = KernelSpec {
            family: KernelFamily::GenericProduct {
                profile: Profile1d::from_fn(
                    |x| if x.abs() <= 0.5 { 1.0 } else { 0.0 },
                    -0.5,
                    0.5,
                    2049,
                ),
            },
            d: 8,
        };
        assert!(matches!(
            beta_h_n(&spec, true, None),
            Err(Error::InvalidInput(_))
        ));
        // a bogus g ≥ 1 is rejected before any β is produced
        assert!(beta_h_n(&spec, true, Some(1.5)).is_err());
        // a workable g for the unit interval indicator: 0.85^d clears both the
        // m-fold sup clause ((3/4)^d) and the level-set volume (needs ≥ ~0.84^d)
        let g = 0.85f64.powi(8);
        let (_, beta, _, n) = beta_h_n(&spec, true, Some(g)).unwrap();
        assert_relative_eq!(beta, g.powf(0.25), max_relative = 1e-12);
        assert!(n >= 1);
        // (3/4)^d satisfies the sup clause but not the level-set volume: the
        // set where the 2-fold convolution exceeds (3/4)^d grows like 1.17^d
        let err = decay_g(&spec, Some(0.75f64.powi(8))).unwrap_err();
        assert!(err.to_string().contains("level-set"), "{err}");
        // a g tighter than the true decay fails the sup clause with its name
        let err = decay_g(&spec, Some(0.5f64.powi(8))).unwrap_err();
        assert!(err.to_string().contains("decay bound violated"), "{err}");
    }

    #[test]
    fn beta_form_without_exp_decay_declaration() {
        let (g, beta, _, _) = beta_h_n(&cube_spec(12), false, None).unwrap();
        let df = 12.0f64;
        assert_relative_eq!(
            beta,
            g.powf(0.25 - 1.5 / df) * df.powf(-1.5),
            max_relative = 1e-12
        );
    }

    #[test]
    fn fourier_bounds_cube_and_gaussian() {
        let cube = build_kernel(cube_spec(6)).unwrap();
        let fb = fourier_bounds(&cube, 3.0, 2048).unwrap();
        assert!(fb.c1 > 0.0);
        assert!(fb.c2 > 0.0);
        // the diagonal direction pins ĉ₂ near 1 - e^{-b²/24} ≈ 0.3127 < 1/2
        assert!(fb.c2 < 0.5, "c2 = {}", fb.c2);
        assert!(fb.c2 > 0.25, "c2 = {}", fb.c2);

        // σ² = 1/2π gives φ̂/q = exp(-|k|²/4π) exactly
        let g = build_kernel(KernelSpec::gaussian_phi0(6, (0.5 / PI).sqrt())).unwrap();
        let fb = fourier_bounds(&g, 1.0, 1024).unwrap();
        let floor = 1.0 - (-1.0f64 / (4.0 * PI)).exp();
        assert!(fb.c1 >= floor - 1e-9, "c1 = {} floor = {floor}", fb.c1);
        assert!(!fb.inconclusive);
    }

    #[test]
    fn fourier_infima_monotone_in_budget() {
        let k = build_kernel(cube_spec(5)).unwrap();
        let mut prev_c1 = f64::INFINITY;
        let mut prev_c2 = f64::INFINITY;
        for budget in [128usize, 512, 2048, 8192] {
            let fb = fourier_bounds(&k, 3.0, budget).unwrap();
            assert!(fb.c1 <= prev_c1 + 1e-15);
            assert!(fb.c2 <= prev_c2 + 1e-15);
            prev_c1 = fb.c1;
            prev_c2 = fb.c2;
        }
    }

    #[test]
    fn named_families_pass_at_d10() {
        let specs = vec![
            cube_spec(10),
            KernelSpec::sphere_unit_volume(10),
            KernelSpec::gaussian_phi0(10, 0.8),
            KernelSpec::cauchy_phi0(10, 0.9),
        ];
        for spec in specs {
            let rep = assumption_report(&spec, 3.0, 1024, true, None).unwrap();
            assert!(rep.pass.all(), "{spec:?}: {rep:?}");
            assert!(rep.beta > 0.0 && rep.beta < 1.0);
            assert!(rep.n >= 1);
            assert!(rep.rho.is_some());
            // N recomputable from the serialized fields
            assert_eq!(rep.n, (rep.h.ln() / rep.beta.ln()).ceil() as i64);
        }
    }

    #[test]
    fn report_serializes_with_upper_case_n() {
        let rep = assumption_report(&cube_spec(10), 3.0, 256, true, None).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.contains("\"N\":"));
        assert!(s.contains("\"fourier_c1\":"));
        let back: AssumptionReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
    }
}
