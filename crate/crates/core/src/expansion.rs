//! Assembly of the high-dimension series for the critical intensity:
//!
//!   q_φ λ_c = 1 + a + (3/2)L₄ − (5/2)T₁₂₂ + 2L₅ + 2a²,  a = L₃
//!
//! with every diagram normalized by the power of q_φ that makes it scale
//! invariant, plus the magnitude of the error bracket
//! a·L₄ + a³ + L₆ + T₂₂₂ + T₁₂₃ (same normalization, unit coefficient).

use crate::diagrams::{normalized_diagram, DiagramId, Method};
use crate::error::{Error, Result};
use crate::kernels::{build_kernel, Kernel, KernelFamily, KernelSpec};
use crate::logdomain::LogValue;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const TERM_NAMES: [&str; 6] = ["const", "loop3", "loop4", "loop5", "theta122", "loop3_sq"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub value: LogValue,
    pub method: String,
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub d: u32,
    pub q_phi: LogValue,
    pub terms: BTreeMap<String, Term>,
    /// Partial sum of the retained terms (scale free).
    pub lambda_c_times_q: f64,
    /// lambda_c_times_q / q_φ.
    pub lambda_c: LogValue,
    /// Raw magnitude of the error bracket, unit coefficient. Reported as a
    /// scale, never added to the point estimate.
    pub error_magnitude: f64,
}

impl ExpansionReport {
    fn assemble(d: u32, q_phi: LogValue, terms: BTreeMap<String, Term>, err: f64) -> Self {
        let sum: f64 = terms.values().map(|t| t.value.to_f64()).sum();
        ExpansionReport {
            d,
            q_phi,
            lambda_c: LogValue::from_f64(sum).div(&q_phi),
            lambda_c_times_q: sum,
            terms,
            error_magnitude: err,
        }
    }

    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.get(name)
    }

    /// Residual of the fixed point λ_c (1 + Π̂(0)) = 1 with the proxy
    /// Π̂ ≈ −a − (3/2)L₄ + (5/2)T₁₂₂ − 2L₅ − a² obtained by inverting the
    /// partial sum; small compared to error_magnitude when the series is
    /// in its asymptotic regime.
    pub fn fixed_point_residual(&self) -> f64 {
        let t = |n: &str| self.terms.get(n).map(|t| t.value.to_f64()).unwrap_or(0.0);
        let a = t("loop3");
        let pi_hat = -a - t("loop4") + (-t("theta122")) - t("loop5") - a * a;
        (self.lambda_c_times_q * (1.0 + pi_hat) - 1.0).abs()
    }
}

fn term(value: LogValue, method: Method, err: f64, flag: Option<&str>) -> Term {
    Term {
        value,
        method: method.to_string(),
        error_estimate: err,
        flag: flag.map(str::to_owned),
    }
}

/// Series assembled from the kernel's own diagram routes.
pub fn expansion_terms(kernel: &Kernel) -> Result<ExpansionReport> {
    let d = kernel.d();
    let norm = |id: DiagramId| normalized_diagram(kernel, id);
    let l3 = norm(DiagramId::Loop(3))?;
    let l4 = norm(DiagramId::Loop(4))?;
    let l5 = norm(DiagramId::Loop(5))?;
    let t122 = norm(DiagramId::theta(1, 2, 2))?;
    let l6 = norm(DiagramId::Loop(6))?;
    let t222 = norm(DiagramId::theta(2, 2, 2))?;
    let t123 = norm(DiagramId::theta(1, 2, 3))?;

    let sphere_flag = match kernel.spec.family {
        KernelFamily::HyperSphere { .. } => Some("beyond proven corollary precision"),
        _ => None,
    };
    let a = l3.value;
    let mut terms = BTreeMap::new();
    terms.insert(
        "const".into(),
        term(LogValue::ONE, Method::ClosedForm, 0.0, None),
    );
    terms.insert("loop3".into(), term(a, l3.method, l3.abs_error_estimate, None));
    terms.insert(
        "loop4".into(),
        term(
            l4.value.mul(&LogValue::from_f64(1.5)),
            l4.method,
            l4.abs_error_estimate,
            sphere_flag,
        ),
    );
    terms.insert(
        "loop5".into(),
        term(
            l5.value.mul(&LogValue::from_f64(2.0)),
            l5.method,
            l5.abs_error_estimate,
            sphere_flag,
        ),
    );
    terms.insert(
        "theta122".into(),
        term(
            t122.value.mul(&LogValue::from_f64(-2.5)),
            t122.method,
            t122.abs_error_estimate,
            sphere_flag,
        ),
    );
    terms.insert(
        "loop3_sq".into(),
        term(
            a.mul(&a).mul(&LogValue::from_f64(2.0)),
            l3.method,
            2.0 * l3.abs_error_estimate,
            sphere_flag,
        ),
    );
    let err = a.mul(&l4.value).to_f64()
        + a.powi(3).to_f64()
        + l6.value.to_f64()
        + t222.value.to_f64()
        + t123.value.to_f64();
    Ok(ExpansionReport::assemble(d, kernel.log_mass, terms, err))
}

/// Series assembled from the per-family closed forms, independent of the
/// diagram routes; the hyper-sphere report keeps only the constant and L₃
/// terms (the rigorously established precision) with error scale
/// (16/27)^{d/2} / √d.
pub fn model_corollary(spec: &KernelSpec) -> Result<ExpansionReport> {
    let d = spec.d;
    let df = d as f64;
    let q = build_kernel(spec.clone())?.log_mass;
    let closed = |ln: f64, sign: i8| Term {
        value: LogValue::from_ln(ln, sign),
        method: Method::ClosedForm.to_string(),
        error_estimate: 0.0,
        flag: None,
    };
    let mut terms = BTreeMap::new();
    terms.insert("const".into(), closed(0.0, 1));
    let err;
    match &spec.family {
        KernelFamily::HyperSphere { .. } => {
            // (3/(2√π)) Γ(a+1/2)/Γ(a) B(3/4; a, 1/2), a = d/2 + 1/2: the
            // closed Beta form of the unit-volume L₃
            let ln = crate::diagrams::sphere::loop3_corollary_ln(d)?;
            terms.insert("loop3".into(), closed(ln, 1));
            err = ((16.0f64 / 27.0).ln() * df / 2.0).exp() / df.sqrt();
        }
        KernelFamily::HyperCube { .. } => {
            let p = |num: f64, den: f64| df * (num / den).ln();
            terms.insert("loop3".into(), closed(p(3.0, 4.0), 1));
            terms.insert("loop4".into(), closed(1.5f64.ln() + p(2.0, 3.0), 1));
            terms.insert("loop5".into(), closed(2.0f64.ln() + p(115.0, 192.0), 1));
            terms.insert("theta122".into(), closed(2.5f64.ln() + p(7.0, 12.0), -1));
            terms.insert("loop3_sq".into(), closed(2.0f64.ln() + p(9.0, 16.0), 1));
            err = p(11.0, 20.0).exp();
        }
        KernelFamily::Gaussian { amplitude, sigma } => {
            let ln_a = amplitude.ln();
            let t = |n: f64| ln_a - df / 2.0 * (2.0 * n * PI * sigma * sigma).ln();
            terms.insert("loop3".into(), closed(t(3.0), 1));
            terms.insert("loop4".into(), closed(1.5f64.ln() + t(4.0), 1));
            terms.insert("loop5".into(), closed(2.0f64.ln() + t(5.0), 1));
            terms.insert(
                "theta122".into(),
                closed(
                    2.5f64.ln() + 2.0 * ln_a
                        - df * (2.0 * PI * sigma * sigma).ln()
                        - df / 2.0 * 8.0f64.ln(),
                    -1,
                ),
            );
            terms.insert("loop3_sq".into(), closed(2.0f64.ln() + 2.0 * t(3.0), 1));
            err = t(6.0).exp();
        }
        KernelFamily::CoordCauchy { amplitude, gamma } => {
            let ln_a = amplitude.ln();
            let t = |n: f64| ln_a - df * (n * gamma * PI).ln();
            terms.insert("loop3".into(), closed(t(3.0), 1));
            terms.insert("loop4".into(), closed(1.5f64.ln() + t(4.0), 1));
            terms.insert("loop5".into(), closed(2.0f64.ln() + t(5.0), 1));
            terms.insert(
                "theta122".into(),
                closed(
                    2.5f64.ln() + 2.0 * ln_a + df * (5.0f64 / 36.0).ln()
                        - 2.0 * df * (gamma * PI).ln(),
                    -1,
                ),
            );
            terms.insert("loop3_sq".into(), closed(2.0f64.ln() + 2.0 * t(3.0), 1));
            err = t(6.0).exp();
        }
        _ => {
            return Err(Error::Unsupported(
                "closed-form series exists only for the four named families".into(),
            ))
        }
    }
    Ok(ExpansionReport::assemble(d, q, terms, err))
}

/// One entry in a dimension sweep, either a single diagram or a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanQuantity {
    Diagram(DiagramId),
    /// num / den^power, all diagrams normalized.
    Ratio {
        num: DiagramId,
        den: DiagramId,
        den_power: u32,
    },
}

impl std::fmt::Display for ScanQuantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanQuantity::Diagram(id) => write!(f, "{id}"),
            ScanQuantity::Ratio {
                num,
                den,
                den_power,
            } => {
                if *den_power == 1 {
                    write!(f, "{num}/{den}")
                } else {
                    write!(f, "{num}/{den}^{den_power}")
                }
            }
        }
    }
}

impl std::str::FromStr for ScanQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(ScanQuantity::Diagram(s.parse()?)),
            Some((num, den)) => {
                let (den, pow) = match den.split_once('^') {
                    None => (den, 1),
                    Some((d, p)) => (
                        d,
                        p.parse::<u32>()
                            .map_err(|_| Error::InvalidInput(format!("bad ratio power {p:?}")))?,
                    ),
                };
                Ok(ScanQuantity::Ratio {
                    num: num.parse()?,
                    den: den.parse()?,
                    den_power: pow,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub d: u32,
    pub quantity: String,
    pub method: String,
    /// Decimal rendering of the (possibly deeply subnormal) value.
    pub value: String,
    pub log_value_over_d: f64,
    pub abs_error: f64,
}

/// Render a log-domain value as m.mmmmmme±EEE even far outside f64 range.
pub fn format_log_value(v: LogValue) -> String {
    if v.sign == 0 {
        return "0".into();
    }
    let log10 = v.ln_abs / std::f64::consts::LN_10;
    let e = log10.floor();
    let mut m = 10f64.powf(log10 - e);
    let mut e = e as i64;
    if m >= 9.9999995 {
        m /= 10.0;
        e += 1;
    }
    let sign = if v.sign < 0 { "-" } else { "" };
    format!("{sign}{m:.6}e{e}")
}

/// Sweep normalized diagrams and ratios over a dimension range; rows where a
/// route fails carry method "failed" instead of aborting the scan.
pub fn dimension_scan(
    spec: &KernelSpec,
    d_range: impl IntoIterator<Item = u32>,
    quantities: &[ScanQuantity],
) -> Vec<ScanRow> {
    let ds: Vec<u32> = d_range.into_iter().collect();
    let mut per_d: Vec<Vec<ScanRow>> = Vec::new();
    ds.par_iter()
        .map(|&d| {
            let spec_d = KernelSpec {
                family: spec.family.clone(),
                d,
            };
            let mut rows = Vec::with_capacity(quantities.len());
            let kernel = build_kernel(spec_d);
            for qn in quantities {
                let row = match &kernel {
                    Err(e) => failed_row(d, qn, e),
                    Ok(k) => match scan_value(k, qn) {
                        Err(e) => failed_row(d, qn, &e),
                        Ok((v, method, err)) => ScanRow {
                            d,
                            quantity: qn.to_string(),
                            method,
                            value: format_log_value(v),
                            log_value_over_d: v.ln_abs / d as f64,
                            abs_error: err,
                        },
                    },
                };
                rows.push(row);
            }
            rows
        })
        .collect_into_vec(&mut per_d);
    per_d.into_iter().flatten().collect()
}

fn failed_row(d: u32, qn: &ScanQuantity, e: &Error) -> ScanRow {
    ScanRow {
        d,
        quantity: qn.to_string(),
        method: format!("failed: {e}"),
        value: "nan".into(),
        log_value_over_d: f64::NAN,
        abs_error: f64::NAN,
    }
}

fn scan_value(kernel: &Kernel, qn: &ScanQuantity) -> Result<(LogValue, String, f64)> {
    match qn {
        ScanQuantity::Diagram(id) => {
            let v = normalized_diagram(kernel, *id)?;
            Ok((v.value, v.method.to_string(), v.abs_error_estimate))
        }
        ScanQuantity::Ratio {
            num,
            den,
            den_power,
        } => {
            let n = normalized_diagram(kernel, *num)?;
            let dv = normalized_diagram(kernel, *den)?;
            let v = n.value.div(&dv.value.powi(*den_power as i32));
            let err = n.abs_error_estimate + *den_power as f64 * dv.abs_error_estimate;
            Ok((v, format!("{}/{}", n.method, dv.method), err))
        }
    }
}

pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["d", "quantity", "method", "value", "log_value_over_d", "abs_error"])?;
    for r in rows {
        wtr.write_record([
            r.d.to_string(),
            r.quantity.clone(),
            r.method.clone(),
            r.value.clone(),
            format!("{:.12}", r.log_value_over_d),
            format!("{:.6e}", r.abs_error),
        ])?;
    }
    wtr.flush().map_err(Error::Io)?;
    Ok(())
}

/// Error scale of the sphere series truncated after L₃: (16/27)^{d/2}/√d.
pub fn sphere_corollary_error_scale(d: u32) -> f64 {
    let df = d as f64;
    (((16.0f64 / 27.0).ln()) * df / 2.0).exp() / df.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cube_spec(d: u32) -> KernelSpec {
        KernelSpec {
            family: KernelFamily::HyperCube { side: 1.0 },
            d,
        }
    }

    #[test]
    fn cube_series_matches_exact_rationals() {
        for d in [1u32, 5, 10, 30] {
            let k = build_kernel(cube_spec(d)).unwrap();
            let rep = expansion_terms(&k).unwrap();
            let df = d as f64;
            let want = 1.0
                + (0.75f64).powf(df)
                + 1.5 * (2.0f64 / 3.0).powf(df)
                + 2.0 * (115.0f64 / 192.0).powf(df)
                - 2.5 * (7.0f64 / 12.0).powf(df)
                + 2.0 * (9.0f64 / 16.0).powf(df);
            assert_relative_eq!(rep.lambda_c_times_q, want, max_relative = 1e-12);
            let err_want = (0.75f64 * 2.0 / 3.0).powf(df)
                + (0.75f64).powf(3.0 * df)
                + (11.0f64 / 20.0).powf(df)
                + 0.5f64.powf(df)
                + (49.0f64 / 96.0).powf(df);
            assert_relative_eq!(rep.error_magnitude, err_want, max_relative = 1e-10);
        }
    }

    #[test]
    fn corollary_agrees_with_expansion_term_by_term() {
        let specs: Vec<KernelSpec> = vec![
            cube_spec(5),
            cube_spec(10),
            cube_spec(30),
            KernelSpec::gaussian_phi0(5, 0.6),
            KernelSpec::gaussian_phi0(10, 0.6),
            KernelSpec::gaussian_phi0(30, 0.6),
            KernelSpec::cauchy_phi0(5, 0.8),
            KernelSpec::cauchy_phi0(10, 0.8),
            KernelSpec::cauchy_phi0(30, 0.8),
        ];
        for spec in specs {
            let k = build_kernel(spec.clone()).unwrap();
            let full = expansion_terms(&k).unwrap();
            let cor = model_corollary(&spec).unwrap();
            for (name, t) in &cor.terms {
                let f = full.term(name).expect("term present in both");
                assert_eq!(t.value.sign, f.value.sign, "{name} sign");
                assert_relative_eq!(
                    t.value.ln_abs,
                    f.value.ln_abs,
                    max_relative = 1e-12,
                    epsilon = 1e-12
                );
            }
            assert_relative_eq!(
                cor.lambda_c_times_q,
                full.lambda_c_times_q,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn gaussian_phi0_series_shape() {
        // with φ(0) = 1: qλ_c = 1 + 3^{-d/2} + (3/2)4^{-d/2} + 2·5^{-d/2} + small
        let d = 12u32;
        let k = build_kernel(KernelSpec::gaussian_phi0(d, 0.77)).unwrap();
        let rep = expansion_terms(&k).unwrap();
        let df = d as f64;
        let leading = 1.0 + 3f64.powf(-df / 2.0) + 1.5 * 4f64.powf(-df / 2.0)
            + 2.0 * 5f64.powf(-df / 2.0);
        // theta122 (8^{-d/2} scale per extra q) and a² are below 6^{-d/2}
        assert!((rep.lambda_c_times_q - leading).abs() < 6f64.powf(-df / 2.0));
        assert_relative_eq!(
            rep.term("loop3").unwrap().value.to_f64(),
            3f64.powf(-df / 2.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sphere_corollary_keeps_constant_and_loop3_only() {
        let spec = KernelSpec::sphere_unit_volume(20);
        let cor = model_corollary(&spec).unwrap();
        assert_eq!(cor.terms.len(), 2);
        assert!(cor.term("loop3").is_some());
        let k = build_kernel(spec).unwrap();
        let full = expansion_terms(&k).unwrap();
        assert_relative_eq!(
            cor.term("loop3").unwrap().value.ln_abs,
            full.term("loop3").unwrap().value.ln_abs,
            max_relative = 1e-10
        );
        assert_eq!(
            full.term("loop4").unwrap().flag.as_deref(),
            Some("beyond proven corollary precision")
        );
        assert!(cor.error_magnitude > 0.0);
        assert_relative_eq!(
            cor.error_magnitude,
            sphere_corollary_error_scale(20),
            max_relative = 1e-12
        );
    }

    #[test]
    fn partial_sum_exceeds_one_for_named_families() {
        for d in [5u32, 8, 12, 20] {
            let reports = vec![
                expansion_terms(&build_kernel(cube_spec(d)).unwrap()).unwrap(),
                expansion_terms(&build_kernel(KernelSpec::sphere_unit_volume(d)).unwrap())
                    .unwrap(),
                expansion_terms(&build_kernel(KernelSpec::gaussian_phi0(d, 0.9)).unwrap())
                    .unwrap(),
                expansion_terms(&build_kernel(KernelSpec::cauchy_phi0(d, 0.7)).unwrap()).unwrap(),
            ];
            for rep in reports {
                assert!(rep.lambda_c_times_q >= 1.0, "d={d}");
                assert!(rep.error_magnitude >= 0.0);
            }
        }
    }

    #[test]
    fn report_is_scale_invariant_for_cube() {
        let base = expansion_terms(&build_kernel(cube_spec(8)).unwrap()).unwrap();
        for side in [0.25, 2.0, 16.0] {
            let k = build_kernel(KernelSpec {
                family: KernelFamily::HyperCube { side },
                d: 8,
            })
            .unwrap();
            let rep = expansion_terms(&k).unwrap();
            assert_relative_eq!(
                rep.lambda_c_times_q,
                base.lambda_c_times_q,
                max_relative = 1e-10
            );
            for (name, t) in &rep.terms {
                assert_relative_eq!(
                    t.value.to_f64(),
                    base.term(name).unwrap().value.to_f64(),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn cube_term_ordering_at_d_ge_10() {
        for d in [10u32, 15, 25] {
            let rep = expansion_terms(&build_kernel(cube_spec(d)).unwrap()).unwrap();
            let t = |n: &str| rep.term(n).unwrap().value;
            assert!(t("loop3").ln_abs > t("loop4").ln_abs);
            assert!(t("loop4").ln_abs > t("loop5").ln_abs);
            assert!(t("loop5").ln_abs > t("theta122").ln_abs);
            assert!(t("theta122").ln_abs > t("loop3_sq").ln_abs);
            assert!(t("loop3_sq").ln_abs > (d as f64) * (0.55f64).ln());
        }
    }

    #[test]
    fn fixed_point_consistency() {
        for d in [10u32, 15, 20, 30] {
            for rep in [
                expansion_terms(&build_kernel(cube_spec(d)).unwrap()).unwrap(),
                expansion_terms(&build_kernel(KernelSpec::gaussian_phi0(d, 0.8)).unwrap())
                    .unwrap(),
                expansion_terms(&build_kernel(KernelSpec::cauchy_phi0(d, 0.8)).unwrap()).unwrap(),
            ] {
                let res = rep.fixed_point_residual();
                assert!(
                    res <= 5.0 * rep.error_magnitude,
                    "d={d}: residual {res} vs bracket {}",
                    rep.error_magnitude
                );
            }
        }
    }

    #[test]
    fn scan_rows_cube_and_parse() {
        let q: ScanQuantity = "theta122/loop3^2".parse().unwrap();
        assert_eq!(q.to_string(), "theta122/loop3^2");
        let rows = dimension_scan(
            &cube_spec(1),
            [2u32, 4, 8],
            &[ScanQuantity::Diagram(DiagramId::Loop(4)), q],
        );
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].d, 2);
        assert_relative_eq!(
            rows[2].log_value_over_d,
            (2.0f64 / 3.0).ln(),
            max_relative = 1e-12
        );
        // failed rows keep the scan alive: radial kernel without Fourier data
        let spec = KernelSpec {
            family: KernelFamily::GenericRadial {
                table: crate::kernels::RadialTable {
                    profile: crate::kernels::Profile1d::from_fn(
                        |r| if r <= 1.0 { 1.0 } else { 0.0 },
                        0.0,
                        1.0,
                        64,
                    ),
                    fourier: None,
                },
            },
            d: 3,
        };
        let rows = dimension_scan(&spec, [3u32], &[ScanQuantity::Diagram(DiagramId::Loop(3))]);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].method.starts_with("failed"));
    }

    #[test]
    fn scan_is_deterministic_across_thread_counts() {
        let quantities = [
            ScanQuantity::Diagram(DiagramId::Loop(3)),
            ScanQuantity::Diagram(DiagramId::theta(1, 2, 2)),
        ];
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| dimension_scan(&cube_spec(1), 2u32..=12, &quantities))
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value, y.value);
            assert_eq!(x.d, y.d);
            assert_eq!(x.quantity, y.quantity);
        }
    }

    #[test]
    fn csv_schema() {
        let rows = dimension_scan(
            &cube_spec(1),
            [3u32],
            &[ScanQuantity::Diagram(DiagramId::Loop(3))],
        );
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("d,quantity,method,value,log_value_over_d,abs_error\n"));
        assert!(s.contains("3,loop3,closed_form,"));
    }

    #[test]
    fn format_log_value_deep_subnormal() {
        let v = LogValue::from_ln(-722.7, 1); // ≈ 1.3e-314
        let s = format_log_value(v);
        assert!(s.ends_with("e-314"), "{s}");
        assert_eq!(format_log_value(LogValue::ZERO), "0");
        assert_eq!(format_log_value(LogValue::from_f64(-2.5)), "-2.500000e0");
    }
}
