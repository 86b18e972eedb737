//! Command-line front end: diagram evaluation, series reports, dimension
//! scans, decay/Fourier diagnostics, and torus Monte Carlo runs.

use clap::{Args, Parser, Subcommand};
use perco::assumptions::assumption_report;
use perco::diagrams::{diagram_value, normalized_diagram, DiagramId};
use perco::error::{Error, Result};
use perco::expansion::{
    dimension_scan, expansion_terms, format_log_value, model_corollary, write_scan_csv,
    ScanQuantity,
};
use perco::kernels::{build_kernel, KernelFamily, KernelSpec, Profile1d, RadialTable};
use perco::sim::{estimate_from_rows, estimate_two_point, run_grid, write_mc_csv, McConfig};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "perco",
    version,
    about = "High-dimension critical intensity of the random connection model"
)]
struct Cli {
    /// Worker thread count (overrides PERCO_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KernelArgs {
    /// Kernel family: sphere | cube | gauss | cauchy | product | radial.
    #[arg(long)]
    kernel: String,

    /// Sphere radius.
    #[arg(long = "R")]
    radius: Option<f64>,

    /// Choose the sphere radius R(d) that gives the ball unit volume.
    #[arg(long)]
    unit_volume: bool,

    /// Cube side length.
    #[arg(long = "L")]
    side: Option<f64>,

    /// Amplitude A for gauss/cauchy.
    #[arg(long = "A")]
    amplitude: Option<f64>,

    /// Set the amplitude so that φ(0) equals this value (gauss/cauchy).
    #[arg(long)]
    phi0: Option<f64>,

    /// Gaussian width σ.
    #[arg(long)]
    sigma: Option<f64>,

    /// Cauchy scale γ.
    #[arg(long)]
    gamma: Option<f64>,

    /// CSV profile table for product/radial kernels (x,value rows).
    #[arg(long)]
    profile: Option<PathBuf>,
}

impl KernelArgs {
    fn spec(&self, d: u32) -> Result<KernelSpec> {
        let family = match self.kernel.as_str() {
            "sphere" | "hypersphere" => {
                if self.unit_volume {
                    return Ok(KernelSpec::sphere_unit_volume(d));
                }
                let radius = self.radius.ok_or_else(|| {
                    Error::InvalidInput("sphere needs --R or --unit-volume".into())
                })?;
                KernelFamily::HyperSphere { radius }
            }
            "cube" | "hypercube" => KernelFamily::HyperCube {
                side: self.side.unwrap_or(1.0),
            },
            "gauss" | "gaussian" => {
                let sigma = self
                    .sigma
                    .ok_or_else(|| Error::InvalidInput("gauss needs --sigma".into()))?;
                match (self.phi0, self.amplitude) {
                    (Some(p), None) => {
                        let mut spec = KernelSpec::gaussian_phi0(d, sigma);
                        if let KernelFamily::Gaussian { amplitude, .. } = &mut spec.family {
                            *amplitude *= p;
                        }
                        return Ok(spec);
                    }
                    (None, Some(a)) => KernelFamily::Gaussian {
                        amplitude: a,
                        sigma,
                    },
                    _ => {
                        return Err(Error::InvalidInput(
                            "gauss needs exactly one of --A or --phi0".into(),
                        ))
                    }
                }
            }
            "cauchy" => {
                let gamma = self
                    .gamma
                    .ok_or_else(|| Error::InvalidInput("cauchy needs --gamma".into()))?;
                match (self.phi0, self.amplitude) {
                    (Some(p), None) => {
                        let mut spec = KernelSpec::cauchy_phi0(d, gamma);
                        if let KernelFamily::CoordCauchy { amplitude, .. } = &mut spec.family {
                            *amplitude *= p;
                        }
                        return Ok(spec);
                    }
                    (None, Some(a)) => KernelFamily::CoordCauchy {
                        amplitude: a,
                        gamma,
                    },
                    _ => {
                        return Err(Error::InvalidInput(
                            "cauchy needs exactly one of --A or --phi0".into(),
                        ))
                    }
                }
            }
            "product" => {
                let path = self
                    .profile
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("product needs --profile".into()))?;
                KernelFamily::GenericProduct {
                    profile: Profile1d::load_csv(path)?,
                }
            }
            "radial" => {
                let path = self
                    .profile
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("radial needs --profile".into()))?;
                KernelFamily::GenericRadial {
                    table: RadialTable {
                        profile: Profile1d::load_csv(path)?,
                        fourier: None,
                    },
                }
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown kernel {other:?} (expected sphere|cube|gauss|cauchy|product|radial)"
                )))
            }
        };
        Ok(KernelSpec { family, d })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single convolution diagram.
    Diagram {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        d: u32,
        /// Diagram id, e.g. loop4 or theta122.
        #[arg(long, conflicts_with_all = ["loop_order", "theta"])]
        id: Option<DiagramId>,
        /// Shorthand for loopN.
        #[arg(long = "loop")]
        loop_order: Option<u32>,
        /// Shorthand for thetaABC (three digits).
        #[arg(long)]
        theta: Option<String>,
        /// Report the raw value instead of the q_φ-normalized one.
        #[arg(long)]
        raw: bool,
    },
    /// Report the critical-intensity series for one kernel and dimension.
    Expand {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        d: u32,
        /// Use the per-family closed-form series instead of quadrature.
        #[arg(long)]
        corollary: bool,
        /// Output format (json only).
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Sweep diagrams and ratios over a dimension range; CSV output.
    Scan {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Dimension range start:stop:step (stop inclusive).
        #[arg(long)]
        d: String,
        /// Comma-separated diagram ids.
        #[arg(long)]
        diagrams: Option<String>,
        /// Comma-separated ratios idA/idB^k.
        #[arg(long)]
        ratios: Option<String>,
    },
    /// Decay and Fourier diagnostics report.
    Assume {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        d: u32,
        /// Fourier window parameter b.
        #[arg(long, default_value_t = 3.0)]
        b: f64,
        /// Sampling budget for the Fourier infima.
        #[arg(long, default_value_t = 4096)]
        budget: usize,
        /// Declare that the profile decays exponentially (generic kernels).
        #[arg(long)]
        declare_exp_decay: bool,
        /// Decay bound g for generic kernels (verified numerically).
        #[arg(long)]
        g: Option<f64>,
    },
    /// Monte Carlo sweep over the λ grid of a JSON config.
    Mc {
        /// McConfig JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Write per-replicate rows as CSV to this path.
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Empirical two-point function at one intensity.
    TwoPoint {
        /// McConfig JSON file (grid is ignored; replicates count trials).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Displacement as comma-separated coordinates; repeatable.
        #[arg(long = "x", required = true)]
        xs: Vec<String>,
    },
}

fn parse_d_range(s: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = s.split(':').collect();
    let err = || Error::InvalidInput(format!("bad dimension range {s:?} (want start:stop:step)"));
    let nums: Vec<u32> = parts
        .iter()
        .map(|p| p.parse::<u32>().map_err(|_| err()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = match nums[..] {
        [d] => (d, d, 1),
        [a, b] => (a, b, 1),
        [a, b, c] => (a, b, c),
        _ => return Err(err()),
    };
    if step == 0 || stop < start || start == 0 {
        return Err(err());
    }
    Ok((start..=stop).step_by(step as usize).collect())
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad coordinate {p:?}")))
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => {
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DiagramOutput {
    d: u32,
    id: String,
    normalized: bool,
    value: String,
    ln_abs: f64,
    sign: i8,
    method: String,
    abs_error_estimate: f64,
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out;
    match cli.command {
        Command::Diagram {
            kernel,
            d,
            id,
            loop_order,
            theta,
            raw,
        } => {
            let id = match (id, loop_order, theta) {
                (Some(id), None, None) => id,
                (None, Some(n), None) => DiagramId::Loop(n),
                (None, None, Some(t)) => format!("theta{t}").parse()?,
                _ => {
                    return Err(Error::InvalidInput(
                        "give exactly one of --id, --loop, --theta".into(),
                    ))
                }
            };
            let k = build_kernel(kernel.spec(d)?)?;
            let v = if raw {
                diagram_value(&k, id)?
            } else {
                normalized_diagram(&k, id)?
            };
            let doc = DiagramOutput {
                d,
                id: id.to_string(),
                normalized: !raw,
                value: format_log_value(v.value),
                ln_abs: v.value.ln_abs,
                sign: v.value.sign,
                method: v.method.to_string(),
                abs_error_estimate: v.abs_error_estimate,
            };
            emit(&out, format!("{}\n", serde_json::to_string_pretty(&doc)?).as_bytes())
        }
        Command::Expand {
            kernel,
            d,
            corollary,
            format,
        } => {
            if format != "json" {
                return Err(Error::InvalidInput(format!(
                    "unsupported format {format:?} for expand (json only)"
                )));
            }
            let spec = kernel.spec(d)?;
            let report = if corollary {
                model_corollary(&spec)?
            } else {
                expansion_terms(&build_kernel(spec)?)?
            };
            emit(
                &out,
                format!("{}\n", serde_json::to_string_pretty(&report)?).as_bytes(),
            )
        }
        Command::Scan {
            kernel,
            d,
            diagrams,
            ratios,
        } => {
            let ds = parse_d_range(&d)?;
            let mut quantities: Vec<ScanQuantity> = Vec::new();
            for list in [diagrams, ratios].into_iter().flatten() {
                for item in list.split(',').filter(|s| !s.is_empty()) {
                    quantities.push(item.trim().parse()?);
                }
            }
            if quantities.is_empty() {
                return Err(Error::InvalidInput(
                    "scan needs --diagrams and/or --ratios".into(),
                ));
            }
            let spec = kernel.spec(ds[0])?;
            let rows = dimension_scan(&spec, ds, &quantities);
            let mut buf = Vec::new();
            write_scan_csv(&rows, &mut buf)?;
            emit(&out, &buf)
        }
        Command::Assume {
            kernel,
            d,
            b,
            budget,
            declare_exp_decay,
            g,
        } => {
            let spec = kernel.spec(d)?;
            let report = assumption_report(&spec, b, budget, declare_exp_decay, g)?;
            emit(
                &out,
                format!("{}\n", serde_json::to_string_pretty(&report)?).as_bytes(),
            )
        }
        Command::Mc { config, rows } => {
            let cfg: McConfig = serde_json::from_str(&fs::read_to_string(config)?)?;
            let grid_rows = run_grid(&cfg)?;
            if let Some(path) = rows {
                let mut buf = Vec::new();
                write_mc_csv(&grid_rows, &mut buf)?;
                fs::write(path, buf)?;
            }
            let estimate = estimate_from_rows(&cfg, &grid_rows)?;
            emit(
                &out,
                format!("{}\n", serde_json::to_string_pretty(&estimate)?).as_bytes(),
            )
        }
        Command::TwoPoint { config, lambda, xs } => {
            let cfg: McConfig = serde_json::from_str(&fs::read_to_string(config)?)?;
            let displacements: Vec<Vec<f64>> =
                xs.iter().map(|s| parse_vec(s)).collect::<Result<_>>()?;
            let rows = estimate_two_point(&cfg, lambda, &displacements)?;
            emit(
                &out,
                format!("{}\n", serde_json::to_string_pretty(&rows)?).as_bytes(),
            )
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("PERCO_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
