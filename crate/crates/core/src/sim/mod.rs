//! Torus Monte Carlo for the random connection model: Poisson points on
//! [0,L)^d, independent edges with probability φ(Δ) under minimum-image
//! displacement, winding-vector percolation detection, λ_c estimation by
//! isotonic inversion of the percolation curve, and an empirical two-point
//! function.

pub mod stats;
pub mod unionfind;

use crate::error::{Error, Result};
use crate::kernels::{build_kernel, Kernel, KernelSpec, Range};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unionfind::WindingUf;

const SALT_GRAPH: u64 = 0x6772_6170_685f_7631;
const SALT_TWOPOINT: u64 = 0x7477_6f70_745f_7631;
const SALT_BOOTSTRAP: u64 = 0x626f_6f74_5f76_3120;
const ALL_PAIRS_CAP: usize = 60_000;

fn default_max_points() -> f64 {
    2.0e6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "threshold", rename_all = "snake_case")]
pub enum PercolationRule {
    Wrapping,
    LargestClusterFraction(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub kernel: KernelSpec,
    pub torus_side: f64,
    pub lambda_grid: Vec<f64>,
    pub replicates: u32,
    pub seed: u64,
    pub percolation_rule: PercolationRule,
    #[serde(default = "default_max_points")]
    pub max_expected_points: f64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.torus_side > 0.0) {
            return Err(Error::InvalidInput("torus_side must be > 0".into()));
        }
        if self.replicates < 1 {
            return Err(Error::InvalidInput("need at least one replicate".into()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidInput("lambda grid is empty".into()));
        }
        if self
            .lambda_grid
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !(w[0] >= 0.0))
        {
            return Err(Error::InvalidInput(
                "lambda grid must be nonnegative and strictly increasing".into(),
            ));
        }
        if let PercolationRule::LargestClusterFraction(f) = self.percolation_rule {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidInput(
                    "largest-cluster threshold must lie in (0,1)".into(),
                ));
            }
        }
        let kernel = build_kernel(self.kernel.clone())?;
        if let Some(w) = effective_halfwidth(&kernel) {
            if w >= self.torus_side / 2.0 {
                return Err(Error::InvalidInput(format!(
                    "kernel range {w:.3} must be < torus_side/2 = {:.3}",
                    self.torus_side / 2.0
                )));
            }
        }
        Ok(())
    }
}

/// Per-coordinate half-width beyond which pairs are skipped; None means
/// unbounded support (all pairs are examined).
fn effective_halfwidth(kernel: &Kernel) -> Option<f64> {
    match kernel.range() {
        Range::CompactEuclidean(r) => Some(r),
        Range::CompactPerCoordinate(h) => Some(h),
        Range::Soft(r) => Some(r),
        Range::Unbounded => None,
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent ChaCha stream for (seed, salt, replicate, λ).
fn stream_rng(seed: u64, salt: u64, replicate: u64, lambda: f64) -> ChaCha8Rng {
    let mut state = seed ^ splitmix(salt) ^ splitmix(replicate.wrapping_mul(0x517c_c1b7_2722_0a95));
    state ^= splitmix(lambda.to_bits());
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_mut(8) {
        state = splitmix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

#[derive(Debug, Clone)]
pub struct GraphSummary {
    pub n_points: usize,
    pub largest_cluster: u32,
    pub cluster_sizes: Vec<u32>,
    pub wrapped: bool,
    pub percolates: bool,
}

/// Cell list over the torus: CSR point storage plus per-coordinate linear-id
/// contributions so the 3^d neighborhood of a cell enumerates incrementally.
struct CellGrid {
    cps: usize,
    d: usize,
    cell_len: f64,
    start: Vec<u32>,
    points: Vec<u32>,
    coords: Vec<u8>, // n*d cell coordinates
    contrib: Vec<i64>, // [(j*cps + c)*3 + t]
}

impl CellGrid {
    fn build(positions: &[f64], n: usize, d: usize, side: f64, w: f64) -> Option<CellGrid> {
        let mut cps = (side / w).floor() as usize;
        if cps < 3 {
            return None;
        }
        // keep the cell count within a small multiple of n
        let limit = (8 * n.max(512)) as f64;
        while cps > 3 && (cps as f64).powi(d as i32) > limit {
            cps -= 1;
        }
        if (cps as f64).powi(d as i32) > 4.0e6_f64.max(limit) {
            return None;
        }
        let ncells = cps.pow(d as u32);
        let cell_len = side / cps as f64;
        let mut coords = vec![0u8; n * d];
        let mut ids = vec![0u32; n];
        for i in 0..n {
            let mut id = 0usize;
            for j in (0..d).rev() {
                let c = ((positions[i * d + j] / cell_len) as usize).min(cps - 1);
                coords[i * d + j] = c as u8;
                id = id * cps + c;
            }
            ids[i] = id as u32;
        }
        let mut start = vec![0u32; ncells + 1];
        for &id in &ids {
            start[id as usize + 1] += 1;
        }
        for c in 0..ncells {
            start[c + 1] += start[c];
        }
        let mut cursor = start.clone();
        let mut points = vec![0u32; n];
        for i in 0..n {
            let id = ids[i] as usize;
            points[cursor[id] as usize] = i as u32;
            cursor[id] += 1;
        }
        // contribution of coordinate j at cell value c for offsets -1, 0, +1
        let mut contrib = vec![0i64; d * cps * 3];
        let mut stride = 1i64;
        for j in 0..d {
            for c in 0..cps {
                let idx = (j * cps + c) * 3;
                contrib[idx] = ((c + cps - 1) % cps) as i64 * stride;
                contrib[idx + 1] = c as i64 * stride;
                contrib[idx + 2] = ((c + 1) % cps) as i64 * stride;
            }
            stride *= cps as i64;
        }
        Some(CellGrid {
            cps,
            d,
            cell_len,
            start,
            points,
            coords,
            contrib,
        })
    }

    fn cell_coords_of(&self, pos: &[f64]) -> Vec<u8> {
        (0..self.d)
            .map(|j| ((pos[j] / self.cell_len) as usize).min(self.cps - 1) as u8)
            .collect()
    }

    /// Visit every point in the 3^d cells around `coords`.
    fn for_neighbors<F: FnMut(u32)>(&self, coords: &[u8], mut f: F) {
        let d = self.d;
        let mut t = vec![0u8; d];
        let mut id: i64 = (0..d)
            .map(|j| self.contrib[(j * self.cps + coords[j] as usize) * 3])
            .sum();
        loop {
            let c = id as usize;
            let lo = self.start[c] as usize;
            let hi = self.start[c + 1] as usize;
            for &p in &self.points[lo..hi] {
                f(p);
            }
            let mut j = 0;
            loop {
                let base = (j * self.cps + coords[j] as usize) * 3;
                if t[j] < 2 {
                    id += self.contrib[base + t[j] as usize + 1] - self.contrib[base + t[j] as usize];
                    t[j] += 1;
                    break;
                }
                id += self.contrib[base] - self.contrib[base + 2];
                t[j] = 0;
                j += 1;
                if j == d {
                    return;
                }
            }
        }
    }
}

#[inline]
fn min_image(mut delta: f64, side: f64) -> f64 {
    if delta > side / 2.0 {
        delta -= side;
    } else if delta < -side / 2.0 {
        delta += side;
    }
    delta
}

fn draw_points(rng: &mut ChaCha8Rng, lambda: f64, side: f64, d: usize, cap: f64) -> Result<Vec<f64>> {
    let volume = side.powi(d as i32);
    let mean = lambda * volume;
    if mean > cap {
        return Err(Error::ResourceGuard(format!(
            "expected point count {mean:.3e} exceeds the cap {cap:.3e}"
        )));
    }
    if mean <= 0.0 {
        return Ok(Vec::new());
    }
    let n = Poisson::new(mean)
        .map_err(|e| Error::InvalidInput(format!("bad Poisson mean: {e}")))?
        .sample(rng) as usize;
    let mut pos = Vec::with_capacity(n * d);
    for _ in 0..n * d {
        pos.push(rng.gen::<f64>() * side);
    }
    Ok(pos)
}

/// One replicate: Poisson points, independent φ-edges, cluster summary.
/// Deterministic given (config, lambda, replicate).
pub fn sample_graph(config: &McConfig, lambda: f64, replicate: u32) -> Result<GraphSummary> {
    config.validate()?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidInput("lambda must be >= 0".into()));
    }
    let kernel = build_kernel(config.kernel.clone())?;
    sample_graph_with(&kernel, config, lambda, replicate)
}

fn sample_graph_with(
    kernel: &Kernel,
    config: &McConfig,
    lambda: f64,
    replicate: u32,
) -> Result<GraphSummary> {
    let d = kernel.d() as usize;
    let side = config.torus_side;
    let mut rng = stream_rng(config.seed, SALT_GRAPH, replicate as u64, lambda);
    let positions = draw_points(&mut rng, lambda, side, d, config.max_expected_points)?;
    let n = positions.len() / d;
    let mut uf = WindingUf::new(n, d, side);
    let w = effective_halfwidth(kernel);
    connect_edges(kernel, &positions, n, d, side, w, &mut rng, &mut uf)?;
    let cluster_sizes = uf.cluster_sizes();
    let largest = cluster_sizes.iter().copied().max().unwrap_or(0);
    let percolates = match config.percolation_rule {
        PercolationRule::Wrapping => uf.wrapped,
        PercolationRule::LargestClusterFraction(f) => {
            n > 0 && largest as f64 >= f * n as f64
        }
    };
    Ok(GraphSummary {
        n_points: n,
        largest_cluster: largest,
        cluster_sizes,
        wrapped: uf.wrapped,
        percolates,
    })
}

#[allow(clippy::too_many_arguments)]
fn connect_edges(
    kernel: &Kernel,
    positions: &[f64],
    n: usize,
    d: usize,
    side: f64,
    halfwidth: Option<f64>,
    rng: &mut ChaCha8Rng,
    uf: &mut WindingUf,
) -> Result<()> {
    let mut delta = vec![0.0f64; d];
    let grid = halfwidth.and_then(|w| CellGrid::build(positions, n, d, side, w));
    match (&grid, halfwidth) {
        (Some(grid), Some(w)) => {
            let mut candidates: Vec<u32> = Vec::new();
            for i in 0..n {
                candidates.clear();
                grid.for_neighbors(&grid.coords[i * d..(i + 1) * d], |p| {
                    if p as usize > i {
                        candidates.push(p);
                    }
                });
                candidates.sort_unstable();
                'pair: for &j in &candidates {
                    let j = j as usize;
                    for t in 0..d {
                        let dt = min_image(positions[j * d + t] - positions[i * d + t], side);
                        if dt.abs() > w {
                            continue 'pair;
                        }
                        delta[t] = dt;
                    }
                    let p = kernel.eval(&delta);
                    if p > 0.0 && rng.gen::<f64>() < p {
                        uf.union(i, j, &delta);
                    }
                }
            }
        }
        _ => {
            if n > ALL_PAIRS_CAP {
                return Err(Error::ResourceGuard(format!(
                    "all-pairs sampling refused for {n} points (cap {ALL_PAIRS_CAP})"
                )));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    for t in 0..d {
                        delta[t] = min_image(positions[j * d + t] - positions[i * d + t], side);
                    }
                    if let Some(w) = halfwidth {
                        if delta.iter().any(|v| v.abs() > w) {
                            continue;
                        }
                    }
                    let p = kernel.eval(&delta);
                    if p > 0.0 && rng.gen::<f64>() < p {
                        uf.union(i, j, &delta);
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McRow {
    pub lambda: f64,
    pub replicate: u32,
    pub percolates: bool,
    pub n_points: usize,
    pub largest_cluster: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub lambda_c_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Isotonic-regressed percolation fractions per λ.
    pub wrap_prob_curve: Vec<CurvePoint>,
    pub n_points_mean: f64,
}

/// All (λ, replicate) samples of the grid sweep, in deterministic order.
pub fn run_grid(config: &McConfig) -> Result<Vec<McRow>> {
    config.validate()?;
    let kernel = build_kernel(config.kernel.clone())?;
    let jobs: Vec<(f64, u32)> = config
        .lambda_grid
        .iter()
        .flat_map(|&l| (0..config.replicates).map(move |r| (l, r)))
        .collect();
    let mut results: Vec<Result<McRow>> = Vec::new();
    jobs.par_iter()
        .map(|&(lambda, rep)| {
            let s = sample_graph_with(&kernel, config, lambda, rep)?;
            Ok(McRow {
                lambda,
                replicate: rep,
                percolates: s.percolates,
                n_points: s.n_points,
                largest_cluster: s.largest_cluster,
            })
        })
        .collect_into_vec(&mut results);
    results.into_iter().collect()
}

/// Crossing estimate from pre-computed rows (isotonic fit + inverse at 1/2,
/// bootstrap CI over replicates).
pub fn estimate_from_rows(config: &McConfig, rows: &[McRow]) -> Result<McEstimate> {
    let grid = &config.lambda_grid;
    let nl = grid.len();
    let reps = config.replicates as usize;
    if rows.len() != nl * reps {
        return Err(Error::InvalidInput("row count does not match the grid".into()));
    }
    // outcome matrix indexed [lambda][replicate]
    let mut outcomes = vec![vec![false; reps]; nl];
    for row in rows {
        let li = grid
            .iter()
            .position(|&l| l == row.lambda)
            .ok_or_else(|| Error::InvalidInput("row λ not on the grid".into()))?;
        outcomes[li][row.replicate as usize] = row.percolates;
    }
    let fractions: Vec<f64> = outcomes
        .iter()
        .map(|o| o.iter().filter(|&&b| b).count() as f64 / reps as f64)
        .collect();
    let weights = vec![reps as f64; nl];
    let fitted = stats::isotonic_regression(&fractions, &weights);
    let lambda_c_hat = stats::inverse_at(grid, &fitted, 0.5).ok_or_else(|| {
        Error::NoCrossing(format!(
            "regressed percolation curve spans [{:.3}, {:.3}] and never brackets 1/2",
            fitted.first().copied().unwrap_or(f64::NAN),
            fitted.last().copied().unwrap_or(f64::NAN)
        ))
    })?;

    let mut boot_rng = stream_rng(config.seed, SALT_BOOTSTRAP, 0, 0.0);
    let mut estimates: Vec<f64> = Vec::new();
    for _ in 0..200 {
        let resampled: Vec<f64> = outcomes
            .iter()
            .map(|o| {
                let hits = (0..reps)
                    .filter(|_| o[boot_rng.gen_range(0..reps)])
                    .count();
                hits as f64 / reps as f64
            })
            .collect();
        let fit = stats::isotonic_regression(&resampled, &weights);
        if let Some(est) = stats::inverse_at(grid, &fit, 0.5) {
            estimates.push(est);
        }
    }
    let (ci_low, ci_high) = if estimates.is_empty() {
        (grid[0], grid[nl - 1])
    } else {
        estimates.sort_by(|a, b| a.total_cmp(b));
        (
            stats::percentile(&estimates, 2.5).min(lambda_c_hat),
            stats::percentile(&estimates, 97.5).max(lambda_c_hat),
        )
    };
    let n_points_mean =
        rows.iter().map(|r| r.n_points as f64).sum::<f64>() / rows.len() as f64;
    Ok(McEstimate {
        lambda_c_hat,
        ci_low,
        ci_high,
        wrap_prob_curve: grid
            .iter()
            .zip(&fitted)
            .map(|(&lambda, &fraction)| CurvePoint { lambda, fraction })
            .collect(),
        n_points_mean,
    })
}

pub fn estimate_lambda_c(config: &McConfig) -> Result<McEstimate> {
    let rows = run_grid(config)?;
    estimate_from_rows(config, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointRow {
    pub x: Vec<f64>,
    pub tau_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub trials: u64,
}

/// Empirical two-point function: augment each background sample with two
/// marked points at separation x and report their connection frequency. The
/// marked pair is connected iff they share a direct edge or some background
/// cluster is adjacent to both, so the background union-find never has to be
/// rebuilt per displacement.
pub fn estimate_two_point(
    config: &McConfig,
    lambda: f64,
    displacements: &[Vec<f64>],
) -> Result<Vec<TwoPointRow>> {
    config.validate()?;
    let kernel = build_kernel(config.kernel.clone())?;
    let d = kernel.d() as usize;
    let side = config.torus_side;
    for x in displacements {
        if x.len() != d {
            return Err(Error::InvalidInput("displacement dimension mismatch".into()));
        }
    }
    let w = effective_halfwidth(&kernel);
    let reps = config.replicates as usize;
    let per_rep: Vec<Result<Vec<bool>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(config.seed, SALT_TWOPOINT, rep as u64, lambda);
            let positions = draw_points(&mut rng, lambda, side, d, config.max_expected_points)?;
            let n = positions.len() / d;
            if w.is_none() && n > ALL_PAIRS_CAP {
                return Err(Error::ResourceGuard(format!(
                    "all-pairs sampling refused for {n} points"
                )));
            }
            let mut uf = WindingUf::new(n, d, side);
            connect_edges(&kernel, &positions, n, d, side, w, &mut rng, &mut uf)?;
            let grid = w.and_then(|w| CellGrid::build(&positions, n, d, side, w));
            let mut outcomes = Vec::with_capacity(displacements.len());
            let mut delta = vec![0.0f64; d];
            for x in displacements {
                let a_pos: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * side).collect();
                let b_pos: Vec<f64> = (0..d)
                    .map(|j| (a_pos[j] + x[j]).rem_euclid(side))
                    .collect();
                for j in 0..d {
                    delta[j] = min_image(b_pos[j] - a_pos[j], side);
                }
                let direct = {
                    let p = kernel.eval(&delta);
                    p > 0.0 && rng.gen::<f64>() < p
                };
                let mut connected = direct;
                let mut roots_a: Vec<usize> = Vec::new();
                for (pos, roots) in [(&a_pos, true), (&b_pos, false)] {
                    if connected && !roots {
                        // still draw nothing further: outcome decided; the per
                        // -displacement RNG usage may differ, which is fine
                        break;
                    }
                    let mut hit = |uf: &mut WindingUf, idx: usize, rng: &mut ChaCha8Rng| {
                        for j in 0..d {
                            let dt = min_image(positions[idx * d + j] - pos[j], side);
                            if let Some(w) = w {
                                if dt.abs() > w {
                                    return None;
                                }
                            }
                            delta[j] = dt;
                        }
                        let p = kernel.eval(&delta);
                        if p > 0.0 && rng.gen::<f64>() < p {
                            Some(uf.find(idx))
                        } else {
                            None
                        }
                    };
                    let mut found: Vec<usize> = Vec::new();
                    match &grid {
                        Some(g) => {
                            let coords = g.cell_coords_of(pos);
                            let mut cands: Vec<u32> = Vec::new();
                            g.for_neighbors(&coords, |p| cands.push(p));
                            cands.sort_unstable();
                            for &c in &cands {
                                if let Some(r) = hit(&mut uf, c as usize, &mut rng) {
                                    found.push(r);
                                }
                            }
                        }
                        None => {
                            for idx in 0..n {
                                if let Some(r) = hit(&mut uf, idx, &mut rng) {
                                    found.push(r);
                                }
                            }
                        }
                    }
                    if roots {
                        roots_a = found;
                    } else if !connected {
                        connected = found.iter().any(|r| roots_a.contains(r));
                    }
                }
                outcomes.push(connected);
            }
            Ok(outcomes)
        })
        .collect();
    let mut successes = vec![0u64; displacements.len()];
    for rep in per_rep {
        for (i, ok) in rep?.into_iter().enumerate() {
            if ok {
                successes[i] += 1;
            }
        }
    }
    Ok(displacements
        .iter()
        .zip(&successes)
        .map(|(x, &s)| {
            let (lo, hi) = stats::wilson_ci(s, reps as u64, 1.96);
            TwoPointRow {
                x: x.clone(),
                tau_hat: s as f64 / reps as f64,
                ci_low: lo,
                ci_high: hi,
                successes: s,
                trials: reps as u64,
            }
        })
        .collect())
}

pub fn write_mc_csv<W: std::io::Write>(rows: &[McRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["lambda", "replicate", "percolates", "n_points", "largest_cluster"])?;
    for r in rows {
        wtr.write_record([
            format!("{}", r.lambda),
            r.replicate.to_string(),
            (r.percolates as u8).to_string(),
            r.n_points.to_string(),
            r.largest_cluster.to_string(),
        ])?;
    }
    wtr.flush().map_err(Error::Io)?;
    Ok(())
}
