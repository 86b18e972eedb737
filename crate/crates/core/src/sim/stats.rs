//! Small statistics helpers: pool-adjacent-violators isotonic regression,
//! curve inversion, percentiles and a Wilson binomial interval.

/// Weighted least-squares monotone (nondecreasing) fit via PAVA.
pub fn isotonic_regression(y: &[f64], w: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), w.len());
    // blocks of (weighted sum, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        blocks.push((yi * wi, wi, 1));
        while blocks.len() >= 2 {
            let b = blocks[blocks.len() - 1];
            let a = blocks[blocks.len() - 2];
            if a.0 / a.1 <= b.0 / b.1 {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().unwrap();
            last.0 += b.0;
            last.1 += b.1;
            last.2 += b.2;
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (sum, weight, len) in blocks {
        for _ in 0..len {
            out.push(sum / weight);
        }
    }
    out
}

/// First x where the nondecreasing curve reaches `level`, by linear
/// interpolation; None when the level is never bracketed from below.
pub fn inverse_at(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    if ys.is_empty() || ys[0] >= level || *ys.last().unwrap() < level {
        return None;
    }
    for i in 1..ys.len() {
        if ys[i] >= level {
            let t = (level - ys[i - 1]) / (ys[i] - ys[i - 1]);
            return Some(xs[i - 1] + t * (xs[i] - xs[i - 1]));
        }
    }
    None
}

/// Percentile (0..=100) of a sorted slice with linear interpolation.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let t = (p / 100.0) * (sorted.len() - 1) as f64;
    let i = t.floor() as usize;
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = t - i as f64;
    sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
