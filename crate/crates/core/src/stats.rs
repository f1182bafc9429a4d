use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Wilson score interval for a binomial proportion, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    if successes > trials {
        return Err(Error::param("successes", format!("{successes} exceeds {trials} trials")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let mut lo = (centre - half).clamp(0.0, 1.0);
    let mut hi = (centre + half).clamp(0.0, 1.0);
    // exact at the boundaries; rounding can leave p a hair outside
    if successes == 0 {
        lo = 0.0;
    }
    if successes == trials {
        hi = 1.0;
    }
    Ok((lo.min(p), hi.max(p)))
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope; 0 when the fit uses exactly two points
    pub stderr: f64,
    pub r2: f64,
    pub points_used: usize,
    pub points_dropped: usize,
}

/// Fits `log y = intercept + slope log x` (natural logs).
///
/// With `drop_zeros`, points with `y == 0` are removed and counted in
/// `points_dropped`; otherwise they are an error.
pub fn fit_loglog_slope(points: &[(f64, f64)], drop_zeros: bool) -> Result<SlopeFit> {
    let mut dropped = 0;
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x > 0.0 && x.is_finite()) || !(y >= 0.0 && y.is_finite()) {
            return Err(Error::param("points", format!("({x}, {y}) is not in the positive quadrant")));
        }
        if y == 0.0 {
            if drop_zeros {
                dropped += 1;
                continue;
            }
            return Err(Error::param("points", format!("y = 0 at x = {x}")));
        }
        xs.push(x.ln());
        ys.push(y.ln());
    }
    let m = xs.len();
    if m < 2 {
        return Err(Error::param("points", format!("{m} usable points, need at least 2")));
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "all x values coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if m > 2 { (sse / (mf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        r2,
        points_used: m,
        points_dropped: dropped,
    })
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub(crate) fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}
