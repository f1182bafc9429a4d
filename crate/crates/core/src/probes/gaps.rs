//! Minimal singular-value gaps and linear eigenvalue statistics.

use serde::{Deserialize, Serialize};

use super::{check_grid, per_replica, EstimateRecord, ProbeConfig};
use crate::spectral::{eigenvalues, min_sv_gap, Units};
use crate::{Error, Result};

/// Two singular values are indistinct when their gap is at most this
/// multiple of `sqrt(n)`.
pub const DISTINCTNESS_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapLaw {
    /// one record per `eps`
    pub records: Vec<EstimateRecord>,
    /// frequency that all singular values in the interval are distinct
    pub distinctness: EstimateRecord,
}

/// Frequency of `min gap of singular values in [lo, hi] <= eps n^{-3/2}`.
pub fn gap_law(cfg: &ProbeConfig, lo: f64, hi: f64, units: Units, eps_grid: &[f64]) -> Result<GapLaw> {
    check_grid("eps", eps_grid, true)?;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::param("interval", format!("[{lo}, {hi}] is not a nonempty interval of [0, inf)")));
    }
    let scale = units.scale(cfg.n);
    if let Some(k) = cfg.bulk_kappa {
        let root = cfg.sqrt_n();
        if lo * scale < k * root || hi * scale > (2.0 - k) * root {
            return Err(Error::param("interval", "not inside the bulk [kappa sqrt(n), (2 - kappa) sqrt(n)]"));
        }
    }
    let n32 = (cfg.n as f64).powf(1.5);
    // infinite when fewer than two singular values fall inside
    let gaps = per_replica(cfg, |a| Ok(min_sv_gap(&eigenvalues(&a)?, lo, hi, units)))?;
    let seed = cfg.lineage();
    let records = eps_grid
        .iter()
        .map(|&eps| {
            let hits = super::count(&gaps, |g| g * n32 <= eps);
            let rec = EstimateRecord::new("gaps", cfg.n, hits, cfg.replicas, seed.clone())?;
            Ok(tag_interval(rec, lo * scale, hi * scale, eps))
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = DISTINCTNESS_RTOL * cfg.sqrt_n();
    let distinct = super::count(&gaps, |g| g > tol);
    let distinctness = EstimateRecord::new("gaps_distinct", cfg.n, distinct, cfg.replicas, seed)?
        .with_extra("interval_lo", lo * scale)
        .with_extra("interval_hi", hi * scale)
        .with_extra("tolerance", tol);
    Ok(GapLaw { records, distinctness })
}

fn tag_interval(mut rec: EstimateRecord, lo: f64, hi: f64, eps: f64) -> EstimateRecord {
    rec.eps = Some(eps);
    rec.with_extra("interval_lo", lo).with_extra("interval_hi", hi)
}

/// `min |x_i + a2 x_j - d|` over ordered eigenvalue pairs `i != j` with
/// `|x_i - x_j| >= separation`; `+inf` if there is no such pair.
pub(crate) fn linear_gap(values: &[f64], a2: f64, d: f64, separation: f64) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &x) in values.iter().enumerate() {
        for (j, &y) in values.iter().enumerate() {
            if i != j && (x - y).abs() >= separation {
                best = best.min((x + a2 * y - d).abs());
            }
        }
    }
    best
}

/// Frequency that some pair of eigenvalues at distance at least
/// `separation sqrt(n)` satisfies `|x1 + a2 x2 - d| <= eps n^{-3/2}`.
pub fn linear_statistic(
    cfg: &ProbeConfig,
    a2: f64,
    d: f64,
    eps_grid: &[f64],
    separation: f64,
) -> Result<Vec<EstimateRecord>> {
    check_grid("eps", eps_grid, true)?;
    if !a2.is_finite() || !d.is_finite() {
        return Err(Error::param("a2", "coefficients must be finite"));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::param("separation", format!("{separation} must be finite and nonnegative")));
    }
    let sep = separation * cfg.sqrt_n();
    let n32 = (cfg.n as f64).powf(1.5);
    let stats = per_replica(cfg, |a| Ok(linear_gap(eigenvalues(&a)?.values(), a2, d, sep)))?;
    let seed = cfg.lineage();
    eps_grid
        .iter()
        .map(|&eps| {
            let hits = super::count(&stats, |s| s * n32 <= eps);
            let mut rec = EstimateRecord::new("linstat", cfg.n, hits, cfg.replicas, seed.clone())?;
            rec.eps = Some(eps);
            Ok(rec
                .with_extra("a2", a2)
                .with_extra("d", d)
                .with_extra("separation", sep))
        })
        .collect()
}
