//! Rigidity, local law and delocalization probes.

use serde::{Deserialize, Serialize};

use super::{check_grid, per_replica, EstimateRecord, ProbeConfig};
use crate::spectral::{
    delocalized_fractions, eig_symmetric, eigenvalues, local_count, semicircle_density, shifted_spectrum,
    Spectrum,
};
use crate::stats::percentile_sorted;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityRow {
    pub k: usize,
    pub mean: f64,
    pub p5: f64,
    pub p95: f64,
}

/// Summary of `mu_k(lambda) k / sqrt(n)` across replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityProfile {
    pub n: usize,
    pub lambda: f64,
    pub rows: Vec<RigidityRow>,
    /// replicas left out because `lambda` hit an eigenvalue
    pub resonant: u64,
    pub trials: u64,
    pub seed: String,
}

/// `mu_k(lambda) k / sqrt(n)` for `k` in `k_lo..=k_hi`, or `None` when
/// `lambda` is resonant.
pub(crate) fn rigidity_values(spectrum: &Spectrum, lambda: f64, k_lo: usize, k_hi: usize) -> Result<Option<Vec<f64>>> {
    let shift = shifted_spectrum(spectrum, lambda)?;
    if shift.is_resonant() {
        return Ok(None);
    }
    let root = (spectrum.n() as f64).sqrt();
    let mu = shift.mu();
    Ok(Some((k_lo..=k_hi).map(|k| mu[k - 1] * k as f64 / root).collect()))
}

/// Per-`k` mean and 5th/95th percentiles of `mu_k(lambda) k / sqrt(n)` for
/// `k` in `k_lo..=k_hi`.
pub fn rigidity_profile(cfg: &ProbeConfig, lambda: f64, k_lo: usize, k_hi: usize) -> Result<RigidityProfile> {
    if !(1 <= k_lo && k_lo <= k_hi && k_hi <= cfg.n) {
        return Err(Error::param("k_range", format!("[{k_lo}, {k_hi}] is not inside [1, {}]", cfg.n)));
    }
    cfg.check_bulk(lambda)?;
    let samples = per_replica(cfg, |a| rigidity_values(&eigenvalues(&a)?, lambda, k_lo, k_hi))?;
    let kept: Vec<Vec<f64>> = samples.iter().flatten().cloned().collect();
    if kept.is_empty() {
        return Err(Error::Empty("non-resonant replicas"));
    }
    let rows = (k_lo..=k_hi)
        .enumerate()
        .map(|(i, k)| {
            let mut col: Vec<f64> = kept.iter().map(|s| s[i]).collect();
            col.sort_unstable_by(f64::total_cmp);
            RigidityRow {
                k,
                mean: col.iter().sum::<f64>() / col.len() as f64,
                p5: percentile_sorted(&col, 0.05),
                p95: percentile_sorted(&col, 0.95),
            }
        })
        .collect();
    Ok(RigidityProfile {
        n: cfg.n,
        lambda,
        rows,
        resonant: (samples.len() - kept.len()) as u64,
        trials: cfg.replicas,
        seed: cfg.lineage(),
    })
}

/// Frequency of `|N / (n eta) - rho_sc(e)| >= delta`, where `N` counts the
/// eigenvalues of `A / sqrt(n)` in the window of length `eta` centred at `e`.
///
/// A window with `n eta < 1` or `eta > 1` is outside the range of the local
/// law; the records then carry a `warning` entry.
pub fn local_law_deviation(cfg: &ProbeConfig, e: f64, eta: f64, deltas: &[f64]) -> Result<Vec<EstimateRecord>> {
    if !e.is_finite() {
        return Err(Error::param("e", "must be finite"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param("eta", format!("{eta} must be positive")));
    }
    check_grid("delta", deltas, false)?;
    let n_eta = cfg.n as f64 * eta;
    let rho = semicircle_density(e);
    let dev = per_replica(cfg, |a| Ok((local_count(&eigenvalues(&a)?, e, eta) as f64 / n_eta - rho).abs()))?;
    let warning = (n_eta < 1.0 || eta > 1.0).then(|| format!("eta = {eta} is outside [1/n, 1]"));
    let seed = cfg.lineage();
    deltas
        .iter()
        .map(|&delta| {
            let hits = super::count(&dev, |x| x >= delta);
            let mut rec = EstimateRecord::new("locallaw", cfg.n, hits, cfg.replicas, seed.clone())?
                .with_extra("e", e)
                .with_extra("eta", eta)
                .with_extra("rho_sc", rho);
            rec.delta1 = Some(delta);
            if let Some(w) = &warning {
                rec = rec.with_extra("warning", w.clone());
            }
            Ok(rec)
        })
        .collect()
}

/// Frequency that every eigenvector has at least `frac n` coordinates with
/// `|v_j| >= tau / sqrt(n)`.
pub fn delocalization_frequency(cfg: &ProbeConfig, tau: f64, frac: f64) -> Result<EstimateRecord> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", format!("{tau} must be finite and nonnegative")));
    }
    if !(0.0..=1.0).contains(&frac) {
        return Err(Error::param("frac", format!("{frac} is not in [0, 1]")));
    }
    let worst = per_replica(cfg, |a| {
        let dec = eig_symmetric(&a)?;
        Ok(delocalized_fractions(&dec, tau).into_iter().fold(1.0, f64::min))
    })?;
    let hits = super::count(&worst, |f| f >= frac);
    Ok(EstimateRecord::new("deloc", cfg.n, hits, cfg.replicas, cfg.lineage())?
        .with_extra("tau", tau)
        .with_extra("frac", frac))
}
