//! One- and two-point small-ball probabilities of the least singular value.

use serde::{Deserialize, Serialize};

use super::{check_grid, per_replica, EstimateRecord, ProbeConfig};
use crate::spectral::{eigenvalues, sigma_min_shifted, Spectrum};
use crate::{Error, Result};

/// Minimal distance between the two shifts, checked but never enforced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Separation {
    #[default]
    Unchecked,
    /// `|lambda1 - lambda2| >= delta sqrt(n)`
    Bulk { delta: f64 },
    /// `|lambda1 - lambda2| >= delta n^(sigma - 1/2)`
    Mesoscopic { delta: f64, sigma: f64 },
}

impl Separation {
    /// Required distance in absolute units.
    pub fn required(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            Separation::Unchecked => 0.0,
            Separation::Bulk { delta } => delta * n.sqrt(),
            Separation::Mesoscopic { delta, sigma } => delta * n.powf(sigma - 0.5),
        }
    }
}

/// Joint estimate with its two marginals, all from the same replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    pub joint: EstimateRecord,
    pub first: EstimateRecord,
    pub second: EstimateRecord,
}

impl JointEstimate {
    /// `p_joint / (p_1 p_2)`, if both marginals are nonzero.
    pub fn decoupling_ratio(&self) -> Option<f64> {
        let denom = self.first.p_hat * self.second.p_hat;
        (denom > 0.0).then(|| self.joint.p_hat / denom)
    }
}

/// `sqrt(n) sigma_min(A - lambda)`, with a resonant shift counted as 0.
fn scaled_sigma_min(spectrum: &Spectrum, lambda: f64) -> f64 {
    let s = sigma_min_shifted(spectrum, lambda);
    if s < spectrum.resonance_threshold() {
        0.0
    } else {
        s * (spectrum.n() as f64).sqrt()
    }
}

fn check_lambda(cfg: &ProbeConfig, lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::param("lambda", "must be finite"));
    }
    cfg.check_bulk(lambda)
}

/// Frequency of `sigma_min(A - lambda) <= delta / sqrt(n)`.
pub fn smallball_one(cfg: &ProbeConfig, lambda: f64, delta: f64) -> Result<EstimateRecord> {
    Ok(smallball_one_grid(cfg, lambda, &[delta])?.remove(0))
}

/// [`smallball_one`] over a grid of `delta`, sharing the replicas.
pub fn smallball_one_grid(cfg: &ProbeConfig, lambda: f64, deltas: &[f64]) -> Result<Vec<EstimateRecord>> {
    check_lambda(cfg, lambda)?;
    check_grid("delta", deltas, false)?;
    let stats = per_replica(cfg, |a| Ok(scaled_sigma_min(&eigenvalues(&a)?, lambda)))?;
    deltas
        .iter()
        .map(|&delta| {
            let hits = super::count(&stats, |s| s <= delta);
            let mut rec = EstimateRecord::new("smallball", cfg.n, hits, cfg.replicas, cfg.lineage())?;
            rec.lambda1 = Some(lambda);
            rec.delta1 = Some(delta);
            Ok(rec)
        })
        .collect()
}

/// Frequency of `sigma_min(A - lambda_i) <= delta_i / sqrt(n)` for both `i`.
pub fn smallball_joint(
    cfg: &ProbeConfig,
    lambda1: f64,
    lambda2: f64,
    delta1: f64,
    delta2: f64,
    separation: Separation,
) -> Result<JointEstimate> {
    Ok(smallball_joint_grid(cfg, lambda1, lambda2, &[(delta1, delta2)], separation)?.remove(0))
}

/// [`smallball_joint`] over a list of `(delta1, delta2)` pairs, sharing the
/// replicas. A separation violation is recorded in `extra`, not rejected.
pub fn smallball_joint_grid(
    cfg: &ProbeConfig,
    lambda1: f64,
    lambda2: f64,
    deltas: &[(f64, f64)],
    separation: Separation,
) -> Result<Vec<JointEstimate>> {
    check_lambda(cfg, lambda1)?;
    check_lambda(cfg, lambda2)?;
    if deltas.is_empty() {
        return Err(Error::Empty("delta pairs"));
    }
    let flat: Vec<f64> = deltas.iter().flat_map(|&(a, b)| [a, b]).collect();
    check_grid("delta", &flat, true)?;
    let separation_ok = (lambda1 - lambda2).abs() >= separation.required(cfg.n);
    let stats = per_replica(cfg, |a| {
        let spec = eigenvalues(&a)?;
        Ok((scaled_sigma_min(&spec, lambda1), scaled_sigma_min(&spec, lambda2)))
    })?;
    let seed = cfg.lineage();
    deltas
        .iter()
        .map(|&(d1, d2)| {
            let hit1 = |s: f64| s <= d1;
            let hit2 = |s: f64| s <= d2;
            let c1 = stats.iter().filter(|s| hit1(s.0)).count() as u64;
            let c2 = stats.iter().filter(|s| hit2(s.1)).count() as u64;
            let cj = stats.iter().filter(|s| hit1(s.0) && hit2(s.1)).count() as u64;
            let mut first = EstimateRecord::new("smallball", cfg.n, c1, cfg.replicas, seed.clone())?;
            first.lambda1 = Some(lambda1);
            first.delta1 = Some(d1);
            let mut second = EstimateRecord::new("smallball", cfg.n, c2, cfg.replicas, seed.clone())?;
            second.lambda1 = Some(lambda2);
            second.delta1 = Some(d2);
            let mut joint = EstimateRecord::new("joint", cfg.n, cj, cfg.replicas, seed.clone())?;
            joint.lambda1 = Some(lambda1);
            joint.lambda2 = Some(lambda2);
            joint.delta1 = Some(d1);
            joint.delta2 = Some(d2);
            let mut est = JointEstimate { joint, first, second };
            let ratio = est.decoupling_ratio();
            est.joint = est
                .joint
                .with_extra("phat1", est.first.p_hat)
                .with_extra("phat2", est.second.p_hat)
                .with_extra("decoupling_ratio", ratio)
                .with_extra("separation_ok", separation_ok);
            Ok(est)
        })
        .collect()
}
