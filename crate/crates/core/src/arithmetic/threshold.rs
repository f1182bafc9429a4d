//! Monte Carlo threshold function of a vector pair under the zeroed-out
//! matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norm2;
use crate::ensemble::{sample_zeroed_matrix, RngHandle, ZeroedSpec};
use crate::stats::wilson_interval;
use crate::{Error, Result};

const GRID_POINTS: usize = 64;
const GRID_MIN: f64 = 1e-4;

/// Right-hand side the small-ball probability is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Benchmark {
    /// `(4 L^2 t^2 / eps1)^n`
    Eps1 { l: f64, eps1: f64 },
    /// `(4 L0^2 t)^n`, with `L0` supplied by the caller
    Zero { l0: f64 },
}

impl Benchmark {
    pub fn value(&self, t: f64, n: usize) -> f64 {
        let base = match *self {
            Benchmark::Eps1 { l, eps1 } => 4.0 * l * l * t * t / eps1,
            Benchmark::Zero { l0 } => 4.0 * l0 * l0 * t,
        };
        base.powi(n as i32)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Benchmark::Eps1 { l, eps1 } => l > 0.0 && eps1 > 0.0,
            Benchmark::Zero { l0 } => l0 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param("benchmark", "L and eps1 must be positive"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub t: f64,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub lo: f64,
    pub hi: f64,
    pub benchmark: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// largest grid `t` with `p_hat >= benchmark`, or 0 if there is none
    pub tau: f64,
    pub curve: Vec<ThresholdPoint>,
}

/// 64 logarithmically spaced points from `1e-4` to `1`.
pub fn threshold_t_grid() -> Vec<f64> {
    let (a, b) = (GRID_MIN.ln(), 0.0f64);
    (0..GRID_POINTS)
        .map(|i| {
            if i + 1 == GRID_POINTS {
                1.0
            } else {
                (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).exp()
            }
        })
        .collect()
}

/// Estimates `tau = sup { t in [0, 1] : P(||(M v, M w)|| <= t sqrt(n)) >= benchmark(t) }`.
///
/// Trial `i` draws its matrix from `rng.child(i)`, so the estimate does not
/// depend on how trials are scheduled across threads.
pub fn threshold_tau(
    v: &[f64],
    w: &[f64],
    benchmark: Benchmark,
    spec: &ZeroedSpec,
    trials: u64,
    rng: &RngHandle,
) -> Result<ThresholdEstimate> {
    benchmark.validate()?;
    let n = spec.n();
    if v.len() != n || w.len() != n {
        return Err(Error::Shape(format!(
            "vectors of length {} and {} for n = {n}",
            v.len(),
            w.len()
        )));
    }
    if trials < 100 {
        return Err(Error::param("trials", format!("{trials} < 100")));
    }
    let stats: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let m = sample_zeroed_matrix(spec, &mut rng.child(i).stream());
            let mv = m.mul_vec(v);
            let mw = m.mul_vec(w);
            (norm2(&mv).powi(2) + norm2(&mw).powi(2)).sqrt()
        })
        .collect();
    let root_n = (n as f64).sqrt();
    let mut curve = Vec::with_capacity(GRID_POINTS);
    for t in threshold_t_grid() {
        let successes = stats.iter().filter(|&&s| s <= t * root_n).count() as u64;
        let (lo, hi) = wilson_interval(successes, trials, 1.96)?;
        curve.push(ThresholdPoint {
            t,
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            lo,
            hi,
            benchmark: benchmark.value(t, n),
        });
    }
    let tau = curve
        .iter()
        .filter(|p| p.p_hat >= p.benchmark)
        .map(|p| p.t)
        .fold(0.0, f64::max);
    Ok(ThresholdEstimate { tau, curve })
}
