//! Monte Carlo probes.
//!
//! Replica `r` of every matrix probe draws its Wigner matrix from
//! `RngHandle::new(seed).child(r)`, so all probes run with the same
//! configuration see the same matrices. Replicas are evaluated in parallel
//! on the current rayon pool and reduced by counting, which makes every
//! record independent of the worker count.

mod gaps;
mod hanson_wright;
mod ilo;
mod profiles;
mod smallball;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use gaps::{gap_law, linear_statistic, GapLaw, DISTINCTNESS_RTOL};
pub use hanson_wright::{hanson_wright_tail, MatrixSource};
pub use ilo::{ilo_event_frequency, IloSpec};
pub use profiles::{delocalization_frequency, local_law_deviation, rigidity_profile, RigidityProfile, RigidityRow};
pub use smallball::{smallball_joint, smallball_joint_grid, smallball_one, smallball_one_grid, JointEstimate, Separation};

use crate::ensemble::{sample_symmetric, DistributionSpec, RngHandle, SymmetricMatrix};
use crate::stats::wilson_interval;
use crate::{Error, Result};

/// Shared settings of the matrix probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub ensemble: DistributionSpec,
    pub n: usize,
    pub replicas: u64,
    pub seed: u64,
    /// When set, shifts must lie in `[-(2 - kappa) sqrt(n), (2 - kappa) sqrt(n)]`.
    #[serde(default)]
    pub bulk_kappa: Option<f64>,
}

impl ProbeConfig {
    pub fn new(ensemble: DistributionSpec, n: usize, replicas: u64, seed: u64) -> Self {
        Self {
            ensemble,
            n,
            replicas,
            seed,
            bulk_kappa: None,
        }
    }

    pub fn with_bulk_kappa(mut self, kappa: f64) -> Self {
        self.bulk_kappa = Some(kappa);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        if self.replicas == 0 {
            return Err(Error::param("replicas", "must be positive"));
        }
        if let Some(k) = self.bulk_kappa {
            if !(k > 0.0 && k < 2.0) {
                return Err(Error::param("bulk_kappa", format!("{k} is not in (0, 2)")));
            }
        }
        Ok(())
    }

    pub(crate) fn check_bulk(&self, lambda: f64) -> Result<()> {
        if let Some(k) = self.bulk_kappa {
            let edge = (2.0 - k) * (self.n as f64).sqrt();
            if lambda.abs() > edge {
                return Err(Error::param("lambda", format!("{lambda} lies outside the bulk [-{edge}, {edge}]")));
            }
        }
        Ok(())
    }

    pub fn root(&self) -> RngHandle {
        RngHandle::new(self.seed)
    }

    pub(crate) fn lineage(&self) -> String {
        format!("{}/[0..{})", self.root(), self.replicas)
    }

    pub(crate) fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }
}

/// One Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub probe: String,
    pub n: usize,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub eps: Option<f64>,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// Wilson interval at z = 1.96
    pub lo: f64,
    pub hi: f64,
    pub seed: String,
    pub extra: BTreeMap<String, Value>,
}

impl EstimateRecord {
    pub fn new(probe: &str, n: usize, successes: u64, trials: u64, seed: String) -> Result<Self> {
        let (lo, hi) = wilson_interval(successes, trials, 1.96)?;
        Ok(Self {
            probe: probe.to_string(),
            n,
            lambda1: None,
            lambda2: None,
            delta1: None,
            delta2: None,
            eps: None,
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            lo,
            hi,
            seed,
            extra: BTreeMap::new(),
        })
    }

    pub(crate) fn with_extra(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }

    /// The grid variable of the record: the first of `delta1`, `eps`, or
    /// a `t` entry in `extra`.
    pub fn x(&self) -> Option<f64> {
        self.delta1
            .or(self.eps)
            .or_else(|| self.extra.get("t").and_then(Value::as_f64))
    }
}

/// Evaluates `f` on the Wigner matrix of every replica, in replica order.
pub(crate) fn per_replica<T, F>(cfg: &ProbeConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(SymmetricMatrix) -> Result<T> + Sync,
{
    cfg.validate()?;
    let root = cfg.root();
    let out: Vec<Result<T>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| f(sample_symmetric(cfg.n, &cfg.ensemble, &mut root.child(r).stream())))
        .collect();
    // first failure by replica index, whatever the schedule
    out.into_iter().collect()
}

pub(crate) fn count(values: &[f64], pred: impl Fn(f64) -> bool) -> u64 {
    values.iter().filter(|&&x| pred(x)).count() as u64
}

pub(crate) fn check_grid(name: &'static str, grid: &[f64], allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty(name));
    }
    if let Some(x) = grid.iter().find(|&&x| !(x > 0.0 || (allow_zero && x == 0.0)) || !x.is_finite()) {
        return Err(Error::param(name, format!("grid value {x} is not admissible")));
    }
    Ok(())
}
