//! Rank event of the rectangular matrix behind the inverse Littlewood-Offord
//! step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EstimateRecord;
use crate::ensemble::{sample_sparse_difference, DistributionSpec, RngHandle, SymmetricMatrix};
use crate::spectral::eigenvalues;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IloSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub c0: f64,
    pub nu: f64,
    pub ensemble: DistributionSpec,
}

impl IloSpec {
    pub fn validate(&self) -> Result<()> {
        let (n, d, k) = (self.n, self.d, self.k);
        if d == 0 || 3 * d > n {
            return Err(Error::Shape(format!("need 1 <= d and 3d <= n, got d = {d}, n = {n}")));
        }
        if !(1 <= k && k <= 2 * d) {
            return Err(Error::Shape(format!("k = {k} is outside [1, {}]", 2 * d)));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::param("c0", format!("{} must be positive", self.c0)));
        }
        if d as f64 > self.c0 * self.c0 * n as f64 {
            return Err(Error::Shape(format!("d = {d} exceeds c0^2 n = {}", self.c0 * self.c0 * n as f64)));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::param("nu", format!("{} is not in [0, 1]", self.nu)));
        }
        Ok(())
    }
}

/// Whether one sampled `H = [H1 H2]` satisfies the event.
fn event(spec: &IloSpec, xs: &[Vec<f64>], rng: &RngHandle) -> Result<bool> {
    let (n, d) = (spec.n, spec.d);
    let rows = n - d;
    let cols = 2 * d;
    let mut stream = rng.stream();
    // row-major draws
    let h: Vec<f64> = (0..rows * cols)
        .map(|_| sample_sparse_difference(&spec.ensemble, spec.nu, &mut stream))
        .collect();
    let bound = n as f64;
    for x in xs {
        for half in [0, d] {
            let norm_sq: f64 = (0..rows)
                .map(|r| (0..d).map(|j| h[r * cols + half + j] * x[j]).sum::<f64>().powi(2))
                .sum();
            if norm_sq.sqrt() > bound {
                return Ok(false);
            }
        }
    }
    let gram = SymmetricMatrix::from_fn(cols, |i, j| (0..rows).map(|r| h[r * cols + i] * h[r * cols + j]).sum());
    // sigma_{2d-k+1} is the k-th smallest singular value
    let sigma = eigenvalues(&gram)?.values()[spec.k - 1].max(0.0).sqrt();
    Ok(sigma <= spec.c0 / 16.0 * bound.sqrt())
}

/// Frequency of `sigma_{2d-k+1}(H) <= c0 sqrt(n) / 16` together with
/// `||H1 X_i||, ||H2 X_i|| <= n` for every given `X_i`. `H` is
/// `(n - d) x 2d` with i.i.d. `(zeta - zeta') Z_nu` entries; trial `i` uses
/// the stream `rng.child(i)`.
pub fn ilo_event_frequency(spec: &IloSpec, xs: &[Vec<f64>], trials: u64, rng: &RngHandle) -> Result<EstimateRecord> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    if let Some(x) = xs.iter().find(|x| x.len() != spec.d) {
        return Err(Error::Shape(format!("X of length {} for d = {}", x.len(), spec.d)));
    }
    let out: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| event(spec, xs, &rng.child(i)))
        .collect();
    let mut hits = 0;
    for r in out {
        hits += r? as u64;
    }
    Ok(
        EstimateRecord::new("ilo", spec.n, hits, trials, format!("{rng}/[0..{trials})"))?
            .with_extra("d", spec.d)
            .with_extra("k", spec.k)
            .with_extra("c0", spec.c0)
            .with_extra("nu", spec.nu),
    )
}
