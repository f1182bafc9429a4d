use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// Entry law of the matrix ensemble.
#[derive(Clone, Debug, PartialEq)]
pub enum EntryLaw {
    Rademacher,
    Gaussian,
    Discrete {
        values: Vec<f64>,
        probs: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

/// A centered entry distribution together with its moment metadata.
///
/// The sub-Gaussian moment is carried along for reporting only; it is never
/// checked against samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct DistributionSpec {
    law: EntryLaw,
    mean: f64,
    variance: f64,
    subgaussian_moment: Option<f64>,
}

impl DistributionSpec {
    pub fn rademacher() -> Self {
        Self {
            law: EntryLaw::Rademacher,
            mean: 0.0,
            variance: 1.0,
            subgaussian_moment: Some(1.0),
        }
    }

    pub fn gaussian() -> Self {
        Self {
            law: EntryLaw::Gaussian,
            mean: 0.0,
            variance: 1.0,
            subgaussian_moment: None,
        }
    }

    /// Finite-support law. Probabilities must sum to one and the law must be
    /// centered; the variance is computed, not required to be one.
    pub fn discrete(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("discrete law has no atoms"));
        }
        if values.len() != probs.len() {
            return Err(Error::Shape(format!(
                "{} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "atoms must be finite"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::param("probs", "probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::param("probs", format!("probabilities sum to {total}, not 1")));
        }
        let mean: f64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
        if mean.abs() > PROB_TOL {
            return Err(Error::param("values", format!("law has mean {mean}, must be centered")));
        }
        let variance = values.iter().zip(&probs).map(|(v, p)| p * (v - mean).powi(2)).sum();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            law: EntryLaw::Discrete {
                values,
                probs,
                cumulative,
            },
            mean,
            variance,
            subgaussian_moment: None,
        })
    }

    pub fn with_subgaussian_moment(mut self, b: f64) -> Self {
        self.subgaussian_moment = Some(b);
        self
    }

    pub fn law(&self) -> &EntryLaw {
        &self.law
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn subgaussian_moment(&self) -> Option<f64> {
        self.subgaussian_moment
    }

    pub fn name(&self) -> &'static str {
        match self.law {
            EntryLaw::Rademacher => "rademacher",
            EntryLaw::Gaussian => "gaussian",
            EntryLaw::Discrete { .. } => "discrete",
        }
    }

    /// True if the law has atoms, so exact coincidences have positive probability.
    pub fn is_discrete(&self) -> bool {
        !matches!(self.law, EntryLaw::Gaussian)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.law {
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryLaw::Gaussian => rng.sample(StandardNormal),
            EntryLaw::Discrete {
                values, cumulative, ..
            } => {
                let u: f64 = rng.random();
                let idx = cumulative.partition_point(|&c| c <= u);
                values[idx.min(values.len() - 1)]
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Rademacher {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subgaussian_moment: Option<f64>,
    },
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subgaussian_moment: Option<f64>,
    },
    Discrete {
        values: Vec<f64>,
        probs: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subgaussian_moment: Option<f64>,
    },
}

impl TryFrom<RawDistribution> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let (spec, b) = match raw {
            RawDistribution::Rademacher { subgaussian_moment } => {
                (DistributionSpec::rademacher(), subgaussian_moment)
            }
            RawDistribution::Gaussian { subgaussian_moment } => {
                (DistributionSpec::gaussian(), subgaussian_moment)
            }
            RawDistribution::Discrete {
                values,
                probs,
                subgaussian_moment,
            } => (DistributionSpec::discrete(values, probs)?, subgaussian_moment),
        };
        Ok(match b {
            Some(b) => spec.with_subgaussian_moment(b),
            None => spec,
        })
    }
}

impl From<DistributionSpec> for RawDistribution {
    fn from(spec: DistributionSpec) -> Self {
        let subgaussian_moment = spec.subgaussian_moment;
        match spec.law {
            EntryLaw::Rademacher => RawDistribution::Rademacher { subgaussian_moment },
            EntryLaw::Gaussian => RawDistribution::Gaussian { subgaussian_moment },
            EntryLaw::Discrete { values, probs, .. } => RawDistribution::Discrete {
                values,
                probs,
                subgaussian_moment,
            },
        }
    }
}
