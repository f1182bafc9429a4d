//! Experiment plans and per-probe parameter schemas.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::report::{LcdRow, Table};
use super::HarnessError;
use crate::arithmetic::{lcd, threshold_tau, Benchmark, LcdQuery};
use crate::ensemble::{DistributionSpec, RngHandle, ZeroedSpec};
use crate::probes::{self, IloSpec, MatrixSource, ProbeConfig, Separation};
use crate::spectral::Units;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Smallball,
    Joint,
    Gaps,
    Linstat,
    Rigidity,
    Locallaw,
    Hw,
    Ilo,
    Deloc,
    Lcd,
    Tau,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 11] = [
        ProbeKind::Smallball,
        ProbeKind::Joint,
        ProbeKind::Gaps,
        ProbeKind::Linstat,
        ProbeKind::Rigidity,
        ProbeKind::Locallaw,
        ProbeKind::Hw,
        ProbeKind::Ilo,
        ProbeKind::Deloc,
        ProbeKind::Lcd,
        ProbeKind::Tau,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::Smallball => "smallball",
            ProbeKind::Joint => "joint",
            ProbeKind::Gaps => "gaps",
            ProbeKind::Linstat => "linstat",
            ProbeKind::Rigidity => "rigidity",
            ProbeKind::Locallaw => "locallaw",
            ProbeKind::Hw => "hw",
            ProbeKind::Ilo => "ilo",
            ProbeKind::Deloc => "deloc",
            ProbeKind::Lcd => "lcd",
            ProbeKind::Tau => "tau",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProbeKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        ProbeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::UnknownProbe(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::Schema(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

fn rademacher() -> DistributionSpec {
    DistributionSpec::rademacher()
}

// Wigner-matrix probes share the ensemble, size, replica count and seed.
macro_rules! matrix_params {
    ($(#[$doc:meta])* $name:ident { $($(#[$fdoc:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            #[serde(default = "rademacher")]
            pub ensemble: DistributionSpec,
            pub n: usize,
            pub replicas: u64,
            pub seed: u64,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub bulk_kappa: Option<f64>,
            $($(#[$fdoc])* pub $field: $ty,)*
        }

        impl $name {
            pub fn config(&self) -> ProbeConfig {
                ProbeConfig {
                    ensemble: self.ensemble.clone(),
                    n: self.n,
                    replicas: self.replicas,
                    seed: self.seed,
                    bulk_kappa: self.bulk_kappa,
                }
            }
        }
    };
}

matrix_params!(SmallballParams {
    lambda: f64,
    delta: Vec<f64>,
});

matrix_params!(
    /// `delta2` defaults to `delta`.
    JointParams {
        lambda1: f64,
        lambda2: f64,
        delta: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta2: Option<Vec<f64>>,
        #[serde(default)]
        separation: Separation,
    }
);

matrix_params!(GapsParams {
    lo: f64,
    hi: f64,
    #[serde(default)]
    units: Units,
    eps: Vec<f64>,
});

matrix_params!(
    /// `separation` is in units of `sqrt(n)`.
    LinstatParams {
        a2: f64,
        d: f64,
        eps: Vec<f64>,
        #[serde(default)]
        separation: f64,
    }
);

matrix_params!(RigidityParams {
    lambda: f64,
    k_lo: usize,
    k_hi: usize,
});

matrix_params!(LocallawParams {
    e: f64,
    eta: f64,
    delta: Vec<f64>,
});

matrix_params!(HwParams {
    #[serde(default = "identity")]
    source: MatrixSource,
    t: Vec<f64>,
});

fn identity() -> MatrixSource {
    MatrixSource::Identity
}

matrix_params!(DelocParams {
    tau: f64,
    frac: f64,
});

/// `replicas` is the number of sampled `H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IloParams {
    #[serde(default = "rademacher")]
    pub ensemble: DistributionSpec,
    pub n: usize,
    pub replicas: u64,
    pub seed: u64,
    pub d: usize,
    pub k: usize,
    pub c0: f64,
    pub nu: f64,
    #[serde(default)]
    pub xs: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcdParams {
    pub vectors: Vec<Vec<f64>>,
    pub query: LcdQuery,
}

/// `replicas` is the number of sampled zeroed-out matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauParams {
    #[serde(default = "rademacher")]
    pub ensemble: DistributionSpec,
    pub n: usize,
    pub replicas: u64,
    pub seed: u64,
    pub d: usize,
    pub nu: f64,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub benchmark: Benchmark,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProbeParams {
    Smallball(SmallballParams),
    Joint(JointParams),
    Gaps(GapsParams),
    Linstat(LinstatParams),
    Rigidity(RigidityParams),
    Locallaw(LocallawParams),
    Hw(HwParams),
    Ilo(IloParams),
    Deloc(DelocParams),
    Lcd(LcdParams),
    Tau(TauParams),
}

impl ProbeParams {
    /// Checks `table` against the schema of `kind`.
    pub fn parse(kind: ProbeKind, table: toml::Table) -> Result<Self, HarnessError> {
        fn typed<T: serde::de::DeserializeOwned>(kind: ProbeKind, table: toml::Table) -> Result<T, HarnessError> {
            toml::Value::Table(table)
                .try_into()
                .map_err(|e| HarnessError::Schema(format!("{kind} params: {}", e.message())))
        }
        Ok(match kind {
            ProbeKind::Smallball => ProbeParams::Smallball(typed(kind, table)?),
            ProbeKind::Joint => ProbeParams::Joint(typed(kind, table)?),
            ProbeKind::Gaps => ProbeParams::Gaps(typed(kind, table)?),
            ProbeKind::Linstat => ProbeParams::Linstat(typed(kind, table)?),
            ProbeKind::Rigidity => ProbeParams::Rigidity(typed(kind, table)?),
            ProbeKind::Locallaw => ProbeParams::Locallaw(typed(kind, table)?),
            ProbeKind::Hw => ProbeParams::Hw(typed(kind, table)?),
            ProbeKind::Ilo => ProbeParams::Ilo(typed(kind, table)?),
            ProbeKind::Deloc => ProbeParams::Deloc(typed(kind, table)?),
            ProbeKind::Lcd => ProbeParams::Lcd(typed(kind, table)?),
            ProbeKind::Tau => ProbeParams::Tau(typed(kind, table)?),
        })
    }

    pub fn kind(&self) -> ProbeKind {
        match self {
            ProbeParams::Smallball(_) => ProbeKind::Smallball,
            ProbeParams::Joint(_) => ProbeKind::Joint,
            ProbeParams::Gaps(_) => ProbeKind::Gaps,
            ProbeParams::Linstat(_) => ProbeKind::Linstat,
            ProbeParams::Rigidity(_) => ProbeKind::Rigidity,
            ProbeParams::Locallaw(_) => ProbeKind::Locallaw,
            ProbeParams::Hw(_) => ProbeKind::Hw,
            ProbeParams::Ilo(_) => ProbeKind::Ilo,
            ProbeParams::Deloc(_) => ProbeKind::Deloc,
            ProbeParams::Lcd(_) => ProbeKind::Lcd,
            ProbeParams::Tau(_) => ProbeKind::Tau,
        }
    }

    /// Root of the seed lineage, if the probe is random.
    pub fn seed(&self) -> Option<u64> {
        match self {
            ProbeParams::Smallball(p) => Some(p.seed),
            ProbeParams::Joint(p) => Some(p.seed),
            ProbeParams::Gaps(p) => Some(p.seed),
            ProbeParams::Linstat(p) => Some(p.seed),
            ProbeParams::Rigidity(p) => Some(p.seed),
            ProbeParams::Locallaw(p) => Some(p.seed),
            ProbeParams::Hw(p) => Some(p.seed),
            ProbeParams::Ilo(p) => Some(p.seed),
            ProbeParams::Deloc(p) => Some(p.seed),
            ProbeParams::Lcd(_) => None,
            ProbeParams::Tau(p) => Some(p.seed),
        }
    }

    /// Runs the probe on the current rayon pool.
    pub fn run(&self) -> Result<Table> {
        Ok(match self {
            ProbeParams::Smallball(p) => Table::Estimates(probes::smallball_one_grid(&p.config(), p.lambda, &p.delta)?),
            ProbeParams::Joint(p) => {
                let d2 = p.delta2.as_ref().unwrap_or(&p.delta);
                if d2.len() != p.delta.len() {
                    return Err(Error::Shape(format!(
                        "delta has {} entries, delta2 has {}",
                        p.delta.len(),
                        d2.len()
                    )));
                }
                let pairs: Vec<(f64, f64)> = p.delta.iter().copied().zip(d2.iter().copied()).collect();
                let est = probes::smallball_joint_grid(&p.config(), p.lambda1, p.lambda2, &pairs, p.separation)?;
                Table::Estimates(
                    est.into_iter()
                        .map(|e| {
                            let mut j = e.joint;
                            for (key, m) in [("1", &e.first), ("2", &e.second)] {
                                j.extra.insert(format!("successes{key}"), m.successes.into());
                                j.extra.insert(format!("lo{key}"), m.lo.into());
                                j.extra.insert(format!("hi{key}"), m.hi.into());
                            }
                            j
                        })
                        .collect(),
                )
            }
            ProbeParams::Gaps(p) => {
                let law = probes::gap_law(&p.config(), p.lo, p.hi, p.units, &p.eps)?;
                let mut rows = law.records;
                rows.push(law.distinctness);
                Table::Estimates(rows)
            }
            ProbeParams::Linstat(p) => {
                Table::Estimates(probes::linear_statistic(&p.config(), p.a2, p.d, &p.eps, p.separation)?)
            }
            ProbeParams::Rigidity(p) => Table::Profile(probes::rigidity_profile(&p.config(), p.lambda, p.k_lo, p.k_hi)?),
            ProbeParams::Locallaw(p) => Table::Estimates(probes::local_law_deviation(&p.config(), p.e, p.eta, &p.delta)?),
            ProbeParams::Hw(p) => Table::Estimates(probes::hanson_wright_tail(&p.config(), &p.source, &p.t)?),
            ProbeParams::Deloc(p) => Table::Estimates(vec![probes::delocalization_frequency(&p.config(), p.tau, p.frac)?]),
            ProbeParams::Ilo(p) => {
                let spec = IloSpec {
                    n: p.n,
                    d: p.d,
                    k: p.k,
                    c0: p.c0,
                    nu: p.nu,
                    ensemble: p.ensemble.clone(),
                };
                Table::Estimates(vec![probes::ilo_event_frequency(&spec, &p.xs, p.replicas, &RngHandle::new(p.seed))?])
            }
            ProbeParams::Lcd(p) => {
                p.query.validate()?;
                Table::Lcd(
                    p.vectors
                        .iter()
                        .enumerate()
                        .map(|(index, v)| {
                            let r = lcd(v, &p.query)?;
                            Ok(LcdRow {
                                index,
                                value: r.value,
                                satisfied: r.satisfied,
                                resolution: r.resolution,
                                witness: r.witness,
                            })
                        })
                        .collect::<Result<_>>()?,
                )
            }
            ProbeParams::Tau(p) => {
                let spec = ZeroedSpec::new(p.n, p.d, p.nu, p.ensemble.clone())?;
                let root = RngHandle::new(p.seed);
                let est = threshold_tau(&p.v, &p.w, p.benchmark, &spec, p.replicas, &root)?;
                let seed = format!("{root}/[0..{})", p.replicas);
                Table::Estimates(
                    est.curve
                        .iter()
                        .map(|c| {
                            let mut rec = probes::EstimateRecord::new("tau", p.n, c.successes, c.trials, seed.clone())?;
                            for (k, v) in [("t", c.t), ("benchmark", c.benchmark), ("tau", est.tau)] {
                                rec.extra.insert(k.to_string(), v.into());
                            }
                            Ok(rec)
                        })
                        .collect::<Result<_>>()?,
                )
            }
        })
    }
}

/// A validated experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentPlan {
    pub probe: ProbeKind,
    pub params: ProbeParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Format,
    /// worker threads; `None` uses the machine's parallelism
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// Plan file as written.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    probe: Option<String>,
    output: Option<PathBuf>,
    format: Option<Format>,
    workers: Option<usize>,
    #[serde(default)]
    params: toml::Table,
}

/// Values that take precedence over the plan file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub probe: Option<ProbeKind>,
    pub n: Option<usize>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        Self::from_toml_with(text, &Overrides::default())
    }

    /// Parses a plan file and applies `overrides`. Overridden `n`,
    /// `replicas` and `seed` are checked against the probe schema like
    /// any other parameter.
    pub fn from_toml_with(text: &str, overrides: &Overrides) -> Result<Self, HarnessError> {
        let raw: RawPlan = toml::from_str(text).map_err(|e| HarnessError::Schema(e.message().to_string()))?;
        let file_probe = raw.probe.as_deref().map(ProbeKind::from_str).transpose()?;
        let probe = match (file_probe, overrides.probe) {
            (Some(a), Some(b)) if a != b => {
                return Err(HarnessError::Schema(format!("plan is for `{a}`, not `{b}`")));
            }
            (a, b) => b.or(a).ok_or_else(|| HarnessError::Schema("missing field `probe`".into()))?,
        };
        let mut table = raw.params;
        if let Some(n) = overrides.n {
            table.insert("n".into(), toml::Value::Integer(to_i64(n as u64)?));
        }
        if let Some(r) = overrides.replicas {
            table.insert("replicas".into(), toml::Value::Integer(to_i64(r)?));
        }
        if let Some(s) = overrides.seed {
            table.insert("seed".into(), toml::Value::Integer(to_i64(s)?));
        }
        let workers = overrides.workers.or(raw.workers);
        if workers == Some(0) {
            return Err(HarnessError::Schema("workers must be positive".into()));
        }
        Ok(ExperimentPlan {
            probe,
            params: ProbeParams::parse(probe, table)?,
            output: overrides.output.clone().or(raw.output),
            format: overrides.format.or(raw.format).unwrap_or_default(),
            workers,
        })
    }
}

fn to_i64(x: u64) -> Result<i64, HarnessError> {
    i64::try_from(x).map_err(|_| HarnessError::Schema(format!("{x} does not fit the plan format")))
}
