//! Report tables and their CSV / JSON renderings.
//!
//! A rendered report is a metadata part followed by a data part. In CSV the
//! metadata lines start with `#`; in JSON they live under `"metadata"` and
//! the rows under `"data"`. The data part is a pure function of the plan
//! parameters, so reruns reproduce it byte for byte.

use serde::Serialize;
use serde_json::{json, Value};

use super::plan::{ExperimentPlan, Format};
use super::HarnessError;
use crate::probes::{EstimateRecord, RigidityProfile};

/// Column order of estimate tables.
pub const ESTIMATE_COLUMNS: [&str; 14] = [
    "probe", "n", "lambda1", "lambda2", "delta1", "delta2", "eps", "successes", "trials", "phat", "lo", "hi", "seed",
    "extra",
];

const PROFILE_COLUMNS: [&str; 9] = ["n", "lambda", "k", "mean", "p5", "p95", "resonant", "trials", "seed"];

const LCD_COLUMNS: [&str; 5] = ["index", "value", "satisfied", "resolution", "witness"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LcdRow {
    pub index: usize,
    pub value: f64,
    pub satisfied: bool,
    pub resolution: f64,
    pub witness: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Table {
    Estimates(Vec<EstimateRecord>),
    Profile(RigidityProfile),
    Lcd(Vec<LcdRow>),
}

impl Table {
    pub fn estimates(&self) -> Option<&[EstimateRecord]> {
        match self {
            Table::Estimates(r) => Some(r),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Table::Estimates(r) => r.len(),
            Table::Profile(p) => p.rows.len(),
            Table::Lcd(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub artifact: String,
    pub version: String,
    pub probe: String,
    pub plan: Value,
    /// root of the seed lineage
    pub seed: Option<u64>,
    pub workers: usize,
}

impl Metadata {
    pub fn new(plan: &ExperimentPlan, workers: usize) -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            probe: plan.probe.to_string(),
            plan: serde_json::to_value(&plan.params).unwrap_or(Value::Null),
            seed: plan.params.seed(),
            workers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub data: Table,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Schema(format!("csv encoding failed: {e}"))
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, HarnessError> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => {
                let text = serde_json::to_string_pretty(self).map_err(|e| HarnessError::Schema(e.to_string()))?;
                Ok(text + "\n")
            }
        }
    }

    fn render_csv(&self) -> Result<String, HarnessError> {
        let m = &self.metadata;
        let mut out = format!("# {} {}\n# probe: {}\n# plan: {}\n", m.artifact, m.version, m.probe, m.plan);
        if let Some(s) = m.seed {
            out.push_str(&format!("# seed: {s}\n"));
        }
        out.push_str(&format!("# workers: {}\n", m.workers));
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.data {
            Table::Estimates(rows) => {
                w.write_record(ESTIMATE_COLUMNS).map_err(csv_err)?;
                for r in rows {
                    w.write_record([
                        r.probe.clone(),
                        r.n.to_string(),
                        opt(r.lambda1),
                        opt(r.lambda2),
                        opt(r.delta1),
                        opt(r.delta2),
                        opt(r.eps),
                        r.successes.to_string(),
                        r.trials.to_string(),
                        r.p_hat.to_string(),
                        r.lo.to_string(),
                        r.hi.to_string(),
                        r.seed.clone(),
                        serde_json::to_string(&r.extra).map_err(csv_err)?,
                    ])
                    .map_err(csv_err)?;
                }
            }
            Table::Profile(p) => {
                w.write_record(PROFILE_COLUMNS).map_err(csv_err)?;
                for r in &p.rows {
                    w.write_record([
                        p.n.to_string(),
                        p.lambda.to_string(),
                        r.k.to_string(),
                        r.mean.to_string(),
                        r.p5.to_string(),
                        r.p95.to_string(),
                        p.resonant.to_string(),
                        p.trials.to_string(),
                        p.seed.clone(),
                    ])
                    .map_err(csv_err)?;
                }
            }
            Table::Lcd(rows) => {
                w.write_record(LCD_COLUMNS).map_err(csv_err)?;
                for r in rows {
                    w.write_record([
                        r.index.to_string(),
                        r.value.to_string(),
                        r.satisfied.to_string(),
                        r.resolution.to_string(),
                        serde_json::to_string(&r.witness).map_err(csv_err)?,
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
        let body = w.into_inner().map_err(csv_err)?;
        out.push_str(&String::from_utf8(body).map_err(csv_err)?);
        Ok(out)
    }
}

/// The data part of a rendered report.
pub fn data_section(text: &str, format: Format) -> Result<String, HarnessError> {
    match format {
        Format::Csv => Ok(text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect()),
        Format::Json => {
            let v: Value = serde_json::from_str(text).map_err(|e| HarnessError::Schema(e.to_string()))?;
            let data = v.get("data").cloned().unwrap_or(json!(null));
            serde_json::to_string_pretty(&data).map_err(|e| HarnessError::Schema(e.to_string()))
        }
    }
}
