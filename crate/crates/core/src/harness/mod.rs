//! Experiment orchestration: plan files, deterministic parallel runs,
//! report files and plot data.
//!
//! A plan is a TOML file:
//!
//! ```toml
//! probe = "smallball"
//! output = "smallball.csv"   # optional
//! format = "csv"             # csv | json, default csv
//! workers = 4                # optional
//!
//! [params]
//! ensemble = { kind = "rademacher" }
//! n = 200
//! replicas = 20000
//! seed = 7
//! lambda = 7.0710678
//! delta = [0.02, 0.05, 0.1]
//! ```
//!
//! Unknown keys are rejected at every level.

mod plan;
mod plot;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

pub use plan::{
    DelocParams, ExperimentPlan, Format, GapsParams, HwParams, IloParams, JointParams, LcdParams, LinstatParams,
    LocallawParams, Overrides, ProbeKind, ProbeParams, RigidityParams, SmallballParams, TauParams,
};
pub use plot::{emit_plot_data, PlotKind};
pub use report::{data_section, LcdRow, Metadata, Report, Table, ESTIMATE_COLUMNS};

pub use crate::stats::{fit_loglog_slope, wilson_interval, SlopeFit};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown probe `{0}`")]
    UnknownProbe(String),

    #[error("invalid plan: {0}")]
    Schema(String),

    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },

    #[error("cannot emit plot data: {0}")]
    Plot(String),

    #[error(transparent)]
    Probe(#[from] crate::Error),
}

impl HarnessError {
    /// Short stable identifier of the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            HarnessError::UnknownProbe(_) => "unknown-probe",
            HarnessError::Schema(_) => "schema",
            HarnessError::Input { .. } => "input",
            HarnessError::Output { .. } => "output",
            HarnessError::Plot(_) => "plot",
            HarnessError::Probe(e) if e.is_numeric() => "numeric",
            HarnessError::Probe(_) => "parameter",
        }
    }

    /// 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Probe(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn read_plan(path: &Path, overrides: &Overrides) -> Result<ExperimentPlan, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentPlan::from_toml_with(&text, overrides)
}

/// Runs the plan on a dedicated pool of `plan.workers` threads.
pub fn execute(plan: &ExperimentPlan) -> Result<Report, HarnessError> {
    let workers = plan.workers.unwrap_or_else(default_workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Schema(format!("cannot start {workers} workers: {e}")))?;
    let data = pool.install(|| plan.params.run())?;
    Ok(Report {
        metadata: Metadata::new(plan, workers),
        data,
    })
}

/// Executes the plan and writes the report to `plan.output`.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PathBuf, HarnessError> {
    let path = plan
        .output
        .clone()
        .ok_or_else(|| HarnessError::Schema("missing field `output`".into()))?;
    let text = execute(plan)?.render(plan.format)?;
    fs::write(&path, text).map_err(|source| HarnessError::Output {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
