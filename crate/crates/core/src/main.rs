use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rmtlab::harness::{
    emit_plot_data, execute, read_plan, ExperimentPlan, Format, HarnessError, Overrides, PlotKind, ProbeKind, Table,
};

/// Monte Carlo experiments on Wigner matrices.
#[derive(Parser)]
#[command(name = "rmtlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// one-point small-ball probability of the least singular value
    Smallball(RunArgs),
    /// two-point small-ball probability and decoupling ratio
    Joint(RunArgs),
    /// minimal gap of singular values in an interval
    Gaps(RunArgs),
    /// linear statistics of distant eigenvalue pairs
    Linstat(RunArgs),
    /// rigidity profile of resolvent singular values
    Rigidity(RunArgs),
    /// deviation of windowed eigenvalue counts from the semicircle
    Locallaw(RunArgs),
    /// tails of ||M X|| around ||M||_HS
    Hw(RunArgs),
    /// rank event of the rectangular sparse-difference matrix
    Ilo(RunArgs),
    /// eigenvector delocalization frequency
    Deloc(RunArgs),
    /// essential LCD of given unit vectors
    Lcd(RunArgs),
    /// threshold function of a vector pair
    Tau(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotArg {
    Scaling,
    Profile,
    Curve,
}

#[derive(Args)]
struct RunArgs {
    /// plan file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// report path; stdout when absent here and in the plan
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, env = "RMTLAB_WORKERS")]
    workers: Option<usize>,
    /// also write (x, y, lo, hi) plot data to this path
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "curve")]
    plot_kind: PlotArg,
}

impl Command {
    fn split(self) -> (ProbeKind, RunArgs) {
        match self {
            Command::Smallball(a) => (ProbeKind::Smallball, a),
            Command::Joint(a) => (ProbeKind::Joint, a),
            Command::Gaps(a) => (ProbeKind::Gaps, a),
            Command::Linstat(a) => (ProbeKind::Linstat, a),
            Command::Rigidity(a) => (ProbeKind::Rigidity, a),
            Command::Locallaw(a) => (ProbeKind::Locallaw, a),
            Command::Hw(a) => (ProbeKind::Hw, a),
            Command::Ilo(a) => (ProbeKind::Ilo, a),
            Command::Deloc(a) => (ProbeKind::Deloc, a),
            Command::Lcd(a) => (ProbeKind::Lcd, a),
            Command::Tau(a) => (ProbeKind::Tau, a),
        }
    }
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|source| HarnessError::Output {
        path: path.clone(),
        source,
    })
}

fn run(kind: ProbeKind, args: RunArgs) -> Result<(), HarnessError> {
    let overrides = Overrides {
        probe: Some(kind),
        n: args.n,
        replicas: args.replicas,
        seed: args.seed,
        output: args.out,
        format: args.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        workers: args.workers,
    };
    let plan = match &args.config {
        Some(path) => read_plan(path, &overrides)?,
        None => ExperimentPlan::from_toml_with("", &overrides)?,
    };
    let report = execute(&plan)?;
    let text = report.render(plan.format)?;
    match &plan.output {
        Some(path) => write_file(path, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| HarnessError::Output {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    if let Some(path) = &args.plot {
        let kind = match args.plot_kind {
            PlotArg::Scaling => PlotKind::Scaling,
            PlotArg::Profile => PlotKind::Profile,
            PlotArg::Curve => PlotKind::Curve,
        };
        // auxiliary records (the gap distinctness check) trail the grid
        let data = match &report.data {
            Table::Estimates(recs) => Table::Estimates(
                recs.iter()
                    .filter(|r| r.probe == recs[0].probe)
                    .cloned()
                    .collect(),
            ),
            other => other.clone(),
        };
        let mut buf = Vec::new();
        emit_plot_data(&data, kind, &mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rmtlab: error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
