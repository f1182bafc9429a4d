//! `(x, y, lo, hi)` tables for external plotting.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::report::Table;
use super::HarnessError;
use crate::stats::{fit_loglog_slope, SlopeFit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// estimates against their grid variable, plus a log-log fit row
    Scaling,
    /// per-rank summary of a rigidity profile
    Profile,
    /// estimates against their grid variable
    Curve,
}

impl FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "scaling" => Ok(PlotKind::Scaling),
            "profile" => Ok(PlotKind::Profile),
            "curve" => Ok(PlotKind::Curve),
            _ => Err(HarnessError::Schema(format!("unknown plot kind `{s}`"))),
        }
    }
}

type Point = (f64, f64, f64, f64);

fn points(table: &Table, kind: PlotKind) -> Result<Vec<Point>, HarnessError> {
    fn bad<T>(m: &str) -> Result<T, HarnessError> {
        Err(HarnessError::Plot(m.to_string()))
    }
    if table.is_empty() {
        return bad("no records");
    }
    match (table, kind) {
        (Table::Profile(p), PlotKind::Profile) => Ok(p.rows.iter().map(|r| (r.k as f64, r.mean, r.p5, r.p95)).collect()),
        (Table::Estimates(recs), PlotKind::Scaling | PlotKind::Curve) => {
            let probe = &recs[0].probe;
            if recs.iter().any(|r| &r.probe != probe) {
                return bad("records come from different probes");
            }
            recs.iter()
                .map(|r| match r.x() {
                    Some(x) => Ok((x, r.p_hat, r.lo, r.hi)),
                    None => bad("a record has no grid variable"),
                })
                .collect()
        }
        _ => bad("table does not match the plot kind"),
    }
}

/// Writes a `kind,x,y,lo,hi` table. For [`PlotKind::Scaling`] a final row
/// `fit,slope,intercept,stderr,r2` holds the log-log fit, which is also
/// returned.
pub fn emit_plot_data<W: Write>(table: &Table, kind: PlotKind, mut out: W) -> Result<Option<SlopeFit>, HarnessError> {
    let pts = points(table, kind)?;
    let fit = match kind {
        PlotKind::Scaling => Some(fit_loglog_slope(
            &pts.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>(),
            true,
        )?),
        _ => None,
    };
    let io = |source| HarnessError::Output {
        path: "<plot data>".into(),
        source,
    };
    let mut text = String::from("kind,x,y,lo,hi\n");
    for (x, y, lo, hi) in &pts {
        text.push_str(&format!("data,{x},{y},{lo},{hi}\n"));
    }
    if let Some(f) = &fit {
        text.push_str(&format!("fit,{},{},{},{}\n", f.slope, f.intercept, f.stderr, f.r2));
    }
    out.write_all(text.as_bytes()).map_err(io)?;
    Ok(fit)
}
