//! Concentration of `||M X||_2` around `||M||_HS`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_grid, EstimateRecord, ProbeConfig};
use crate::arithmetic::norm2;
use crate::ensemble::{sample_column, sample_symmetric, SymmetricMatrix};
use crate::spectral::{eig_symmetric, eigenvalues};
use crate::{Error, Result};

/// The fixed matrix `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSource {
    Identity,
    /// `(A - lambda)^{-1}` for one reference Wigner matrix `A`, drawn from
    /// the stream `seed/"reference"`.
    Resolvent { lambda: f64 },
    /// Row-major rows, each of length `n`.
    Explicit { rows: Vec<Vec<f64>> },
}

/// Dense `M` with its Hilbert-Schmidt and operator norms.
struct Fixed {
    rows: Option<Vec<Vec<f64>>>,
    hs: f64,
    op: f64,
}

impl Fixed {
    fn apply_norm(&self, x: &[f64]) -> f64 {
        match &self.rows {
            None => norm2(x),
            Some(rows) => rows
                .iter()
                .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

fn build(cfg: &ProbeConfig, source: &MatrixSource) -> Result<Fixed> {
    let n = cfg.n;
    match source {
        MatrixSource::Identity => Ok(Fixed {
            rows: None,
            hs: (n as f64).sqrt(),
            op: 1.0,
        }),
        MatrixSource::Resolvent { lambda } => {
            let a = sample_symmetric(n, &cfg.ensemble, &mut cfg.root().named("reference").stream());
            let dec = eig_symmetric(&a)?;
            let threshold = dec.spectrum().resonance_threshold();
            let mut inv = Vec::with_capacity(n);
            for &l in dec.eigenvalues() {
                if (l - lambda).abs() < threshold {
                    return Err(Error::Resonant {
                        lambda: *lambda,
                        distance: (l - lambda).abs(),
                    });
                }
                inv.push(1.0 / (l - lambda));
            }
            let rows = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| dec.eigenvector(k)[i] * inv[k] * dec.eigenvector(k)[j]).sum())
                        .collect()
                })
                .collect();
            Ok(Fixed {
                rows: Some(rows),
                hs: inv.iter().map(|x| x * x).sum::<f64>().sqrt(),
                op: inv.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            })
        }
        MatrixSource::Explicit { rows } => {
            if rows.is_empty() {
                return Err(Error::Empty("matrix rows"));
            }
            if let Some(r) = rows.iter().find(|r| r.len() != n) {
                return Err(Error::Shape(format!("row of length {} for n = {n}", r.len())));
            }
            if rows.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::param("rows", "entries must be finite"));
            }
            let gram = SymmetricMatrix::from_fn(n, |i, j| rows.iter().map(|r| r[i] * r[j]).sum());
            let top = eigenvalues(&gram)?.values().last().copied().unwrap_or(0.0);
            Ok(Fixed {
                hs: rows.iter().flatten().map(|x| x * x).sum::<f64>().sqrt(),
                op: top.max(0.0).sqrt(),
                rows: Some(rows.clone()),
            })
        }
    }
}

/// Frequency of `| ||M X||_2 - ||M||_HS | > t` for each `t`, with `X` a
/// fresh random column per replica.
///
/// Each record carries the two tail shapes `exp(-t^2 / (B^4 ||M||_HS^2))`
/// and `exp(-t / (B^2 ||M||))` and their maximum, where `B` is the
/// sub-gaussian moment of the ensemble (1 if unset).
pub fn hanson_wright_tail(cfg: &ProbeConfig, source: &MatrixSource, t_grid: &[f64]) -> Result<Vec<EstimateRecord>> {
    cfg.validate()?;
    check_grid("t", t_grid, true)?;
    let fixed = build(cfg, source)?;
    let root = cfg.root();
    let devs: Vec<f64> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let x = sample_column(cfg.n, &cfg.ensemble, &mut root.child(r).stream());
            (fixed.apply_norm(&x) - fixed.hs).abs()
        })
        .collect();
    let b2 = cfg.ensemble.subgaussian_moment().unwrap_or(1.0).powi(2);
    let seed = cfg.lineage();
    t_grid
        .iter()
        .map(|&t| {
            let hits = super::count(&devs, |d| d > t);
            let quad = (-(t * t) / (b2 * b2 * fixed.hs * fixed.hs)).exp();
            let lin = (-t / (b2 * fixed.op)).exp();
            Ok(EstimateRecord::new("hw", cfg.n, hits, cfg.replicas, seed.clone())?
                .with_extra("t", t)
                .with_extra("hs", fixed.hs)
                .with_extra("op", fixed.op)
                .with_extra("shape_quadratic", quad)
                .with_extra("shape_linear", lin)
                .with_extra("shape_bound", quad.max(lin)))
        })
        .collect()
}
