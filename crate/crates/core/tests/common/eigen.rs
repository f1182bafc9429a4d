//! Residual and orthonormality sweep of the eigensolver.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use rmtlab::ensemble::{sample_symmetric, DistributionSpec, RngHandle, SymmetricMatrix};
use rmtlab::spectral::eig_symmetric;

#[derive(Debug, Default)]
pub struct SweepReport {
    pub matrices: usize,
    pub clustered: usize,
    pub worst_residual: f64,
    pub worst_orthonormality: f64,
}

/// `Q D Q^T` with `Q` the orthogonal factor of a Gaussian matrix.
fn rotated(diag: &[f64], rng: &mut impl Rng) -> SymmetricMatrix {
    let n = diag.len();
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let a = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)) * q.transpose();
    // average the two triangles so the input is exactly symmetric
    SymmetricMatrix::from_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Clusters of eigenvalues split by multiples of `1e-12`.
fn clustered_diag(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let clusters = 1 + rng.random_range(0..n.min(4));
    let centers: Vec<f64> = (0..clusters).map(|_| rng.random_range(-5.0..5.0)).collect();
    (0..n)
        .map(|i| centers[i % clusters] + (i / clusters) as f64 * 1e-12)
        .collect()
}

/// Runs `count` matrices with `n` cycling through `2..=128`; every third one
/// has a clustered spectrum. Returns the worst observed defects.
pub fn sweep(count: usize, seed: u64) -> SweepReport {
    let root = RngHandle::new(seed);
    let mut report = SweepReport::default();
    for i in 0..count {
        let n = 2 + (i * 37) % 127;
        let mut rng = root.child(i as u64).stream();
        let a = match i % 3 {
            0 => {
                report.clustered += 1;
                let d = clustered_diag(n, &mut rng);
                rotated(&d, &mut rng)
            }
            1 => sample_symmetric(n, &DistributionSpec::gaussian(), &mut rng),
            _ => sample_symmetric(n, &DistributionSpec::rademacher(), &mut rng),
        };
        let dec = eig_symmetric(&a).expect("eigensolver failed");
        report.worst_residual = report.worst_residual.max(dec.max_residual(&a));
        report.worst_orthonormality = report.worst_orthonormality.max(dec.orthonormality_defect());
        report.matrices += 1;
    }
    report
}
