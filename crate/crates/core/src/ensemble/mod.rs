//! Random sources: entry laws, Wigner matrices, columns, random index
//! subsets, the zeroed-out matrix and box-pair integer vectors.
//!
//! Every sampler is a pure function of its spec and the generator it is
//! handed. Draw order is fixed and documented per sampler so that a seed
//! pins the output bit for bit.

mod boxes;
mod distribution;
mod matrix;
mod rng;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use boxes::{BoxPairSpec, CoordinateSet};
pub use distribution::{DistributionSpec, EntryLaw};
pub use matrix::SymmetricMatrix;
pub use rng::{RngHandle, StreamRng};

use crate::{Error, Result};

pub fn sample_entry<R: Rng + ?Sized>(spec: &DistributionSpec, rng: &mut R) -> f64 {
    spec.sample(rng)
}

/// Wigner matrix with i.i.d. upper-triangle entries.
///
/// Consumes exactly `n(n+1)/2` entry draws, row by row over `j >= i`.
pub fn sample_symmetric<R: Rng + ?Sized>(
    n: usize,
    spec: &DistributionSpec,
    rng: &mut R,
) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, spec.sample(rng));
        }
    }
    m
}

pub fn sample_column<R: Rng + ?Sized>(n: usize, spec: &DistributionSpec, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| spec.sample(rng)).collect()
}

/// Each index of `0..n` is kept independently with probability `mu`.
pub fn sample_mu_subset<R: Rng + ?Sized>(n: usize, mu: f64, rng: &mut R) -> Result<Vec<usize>> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::param("mu", format!("{mu} is not in (0, 1)")));
    }
    Ok((0..n).filter(|_| rng.random::<f64>() < mu).collect())
}

/// One draw of `(zeta - zeta') * Z_nu`: two entry draws, then one uniform
/// for the Bernoulli mask.
#[inline]
pub fn sample_sparse_difference<R: Rng + ?Sized>(
    spec: &DistributionSpec,
    nu: f64,
    rng: &mut R,
) -> f64 {
    let a = spec.sample(rng);
    let b = spec.sample(rng);
    let keep = rng.random::<f64>() < nu;
    if keep {
        a - b
    } else {
        0.0
    }
}

/// Parameters of the zeroed-out matrix: a symmetric matrix whose only
/// nonzero block is an `(n - d) x d` matrix `H1` (and its transpose) with
/// i.i.d. `(zeta - zeta') Z_nu` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawZeroed", into = "RawZeroed")]
pub struct ZeroedSpec {
    n: usize,
    d: usize,
    nu: f64,
    base: DistributionSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZeroed {
    n: usize,
    d: usize,
    nu: f64,
    base: DistributionSpec,
}

impl TryFrom<RawZeroed> for ZeroedSpec {
    type Error = Error;
    fn try_from(r: RawZeroed) -> Result<Self> {
        ZeroedSpec::new(r.n, r.d, r.nu, r.base)
    }
}

impl From<ZeroedSpec> for RawZeroed {
    fn from(z: ZeroedSpec) -> Self {
        RawZeroed {
            n: z.n,
            d: z.d,
            nu: z.nu,
            base: z.base,
        }
    }
}

impl ZeroedSpec {
    pub fn new(n: usize, d: usize, nu: f64, base: DistributionSpec) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("d", "must be positive"));
        }
        if 3 * d > n {
            return Err(Error::param("d", format!("3d = {} exceeds n = {n}", 3 * d)));
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::param("nu", format!("{nu} is not in (0, 1)")));
        }
        Ok(Self { n, d, nu, base })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn base(&self) -> &DistributionSpec {
        &self.base
    }
}

/// Samples `M_n`. `H1` occupies rows `d..n`, columns `0..d` and is drawn row
/// by row; everything else except its mirror image is zero.
pub fn sample_zeroed_matrix<R: Rng + ?Sized>(spec: &ZeroedSpec, rng: &mut R) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(spec.n);
    for row in spec.d..spec.n {
        for col in 0..spec.d {
            m.set(row, col, sample_sparse_difference(&spec.base, spec.nu, rng));
        }
    }
    m
}

/// Uniform draw from a box pair: all coordinates of `X` first, then all of `Y`.
pub fn sample_box_vector_pair<R: Rng + ?Sized>(
    spec: &BoxPairSpec,
    rng: &mut R,
) -> (Vec<i64>, Vec<i64>) {
    let (b1, b2) = spec.coordinate_sets();
    let draw = |sets: &[CoordinateSet], rng: &mut R| -> Vec<i64> {
        sets.iter()
            .map(|s| s.nth(rng.random_range(0..s.len())))
            .collect()
    };
    let x = draw(&b1, rng);
    let y = draw(&b2, rng);
    (x, y)
}
