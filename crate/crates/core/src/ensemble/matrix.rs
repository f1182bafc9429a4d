use crate::{Error, Result};

/// Dense symmetric matrix stored as its packed lower triangle.
///
/// Entry `(i, j)` and `(j, i)` share one slot, so symmetry holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
fn slot(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the lower triangle `i >= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        Self { n, packed }
    }

    /// From a row-major dense matrix; fails unless it is exactly symmetric.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries, got {}", n * n, dense.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if dense[i * n + j] != dense[j * n + i] {
                    return Err(Error::param("matrix", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| dense[i * n + j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[slot(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.packed[slot(i, j)] = value;
    }

    /// Row `i` restricted to columns `0..=i`.
    pub(crate) fn lower_row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.packed[start..start + i + 1]
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }

    pub(crate) fn first_non_finite(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .find(|&(i, j)| !self.get(i, j).is_finite())
    }

    /// Number of stored entries that are nonzero, counted over the full matrix.
    pub fn count_nonzero(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in 0..=i {
                if self.get(i, j) != 0.0 {
                    count += if i == j { 1 } else { 2 };
                }
            }
        }
        count
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must match matrix order");
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = self.lower_row(i);
            let mut acc = row[i] * x[i];
            for (j, &a) in row[..i].iter().enumerate() {
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc;
        }
        y
    }
}
