//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration.
//!
//! The reduction works on the packed lower triangle, annihilating one row at
//! a time from the bottom (as in EISPACK `tred2`), so that the reflector and
//! the rows touched by the symmetric rank-two update are contiguous.
//! Eigenvectors are accumulated row-wise: row `k` of the working array is the
//! eigenvector of the `k`-th eigenvalue.

use crate::ensemble::SymmetricMatrix;
use crate::{Error, Result};

use super::Spectrum;

const MAX_QL_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    spectrum: Spectrum,
    // row-major; row k is the unit eigenvector for eigenvalue k
    vectors: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.values()
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        let n = self.n();
        &self.vectors[k * n..(k + 1) * n]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n().max(1))
    }

    /// `V diag(lambda) V^T` as a row-major dense matrix.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for (k, &lam) in self.eigenvalues().iter().enumerate() {
            let v = self.eigenvector(k);
            for i in 0..n {
                let s = lam * v[i];
                for (o, &vj) in out[i * n..(i + 1) * n].iter_mut().zip(v) {
                    *o += s * vj;
                }
            }
        }
        out
    }

    /// `max_k ||A v_k - lambda_k v_k||_2`
    pub fn max_residual(&self, a: &SymmetricMatrix) -> f64 {
        (0..self.n())
            .map(|k| {
                let v = self.eigenvector(k);
                let av = a.mul_vec(v);
                let lam = self.eigenvalues()[k];
                av.iter()
                    .zip(v)
                    .map(|(x, y)| (x - lam * y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^T V - I|`
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..=i {
                let dot: f64 = self
                    .eigenvector(i)
                    .iter()
                    .zip(self.eigenvector(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn check_finite(a: &SymmetricMatrix) -> Result<()> {
    match a.first_non_finite() {
        Some((row, col)) => Err(Error::NonFinite { row, col }),
        None => Ok(()),
    }
}

/// Working copy of the lower triangle as full rows `a[i*n .. i*n + i + 1]`.
fn lower_rows(a: &SymmetricMatrix) -> Vec<f64> {
    let n = a.n();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        w[i * n..i * n + i + 1].copy_from_slice(a.lower_row(i));
    }
    w
}

struct Tridiagonal {
    diag: Vec<f64>,
    // off[i] couples i and i + 1; off[n - 1] = 0
    off: Vec<f64>,
    // reflectors: for step i (rows 2..n), v stored in w[i*n .. i*n + i], beta[i]
    beta: Vec<f64>,
}

/// Reduces the lower-row working array in place. After the call, row `i`
/// (for `i >= 2`) holds the Householder vector of step `i` in its first `i`
/// slots.
fn tridiagonalize(w: &mut [f64], n: usize) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n]; // sub[i] couples i - 1 and i
    let mut beta = vec![0.0; n];
    let mut p = vec![0.0; n];

    for i in (2..n).rev() {
        let (head, tail) = w.split_at_mut(i * n);
        let x = &mut tail[..i];
        let last = x[i - 1];
        let tail_sq: f64 = x[..i - 1].iter().map(|v| v * v).sum();
        if tail_sq == 0.0 {
            // already reduced in this row
            sub[i] = last;
            beta[i] = 0.0;
        } else {
            let sigma = (tail_sq + last * last).sqrt();
            let alpha = if last > 0.0 { -sigma } else { sigma };
            x[i - 1] = last - alpha;
            let vnorm_sq = tail_sq + x[i - 1] * x[i - 1];
            let b = 2.0 / vnorm_sq;
            sub[i] = alpha;
            beta[i] = b;
            let v: &[f64] = x;

            // p = b * B v, B the leading i x i block, lower rows only
            let p = &mut p[..i];
            p.iter_mut().for_each(|e| *e = 0.0);
            for r in 0..i {
                let row = &head[r * n..r * n + r + 1];
                let vr = v[r];
                let mut acc = row[r] * vr;
                for ((pc, &a), &vc) in p[..r].iter_mut().zip(&row[..r]).zip(&v[..r]) {
                    acc += a * vc;
                    *pc += a * vr;
                }
                p[r] += acc;
            }
            let mut vp = 0.0;
            for (pe, &ve) in p.iter_mut().zip(v) {
                *pe *= b;
                vp += *pe * ve;
            }
            let k = 0.5 * b * vp;
            for (pe, &ve) in p.iter_mut().zip(v) {
                *pe -= k * ve;
            }
            // B -= v p^T + p v^T on the lower triangle
            for r in 0..i {
                let (vr, pr) = (v[r], p[r]);
                let row = &mut head[r * n..r * n + r + 1];
                for ((a, &vc), &pc) in row.iter_mut().zip(&v[..=r]).zip(&p[..=r]) {
                    *a -= vr * pc + pr * vc;
                }
            }
        }
        diag[i] = tail[i];
    }
    if n >= 2 {
        sub[1] = w[n];
        diag[1] = w[n + 1];
    }
    if n >= 1 {
        diag[0] = w[0];
    }
    let mut off = vec![0.0; n];
    for i in 1..n {
        off[i - 1] = sub[i];
    }
    Tridiagonal { diag, off, beta }
}

/// Builds the orthogonal factor `Q` (row-major) with `A = Q T Q^T`.
fn accumulate_reflectors(w: &[f64], n: usize, beta: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let mut r = vec![0.0; n];
    // The reduction applied H_{n-1} first, so Q = H_{n-1} ... H_2 and the
    // product is formed by applying H_2 first. Before step i only the
    // leading i x i block of Q differs from the identity.
    for i in 2..n {
        let b = beta[i];
        if b == 0.0 {
            continue;
        }
        let v = &w[i * n..i * n + i];
        let r = &mut r[..i];
        r.iter_mut().for_each(|e| *e = 0.0);
        for (row, &vr) in v.iter().enumerate() {
            for (re, &qe) in r.iter_mut().zip(&q[row * n..row * n + i]) {
                *re += vr * qe;
            }
        }
        for (row, &vr) in v.iter().enumerate() {
            let s = b * vr;
            for (qe, &re) in q[row * n..row * n + i].iter_mut().zip(r.iter()) {
                *qe -= s * re;
            }
        }
    }
    q
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. If `z` is given
/// (row-major, rows are the current basis vectors) the rotations are applied
/// to its rows.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let nz = n;
                    let (lo, hi) = z.split_at_mut((i + 1) * nz);
                    let zi = &mut lo[i * nz..];
                    let zi1 = &mut hi[..nz];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues only, sorted ascending.
pub fn eigenvalues(a: &SymmetricMatrix) -> Result<Spectrum> {
    check_finite(a)?;
    let n = a.n();
    let mut w = lower_rows(a);
    let Tridiagonal { mut diag, mut off, .. } = tridiagonalize(&mut w, n);
    tridiagonal_ql(&mut diag, &mut off, None)?;
    diag.sort_unstable_by(f64::total_cmp);
    Ok(Spectrum::from_sorted_unchecked(diag))
}

/// Full decomposition with eigenvectors.
pub fn eig_symmetric(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    check_finite(a)?;
    let n = a.n();
    let mut w = lower_rows(a);
    let Tridiagonal {
        mut diag,
        mut off,
        beta,
    } = tridiagonalize(&mut w, n);
    let q = accumulate_reflectors(&w, n, &beta);
    // rows of z are the columns of q
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            z[j * n + i] = q[i * n + j];
        }
    }
    tridiagonal_ql(&mut diag, &mut off, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]).then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend_from_slice(&z[k * n..(k + 1) * n]);
    }
    Ok(SpectralDecomposition {
        spectrum: Spectrum::from_sorted_unchecked(values),
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_symmetric, DistributionSpec, RngHandle};

    fn check(a: &SymmetricMatrix, tol: f64) -> SpectralDecomposition {
        let dec = eig_symmetric(a).unwrap();
        let scale = 1.0 + dec.spectrum().op_norm();
        assert!(dec.max_residual(a) <= tol * scale, "residual {}", dec.max_residual(a));
        assert!(dec.orthonormality_defect() <= tol, "orthonormality {}", dec.orthonormality_defect());
        let rec = dec.reconstruct();
        let dense = a.to_dense();
        let err = rec.iter().zip(&dense).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-7 * scale, "reconstruction {err}");
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        dec
    }

    #[test]
    fn swap_matrix() {
        let a = SymmetricMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let dec = check(&a, 1e-12);
        assert!((dec.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues()[1] - 1.0).abs() < 1e-14);
        let v = dec.eigenvector(0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].abs() - h).abs() < 1e-14 && (v[0] + v[1]).abs() < 1e-14);
        let v = dec.eigenvector(1);
        assert!((v[0].abs() - h).abs() < 1e-14 && (v[0] - v[1]).abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_sorted() {
        let a = SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let dec = check(&a, 1e-14);
        assert_eq!(dec.eigenvalues(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn tiny_orders() {
        let a = SymmetricMatrix::from_diagonal(&[-4.5]);
        let dec = check(&a, 1e-15);
        assert_eq!(dec.eigenvalues(), &[-4.5]);
        assert_eq!(dec.eigenvector(0), &[1.0]);
        let empty = eig_symmetric(&SymmetricMatrix::zeros(0)).unwrap();
        assert_eq!(empty.n(), 0);
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = SymmetricMatrix::zeros(3);
        a.set(2, 1, f64::NAN);
        assert_eq!(eig_symmetric(&a).unwrap_err(), Error::NonFinite { row: 2, col: 1 });
        a.set(2, 1, f64::INFINITY);
        assert!(eigenvalues(&a).is_err());
    }

    #[test]
    fn random_rademacher_64() {
        let a = sample_symmetric(64, &DistributionSpec::rademacher(), &mut RngHandle::new(64).stream());
        check(&a, 1e-8);
    }

    #[test]
    fn values_only_path_agrees() {
        for seed in 0..5 {
            let a = sample_symmetric(37, &DistributionSpec::gaussian(), &mut RngHandle::new(seed).stream());
            let full = eig_symmetric(&a).unwrap();
            let vals = eigenvalues(&a).unwrap();
            for (x, y) in full.eigenvalues().iter().zip(vals.values()) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn zero_and_rank_one() {
        let z = SymmetricMatrix::zeros(5);
        let dec = check(&z, 1e-15);
        assert!(dec.eigenvalues().iter().all(|&x| x == 0.0));
        let ones = SymmetricMatrix::from_fn(6, |_, _| 1.0);
        let dec = check(&ones, 1e-12);
        assert!((dec.eigenvalues()[5] - 6.0).abs() < 1e-12);
        assert!(dec.eigenvalues()[..5].iter().all(|x| x.abs() < 1e-12));
    }
}
