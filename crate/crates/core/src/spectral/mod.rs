//! Spectrum-derived quantities.
//!
//! Everything here is a pure function of a sorted spectrum (and, where
//! needed, the eigenvectors). For a symmetric `A` the singular values of
//! `(A - lambda)^{-1}` are `1 / |lambda_k - lambda|`, so no second
//! factorization is ever required.

mod bl;
mod eigen;

use serde::{Deserialize, Serialize};

pub use bl::{bl_distance, bl_distance_to_semicircle, semicircle_knot_masses, KnotGrid};
pub use eigen::{eig_symmetric, eigenvalues, SpectralDecomposition};

use crate::{Error, Result};

/// Relative distance below which a shift counts as hitting an eigenvalue.
pub const RESONANCE_RTOL: f64 = 1e-14;

/// Stand-in for an infinite resolvent singular value.
pub const RESONANT_SENTINEL: f64 = f64::MAX;

/// Eigenvalues of a symmetric matrix, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given eigenvalues; they must be finite.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("eigenvalues", format!("entry {k} is not finite")));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `max_k |lambda_k|`
    pub fn op_norm(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
            _ => 0.0,
        }
    }

    pub fn resonance_threshold(&self) -> f64 {
        RESONANCE_RTOL * (1.0 + self.op_norm())
    }

    /// Singular values `|lambda_k|`, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        s.sort_unstable_by(|a, b| b.total_cmp(a));
        s
    }
}

impl AsRef<Spectrum> for Spectrum {
    fn as_ref(&self) -> &Spectrum {
        self
    }
}

impl AsRef<Spectrum> for SpectralDecomposition {
    fn as_ref(&self) -> &Spectrum {
        self.spectrum()
    }
}

/// Singular values of `(A - lambda)^{-1}` in decreasing order, with the map
/// from rank to eigenvalue index.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedSpectrum {
    lambda: f64,
    mu: Vec<f64>,
    distances: Vec<f64>,
    eig_index: Vec<usize>,
    resonant: bool,
}

impl ShiftedSpectrum {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `mu_1 >= mu_2 >= ...`; resonant ranks hold [`RESONANT_SENTINEL`].
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// `|lambda_k - lambda|` in rank order (ascending).
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Rank (0-based) to eigenvalue index.
    pub fn eig_index(&self) -> &[usize] {
        &self.eig_index
    }

    pub fn is_resonant(&self) -> bool {
        self.resonant
    }

    fn require_regular(&self) -> Result<()> {
        if self.resonant {
            Err(Error::Resonant {
                lambda: self.lambda,
                distance: self.distances.first().copied().unwrap_or(0.0),
            })
        } else {
            Ok(())
        }
    }
}

/// Ranks eigenvalues by distance to `lambda`; equal distances go to the
/// lower eigenvalue index first.
pub fn shifted_spectrum(spectrum: &Spectrum, lambda: f64) -> Result<ShiftedSpectrum> {
    if !lambda.is_finite() {
        return Err(Error::param("lambda", "must be finite"));
    }
    let values = spectrum.values();
    let mut eig_index: Vec<usize> = (0..values.len()).collect();
    let dist = |k: usize| (values[k] - lambda).abs();
    eig_index.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
    let distances: Vec<f64> = eig_index.iter().map(|&k| dist(k)).collect();
    let threshold = spectrum.resonance_threshold();
    let resonant = distances.first().is_some_and(|&d| d < threshold);
    let mu = distances
        .iter()
        .map(|&d| if d < threshold { RESONANT_SENTINEL } else { 1.0 / d })
        .collect();
    Ok(ShiftedSpectrum {
        lambda,
        mu,
        distances,
        eig_index,
        resonant,
    })
}

/// `sigma_min(A - lambda) = min_k |lambda_k - lambda|`.
pub fn sigma_min_shifted(spectrum: &Spectrum, lambda: f64) -> f64 {
    let v = spectrum.values();
    if v.is_empty() {
        return f64::INFINITY;
    }
    let i = v.partition_point(|&x| x < lambda);
    let mut best = f64::INFINITY;
    if i < v.len() {
        best = best.min((v[i] - lambda).abs());
    }
    if i > 0 {
        best = best.min((v[i - 1] - lambda).abs());
    }
    best
}

/// `sqrt(sum_k mu_k^2 log2(1 + k)^2)` with 1-based ranks `k`.
pub fn star_norm(shift: &ShiftedSpectrum) -> Result<f64> {
    shift.require_regular()?;
    Ok(shift
        .mu
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let w = ((i + 2) as f64).log2();
            (m * w).powi(2)
        })
        .sum::<f64>()
        .sqrt())
}

/// Hilbert-Schmidt norm of the resolvent.
pub fn hs_norm(shift: &ShiftedSpectrum) -> Result<f64> {
    shift.require_regular()?;
    Ok(shift.mu.iter().map(|m| m * m).sum::<f64>().sqrt())
}

pub fn op_norm(spectrum: &Spectrum) -> f64 {
    spectrum.op_norm()
}

/// Full map `k -> c_j(i; k)`, both sides 1-based.
pub fn rank_correspondence_map(spectrum: &Spectrum, lambda_i: f64, lambda_j: f64) -> Result<Vec<usize>> {
    let si = shifted_spectrum(spectrum, lambda_i)?;
    let sj = shifted_spectrum(spectrum, lambda_j)?;
    si.require_regular()?;
    sj.require_regular()?;
    let mut rank_at_j = vec![0usize; spectrum.n()];
    for (rank, &eig) in sj.eig_index.iter().enumerate() {
        rank_at_j[eig] = rank + 1;
    }
    Ok(si.eig_index.iter().map(|&eig| rank_at_j[eig]).collect())
}

/// Rank at `lambda_j` of the eigenvector that holds rank `k` at `lambda_i`.
pub fn rank_correspondence(spectrum: &Spectrum, lambda_i: f64, lambda_j: f64, k: usize) -> Result<usize> {
    let n = spectrum.n();
    if k == 0 || k > n {
        return Err(Error::param("k", format!("{k} is outside 1..={n}")));
    }
    Ok(rank_correspondence_map(spectrum, lambda_i, lambda_j)?[k - 1])
}

/// Number of normalized eigenvalues `lambda_k / sqrt(n)` in
/// `[e - eta/2, e + eta/2]`.
pub fn local_count(spectrum: &Spectrum, e: f64, eta: f64) -> usize {
    let scale = (spectrum.n() as f64).sqrt();
    let (lo, hi) = (e - eta / 2.0, e + eta / 2.0);
    let v = spectrum.values();
    let start = v.partition_point(|&x| x / scale < lo);
    let end = v.partition_point(|&x| x / scale <= hi);
    end.saturating_sub(start)
}

/// Semicircle density `sqrt((4 - x^2)_+) / (2 pi)`.
pub fn semicircle_density(x: f64) -> f64 {
    (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
}

/// Distribution function of the semicircle law.
pub fn semicircle_cdf(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}

/// Inverse of [`semicircle_cdf`] by bisection, for `p` in `[0, 1]`.
pub fn semicircle_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Units for an interval of the real line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Absolute,
    /// Multiples of `sqrt(n)`.
    SqrtN,
}

impl Units {
    pub fn scale(self, n: usize) -> f64 {
        match self {
            Units::Absolute => 1.0,
            Units::SqrtN => (n as f64).sqrt(),
        }
    }
}

/// Smallest gap between consecutive singular values `|lambda_k|` inside
/// `[lo, hi]`; `+inf` if fewer than two land inside.
pub fn min_sv_gap(spectrum: &Spectrum, lo: f64, hi: f64, units: Units) -> f64 {
    let s = units.scale(spectrum.n());
    let (lo, hi) = (lo * s, hi * s);
    let inside: Vec<f64> = spectrum
        .singular_values()
        .into_iter()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    inside
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min)
}

/// Result of the distance formula for the first column of a bordered matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceIdentity {
    /// distance of the first column to the span of the others
    pub distance: f64,
    /// `<(A - lambda)^{-1} X, X>`
    pub quadratic_form: f64,
    /// `||(A - lambda)^{-1} X||_2`
    pub resolvent_norm: f64,
}

/// Distance of the first column of `[[a11, X^T], [X, A]] - lambda I` to the
/// span of the remaining columns, evaluated through the eigen-expansion of
/// the minor `A`.
pub fn distance_identity(
    minor: &SpectralDecomposition,
    x: &[f64],
    a11: f64,
    lambda: f64,
) -> Result<DistanceIdentity> {
    if x.len() != minor.n() {
        return Err(Error::Shape(format!("X has length {}, minor has order {}", x.len(), minor.n())));
    }
    let threshold = minor.spectrum().resonance_threshold();
    let mut quad = 0.0;
    let mut norm_sq = 0.0;
    for (k, &lam) in minor.eigenvalues().iter().enumerate() {
        let gap = lam - lambda;
        if gap.abs() < threshold {
            return Err(Error::Resonant {
                lambda,
                distance: gap.abs(),
            });
        }
        let c: f64 = minor.eigenvector(k).iter().zip(x).map(|(v, xi)| v * xi).sum();
        quad += c * c / gap;
        norm_sq += (c / gap).powi(2);
    }
    let resolvent_norm = norm_sq.sqrt();
    Ok(DistanceIdentity {
        distance: (quad - (a11 - lambda)).abs() / (1.0 + norm_sq).sqrt(),
        quadratic_form: quad,
        resolvent_norm,
    })
}

/// For each eigenvector, the fraction of coordinates with `|v_j| >= tau / sqrt(n)`.
pub fn delocalization_profile(dec: &SpectralDecomposition, tau: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(Error::param("tau", format!("{tau} must be positive")));
    }
    Ok(delocalized_fractions(dec, tau))
}

pub(crate) fn delocalized_fractions(dec: &SpectralDecomposition, tau: f64) -> Vec<f64> {
    let n = dec.n();
    let cut = tau / (n as f64).sqrt();
    dec.eigenvectors()
        .map(|v| v.iter().filter(|x| x.abs() >= cut).count() as f64 / n as f64)
        .collect()
}
