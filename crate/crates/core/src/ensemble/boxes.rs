use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Finite union of disjoint inclusive integer ranges, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateSet {
    ranges: Vec<(i64, i64)>,
}

impl CoordinateSet {
    /// Ranges may overlap or touch; they are merged. Reversed ranges are an error.
    pub fn new(mut ranges: Vec<(i64, i64)>) -> Result<Self> {
        if let Some(&(lo, hi)) = ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::param("coordinate set", format!("range [{lo}, {hi}] is reversed")));
        }
        ranges.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { ranges: merged })
    }

    pub fn single(value: i64) -> Self {
        Self {
            ranges: vec![(value, value)],
        }
    }

    /// `[-m, m]`
    pub fn symmetric_interval(m: i64) -> Self {
        Self { ranges: vec![(-m, m)] }
    }

    /// `[-hi, -lo] ∪ [lo, hi]` for `0 < lo <= hi`.
    pub fn symmetric_annulus(lo: i64, hi: i64) -> Self {
        Self {
            ranges: vec![(-hi, -lo), (lo, hi)],
        }
    }

    pub fn len(&self) -> u64 {
        self.ranges.iter().map(|(lo, hi)| (hi - lo + 1) as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// The `k`-th element in increasing order.
    pub fn nth(&self, mut k: u64) -> i64 {
        for &(lo, hi) in &self.ranges {
            let width = (hi - lo + 1) as u64;
            if k < width {
                return lo + k as i64;
            }
            k -= width;
        }
        panic!("index out of range for coordinate set")
    }

    pub fn contains(&self, x: i64) -> bool {
        self.ranges.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    pub fn max_abs(&self) -> i64 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| lo.abs().max(hi.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| lo..=hi)
    }
}

/// Parameters `(N, N1, kappa, kappa', D1, D2, D3)` of a box pair, with
/// optional explicit coordinate sets.
///
/// Default sets: on `D1` the first box uses `[-kN, -N] ∪ [N, kN]` and on `D2`
/// the second box uses `[-kN1, -N1] ∪ [N1, kN1]` (with `kN` rounded down).
/// Every other coordinate defaults to `[-N, N]` (resp. `[-N1, N1]`).
#[derive(Clone, Debug, PartialEq)]
pub struct BoxPairSpec {
    n: usize,
    big_n: i64,
    small_n: i64,
    kappa: f64,
    kappa_prime: f64,
    d1: Vec<usize>,
    d2: Vec<usize>,
    d3: Vec<usize>,
    explicit: Option<(Vec<CoordinateSet>, Vec<CoordinateSet>)>,
}

impl BoxPairSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        big_n: i64,
        small_n: i64,
        kappa: f64,
        kappa_prime: f64,
        d1: Vec<usize>,
        d2: Vec<usize>,
        d3: Vec<usize>,
    ) -> Result<Self> {
        if !(big_n >= small_n && small_n >= 2) {
            return Err(Error::param("N", format!("need N >= N1 >= 2, got N = {big_n}, N1 = {small_n}")));
        }
        if !(kappa >= 2.0) {
            return Err(Error::param("kappa", format!("{kappa} < 2")));
        }
        if !(kappa_prime >= kappa) {
            return Err(Error::param("kappa_prime", format!("{kappa_prime} < kappa = {kappa}")));
        }
        let mut seen = BTreeSet::new();
        for &i in d1.iter().chain(&d2).chain(&d3) {
            if i >= n {
                return Err(Error::param("D", format!("index {i} out of range for n = {n}")));
            }
            if !seen.insert(i) {
                return Err(Error::param("D", format!("index {i} appears twice; D1, D2, D3 must be disjoint")));
            }
        }
        Ok(Self {
            n,
            big_n,
            small_n,
            kappa,
            kappa_prime,
            d1,
            d2,
            d3,
            explicit: None,
        })
    }

    /// Replaces the default coordinate sets. Every set must be nonempty, the
    /// sets on `D1` (first box) and `D2` (second box) must be the prescribed
    /// annuli, and on `D` the magnitudes are capped by `kappa' N` (resp. `kappa' N1`).
    pub fn with_coordinate_sets(mut self, b1: Vec<CoordinateSet>, b2: Vec<CoordinateSet>) -> Result<Self> {
        if b1.len() != self.n || b2.len() != self.n {
            return Err(Error::Shape(format!(
                "need {} coordinate sets per box, got {} and {}",
                self.n,
                b1.len(),
                b2.len()
            )));
        }
        if let Some(i) = b1.iter().chain(&b2).position(CoordinateSet::is_empty) {
            return Err(Error::param("coordinate set", format!("set {} is empty", i % self.n)));
        }
        let ann1 = self.annulus(self.big_n);
        let ann2 = self.annulus(self.small_n);
        for &i in &self.d1 {
            if b1[i] != ann1 {
                return Err(Error::param("coordinate set", format!("first box on D1 index {i} must be the annulus")));
            }
        }
        for &i in &self.d2 {
            if b2[i] != ann2 {
                return Err(Error::param("coordinate set", format!("second box on D2 index {i} must be the annulus")));
            }
        }
        let cap1 = self.kappa_prime * self.big_n as f64;
        let cap2 = self.kappa_prime * self.small_n as f64;
        for &i in self.d1.iter().chain(&self.d2).chain(&self.d3) {
            if b1[i].max_abs() as f64 > cap1 || b2[i].max_abs() as f64 > cap2 {
                return Err(Error::param("coordinate set", format!("index {i} exceeds the kappa' cap")));
            }
        }
        self.explicit = Some((b1, b2));
        Ok(self)
    }

    fn annulus(&self, base: i64) -> CoordinateSet {
        let hi = (self.kappa * base as f64).floor() as i64;
        CoordinateSet::symmetric_annulus(base, hi)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Resolved coordinate sets for both boxes.
    pub fn coordinate_sets(&self) -> (Vec<CoordinateSet>, Vec<CoordinateSet>) {
        if let Some((b1, b2)) = &self.explicit {
            return (b1.clone(), b2.clone());
        }
        let mut b1 = vec![CoordinateSet::symmetric_interval(self.big_n); self.n];
        let mut b2 = vec![CoordinateSet::symmetric_interval(self.small_n); self.n];
        for &i in &self.d1 {
            b1[i] = self.annulus(self.big_n);
        }
        for &i in &self.d2 {
            b2[i] = self.annulus(self.small_n);
        }
        (b1, b2)
    }
}
