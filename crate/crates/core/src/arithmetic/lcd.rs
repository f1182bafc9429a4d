//! Essential least common denominators by grid scan plus bisection.
//!
//! Every search walks a uniform grid of multipliers (or radii) at the
//! declared resolution, stops at the first grid point where the defining
//! inequality holds, and bisects the preceding cell. The returned value is
//! therefore a point that verifiably satisfies the condition and lies within
//! one resolution step of the first satisfying grid point. Satisfying sets
//! narrower than the resolution can be stepped over; that is the price of a
//! scan and the resolution is recorded in every result.

use std::f64::consts::PI;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{norm2, torus_norm_scaled};
use crate::ensemble::RngHandle;
use crate::{Error, Result};

/// Largest `n` for which [`SubsetMode::Exact`] enumerates subsets.
pub const EXACT_SUBSET_LIMIT: usize = 16;

/// Angular steps on `[0, pi)` used when none are given.
pub const DEFAULT_ANGLES: usize = 360;

const DEFAULT_REFINE_ITERS: u32 = 40;

// tuple conditions can have a zero right-hand side; rounding of an exact
// lattice hit must not turn it into a miss
const LATTICE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcdQuery {
    pub alpha: f64,
    pub gamma: f64,
    /// search cap for the multiplier
    pub phi_max: f64,
    /// scan step
    pub resolution: f64,
    #[serde(default = "default_refine")]
    pub refine_iters: u32,
}

fn default_refine() -> u32 {
    DEFAULT_REFINE_ITERS
}

fn in_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} is not in (0, 1)")))
    }
}

impl LcdQuery {
    pub fn new(alpha: f64, gamma: f64, phi_max: f64, resolution: f64) -> Result<Self> {
        let q = Self {
            alpha,
            gamma,
            phi_max,
            resolution,
            refine_iters: DEFAULT_REFINE_ITERS,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_refine_iters(mut self, iters: u32) -> Self {
        self.refine_iters = iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        in_unit_interval("alpha", self.alpha)?;
        in_unit_interval("gamma", self.gamma)?;
        if !(self.phi_max > 0.0 && self.phi_max.is_finite()) {
            return Err(Error::param("phi_max", "must be positive and finite"));
        }
        if !(self.resolution > 0.0 && self.resolution <= self.phi_max / 100.0) {
            return Err(Error::param("resolution", "must lie in (0, phi_max / 100]"));
        }
        Ok(())
    }
}

/// The defining inequality evaluated at the witness: it holds when
/// `torus <= min(bounds)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcdCondition {
    pub torus: f64,
    pub bounds: Vec<f64>,
}

impl LcdCondition {
    pub fn holds(&self) -> bool {
        self.bounds.iter().all(|&b| self.torus <= b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcdResult {
    /// the located infimum, or the cap when `satisfied` is false
    pub value: f64,
    /// the minimizing multiplier(s); empty when unsatisfied
    pub witness: Vec<f64>,
    pub satisfied: bool,
    pub condition: Option<LcdCondition>,
    pub resolution: f64,
}

impl LcdResult {
    fn sentinel(value: f64, resolution: f64) -> Self {
        Self {
            value,
            witness: Vec::new(),
            satisfied: false,
            condition: None,
            resolution,
        }
    }
}

fn lcd_condition(u: &[f64], q: &LcdQuery, phi: f64) -> LcdCondition {
    let n = u.len() as f64;
    LcdCondition {
        torus: torus_norm_scaled(u, phi),
        bounds: vec![q.gamma * phi, (q.alpha * n).sqrt()],
    }
}

fn lcd_holds(u: &[f64], q: &LcdQuery, phi: f64) -> bool {
    let t = torus_norm_scaled(u, phi);
    t <= q.gamma * phi && t <= (q.alpha * u.len() as f64).sqrt()
}

/// Scan of a unit vector `u` over `(0, limit]`, `limit <= phi_max`.
fn scan_unit(u: &[f64], q: &LcdQuery, limit: f64) -> Option<f64> {
    let res = q.resolution;
    let steps = (limit / res).floor() as u64;
    let mut hit = None;
    for k in 1..=steps {
        let phi = k as f64 * res;
        if lcd_holds(u, q, phi) {
            hit = Some(((k - 1) as f64 * res, phi));
            break;
        }
    }
    if hit.is_none() && limit > steps as f64 * res && lcd_holds(u, q, limit) {
        hit = Some((steps as f64 * res, limit));
    }
    let (mut lo, mut hi) = hit?;
    for _ in 0..q.refine_iters {
        let mid = 0.5 * (lo + hi);
        if mid > 0.0 && lcd_holds(u, q, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn unit_result(u: &[f64], q: &LcdQuery, phi: Option<f64>) -> LcdResult {
    match phi {
        Some(phi) => LcdResult {
            value: phi,
            witness: vec![phi],
            satisfied: true,
            condition: Some(lcd_condition(u, q, phi)),
            resolution: q.resolution,
        },
        None => LcdResult::sentinel(q.phi_max, q.resolution),
    }
}

/// `D_{alpha,gamma}(v) = inf { phi > 0 : ||phi v||_T <= min(gamma phi, sqrt(alpha n)) }`
/// for a unit vector `v`.
///
/// `phi = 0` always satisfies the inequality trivially and is excluded.
pub fn lcd(v: &[f64], q: &LcdQuery) -> Result<LcdResult> {
    q.validate()?;
    if v.is_empty() {
        return Err(Error::Empty("vector"));
    }
    let norm = norm2(v);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::param("v", format!("must be a unit vector, norm is {norm}")));
    }
    Ok(unit_result(v, q, scan_unit(v, q, q.phi_max)))
}

/// Options for the pair-combination LCD.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairLcdQuery {
    pub lcd: LcdQuery,
    /// cap on `||theta||_2`
    pub theta_max: f64,
    /// angular steps on `[0, pi)`
    #[serde(default = "default_angles")]
    pub angles: usize,
}

fn default_angles() -> usize {
    DEFAULT_ANGLES
}

impl PairLcdQuery {
    pub fn new(lcd: LcdQuery, theta_max: f64) -> Result<Self> {
        let q = Self {
            lcd,
            theta_max,
            angles: DEFAULT_ANGLES,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_angles(mut self, angles: usize) -> Self {
        self.angles = angles;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.lcd.validate()?;
        if !(self.theta_max > 0.0 && self.theta_max.is_finite()) {
            return Err(Error::param("theta_max", "must be positive and finite"));
        }
        if self.angles == 0 {
            return Err(Error::param("angles", "must be positive"));
        }
        Ok(())
    }
}

fn check_index(index: &[usize], n: usize) -> Result<()> {
    if index.is_empty() {
        return Err(Error::Empty("index set"));
    }
    let mut seen = vec![false; n];
    for &i in index {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::param("index set", format!("index {i} is out of range or repeated")));
        }
    }
    Ok(())
}

fn pair_on_subset(vi: &[f64], wi: &[f64], q: &PairLcdQuery) -> LcdResult {
    let lq = &q.lcd;
    let mut best: Option<(f64, f64, f64, Vec<f64>)> = None;
    let mut admissible = false;
    let mut u = vec![0.0; vi.len()];
    for j in 0..q.angles {
        let psi = PI * j as f64 / q.angles as f64;
        let (s, c) = psi.sin_cos();
        for ((ui, &a), &b) in u.iter_mut().zip(vi).zip(wi) {
            *ui = c * a + s * b;
        }
        let norm = norm2(&u);
        // theta = (c, s) / norm is the smallest multiple with ||u|| = 1
        if norm == 0.0 || q.theta_max * norm < 1.0 {
            continue;
        }
        admissible = true;
        u.iter_mut().for_each(|x| *x /= norm);
        let limit = best.as_ref().map_or(lq.phi_max, |b| (b.0 + lq.resolution).min(lq.phi_max));
        if let Some(phi) = scan_unit(&u, lq, limit) {
            if best.as_ref().is_none_or(|b| phi < b.0) {
                best = Some((phi, c / norm, s / norm, u.clone()));
            }
        }
    }
    match best {
        Some((phi, t1, t2, u)) => LcdResult {
            value: phi,
            witness: vec![t1, t2, phi],
            satisfied: true,
            condition: Some(lcd_condition(&u, lq, phi)),
            resolution: lq.resolution,
        },
        None if admissible => LcdResult::sentinel(lq.phi_max, lq.resolution),
        None => LcdResult::sentinel(q.theta_max, lq.resolution),
    }
}

/// Minimum over `theta` of `D_{alpha,gamma}` of the normalized combination
/// `(theta_1 v_I + theta_2 w_I) / ||.||`, over `||theta|| <= theta_max` with
/// `||theta_1 v_I + theta_2 w_I|| >= 1`.
///
/// The normalized combination depends only on the direction of `theta` up to
/// sign, so the search runs over `angles` directions in `[0, pi)`; a
/// direction is admissible when the cap allows its combination to reach
/// norm 1. The LCD dimension is `|I|`. When no direction is admissible the
/// value is `theta_max`; when directions are admissible but none meets the
/// LCD condition below `phi_max` the value is `phi_max`. The witness is
/// `[theta_1, theta_2, phi]` with `theta` scaled to unit combination norm.
pub fn lcd_pair_combination(v: &[f64], w: &[f64], index: &[usize], q: &PairLcdQuery) -> Result<LcdResult> {
    q.validate()?;
    if v.len() != w.len() {
        return Err(Error::Shape(format!("lengths {} and {}", v.len(), w.len())));
    }
    check_index(index, v.len())?;
    let vi: Vec<f64> = index.iter().map(|&i| v[i]).collect();
    let wi: Vec<f64> = index.iter().map(|&i| w[i]).collect();
    Ok(pair_on_subset(&vi, &wi, q))
}

/// How the subsets of a subvector LCD are visited.
#[derive(Clone, Debug, PartialEq)]
pub enum SubsetMode {
    /// every subset with at least `ceil((1 - 2 mu) n)` elements; `n <= 16`
    Exact,
    /// `subsets` uniformly random subsets of the minimal admissible size;
    /// the minimum over them bounds the true value from above
    Sampled { subsets: usize, rng: RngHandle },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubvectorLcd {
    pub result: LcdResult,
    /// minimizing subset, ascending
    pub subset: Vec<usize>,
    /// true for sampled mode: the value is an upper estimate
    pub upper_estimate: bool,
}

fn min_subset_size(n: usize, mu: f64) -> Result<usize> {
    if !(mu > 0.0 && mu < 0.5) {
        return Err(Error::param("mu", format!("{mu} is not in (0, 1/2)")));
    }
    let m = ((1.0 - 2.0 * mu) * n as f64 - 1e-9).ceil().max(1.0) as usize;
    Ok(m.min(n))
}

fn subsets(n: usize, mu: f64, mode: &SubsetMode) -> Result<Vec<Vec<usize>>> {
    let m = min_subset_size(n, mu)?;
    match mode {
        SubsetMode::Exact => {
            if n > EXACT_SUBSET_LIMIT {
                return Err(Error::param(
                    "mode",
                    format!("exact subset enumeration needs n <= {EXACT_SUBSET_LIMIT}, got {n}"),
                ));
            }
            Ok((1u32..1 << n)
                .filter(|mask| mask.count_ones() as usize >= m)
                .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
                .collect())
        }
        SubsetMode::Sampled { subsets, rng } => {
            if *subsets == 0 {
                return Err(Error::param("subsets", "must be positive"));
            }
            let mut stream = rng.stream();
            Ok((0..*subsets)
                .map(|_| {
                    let mut s = sample(&mut stream, n, m).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect())
        }
    }
}

fn min_over_subsets(
    all: Vec<Vec<usize>>,
    mode: &SubsetMode,
    mut eval: impl FnMut(&[usize]) -> LcdResult,
) -> SubvectorLcd {
    let mut best: Option<(LcdResult, Vec<usize>)> = None;
    for s in all {
        let r = eval(&s);
        let better = match &best {
            None => true,
            Some((b, _)) => (r.satisfied && !b.satisfied) || (r.satisfied == b.satisfied && r.value < b.value),
        };
        if better {
            best = Some((r, s));
        }
    }
    let (result, subset) = best.expect("at least the full index set is visited");
    SubvectorLcd {
        result,
        subset,
        upper_estimate: matches!(mode, SubsetMode::Sampled { .. }),
    }
}

/// Subvector LCD of a pair: the minimum of [`lcd_pair_combination`] over
/// index sets `I` with `|I| >= (1 - 2 mu) n`.
pub fn subvector_lcd(v: &[f64], w: &[f64], mu: f64, q: &PairLcdQuery, mode: &SubsetMode) -> Result<SubvectorLcd> {
    q.validate()?;
    if v.len() != w.len() {
        return Err(Error::Shape(format!("lengths {} and {}", v.len(), w.len())));
    }
    if v.is_empty() {
        return Err(Error::Empty("vector"));
    }
    let all = subsets(v.len(), mu, mode)?;
    Ok(min_over_subsets(all, mode, |s| {
        let vi: Vec<f64> = s.iter().map(|&i| v[i]).collect();
        let wi: Vec<f64> = s.iter().map(|&i| w[i]).collect();
        pair_on_subset(&vi, &wi, q)
    }))
}

/// One-vector subvector LCD: the minimum of `D_{alpha,gamma}(v_I / ||v_I||)`
/// over `|I| >= (1 - 2 mu) n`. Subsets on which `v` vanishes are skipped.
pub fn subvector_lcd_single(v: &[f64], mu: f64, q: &LcdQuery, mode: &SubsetMode) -> Result<SubvectorLcd> {
    q.validate()?;
    if v.is_empty() {
        return Err(Error::Empty("vector"));
    }
    let all = subsets(v.len(), mu, mode)?;
    Ok(min_over_subsets(all, mode, |s| {
        let vi: Vec<f64> = s.iter().map(|&i| v[i]).collect();
        let norm = norm2(&vi);
        if norm == 0.0 {
            return LcdResult::sentinel(q.phi_max, q.resolution);
        }
        let u: Vec<f64> = vi.iter().map(|x| x / norm).collect();
        unit_result(&u, q, scan_unit(&u, q, q.phi_max))
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleLcdQuery {
    pub l: f64,
    pub alpha: f64,
    pub t: Vec<f64>,
    pub theta_max: f64,
    pub resolution: f64,
    #[serde(default = "default_angles")]
    pub angles: usize,
    #[serde(default = "default_refine")]
    pub refine_iters: u32,
}

impl TupleLcdQuery {
    pub fn new(l: f64, alpha: f64, t: Vec<f64>, theta_max: f64, resolution: f64) -> Result<Self> {
        let q = Self {
            l,
            alpha,
            t,
            theta_max,
            resolution,
            angles: DEFAULT_ANGLES,
            refine_iters: DEFAULT_REFINE_ITERS,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_angles(mut self, angles: usize) -> Self {
        self.angles = angles;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l >= 1.0) {
            return Err(Error::param("L", format!("{} < 1", self.l)));
        }
        in_unit_interval("alpha", self.alpha)?;
        if self.t.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::param("t", "entries must be positive"));
        }
        if !(self.theta_max > 0.0 && self.theta_max.is_finite()) {
            return Err(Error::param("theta_max", "must be positive and finite"));
        }
        if !(self.resolution > 0.0 && self.resolution <= self.theta_max / 100.0) {
            return Err(Error::param("resolution", "must lie in (0, theta_max / 100]"));
        }
        if self.angles == 0 {
            return Err(Error::param("angles", "must be positive"));
        }
        Ok(())
    }
}

struct TupleProblem<'a> {
    ys: &'a [Vec<f64>],
    q: &'a TupleLcdQuery,
    buf: Vec<f64>,
}

impl TupleProblem<'_> {
    fn condition(&mut self, theta: &[f64]) -> LcdCondition {
        self.buf.iter_mut().for_each(|x| *x = 0.0);
        for (y, &th) in self.ys.iter().zip(theta) {
            for (b, &yi) in self.buf.iter_mut().zip(y) {
                *b += th * yi;
            }
        }
        let weighted: f64 = theta.iter().zip(&self.q.t).map(|(th, t)| (th / t).powi(2)).sum();
        let arg = self.q.alpha * weighted.sqrt() / self.q.l;
        let log_plus = if arg > 1.0 { arg.ln() } else { 0.0 };
        LcdCondition {
            torus: super::torus_norm(&self.buf),
            bounds: vec![self.q.l * log_plus.sqrt()],
        }
    }

    fn holds(&mut self, theta: &[f64]) -> bool {
        let c = self.condition(theta);
        c.torus <= c.bounds[0] + LATTICE_SLACK
    }
}

/// `LCD^t_{L,alpha}(Y) = inf { ||theta|| : theta != 0,
/// ||sum theta_i Y_i||_T <= L sqrt(log_+(alpha ||theta / t|| / L)) }`
/// for one or two vectors, searched over `||theta|| <= theta_max`.
///
/// The scan runs over radii at the given resolution; for two vectors each
/// shell is sampled at `angles` directions in `[0, pi)` (the condition is
/// invariant under `theta -> -theta`). The first satisfied shell is refined
/// radially along each satisfied direction. Witness: `theta`.
pub fn tuple_lcd(ys: &[Vec<f64>], q: &TupleLcdQuery) -> Result<LcdResult> {
    q.validate()?;
    let ell = ys.len();
    if !(1..=2).contains(&ell) {
        return Err(Error::param("Y", format!("{ell} vectors; the scan supports 1 or 2")));
    }
    if q.t.len() != ell {
        return Err(Error::Shape(format!("{} weights for {ell} vectors", q.t.len())));
    }
    let d = ys[0].len();
    if ys.iter().any(|y| y.len() != d) {
        return Err(Error::Shape("vectors have different lengths".into()));
    }
    if ys.iter().any(|y| y.iter().all(|&x| x == 0.0)) {
        return Err(Error::param("Y", "vectors must be nonzero"));
    }
    let directions: Vec<Vec<f64>> = if ell == 1 {
        vec![vec![1.0]]
    } else {
        (0..q.angles)
            .map(|j| {
                let (s, c) = (PI * j as f64 / q.angles as f64).sin_cos();
                vec![c, s]
            })
            .collect()
    };
    let mut p = TupleProblem {
        ys,
        q,
        buf: vec![0.0; d],
    };
    let at = |dir: &[f64], r: f64| -> Vec<f64> { dir.iter().map(|x| x * r).collect() };
    let steps = (q.theta_max / q.resolution).floor() as u64;
    let mut radii: Vec<f64> = (1..=steps).map(|k| k as f64 * q.resolution).collect();
    if q.theta_max > steps as f64 * q.resolution {
        radii.push(q.theta_max);
    }
    let mut prev = 0.0;
    for &r in &radii {
        let mut best: Option<(f64, &Vec<f64>)> = None;
        for dir in &directions {
            if !p.holds(&at(dir, r)) {
                continue;
            }
            let (mut lo, mut hi) = (prev, r);
            for _ in 0..q.refine_iters {
                let mid = 0.5 * (lo + hi);
                if mid > 0.0 && p.holds(&at(dir, mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if best.is_none_or(|b| hi < b.0) {
                best = Some((hi, dir));
            }
        }
        if let Some((radius, dir)) = best {
            let theta = at(dir, radius);
            let condition = p.condition(&theta);
            return Ok(LcdResult {
                value: radius,
                witness: theta,
                satisfied: true,
                condition: Some(condition),
                resolution: q.resolution,
            });
        }
        prev = r;
    }
    Ok(LcdResult::sentinel(q.theta_max, q.resolution))
}
