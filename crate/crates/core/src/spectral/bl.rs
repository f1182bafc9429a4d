//! Bounded-Lipschitz distance restricted to piecewise-linear test functions.
//!
//! Test functions are continuous, piecewise linear with knots on a uniform
//! grid, constant outside it, with `|f| <= 1` and Lipschitz constant `<= 1`.
//! Integrating such an `f` against a measure only sees the measure's hat
//! function masses at the knots, so the supremum is the finite linear program
//!
//! ```text
//! maximize  sum_g m_g f_g   s.t.  |f_g| <= 1,  |f_{g+1} - f_g| <= h
//! ```
//!
//! with `m = masses(mu) - masses(nu)`. The constraints are difference
//! constraints with bounds that are multiples of `h` (the grid is required
//! to have `2 / h` integral), so the system is totally unimodular and an
//! optimal vertex lives on the lattice `f_g in -1 + h Z`. The program is then
//! solved exactly by dynamic programming over the `2/h + 1` levels.

use std::f64::consts::PI;

use crate::{Error, Result};

use super::Spectrum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnotGrid {
    lo: f64,
    step: f64,
    knots: usize,
    levels: usize,
}

impl Default for KnotGrid {
    /// `[-3, 3]` with spacing `0.01`.
    fn default() -> Self {
        Self::new(-3.0, 3.0, 0.01).expect("default grid is valid")
    }
}

fn near_integer(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() < 1e-9 && r >= 1.0).then_some(r as usize)
}

impl KnotGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && hi > lo) {
            return Err(Error::param("grid", "need hi > lo and step > 0"));
        }
        let cells = near_integer((hi - lo) / step)
            .ok_or_else(|| Error::param("grid", "step must divide hi - lo"))?;
        let levels = near_integer(2.0 / step)
            .ok_or_else(|| Error::param("grid", "2 / step must be an integer"))?;
        Ok(Self {
            lo,
            step,
            knots: cells + 1,
            levels: levels + 1,
        })
    }

    pub fn knots(&self) -> usize {
        self.knots
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn knot(&self, g: usize) -> f64 {
        self.lo + g as f64 * self.step
    }

    /// Hat-function masses of an equally weighted atomic measure.
    pub fn atom_masses(&self, atoms: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.knots];
        if atoms.is_empty() {
            return m;
        }
        let w = 1.0 / atoms.len() as f64;
        let last = self.knots - 1;
        for &x in atoms {
            let t = (x - self.lo) / self.step;
            if t <= 0.0 {
                m[0] += w;
            } else if t >= last as f64 {
                m[last] += w;
            } else {
                let g = t.floor() as usize;
                let frac = t - g as f64;
                m[g] += w * (1.0 - frac);
                m[g + 1] += w * frac;
            }
        }
        m
    }
}

fn semicircle_moment0(x: f64) -> f64 {
    super::semicircle_cdf(x)
}

// antiderivative of x * rho_sc(x)
fn semicircle_moment1(x: f64) -> f64 {
    let c = x.clamp(-2.0, 2.0);
    -(4.0 - c * c).max(0.0).powf(1.5) / (6.0 * PI)
}

/// Hat-function masses of the semicircle law, from closed-form antiderivatives.
pub fn semicircle_knot_masses(grid: &KnotGrid) -> Vec<f64> {
    let mut m = vec![0.0; grid.knots];
    let h = grid.step;
    for g in 0..grid.knots - 1 {
        let (a, b) = (grid.knot(g), grid.knot(g + 1));
        let m0 = semicircle_moment0(b) - semicircle_moment0(a);
        let m1 = semicircle_moment1(b) - semicircle_moment1(a);
        m[g] += (b * m0 - m1) / h;
        m[g + 1] += (m1 - a * m0) / h;
    }
    // mass beyond the grid collapses onto the end knots
    m[0] += semicircle_moment0(grid.knot(0));
    m[grid.knots - 1] += 1.0 - semicircle_moment0(grid.knot(grid.knots - 1));
    m
}

/// Exact value of the restricted bounded-Lipschitz program for two knot-mass
/// vectors on `grid`.
pub fn bl_distance(grid: &KnotGrid, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != grid.knots || b.len() != grid.knots {
        return Err(Error::Shape(format!(
            "mass vectors must have {} entries, got {} and {}",
            grid.knots,
            a.len(),
            b.len()
        )));
    }
    let levels = grid.levels;
    let value = |j: usize| -1.0 + j as f64 * grid.step;
    let mut prev: Vec<f64> = (0..levels).map(|j| (a[0] - b[0]) * value(j)).collect();
    let mut next = vec![0.0; levels];
    for g in 1..grid.knots {
        let m = a[g] - b[g];
        for j in 0..levels {
            let mut best = prev[j];
            if j > 0 {
                best = best.max(prev[j - 1]);
            }
            if j + 1 < levels {
                best = best.max(prev[j + 1]);
            }
            next[j] = best + m * value(j);
        }
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(prev.iter().copied().fold(0.0, f64::max))
}

/// Distance between the normalized empirical spectral measure (atoms at
/// `lambda_k / sqrt(n)`) and the semicircle law on the default grid.
pub fn bl_distance_to_semicircle(spectrum: &Spectrum) -> f64 {
    bl_distance_to_semicircle_on(spectrum, &KnotGrid::default())
}

pub fn bl_distance_to_semicircle_on(spectrum: &Spectrum, grid: &KnotGrid) -> f64 {
    let scale = (spectrum.n().max(1) as f64).sqrt();
    let atoms: Vec<f64> = spectrum.values().iter().map(|x| x / scale).collect();
    let emp = grid.atom_masses(&atoms);
    let sc = semicircle_knot_masses(grid);
    bl_distance(grid, &emp, &sc).expect("masses built on the same grid")
}
