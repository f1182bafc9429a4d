//! Littlewood–Offord toolkit: torus norm, essential LCDs, compressibility,
//! angles, Lévy concentration and the threshold function.

mod lcd;
mod threshold;

pub use lcd::{
    lcd, lcd_pair_combination, subvector_lcd, subvector_lcd_single, tuple_lcd, LcdCondition, LcdQuery,
    LcdResult, PairLcdQuery, SubsetMode, SubvectorLcd, TupleLcdQuery, DEFAULT_ANGLES, EXACT_SUBSET_LIMIT,
};
pub use threshold::{threshold_tau, threshold_t_grid, Benchmark, ThresholdEstimate, ThresholdPoint};

use crate::{Error, Result};

#[inline]
fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// `min_{p in Z^n} ||v - p||_2`, by coordinatewise rounding.
pub fn torus_norm(v: &[f64]) -> f64 {
    v.iter().map(|&x| dist_to_integer(x).powi(2)).sum::<f64>().sqrt()
}

/// Torus norm of `phi * v` without allocating.
#[inline]
pub(crate) fn torus_norm_scaled(v: &[f64], phi: f64) -> f64 {
    v.iter().map(|&x| dist_to_integer(phi * x).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("{delta} is not in (0, 1]")))
    }
}

/// Distance from `v` to the nearest vector supported on `floor(delta n)`
/// coordinates: the norm of everything but the largest-magnitude entries.
pub fn sparse_distance(v: &[f64], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let n = v.len();
    // the small fudge keeps delta = k / n from flooring to k - 1
    let keep = ((delta * n as f64) + 1e-9).floor() as usize;
    let mut sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    sq.sort_unstable_by(f64::total_cmp);
    Ok(sq[..n - keep.min(n)].iter().sum::<f64>().sqrt())
}

/// `(distance, distance <= rho)`.
pub fn compressibility(v: &[f64], delta: f64, rho: f64) -> Result<(f64, bool)> {
    let d = sparse_distance(v, delta)?;
    Ok((d, d <= rho))
}

/// `||P_{w^perp} v|| / ||v||`, clamped to `[0, 1]`.
pub fn sine_angle(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(Error::Shape(format!("lengths {} and {}", v.len(), w.len())));
    }
    let (nv, nw) = (norm2(v), norm2(w));
    if nv == 0.0 || nw == 0.0 {
        return Err(Error::Empty("sine of an angle with the zero vector"));
    }
    let c = (dot(v, w) / (nv * nw)).clamp(-1.0, 1.0);
    Ok((1.0 - c * c).max(0.0).sqrt().clamp(0.0, 1.0))
}

/// Origin, sample mean, and every sample when there are at most 1000.
pub fn default_centers(samples: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    let n = first.len();
    let mut mean = vec![0.0; n];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= samples.len() as f64);
    let mut centers = vec![vec![0.0; n], mean];
    if samples.len() <= 1000 {
        centers.extend(samples.iter().cloned());
    }
    centers
}

/// Largest empirical fraction of samples within distance `t` of a center.
///
/// The true concentration function takes the supremum over all of `R^n`,
/// so this is a lower bound for it.
pub fn levy_concentration(samples: &[Vec<f64>], t: f64, centers: &[Vec<f64>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    if centers.is_empty() {
        return Err(Error::Empty("centers"));
    }
    if !(t >= 0.0) {
        return Err(Error::param("t", format!("{t} is negative")));
    }
    let n = samples[0].len();
    if let Some(bad) = samples.iter().chain(centers).find(|s| s.len() != n) {
        return Err(Error::Shape(format!("expected length {n}, found {}", bad.len())));
    }
    let t2 = t * t;
    let best = centers
        .iter()
        .map(|c| {
            samples
                .iter()
                .filter(|s| s.iter().zip(c).map(|(x, y)| (x - y).powi(2)).sum::<f64>() <= t2)
                .count()
        })
        .max()
        .unwrap_or(0);
    Ok(best as f64 / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use crate::ensemble::{sample_column, DistributionSpec, RngHandle};
    use crate::harness::wilson_interval;

    #[test]
    fn torus_examples() {
        assert!((torus_norm(&[0.5, 0.5]) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(torus_norm(&[3.0, -7.0, 0.0]), 0.0);
        assert!((torus_norm(&[1.25, -0.75]) - 0.125f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sparse_examples() {
        let mut e1 = vec![0.0; 5];
        e1[0] = 1.0;
        assert_eq!(sparse_distance(&e1, 0.2).unwrap(), 0.0);
        assert!(compressibility(&e1, 0.2, 0.0).unwrap().1);
        let flat = vec![0.5; 4];
        assert!((sparse_distance(&flat, 0.5).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        // floor(delta n) = 0 keeps nothing
        assert_eq!(sparse_distance(&flat, 0.1).unwrap(), 1.0);
        assert!(sparse_distance(&flat, 0.0).is_err());
        assert!(sparse_distance(&flat, 1.5).is_err());
        assert_eq!(sparse_distance(&flat, 1.0).unwrap(), 0.0);
    }

    // brute force over all supports of size k
    fn sparse_oracle(v: &[f64], k: usize) -> f64 {
        let n = v.len();
        let total: f64 = v.iter().map(|x| x * x).sum();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let kept: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i] * v[i]).sum();
            best = best.min((total - kept).max(0.0));
        }
        best.sqrt()
    }

    #[test]
    fn sparse_matches_subset_enumeration() {
        let root = RngHandle::new(5);
        for r in 0..100 {
            let mut v = sample_column(10, &DistributionSpec::gaussian(), &mut root.child(r).stream());
            let nv = norm2(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            for k in 1..=10 {
                let got = sparse_distance(&v, k as f64 / 10.0).unwrap();
                assert!((got - sparse_oracle(&v, k)).abs() < 1e-7, "k = {k}");
            }
        }
    }

    #[test]
    fn sine_examples() {
        assert_eq!(sine_angle(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(sine_angle(&[0.3, -2.0], &[0.3, -2.0]).unwrap(), 0.0);
        let s = 0.5f64.sqrt();
        assert!((sine_angle(&[1.0, 0.0], &[s, s]).unwrap() - s).abs() < 1e-15);
        assert!(sine_angle(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(sine_angle(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn levy_examples() {
        let x = vec![vec![1.0, 2.0]; 10];
        assert_eq!(levy_concentration(&x, 0.0, &[vec![1.0, 2.0]]).unwrap(), 1.0);
        let distinct: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, 0.0]).collect();
        assert_eq!(levy_concentration(&distinct, 0.0, &[distinct[0].clone()]).unwrap(), 1.0 / 8.0);
        assert!(levy_concentration(&[], 1.0, &[vec![0.0]]).is_err());
        assert!(levy_concentration(&distinct, 1.0, &[]).is_err());

        let centers = default_centers(&distinct);
        assert_eq!(centers.len(), 10);
        assert_eq!(centers[1], vec![3.5, 0.0]);
    }

    #[test]
    fn levy_rademacher_pair() {
        let mut rng = RngHandle::new(12).stream();
        let spec = DistributionSpec::rademacher();
        let trials = 20_000u64;
        let samples: Vec<Vec<f64>> = (0..trials).map(|_| sample_column(2, &spec, &mut rng)).collect();
        let corners: Vec<Vec<f64>> = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
            .iter()
            .map(|&(a, b)| vec![a, b])
            .collect();
        let p = levy_concentration(&samples, 0.5, &corners).unwrap();
        // the max over four cells sits a little above 1/4; compare with its CI
        let k = (p * trials as f64).round() as u64;
        let (lo, _) = wilson_interval(k, trials, 3.3).unwrap();
        assert!(lo <= 0.25 && p < 0.27, "{p}");
    }

    fn unit(v: Vec<f64>) -> Vec<f64> {
        let n = norm2(&v);
        v.into_iter().map(|x| x / n).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn torus_invariants(
            v in prop::collection::vec(-50.0..50.0f64, 1..12),
            shift in prop::collection::vec(-20i32..20, 12),
            u in prop::collection::vec(-50.0..50.0f64, 12),
        ) {
            let n = v.len();
            let moved: Vec<f64> = v.iter().zip(&shift).map(|(x, &p)| x + p as f64).collect();
            prop_assert!((torus_norm(&moved) - torus_norm(&v)).abs() < 1e-10);
            let t = torus_norm(&v);
            prop_assert!(t <= norm2(&v) + 1e-12);
            prop_assert!(t <= (n as f64).sqrt() / 2.0 + 1e-12);
            let u = &u[..n];
            let diff: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
            prop_assert!((torus_norm(u) - t).abs() <= norm2(&diff) + 1e-10);
        }

        #[test]
        fn sparse_distance_monotone(
            v in prop::collection::vec(-1.0..1.0f64, 1..16),
            d1 in 0.01..=1.0f64,
            d2 in 0.01..=1.0f64,
        ) {
            prop_assume!(norm2(&v) > 1e-6);
            let v = unit(v);
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(sparse_distance(&v, hi).unwrap() <= sparse_distance(&v, lo).unwrap() + 1e-15);
        }

        #[test]
        fn sparse_distance_zero_iff_sparse(
            v in prop::collection::vec(prop_oneof![Just(0.0), -1.0..1.0f64], 1..16),
            delta in 0.01..=1.0f64,
        ) {
            let keep = ((delta * v.len() as f64) + 1e-9).floor() as usize;
            let nonzero = v.iter().filter(|&&x| x != 0.0).count();
            prop_assert_eq!(sparse_distance(&v, delta).unwrap() == 0.0, nonzero <= keep);
        }

        #[test]
        fn sine_invariants(
            v in prop::collection::vec(-5.0..5.0f64, 2..10),
            w in prop::collection::vec(-5.0..5.0f64, 10),
            a in prop_oneof![-100.0..-0.01f64, 0.01..100.0f64],
            b in prop_oneof![-100.0..-0.01f64, 0.01..100.0f64],
        ) {
            let w = &w[..v.len()];
            prop_assume!(norm2(&v) > 1e-3 && norm2(w) > 1e-3);
            let s = sine_angle(&v, w).unwrap();
            prop_assert!((s - sine_angle(w, &v).unwrap()).abs() < 1e-12);
            let av: Vec<f64> = v.iter().map(|x| a * x).collect();
            let bw: Vec<f64> = w.iter().map(|x| b * x).collect();
            prop_assert!((s - sine_angle(&av, &bw).unwrap()).abs() < 1e-7);
            let colinear: Vec<f64> = v.iter().map(|x| b * x).collect();
            prop_assert!(sine_angle(&v, &colinear).unwrap() < 1e-6);
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
