//! Brute-force oracles for the arithmetic kernels and the property suite.
//!
//! Every oracle is written from the definitions, not from the library code:
//! torus norms by enumerating floor/ceil roundings, sparse distances by
//! enumerating supports, LCDs by the exact piecewise-quadratic description
//! of their satisfying sets, and tuple LCDs by a scan 16 times finer than
//! the library's.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;
use rand_distr::StandardNormal;

use rmtlab::arithmetic::{
    lcd, lcd_pair_combination, sine_angle, sparse_distance, subvector_lcd, torus_norm, tuple_lcd, LcdQuery,
    PairLcdQuery, SubsetMode, TupleLcdQuery,
};
use rmtlab::ensemble::{RngHandle, StreamRng};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// `min over p in Z^n of ||v - p||`, trying floor and ceiling per coordinate.
pub fn torus_brute(v: &[f64]) -> f64 {
    let n = v.len();
    (0u32..1 << n)
        .map(|mask| {
            v.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let p = if mask >> i & 1 == 1 { x.ceil() } else { x.floor() };
                    (x - p).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `min over |S| = floor(delta n) of ||v - v_S||` by enumerating supports.
pub fn sparse_brute(v: &[f64], delta: f64) -> f64 {
    let n = v.len();
    let keep = (delta * n as f64 + 1e-9).floor() as u32;
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() == keep)
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 0)
                .map(|i| v[i] * v[i])
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Exact satisfying set of `||phi u||_T <= min(gamma phi, sqrt(alpha n))` on
/// `(0, phi_max]`, as sorted closed intervals. Between consecutive points
/// where some `phi u_i` is a half-integer the nearest lattice point is fixed
/// and both sides are quadratic in `phi`.
pub fn lcd_intervals(u: &[f64], alpha: f64, gamma: f64, phi_max: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0, phi_max];
    for &x in u {
        let a = x.abs();
        if a == 0.0 {
            continue;
        }
        let mut m = 0.5;
        while m / a < phi_max {
            cuts.push(m / a);
            m += 1.0;
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let cap = alpha * u.len() as f64;
    // roots of a x^2 - 2 b x + c <= 0, a > 0
    let solve = |a: f64, b: f64, c: f64| -> Option<(f64, f64)> {
        let disc = b * b - a * c;
        (disc >= 0.0).then(|| ((b - disc.sqrt()) / a, (b + disc.sqrt()) / a))
    };
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let p: Vec<f64> = u.iter().map(|x| (mid * x).round()).collect();
        let b: f64 = u.iter().zip(&p).map(|(x, q)| x * q).sum();
        let c: f64 = p.iter().map(|q| q * q).sum();
        let Some(r1) = solve(1.0 - gamma * gamma, b, c) else { continue };
        let Some(r2) = solve(1.0, b, c - cap) else { continue };
        let s = lo.max(r1.0).max(r2.0);
        let e = hi.min(r1.1).min(r2.1);
        if s <= e && e > 0.0 {
            // merge pieces that touch at a cut
            match out.last_mut() {
                Some(last) if s <= last.1 + 1e-12 => last.1 = last.1.max(e),
                _ => out.push((s.max(0.0), e)),
            }
        }
    }
    out
}

/// Bounds implied by the exact satisfying set: the infimum, and the start of
/// the first interval at least one resolution step wide (which a scan at
/// that resolution cannot miss).
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub inf: Option<f64>,
    pub wide: Option<f64>,
}

impl Bounds {
    fn of(intervals: &[(f64, f64)], res: f64) -> Self {
        Bounds {
            inf: intervals.first().map(|i| i.0),
            wide: intervals.iter().find(|i| i.1 - i.0 >= res).map(|i| i.0),
        }
    }

    fn min(self, other: Bounds) -> Bounds {
        let m = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Bounds {
            inf: m(self.inf, other.inf),
            wide: m(self.wide, other.wide),
        }
    }

    const EMPTY: Bounds = Bounds { inf: None, wide: None };

    /// A scan result agrees with the oracle when it is never below the
    /// infimum and never more than one step past the first wide interval.
    fn check(&self, satisfied: bool, value: f64, res: f64) -> Result<(), String> {
        match (satisfied, self.inf, self.wide) {
            (true, Some(inf), wide) => {
                if value < inf - 1e-9 {
                    return Err(format!("value {value} below the exact infimum {inf}"));
                }
                if let Some(w) = wide {
                    if value > w + res + 1e-9 {
                        return Err(format!("value {value} more than one step past {w}"));
                    }
                }
                Ok(())
            }
            (true, None, _) => Err(format!("value {value} reported but the condition never holds")),
            (false, _, Some(w)) => Err(format!("missed the interval starting at {w}")),
            (false, _, None) => Ok(()),
        }
    }
}

fn random_vector(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    loop {
        // half of the instances have an integer direction, so that the
        // condition holds early
        let v: Vec<f64> = if rng.random::<bool>() {
            (0..n).map(|_| rng.random_range(-3i32..=3) as f64).collect()
        } else {
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        if norm(&v) > 1e-3 {
            return v;
        }
    }
}

/// Pair-combination oracle over the same direction set as the library.
fn pair_bounds(vi: &[f64], wi: &[f64], q: &PairLcdQuery) -> (bool, Bounds) {
    let mut admissible = false;
    let mut b = Bounds::EMPTY;
    for j in 0..q.angles {
        let psi = PI * j as f64 / q.angles as f64;
        let u: Vec<f64> = vi.iter().zip(wi).map(|(a, c)| psi.cos() * a + psi.sin() * c).collect();
        let nu = norm(&u);
        if nu == 0.0 || q.theta_max * nu < 1.0 {
            continue;
        }
        admissible = true;
        let iv = lcd_intervals(&unit(&u), q.lcd.alpha, q.lcd.gamma, q.lcd.phi_max);
        b = b.min(Bounds::of(&iv, q.lcd.resolution));
    }
    (admissible, b)
}

fn subsets_at_least(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, m: usize) {
        if cur.len() >= m {
            out.push(cur.clone());
        }
        for i in start..n {
            cur.push(i);
            rec(n, i + 1, cur, out, m);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut Vec::new(), &mut out, m.max(1));
    out
}

/// First satisfied radius along `dir` on the fine grid, and whether the
/// satisfied stretch starting there is at least `res` long; plus the first
/// stretch that is.
fn tuple_fine(ys: &[Vec<f64>], dir: &[f64], q: &TupleLcdQuery, h: f64) -> Bounds {
    let holds = |r: f64| {
        let d = ys[0].len();
        let mut s = vec![0.0; d];
        for (y, &c) in ys.iter().zip(dir) {
            for (si, yi) in s.iter_mut().zip(y) {
                *si += c * r * yi;
            }
        }
        let weighted: f64 = dir.iter().zip(&q.t).map(|(c, t)| (c * r / t).powi(2)).sum();
        let arg = q.alpha * weighted.sqrt() / q.l;
        let rhs = if arg > 1.0 { q.l * arg.ln().sqrt() } else { 0.0 };
        let torus: f64 = s.iter().map(|x| (x - x.round()).powi(2)).sum::<f64>().sqrt();
        torus <= rhs + 1e-12
    };
    let steps = (q.theta_max / h).floor() as u64;
    let per_step = (q.resolution / h).round() as u64;
    let mut inf = None;
    let mut run_start: Option<u64> = None;
    for k in 1..=steps {
        if holds(k as f64 * h) {
            inf.get_or_insert(k as f64 * h);
            let s = *run_start.get_or_insert(k);
            if k - s >= per_step {
                return Bounds {
                    inf,
                    wide: Some(s as f64 * h),
                };
            }
        } else {
            run_start = None;
        }
    }
    Bounds { inf, wide: None }
}

#[derive(Debug, Default)]
pub struct SuiteReport {
    /// (kernel, instances checked)
    pub counts: Vec<(&'static str, usize)>,
    /// (kernel, instances where the LCD condition was met)
    pub satisfied: Vec<(&'static str, usize)>,
}

/// Compares every arithmetic kernel with its oracle on `per_kernel` random
/// instances with `n <= 8`.
pub fn oracle_suite(per_kernel: usize, seed: u64) -> Result<SuiteReport, String> {
    let root = RngHandle::new(seed);
    let mut report = SuiteReport::default();

    let mut rng = root.named("torus").stream();
    for i in 0..per_kernel {
        let n = 1 + i % 8;
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let (a, b) = (torus_norm(&v), torus_brute(&v));
        if (a - b).abs() > 1e-12 {
            return Err(format!("torus_norm({v:?}) = {a}, oracle {b}"));
        }
    }
    report.counts.push(("torus_norm", per_kernel));

    let mut rng = root.named("sparse").stream();
    for i in 0..per_kernel {
        let n = 1 + i % 8;
        let v: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random_range(-1.0..1.0) })
            .collect();
        let delta = [0.1, 0.25, 0.4, 0.5, 0.75, 1.0][i % 6];
        let (a, b) = (sparse_distance(&v, delta).map_err(|e| e.to_string())?, sparse_brute(&v, delta));
        if (a - b).abs() > 1e-12 {
            return Err(format!("sparse_distance({v:?}, {delta}) = {a}, oracle {b}"));
        }
    }
    report.counts.push(("sparse_distance", per_kernel));

    let mut rng = root.named("lcd").stream();
    let mut hits = 0;
    for i in 0..per_kernel {
        let n = 1 + i % 8;
        let u = unit(&random_vector(&mut rng, n));
        let q = LcdQuery::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95), 40.0, 0.01)
            .map_err(|e| e.to_string())?;
        let r = lcd(&u, &q).map_err(|e| e.to_string())?;
        let b = Bounds::of(&lcd_intervals(&u, q.alpha, q.gamma, q.phi_max), q.resolution);
        b.check(r.satisfied, r.value, q.resolution)
            .map_err(|e| format!("lcd({u:?}, {q:?}): {e}"))?;
        hits += r.satisfied as usize;
    }
    report.counts.push(("lcd", per_kernel));
    report.satisfied.push(("lcd", hits));

    let mut rng = root.named("pair").stream();
    let mut hits = 0;
    for i in 0..per_kernel {
        let n = 2 + i % 7;
        let v = random_vector(&mut rng, n);
        let w = random_vector(&mut rng, n);
        let index: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.8).collect();
        if index.is_empty() {
            continue;
        }
        let lq = LcdQuery::new(rng.random_range(0.1..0.9), rng.random_range(0.05..0.5), 20.0, 0.01)
            .map_err(|e| e.to_string())?;
        // small caps leave no admissible direction
        let theta_max = [0.05, 0.5, 2.0, 50.0][i % 4];
        let q = PairLcdQuery::new(lq, theta_max).map_err(|e| e.to_string())?.with_angles(60);
        let r = lcd_pair_combination(&v, &w, &index, &q).map_err(|e| e.to_string())?;
        let vi: Vec<f64> = index.iter().map(|&k| v[k]).collect();
        let wi: Vec<f64> = index.iter().map(|&k| w[k]).collect();
        let (admissible, b) = pair_bounds(&vi, &wi, &q);
        let ctx = || format!("pair combination of {v:?}, {w:?} on {index:?}");
        if !admissible {
            if r.satisfied || r.value != theta_max {
                return Err(format!("{}: expected the theta cap, got {r:?}", ctx()));
            }
            continue;
        }
        b.check(r.satisfied, r.value, q.lcd.resolution).map_err(|e| format!("{}: {e}", ctx()))?;
        hits += r.satisfied as usize;
    }
    report.counts.push(("lcd_pair_combination", per_kernel));
    report.satisfied.push(("lcd_pair_combination", hits));

    let mut rng = root.named("subvector").stream();
    let mut hits = 0;
    for i in 0..per_kernel {
        let n = 2 + i % 4;
        let v = random_vector(&mut rng, n);
        let w = random_vector(&mut rng, n);
        let mu = [0.1, 0.15, 0.2, 0.3][i % 4];
        let lq = LcdQuery::new(0.5, rng.random_range(0.05..0.5), 20.0, 0.01).map_err(|e| e.to_string())?;
        let q = PairLcdQuery::new(lq, 10.0).map_err(|e| e.to_string())?.with_angles(24);
        let r = subvector_lcd(&v, &w, mu, &q, &SubsetMode::Exact).map_err(|e| e.to_string())?;
        let m = ((1.0 - 2.0 * mu) * n as f64).ceil() as usize;
        let mut b = Bounds::EMPTY;
        for s in subsets_at_least(n, m) {
            let vi: Vec<f64> = s.iter().map(|&k| v[k]).collect();
            let wi: Vec<f64> = s.iter().map(|&k| w[k]).collect();
            b = b.min(pair_bounds(&vi, &wi, &q).1);
        }
        b.check(r.result.satisfied, r.result.value, q.lcd.resolution)
            .map_err(|e| format!("subvector lcd of {v:?}, {w:?}, mu = {mu}: {e}"))?;
        if r.subset.len() < m {
            return Err(format!("subset {:?} smaller than {m}", r.subset));
        }
        hits += r.result.satisfied as usize;
    }
    report.counts.push(("subvector_lcd", per_kernel));
    report.satisfied.push(("subvector_lcd", hits));

    let mut rng = root.named("tuple").stream();
    let mut hits = 0;
    for i in 0..per_kernel {
        let ell = 1 + i % 2;
        let n = 1 + i % 4;
        let ys: Vec<Vec<f64>> = (0..ell)
            .map(|_| {
                let scale = rng.random_range(0.5..3.0);
                random_vector(&mut rng, n).iter().map(|x| x / scale).collect()
            })
            .collect();
        let t: Vec<f64> = (0..ell).map(|_| rng.random_range(0.2..1.0)).collect();
        let q = TupleLcdQuery::new(1.0, rng.random_range(0.2..0.9), t, 10.0, 0.01)
            .map_err(|e| e.to_string())?
            .with_angles(24);
        let r = tuple_lcd(&ys, &q).map_err(|e| e.to_string())?;
        let dirs: Vec<Vec<f64>> = if ell == 1 {
            vec![vec![1.0]]
        } else {
            (0..q.angles)
                .map(|j| {
                    let psi = PI * j as f64 / q.angles as f64;
                    vec![psi.cos(), psi.sin()]
                })
                .collect()
        };
        let h = q.resolution / 16.0;
        let b = dirs
            .iter()
            .map(|d| tuple_fine(&ys, d, &q, h))
            .fold(Bounds::EMPTY, Bounds::min);
        // the fine scan locates the infimum only up to its own step
        let b = Bounds {
            inf: b.inf.map(|x| x - h),
            wide: b.wide,
        };
        b.check(r.satisfied, r.value, q.resolution)
            .map_err(|e| format!("tuple lcd of {ys:?}: {e}"))?;
        hits += r.satisfied as usize;
    }
    report.counts.push(("tuple_lcd", per_kernel));
    report.satisfied.push(("tuple_lcd", hits));
    Ok(report)
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Every listed invariant of the arithmetic kernels, `cases` cases each.
pub fn property_suite(cases: u32) -> Result<Vec<&'static str>, String> {
    let mut done = Vec::new();

    runner(cases)
        .run(
            &(
                prop::collection::vec(-50.0..50.0f64, 1..9),
                prop::collection::vec(-20i32..20, 8),
                prop::collection::vec(-50.0..50.0f64, 8),
            ),
            |(v, shift, u)| {
                let n = v.len();
                let moved: Vec<f64> = v.iter().zip(&shift).map(|(x, &p)| x + p as f64).collect();
                let t = torus_norm(&v);
                prop_assert!((torus_norm(&moved) - t).abs() < 1e-10);
                prop_assert!(t <= norm(&v) + 1e-12 && t <= (n as f64).sqrt() / 2.0 + 1e-12);
                let u = &u[..n];
                let diff: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
                prop_assert!((torus_norm(u) - t).abs() <= norm(&diff) + 1e-10);
                Ok(())
            },
        )
        .map_err(|e| format!("torus invariants: {e}"))?;
    done.push("torus_norm periodic, bounded, 1-Lipschitz");

    runner(cases)
        .run(
            &(
                prop::collection::vec(-1.0..1.0f64, 1..8),
                0.05..0.95f64,
                0.05..0.95f64,
                0.05..0.95f64,
                0.05..0.95f64,
            ),
            |(raw, a1, a2, g1, g2)| {
                prop_assume!(norm(&raw) > 1e-3);
                let u = unit(&raw);
                let small = lcd(&u, &LcdQuery::new(a1.min(a2), g1.min(g2), 30.0, 0.01).unwrap()).unwrap();
                let big = lcd(&u, &LcdQuery::new(a1.max(a2), g1.max(g2), 30.0, 0.01).unwrap()).unwrap();
                prop_assert!(big.value <= small.value + 1e-12);
                Ok(())
            },
        )
        .map_err(|e| format!("lcd monotonicity: {e}"))?;
    done.push("lcd nonincreasing in alpha and gamma");

    runner(cases)
        .run(&(prop::collection::vec(-5i32..=5, 1..8), 0.05..0.95f64), |(y, gamma)| {
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let ny = norm(&y);
            prop_assume!(ny > 0.0);
            let q = LcdQuery::new(0.5, gamma, ny + 1.0, 0.001).unwrap();
            let r = lcd(&unit(&y), &q).unwrap();
            prop_assert!(r.satisfied && r.value <= ny + q.resolution);
            Ok(())
        })
        .map_err(|e| format!("lcd of integer directions: {e}"))?;
    done.push("lcd(y / ||y||) <= ||y|| for integer y");

    runner(cases)
        .run(
            &(prop::collection::vec(-1.0..1.0f64, 1..16), 0.01..=1.0f64, 0.01..=1.0f64),
            |(v, d1, d2)| {
                let (lo, hi) = (d1.min(d2), d1.max(d2));
                prop_assert!(sparse_distance(&v, hi).unwrap() <= sparse_distance(&v, lo).unwrap() + 1e-15);
                Ok(())
            },
        )
        .map_err(|e| format!("sparse monotonicity: {e}"))?;
    runner(cases)
        .run(
            &(
                prop::collection::vec(prop_oneof![Just(0.0), -1.0..1.0f64], 1..16),
                0.01..=1.0f64,
            ),
            |(v, delta)| {
                let keep = (delta * v.len() as f64 + 1e-9).floor() as usize;
                let nonzero = v.iter().filter(|&&x| x != 0.0).count();
                prop_assert_eq!(sparse_distance(&v, delta).unwrap() == 0.0, nonzero <= keep);
                Ok(())
            },
        )
        .map_err(|e| format!("sparse zero set: {e}"))?;
    done.push("sparse_distance nonincreasing, zero iff sparse");

    let nonzero = || prop_oneof![-100.0..-0.01f64, 0.01..100.0f64];
    runner(cases)
        .run(
            &(
                prop::collection::vec(-5.0..5.0f64, 2..10),
                prop::collection::vec(-5.0..5.0f64, 10),
                nonzero(),
                nonzero(),
            ),
            |(v, w, a, b)| {
                let w = &w[..v.len()];
                prop_assume!(norm(&v) > 1e-3 && norm(w) > 1e-3);
                let s = sine_angle(&v, w).unwrap();
                prop_assert!((s - sine_angle(w, &v).unwrap()).abs() < 1e-12);
                let av: Vec<f64> = v.iter().map(|x| a * x).collect();
                let bw: Vec<f64> = w.iter().map(|x| b * x).collect();
                prop_assert!((s - sine_angle(&av, &bw).unwrap()).abs() < 1e-7);
                let colinear: Vec<f64> = v.iter().map(|x| b * x).collect();
                prop_assert!(sine_angle(&v, &colinear).unwrap() < 1e-6);
                Ok(())
            },
        )
        .map_err(|e| format!("sine invariants: {e}"))?;
    done.push("sine_angle symmetric, scale invariant, 0 on colinear pairs");
    Ok(done)
}
