//! Oracles shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod arith;
pub mod eigen;
pub mod sign_law;

use statrs::distribution::{Beta, ContinuousCDF};

/// Exact (Clopper-Pearson) two-sided binomial interval at level `conf`.
pub fn clopper_pearson(successes: u64, trials: u64, conf: f64) -> (f64, f64) {
    let (k, n) = (successes as f64, trials as f64);
    let a = (1.0 - conf) / 2.0;
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).unwrap().inverse_cdf(a)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).unwrap().inverse_cdf(1.0 - a)
    };
    (lo, hi)
}

/// Path of a plan shipped with the crate.
pub fn plan_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("plans").join(format!("{name}.toml"))
}

pub const PLANS: [&str; 11] = [
    "smallball", "joint", "gaps", "linstat", "rigidity", "locallaw", "hw", "ilo", "deloc", "lcd", "tau",
];
