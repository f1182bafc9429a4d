//! Spectral statistics laboratory for random symmetric (Wigner) matrices.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`ensemble`]: entry laws, matrix and vector samplers, and the
//!   splittable counter-based RNG that makes every experiment replayable.
//! * [`spectral`]: a dense symmetric eigensolver and every quantity derived
//!   from a spectrum (shifted resolvent singular values, norms, local counts,
//!   gaps, bounded-Lipschitz distance to the semicircle).
//! * [`arithmetic`]: torus norm, essential LCDs and their variants,
//!   compressibility, Lévy concentration and the threshold function.
//! * [`probes`]: Monte Carlo estimators with Wilson intervals.
//! * [`harness`]: plans, statistics, report files and the CLI driver.

pub mod arithmetic;
pub mod ensemble;
mod error;
mod stats;
pub mod harness;
pub mod probes;
pub mod spectral;

pub use error::{Error, Result};
