//! Compound-product distributions: the law of the solution of `X = AX + 1`
//! for a non-negative integer multiplier `A` with `P(A = 0) > 0`.
//!
//! The density is computed on `{1, 2, ...}` by a divisor recursion, moments by
//! a binomial-expansion recursion, and parameters are fitted by the method of
//! moments or maximum likelihood.

pub mod alaw;
pub mod bench;
pub mod cli;
pub mod density;
pub mod divisors;
pub mod error;
pub mod estimate;
pub mod ingest;
pub mod moments;
pub mod optimize;
pub mod sampler;

pub use alaw::{ALaw, Family, LawParams};
pub use density::{cp_density, cp_density_bruteforce, CpDensity, DensityEngine, DensityOptions};
pub use divisors::DivisorSieve;
pub use error::{Error, Result};
pub use estimate::{FitResult, FrequencyDataset};
pub use moments::{Moment, MomentReport};
pub use sampler::{SampleConfig, Sampler};

/// Formats a double with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}
