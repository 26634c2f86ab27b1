//! Density of X on {1, 2, ...} through the divisor recursion
//!
//! P(X = 1) = P(A = 0),   P(X = n) = Σ_{i·j = n-1} P(A = i) P(X = j),
//!
//! plus an exhaustive product-chain enumeration used as an oracle.

use std::io::Write;

use serde::Serialize;

use crate::alaw::ALaw;
use crate::divisors::{DivisorScratch, DivisorSieve};
use crate::error::{Error, Result};
use crate::format_f64;

/// Default cap on the density limit, bounding memory at roughly 1.2 GB.
pub const DEFAULT_MAX_LIMIT: usize = 100_000_000;

/// Largest limit accepted by the brute-force enumeration.
pub const BRUTEFORCE_MAX_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    pub max_limit: usize,
    /// Kahan summation of the per-n divisor sums.
    pub compensated: bool,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            max_limit: DEFAULT_MAX_LIMIT,
            compensated: cfg!(feature = "compensated"),
        }
    }
}

/// P(X = n) for n = 1..=limit.
#[derive(Debug, Clone, PartialEq)]
pub struct CpDensity {
    law: ALaw,
    /// `probs[n] = P(X = n)`; `probs[0]` is unused and zero.
    probs: Vec<f64>,
    pair_visits: u64,
}

impl CpDensity {
    pub fn law(&self) -> &ALaw {
        &self.law
    }

    pub fn limit(&self) -> usize {
        self.probs.len() - 1
    }

    /// Indexed by support value; entry 0 is always zero.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// P(X = n), or zero outside `1..=limit`.
    pub fn prob(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Number of (i, j) factor pairs visited by the recursion; zero for
    /// densities built by enumeration.
    pub fn pair_visits(&self) -> u64 {
        self.pair_visits
    }

    /// 1 - Σ_{n ≤ limit} P(X = n), clamped at zero.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.probs.iter().sum::<f64>()).max(0.0)
    }

    /// Σ n^m P(X = n) over the computed range.
    pub fn truncated_moment(&self, m: u32) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, p)| (n as f64).powi(m as i32) * p)
            .sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,prob")?;
        for (n, p) in self.probs.iter().enumerate().skip(1) {
            writeln!(out, "{n},{}", format_f64(*p))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct DensityJson<'a> {
            #[serde(flatten)]
            law: &'a ALaw,
            limit: usize,
            tail_mass: f64,
            probs: &'a [f64],
        }
        serde_json::to_value(DensityJson {
            law: &self.law,
            limit: self.limit(),
            tail_mass: self.tail_mass(),
            probs: &self.probs[1..],
        })
        .expect("density serializes")
    }
}

/// Holds a divisor sieve so repeated density evaluations (as in likelihood
/// optimization) share the factorization work.
#[derive(Debug, Clone)]
pub struct DensityEngine {
    sieve: DivisorSieve,
    options: DensityOptions,
}

impl DensityEngine {
    pub fn new(limit: usize) -> Result<Self> {
        Self::with_options(limit, DensityOptions::default())
    }

    pub fn with_options(limit: usize, options: DensityOptions) -> Result<Self> {
        check_limit(limit, &options)?;
        // The recursion factors n - 1 for n ≤ limit.
        let sieve = DivisorSieve::build(limit.max(2) - 1)?;
        Ok(DensityEngine { sieve, options })
    }

    /// Largest density limit this engine can serve.
    pub fn capacity(&self) -> usize {
        self.sieve.limit() + 1
    }

    pub fn density(&self, law: &ALaw, limit: usize) -> Result<CpDensity> {
        let pmf = law.pmf_table(limit);
        let (probs, pair_visits) = self.density_from_pmf(&pmf, limit)?;
        Ok(CpDensity {
            law: *law,
            probs,
            pair_visits,
        })
    }

    /// Runs the recursion for an arbitrary pmf of `A` given as
    /// `pmf[k] = P(A = k)`. Entries past the end of `pmf` are taken as zero.
    /// Returns the density vector (indexed by support value) and the number
    /// of factor pairs visited.
    pub fn density_from_pmf(&self, pmf: &[f64], limit: usize) -> Result<(Vec<f64>, u64)> {
        check_limit(limit, &self.options)?;
        if limit > self.capacity() {
            return Err(Error::OutOfRange {
                what: "density limit",
                value: limit as u64,
                limit: self.capacity() as u64,
            });
        }
        let p0 = pmf.first().copied().unwrap_or(0.0);
        let mut probs: Vec<f64> = Vec::new();
        probs
            .try_reserve_exact(limit + 1)
            .map_err(|e| Error::Resource(format!("density of size {limit}: {e}")))?;
        probs.resize(limit + 1, 0.0);
        probs[1] = p0;

        let mut scratch = DivisorScratch::default();
        let mut visits = 0u64;
        for n in 2..=limit {
            let m = n - 1;
            self.sieve.divisors_into(m, &mut scratch);
            visits += scratch.divisors.len() as u64;
            let terms = scratch.divisors.iter().map(|&i| {
                let i = i as usize;
                pmf.get(i).copied().unwrap_or(0.0) * probs[m / i]
            });
            probs[n] = if self.options.compensated {
                kahan_sum(terms)
            } else {
                terms.sum()
            };
        }
        Ok((probs, visits))
    }
}

fn check_limit(limit: usize, options: &DensityOptions) -> Result<()> {
    if limit == 0 {
        return Err(Error::ParameterDomain("density limit must be >= 1".into()));
    }
    if limit > options.max_limit {
        return Err(Error::Resource(format!(
            "density limit {limit} exceeds configured maximum {}",
            options.max_limit
        )));
    }
    Ok(())
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// P(X = n) for n = 1..=limit by the divisor recursion.
pub fn cp_density(law: &ALaw, limit: usize) -> Result<CpDensity> {
    DensityEngine::new(limit)?.density(law, limit)
}

pub fn cp_density_with(law: &ALaw, limit: usize, options: DensityOptions) -> Result<CpDensity> {
    DensityEngine::with_options(limit, options)?.density(law, limit)
}

/// Exhaustive enumeration of the terminating product chains
/// `X = 1 + a₁ + a₁a₂ + ...` stopped at the first zero draw.
/// Cost is exponential in `limit`, which is capped at [`BRUTEFORCE_MAX_LIMIT`].
pub fn cp_density_bruteforce(law: &ALaw, limit: usize) -> Result<CpDensity> {
    bruteforce_with_count(law, limit).map(|(density, _)| density)
}

/// Like [`cp_density_bruteforce`], also returning the number of chains
/// (terminated sequences) enumerated.
pub fn bruteforce_with_count(law: &ALaw, limit: usize) -> Result<(CpDensity, u64)> {
    if limit == 0 {
        return Err(Error::ParameterDomain("density limit must be >= 1".into()));
    }
    if limit > BRUTEFORCE_MAX_LIMIT {
        return Err(Error::CostGuard {
            limit,
            max: BRUTEFORCE_MAX_LIMIT,
        });
    }
    let pmf = law.pmf_table(limit);
    let p0 = pmf[0];
    let mut probs = vec![0.0; limit + 1];
    let mut chains = 0u64;

    // (partial sum s, last product q, probability of the non-zero draws so far)
    let mut stack = vec![(1usize, 1usize, 1.0f64)];
    while let Some((s, q, weight)) = stack.pop() {
        probs[s] += weight * p0;
        chains += 1;
        for (a, &pa) in pmf.iter().enumerate().skip(1) {
            let next_q = q * a;
            if s + next_q > limit {
                break;
            }
            stack.push((s + next_q, next_q, weight * pa));
        }
    }
    Ok((
        CpDensity {
            law: *law,
            probs,
            pair_visits: 0,
        },
        chains,
    ))
}
