//! Exact variates of X by simulating the product chain
//! `X = 1 + A₁ + A₁A₂ + ...` until the first zero draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alaw::ALaw;
use crate::error::{Error, Result};

/// What to do when a partial sum or product leaves the 64-bit range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverflowPolicy {
    Error,
    /// Emit `u64::MAX` for the offending variate.
    Saturate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    /// Maximum number of draws of `A` per variate.
    pub max_steps: u64,
    pub overflow_policy: OverflowPolicy,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            max_steps: 1_000_000,
            overflow_policy: OverflowPolicy::Error,
        }
    }
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig {
            seed,
            ..Default::default()
        }
    }
}

// Past this many cached cdf entries, inversion stops extending the table.
const MAX_CDF_LEN: usize = 1 << 20;

/// Owns its RNG stream; use one sampler per thread.
#[derive(Debug, Clone)]
pub struct Sampler {
    law: ALaw,
    config: SampleConfig,
    rng: ChaCha8Rng,
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(law: ALaw, config: SampleConfig) -> Result<Self> {
        if config.max_steps == 0 {
            return Err(Error::ParameterDomain("max_steps must be >= 1".into()));
        }
        let mut sampler = Sampler {
            law,
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            cdf: Vec::new(),
        };
        sampler.extend_cdf(64);
        Ok(sampler)
    }

    pub fn law(&self) -> &ALaw {
        &self.law
    }

    fn extend_cdf(&mut self, len: usize) {
        let mut acc = self.cdf.last().copied().unwrap_or(0.0);
        for k in self.cdf.len()..len {
            acc += self.law.pmf(k as u64);
            self.cdf.push(acc.min(1.0));
        }
    }

    /// One draw of `A` by inversion with a sequential search of the cdf.
    pub fn draw_a(&mut self) -> u64 {
        let u: f64 = self.rng.gen();
        let mut k = 0usize;
        loop {
            if k == self.cdf.len() {
                let support_end = self.law.support_max().is_some_and(|max| k as u64 > max);
                if support_end || k >= MAX_CDF_LEN {
                    // u landed in the rounding gap above the computed cdf
                    return (k - 1) as u64;
                }
                self.extend_cdf((2 * k).min(MAX_CDF_LEN));
            }
            if u < self.cdf[k] {
                return k as u64;
            }
            k += 1;
        }
    }

    /// One variate of X.
    pub fn next_variate(&mut self) -> Result<u64> {
        let mut sum: u64 = 1;
        let mut product: u64 = 1;
        for _ in 0..self.config.max_steps {
            let a = self.draw_a();
            if a == 0 {
                return Ok(sum);
            }
            match product
                .checked_mul(a)
                .and_then(|q| sum.checked_add(q).map(|s| (q, s)))
            {
                Some((q, s)) => {
                    product = q;
                    sum = s;
                }
                None => {
                    return match self.config.overflow_policy {
                        OverflowPolicy::Error => Err(Error::Overflow),
                        OverflowPolicy::Saturate => Ok(u64::MAX),
                    }
                }
            }
        }
        Err(Error::NonTermination(self.config.max_steps))
    }

    pub fn sample(&mut self, count: usize) -> Result<Vec<u64>> {
        (0..count).map(|_| self.next_variate()).collect()
    }
}

/// `count` variates of X from a fresh stream seeded by `config.seed`.
pub fn sample(law: &ALaw, config: SampleConfig, count: usize) -> Result<Vec<u64>> {
    Sampler::new(*law, config)?.sample(count)
}
