//! Helpers shared by the integration tests.

#![allow(dead_code)]

use cpdist::ALaw;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws from the stopped representation: N nonzero multipliers before the
/// first zero, with P(N = k) = p0 (1 - p0)^k, then A'_j ~ A | A > 0 and
/// X = 1 + Σ_{i ≤ N} A'_1 ⋯ A'_i.
pub struct StoppedSampler {
    p0: f64,
    /// CDF of A | A > 0 over 1..; index 0 holds P(A' ≤ 1).
    positive_cdf: Vec<f64>,
    rng: ChaCha8Rng,
}

impl StoppedSampler {
    pub fn new(law: &ALaw, seed: u64) -> Self {
        let p0 = law.pmf(0);
        let mut positive_cdf = Vec::new();
        let mut acc = 0.0;
        let mut k = 1u64;
        while acc < 1.0 - 1e-15 && k < 100_000 {
            acc += law.pmf(k) / (1.0 - p0);
            positive_cdf.push(acc);
            k += 1;
            if law.support_max().is_some_and(|m| k > m) {
                break;
            }
        }
        StoppedSampler {
            p0,
            positive_cdf,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn draw_positive(&mut self) -> u64 {
        let u: f64 = self.rng.gen();
        let idx = self.positive_cdf.partition_point(|&c| c < u);
        idx.min(self.positive_cdf.len() - 1) as u64 + 1
    }

    pub fn next_variate(&mut self) -> u64 {
        let mut n = 0u64;
        while !self.rng.gen_bool(self.p0) {
            n += 1;
        }
        let (mut s, mut q) = (1u64, 1u64);
        for _ in 0..n {
            q = q
                .checked_mul(self.draw_positive())
                .expect("product overflow");
            s = s.checked_add(q).expect("sum overflow");
        }
        s
    }

    pub fn sample(&mut self, count: usize) -> Vec<u64> {
        (0..count).map(|_| self.next_variate()).collect()
    }
}

/// Largest |p̂_n - p_n| / se_n over n ≤ `max_n`, where se_n is the binomial
/// standard error of the empirical frequency.
pub fn max_standardized_error(values: &[u64], probs: &[f64], max_n: usize) -> f64 {
    let mut counts = vec![0u64; max_n + 1];
    for &v in values {
        if (v as usize) <= max_n {
            counts[v as usize] += 1;
        }
    }
    let total = values.len() as f64;
    (1..=max_n)
        .map(|n| {
            let p = probs[n];
            let se = (p * (1.0 - p) / total).sqrt();
            let diff = (counts[n] as f64 / total - p).abs();
            if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Path of the Moby Dick text fetched by `scripts/fetch_moby_dick.sh`.
pub fn moby_dick_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/moby-dick.txt")
}
