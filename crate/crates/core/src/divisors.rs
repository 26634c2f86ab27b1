//! Smallest-prime-factor sieve and divisor enumeration.

use crate::error::{Error, Result};

/// Largest supported sieve limit.
pub const MAX_SIEVE_LIMIT: usize = 1 << 31;

/// `spf[m]` is the smallest prime factor of `m`, with `spf[1] = 1`.
#[derive(Debug, Clone)]
pub struct DivisorSieve {
    spf: Vec<u32>,
}

impl DivisorSieve {
    pub fn build(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::ParameterDomain("sieve limit must be >= 1".into()));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}"
            )));
        }
        let mut spf: Vec<u32> = Vec::new();
        spf.try_reserve_exact(limit + 1)
            .map_err(|e| Error::Resource(format!("sieve of size {limit}: {e}")))?;
        spf.resize(limit + 1, 0);
        spf[1] = 1;
        for i in 2..=limit {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            let mut j = i.saturating_mul(i);
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        Ok(DivisorSieve { spf })
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn smallest_prime_factor(&self, m: usize) -> Result<u32> {
        self.check(m)?;
        Ok(self.spf[m])
    }

    fn check(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.limit() {
            return Err(Error::OutOfRange {
                what: "argument",
                value: m as u64,
                limit: self.limit() as u64,
            });
        }
        Ok(())
    }

    /// Prime factorization of `m` as `(prime, exponent)` pairs, primes ascending.
    pub fn factorize(&self, m: usize) -> Result<Vec<(u32, u32)>> {
        self.check(m)?;
        let mut out = Vec::new();
        self.factorize_into(m, &mut out);
        Ok(out)
    }

    fn factorize_into(&self, mut m: usize, out: &mut Vec<(u32, u32)>) {
        out.clear();
        while m > 1 {
            let p = self.spf[m];
            let mut exp = 0;
            while m.is_multiple_of(p as usize) {
                m /= p as usize;
                exp += 1;
            }
            out.push((p, exp));
        }
    }

    /// d(m) = (a₁+1)···(a_r+1) for m = z₁^a₁···z_r^a_r.
    pub fn divisor_count(&self, m: usize) -> Result<u64> {
        Ok(self
            .factorize(m)?
            .iter()
            .map(|&(_, a)| a as u64 + 1)
            .product())
    }

    /// Every ordered pair `(i, j)` with `i * j == m`, ascending in `i`.
    pub fn factor_pairs(&self, m: usize) -> Result<Vec<(u32, u32)>> {
        self.check(m)?;
        let mut scratch = DivisorScratch::default();
        self.divisors_into(m, &mut scratch);
        Ok(scratch
            .divisors
            .iter()
            .map(|&i| (i, (m / i as usize) as u32))
            .collect())
    }

    /// Fills `scratch.divisors` with the divisors of `m` in ascending order.
    /// `m` must be in `1..=limit`.
    pub(crate) fn divisors_into(&self, m: usize, scratch: &mut DivisorScratch) {
        debug_assert!(m >= 1 && m <= self.limit());
        self.factorize_into(m, &mut scratch.factors);
        let divisors = &mut scratch.divisors;
        divisors.clear();
        divisors.push(1);
        for &(p, a) in &scratch.factors {
            let base_len = divisors.len();
            let mut power = 1u32;
            for _ in 0..a {
                power *= p;
                for idx in 0..base_len {
                    divisors.push(divisors[idx] * power);
                }
            }
        }
        divisors.sort_unstable();
    }
}

/// Reusable buffers for divisor generation inside hot loops.
#[derive(Debug, Default)]
pub(crate) struct DivisorScratch {
    factors: Vec<(u32, u32)>,
    pub(crate) divisors: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division_divisors(m: usize) -> Vec<u32> {
        (1..=m)
            .filter(|i| m.is_multiple_of(*i))
            .map(|i| i as u32)
            .collect()
    }

    #[test]
    fn spf_up_to_ten() {
        let sieve = DivisorSieve::build(10).unwrap();
        let spf: Vec<u32> = (1..=10)
            .map(|m| sieve.smallest_prime_factor(m).unwrap())
            .collect();
        assert_eq!(spf, vec![1, 2, 3, 2, 5, 2, 7, 2, 3, 2]);
    }

    #[test]
    fn degenerate_limit() {
        let sieve = DivisorSieve::build(1).unwrap();
        assert_eq!(sieve.limit(), 1);
        assert_eq!(sieve.smallest_prime_factor(1).unwrap(), 1);
        assert_eq!(sieve.factor_pairs(1).unwrap(), vec![(1, 1)]);
        assert!(DivisorSieve::build(0).is_err());
    }

    #[test]
    fn divisor_count_of_twelve() {
        let sieve = DivisorSieve::build(12).unwrap();
        assert_eq!(sieve.factorize(12).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(sieve.divisor_count(12).unwrap(), 6);
        assert_eq!(sieve.factor_pairs(12).unwrap().len(), 6);
    }

    #[test]
    fn pairs_of_four() {
        let sieve = DivisorSieve::build(4).unwrap();
        assert_eq!(sieve.factor_pairs(4).unwrap(), vec![(1, 4), (2, 2), (4, 1)]);
    }

    #[test]
    fn out_of_range() {
        let sieve = DivisorSieve::build(10).unwrap();
        assert!(matches!(
            sieve.factor_pairs(11),
            Err(Error::OutOfRange { .. })
        ));
        assert!(sieve.factor_pairs(0).is_err());
    }

    #[test]
    fn matches_trial_division_to_ten_thousand() {
        let sieve = DivisorSieve::build(10_000).unwrap();
        for m in 1..=10_000 {
            let pairs = sieve.factor_pairs(m).unwrap();
            let expected = trial_division_divisors(m);
            let firsts: Vec<u32> = pairs.iter().map(|p| p.0).collect();
            assert_eq!(firsts, expected, "m={m}");
            assert!(pairs.iter().all(|&(i, j)| (i as usize) * (j as usize) == m));
            assert_eq!(sieve.divisor_count(m).unwrap(), expected.len() as u64);
        }
    }

    proptest! {
        #[test]
        fn spf_is_smallest_prime_divisor(m in 2usize..50_000) {
            let sieve = DivisorSieve::build(m).unwrap();
            let p = sieve.smallest_prime_factor(m).unwrap() as usize;
            prop_assert_eq!(m % p, 0);
            prop_assert!((2..p).all(|d| !p.is_multiple_of(d)));
            prop_assert!((2..p).all(|d| m % d != 0));
        }
    }
}
