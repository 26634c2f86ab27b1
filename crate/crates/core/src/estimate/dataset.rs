use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Observed positive integers stored as value → count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyDataset {
    entries: BTreeMap<u64, u64>,
    total: u64,
}

impl FrequencyDataset {
    /// Builds a dataset from `(value, count)` pairs, summing duplicate values.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut total = 0u64;
        for (value, count) in pairs {
            if value == 0 {
                return Err(Error::ParameterDomain(
                    "observed values must be >= 1".into(),
                ));
            }
            if count == 0 {
                return Err(Error::ParameterDomain("counts must be >= 1".into()));
            }
            *entries.entry(value).or_insert(0) += count;
            total += count;
        }
        if total == 0 {
            return Err(Error::EmptyDataset("no observations".into()));
        }
        Ok(FrequencyDataset { entries, total })
    }

    /// Tallies raw observations.
    pub fn from_values(values: &[u64]) -> Result<Self> {
        Self::from_counts(values.iter().map(|&v| (v, 1)))
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_value(&self) -> u64 {
        *self.entries.keys().next_back().expect("non-empty dataset")
    }

    pub fn count(&self, value: u64) -> u64 {
        self.entries.get(&value).copied().unwrap_or(0)
    }

    /// `(value, count)` pairs in ascending value order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&v, &c)| (v, c))
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        Self::from_counts(self.iter().map(|(v, c)| (v, c * factor)))
    }

    /// First and second raw sample moments (μ′, μ′₂).
    pub fn sample_moments(&self) -> (f64, f64) {
        let n = self.total as f64;
        let (s1, s2) = self.iter().fold((0.0, 0.0), |(s1, s2), (v, c)| {
            let (v, c) = (v as f64, c as f64);
            (s1 + v * c, s2 + v * v * c)
        });
        (s1 / n, s2 / n)
    }
}
