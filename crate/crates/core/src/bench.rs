//! Timing harness for the density recursion and the brute-force enumeration.
//!
//! Wall time is machine dependent, so each row also carries a deterministic
//! work count: factor-pair visits for the recursion, enumerated chains for
//! the brute force.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::alaw::ALaw;
use crate::density::{bruteforce_with_count, DensityEngine};
use crate::error::{Error, Result};
use crate::format_f64;

const REPEATS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchMethod {
    Recursion,
    Bruteforce,
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Recursion => "recursion",
            BenchMethod::Bruteforce => "bruteforce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub limit: usize,
    /// Median wall time over three runs.
    pub seconds: f64,
    pub pair_visits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub method: BenchMethod,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> Result<()> {
        if header {
            writeln!(out, "limit,seconds,pair_visits,method")?;
        }
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                row.limit,
                format_f64(row.seconds),
                row.pair_visits,
                self.method.name()
            )?;
        }
        Ok(())
    }
}

fn check_limits(limits: &[usize]) -> Result<()> {
    if limits.is_empty() {
        return Err(Error::ParameterDomain("no limits given".into()));
    }
    if limits[0] == 0 || limits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ParameterDomain(
            "limits must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn median_time<F: FnMut() -> Result<u64>>(mut run: F) -> Result<(f64, u64)> {
    let mut times = Vec::with_capacity(REPEATS);
    let mut work = 0;
    for _ in 0..REPEATS {
        let start = Instant::now();
        work = run()?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok((times[REPEATS / 2], work))
}

/// Times the recursion at each limit, including sieve construction.
pub fn bench_density(law: &ALaw, limits: &[usize]) -> Result<BenchReport> {
    check_limits(limits)?;
    let rows = limits
        .iter()
        .map(|&limit| {
            let (seconds, pair_visits) = median_time(|| {
                let engine = DensityEngine::new(limit)?;
                Ok(engine.density(law, limit)?.pair_visits())
            })?;
            Ok(BenchRow {
                limit,
                seconds,
                pair_visits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        method: BenchMethod::Recursion,
        rows,
    })
}

/// Times the exhaustive chain enumeration at each limit.
pub fn bench_bruteforce(law: &ALaw, limits: &[usize]) -> Result<BenchReport> {
    check_limits(limits)?;
    let rows = limits
        .iter()
        .map(|&limit| {
            let (seconds, chains) = median_time(|| Ok(bruteforce_with_count(law, limit)?.1))?;
            Ok(BenchRow {
                limit,
                seconds,
                pair_visits: chains,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        method: BenchMethod::Bruteforce,
        rows,
    })
}

/// Σ_{m=1}^{limit-1} d(m) = Σ_i ⌊(limit-1)/i⌋, the pair-visit count of the
/// recursion at `limit`.
pub fn expected_pair_visits(limit: usize) -> u64 {
    let m = limit.saturating_sub(1) as u64;
    (1..=m).map(|i| m / i).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let law = ALaw::poisson(0.5).unwrap();
        let report = bench_density(&law, &[1]).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].pair_visits, 0);
    }

    #[test]
    fn visits_match_divisor_sums() {
        let law = ALaw::geometric(0.8).unwrap();
        let report = bench_density(&law, &[10, 100, 1000, 5000]).unwrap();
        for row in &report.rows {
            assert_eq!(row.pair_visits, expected_pair_visits(row.limit));
        }
    }

    #[test]
    fn rejects_unsorted_limits() {
        let law = ALaw::geometric(0.8).unwrap();
        assert!(bench_density(&law, &[100, 10]).is_err());
        assert!(bench_density(&law, &[10, 10]).is_err());
        assert!(bench_density(&law, &[]).is_err());
        assert!(bench_bruteforce(&law, &[4, 15]).is_err());
    }

    #[test]
    fn csv_rows() {
        let law = ALaw::poisson(0.5).unwrap();
        let report = bench_bruteforce(&law, &[3, 5]).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "limit,seconds,pair_visits,method");
        assert!(lines[1].starts_with("3,") && lines[1].ends_with(",bruteforce"));
        assert_eq!(lines.len(), 3);
    }
}
