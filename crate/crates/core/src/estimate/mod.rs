//! Parameter estimation: method of moments, maximum likelihood through the
//! density recursion, and AIC model comparison.

mod dataset;

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alaw::{ALaw, Family, LawParams};
use crate::density::DensityEngine;
use crate::error::{Error, Result};
use crate::optimize::grid_golden_max;

pub use dataset::FrequencyDataset;

/// Largest observed value accepted for likelihood evaluation.
pub const MAX_FIT_LIMIT: usize = 10_000_000;

/// Environment variable capping the threads used by the integer scan.
pub const THREADS_ENV: &str = "CPDIST_THREADS";

const POISSON_RANGE: (f64, f64) = (1e-9, 20.0);
const PROBABILITY_RANGE: (f64, f64) = (1e-9, 1.0 - 1e-9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mom,
    Mle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    /// Every observation equals 1 (sample mean ≤ 1).
    DegenerateData,
    /// The estimate sits on, or was clamped to, the edge of the parameter domain.
    Boundary,
    /// The integer scan peaked at its upper end while still improving.
    IntScanExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl FitParams {
    fn from_law(law: &ALaw) -> Self {
        match *law.params() {
            LawParams::Poisson { lambda } => FitParams {
                lambda: Some(lambda),
                ..Default::default()
            },
            LawParams::Binomial { n, p } => FitParams {
                n: Some(n),
                p: Some(p),
                ..Default::default()
            },
            LawParams::NegBinomial { r, p } => FitParams {
                r: Some(r),
                p: Some(p),
                ..Default::default()
            },
            LawParams::Geometric { p } => FitParams {
                p: Some(p),
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    pub method: Method,
    pub params: FitParams,
    pub loglik: Option<f64>,
    pub aic: Option<f64>,
    pub flags: Vec<FitFlag>,
}

impl FitResult {
    /// The fitted law, or `None` when the estimate lies outside the open
    /// parameter domain (degenerate data).
    pub fn law(&self) -> Option<ALaw> {
        let real = match self.family {
            Family::Poisson => self.params.lambda?,
            _ => self.params.p?,
        };
        let int = match self.family {
            Family::Binomial => self.params.n?,
            Family::NegBinomial => self.params.r?,
            _ => 0,
        };
        ALaw::from_family(self.family, int, real).ok()
    }

    pub fn has_flag(&self, flag: FitFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// Attaches the log-likelihood and AIC of this fit on `data`.
    pub fn with_likelihood(mut self, data: &FrequencyDataset) -> Result<Self> {
        let ll = match self.law() {
            Some(law) => loglik(data, &law)?,
            None => degenerate_loglik(data),
        };
        self.loglik = Some(ll);
        self.aic = Some(aic(ll, self.family.free_params()));
        Ok(self)
    }
}

/// Log-likelihood when `A = 0` almost surely, so that `X = 1`.
fn degenerate_loglik(data: &FrequencyDataset) -> f64 {
    if data.max_value() == 1 {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

/// 2k - 2·loglik.
pub fn aic(loglik: f64, k: u32) -> f64 {
    2.0 * k as f64 - 2.0 * loglik
}

/// (μ′, μ′₂), the first two raw sample moments.
pub fn sample_moments(data: &FrequencyDataset) -> (f64, f64) {
    data.sample_moments()
}

/// Method-of-moments estimates. Integer parameters are rounded to the nearest
/// positive integer and `p` is then re-solved from the mean equation.
pub fn mom_fit(data: &FrequencyDataset, family: Family) -> Result<FitResult> {
    let (mu, mu2) = data.sample_moments();
    let mut flags = Vec::new();

    if mu <= 1.0 {
        let params = match family {
            Family::Poisson => FitParams {
                lambda: Some(0.0),
                ..Default::default()
            },
            Family::Binomial => FitParams {
                n: Some(1),
                p: Some(0.0),
                ..Default::default()
            },
            Family::NegBinomial => FitParams {
                r: Some(1),
                p: Some(1.0),
                ..Default::default()
            },
            Family::Geometric => FitParams {
                p: Some(1.0),
                ..Default::default()
            },
        };
        return Ok(FitResult {
            family,
            method: Method::Mom,
            params,
            loglik: None,
            aic: None,
            flags: vec![FitFlag::DegenerateData, FitFlag::Boundary],
        });
    }

    // Shared denominator of the two-parameter estimators.
    let shared = (2.0 * mu - 1.0) * mu * mu + (mu * mu - 3.0 * mu + 1.0) * mu2;
    let mut round_positive = |raw: f64, what: &str| -> Result<u32> {
        if !raw.is_finite() || raw <= 0.0 {
            return Err(Error::MomentCondition(format!(
                "{what} estimate {raw} is not a positive finite number"
            )));
        }
        let rounded = raw.round();
        if rounded < 1.0 {
            flags.push(FitFlag::Boundary);
            return Ok(1);
        }
        u32::try_from(rounded as u64)
            .map_err(|_| Error::MomentCondition(format!("{what} estimate {raw} is out of range")))
    };

    let law = match family {
        Family::Poisson => ALaw::poisson(1.0 - 1.0 / mu)?,
        Family::Geometric => ALaw::geometric(mu / (2.0 * mu - 1.0))?,
        Family::Binomial => {
            let n = round_positive((mu - 1.0).powi(2) * mu2 / shared, "n")?;
            ALaw::binomial(n, (mu - 1.0) / (n as f64 * mu))?
        }
        Family::NegBinomial => {
            let r = round_positive(-(mu - 1.0).powi(2) * mu2 / shared, "r")?;
            let rf = r as f64;
            ALaw::neg_binomial(r, mu * rf / (mu * (rf + 1.0) - 1.0))?
        }
    };
    Ok(FitResult {
        family,
        method: Method::Mom,
        params: FitParams::from_law(&law),
        loglik: None,
        aic: None,
        flags,
    })
}

fn check_fit_limit(data: &FrequencyDataset) -> Result<usize> {
    let limit = data.max_value() as usize;
    if limit > MAX_FIT_LIMIT {
        return Err(Error::Resource(format!(
            "largest observation {limit} exceeds the density cap {MAX_FIT_LIMIT}"
        )));
    }
    Ok(limit)
}

/// Σ count · ln P(X = value). Can be `-inf` when a probability underflows
/// in double precision.
pub fn loglik(data: &FrequencyDataset, law: &ALaw) -> Result<f64> {
    let limit = check_fit_limit(data)?;
    let engine = DensityEngine::new(limit)?;
    loglik_with(&engine, data, law)
}

fn loglik_with(engine: &DensityEngine, data: &FrequencyDataset, law: &ALaw) -> Result<f64> {
    let density = engine.density(law, data.max_value() as usize)?;
    let probs = density.probs();
    Ok(data
        .iter()
        .map(|(v, c)| c as f64 * probs[v as usize].ln())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Upper end of the integer scan for `n` or `r`.
    pub int_max: u32,
    /// Final interval width of the golden-section search.
    pub tol: f64,
    pub grid_points: usize,
    /// Threads for the integer scan; `None` reads `CPDIST_THREADS`, falling
    /// back to the global pool.
    pub threads: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            int_max: 50,
            tol: 1e-6,
            grid_points: 64,
            threads: None,
        }
    }
}

/// Log-likelihood along the real parameter for a fixed family and integer
/// parameter, memoized on the parameter quantized to 1e-9.
struct ProfileLikelihood<'a> {
    engine: &'a DensityEngine,
    data: &'a FrequencyDataset,
    family: Family,
    int_param: u32,
    cache: HashMap<i64, f64>,
}

impl ProfileLikelihood<'_> {
    fn eval(&mut self, theta: f64) -> f64 {
        let key = (theta * 1e9).round() as i64;
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = ALaw::from_family(self.family, self.int_param, theta)
            .and_then(|law| loglik_with(self.engine, self.data, &law))
            .unwrap_or(f64::NEG_INFINITY);
        self.cache.insert(key, v);
        v
    }

    fn maximize(mut self, range: (f64, f64), search: &SearchConfig) -> (f64, f64) {
        grid_golden_max(
            |t| self.eval(t),
            range.0,
            range.1,
            search.grid_points,
            search.tol,
        )
    }
}

fn real_range(family: Family) -> (f64, f64) {
    match family {
        Family::Poisson => POISSON_RANGE,
        _ => PROBABILITY_RANGE,
    }
}

fn on_boundary(theta: f64, range: (f64, f64), tol: f64) -> bool {
    theta - range.0 <= 10.0 * tol || range.1 - theta <= 10.0 * tol
}

fn scan_threads(search: &SearchConfig) -> Option<usize> {
    search.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
    })
}

/// Maximum-likelihood fit. One-parameter families use a 64-point grid
/// followed by golden-section refinement; two-parameter families scan the
/// integer parameter over `1..=int_max` with that inner search for `p`.
pub fn mle_fit(
    data: &FrequencyDataset,
    family: Family,
    search: &SearchConfig,
) -> Result<FitResult> {
    if search.int_max == 0 {
        return Err(Error::ParameterDomain("int_max must be >= 1".into()));
    }
    let limit = check_fit_limit(data)?;
    let engine = DensityEngine::new(limit)?;
    let range = real_range(family);
    let mut flags = Vec::new();

    let profile = |int_param: u32| ProfileLikelihood {
        engine: &engine,
        data,
        family,
        int_param,
        cache: HashMap::new(),
    };

    let (int_param, theta, ll) = if family.has_integer_param() {
        let scan = |k: u32| {
            let (theta, ll) = profile(k).maximize(range, search);
            (k, theta, ll)
        };
        let ks: Vec<u32> = (1..=search.int_max).collect();
        let results: Vec<(u32, f64, f64)> = match scan_threads(search) {
            Some(threads) => rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Resource(format!("thread pool: {e}")))?
                .install(|| ks.par_iter().map(|&k| scan(k)).collect()),
            None => ks.par_iter().map(|&k| scan(k)).collect(),
        };
        // Ascending k with strict improvement: ties go to the smaller k.
        let mut best = results[0];
        for &candidate in &results[1..] {
            if candidate.2 > best.2 {
                best = candidate;
            }
        }
        if search.int_max > 1 && best.0 == search.int_max {
            let previous = results[results.len() - 2].2;
            if best.2 > previous {
                flags.push(FitFlag::IntScanExhausted);
            }
        }
        best
    } else {
        let (theta, ll) = profile(0).maximize(range, search);
        (0, theta, ll)
    };

    if on_boundary(theta, range, search.tol) {
        flags.push(FitFlag::Boundary);
    }
    if data.max_value() == 1 {
        flags.push(FitFlag::DegenerateData);
    }
    let law = ALaw::from_family(family, int_param, theta)?;
    Ok(FitResult {
        family,
        method: Method::Mle,
        params: FitParams::from_law(&law),
        loglik: Some(ll),
        aic: Some(aic(ll, family.free_params())),
        flags,
    })
}

/// How `compare_models` fits each family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    /// Poisson and geometric by moments, binomial and negative binomial by
    /// maximum likelihood.
    Mixed,
    /// Every family by maximum likelihood.
    Mle,
}

fn aic_order(a: &FitResult, b: &FitResult) -> Ordering {
    let key = |f: &FitResult| f.aic.filter(|v| !v.is_nan()).unwrap_or(f64::INFINITY);
    key(a)
        .total_cmp(&key(b))
        .then_with(|| a.family.name().cmp(b.family.name()))
}

/// Fits all four families and returns them sorted by ascending AIC, ties
/// broken by family name.
pub fn compare_models(
    data: &FrequencyDataset,
    mode: CompareMode,
    search: &SearchConfig,
) -> Result<Vec<FitResult>> {
    let mut fits = Family::ALL
        .iter()
        .map(|&family| match (mode, family) {
            (CompareMode::Mixed, Family::Poisson | Family::Geometric) => {
                mom_fit(data, family)?.with_likelihood(data)
            }
            _ => mle_fit(data, family, search),
        })
        .collect::<Result<Vec<_>>>()?;
    fits.sort_by(aic_order);
    Ok(fits)
}
