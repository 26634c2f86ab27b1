//! Parametric laws for the multiplier `A`.
//!
//! All four families put positive mass on both 0 and 1. The negative binomial
//! and geometric laws count failures before the `r`-th (first) success, where
//! `p` is the success probability, so that
//!
//! | family          | E[A]         |
//! |-----------------|--------------|
//! | Poisson(λ)      | λ            |
//! | Binomial(n, p)  | n p          |
//! | NegBinomial(r,p)| r (1 - p)/p  |
//! | Geometric(p)    | (1 - p)/p    |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Poisson,
    Binomial,
    NegBinomial,
    Geometric,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Poisson,
        Family::Binomial,
        Family::NegBinomial,
        Family::Geometric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::Binomial => "binomial",
            Family::NegBinomial => "negbinomial",
            Family::Geometric => "geometric",
        }
    }

    /// Number of free parameters, as counted by AIC.
    pub fn free_params(self) -> u32 {
        match self {
            Family::Poisson | Family::Geometric => 1,
            Family::Binomial | Family::NegBinomial => 2,
        }
    }

    pub fn has_integer_param(self) -> bool {
        matches!(self, Family::Binomial | Family::NegBinomial)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(Family::Poisson),
            "binomial" => Ok(Family::Binomial),
            "negbinomial" => Ok(Family::NegBinomial),
            "geometric" => Ok(Family::Geometric),
            other => Err(Error::ParameterDomain(format!("unknown family '{other}'"))),
        }
    }
}

/// Raw parameter set, tagged by family. Use [`ALaw`] for a validated law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum LawParams {
    Poisson { lambda: f64 },
    Binomial { n: u32, p: f64 },
    NegBinomial { r: u32, p: f64 },
    Geometric { p: f64 },
}

/// A validated law for `A`. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawParams", into = "LawParams")]
pub struct ALaw {
    params: LawParams,
}

fn check_probability(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "p must lie in (0, 1), got {p}"
        )))
    }
}

impl TryFrom<LawParams> for ALaw {
    type Error = Error;

    fn try_from(params: LawParams) -> Result<Self> {
        match params {
            LawParams::Poisson { lambda } => {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(Error::ParameterDomain(format!(
                        "lambda must be finite and > 0, got {lambda}"
                    )));
                }
            }
            LawParams::Binomial { n, p } => {
                if n == 0 {
                    return Err(Error::ParameterDomain("n must be >= 1".into()));
                }
                check_probability(p)?;
            }
            LawParams::NegBinomial { r, p } => {
                if r == 0 {
                    return Err(Error::ParameterDomain("r must be >= 1".into()));
                }
                check_probability(p)?;
            }
            LawParams::Geometric { p } => check_probability(p)?,
        }
        Ok(ALaw { params })
    }
}

impl From<ALaw> for LawParams {
    fn from(law: ALaw) -> Self {
        law.params
    }
}

impl ALaw {
    pub fn poisson(lambda: f64) -> Result<Self> {
        LawParams::Poisson { lambda }.try_into()
    }

    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        LawParams::Binomial { n, p }.try_into()
    }

    pub fn neg_binomial(r: u32, p: f64) -> Result<Self> {
        LawParams::NegBinomial { r, p }.try_into()
    }

    pub fn geometric(p: f64) -> Result<Self> {
        LawParams::Geometric { p }.try_into()
    }

    /// Builds a law from a family tag, its integer parameter (`n` or `r`,
    /// ignored for one-parameter families) and its real parameter (`λ` or `p`).
    pub fn from_family(family: Family, int_param: u32, real_param: f64) -> Result<Self> {
        match family {
            Family::Poisson => Self::poisson(real_param),
            Family::Binomial => Self::binomial(int_param, real_param),
            Family::NegBinomial => Self::neg_binomial(int_param, real_param),
            Family::Geometric => Self::geometric(real_param),
        }
    }

    pub fn params(&self) -> &LawParams {
        &self.params
    }

    pub fn family(&self) -> Family {
        match self.params {
            LawParams::Poisson { .. } => Family::Poisson,
            LawParams::Binomial { .. } => Family::Binomial,
            LawParams::NegBinomial { .. } => Family::NegBinomial,
            LawParams::Geometric { .. } => Family::Geometric,
        }
    }

    /// Largest value with positive mass, if the support is bounded.
    pub fn support_max(&self) -> Option<u64> {
        match self.params {
            LawParams::Binomial { n, .. } => Some(n as u64),
            _ => None,
        }
    }

    /// P(A = k).
    pub fn pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        match self.params {
            LawParams::Poisson { lambda } => (kf * lambda.ln() - lambda - ln_factorial(k)).exp(),
            LawParams::Binomial { n, p } => {
                if k > n as u64 {
                    return 0.0;
                }
                let n = n as u64;
                let ln_choose = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
                (ln_choose + kf * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
            }
            LawParams::NegBinomial { r, p } => {
                let r = r as u64;
                let ln_choose = ln_factorial(k + r - 1) - ln_factorial(k) - ln_factorial(r - 1);
                (ln_choose + r as f64 * p.ln() + kf * (-p).ln_1p()).exp()
            }
            LawParams::Geometric { p } => p * (1.0 - p).powf(kf),
        }
    }

    /// `[P(A=0), ..., P(A=len-1)]`, built with the multiplicative recurrence
    /// between consecutive probabilities.
    pub fn pmf_table(&self, len: usize) -> Vec<f64> {
        let mut table = Vec::with_capacity(len);
        if len == 0 {
            return table;
        }
        let mut current = self.pmf(0);
        table.push(current);
        for k in 1..len {
            let kf = k as f64;
            current *= match self.params {
                LawParams::Poisson { lambda } => lambda / kf,
                LawParams::Binomial { n, p } => {
                    if k > n as usize {
                        0.0
                    } else {
                        (n as f64 - kf + 1.0) / kf * p / (1.0 - p)
                    }
                }
                LawParams::NegBinomial { r, p } => (kf + r as f64 - 1.0) / kf * (1.0 - p),
                LawParams::Geometric { p } => 1.0 - p,
            };
            table.push(current);
        }
        table
    }

    /// E[(A)_k], the k-th falling factorial moment.
    pub fn factorial_moment(&self, k: u32) -> f64 {
        let kf = k as i32;
        match self.params {
            LawParams::Poisson { lambda } => lambda.powi(kf),
            LawParams::Binomial { n, p } => {
                if k > n {
                    return 0.0;
                }
                (0..k).map(|i| (n - i) as f64).product::<f64>() * p.powi(kf)
            }
            LawParams::NegBinomial { r, p } => {
                let odds = (1.0 - p) / p;
                (0..k).map(|i| (r + i) as f64).product::<f64>() * odds.powi(kf)
            }
            LawParams::Geometric { p } => {
                let odds = (1.0 - p) / p;
                (1..=k).map(f64::from).product::<f64>() * odds.powi(kf)
            }
        }
    }

    /// E[A^m] = Σ_k S(m, k) E[(A)_k] with Stirling numbers of the second kind.
    pub fn raw_moment(&self, m: u32) -> f64 {
        stirling2_row(m)
            .iter()
            .enumerate()
            .map(|(k, s)| s * self.factorial_moment(k as u32))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        match self.params {
            LawParams::Poisson { lambda } => lambda,
            LawParams::Binomial { n, p } => n as f64 * p,
            LawParams::NegBinomial { r, p } => r as f64 * (1.0 - p) / p,
            LawParams::Geometric { p } => (1.0 - p) / p,
        }
    }
}

impl fmt::Display for ALaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params {
            LawParams::Poisson { lambda } => write!(f, "poisson(lambda={lambda})"),
            LawParams::Binomial { n, p } => write!(f, "binomial(n={n}, p={p})"),
            LawParams::NegBinomial { r, p } => write!(f, "negbinomial(r={r}, p={p})"),
            LawParams::Geometric { p } => write!(f, "geometric(p={p})"),
        }
    }
}

/// Row `m` of the Stirling numbers of the second kind: `[S(m,0), ..., S(m,m)]`.
pub(crate) fn stirling2_row(m: u32) -> Vec<f64> {
    let m = m as usize;
    let mut row = vec![0.0; m + 1];
    row[0] = 1.0;
    for i in 1..=m {
        // S(i, k) = k S(i-1, k) + S(i-1, k-1), updated in place right to left.
        for k in (1..=i).rev() {
            row[k] = k as f64 * row[k] + row[k - 1];
        }
        row[0] = 0.0;
    }
    row
}
