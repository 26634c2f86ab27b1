//! Moments of X.
//!
//! Raw moments follow from X =d AX + 1 by the binomial expansion:
//!
//!   E[X^m] = Σ_{i<m} C(m,i) E[A^i] E[X^i] / (1 - E[A^m]),
//!
//! which is finite iff E[A^i] < 1 for every i ≤ m. Closed-form mean and
//! variance per family, their finiteness conditions, and alternate
//! closed-form skewness/kurtosis expressions are provided for cross-checks.
//!
//! The alternate skewness and kurtosis expressions do not use the usual
//! standardization. For the Poisson and geometric families they equal
//! μ₃/μ₂³ and μ₄/μ₂⁴ exactly; the binomial skewness does too, while the
//! binomial kurtosis agrees only to about 1e-4 relative and the negative
//! binomial expressions do not reproduce either quantity. [`MomentReport`]
//! reports the standard μ₃/μ₂^{3/2} and μ₄/μ₂².

use serde::{Serialize, Serializer};

use crate::alaw::{ALaw, LawParams};

/// A moment that is either finite or flagged infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    fn finite_if(cond: bool, value: impl FnOnce() -> f64) -> Moment {
        if cond {
            Moment::Finite(value())
        } else {
            Moment::Infinite
        }
    }
}

impl Serialize for Moment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Moment::Finite(v) => serializer.serialize_f64(*v),
            Moment::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

/// Order of the moment whose finiteness is being asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Mean,
    Variance,
}

impl Order {
    pub fn as_u32(self) -> u32 {
        match self {
            Order::Mean => 1,
            Order::Variance => 2,
        }
    }
}

/// `[E[X^0], ..., E[X^max_order]]` by the moment recursion.
pub fn raw_moments_x(law: &ALaw, max_order: u32) -> Vec<Moment> {
    let a_moments: Vec<f64> = (0..=max_order).map(|i| law.raw_moment(i)).collect();
    let mut raw = Vec::with_capacity(max_order as usize + 1);
    let mut finite = vec![1.0f64];
    raw.push(Moment::Finite(1.0));
    for m in 1..=max_order as usize {
        if finite.len() < m || a_moments[m] >= 1.0 {
            raw.push(Moment::Infinite);
            continue;
        }
        let mut binom = 1.0f64;
        let mut numerator = 0.0;
        for (i, x_i) in finite.iter().enumerate() {
            numerator += binom * a_moments[i] * x_i;
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        let value = numerator / (1.0 - a_moments[m]);
        finite.push(value);
        raw.push(Moment::Finite(value));
    }
    raw
}

/// Mean, variance, skewness and kurtosis of X with finiteness flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub law: ALaw,
    /// E[X^m] for m = 0..=4.
    pub raw: Vec<Moment>,
    /// Central moments μ_m for m = 2..=4.
    pub central: Vec<Moment>,
    pub mean: Moment,
    pub variance: Moment,
    pub skewness: Moment,
    /// Non-excess kurtosis μ₄/μ₂².
    pub kurtosis: Moment,
}

pub fn moment_report(law: &ALaw) -> MomentReport {
    let raw = raw_moments_x(law, 4);
    let central = central_moments(&raw);
    let (skewness, kurtosis) = standardize(&central);
    MomentReport {
        law: *law,
        mean: raw[1],
        variance: central[0],
        skewness,
        kurtosis,
        raw,
        central,
    }
}

/// μ₂, μ₃, μ₄ from raw moments 0..=4.
fn central_moments(raw: &[Moment]) -> Vec<Moment> {
    let e: Vec<Option<f64>> = raw.iter().map(|m| m.value()).collect();
    let mu2 = match (e[1], e[2]) {
        (Some(e1), Some(e2)) => Moment::Finite((e2 - e1 * e1).max(0.0)),
        _ => Moment::Infinite,
    };
    let mu3 = match (e[1], e[2], e[3]) {
        (Some(e1), Some(e2), Some(e3)) => Moment::Finite(e3 - 3.0 * e1 * e2 + 2.0 * e1.powi(3)),
        _ => Moment::Infinite,
    };
    let mu4 = match (e[1], e[2], e[3], e[4]) {
        (Some(e1), Some(e2), Some(e3), Some(e4)) => {
            Moment::Finite(e4 - 4.0 * e1 * e3 + 6.0 * e1 * e1 * e2 - 3.0 * e1.powi(4))
        }
        _ => Moment::Infinite,
    };
    vec![mu2, mu3, mu4]
}

fn standardize(central: &[Moment]) -> (Moment, Moment) {
    let skew = match (central[0], central[1]) {
        (Moment::Finite(m2), Moment::Finite(m3)) => Moment::Finite(m3 / m2.powf(1.5)),
        _ => Moment::Infinite,
    };
    let kurt = match (central[0], central[2]) {
        (Moment::Finite(m2), Moment::Finite(m4)) => Moment::Finite(m4 / (m2 * m2)),
        _ => Moment::Infinite,
    };
    (skew, kurt)
}

/// (skewness, kurtosis) with the standard standardization.
pub fn skewness_kurtosis(law: &ALaw) -> (Moment, Moment) {
    let report = moment_report(law);
    (report.skewness, report.kurtosis)
}

/// Whether E[X^order] is finite, by the per-family closed-form conditions.
pub fn finiteness(law: &ALaw, order: Order) -> bool {
    match (*law.params(), order) {
        (LawParams::Poisson { lambda }, Order::Mean) => lambda < 1.0,
        (LawParams::Poisson { lambda }, Order::Variance) => lambda < (5f64.sqrt() - 1.0) / 2.0,
        (LawParams::Binomial { n: 1, .. }, _) => true,
        (LawParams::Binomial { n, p }, Order::Mean) => p < 1.0 / n as f64,
        (LawParams::Binomial { n, p }, Order::Variance) => {
            let n = n as f64;
            p < 0.5 * ((5.0 * n - 4.0) / ((n - 1.0).powi(2) * n)).sqrt() - 1.0 / (2.0 * (n - 1.0))
        }
        (LawParams::NegBinomial { r, p }, Order::Mean) => {
            let r = r as f64;
            r / (1.0 + r) < p
        }
        (LawParams::NegBinomial { r: 1, p }, Order::Variance) => 2.0 / 3.0 < p,
        (LawParams::NegBinomial { r, p }, Order::Variance) => {
            let r = r as f64;
            let r2m1 = r * r - 1.0;
            (2.0 * r * r + r) / (2.0 * r2m1)
                - 0.5 * ((5.0 * r * r + 4.0 * r) / (r2m1 * r2m1)).sqrt()
                < p
        }
        (LawParams::Geometric { p }, Order::Mean) => 0.5 < p,
        (LawParams::Geometric { p }, Order::Variance) => 2.0 / 3.0 < p,
    }
}

/// Whether E[A^i] < 1 for every i in 1..=order, the condition under which
/// the moment recursion yields a finite E[X^order].
pub fn cumulative_finiteness(law: &ALaw, order: u32) -> bool {
    (1..=order).all(|i| law.raw_moment(i) < 1.0)
}

/// Closed-form mean and variance, flagged infinite when the family's
/// finiteness condition fails.
pub fn closed_form_mean_var(law: &ALaw) -> (Moment, Moment) {
    let mean_ok = finiteness(law, Order::Mean);
    let var_ok = mean_ok && finiteness(law, Order::Variance);
    match *law.params() {
        LawParams::Poisson { lambda: l } => (
            Moment::finite_if(mean_ok, || 1.0 / (1.0 - l)),
            Moment::finite_if(var_ok, || -l / ((l - 1.0).powi(2) * (l * l + l - 1.0))),
        ),
        LawParams::Binomial { n, p } => {
            let n = n as f64;
            (
                Moment::finite_if(mean_ok, || 1.0 / (1.0 - n * p)),
                Moment::finite_if(var_ok, || {
                    n * (p - 1.0) * p
                        / ((n * p - 1.0).powi(2) * (n * n * p * p - n * (p - 1.0) * p - 1.0))
                }),
            )
        }
        LawParams::NegBinomial { r, p } => {
            let r = r as f64;
            let base = p * r + p - r;
            (
                Moment::finite_if(mean_ok, || p / base),
                Moment::finite_if(var_ok, || {
                    (p - 1.0) * p * p * r
                        / (base.powi(2)
                            * (p * p * (r * r - 1.0) - p * r * (2.0 * r + 1.0) + r * (r + 1.0)))
                }),
            )
        }
        LawParams::Geometric { p } => (
            Moment::finite_if(mean_ok, || p / (2.0 * p - 1.0)),
            Moment::finite_if(var_ok, || {
                -(p - 1.0) * p * p / ((1.0 - 2.0 * p).powi(2) * (3.0 * p - 2.0))
            }),
        ),
    }
}

/// Alternate closed-form "skewness" expression (see the module docs).
pub fn alt_skewness_formula(law: &ALaw) -> f64 {
    match *law.params() {
        LawParams::Poisson { lambda: l } => {
            (l - 1.0).powi(3) * (l * l + l - 1.0).powi(2) * (5.0 * l * l + 2.0 * l + 1.0)
                / (l * l * (l.powi(3) + 3.0 * l * l + l - 1.0))
        }
        LawParams::Binomial { n, p } => {
            let n = n as f64;
            let num = (n * p - 1.0).powi(3)
                * (-n * n * p * p + n * (p - 1.0) * p + 1.0).powi(2)
                * (4.0 * (n - 1.0) * n * p.powi(3) + n * (6.0 - 5.0 * n) * p * p
                    - 2.0 * (n - 1.0) * p
                    - 1.0);
            let den = n
                * n
                * (p - 1.0).powi(2)
                * p
                * p
                * (n.powi(3) * p.powi(3) - 3.0 * n * n * (p - 1.0) * p * p
                    + n * (2.0 * p * p - 3.0 * p + 1.0) * p
                    - 1.0);
            -num / den
        }
        LawParams::NegBinomial { r, p } => {
            let r = r as f64;
            let num = (p * r + p - r).powi(3)
                * (p * p * (r * r - 1.0) - p * r * (2.0 * r + 1.0) + r * (r + 1.0)).powi(2)
                * (p * r * r * (-4.0 * r * r + r - 5.0)
                    + r * (r.powi(3) + r + 2.0)
                    + p.powi(3)
                        * (-4.0 * r.powi(4) + 3.0 * r.powi(3) - 3.0 * r * r + 3.0 * r + 1.0)
                    + p.powi(4) * (r.powi(4) - r.powi(3) + r - 1.0)
                    + p * p * (6.0 * r.powi(4) - 3.0 * r.powi(3) + 7.0 * r * r - 6.0 * r + 1.0));
            let den = (p - 1.0).powi(2)
                * p.powi(3)
                * r
                * r
                * (p.powi(3) * (r * r - r + 1.0) + p * p * r * (2.0 - 3.0 * r) + 3.0 * p * r * r
                    - r * (r + 1.0));
            num / den
        }
        LawParams::Geometric { p } => {
            (2.0 - 3.0 * p).powi(2) * (2.0 * p - 1.0).powi(3) * (6.0 * p * p - 13.0 * p + 8.0)
                / ((p - 1.0).powi(2) * p.powi(3) * (2.0 * p.powi(3) - 7.0 * p * p + 12.0 * p - 6.0))
        }
    }
}

/// Alternate closed-form "kurtosis" expression (see the module docs).
pub fn alt_kurtosis_formula(law: &ALaw) -> f64 {
    match *law.params() {
        LawParams::Poisson { lambda: l } => {
            (l - 1.0).powi(4)
                * (l * l + l - 1.0).powi(3)
                * (3.0 * l.powi(6)
                    - 25.0 * l.powi(5)
                    - 55.0 * l.powi(4)
                    - 32.0 * l.powi(3)
                    - 47.0 * l * l
                    - 11.0 * l
                    - 1.0)
                / (l.powi(3)
                    * (l + 1.0).powi(2)
                    * (l * l + 2.0 * l - 1.0)
                    * (l.powi(3) + 5.0 * l * l + 2.0 * l - 1.0))
        }
        LawParams::Binomial { n, p } => {
            let n = n as f64;
            let poly = 1.0
                + (11.0 * n - 6.0) * p
                + (47.0 * n * n - 65.0 * n + 6.0) * p * p
                + n * (32.0 * n * n - 165.0 * n + 138.0) * p.powi(3)
                + n * (55.0 * n.powi(3) - 177.0 * n * n + 243.0 * n - 120.0) * p.powi(4)
                + n * (25.0 * n.powi(4) - 184.0 * n.powi(3) + 339.0 * n * n - 216.0 * n + 36.0)
                    * p.powi(5)
                - 3.0 * (n - 1.0).powi(2) * n * n * (n * n + 4.0 * n - 12.0) * p.powi(7)
                + 3.0
                    * n
                    * n
                    * (n.powi(4) + 10.0 * n.powi(3) - 62.0 * n * n + 93.0 * n - 42.0)
                    * p.powi(6);
            let num =
                (n * p - 1.0).powi(4) * (n * n * p * p - n * (p - 1.0) * p - 1.0).powi(3) * poly;
            let den = n.powi(3)
                * (p - 1.0).powi(3)
                * p.powi(3)
                * (n.powi(3) * p.powi(3) - 3.0 * n * n * (p - 1.0) * p * p
                    + n * (2.0 * p * p - 3.0 * p + 1.0) * p
                    - 1.0)
                * (n.powi(4) * p.powi(4) - 6.0 * n.powi(3) * (p - 1.0) * p.powi(3)
                    + n * n * (11.0 * p * p - 18.0 * p + 7.0) * p * p
                    + n * (-6.0 * p.powi(4) + 12.0 * p.powi(3) - 7.0 * p * p + p)
                    - 1.0);
            num / den
        }
        LawParams::NegBinomial { r, p } => {
            let r = r as f64;
            let poly = r * r * (r + 1.0).powi(2) * (3.0 * r.powi(3) + 5.0 * r * r - 3.0 * r + 6.0)
                - 2.0
                    * p
                    * r
                    * r
                    * (12.0 * r.powi(5)
                        + 32.0 * r.powi(4)
                        + 24.0 * r.powi(3)
                        + 16.0 * r * r
                        + 15.0 * r
                        + 3.0)
                + p.powi(3)
                    * r
                    * (-168.0 * r.powi(6)
                        - 106.0 * r.powi(5)
                        - 140.0 * r.powi(4)
                        - 29.0 * r.powi(3)
                        + 76.0 * r * r
                        + 35.0 * r
                        + 10.0)
                + p.powi(6)
                    * r
                    * (84.0 * r.powi(6) - 211.0 * r.powi(5) + 238.0 * r.powi(4)
                        - 126.0 * r.powi(3)
                        + 98.0 * r * r
                        - 38.0 * r
                        - 24.0)
                + p * p
                    * r
                    * (84.0 * r.powi(6) + 139.0 * r.powi(5) + 98.0 * r.powi(4) + 68.0 * r.powi(3)
                        - 2.0 * r * r
                        - 18.0 * r
                        + 6.0)
                + p.powi(4)
                    * r
                    * (210.0 * r.powi(6) - 85.0 * r.powi(5) + 210.0 * r.powi(4)
                        - 103.0 * r.powi(3)
                        - 9.0 * r * r
                        - 66.0 * r
                        - 19.0)
                + p.powi(7)
                    * (-24.0 * r.powi(7) + 86.0 * r.powi(6) - 108.0 * r.powi(5)
                        + 39.0 * r.powi(4)
                        + 6.0 * r.powi(3)
                        - 33.0 * r * r
                        + 30.0 * r
                        + 1.0)
                + p.powi(8)
                    * (3.0 * r.powi(7) - 14.0 * r.powi(6) + 20.0 * r.powi(5)
                        - 4.0 * r.powi(4)
                        - 16.0 * r.powi(3)
                        + 20.0 * r * r
                        - 7.0 * r
                        - 2.0)
                - 2.0
                    * p.powi(5)
                    * (84.0 * r.powi(7) - 122.0 * r.powi(6) + 140.0 * r.powi(5) - 91.0 * r.powi(4)
                        + 66.0 * r.powi(3)
                        - 50.0 * r * r
                        - 2.0 * r
                        - 1.0);
            let num = (p * r + p - r).powi(4)
                * (p * p * (r * r - 1.0) - p * r * (2.0 * r + 1.0) + r * (r + 1.0)).powi(3)
                * poly;
            let den = (p - 1.0).powi(3)
                * p.powi(4)
                * r.powi(3)
                * (p.powi(3) * (r * r - r + 1.0) + p * p * r * (2.0 - 3.0 * r) + 3.0 * p * r * r
                    - r * (r + 1.0))
                * (p.powi(3) * r * (-4.0 * r * r + 6.0 * r - 3.0) + r * (r * r + 3.0 * r + 2.0)
                    - p.powi(4) * (r.powi(3) - 3.0 * r * r + 2.0 * r - 1.0)
                    + p * p * (6.0 * r.powi(3) + r)
                    + 2.0 * p * r * (2.0 * r * r + 3.0 * r + 1.0));
            -num / den
        }
        LawParams::Geometric { p } => {
            (1.0 - 2.0 * p).powi(4)
                * (3.0 * p - 2.0).powi(3)
                * (42.0 * p.powi(6) - 173.0 * p.powi(5) + 105.0 * p.powi(4) + 435.0 * p.powi(3)
                    - 872.0 * p * p
                    + 642.0 * p
                    - 180.0)
                / ((p - 1.0).powi(3)
                    * p.powi(4)
                    * (2.0 * p.powi(3) - 7.0 * p * p + 12.0 * p - 6.0)
                    * (15.0 * p.powi(3) - 50.0 * p * p + 60.0 * p - 24.0))
        }
    }
}
