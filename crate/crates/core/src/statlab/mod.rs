//! Error metrics, band accuracy, one-way ANOVA and Welch's t-test.
//!
//! All errors are signed percentages: `100 * (prediction - truth) / truth`.

mod special;

pub use special::{f_survival, ln_beta, ln_gamma, regularized_incomplete_beta, t_two_sided_p};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BAND_PCT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatError {
    #[error("ground truth must be > 0, got {0}")]
    TruthNotPositive(f64),
    #[error("prediction must be finite and >= 0, got {0}")]
    InvalidPrediction(f64),
    #[error("empty input")]
    Empty,
    #[error("need at least {need} values, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
}

fn check_finite(values: &[f64]) -> Result<(), StatError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatError::NonFinite)
    }
}

/// Sums after sorting so the result does not depend on input order.
pub fn stable_sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

pub fn approximation_error(prediction: f64, truth: f64) -> Result<f64, StatError> {
    if !(truth > 0.0 && truth.is_finite()) {
        return Err(StatError::TruthNotPositive(truth));
    }
    if !(prediction >= 0.0 && prediction.is_finite()) {
        return Err(StatError::InvalidPrediction(prediction));
    }
    Ok(100.0 * (prediction - truth) / truth)
}

/// Shifted by the minimum so that constant inputs return exactly.
pub fn mean(values: &[f64]) -> Result<f64, StatError> {
    if values.is_empty() {
        return Err(StatError::Empty);
    }
    check_finite(values)?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = values.iter().map(|v| v - lo).collect();
    Ok(lo + stable_sum(&shifted) / values.len() as f64)
}

/// sqrt(Σe²/n).
pub fn rmse_percent(errors: &[f64]) -> Result<f64, StatError> {
    if errors.is_empty() {
        return Err(StatError::Empty);
    }
    check_finite(errors)?;
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    Ok((stable_sum(&sq) / errors.len() as f64).sqrt())
}

/// |approximation_error(mean(predictions), truth)|.
pub fn group_point_error(predictions: &[f64], truth: f64) -> Result<f64, StatError> {
    Ok(approximation_error(mean(predictions)?, truth)?.abs())
}

/// Sample standard deviation (divisor n - 1).
pub fn sample_sd(values: &[f64]) -> Result<f64, StatError> {
    if values.len() < 2 {
        return Err(StatError::TooFew {
            need: 2,
            got: values.len(),
        });
    }
    let m = mean(values)?;
    let sq: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    Ok((stable_sum(&sq) / (values.len() - 1) as f64).sqrt())
}

/// |error| <= band, boundary included.
///
/// # Panics
/// If `band_pct` is not positive.
pub fn within_band(signed_error_pct: f64, band_pct: f64) -> bool {
    assert!(band_pct > 0.0, "band must be positive");
    signed_error_pct.abs() <= band_pct
}

/// `k` of `n` cases inside the accuracy band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccuracyCount {
    pub k: usize,
    pub n: usize,
}

impl AccuracyCount {
    /// Whole percentage, halves rounded up.
    pub fn percent(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        (200 * self.k + self.n) / (2 * self.n)
    }

    pub fn fraction(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

impl fmt::Display for AccuracyCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ({}%)", self.k, self.n, self.percent())
    }
}

pub fn accuracy_count(errors: &[f64], band_pct: f64) -> AccuracyCount {
    AccuracyCount {
        k: errors.iter().filter(|e| within_band(**e, band_pct)).count(),
        n: errors.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_stat: f64,
    pub df_between: u32,
    pub df_within: u32,
    pub p_value: f64,
}

pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<AnovaResult, StatError> {
    if groups.len() < 2 {
        return Err(StatError::TooFewGroups(groups.len()));
    }
    for g in groups {
        if g.len() < 2 {
            return Err(StatError::TooFew { need: 2, got: g.len() });
        }
        check_finite(g)?;
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let grand = mean(&all)?;
    let mut ssb_terms = Vec::with_capacity(groups.len());
    let mut ssw_terms = Vec::with_capacity(all.len());
    for g in groups {
        let m = mean(g)?;
        ssb_terms.push(g.len() as f64 * (m - grand) * (m - grand));
        ssw_terms.extend(g.iter().map(|v| (v - m) * (v - m)));
    }
    let (ssb, ssw) = (stable_sum(&ssb_terms), stable_sum(&ssw_terms));
    let sst: f64 = stable_sum(&all.iter().map(|v| (v - grand) * (v - grand)).collect::<Vec<_>>());
    if sst == 0.0 {
        return Err(StatError::Degenerate("all values are identical".into()));
    }
    if ssw <= 1e-13 * sst {
        return Err(StatError::Degenerate("zero within-group variance".into()));
    }
    let df_between = (groups.len() - 1) as u32;
    let df_within = (all.len() - groups.len()) as u32;
    let f_stat = (ssb / df_between as f64) / (ssw / df_within as f64);
    let p_value = f_survival(f_stat, df_between as f64, df_within as f64)?;
    Ok(AnovaResult {
        f_stat,
        df_between,
        df_within,
        p_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    pub df: f64,
    pub p_value_two_sided: f64,
}

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatError::TooFew { need: 2, got: s.len() });
        }
    }
    let (ma, mb) = (mean(a)?, mean(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = sample_sd(a)?.powi(2) / na;
    let vb = sample_sd(b)?.powi(2) / nb;
    if va + vb == 0.0 {
        if ma == mb {
            return Ok(TTestResult {
                t_stat: 0.0,
                df: na + nb - 2.0,
                p_value_two_sided: 1.0,
            });
        }
        return Err(StatError::Degenerate("both samples have zero variance".into()));
    }
    let t_stat = (ma - mb) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p_value_two_sided = t_two_sided_p(t_stat, df)?;
    Ok(TTestResult {
        t_stat,
        df,
        p_value_two_sided,
    })
}
