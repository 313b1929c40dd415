//! Penalized-likelihood order selection rules.
//!
//! All scores are "larger is better". Evidence is carried either in the
//! natural convention (`l = ln p(x|θ̂)/p0(x)`, dimension `k`) or the doubled
//! one (`l = 2 ln(...)`, dimension `d`). Each rule's doubled score is exactly
//! twice its natural score at `(l/2, d)`, so selections agree across
//! conventions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LlrConvention {
    Natural,
    Doubled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Beef,
    Mdl,
    Aic,
    Aicc,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Beef, Criterion::Mdl, Criterion::Aic, Criterion::Aicc];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Beef => "beef",
            Criterion::Mdl => "mdl",
            Criterion::Aic => "aic",
            Criterion::Aicc => "aicc",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "beef" => Ok(Criterion::Beef),
            "mdl" => Ok(Criterion::Mdl),
            "aic" => Ok(Criterion::Aic),
            "aicc" => Ok(Criterion::Aicc),
            other => Err(Error::InvalidArgument(format!(
                "unknown criterion {other:?} (expected beef, mdl, aic or aicc)"
            ))),
        }
    }
}

/// Maximized log-likelihood ratio of one candidate against the null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelEvidence {
    pub llr: f64,
    pub dim: usize,
    pub n_samples: usize,
    pub convention: LlrConvention,
}

impl ModelEvidence {
    pub fn new(llr: f64, dim: usize, n_samples: usize, convention: LlrConvention) -> Result<Self> {
        if !(llr >= 0.0) || !llr.is_finite() {
            return Err(Error::InvalidArgument(format!("llr must be finite and >= 0, got {llr}")));
        }
        if dim == 0 || n_samples == 0 {
            return Err(Error::InvalidArgument(format!(
                "dim and n_samples must be >= 1, got dim = {dim}, n_samples = {n_samples}"
            )));
        }
        Ok(Self {
            llr,
            dim,
            n_samples,
            convention,
        })
    }

    pub fn doubled(llr: f64, dim: usize, n_samples: usize) -> Result<Self> {
        Self::new(llr, dim, n_samples, LlrConvention::Doubled)
    }

    pub fn natural(llr: f64, dim: usize, n_samples: usize) -> Result<Self> {
        Self::new(llr, dim, n_samples, LlrConvention::Natural)
    }

    /// LLR expressed in the doubled convention.
    fn doubled_llr(&self) -> f64 {
        match self.convention {
            LlrConvention::Natural => 2.0 * self.llr,
            LlrConvention::Doubled => self.llr,
        }
    }

    /// Rescales a doubled-convention score back into this evidence's convention.
    fn in_convention(&self, doubled_score: f64) -> f64 {
        match self.convention {
            LlrConvention::Natural => 0.5 * doubled_score,
            LlrConvention::Doubled => doubled_score,
        }
    }
}

/// Asymptotic Bayesian EEF score.
pub fn beef_score(ev: &ModelEvidence) -> f64 {
    let d = ev.dim as f64;
    match ev.convention {
        LlrConvention::Natural => {
            let half = d / 2.0;
            if ev.llr > half {
                ev.llr - half - half * (ev.llr / half).ln()
            } else {
                0.0
            }
        }
        LlrConvention::Doubled => {
            if ev.llr > d {
                ev.llr - d * ((ev.llr / d).ln() + 1.0)
            } else {
                0.0
            }
        }
    }
}

/// `l - d ln M` (doubled convention).
pub fn mdl_score(ev: &ModelEvidence) -> f64 {
    let d = ev.dim as f64;
    ev.in_convention(ev.doubled_llr() - d * (ev.n_samples as f64).ln())
}

/// `l - 2d` (doubled convention).
pub fn aic_score(ev: &ModelEvidence) -> f64 {
    ev.in_convention(ev.doubled_llr() - 2.0 * ev.dim as f64)
}

/// `l - 2dM / (M - d - 1)` (doubled convention); undefined when `M <= d + 1`.
pub fn aicc_score(ev: &ModelEvidence) -> Result<f64> {
    let (d, m) = (ev.dim, ev.n_samples);
    if m <= d + 1 {
        return Err(Error::SmallSample { n_samples: m, dim: d });
    }
    let (df, mf) = (d as f64, m as f64);
    Ok(ev.in_convention(ev.doubled_llr() - 2.0 * df * mf / (mf - df - 1.0)))
}

pub fn score(criterion: Criterion, ev: &ModelEvidence) -> Result<f64> {
    match criterion {
        Criterion::Beef => Ok(beef_score(ev)),
        Criterion::Mdl => Ok(mdl_score(ev)),
        Criterion::Aic => Ok(aic_score(ev)),
        Criterion::Aicc => aicc_score(ev),
    }
}

/// Scores of every candidate order under one rule, plus the selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionScores {
    pub criterion: Criterion,
    pub scores: BTreeMap<usize, f64>,
    pub selected: usize,
    /// Orders that could not be scored (AICc with too few samples).
    pub excluded: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Scores `evidences[i]` as order `i + 1` and returns the maximizer.
///
/// With `include_null`, order 0 competes with score 0 (every rule vanishes
/// at `l = 0, d = 0`). Ties go to the smallest order.
pub fn select_order(
    evidences: &[ModelEvidence],
    criterion: Criterion,
    include_null: bool,
) -> Result<CriterionScores> {
    let mut scores = BTreeMap::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();

    if include_null {
        scores.insert(0, 0.0);
    }
    for (i, ev) in evidences.iter().enumerate() {
        let order = i + 1;
        match score(criterion, ev) {
            Ok(s) => {
                scores.insert(order, s);
            }
            Err(Error::SmallSample { .. }) => excluded.push(order),
            Err(e) => return Err(e),
        }
    }
    for (i, pair) in evidences.windows(2).enumerate() {
        if pair[1].llr < pair[0].llr {
            warnings.push(format!(
                "llr decreases from order {} ({}) to order {} ({})",
                i + 1,
                pair[0].llr,
                i + 2,
                pair[1].llr
            ));
        }
    }
    if !excluded.is_empty() {
        warnings.push(format!("{criterion} undefined for orders {excluded:?} (too few samples)"));
    }

    let selected = argmax_smallest(&scores).ok_or(Error::EmptyCandidateSet)?;
    Ok(CriterionScores {
        criterion,
        scores,
        selected,
        excluded,
        warnings,
    })
}

/// Key of the largest value; the smallest key among ties.
fn argmax_smallest(scores: &BTreeMap<usize, f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (&order, &s) in scores {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((order, s)),
        }
    }
    best.map(|(o, _)| o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dbl(l: f64, d: usize, m: usize) -> ModelEvidence {
        ModelEvidence::doubled(l, d, m).unwrap()
    }

    #[test]
    fn beef_examples() {
        let v = beef_score(&dbl(130.93, 22, 100));
        assert_relative_eq!(v, 130.93 - 22.0 * ((130.93f64 / 22.0).ln() + 1.0), epsilon = 1e-12);
        assert!((v - 69.69).abs() < 0.01);
        assert_eq!(beef_score(&dbl(22.0, 22, 100)), 0.0);
        assert_eq!(beef_score(&dbl(3.0, 22, 100)), 0.0);
        let nat = beef_score(&ModelEvidence::natural(5.0, 2, 1).unwrap());
        assert_relative_eq!(nat, 2.390562, epsilon = 1e-6);
    }

    #[test]
    fn beef_matches_linear_eef() {
        for l in [0.3, 1.0, 1.5, 5.0, 42.0] {
            for k in 1..6 {
                let a = beef_score(&ModelEvidence::natural(l, k, 1).unwrap());
                let b = crate::linear_eef::EefBreakdown::from_statistic(l, k).eef;
                assert_relative_eq!(a, b, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn mdl_examples() {
        assert!((mdl_score(&dbl(130.93, 22, 100)) - 29.62).abs() < 0.01);
        assert_relative_eq!(mdl_score(&dbl(0.0, 5, 100)), -5.0 * 100f64.ln(), epsilon = 1e-12);
        // ln M = 1 is not reachable with integer M; check the algebra at M = 1 (ln M = 0)
        assert_relative_eq!(mdl_score(&dbl(7.0, 3, 1)), 7.0, epsilon = 1e-15);
    }

    #[test]
    fn aic_examples() {
        assert_relative_eq!(aic_score(&dbl(130.93, 22, 100)), 86.93, epsilon = 1e-10);
        assert_eq!(aic_score(&dbl(44.0, 22, 100)), 0.0);
        let nat = aic_score(&ModelEvidence::natural(7.5, 3, 10).unwrap());
        assert_relative_eq!(nat, 7.5 - 3.0, epsilon = 1e-15);
        assert_relative_eq!(nat, 0.5 * aic_score(&dbl(15.0, 3, 10)), epsilon = 1e-15);
    }

    #[test]
    fn aicc_examples() {
        let v = aicc_score(&dbl(130.93, 22, 100)).unwrap();
        assert_relative_eq!(v, 130.93 - 4400.0 / 77.0, epsilon = 1e-12);
        assert!((v - 73.79).abs() < 0.01);
        for m in [100usize, 1000, 10_000, 100_000] {
            let (d, l) = (5usize, 40.0);
            let gap = aic_score(&dbl(l, d, m)) - aicc_score(&dbl(l, d, m)).unwrap();
            assert!(gap >= 0.0 && gap <= 2.0 * (d * (d + 1)) as f64 / (m - d - 1) as f64 + 1e-12);
        }
        assert_relative_eq!(aicc_score(&dbl(10.0, 3, 5)).unwrap(), 10.0 - 2.0 * 3.0 * 5.0, epsilon = 1e-12);
        assert!(matches!(aicc_score(&dbl(10.0, 3, 4)), Err(Error::SmallSample { .. })));
    }

    #[test]
    fn evidence_validation() {
        assert!(ModelEvidence::doubled(-1.0, 1, 1).is_err());
        assert!(ModelEvidence::doubled(f64::NAN, 1, 1).is_err());
        assert!(ModelEvidence::doubled(1.0, 0, 1).is_err());
        assert!(ModelEvidence::doubled(1.0, 1, 0).is_err());
    }

    #[test]
    fn null_wins_all_zero_ties() {
        let evs: Vec<_> = (1..=3).map(|k| dbl(0.5, 10 * k, 100)).collect();
        let s = select_order(&evs, Criterion::Beef, true).unwrap();
        assert_eq!(s.selected, 0);
        let s = select_order(&evs, Criterion::Beef, false).unwrap();
        assert_eq!(s.selected, 1);
    }

    #[test]
    fn smallest_order_tie_break() {
        let scores: BTreeMap<usize, f64> = [(1, 1.0), (2, 3.5), (3, 3.5), (4, 2.0)].into_iter().collect();
        assert_eq!(argmax_smallest(&scores), Some(2));
    }

    #[test]
    fn empty_candidates() {
        assert_eq!(select_order(&[], Criterion::Aic, false).unwrap_err(), Error::EmptyCandidateSet);
        assert_eq!(select_order(&[], Criterion::Aic, true).unwrap().selected, 0);
        let evs = vec![dbl(10.0, 5, 6)];
        assert_eq!(select_order(&evs, Criterion::Aicc, false).unwrap_err(), Error::EmptyCandidateSet);
    }

    #[test]
    fn aicc_exclusions_reported() {
        let evs = vec![dbl(50.0, 2, 8), dbl(60.0, 7, 8)];
        let s = select_order(&evs, Criterion::Aicc, false).unwrap();
        assert_eq!(s.excluded, vec![2]);
        assert_eq!(s.selected, 1);
        assert!(!s.warnings.is_empty());
    }

    #[test]
    fn non_monotone_llr_warns() {
        let evs = vec![dbl(50.0, 2, 100), dbl(40.0, 4, 100)];
        let s = select_order(&evs, Criterion::Beef, false).unwrap();
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("AICc".parse::<Criterion>().unwrap(), Criterion::Aicc);
        assert!("bic".parse::<Criterion>().is_err());
    }
}
