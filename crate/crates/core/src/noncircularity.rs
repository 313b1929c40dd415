//! Degree-of-noncircularity estimation for complex Gaussian vectors.
//!
//! Pipeline: sample covariance and pseudo-covariance, circularity
//! coefficients (singular values of the coherence matrix
//! `Ĉ^{-1/2} P̂ Ĉ^{-T/2}`), the per-order evidence ladder
//! `l_k = -M Σ_{i<=k} ln(1 - λ̂_i²)` with `d_k = k(2N - k + 1)`, and finally
//! order selection under each requested rule.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::criteria::{select_order, Criterion, CriterionScores, ModelEvidence};
use crate::dataset::ComplexDataset;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_inv_sqrt, singular_values, ComplexMatrix};

/// Upper clamp on circularity coefficients, keeps `ln(1 - λ²)` finite.
pub const COEFF_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone)]
pub struct SecondOrderStats {
    pub c_hat: ComplexMatrix,
    pub p_hat: ComplexMatrix,
    pub mu: Vec<Complex64>,
    pub n_samples: usize,
}

/// Circularity coefficients, sorted descending, each in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularitySpectrum {
    coefficients: Vec<f64>,
}

impl CircularitySpectrum {
    /// Sorts descending and clamps into `[0, 1 - 1e-12]`.
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("circularity coefficients"));
        }
        for c in coefficients.iter_mut() {
            *c = c.clamp(0.0, COEFF_CLAMP);
        }
        coefficients.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn n_dim(&self) -> usize {
        self.coefficients.len()
    }
}

/// `l_k` and `d_k` for one candidate degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderStep {
    pub k: usize,
    pub llr: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeEstimate {
    pub spectrum: CircularitySpectrum,
    pub evidence: Vec<LadderStep>,
    pub per_criterion: BTreeMap<Criterion, CriterionScores>,
}

impl DegreeEstimate {
    pub fn selected(&self, criterion: Criterion) -> Option<usize> {
        self.per_criterion.get(&criterion).map(|s| s.selected)
    }
}

/// Mean-centred sample covariance and pseudo-covariance (divisor `M`).
pub fn sample_stats(x: &ComplexDataset) -> Result<SecondOrderStats> {
    let m = x.n_samples();
    if m < 2 {
        return Err(Error::TooFewSamples { got: m, need: 2 });
    }
    let n = x.n_dim();
    let mut mu = vec![Complex64::new(0.0, 0.0); n];
    for s in x.samples() {
        for (acc, v) in mu.iter_mut().zip(s) {
            *acc += v;
        }
    }
    let mf = m as f64;
    for v in mu.iter_mut() {
        *v /= mf;
    }

    let mut c_hat = ComplexMatrix::zeros(n, n);
    let mut p_hat = ComplexMatrix::zeros(n, n);
    let mut centred = vec![Complex64::new(0.0, 0.0); n];
    for s in x.samples() {
        for j in 0..n {
            centred[j] = s[j] - mu[j];
        }
        for i in 0..n {
            for j in i..n {
                c_hat[(i, j)] += centred[i] * centred[j].conj();
                p_hat[(i, j)] += centred[i] * centred[j];
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            c_hat[(i, j)] /= mf;
            p_hat[(i, j)] /= mf;
            c_hat[(j, i)] = c_hat[(i, j)].conj();
            p_hat[(j, i)] = p_hat[(i, j)];
        }
        c_hat[(i, i)].im = 0.0;
    }
    Ok(SecondOrderStats {
        c_hat,
        p_hat,
        mu,
        n_samples: m,
    })
}

/// Singular values of the coherence matrix of `(Ĉ, P̂)`.
pub fn circularity_spectrum(stats: &SecondOrderStats) -> Result<CircularitySpectrum> {
    coherence_spectrum(&stats.c_hat, &stats.p_hat).map_err(|e| match e {
        Error::NearSingular { smallest, .. } => Error::SingularCovariance {
            smallest,
            n_samples: stats.n_samples,
            n_dim: stats.c_hat.nrows(),
        },
        other => other,
    })
}

/// Circularity coefficients from a covariance / pseudo-covariance pair.
pub fn coherence_spectrum(c: &ComplexMatrix, p: &ComplexMatrix) -> Result<CircularitySpectrum> {
    let w = hermitian_inv_sqrt(c)?;
    let coherence = &w * p * w.transpose();
    CircularitySpectrum::new(singular_values(&coherence)?)
}

/// Running-sum evidence ladder for `k = 1..N`.
pub fn evidence_ladder(spectrum: &CircularitySpectrum, m: usize) -> Result<Vec<LadderStep>> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be >= 1".into()));
    }
    let n = spectrum.n_dim();
    let mf = m as f64;
    let mut acc = 0.0;
    Ok(spectrum
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, &lam)| {
            let k = i + 1;
            acc += -mf * (-lam * lam).ln_1p();
            LadderStep {
                k,
                llr: acc.max(0.0),
                dim: parameter_count(n, k),
            }
        })
        .collect())
}

/// `d_k = k (2N - k + 1)`.
pub fn parameter_count(n_dim: usize, k: usize) -> usize {
    k * (2 * n_dim + 1 - k)
}

/// Order selection on a ladder (doubled convention).
pub fn select_from_ladder(
    ladder: &[LadderStep],
    m: usize,
    criteria: &[Criterion],
    include_null: bool,
) -> Result<BTreeMap<Criterion, CriterionScores>> {
    let evidences = ladder
        .iter()
        .map(|s| ModelEvidence::doubled(s.llr, s.dim, m))
        .collect::<Result<Vec<_>>>()?;
    criteria
        .iter()
        .map(|&c| select_order(&evidences, c, include_null).map(|s| (c, s)))
        .collect()
}

/// Full pipeline from raw samples to per-criterion degree estimates.
pub fn estimate_degree(
    x: &ComplexDataset,
    criteria: &[Criterion],
    include_null: bool,
) -> Result<DegreeEstimate> {
    let (m, n) = (x.n_samples(), x.n_dim());
    if m <= n {
        return Err(Error::TooFewSamples { got: m, need: n + 1 });
    }
    let stats = sample_stats(x)?;
    let spectrum = circularity_spectrum(&stats)?;
    let evidence = evidence_ladder(&spectrum, m)?;
    let per_criterion = select_from_ladder(&evidence, m, criteria, include_null)?;
    Ok(DegreeEstimate {
        spectrum,
        evidence,
        per_criterion,
    })
}
