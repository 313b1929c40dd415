//! Bayesian EEF for the linear Gaussian model with known noise variance.
//!
//! Candidate `x = H θ + w`, `w ~ N(0, σ² I)`, embedded against the null
//! `x = w`. With a g-prior of unbounded spread the embedded family is
//! `N(0, σ² I + η/(1-η) σ² P)` where `P` projects onto the columns of `H`.
//! Everything here depends on the data only through `x^T P x / σ²`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::RealMatrix;

/// Minimum smallest/largest singular value ratio of an admissible design.
pub const RANK_TOL: f64 = 1e-10;

/// A candidate linear model: design matrix plus known noise variance.
#[derive(Debug, Clone)]
pub struct LinearModel {
    h: RealMatrix,
    sigma2: f64,
    // orthonormal basis of the column space of h (N x k)
    basis: RealMatrix,
}

impl LinearModel {
    pub fn new(h: RealMatrix, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be positive and finite, got {sigma2}"
            )));
        }
        let (n, k) = h.shape();
        if k == 0 || k > n {
            return Err(Error::DimensionMismatch(format!(
                "design must be N x k with 1 <= k <= N, got {n}x{k}"
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
        let sv = h.clone().svd(false, false).singular_values;
        let largest = sv.max();
        let smallest = sv.min();
        let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
        if ratio <= RANK_TOL {
            return Err(Error::RankDeficientDesign { ratio });
        }
        let basis = h.clone().qr().q();
        Ok(Self { h, sigma2, basis })
    }

    pub fn design(&self) -> &RealMatrix {
        &self.h
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn n_obs(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.h.ncols()
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_obs() {
            return Err(Error::DimensionMismatch(format!(
                "data has length {}, model expects {}",
                x.len(),
                self.n_obs()
            )));
        }
        Ok(())
    }

    /// `x^T P x`, via the orthonormal basis: `‖Q^T x‖²`.
    pub fn projected_energy(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let coords = self.basis.tr_mul(&DVector::from_column_slice(x));
        Ok(coords.norm_squared())
    }
}

/// Per-model EEF quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EefBreakdown {
    /// Maximized log-likelihood ratio `l_G` against the null.
    pub l_g: f64,
    /// Parameter dimension.
    pub k: usize,
    pub eta_hat: f64,
    /// Estimated SNR term; zero on the inactive branch.
    pub snr_hat: f64,
    /// Estimated mutual-information term; zero on the inactive branch.
    pub mi_hat: f64,
    pub eef: f64,
}

impl EefBreakdown {
    /// Builds the breakdown from `l_G` and `k` alone.
    pub fn from_statistic(l_g: f64, k: usize) -> Self {
        let half_k = k as f64 / 2.0;
        if l_g > half_k {
            let snr_hat = l_g - half_k;
            let mi_hat = half_k * (l_g / half_k).ln();
            Self {
                l_g,
                k,
                eta_hat: 1.0 - half_k / l_g,
                snr_hat,
                mi_hat,
                eef: snr_hat - mi_hat,
            }
        } else {
            Self {
                l_g,
                k,
                eta_hat: 0.0,
                snr_hat: 0.0,
                mi_hat: 0.0,
                eef: 0.0,
            }
        }
    }

    pub fn is_active(&self) -> bool {
        self.l_g > self.k as f64 / 2.0
    }
}

/// Parameters of one member of the embedded family.
#[derive(Debug, Clone)]
pub struct EmbeddedDensityParams<'a> {
    pub eta: f64,
    pub model: &'a LinearModel,
}

/// `l_G = x^T P x / (2σ²)`.
pub fn projection_statistic(x: &[f64], model: &LinearModel) -> Result<f64> {
    Ok(model.projected_energy(x)? / (2.0 * model.sigma2))
}

/// Closed-form MLE of the embedding parameter.
pub fn estimate_eta(x: &[f64], model: &LinearModel) -> Result<f64> {
    let q = model.projected_energy(x)?;
    let threshold = model.n_params() as f64 * model.sigma2;
    if q < threshold {
        Ok(0.0)
    } else {
        Ok((q - threshold) / q)
    }
}

/// Log-density of `N(0, σ² I + η/(1-η) σ² P)` at `x`.
///
/// Uses `(I + a P)^{-1} = I - η P` and `|I + a P| = (1-η)^{-k}` for the
/// rank-k projection, so no dense factorization is needed.
pub fn embedded_log_density(x: &[f64], params: &EmbeddedDensityParams<'_>) -> Result<f64> {
    let eta = params.eta;
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!(
            "embedding parameter must lie in [0, 1), got {eta}"
        )));
    }
    let model = params.model;
    let q = model.projected_energy(x)?;
    let total: f64 = x.iter().map(|v| v * v).sum();
    Ok(log_density_from_energies(model, total, q, eta))
}

// ‖x‖² and x^T P x are sufficient for the whole family.
fn log_density_from_energies(model: &LinearModel, total: f64, projected: f64, eta: f64) -> f64 {
    let n = model.n_obs() as f64;
    let k = model.n_params() as f64;
    let s2 = model.sigma2;
    -0.5 * n * (2.0 * PI * s2).ln() + 0.5 * k * (1.0 - eta).ln() - 0.5 * (total - eta * projected) / s2
}

/// Null log-density `ln N(x; 0, σ² I)`.
pub fn null_log_density(x: &[f64], sigma2: f64) -> f64 {
    let n = x.len() as f64;
    let total: f64 = x.iter().map(|v| v * v).sum();
    -0.5 * n * (2.0 * PI * sigma2).ln() - 0.5 * total / sigma2
}

/// The reduced Bayesian EEF log-likelihood ratio and its parts.
pub fn eef_llr(x: &[f64], model: &LinearModel) -> Result<EefBreakdown> {
    let l_g = projection_statistic(x, model)?;
    Ok(EefBreakdown::from_statistic(l_g, model.n_params()))
}

/// `(SNR̂, MÎ)` with `SNR̂ = l_G - k/2` and `MÎ = (k/2) ln(2 l_G / k)`.
pub fn eef_decomposition(breakdown: &EefBreakdown) -> Result<(f64, f64)> {
    let half_k = breakdown.k as f64 / 2.0;
    if breakdown.l_g <= half_k {
        return Err(Error::InactiveBranch {
            l_g: breakdown.l_g,
            half_k,
        });
    }
    let snr = breakdown.l_g - half_k;
    let mi = half_k * (breakdown.l_g / half_k).ln();
    Ok((snr, mi))
}

/// `(k/2) ln(1 / (1 - η̂))`, the MI term written through the embedding MLE.
pub fn mi_from_eta(k: usize, eta_hat: f64) -> f64 {
    -(k as f64 / 2.0) * (1.0 - eta_hat).ln()
}

/// `(k/2) ln(x^T P x / (k σ²))`, the MI term from the raw projected energy.
pub fn mi_from_projected_energy(k: usize, projected_energy: f64, sigma2: f64) -> f64 {
    let kf = k as f64;
    0.5 * kf * (projected_energy / (kf * sigma2)).ln()
}

/// Estimated mutual information per parameter dimension,
/// `½ ln(1 + SNR̂ / (k/2))`.
pub fn mi_per_dimension(breakdown: &EefBreakdown) -> Result<f64> {
    let (snr, _) = eef_decomposition(breakdown)?;
    Ok(0.5 * (snr / (breakdown.k as f64 / 2.0)).ln_1p())
}

/// Maximizes the embedded log-density over the grid `{0, step, 2 step, ...} < 1`.
///
/// A brute-force counterpart to [`estimate_eta`].
pub fn grid_search_eta(x: &[f64], model: &LinearModel, step: f64) -> Result<f64> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::InvalidArgument(format!("grid step must be in (0, 1), got {step}")));
    }
    let projected = model.projected_energy(x)?;
    let total: f64 = x.iter().map(|v| v * v).sum();
    let n_points = (1.0 / step).ceil() as usize;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n_points {
        let eta = i as f64 * step;
        if eta >= 1.0 {
            break;
        }
        let ll = log_density_from_energies(model, total, projected, eta);
        if ll > best.1 {
            best = (eta, ll);
        }
    }
    Ok(best.0)
}

/// Coefficient of determination `x^T P x / x^T x`.
pub fn r_squared(x: &[f64], model: &LinearModel) -> Result<f64> {
    let total: f64 = x.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(model.projected_energy(x)? / total)
}

/// Natural log of the g-prior Bayes factor of a regression model against the null.
pub fn ln_bayes_factor_g_prior(r_squared: f64, n: usize, k: usize, g: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r_squared) {
        return Err(Error::InvalidR2(r_squared));
    }
    if !(g > 0.0) {
        return Err(Error::InvalidArgument(format!("g must be positive, got {g}")));
    }
    if n <= k + 1 {
        return Err(Error::InvalidArgument(format!("need n > k + 1, got n = {n}, k = {k}")));
    }
    let a = (n - 1 - k) as f64 / 2.0;
    let b = (n - 1) as f64 / 2.0;
    Ok(a * g.ln_1p() - b * (g * (1.0 - r_squared)).ln_1p())
}

/// `(1+g)^{(n-1-k)/2} / (1 + g(1-R²))^{(n-1)/2}`.
pub fn bayes_factor_g_prior(r_squared: f64, n: usize, k: usize, g: f64) -> Result<f64> {
    ln_bayes_factor_g_prior(r_squared, n, k, g).map(f64::exp)
}

/// Supremum of the g-prior Bayes factor over `R² → 1`: `(1+g)^{(n-1-k)/2}`.
pub fn bayes_factor_ceiling(n: usize, k: usize, g: f64) -> f64 {
    ((n.saturating_sub(1 + k)) as f64 / 2.0 * g.ln_1p()).exp()
}

/// Dense `N x k` helper used by demos: builds a model from a row-major slice.
pub fn model_from_rows(n: usize, k: usize, rows: &[f64], sigma2: f64) -> Result<LinearModel> {
    if rows.len() != n * k {
        return Err(Error::DimensionMismatch(format!(
            "expected {} entries for a {n}x{k} design, got {}",
            n * k,
            rows.len()
        )));
    }
    LinearModel::new(DMatrix::from_row_slice(n, k, rows), sigma2)
}
