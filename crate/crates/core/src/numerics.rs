//! Dense linear-algebra and sampling kernel.
//!
//! Matrices are small (N up to a few dozen), so everything is plain
//! `nalgebra` dense storage. Hermitian eigendecompositions back the inverse
//! square root used for the coherence matrix; the complex sampler factors the
//! real 2N-dimensional composite covariance by symmetric eigendecomposition,
//! which tolerates the PSD-singular case of a unit circularity coefficient.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::ComplexDataset;
use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Hermitian symmetry tolerance, relative to the largest entry magnitude.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest/largest eigenvalue ratio below which a PD matrix is treated as singular.
pub const SINGULARITY_RATIO: f64 = 1e-12;
/// Negative eigenvalue slack when checking a covariance for PSD.
pub const PSD_TOL: f64 = 1e-10;

/// Eigen-pairs of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// `U diag(f(λ)) U^H`.
    pub fn reconstruct_with<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * u.adjoint()
    }
}

fn max_abs<T: Copy, F: Fn(T) -> f64>(it: impl Iterator<Item = T>, f: F) -> f64 {
    it.map(f).fold(0.0, f64::max)
}

fn check_finite_complex(a: &ComplexMatrix, what: &'static str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols || rows == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a non-empty square matrix, got {rows}x{cols}"
        )));
    }
    Ok(())
}

/// Largest `|a_ij - conj(a_ji)|`.
pub fn hermitian_asymmetry(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest `|a_ij - a_ji|`.
pub fn complex_asymmetry(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).norm());
        }
    }
    worst
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    check_square(a.nrows(), a.ncols())?;
    check_finite_complex(a, "matrix")?;
    let scale = max_abs(a.iter(), |z| z.norm()).max(1.0);
    let asym = hermitian_asymmetry(a);
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianSpectrum> {
    check_hermitian(a)?;
    // symmetrize exactly so the solver sees a Hermitian input
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Unique Hermitian positive-definite `B` with `B B = a^{-1}`.
pub fn hermitian_inv_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eigen(a)?;
    let largest = spec.eigenvalues[0];
    let smallest = spec.eigenvalues[spec.eigenvalues.len() - 1];
    if !(largest > 0.0) || smallest <= SINGULARITY_RATIO * largest {
        return Err(Error::NearSingular { smallest, largest });
    }
    let b = spec.reconstruct_with(|lam| 1.0 / lam.sqrt());
    Ok((&b + b.adjoint()).scale(0.5))
}

/// Singular values, non-negative and sorted descending; `min(rows, cols)` of them.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_finite_complex(a, "matrix")?;
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = nalgebra::SVD::new(a.clone(), false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().map(|s| s.max(0.0)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// `x^T a x` with the symmetric part of `a`.
pub fn quadratic_form(x: &[f64], a: &RealMatrix) -> Result<f64> {
    let n = x.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {n} against {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..n {
        diag += a[(i, i)] * x[i] * x[i];
        for j in i + 1..n {
            off += 0.5 * (a[(i, j)] + a[(j, i)]) * x[i] * x[j];
        }
    }
    Ok(diag + 2.0 * off)
}

/// Real covariance of `[Re z; Im z]` for `z ~ CN(0, c, p)`.
pub fn composite_covariance(c: &ComplexMatrix, p: &ComplexMatrix) -> RealMatrix {
    let n = c.nrows();
    let mut r = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (cij, pij) = (c[(i, j)], p[(i, j)]);
            // E[u u^T], E[v v^T], E[u v^T]
            r[(i, j)] = 0.5 * (cij.re + pij.re);
            r[(n + i, n + j)] = 0.5 * (cij.re - pij.re);
            r[(i, n + j)] = 0.5 * (pij.im - cij.im);
        }
    }
    for i in 0..n {
        for j in 0..n {
            r[(n + j, i)] = r[(i, n + j)];
        }
    }
    r
}

/// Factored sampler for zero-mean complex Gaussian vectors with given
/// covariance and pseudo-covariance.
#[derive(Debug, Clone)]
pub struct ComplexGaussianSampler {
    n_dim: usize,
    factor: RealMatrix,
}

impl ComplexGaussianSampler {
    pub fn new(c: &ComplexMatrix, p: &ComplexMatrix) -> Result<Self> {
        check_hermitian(c)?;
        let n = c.nrows();
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {n}x{n} but pseudo-covariance is {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        check_finite_complex(p, "pseudo-covariance")?;
        let scale = max_abs(c.iter().chain(p.iter()), |z| z.norm()).max(1.0);
        if complex_asymmetry(p) > HERMITIAN_TOL * scale {
            return Err(Error::InvalidSecondOrder(
                "pseudo-covariance is not symmetric".into(),
            ));
        }

        let r = composite_covariance(c, p);
        let dim = 2 * n;
        let is_diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || r[(i, j)] == 0.0));
        if is_diagonal {
            let mut factor = RealMatrix::zeros(dim, dim);
            for i in 0..dim {
                let v = r[(i, i)];
                if v < -PSD_TOL * scale {
                    return Err(Error::InvalidSecondOrder(format!(
                        "composite covariance has variance {v:.3e} < 0 \
                         (a circularity coefficient exceeds 1?)"
                    )));
                }
                factor[(i, i)] = v.max(0.0).sqrt();
            }
            return Ok(Self { n_dim: n, factor });
        }
        let eig = SymmetricEigen::new(r);
        let mut factor = eig.eigenvectors;
        for (j, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam < -PSD_TOL * scale {
                return Err(Error::InvalidSecondOrder(format!(
                    "composite covariance has eigenvalue {lam:.3e} < 0 \
                     (a circularity coefficient exceeds 1?)"
                )));
            }
            factor.column_mut(j).scale_mut(lam.max(0.0).sqrt());
        }
        Ok(Self { n_dim: n, factor })
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    /// One sample vector; consumes exactly `2N` standard normals.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let n = self.n_dim;
        let g = DVector::from_iterator(2 * n, (0..2 * n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let z = &self.factor * g;
        (0..n).map(|j| Complex64::new(z[j], z[n + j])).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, n_samples: usize, rng: &mut R) -> Result<ComplexDataset> {
        let samples = (0..n_samples).map(|_| self.sample_one(rng)).collect();
        ComplexDataset::new(samples)
    }
}

/// Draws `n_samples` IID vectors from `CN(0, c, p)`.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(
    c: &ComplexMatrix,
    p: &ComplexMatrix,
    n_samples: usize,
    rng: &mut R,
) -> Result<ComplexDataset> {
    ComplexGaussianSampler::new(c, p)?.sample(n_samples, rng)
}

/// Per-work-unit generator.
///
/// Every unit gets ChaCha8 keyed by `master_seed` with stream id
/// `(tag << 32) | index`, so a unit's draws depend only on
/// `(master_seed, tag, index)` and never on scheduling.
pub fn stream_rng(master_seed: u64, tag: u32, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(tag) << 32) | u64::from(index));
    rng
}
