//! Model order selection with the Bayesian exponentially embedded family (EEF).
//!
//! * [`linear_eef`]: closed-form EEF for the linear Gaussian model, its
//!   SNR / mutual-information split and the g-prior Bayes factor it is
//!   contrasted with.
//! * [`criteria`]: the asymptotic Bayesian EEF score with AIC, AICc and MDL
//!   baselines and argmax selection.
//! * [`noncircularity`]: estimating how many circularity coefficients of a
//!   complex Gaussian vector are nonzero.
//! * [`simulation`]: seeded Monte Carlo curves of the probability of
//!   selecting the true order.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod criteria;
pub mod dataset;
pub mod error;
pub mod linear_eef;
pub mod noncircularity;
pub mod numerics;
pub mod simulation;

pub use criteria::{Criterion, CriterionScores, LlrConvention, ModelEvidence};
pub use dataset::ComplexDataset;
pub use error::{Error, Result};
pub use linear_eef::{EefBreakdown, LinearModel};
pub use noncircularity::{CircularitySpectrum, DegreeEstimate};
pub use simulation::{BuiltinScenario, PcCurve, ScenarioConfig};
