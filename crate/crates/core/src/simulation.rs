//! Seeded Monte Carlo harness for probability-of-correct-order curves.
//!
//! Each trial samples `M` vectors from `CN(0, I, diag(λ))` with the `k`
//! nonzero circularity coefficients drawn from `U(coeff_low, coeff_high)`,
//! and records the order chosen by every rule. By default `λ` is redrawn for
//! every vector, so the vectors are IID draws from the resulting mixture;
//! `redraw_per_sample = false` fixes one draw for the whole trial. A trial's random stream is
//! keyed by `(master_seed, true_k, trial_index)` only (see
//! [`crate::numerics::stream_rng`]), so curves are identical under any
//! thread count or execution order.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::Criterion;
use crate::dataset::ComplexDataset;
use crate::error::{Error, Result};
use crate::noncircularity::estimate_degree;
use crate::numerics::{stream_rng, ComplexGaussianSampler, ComplexMatrix};

pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_dim: usize,
    pub n_samples: usize,
    pub coeff_low: f64,
    pub coeff_high: f64,
    pub n_trials: usize,
    pub true_orders: Vec<usize>,
    pub criteria: Vec<Criterion>,
    pub master_seed: u64,
    /// Draw fresh coefficients for every sample vector (default) rather than
    /// once per trial.
    #[serde(default = "default_redraw")]
    pub redraw_per_sample: bool,
    /// Let order 0 (circular) compete in the selection.
    #[serde(default)]
    pub include_null: bool,
}

fn default_redraw() -> bool {
    true
}

/// The four built-in setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinScenario {
    Sim1,
    Sim2,
    Sim3,
    Sim4,
}

impl BuiltinScenario {
    pub fn config(self, n_trials: usize, master_seed: u64) -> ScenarioConfig {
        let (n_samples, coeff_high) = match self {
            BuiltinScenario::Sim1 => (500, 0.99),
            BuiltinScenario::Sim2 => (500, 0.50),
            BuiltinScenario::Sim3 => (100, 0.99),
            BuiltinScenario::Sim4 => (1000, 0.99),
        };
        ScenarioConfig {
            n_dim: 6,
            n_samples,
            coeff_low: 0.05,
            coeff_high,
            n_trials,
            true_orders: (1..=6).collect(),
            criteria: Criterion::ALL.to_vec(),
            master_seed,
            redraw_per_sample: true,
            include_null: false,
        }
    }
}

impl std::str::FromStr for BuiltinScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sim1" => Ok(Self::Sim1),
            "sim2" => Ok(Self::Sim2),
            "sim3" => Ok(Self::Sim3),
            "sim4" => Ok(Self::Sim4),
            other => Err(Error::Config(format!("unknown scenario {other:?}"))),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_dim == 0 {
            return bad("n_dim must be >= 1".into());
        }
        if self.n_samples <= self.n_dim {
            return bad(format!(
                "n_samples ({}) must exceed n_dim ({})",
                self.n_samples, self.n_dim
            ));
        }
        if !(0.0 <= self.coeff_low && self.coeff_low < self.coeff_high && self.coeff_high < 1.0) {
            return bad(format!(
                "need 0 <= coeff_low < coeff_high < 1, got [{}, {}]",
                self.coeff_low, self.coeff_high
            ));
        }
        if self.n_trials == 0 {
            return bad("n_trials must be >= 1".into());
        }
        if self.true_orders.is_empty() {
            return bad("true_orders is empty".into());
        }
        if let Some(&k) = self.true_orders.iter().find(|&&k| k > self.n_dim) {
            return bad(format!("true order {k} exceeds n_dim {}", self.n_dim));
        }
        if self.criteria.is_empty() {
            return bad("criteria is empty".into());
        }
        if u32::try_from(self.n_trials).is_err() {
            return bad("n_trials too large".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Orders chosen by each rule in one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub true_k: usize,
    pub trial_index: usize,
    pub selections: BTreeMap<Criterion, usize>,
}

fn draw_coefficients<R: Rng + ?Sized>(cfg: &ScenarioConfig, true_k: usize, rng: &mut R) -> Vec<f64> {
    let width = cfg.coeff_high - cfg.coeff_low;
    let mut lam: Vec<f64> = (0..true_k)
        .map(|_| cfg.coeff_low + width * rng.random::<f64>())
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    lam.resize(cfg.n_dim, 0.0);
    lam
}

fn pseudo_covariance(lam: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_iterator(
        lam.len(),
        lam.iter().map(|&l| Complex64::new(l, 0.0)),
    ))
}

/// Generates the data set of one trial.
pub fn trial_dataset(cfg: &ScenarioConfig, true_k: usize, trial_index: usize) -> Result<ComplexDataset> {
    if true_k > cfg.n_dim {
        return Err(Error::InvalidArgument(format!(
            "true order {true_k} exceeds n_dim {}",
            cfg.n_dim
        )));
    }
    let index = u32::try_from(trial_index)
        .map_err(|_| Error::InvalidArgument("trial index too large".into()))?;
    let mut rng = stream_rng(cfg.master_seed, true_k as u32, index);
    let c = ComplexMatrix::identity(cfg.n_dim, cfg.n_dim);
    if cfg.redraw_per_sample {
        let mut samples = Vec::with_capacity(cfg.n_samples);
        for _ in 0..cfg.n_samples {
            let lam = draw_coefficients(cfg, true_k, &mut rng);
            let sampler = ComplexGaussianSampler::new(&c, &pseudo_covariance(&lam))?;
            samples.push(sampler.sample_one(&mut rng));
        }
        ComplexDataset::new(samples)
    } else {
        let lam = draw_coefficients(cfg, true_k, &mut rng);
        let sampler = ComplexGaussianSampler::new(&c, &pseudo_covariance(&lam))?;
        sampler.sample(cfg.n_samples, &mut rng)
    }
}

/// One Monte Carlo trial.
pub fn run_trial(cfg: &ScenarioConfig, true_k: usize, trial_index: usize) -> Result<TrialOutcome> {
    let wrap = |e: Error| Error::Trial {
        true_k,
        trial_index,
        source: Box::new(e),
    };
    let data = trial_dataset(cfg, true_k, trial_index).map_err(wrap)?;
    let est = estimate_degree(&data, &cfg.criteria, cfg.include_null).map_err(wrap)?;
    let selections = est
        .per_criterion
        .iter()
        .map(|(&c, s)| (c, s.selected))
        .collect();
    Ok(TrialOutcome {
        true_k,
        trial_index,
        selections,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcRow {
    pub criterion: Criterion,
    pub true_k: usize,
    pub p_c: f64,
    pub mean_selected_k: f64,
    pub n_trials: usize,
}

/// Probability of correct order per rule and true order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcCurve {
    pub rows: Vec<PcRow>,
}

impl PcCurve {
    pub fn get(&self, criterion: Criterion, true_k: usize) -> Option<&PcRow> {
        self.rows
            .iter()
            .find(|r| r.criterion == criterion && r.true_k == true_k)
    }

    pub fn p_c(&self, criterion: Criterion, true_k: usize) -> Option<f64> {
        self.get(criterion, true_k).map(|r| r.p_c)
    }

    /// Average of `p_c` over all true orders for one rule.
    pub fn mean_p_c(&self, criterion: Criterion) -> Option<f64> {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.criterion == criterion)
            .map(|r| r.p_c)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["criterion", "true_k", "p_c", "mean_selected_k", "n_trials"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record([
                r.criterion.name().to_string(),
                r.true_k.to_string(),
                format!("{:.6}", r.p_c),
                format!("{:.6}", r.mean_selected_k),
                r.n_trials.to_string(),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn in_pool<T: Send, F: FnOnce() -> T + Send>(threads: Option<usize>, f: F) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// All trial outcomes of a scenario, ordered by `(true_k, trial_index)`.
pub fn run_trials(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let units: Vec<(usize, usize)> = cfg
        .true_orders
        .iter()
        .flat_map(|&k| (0..cfg.n_trials).map(move |t| (k, t)))
        .collect();
    in_pool(threads, || {
        units
            .par_iter()
            .map(|&(k, t)| run_trial(cfg, k, t))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn aggregate(cfg: &ScenarioConfig, outcomes: &[TrialOutcome]) -> PcCurve {
    let mut rows = Vec::new();
    for &criterion in &cfg.criteria {
        for &k in &cfg.true_orders {
            let mut hits = 0usize;
            let mut total = 0usize;
            let mut n = 0usize;
            for o in outcomes.iter().filter(|o| o.true_k == k) {
                let sel = o.selections[&criterion];
                hits += usize::from(sel == k);
                total += sel;
                n += 1;
            }
            debug_assert_eq!(n, cfg.n_trials);
            rows.push(PcRow {
                criterion,
                true_k: k,
                p_c: hits as f64 / n as f64,
                mean_selected_k: total as f64 / n as f64,
                n_trials: n,
            });
        }
    }
    PcCurve { rows }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<PcCurve> {
    run_scenario_with_threads(cfg, None)
}

/// Like [`run_scenario`], with the worker count capped at `threads`.
pub fn run_scenario_with_threads(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<PcCurve> {
    let outcomes = run_trials(cfg, threads)?;
    Ok(aggregate(cfg, &outcomes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub criterion: Criterion,
    pub true_k: usize,
    /// Smallest tested M with `p_c >= target`; `None` when never reached.
    pub m_c: Option<usize>,
    pub m_grid: Vec<usize>,
    /// `p_c` at every grid point.
    pub p_c: Vec<f64>,
}

/// Smallest grid sample count at which each rule reaches `pc_target`.
pub fn convergence_sweep(
    cfg: &ScenarioConfig,
    true_k: usize,
    m_grid: &[usize],
    pc_target: f64,
    threads: Option<usize>,
) -> Result<Vec<ConvergencePoint>> {
    if m_grid.is_empty() || m_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("m_grid must be non-empty and strictly increasing".into()));
    }
    if !(0.0..=1.0).contains(&pc_target) {
        return Err(Error::Config(format!("pc_target must be in [0, 1], got {pc_target}")));
    }
    let mut per_m = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        let point_cfg = ScenarioConfig {
            n_samples: m,
            true_orders: vec![true_k],
            ..cfg.clone()
        };
        per_m.push(run_scenario_with_threads(&point_cfg, threads)?);
    }
    Ok(cfg
        .criteria
        .iter()
        .map(|&criterion| {
            let p_c: Vec<f64> = per_m
                .iter()
                .map(|curve| curve.p_c(criterion, true_k).unwrap_or(0.0))
                .collect();
            let m_c = m_grid
                .iter()
                .zip(&p_c)
                .find(|(_, &p)| p >= pc_target)
                .map(|(&m, _)| m);
            ConvergencePoint {
                criterion,
                true_k,
                m_c,
                m_grid: m_grid.to_vec(),
                p_c,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            n_dim: 3,
            n_samples: 60,
            coeff_low: 0.1,
            coeff_high: 0.9,
            n_trials: 12,
            true_orders: vec![1, 2, 3],
            criteria: Criterion::ALL.to_vec(),
            master_seed: seed,
            redraw_per_sample: false,
            include_null: false,
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small(3);
        assert_eq!(run_trial(&cfg, 2, 5).unwrap(), run_trial(&cfg, 2, 5).unwrap());
        assert_eq!(trial_dataset(&cfg, 2, 5).unwrap(), trial_dataset(&cfg, 2, 5).unwrap());
        assert_ne!(trial_dataset(&cfg, 2, 5).unwrap(), trial_dataset(&cfg, 2, 6).unwrap());
    }

    #[test]
    fn high_information_trial_is_correct() {
        let cfg = ScenarioConfig {
            n_dim: 6,
            n_samples: 5000,
            coeff_low: 0.98,
            coeff_high: 0.99,
            true_orders: vec![3],
            ..small(4)
        };
        let out = run_trial(&cfg, 3, 0).unwrap();
        assert_eq!(out.selections[&Criterion::Beef], 3);
    }

    #[test]
    fn degenerate_trial_yields_valid_orders() {
        let cfg = ScenarioConfig {
            n_samples: 4,
            coeff_low: 0.0,
            coeff_high: 1e-6,
            criteria: vec![Criterion::Beef, Criterion::Mdl, Criterion::Aic],
            ..small(5)
        };
        for t in 0..10 {
            let out = run_trial(&cfg, 2, t).unwrap();
            assert!(out.selections.values().all(|&k| (1..=3).contains(&k)));
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(1);
        cfg.n_trials = 0;
        assert!(matches!(run_scenario(&cfg), Err(Error::Config(_))));
        let mut cfg = small(1);
        cfg.coeff_high = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = small(1);
        cfg.true_orders = vec![4];
        assert!(cfg.validate().is_err());
        let mut cfg = small(1);
        cfg.n_samples = 3;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let cfg = small(9);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg);
        let bad = text.replacen('{', "{\"bogus\": 1,", 1);
        assert!(matches!(ScenarioConfig::from_json(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn curve_denominators_and_ranges() {
        let cfg = small(6);
        let curve = run_scenario(&cfg).unwrap();
        assert_eq!(curve.rows.len(), 4 * 3);
        for r in &curve.rows {
            assert_eq!(r.n_trials, 12);
            assert!((0.0..=1.0).contains(&r.p_c));
            assert!((1.0..=3.0).contains(&r.mean_selected_k));
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = small(7);
        let a = run_scenario_with_threads(&cfg, Some(1)).unwrap();
        let b = run_scenario_with_threads(&cfg, Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn redraw_per_sample_runs() {
        let cfg = ScenarioConfig {
            redraw_per_sample: true,
            n_trials: 3,
            ..small(8)
        };
        let curve = run_scenario(&cfg).unwrap();
        assert!(curve.rows.iter().all(|r| r.n_trials == 3));
        assert_ne!(trial_dataset(&cfg, 2, 0).unwrap(), trial_dataset(&small(8), 2, 0).unwrap());
    }

    #[test]
    fn sweep_zero_target_hits_first_point() {
        let cfg = ScenarioConfig { n_trials: 4, ..small(10) };
        let pts = convergence_sweep(&cfg, 2, &[20, 40], 0.0, None).unwrap();
        assert!(pts.iter().all(|p| p.m_c == Some(20)));
        assert!(convergence_sweep(&cfg, 2, &[40, 20], 0.5, None).is_err());
        assert!(convergence_sweep(&cfg, 2, &[20], 1.5, None).is_err());
    }

    #[test]
    fn refined_grid_never_raises_m_c() {
        let cfg = ScenarioConfig { n_trials: 10, ..small(11) };
        let coarse = convergence_sweep(&cfg, 2, &[40, 160, 640], 0.9, None).unwrap();
        let fine = convergence_sweep(&cfg, 2, &[40, 80, 160, 320, 640], 0.9, None).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            match (c.m_c, f.m_c) {
                (Some(a), Some(b)) => assert!(b <= a),
                (Some(_), None) => panic!("refinement lost convergence for {}", c.criterion),
                _ => {}
            }
        }
    }
}
