//! Command-line front end.
//!
//! Exit codes: 0 success, 2 config/argument error, 3 numerical failure,
//! 4 IO error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::criteria::Criterion;
use crate::dataset::ComplexDataset;
use crate::error::{Error, Result};
use crate::linear_eef::{
    bayes_factor_ceiling, bayes_factor_g_prior, eef_llr, grid_search_eta, mi_per_dimension,
    r_squared, LinearModel,
};
use crate::noncircularity::estimate_degree;
use crate::numerics::{stream_rng, RealMatrix};
use crate::simulation::{aggregate, run_trials, trial_dataset, BuiltinScenario, ScenarioConfig, DEFAULT_TRIALS};

/// Default master seed when neither `--seed` nor `MOSEL_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "mosel", version, about = "Bayesian EEF model order selection toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo probability-of-correct-order curves.
    Simulate(SimulateArgs),
    /// Estimate the degree of noncircularity of a dataset CSV.
    Estimate(EstimateArgs),
    /// Linear-model EEF on a random design, with the grid-search cross-check.
    LinearDemo(LinearDemoArgs),
    /// EEF versus g-prior Bayes factor under growing signal and growing g.
    Paradox(ParadoxArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// sim1, sim2, sim3, sim4 or custom
    #[arg(long, default_value = "sim1")]
    pub scenario: String,
    /// Scenario JSON (required for `custom`)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trials per true order (overrides the config file)
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "MOSEL_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker thread cap; results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also write the datasets of the first COUNT trials per true order
    #[arg(long, value_name = "COUNT", default_value_t = 0)]
    pub dump_data: usize,
    /// Also write a gnuplot script for the curve
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "beef,mdl,aic,aicc")]
    pub criteria: Vec<String>,
    #[arg(long)]
    pub include_null: bool,
    /// JSON output path (default: <input>.estimate.json)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LinearDemoArgs {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, env = "MOSEL_SEED")]
    pub seed: Option<u64>,
    /// Standard deviation of the regression coefficients
    #[arg(long, default_value_t = 1.0)]
    pub signal_scale: f64,
}

#[derive(Debug, Args)]
pub struct ParadoxArgs {
    #[arg(long, default_value_t = 100.0)]
    pub g: f64,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    pub scales: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, env = "MOSEL_SEED")]
    pub seed: Option<u64>,
    /// Scale-sweep CSV path (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// g values for the fixed-data sweep
    #[arg(long, value_delimiter = ',', default_value = "1,100,1e4,1e8,1e16,1e32,1e64,1e128")]
    pub g_sweep: Vec<f64>,
    /// Fixed-data g-sweep CSV path
    #[arg(long)]
    pub g_out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
    pub duration_secs: f64,
}

pub fn run(cli: Cli) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, &mut out),
        Command::Estimate(a) => cmd_estimate(&a, &mut out),
        Command::LinearDemo(a) => cmd_linear_demo(&a, &mut out),
        Command::Paradox(a) => cmd_paradox(&a, &mut out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| io_err(path, e))
}

/// Resolves the scenario config from the CLI flags.
pub fn resolve_scenario(args: &SimulateArgs) -> Result<ScenarioConfig> {
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let mut cfg = if args.scenario == "custom" {
        let path = args
            .config
            .as_ref()
            .ok_or_else(|| Error::Config("--scenario custom needs --config <file.json>".into()))?;
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let mut cfg = ScenarioConfig::from_json(&text)?;
        if let Some(s) = args.seed {
            cfg.master_seed = s;
        }
        cfg
    } else {
        if args.config.is_some() {
            return Err(Error::Config("--config is only valid with --scenario custom".into()));
        }
        let builtin: BuiltinScenario = args.scenario.parse()?;
        builtin.config(DEFAULT_TRIALS, seed)
    };
    if let Some(t) = args.trials {
        cfg.n_trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_simulate<W: Write>(args: &SimulateArgs, out: &mut W) -> Result<()> {
    let start = Instant::now();
    let cfg = resolve_scenario(args)?;
    fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;

    let outcomes = run_trials(&cfg, args.threads)?;
    let curve = aggregate(&cfg, &outcomes);

    let mut outputs = Vec::new();
    let curve_path = args.out.join("pc_curve.csv");
    curve.write_csv(create(&curve_path)?)?;
    outputs.push(curve_path.display().to_string());

    if args.dump_data > 0 {
        let data_dir = args.out.join("data");
        fs::create_dir_all(&data_dir).map_err(|e| io_err(&data_dir, e))?;
        let sel_path = data_dir.join("selections.csv");
        let mut sel = csv::Writer::from_writer(create(&sel_path)?);
        sel.write_record(["file", "true_k", "trial", "criterion", "selected_k"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for o in outcomes.iter().filter(|o| o.trial_index < args.dump_data) {
            let name = format!("k{}_t{}.csv", o.true_k, o.trial_index);
            let path = data_dir.join(&name);
            trial_dataset(&cfg, o.true_k, o.trial_index)?.write_csv(create(&path)?)?;
            outputs.push(path.display().to_string());
            for (c, k) in &o.selections {
                sel.write_record([
                    name.clone(),
                    o.true_k.to_string(),
                    o.trial_index.to_string(),
                    c.name().to_string(),
                    k.to_string(),
                ])
                .map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        sel.flush()?;
        outputs.push(sel_path.display().to_string());
    }

    if args.gnuplot {
        let gp_path = args.out.join("pc_curve.gp");
        let mut f = create(&gp_path)?;
        write_gnuplot(&cfg, &mut f)?;
        outputs.push(gp_path.display().to_string());
    }

    for &c in &cfg.criteria {
        let row: Vec<String> = cfg
            .true_orders
            .iter()
            .map(|&k| format!("{:.3}", curve.p_c(c, k).unwrap_or(f64::NAN)))
            .collect();
        writeln!(out, "{:<5} p_c by true k: {}", c.name(), row.join(" "))?;
    }

    let manifest_path = args.out.join("manifest.json");
    outputs.push(manifest_path.display().to_string());
    let manifest = RunManifest {
        command: "simulate".into(),
        config: serde_json::to_value(&cfg).map_err(|e| Error::Io(e.to_string()))?,
        master_seed: cfg.master_seed,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs,
        duration_secs: start.elapsed().as_secs_f64(),
    };
    write_json(&manifest_path, &manifest)?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(())
}

fn write_gnuplot<W: Write>(cfg: &ScenarioConfig, w: &mut W) -> Result<()> {
    writeln!(w, "set datafile separator ','")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set xlabel 'true k'")?;
    writeln!(w, "set ylabel 'probability of correct order'")?;
    writeln!(w, "set yrange [0:1.05]")?;
    let plots: Vec<String> = cfg
        .criteria
        .iter()
        .map(|c| {
            format!(
                "'pc_curve.csv' using (strcol(1) eq '{0}' ? $2 : 1/0):3 with linespoints title '{0}'",
                c.name()
            )
        })
        .collect();
    writeln!(w, "plot {}", plots.join(", \\\n     "))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(f)?;
    Ok(())
}

pub fn parse_criteria(names: &[String]) -> Result<Vec<Criterion>> {
    let mut out = Vec::new();
    for n in names {
        let c: Criterion = n.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no criteria given".into()));
    }
    Ok(out)
}

pub fn cmd_estimate<W: Write>(args: &EstimateArgs, out: &mut W) -> Result<()> {
    let criteria = parse_criteria(&args.criteria)?;
    let file = fs::File::open(&args.input).map_err(|e| io_err(&args.input, e))?;
    let data = ComplexDataset::read_csv(std::io::BufReader::new(file))?;
    let est = estimate_degree(&data, &criteria, args.include_null)?;

    let json = serde_json::to_string_pretty(&est).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{json}")?;
    let path = args.out.clone().unwrap_or_else(|| {
        let mut p = args.input.clone().into_os_string();
        p.push(".estimate.json");
        PathBuf::from(p)
    });
    write_json(&path, &est)?;
    Ok(())
}

fn gaussian_design<R: Rng>(rng: &mut R, n: usize, k: usize) -> RealMatrix {
    RealMatrix::from_fn(n, k, |_, _| rng.sample(StandardNormal))
}

pub fn cmd_linear_demo<W: Write>(args: &LinearDemoArgs, out: &mut W) -> Result<()> {
    if !(args.sigma2 > 0.0) || !args.sigma2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "--sigma2 must be positive, got {}",
            args.sigma2
        )));
    }
    if args.k == 0 || args.k > args.n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got n = {}, k = {}",
            args.n, args.k
        )));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let mut rng = stream_rng(seed, 0, 0);
    let h = gaussian_design(&mut rng, args.n, args.k);
    let theta = DVector::from_fn(args.k, |_, _| args.signal_scale * rng.sample::<f64, _>(StandardNormal));
    let signal = &h * theta;
    let noise_sd = args.sigma2.sqrt();
    let x: Vec<f64> = signal
        .iter()
        .map(|s| s + noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let model = LinearModel::new(h, args.sigma2)?;

    let b = eef_llr(&x, &model)?;
    let grid = grid_search_eta(&x, &model, 1e-4)?;
    let delta = (b.eta_hat - grid).abs();
    writeln!(out, "n = {}, k = {}, sigma2 = {}, seed = {seed}", args.n, args.k, args.sigma2)?;
    writeln!(out, "l_G        = {:.10}", b.l_g)?;
    writeln!(out, "eta_hat    = {:.10}", b.eta_hat)?;
    writeln!(out, "snr_hat    = {:.10}", b.snr_hat)?;
    writeln!(out, "mi_hat     = {:.10}", b.mi_hat)?;
    if b.is_active() {
        writeln!(out, "mi_per_dim = {:.10}", mi_per_dimension(&b)?)?;
    } else {
        writeln!(out, "step inactive (l_G <= k/2): eef = 0")?;
    }
    writeln!(out, "eef        = {:.10}", b.eef)?;
    writeln!(out, "snr - mi   = {:.10}", b.snr_hat - b.mi_hat)?;
    writeln!(out, "grid eta   = {grid:.4}")?;
    writeln!(out, "|delta eta| = {delta:.3e}")?;
    if delta > 1e-4 {
        return Err(Error::Numerical(format!(
            "grid search disagrees with closed-form eta by {delta:.3e}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParadoxRow {
    pub scale: f64,
    pub eef: f64,
    pub bayes_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GSweepRow {
    pub g: f64,
    pub eef: f64,
    pub bayes_factor: f64,
}

/// Scale sweep and fixed-data g sweep behind `paradox`.
pub fn paradox_tables(args: &ParadoxArgs) -> Result<(Vec<ParadoxRow>, Vec<GSweepRow>)> {
    if !(args.g > 0.0) {
        return Err(Error::InvalidArgument(format!("--g must be positive, got {}", args.g)));
    }
    if args.k == 0 || args.n <= args.k + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k >= 1 and n > k + 1, got n = {}, k = {}",
            args.n, args.k
        )));
    }
    if !(args.sigma2 > 0.0) {
        return Err(Error::InvalidArgument("--sigma2 must be positive".into()));
    }
    if args.scales.is_empty() || args.scales.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::InvalidArgument("--scales must be non-negative numbers".into()));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let mut rng = stream_rng(seed, 1, 0);
    let h = gaussian_design(&mut rng, args.n, args.k);
    let signal = &h * DVector::from_element(args.k, 1.0);
    let noise_sd = args.sigma2.sqrt();
    let noise: Vec<f64> = (0..args.n)
        .map(|_| noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let model = LinearModel::new(h, args.sigma2)?;
    let data_at = |s: f64| -> Vec<f64> { signal.iter().zip(&noise).map(|(a, w)| s * a + w).collect() };

    let mut rows = Vec::with_capacity(args.scales.len());
    for &scale in &args.scales {
        let x = data_at(scale);
        let eef = eef_llr(&x, &model)?.eef;
        let bf = bayes_factor_g_prior(r_squared(&x, &model)?, args.n, args.k, args.g)?;
        rows.push(ParadoxRow {
            scale,
            eef,
            bayes_factor: bf,
        });
    }

    let reference = data_at(*args.scales.last().expect("non-empty"));
    let eef = eef_llr(&reference, &model)?.eef;
    let r2 = r_squared(&reference, &model)?;
    let g_rows = args
        .g_sweep
        .iter()
        .map(|&g| {
            Ok(GSweepRow {
                g,
                eef,
                bayes_factor: bayes_factor_g_prior(r2, args.n, args.k, g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, g_rows))
}

fn write_rows<W: Write, T: Serialize>(w: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        wr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn cmd_paradox<W: Write>(args: &ParadoxArgs, out: &mut W) -> Result<()> {
    let (rows, g_rows) = paradox_tables(args)?;
    let header = ["scale", "eef", "bayes_factor"];
    match &args.out {
        Some(p) => {
            write_rows(create(p)?, &header, &rows)?;
            write_rows(&mut *out, &header, &rows)?;
        }
        None => write_rows(&mut *out, &header, &rows)?,
    }
    writeln!(
        out,
        "# bayes factor ceiling (1+g)^((n-1-k)/2) = {:.6e}",
        bayes_factor_ceiling(args.n, args.k, args.g)
    )?;
    if let Some(p) = &args.g_out {
        write_rows(create(p)?, &["g", "eef", "bayes_factor"], &g_rows)?;
    }
    for r in &g_rows {
        writeln!(out, "# g = {:.3e}: eef = {:.6}, bayes_factor = {:.6e}", r.g, r.eef, r.bayes_factor)?;
    }
    Ok(())
}
