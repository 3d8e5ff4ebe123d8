//! Argument parsing, subcommand dispatch, and exit-code mapping.
//!
//! Exit codes: 0 success, 1 usage error, 2 config or file error,
//! 3 numerical failure.

use crate::config::ScenarioConfig;
use crate::formats::{
    open_out, write_analyze_csv, write_comparison_csv, write_er_csv, write_trajectory_csv,
    AnalyzeRow, EdgeMapFile,
};
use crate::scenario::{Scenario, STREAM_ANALYSIS, STREAM_INITIAL_STATE, STREAM_SIMULATION};
use crate::studies::{run_arccc_vs_frc, run_er_study};
use crate::AppError;
use clap::{Parser, Subcommand};
use randcon::{
    alpha_mss, convergence_gain, optimal_alpha_mean, optimize_alpha, run_consensus, solve_arccc,
    ArcccOptions, Budget, EdgeProbabilityMatrix, SampledSpectra, SeededRng,
};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "randcon",
    version,
    about = "Design and evaluate randomized communication topologies for average consensus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario config JSON (required by every subcommand)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file; stdout when omitted
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Override the config seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Override the config Monte-Carlo sample count
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Worker threads; default: one per core
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the budgeted connectivity design; writes probabilities as edge-map JSON
    Optimize {
        /// Expected-cost budget; default: the last configured budget,
        /// else half the total link cost
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Run one consensus trajectory; writes per-iteration states as CSV
    Simulate {
        /// Edge-map JSON of link probabilities; default: every
        /// realizable link always on
        #[arg(long, value_name = "PATH")]
        probabilities: Option<PathBuf>,
        /// Step size; default: the conservative always-stable one
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Estimate convergence factors and gains across step sizes; writes CSV
    Analyze {
        /// Edge-map JSON of link probabilities; default: every
        /// realizable link always on
        #[arg(long, value_name = "PATH")]
        probabilities: Option<PathBuf>,
    },
    /// Fixed-radius baselines versus budgeted designs, matched on cost; writes CSV
    Compare,
    /// Random-graph connectivity study; writes CSV
    ErStudy,
}

/// Full process entry: parses, dispatches, and maps errors to codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    if let Some(t) = cli.threads {
        if t > 0 {
            // a pool may already exist when called twice in-process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| AppError::Usage("--config <path> is required; see --help".into()))?;
    let mut cfg = ScenarioConfig::load(config_path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.mc_samples = samples;
        cfg.validate()?;
    }

    match cli.command {
        Command::Optimize { budget } => optimize(&cfg, budget, cli.out.as_deref()),
        Command::Simulate {
            probabilities,
            alpha,
        } => simulate(&cfg, probabilities.as_deref(), alpha, cli.out.as_deref()),
        Command::Analyze { probabilities } => {
            analyze(&cfg, probabilities.as_deref(), cli.out.as_deref())
        }
        Command::Compare => {
            let scenario = Scenario::from_config(&cfg)?;
            let rows = run_arccc_vs_frc(&cfg, &scenario)?;
            let mut out = open_out(cli.out.as_deref())?;
            write_comparison_csv(&rows, &mut *out)?;
            finish(out)
        }
        Command::ErStudy => {
            let rows = run_er_study(&cfg)?;
            let mut out = open_out(cli.out.as_deref())?;
            write_er_csv(&rows, &mut *out)?;
            finish(out)
        }
    }
}

fn finish(mut out: Box<dyn Write>) -> Result<(), AppError> {
    out.flush()
        .map_err(|e| AppError::Config(format!("write failed: {e}")))
}

fn optimize(
    cfg: &ScenarioConfig,
    budget_flag: Option<f64>,
    out_path: Option<&Path>,
) -> Result<(), AppError> {
    if let Some(u) = budget_flag {
        if !(u.is_finite() && u >= 0.0) {
            return Err(AppError::Usage(format!(
                "--budget must be finite and nonnegative, got {u}"
            )));
        }
    }
    let scenario = Scenario::from_config(cfg)?;
    let budget_value = budget_flag
        .or_else(|| cfg.budgets.last().copied())
        .unwrap_or_else(|| 0.5 * scenario.total_cost());
    let budget = Budget::new(budget_value)?;
    let result = solve_arccc(scenario.costs(), budget, &ArcccOptions::default())?;
    let file = EdgeMapFile::from_arccc(scenario.realizable(), budget_value, &result);
    let mut out = open_out(out_path)?;
    file.write(&mut *out)?;
    finish(out)?;
    if out_path.is_some() {
        let summary = serde_json::json!({
            "budget": budget_value,
            "lambda2": result.lambda2(),
            "expected_cost": result.expected_cost(),
            "certified_gap": result.certified_gap(),
            "connected": result.connected(),
            "iterations": result.iterations(),
        });
        println!("{summary}");
    }
    Ok(())
}

fn load_probabilities(
    cfg: &ScenarioConfig,
    path: Option<&Path>,
) -> Result<EdgeProbabilityMatrix, AppError> {
    match path {
        Some(p) => EdgeMapFile::load(p)?.to_probability_matrix(),
        None => {
            let scenario = Scenario::from_config(cfg)?;
            EdgeProbabilityMatrix::uniform(scenario.realizable().clone(), 1.0)
                .map_err(AppError::from)
        }
    }
}

fn simulate(
    cfg: &ScenarioConfig,
    probabilities: Option<&Path>,
    alpha_flag: Option<f64>,
    out_path: Option<&Path>,
) -> Result<(), AppError> {
    let p = load_probabilities(cfg, probabilities)?;
    let alpha = match alpha_flag {
        Some(a) if !(a.is_finite() && a > 0.0) => {
            return Err(AppError::Usage(format!(
                "--alpha must be finite and positive, got {a}"
            )));
        }
        Some(a) => a,
        None => alpha_mss(p.supergraph())?,
    };
    let root = SeededRng::new(cfg.seed);
    let x0 = root
        .at_iteration(STREAM_INITIAL_STATE)
        .standard_normal_vec(p.n());
    let mut run_rng = root.at_iteration(STREAM_SIMULATION);
    let trajectory = run_consensus(&x0, &p, alpha, cfg.iters, &mut run_rng, true)?;

    let mut out = open_out(out_path)?;
    write_trajectory_csv(&trajectory, &mut *out)?;
    finish(out)?;

    let initial = trajectory.initial_error();
    let converged = trajectory.final_error() <= 1e-6 * initial;
    let summary = serde_json::json!({
        "n": p.n(),
        "m": p.supergraph().m(),
        "alpha": alpha,
        "iterations": cfg.iters,
        "support_connected": p.support_connected(),
        "initial_error": initial,
        "final_error": trajectory.final_error(),
        "diverged": trajectory.diverged(),
        "converged": converged,
    });
    if out_path.is_some() {
        println!("{summary}");
    } else {
        // the CSV went to stdout; keep it parseable
        eprintln!("{summary}");
    }
    Ok(())
}

fn analyze(
    cfg: &ScenarioConfig,
    probabilities: Option<&Path>,
    out_path: Option<&Path>,
) -> Result<(), AppError> {
    let p = load_probabilities(cfg, probabilities)?;
    let mean_l = p.mean_laplacian();
    let mean_spec = mean_l.spectrum()?;
    let root = SeededRng::new(cfg.seed);
    let rng = root.at_iteration(STREAM_ANALYSIS);
    // the search draws the same sample batch as `spectra`, so every row
    // of the table is computed on common random numbers
    let search = optimize_alpha(&p, cfg.mc_samples, 1e-6, &rng)?;
    let spectra = SampledSpectra::draw(&p, cfg.mc_samples, &rng)?;
    let lam = spectra.expected_lambda2();

    let mut rows = Vec::new();
    let lambda_max = mean_spec.max_eigenvalue();
    for j in 1..=24 {
        let alpha = 2.0 / lambda_max * j as f64 / 25.0;
        let est = spectra.factor_at(alpha);
        rows.push(AnalyzeRow {
            label: "grid",
            alpha,
            factor: est.factor(),
            factor_stderr: est.std_error(),
            gain: convergence_gain(est.factor()),
        });
    }
    let mss = alpha_mss(p.supergraph())?;
    let est = spectra.factor_at(mss);
    rows.push(AnalyzeRow {
        label: "alpha_mss",
        alpha: mss,
        factor: est.factor(),
        factor_stderr: est.std_error(),
        gain: convergence_gain(est.factor()),
    });
    if let Ok((alpha_mean, _)) = optimal_alpha_mean(&mean_l) {
        let est = spectra.factor_at(alpha_mean);
        rows.push(AnalyzeRow {
            label: "alpha_mean_optimal",
            alpha: alpha_mean,
            factor: est.factor(),
            factor_stderr: est.std_error(),
            gain: convergence_gain(est.factor()),
        });
    }
    rows.push(AnalyzeRow {
        label: "alpha_search",
        alpha: search.alpha(),
        factor: search.factor().factor(),
        factor_stderr: search.factor().std_error(),
        gain: convergence_gain(search.factor().factor()),
    });

    let mut out = open_out(out_path)?;
    write_analyze_csv(&rows, &mut *out)?;
    finish(out)?;

    let summary = serde_json::json!({
        "n": p.n(),
        "m": p.supergraph().m(),
        "support_connected": p.support_connected(),
        "lambda2_mean": mean_spec.second_smallest(),
        "lambda_max_mean": lambda_max,
        "expected_lambda2": lam.factor(),
        "expected_lambda2_stderr": lam.std_error(),
        "alpha_search": search.alpha(),
        "factor_search": search.factor().factor(),
        "gain_search": convergence_gain(search.factor().factor()),
        "evaluations": search.evaluations(),
    });
    if out_path.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
