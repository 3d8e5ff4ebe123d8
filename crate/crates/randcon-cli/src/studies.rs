//! The two numerical studies: a sweep over random graphs relating
//! algebraic connectivity to the achievable convergence gain, and the
//! budgeted-design-versus-fixed-radius comparison on a generated
//! deployment.
//!
//! Every task derives its own child generator from the root seed by a
//! fixed stream index, so results are identical no matter how the work
//! is scheduled across threads.

use crate::scenario::{
    frc_topology, random_realizable_set, Scenario, STREAM_COMPARE, STREAM_ER_DRAW,
    STREAM_ER_GRAPH, STREAM_ER_SAMPLES,
};
use crate::{AppError, ScenarioConfig};
use randcon::{
    algebraic_connectivity, convergence_gain, estimate_expected_lambda2, expected_cost,
    optimize_alpha, solve_arccc_seeded, ArcccOptions, Budget, CostMatrix, EdgeProbabilityMatrix,
    SeededRng, EXACT_CONSENSUS_FACTOR,
};
use rayon::prelude::*;

const ALPHA_SEARCH_TOL: f64 = 1e-6;

/// One random-graph draw in the connectivity study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErRow {
    pub graph: usize,
    pub draw: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub lambda2_mean: f64,
    pub expected_lambda2: f64,
    pub expected_lambda2_stderr: f64,
    pub alpha_star: f64,
    pub factor: f64,
    pub factor_stderr: f64,
    pub gain: f64,
}

/// Connectivity study: random graphs spanning sparse to dense, several
/// random probability assignments each; per draw, the mean-Laplacian
/// connectivity, the sampled one, and the best achievable gain.
pub fn run_er_study(cfg: &ScenarioConfig) -> Result<Vec<ErRow>, AppError> {
    cfg.validate()?;
    let root = SeededRng::new(cfg.seed);
    let n = cfg.n_sensors;
    let total_pairs = n * (n - 1) / 2;
    let d_lo = 3.0f64.min((n - 1) as f64);
    let d_hi = (n as f64 / 2.0).max(d_lo);
    (0..cfg.er_graphs * cfg.er_p_draws)
        .into_par_iter()
        .map(|t| {
            let graph = t / cfg.er_p_draws;
            let draw = t % cfg.er_p_draws;
            let frac = if cfg.er_graphs <= 1 {
                0.0
            } else {
                graph as f64 / (cfg.er_graphs - 1) as f64
            };
            let d_avg = d_lo + (d_hi - d_lo) * frac;
            let m = ((d_avg * n as f64 / 2.0).round() as usize).clamp(1, total_pairs);
            let g = random_realizable_set(
                n,
                m,
                &mut root.at_iteration(STREAM_ER_GRAPH + graph as u64),
            )?;
            let mut prng = root.at_iteration(STREAM_ER_DRAW + t as u64);
            let probs: Vec<f64> = (0..m).map(|_| 0.05 + 0.9 * prng.next_f64()).collect();
            let p = EdgeProbabilityMatrix::new(g, probs)?;
            let lambda2_mean = algebraic_connectivity(&p.mean_laplacian())?;
            let sample_rng = root.at_iteration(STREAM_ER_SAMPLES + t as u64);
            let lam = estimate_expected_lambda2(&p, cfg.mc_samples, &sample_rng)?;
            let search = optimize_alpha(&p, cfg.mc_samples, ALPHA_SEARCH_TOL, &sample_rng)?;
            let factor = search.factor().factor();
            Ok(ErRow {
                graph,
                draw,
                n_vertices: n,
                n_edges: m,
                lambda2_mean,
                expected_lambda2: lam.factor(),
                expected_lambda2_stderr: lam.std_error(),
                alpha_star: search.alpha(),
                factor,
                factor_stderr: search.factor().std_error(),
                gain: convergence_gain(factor),
            })
        })
        .collect()
}

/// One line of the comparison table; `label` is `arccc` or `frc`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: &'static str,
    pub budget_or_radius: f64,
    pub expected_cost: f64,
    pub lambda2_mean: f64,
    pub alpha_star: f64,
    pub gain: f64,
    pub gain_stderr: f64,
    pub gain_is_sentinel: bool,
}

fn gain_row(
    label: &'static str,
    key: f64,
    p: &EdgeProbabilityMatrix,
    costs: &CostMatrix,
    samples: usize,
    rng: &SeededRng,
) -> Result<ComparisonRow, AppError> {
    let cost = expected_cost(costs, p)?;
    let lambda2_mean = algebraic_connectivity(&p.mean_laplacian())?;
    if p.probs().iter().all(|&q| q == 0.0) {
        // nothing ever communicates; the factor is exactly 1
        return Ok(ComparisonRow {
            label,
            budget_or_radius: key,
            expected_cost: cost,
            lambda2_mean,
            alpha_star: 0.0,
            gain: 0.0,
            gain_stderr: 0.0,
            gain_is_sentinel: false,
        });
    }
    let search = optimize_alpha(p, samples, ALPHA_SEARCH_TOL, rng)?;
    let factor = search.factor().factor();
    let sentinel = factor <= EXACT_CONSENSUS_FACTOR;
    Ok(ComparisonRow {
        label,
        budget_or_radius: key,
        expected_cost: cost,
        lambda2_mean,
        alpha_star: search.alpha(),
        gain: convergence_gain(factor),
        // first-order error propagation through -ln
        gain_stderr: if sentinel {
            0.0
        } else {
            search.factor().std_error() / factor
        },
        gain_is_sentinel: sentinel,
    })
}

/// Comparison study: fixed-radius baselines and budgeted designs on the
/// same deployment, matched on the cost axis — each baseline's
/// per-iteration cost is reused as a design budget.
///
/// Baseline rows come first (by radius), then design rows (by budget).
pub fn run_arccc_vs_frc(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
) -> Result<Vec<ComparisonRow>, AppError> {
    cfg.validate()?;
    let root = SeededRng::new(cfg.seed);
    let radii = if cfg.baseline_radii.is_empty() {
        scenario.cost_quantile_radii(&[0.2, 0.35, 0.5, 0.65, 0.8])
    } else {
        let mut r = cfg.baseline_radii.clone();
        r.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
        r
    };

    let baselines: Vec<(f64, EdgeProbabilityMatrix)> = radii
        .iter()
        .map(|&r| {
            frc_topology(scenario.positions(), r, scenario.realizable()).map(|p| (r, p))
        })
        .collect::<Result<_, _>>()?;

    let baseline_costs: Vec<f64> = baselines
        .iter()
        .map(|(_, p)| expected_cost(scenario.costs(), p))
        .collect::<Result<_, _>>()?;
    let mut budgets: Vec<f64> = baseline_costs.clone();
    budgets.extend_from_slice(&cfg.budgets);
    budgets.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    budgets.dedup();

    // each solve is warm-started from the previous budget's design and,
    // on a matched budget, seeded with the baseline point itself — the
    // design then never falls below the baseline's connectivity
    let mut designs = Vec::with_capacity(budgets.len());
    let mut prev: Option<Vec<f64>> = None;
    for &u in &budgets {
        let mut hints: Vec<&[f64]> = Vec::new();
        if let Some(p) = prev.as_deref() {
            hints.push(p);
        }
        if let Some(i) = baseline_costs.iter().position(|&c| c == u) {
            hints.push(baselines[i].1.probs());
        }
        let result = solve_arccc_seeded(
            scenario.costs(),
            Budget::new(u)?,
            &ArcccOptions::default(),
            &hints,
        )?;
        prev = Some(result.probabilities().to_vec());
        designs.push(result);
    }

    let mut tasks: Vec<(&'static str, f64, EdgeProbabilityMatrix)> = Vec::new();
    for (radius, p) in baselines {
        tasks.push(("frc", radius, p));
    }
    for (&u, design) in budgets.iter().zip(&designs) {
        let p = EdgeProbabilityMatrix::new(
            scenario.realizable().clone(),
            design.probabilities().to_vec(),
        )?;
        tasks.push(("arccc", u, p));
    }
    tasks
        .par_iter()
        .enumerate()
        .map(|(i, (label, key, p))| {
            let rng = root.at_iteration(STREAM_COMPARE + i as u64);
            gain_row(label, *key, p, scenario.costs(), cfg.mc_samples, &rng)
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "paired samples required");
    let rx = ranks(x);
    let ry = ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).expect("ranks need finite values"));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
