//! Budget-constrained topology design: choose edge formation probabilities
//! maximizing the algebraic connectivity of the mean Laplacian, subject to
//! an expected communication-cost budget.
//!
//! The objective `λ₂(L̄(P))` is concave in `P` (a minimum of linear
//! functions), so projected supergradient ascent converges globally. Every
//! iteration also prices a fractional-knapsack linearization, which yields
//! a certified upper bound and with it an optimality gap.

use crate::eigen::Spectrum;
use crate::graph::Supergraph;
use crate::laplacian::{Laplacian, CONNECTIVITY_TOL};
use crate::math;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Per-edge communication costs over a supergraph's edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    supergraph: Supergraph,
    costs: Vec<f64>,
}

impl CostMatrix {
    /// Costs aligned with the supergraph's edge order; each must be finite
    /// and nonnegative.
    pub fn new(supergraph: Supergraph, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != supergraph.m() {
            return Err(Error::LengthMismatch {
                expected: supergraph.m(),
                got: costs.len(),
            });
        }
        for (e, &c) in costs.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                let (n, l) = supergraph.edges()[e];
                return Err(Error::BadCost { n, l, value: c });
            }
        }
        Ok(CostMatrix { supergraph, costs })
    }

    pub fn supergraph(&self) -> &Supergraph {
        &self.supergraph
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }
}

/// An expected-cost budget; finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget(f64);

impl Budget {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::BadBudget(value));
        }
        Ok(Budget(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Quadratic-in-distance edge costs: `η·‖pos_n − pos_l‖²` for each
/// realizable edge, the usual free-space transmit-energy model.
pub fn geometric_cost_matrix(
    g: &Supergraph,
    positions: &[(f64, f64)],
    eta: f64,
) -> Result<CostMatrix> {
    if positions.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: positions.len(),
        });
    }
    if positions
        .iter()
        .any(|&(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(Error::NonFinite("vertex position"));
    }
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::BadParameter {
            name: "eta",
            value: eta,
        });
    }
    let costs = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let dx = positions[a].0 - positions[b].0;
            let dy = positions[a].1 - positions[b].1;
            eta * (dx * dx + dy * dy)
        })
        .collect();
    CostMatrix::new(g.clone(), costs)
}

/// Cost of operating every realizable edge at probability one.
pub fn total_cost(costs: &CostMatrix) -> f64 {
    costs.costs.iter().sum()
}

/// Expected cost per iteration under formation probabilities `p`:
/// `Σ_e C_e·P_e`, which equals `−½·Tr(C·L̄)` for the dense cost matrix.
pub fn expected_cost(costs: &CostMatrix, p: &crate::topology::EdgeProbabilityMatrix) -> Result<f64> {
    if costs.supergraph() != p.supergraph() {
        return Err(Error::EdgeSetMismatch);
    }
    Ok(dot(&costs.costs, p.probs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn laplacian_of(g: &Supergraph, weights: &[f64]) -> Laplacian {
    Laplacian::from_weighted_edges_unchecked(
        g.n(),
        g.edges().iter().zip(weights).map(|(&(a, b), &w)| (a, b, w)),
    )
}

/// A supergradient of `P ↦ λ₂(L̄(P))` at the probabilities behind `l`:
/// per edge, `(v_n − v_l)²` for a unit eigenvector `v` of `λ₂` orthogonal
/// to the all-ones vector.
///
/// When `λ₂` is (numerically) repeated, the per-edge squares are averaged
/// over an orthonormal basis of the eigenspace; a convex combination of
/// supergradients is again a supergradient, and the average does not jump
/// as eigenvalues cross.
pub fn lambda2_supergradient(g: &Supergraph, l: &Laplacian) -> Result<Vec<f64>> {
    if l.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: l.n(),
        });
    }
    let spectrum = l.spectrum()?;
    Ok(supergradient_from_spectrum(g, &spectrum))
}

fn supergradient_from_spectrum(g: &Supergraph, spectrum: &Spectrum) -> Vec<f64> {
    let n = g.n();
    let lambda2 = spectrum.second_smallest();
    let tol = 1e-8 * spectrum.max_eigenvalue().max(1.0);
    let mut grad = vec![0.0; g.m()];
    let mut used = 0usize;
    // columns are eigenvalue-ascending; column 0 is retried only when the
    // deflated columns above it all collapse onto the all-ones direction
    for first in [1usize, 0] {
        for j in first..n {
            if (spectrum.eigenvalues()[j] - lambda2).abs() > tol {
                continue;
            }
            let v = spectrum.eigenvector(j);
            let mean = v.iter().sum::<f64>() / n as f64;
            let mut w: Vec<f64> = v.iter().map(|&x| x - mean).collect();
            let norm = math::norm2(&w);
            if norm <= 1e-12 {
                continue;
            }
            w.iter_mut().for_each(|x| *x /= norm);
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let d = w[a] - w[b];
                grad[e] += d * d;
            }
            used += 1;
        }
        if used > 0 {
            break;
        }
    }
    debug_assert!(used > 0, "eigenbasis cannot be entirely all-ones");
    grad.iter_mut().for_each(|x| *x /= used.max(1) as f64);
    grad
}

/// Euclidean projection of `raw` onto the feasible set
/// `{0 ≤ P ≤ 1, Σ C_e·P_e ≤ budget}`.
///
/// When plain clipping already fits the budget it is the projection;
/// otherwise the budget binds and the projection is
/// `clip(raw − ν·C)` with the multiplier `ν ≥ 0` found by bisection on the
/// monotone spend curve.
pub fn project_feasible(raw: &[f64], costs: &CostMatrix, budget: Budget) -> Result<Vec<f64>> {
    if raw.len() != costs.costs.len() {
        return Err(Error::LengthMismatch {
            expected: costs.costs.len(),
            got: raw.len(),
        });
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("projection input"));
    }
    let c = &costs.costs;
    let u = budget.value();
    let clip = |nu: f64| -> Vec<f64> {
        raw.iter()
            .zip(c)
            .map(|(&r, &ce)| (r - nu * ce).clamp(0.0, 1.0))
            .collect()
    };
    let spend = |p: &[f64]| dot(c, p);

    let clipped = clip(0.0);
    if spend(&clipped) <= u {
        return Ok(clipped);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while spend(&clip(hi)) > u {
        hi *= 2.0;
        if hi > 1e30 {
            // unreachable for positive-cost binding constraints; the spend
            // at large ν comes only from zero-cost edges and is zero
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spend(&clip(mid)) > u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the upper endpoint keeps the result feasible
    Ok(clip(hi))
}

/// Stopping and stepping knobs for [`solve_arccc`].
#[derive(Debug, Clone, PartialEq)]
pub struct ArcccOptions {
    /// Hard iteration cap.
    pub max_iters: usize,
    /// Stop when the certified relative optimality gap — or the level
    /// margin itself — falls below this (relative to the incumbent).
    pub gap_tol: f64,
    /// Stop when the incumbent improves by less than `stall_tol`
    /// (relative) over this many iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    /// Starting Polyak level margin, as a fraction of the seed value.
    pub level_init: f64,
    /// Iterations without sufficient progress before the level margin is
    /// halved.
    pub level_patience: usize,
}

impl Default for ArcccOptions {
    fn default() -> Self {
        ArcccOptions {
            max_iters: 5000,
            gap_tol: 1e-9,
            stall_window: 500,
            stall_tol: 1e-9,
            level_init: 0.5,
            level_patience: 40,
        }
    }
}

impl ArcccOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::BadParameter {
                name: "max_iters",
                value: 0.0,
            });
        }
        if self.stall_window == 0 {
            return Err(Error::BadParameter {
                name: "stall_window",
                value: 0.0,
            });
        }
        if self.level_patience == 0 {
            return Err(Error::BadParameter {
                name: "level_patience",
                value: 0.0,
            });
        }
        for (name, value) in [
            ("gap_tol", self.gap_tol),
            ("stall_tol", self.stall_tol),
            ("level_init", self.level_init),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::BadParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Solution of one budget-constrained connectivity maximization.
#[derive(Debug, Clone)]
pub struct ArcccResult {
    probabilities: Vec<f64>,
    lambda2: f64,
    expected_cost: f64,
    iterations: usize,
    certified_gap: f64,
    connected: bool,
    history: Vec<f64>,
}

impl ArcccResult {
    /// Optimized formation probabilities, aligned with the supergraph's
    /// edge order.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Algebraic connectivity of the mean Laplacian at the solution.
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Expected per-iteration cost at the solution; never exceeds the
    /// budget.
    pub fn expected_cost(&self) -> f64 {
        self.expected_cost
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Upper bound on `λ₂(P*) − λ₂(returned)` from the best linearized
    /// knapsack relaxation seen.
    pub fn certified_gap(&self) -> f64 {
        self.certified_gap
    }

    /// Whether the mean topology at the solution is connected.
    pub fn connected(&self) -> bool {
        self.connected
    }

    /// Incumbent objective value after each iteration; nondecreasing.
    pub fn history(&self) -> &[f64] {
        &self.history
    }
}

fn water_fill_seed(c: &[f64], u: f64) -> Vec<f64> {
    let ctot: f64 = c.iter().sum();
    if u >= ctot {
        return vec![1.0; c.len()];
    }
    let spend = |t: f64| -> f64 { c.iter().map(|&ce| ce.min(t)).sum() };
    let mut lo = 0.0f64;
    let mut hi = c.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spend(mid) > u {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    c.iter()
        .map(|&ce| if ce == 0.0 { 1.0 } else { (lo / ce).min(1.0) })
        .collect()
}

fn uniform_seed(c: &[f64], u: f64) -> Vec<f64> {
    let ctot: f64 = c.iter().sum();
    let frac = if ctot == 0.0 { 1.0 } else { (u / ctot).min(1.0) };
    vec![frac; c.len()]
}

/// Best value of the linearized objective `Σ g_e·y_e` over the feasible
/// set: a fractional knapsack.
fn knapsack_max(g: &[f64], c: &[f64], u: f64) -> f64 {
    let mut value = 0.0;
    let mut paid: Vec<usize> = Vec::with_capacity(g.len());
    for e in 0..g.len() {
        if c[e] == 0.0 {
            value += g[e].max(0.0);
        } else if g[e] > 0.0 {
            paid.push(e);
        }
    }
    paid.sort_by(|&a, &b| {
        let ra = g[a] / c[a];
        let rb = g[b] / c[b];
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut remaining = u;
    for &e in &paid {
        if remaining <= 0.0 {
            break;
        }
        let take = (remaining / c[e]).min(1.0);
        value += take * g[e];
        remaining -= take * c[e];
    }
    value
}

/// Maximizes the algebraic connectivity of the mean Laplacian over edge
/// formation probabilities, subject to the expected-cost budget, by
/// projected supergradient ascent with Polyak steps.
///
/// The search starts from the better of a water-filling allocation and a
/// uniform budget split; when the budget covers the whole edge set the
/// all-ones solution is returned directly. The result carries a certified
/// optimality gap — the concave objective lies below every supergradient
/// linearization, whose feasible maximum is a fractional knapsack.
pub fn solve_arccc(costs: &CostMatrix, budget: Budget, opts: &ArcccOptions) -> Result<ArcccResult> {
    solve_from(costs, budget, opts, &[])
}

/// Like [`solve_arccc`], with caller-provided starting points.
///
/// Each hint is projected into the feasible set and competes with the
/// built-in seeds, so the result is never worse than any feasible hint —
/// handy to guarantee a solve dominates a known reference design.
pub fn solve_arccc_seeded(
    costs: &CostMatrix,
    budget: Budget,
    opts: &ArcccOptions,
    hints: &[&[f64]],
) -> Result<ArcccResult> {
    for hint in hints {
        if hint.len() != costs.supergraph().m() {
            return Err(Error::LengthMismatch {
                expected: costs.supergraph().m(),
                got: hint.len(),
            });
        }
        if hint.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("seed hint"));
        }
    }
    solve_from(costs, budget, opts, hints)
}

fn solve_from(
    costs: &CostMatrix,
    budget: Budget,
    opts: &ArcccOptions,
    hints: &[&[f64]],
) -> Result<ArcccResult> {
    opts.validate()?;
    let g = costs.supergraph();
    if g.m() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let c = costs.costs();
    let u = budget.value();

    let mut seeds = vec![water_fill_seed(c, u), uniform_seed(c, u)];
    for hint in hints {
        seeds.push(project_feasible(hint, costs, budget)?);
    }
    let mut x = Vec::new();
    let mut f_best = f64::NEG_INFINITY;
    for seed in seeds {
        let f = laplacian_of(g, &seed).spectrum()?.second_smallest();
        if f > f_best {
            f_best = f;
            x = seed;
        }
    }
    let mut x_best = x.clone();
    let mut best_ub = f64::INFINITY;
    let mut history = Vec::new();
    let mut iterations = 0;

    // adaptive level control: ascend toward f_best + delta, halving delta
    // whenever a patience window passes without real progress
    let mut delta = opts.level_init * f_best.abs().max(0.1);
    let mut anchor = f_best;
    let mut impatience = 0usize;

    for _ in 0..opts.max_iters {
        iterations += 1;
        let spectrum = laplacian_of(g, &x).spectrum()?;
        let f = spectrum.second_smallest();
        let grad = supergradient_from_spectrum(g, &spectrum);
        if f > f_best {
            f_best = f;
            x_best.copy_from_slice(&x);
        }
        let ub = f + knapsack_max(&grad, c, u) - dot(&grad, &x);
        if ub < best_ub {
            best_ub = ub;
        }
        history.push(f_best);

        let scale = f_best.abs().max(1.0);
        if best_ub - f_best <= opts.gap_tol * scale {
            break;
        }
        if f_best - anchor >= 0.5 * delta {
            anchor = f_best;
            impatience = 0;
        } else {
            impatience += 1;
            if impatience >= opts.level_patience {
                delta *= 0.5;
                anchor = f_best;
                impatience = 0;
            }
        }
        if delta <= opts.gap_tol * scale {
            break;
        }
        if history.len() > opts.stall_window {
            let past = history[history.len() - 1 - opts.stall_window];
            if f_best - past <= opts.stall_tol * scale {
                break;
            }
        }

        let grad_sq = dot(&grad, &grad);
        if grad_sq <= 1e-24 {
            break;
        }
        let target = (f_best + delta).min(best_ub);
        let mut step = (target - f) / grad_sq;
        if step <= 0.0 {
            step = delta / grad_sq;
        }
        let raw: Vec<f64> = x.iter().zip(&grad).map(|(&xi, &gi)| xi + step * gi).collect();
        x = project_feasible(&raw, costs, budget)?;
    }

    spend_slack(&mut x_best, c, budget.value());
    let lambda2 = laplacian_of(g, &x_best).spectrum()?.second_smallest();
    Ok(ArcccResult {
        expected_cost: dot(c, &x_best),
        probabilities: x_best,
        lambda2,
        iterations,
        certified_gap: (best_ub - lambda2).max(0.0),
        connected: lambda2 > CONNECTIVITY_TOL,
        history,
    })
}

/// Budget-exhausting tie-break: once the ascent settles, any slack left
/// by a saturated objective is spent raising probabilities cheapest
/// link first. Edge weights only grow, so the connectivity value never
/// drops and the certified bound still applies; the extra probability
/// thickens every sampled topology for free.
fn spend_slack(x: &mut [f64], c: &[f64], u: f64) {
    for (p, &cost) in x.iter_mut().zip(c) {
        if cost == 0.0 {
            *p = 1.0;
        }
    }
    let mut slack = u - dot(c, x);
    if slack <= 0.0 {
        return;
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).expect("validated finite").then(a.cmp(&b)));
    for e in order {
        if slack <= 0.0 {
            break;
        }
        if c[e] == 0.0 {
            continue;
        }
        let add = (1.0 - x[e]).min(slack / c[e]);
        if add > 0.0 {
            x[e] += add;
            slack -= add * c[e];
        }
    }
}

/// Solves the design problem at each budget of an ascending sweep,
/// warm-starting every solve from the previous solution (feasible, since
/// budgets only grow). The returned values trace the budget–connectivity
/// trade-off curve, which is concave in the budget.
pub fn phi_curve(
    costs: &CostMatrix,
    budgets: &[f64],
    opts: &ArcccOptions,
) -> Result<Vec<ArcccResult>> {
    for pair in budgets.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::UnsortedBudgets);
        }
    }
    let mut results: Vec<ArcccResult> = Vec::with_capacity(budgets.len());
    for &b in budgets {
        let budget = Budget::new(b)?;
        match results.last() {
            Some(prev) => {
                let warm = prev.probabilities().to_vec();
                results.push(solve_from(costs, budget, opts, &[&warm])?);
            }
            None => results.push(solve_from(costs, budget, opts, &[])?),
        }
    }
    Ok(results)
}
