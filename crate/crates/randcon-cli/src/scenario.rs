//! Seeded scenario generation: sensor placement, the random set of
//! realizable links, link costs, and the fixed-radius baseline
//! topology.

use crate::{AppError, ScenarioConfig};
use randcon::{geometric_cost_matrix, CostMatrix, EdgeProbabilityMatrix, SeededRng, Supergraph};
use std::collections::HashMap;

// Distinct child-stream indices keep every random decision on its own
// stream of the root generator, so adding a consumer never shifts
// another one's draws.
pub(crate) const STREAM_PLACEMENT: u64 = 1;
pub(crate) const STREAM_EDGES: u64 = 2;
pub(crate) const STREAM_INITIAL_STATE: u64 = 3;
pub(crate) const STREAM_SIMULATION: u64 = 4;
pub(crate) const STREAM_ANALYSIS: u64 = 5;
pub(crate) const STREAM_ER_GRAPH: u64 = 1_000_000;
pub(crate) const STREAM_ER_DRAW: u64 = 2_000_000;
pub(crate) const STREAM_ER_SAMPLES: u64 = 2_500_000;
pub(crate) const STREAM_COMPARE: u64 = 3_000_000;

/// Sensor positions sampled i.i.d. uniformly on `[0, side]²`.
pub fn grid_placement(n: usize, side: f64, rng: &mut SeededRng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (side * rng.next_f64(), side * rng.next_f64()))
        .collect()
}

fn unrank_pair(k: usize) -> (usize, usize) {
    // Pairs (a, b) with a < b are indexed by b(b-1)/2 + a; invert the
    // triangular part with a float guess corrected by at most one step.
    let mut b = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as usize;
    while b * (b - 1) / 2 > k {
        b -= 1;
    }
    while (b + 1) * b / 2 <= k {
        b += 1;
    }
    (k - b * (b - 1) / 2, b)
}

/// Uniformly samples `m` distinct vertex pairs out of all `n(n-1)/2`.
///
/// A partial Fisher–Yates shuffle over pair indices touches only `m`
/// entries, so large vertex counts stay cheap.
pub fn random_realizable_set(
    n: usize,
    m: usize,
    rng: &mut SeededRng,
) -> Result<Supergraph, AppError> {
    if n < 2 {
        return Err(AppError::Config(format!(
            "need at least 2 vertices for a realizable set, got {n}"
        )));
    }
    let total = n * (n - 1) / 2;
    if m == 0 || m > total {
        return Err(AppError::Config(format!(
            "edge count must be in 1..={total} for {n} vertices, got {m}"
        )));
    }
    let mut swapped: HashMap<usize, usize> = HashMap::new();
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let j = i + (rng.next_u64() % (total - i) as u64) as usize;
        let pick = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        edges.push(unrank_pair(pick));
    }
    edges.sort_unstable();
    Ok(Supergraph::new(n, edges).expect("sampled pairs are distinct and in range"))
}

/// Fixed-radius baseline: every realizable link not longer than
/// `radius` is always on, every other one is always off.
pub fn frc_topology(
    positions: &[(f64, f64)],
    radius: f64,
    realizable: &Supergraph,
) -> Result<EdgeProbabilityMatrix, AppError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(AppError::Config(format!(
            "radius must be finite and positive, got {radius}"
        )));
    }
    if positions.len() != realizable.n() {
        return Err(AppError::Config(format!(
            "{} positions for a {}-vertex graph",
            positions.len(),
            realizable.n()
        )));
    }
    let probs = realizable
        .edges()
        .iter()
        .map(|&(a, b)| {
            let dx = positions[a].0 - positions[b].0;
            let dy = positions[a].1 - positions[b].1;
            if (dx * dx + dy * dy).sqrt() <= radius {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    EdgeProbabilityMatrix::new(realizable.clone(), probs).map_err(AppError::from)
}

/// A generated deployment: positions, realizable links, and link costs.
#[derive(Debug, Clone)]
pub struct Scenario {
    positions: Vec<(f64, f64)>,
    costs: CostMatrix,
}

impl Scenario {
    /// Builds the deployment a config describes, deterministically in
    /// its seed.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, AppError> {
        let root = SeededRng::new(cfg.seed);
        let positions = grid_placement(
            cfg.n_sensors,
            cfg.grid_side,
            &mut root.at_iteration(STREAM_PLACEMENT),
        );
        let realizable = random_realizable_set(
            cfg.n_sensors,
            cfg.n_realizable_edges,
            &mut root.at_iteration(STREAM_EDGES),
        )?;
        let costs = geometric_cost_matrix(&realizable, &positions, cfg.eta)?;
        Ok(Scenario { positions, costs })
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn realizable(&self) -> &Supergraph {
        self.costs.supergraph()
    }

    pub fn costs(&self) -> &CostMatrix {
        &self.costs
    }

    pub fn total_cost(&self) -> f64 {
        randcon::total_cost(&self.costs)
    }

    /// Budget grid used when the config leaves `budgets` empty: eight
    /// evenly spaced fractions of the total cost, ending at it.
    pub fn auto_budgets(&self) -> Vec<f64> {
        let ctot = self.total_cost();
        (1..=8).map(|i| ctot * i as f64 / 8.0).collect()
    }

    /// Baseline radii used when the config leaves `baseline_radii`
    /// empty: for each target fraction of the total cost, the shortest
    /// radius whose active-link cost reaches it.
    pub fn cost_quantile_radii(&self, fractions: &[f64]) -> Vec<f64> {
        let ctot = self.total_cost();
        let mut by_length: Vec<(f64, f64)> = self
            .realizable()
            .edges()
            .iter()
            .zip(self.costs.costs())
            .map(|(&(a, b), &c)| {
                let dx = self.positions[a].0 - self.positions[b].0;
                let dy = self.positions[a].1 - self.positions[b].1;
                ((dx * dx + dy * dy).sqrt(), c)
            })
            .collect();
        by_length.sort_by(|x, y| x.partial_cmp(y).expect("lengths and costs are finite"));
        let mut radii = Vec::with_capacity(fractions.len());
        for &f in fractions {
            let target = f * ctot;
            let mut acc = 0.0;
            for &(len, c) in &by_length {
                acc += c;
                if acc >= target {
                    if radii.last() != Some(&len) {
                        radii.push(len);
                    }
                    break;
                }
            }
        }
        radii
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placement_is_seeded_and_in_bounds() {
        let mut a = SeededRng::new(9);
        let mut b = SeededRng::new(9);
        let pa = grid_placement(40, 25.0, &mut a);
        let pb = grid_placement(40, 25.0, &mut b);
        assert_eq!(pa, pb);
        assert!(pa
            .iter()
            .all(|&(x, y)| (0.0..=25.0).contains(&x) && (0.0..=25.0).contains(&y)));
    }

    #[test]
    fn unranking_enumerates_all_pairs() {
        let mut seen = Vec::new();
        for k in 0..15 {
            let (a, b) = unrank_pair(k);
            assert!(a < b && b < 6);
            seen.push((a, b));
        }
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn realizable_set_has_exactly_m_distinct_edges() {
        let mut rng = SeededRng::new(11);
        for m in [1, 10, 45] {
            let g = random_realizable_set(10, m, &mut rng).unwrap();
            assert_eq!(g.m(), m);
        }
        let complete = random_realizable_set(10, 45, &mut rng).unwrap();
        assert_eq!(complete.m(), 45, "m = n(n-1)/2 gives the complete graph");
        assert!(random_realizable_set(10, 46, &mut SeededRng::new(1)).is_err());
        assert!(random_realizable_set(2, 1, &mut SeededRng::new(1)).unwrap().m() == 1);
    }

    #[test]
    fn sampled_sets_cover_pairs_roughly_uniformly() {
        // 6 vertices, 15 pairs, draw 5 each time: each pair should land
        // near 2000 appearances out of 6000 draws.
        let root = SeededRng::new(77);
        let mut counts = vec![0u32; 15];
        for trial in 0..6000u64 {
            let g = random_realizable_set(6, 5, &mut root.at_iteration(trial)).unwrap();
            for &(a, b) in g.edges() {
                counts[b * (b - 1) / 2 + a] += 1;
            }
        }
        for &c in &counts {
            assert!((1800..=2200).contains(&c), "pair count {c} far from uniform");
        }
    }

    #[test]
    fn radius_thresholds_pick_the_short_links() {
        let positions = [(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)];
        let g = Supergraph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let p = frc_topology(&positions, 4.0, &g).unwrap();
        // distances: 3, 5, 4 — the radius-4 ball keeps edges 0-1 and 1-2
        assert_eq!(p.probs(), &[1.0, 0.0, 1.0]);
        let all = frc_topology(&positions, 100.0, &g).unwrap();
        assert!(all.probs().iter().all(|&q| q == 1.0));
        let none = frc_topology(&positions, 1.0, &g).unwrap();
        assert!(none.probs().iter().all(|&q| q == 0.0));
        assert!(frc_topology(&positions, 0.0, &g).is_err());
    }

    #[test]
    fn scenario_derives_budgets_and_radii_from_costs() {
        let cfg = ScenarioConfig {
            n_sensors: 12,
            n_realizable_edges: 30,
            ..ScenarioConfig::default()
        };
        let s = Scenario::from_config(&cfg).unwrap();
        let ctot = s.total_cost();
        assert!(ctot > 0.0);
        let budgets = s.auto_budgets();
        assert_eq!(budgets.len(), 8);
        assert!((budgets[7] - ctot).abs() <= 1e-12 * ctot);
        let radii = s.cost_quantile_radii(&[0.25, 0.5, 0.75]);
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
        for (i, &r) in radii.iter().enumerate() {
            let p = frc_topology(s.positions(), r, s.realizable()).unwrap();
            let cost = randcon::expected_cost(s.costs(), &p).unwrap();
            let target = [0.25, 0.5, 0.75][i] * ctot;
            assert!(cost >= target, "radius {r} misses its cost quantile");
        }
    }

    #[test]
    fn same_seed_rebuilds_the_same_scenario() {
        let cfg = ScenarioConfig::default();
        let a = Scenario::from_config(&cfg).unwrap();
        let b = Scenario::from_config(&cfg).unwrap();
        assert_eq!(a.positions(), b.positions());
        assert_eq!(a.realizable().edges(), b.realizable().edges());
        assert_eq!(a.costs().costs(), b.costs().costs());
    }
}
