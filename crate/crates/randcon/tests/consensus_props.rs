//! Properties of the consensus iteration: conservation, per-step
//! contraction, agreement with the mean-system prediction, and the
//! closed-form step-size rules.

mod common;

use common::{random_connected_graph, random_values};
use proptest::prelude::*;
use randcon::{
    alpha_mss, build_laplacian, consensus_target, deflated_spectral_radius,
    mean_trajectory_prediction, optimal_alpha_mean, run_consensus, weight_matrix,
    EdgeProbabilityMatrix, SeededRng, Supergraph,
};

proptest! {
    #[test]
    fn state_sum_is_conserved(
        seed in 0u64..1024,
        n in 3usize..=6,
        x_raw in proptest::collection::vec(-20.0f64..20.0, 6),
    ) {
        let mut rng = SeededRng::new(seed);
        let g = random_connected_graph(&mut rng, n);
        let probs = random_values(&mut rng, g.m(), 0.2, 1.0);
        let alpha = alpha_mss(&g).unwrap();
        let p = EdgeProbabilityMatrix::new(g, probs).unwrap();
        let x0 = &x_raw[..n];
        let t = run_consensus(x0, &p, alpha, 60, &mut rng, true).unwrap();
        let s0: f64 = x0.iter().sum();
        for state in t.states().unwrap() {
            let s: f64 = state.iter().sum();
            prop_assert!((s - s0).abs() <= 1e-10 * s0.abs().max(1.0));
        }
        prop_assert!(!t.diverged());
    }
}

#[test]
fn each_step_contracts_by_the_sampled_deflated_radius() {
    // one manual step per draw: ‖x⁺ − avg‖ ≤ ρ(W_s − J/n)·‖x − avg‖
    let mut rng = SeededRng::new(90);
    for trial in 0..50 {
        let n = 3 + (trial % 3);
        let g = random_connected_graph(&mut rng, n);
        let probs = random_values(&mut rng, g.m(), 0.3, 0.9);
        let p = EdgeProbabilityMatrix::new(g, probs).unwrap();
        let alpha = 0.8 * alpha_mss(p.supergraph()).unwrap();
        let x0 = random_values(&mut rng, n, -5.0, 5.0);
        let target = consensus_target(&x0);

        let mut draw = rng.at_iteration(trial as u64);
        let sample = p.sample_topology(&mut draw);
        let w = weight_matrix(sample.laplacian(), alpha);
        let rho = deflated_spectral_radius(&w).unwrap();

        let x1 = w.matvec(&x0);
        let before = target.error_norm(&x0);
        let after = target.error_norm(&x1);
        assert!(
            after <= rho * before + 1e-10,
            "trial {trial}: {after} > {rho}·{before}"
        );
    }
}

#[test]
fn replica_mean_follows_the_mean_system() {
    // the empirical mean over replicas tracks x_avg + (W̄ − J/n)ⁱ(x0 − x_avg)
    let g = Supergraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
    let p = EdgeProbabilityMatrix::new(g, vec![0.7, 0.4, 0.8, 0.5, 0.6]).unwrap();
    let alpha = alpha_mss(p.supergraph()).unwrap();
    let x0 = [2.0, -1.0, 0.5, 3.5];
    let horizon = 6;
    let replicas = 4000;

    let w_bar = weight_matrix(&p.mean_laplacian(), alpha);
    let root = SeededRng::new(123);
    let mut sums = vec![vec![0.0f64; 4]; horizon + 1];
    let mut sumsq = vec![vec![0.0f64; 4]; horizon + 1];
    for r in 0..replicas {
        let mut rng = root.at_iteration(r as u64);
        let t = run_consensus(&x0, &p, alpha, horizon, &mut rng, true).unwrap();
        for (i, state) in t.states().unwrap().iter().enumerate() {
            for k in 0..4 {
                sums[i][k] += state[k];
                sumsq[i][k] += state[k] * state[k];
            }
        }
    }
    for i in 0..=horizon {
        let predicted = mean_trajectory_prediction(&x0, &w_bar, i).unwrap();
        for k in 0..4 {
            let mean = sums[i][k] / replicas as f64;
            let var = (sumsq[i][k] / replicas as f64 - mean * mean).max(0.0);
            let stderr = (var / replicas as f64).sqrt();
            assert!(
                (mean - predicted[k]).abs() <= 4.0 * stderr + 1e-12,
                "step {i} node {k}: mean {mean} vs predicted {} (stderr {stderr})",
                predicted[k]
            );
        }
    }
}

#[test]
fn optimal_alpha_beats_a_fine_grid() {
    let mut rng = SeededRng::new(55);
    for trial in 0..25 {
        let n = 3 + (trial % 4);
        let g = random_connected_graph(&mut rng, n);
        let weights = random_values(&mut rng, g.m(), 0.2, 2.0);
        let edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .zip(&weights)
            .map(|(&(a, b), &w)| (a, b, w))
            .collect();
        let l = build_laplacian(n, &edges).unwrap();
        let (alpha_star, rho_min) = optimal_alpha_mean(&l).unwrap();
        let at_star = deflated_spectral_radius(&weight_matrix(&l, alpha_star)).unwrap();
        assert!((at_star - rho_min).abs() <= 1e-9, "trial {trial}");

        let lam_max = l.spectrum().unwrap().max_eigenvalue();
        for step in 1..200 {
            let alpha = 2.0 / lam_max * step as f64 / 200.0;
            let rho = deflated_spectral_radius(&weight_matrix(&l, alpha)).unwrap();
            assert!(
                rho >= rho_min - 1e-9,
                "trial {trial}: grid α = {alpha} gives {rho} < {rho_min}"
            );
        }
    }
}

#[test]
fn conservative_step_contracts_every_realizable_topology() {
    // at α = 1/(2·d_max), every subset's weight matrix has spectrum in [-1, 1]
    let g = Supergraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
    let alpha = alpha_mss(&g).unwrap();
    for mask in 0u32..(1 << g.m()) {
        let active: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(e, _)| mask >> e & 1 == 1)
            .map(|(_, &(a, b))| (a, b, 1.0))
            .collect();
        let l = build_laplacian(4, &active).unwrap();
        let w = weight_matrix(&l, alpha);
        let spectrum = w.eigen().unwrap();
        assert!(spectrum.min_eigenvalue() >= -1e-12, "mask {mask}");
        assert!(spectrum.max_eigenvalue() <= 1.0 + 1e-12, "mask {mask}");
    }
}

#[test]
fn error_decays_under_the_conservative_step() {
    let mut rng = SeededRng::new(808);
    let g = random_connected_graph(&mut rng, 6);
    let probs = random_values(&mut rng, g.m(), 0.5, 1.0);
    let p = EdgeProbabilityMatrix::new(g, probs).unwrap();
    let alpha = alpha_mss(p.supergraph()).unwrap();
    let x0 = random_values(&mut rng, 6, -4.0, 4.0);
    let t = run_consensus(&x0, &p, alpha, 400, &mut rng, false).unwrap();
    assert!(!t.diverged());
    assert!(
        t.final_error() <= 1e-6 * t.initial_error(),
        "final {} vs initial {}",
        t.final_error(),
        t.initial_error()
    );
}
