//! The consensus iteration: weight matrices, trajectories, and closed-form
//! step-size rules for the mean system.

use crate::laplacian::{deflated_spectral_radius, Laplacian, CONNECTIVITY_TOL};
use crate::math;
use crate::matrix::SymmetricMatrix;
use crate::rng::SeededRng;
use crate::topology::EdgeProbabilityMatrix;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// A run is flagged divergent once the state norm exceeds the initial norm
/// by this factor.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

/// The consensus fixed point of an initial state: every node at the
/// initial average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusTarget {
    average: f64,
    n: usize,
}

impl ConsensusTarget {
    pub fn average(&self) -> f64 {
        self.average
    }

    pub fn vector(&self) -> Vec<f64> {
        vec![self.average; self.n]
    }

    /// `‖x − x_avg‖₂`.
    pub fn error_norm(&self, x: &[f64]) -> f64 {
        math::sqrt(
            x.iter()
                .map(|&v| (v - self.average) * (v - self.average))
                .sum::<f64>(),
        )
    }
}

/// States and error norms produced by one consensus run. `error_norms[i]`
/// belongs to iteration `i`, starting from the initial state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Option<Vec<Vec<f64>>>,
    error_norms: Vec<f64>,
    diverged: bool,
}

impl Trajectory {
    /// Recorded states, present when the run was asked to keep them;
    /// `states[i]` matches `error_norms[i]`.
    pub fn states(&self) -> Option<&[Vec<f64>]> {
        self.states.as_deref()
    }

    pub fn error_norms(&self) -> &[f64] {
        &self.error_norms
    }

    /// True when the state norm blew past [`DIVERGENCE_FACTOR`] and the run
    /// stopped early.
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    pub fn initial_error(&self) -> f64 {
        self.error_norms[0]
    }

    pub fn final_error(&self) -> f64 {
        *self.error_norms.last().unwrap()
    }
}

/// `W = I − αL`.
///
/// Fixes the all-ones vector for any `α`; its eigenvalues are
/// `1 − α·λ_j(L)`.
pub fn weight_matrix(l: &Laplacian, alpha: f64) -> SymmetricMatrix {
    assert!(alpha.is_finite(), "alpha must be finite");
    let n = l.n();
    let mut w = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let id = if i == j { 1.0 } else { 0.0 };
            w.set(i, j, id - alpha * l.matrix().get(i, j));
        }
    }
    w
}

/// Average of the initial state, as the consensus fixed point.
pub fn consensus_target(x0: &[f64]) -> ConsensusTarget {
    let n = x0.len();
    ConsensusTarget {
        average: x0.iter().sum::<f64>() / n as f64,
        n,
    }
}

/// Runs `iters` consensus steps under freshly sampled topologies:
/// `x(i+1) = x(i) − α·L(i)·x(i)` with `L(i)` drawn from `p`.
///
/// The Laplacian is applied edgewise without materializing a matrix. The
/// run stops early and is flagged when the state diverges; it is never an
/// error. Set `store_states` to keep every intermediate state.
pub fn run_consensus(
    x0: &[f64],
    p: &EdgeProbabilityMatrix,
    alpha: f64,
    iters: usize,
    rng: &mut SeededRng,
    store_states: bool,
) -> Result<Trajectory> {
    if x0.len() != p.n() {
        return Err(Error::LengthMismatch {
            expected: p.n(),
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    if !alpha.is_finite() {
        return Err(Error::BadParameter {
            name: "alpha",
            value: alpha,
        });
    }

    let target = consensus_target(x0);
    let norm_cap = DIVERGENCE_FACTOR * math::norm2(x0);
    let edges = p.supergraph().edges();

    let mut x = x0.to_vec();
    let mut y = vec![0.0; x.len()];
    let mut active: Vec<bool> = Vec::with_capacity(edges.len());
    let mut error_norms = Vec::with_capacity(iters + 1);
    let mut states = store_states.then(|| Vec::with_capacity(iters + 1));

    error_norms.push(target.error_norm(&x));
    if let Some(s) = states.as_mut() {
        s.push(x.clone());
    }

    let mut diverged = false;
    for _ in 0..iters {
        p.sample_active_into(rng, &mut active);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (e, &(a, b)) in edges.iter().enumerate() {
            if active[e] {
                let d = x[a] - x[b];
                y[a] += d;
                y[b] -= d;
            }
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi -= alpha * yi;
        }
        error_norms.push(target.error_norm(&x));
        if let Some(s) = states.as_mut() {
            s.push(x.clone());
        }
        if math::norm2(&x) > norm_cap {
            diverged = true;
            break;
        }
    }

    Ok(Trajectory {
        states,
        error_norms,
        diverged,
    })
}

pub(crate) fn check_ones_invariant(w: &SymmetricMatrix) -> Result<()> {
    let ones = vec![1.0; w.n()];
    let wx = w.matvec(&ones);
    let residual = wx
        .iter()
        .map(|&v| math::abs(v - 1.0))
        .fold(0.0f64, f64::max);
    if residual > 1e-8 * (1.0 + w.max_abs()) {
        return Err(Error::OnesNotInvariant(residual));
    }
    Ok(())
}

/// Expected state after `iters` steps:
/// `x_avg + (W̄ − J/N)^iters (x0 − x_avg)`.
pub fn mean_trajectory_prediction(
    x0: &[f64],
    mean_w: &SymmetricMatrix,
    iters: usize,
) -> Result<Vec<f64>> {
    if x0.len() != mean_w.n() {
        return Err(Error::LengthMismatch {
            expected: mean_w.n(),
            got: x0.len(),
        });
    }
    check_ones_invariant(mean_w)?;
    let target = consensus_target(x0);
    let mut e: Vec<f64> = x0.iter().map(|&v| v - target.average()).collect();
    for _ in 0..iters {
        e = mean_w.matvec(&e);
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        e.iter_mut().for_each(|v| *v -= mean);
    }
    Ok(e.into_iter().map(|v| v + target.average()).collect())
}

/// The step size minimizing the contraction rate of the mean system, with
/// that rate: `α* = 2/(λ₂ + λ_N)` and
/// `ρ_min = (1 − λ₂/λ_N)/(1 + λ₂/λ_N)`, both from the mean Laplacian.
///
/// Fails when the mean topology is disconnected — then no step size makes
/// the mean converge.
pub fn optimal_alpha_mean(mean_l: &Laplacian) -> Result<(f64, f64)> {
    let spectrum = mean_l.spectrum()?;
    let lambda2 = spectrum.second_smallest();
    let lambda_n = spectrum.max_eigenvalue();
    if lambda2 <= CONNECTIVITY_TOL {
        return Err(Error::Disconnected(lambda2));
    }
    let ratio = lambda2 / lambda_n;
    Ok((2.0 / (lambda2 + lambda_n), (1.0 - ratio) / (1.0 + ratio)))
}

/// The conservative step size `1/(2·d_max)` from the supergraph's maximum
/// degree. For every realizable topology it keeps all weight-matrix
/// eigenvalues inside `[0, 1]`, so each step is a (weak) contraction.
pub fn alpha_mss(g: &crate::graph::Supergraph) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(1.0 / (2.0 * g.max_degree() as f64))
}

/// Whether the mean state converges to consensus: the deflated spectral
/// radius of the mean weight matrix is below one.
pub fn mean_convergence_condition(mean_w: &SymmetricMatrix) -> Result<bool> {
    Ok(deflated_spectral_radius(mean_w)? < 1.0)
}
