//! Design and evaluation of randomized communication topologies for
//! distributed average consensus.
//!
//! A fixed set of realizable links (the supergraph) is thinned at every
//! iteration by independent Bernoulli link failures. Nodes average with
//! whoever is connected right now:
//!
//! ```text
//! x(i+1) = (I - alpha * L(i)) x(i)
//! ```
//!
//! where `L(i)` is the Laplacian of the topology realized at step `i`.
//! This crate provides
//!
//! * dense spectral primitives (Laplacians, a self-contained symmetric
//!   eigensolver, algebraic connectivity, Fiedler vectors),
//! * the link-failure model: edge formation probabilities, seeded topology
//!   sampling, and the mean Laplacian,
//! * the consensus iteration with closed-form step-size rules,
//! * Monte Carlo estimators for the per-step contraction factor and the
//!   convergence gain, with a common-random-numbers line search over alpha,
//! * a budget-constrained topology optimizer that maximizes the algebraic
//!   connectivity of the mean Laplacian by projected supergradient ascent.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` to build without the standard library. File
//! formats, the CLI, and parallel experiment drivers live in the companion
//! `randcon-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("either the `std` or the `libm` feature must be enabled");

pub mod arccc;
pub mod consensus;
pub mod eigen;
pub mod graph;
pub mod laplacian;
mod math;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod topology;

pub use arccc::{
    expected_cost, geometric_cost_matrix, lambda2_supergradient, phi_curve, project_feasible,
    solve_arccc, solve_arccc_seeded, total_cost, ArcccOptions, ArcccResult, Budget, CostMatrix,
};
pub use consensus::{
    alpha_mss, consensus_target, mean_convergence_condition, mean_trajectory_prediction,
    optimal_alpha_mean, run_consensus, weight_matrix, ConsensusTarget, Trajectory,
};
pub use eigen::{symmetric_eigen, Spectrum, DEFAULT_EIGEN_TOL};
pub use graph::Supergraph;
pub use laplacian::{
    algebraic_connectivity, build_laplacian, deflated_spectral_radius, fiedler_vector, Laplacian,
    CONNECTIVITY_TOL,
};
pub use matrix::SymmetricMatrix;
pub use metrics::{
    convergence_gain, estimate_convergence_factor, estimate_expected_lambda2, mss_gain_lower_bound,
    optimize_alpha, AlphaSearchResult, FactorEstimate, SampledSpectra, EXACT_CONSENSUS_FACTOR,
    GAIN_SENTINEL,
};
pub use rng::SeededRng;
pub use topology::{EdgeProbabilityMatrix, TopologySample};

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex count must be at least 2 (got {0})")]
    TooFewVertices(usize),
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("graphs do not share the same realizable edge set")]
    EdgeSetMismatch,
    #[error("edge weight {value} on ({n}, {l}) is negative or non-finite")]
    BadWeight { n: usize, l: usize, value: f64 },
    #[error("probability {value} on ({n}, {l}) is outside [0, 1]")]
    BadProbability { n: usize, l: usize, value: f64 },
    #[error("cost {value} on ({n}, {l}) is negative or non-finite")]
    BadCost { n: usize, l: usize, value: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("parameter {name} = {value} is out of range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("eigensolver did not converge within {0} implicit-shift sweeps")]
    EigenNoConvergence(usize),
    #[error("the all-ones vector is not fixed by the matrix (residual {0:e})")]
    OnesNotInvariant(f64),
    #[error("mean topology is disconnected: algebraic connectivity {0:e} below threshold")]
    Disconnected(f64),
    #[error("supergraph has no edges")]
    EmptyEdgeSet,
    #[error("budget {0} is negative or non-finite")]
    BadBudget(f64),
    #[error("budgets must be sorted ascending")]
    UnsortedBudgets,
    #[error("need at least {need} samples (got {got})")]
    TooFewSamples { need: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
