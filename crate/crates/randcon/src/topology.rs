//! The Bernoulli link-failure model.

use crate::graph::Supergraph;
use crate::laplacian::Laplacian;
use crate::rng::SeededRng;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Per-edge formation probabilities over a supergraph: at every iteration
/// each realizable link is up independently with its own probability,
/// independently across iterations.
///
/// Probabilities are stored aligned with [`Supergraph::edges`], which
/// confines the support to the realizable set by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilityMatrix {
    supergraph: Supergraph,
    probs: Vec<f64>,
}

impl EdgeProbabilityMatrix {
    /// Probabilities aligned with the supergraph's edge order. Each must be
    /// finite and in `[0, 1]`.
    pub fn new(supergraph: Supergraph, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != supergraph.m() {
            return Err(Error::LengthMismatch {
                expected: supergraph.m(),
                got: probs.len(),
            });
        }
        for (&(a, b), &p) in supergraph.edges().iter().zip(&probs) {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::BadProbability { n: a, l: b, value: p });
            }
        }
        Ok(EdgeProbabilityMatrix { supergraph, probs })
    }

    /// The same probability on every realizable edge.
    pub fn uniform(supergraph: Supergraph, p: f64) -> Result<Self> {
        let m = supergraph.m();
        Self::new(supergraph, alloc::vec![p; m])
    }

    pub fn supergraph(&self) -> &Supergraph {
        &self.supergraph
    }

    pub fn n(&self) -> usize {
        self.supergraph.n()
    }

    /// Probabilities in the supergraph's edge order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Iterate `((n, l), p)` pairs in sampling order.
    pub fn edge_probs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.supergraph
            .edges()
            .iter()
            .copied()
            .zip(self.probs.iter().copied())
    }

    /// Expected Laplacian of the sampled topology: the weighted Laplacian
    /// with the formation probabilities as weights.
    pub fn mean_laplacian(&self) -> Laplacian {
        Laplacian::from_weighted_edges_unchecked(
            self.n(),
            self.edge_probs().map(|((a, b), p)| (a, b, p)),
        )
    }

    /// True when the edges with nonzero probability connect the graph, so
    /// that the mean Laplacian is irreducible.
    pub fn support_connected(&self) -> bool {
        self.supergraph.is_connected_over(|e| self.probs[e] > 0.0)
    }

    /// Draws one topology: every edge up independently with its formation
    /// probability, visited in lexicographic edge order.
    pub fn sample_topology(&self, rng: &mut SeededRng) -> TopologySample {
        let active: Vec<(usize, usize)> = self
            .edge_probs()
            .filter(|&(_, p)| rng.bernoulli(p))
            .map(|(e, _)| e)
            .collect();
        let laplacian = Laplacian::from_weighted_edges_unchecked(
            self.n(),
            active.iter().map(|&(a, b)| (a, b, 1.0)),
        );
        TopologySample {
            active_edges: active,
            laplacian,
        }
    }

    /// Draws only the active edge indicators, in edge order, without
    /// building a Laplacian. The cheap inner loop for long simulations.
    pub(crate) fn sample_active_into(&self, rng: &mut SeededRng, active: &mut Vec<bool>) {
        active.clear();
        active.extend(self.probs.iter().map(|&p| rng.bernoulli(p)));
    }

    /// Entrywise average of `n_samples` sampled Laplacians. Sample `i` uses
    /// the child generator `rng.at_iteration(i)`.
    pub fn empirical_mean_laplacian(
        &self,
        n_samples: usize,
        rng: &SeededRng,
    ) -> Result<Laplacian> {
        if n_samples == 0 {
            return Err(Error::TooFewSamples { need: 1, got: 0 });
        }
        let mut counts = alloc::vec![0u64; self.probs.len()];
        for i in 0..n_samples {
            let mut child = rng.at_iteration(i as u64);
            for (e, &p) in self.probs.iter().enumerate() {
                if child.bernoulli(p) {
                    counts[e] += 1;
                }
            }
        }
        let inv = 1.0 / n_samples as f64;
        Ok(Laplacian::from_weighted_edges_unchecked(
            self.n(),
            self.supergraph
                .edges()
                .iter()
                .zip(&counts)
                .map(|(&(a, b), &c)| (a, b, c as f64 * inv)),
        ))
    }
}

/// One realized topology: the active edge subset and its unit-weight
/// Laplacian.
#[derive(Debug, Clone)]
pub struct TopologySample {
    active_edges: Vec<(usize, usize)>,
    laplacian: Laplacian,
}

impl TopologySample {
    pub fn active_edges(&self) -> &[(usize, usize)] {
        &self.active_edges
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }
}
