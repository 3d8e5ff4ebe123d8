//! The supergraph of realizable links.

use crate::{Error, Result};
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// An undirected simple graph on vertices `0..n`, holding the set of links
/// that can exist at all. Random topologies are edge subsets of it.
///
/// Edges are stored normalized (`n < l`) in lexicographic order; that order
/// is the sampling order everywhere, which is what makes seeded runs
/// bit-reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supergraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Supergraph {
    /// Validates and normalizes an edge list. Rejects out-of-range
    /// endpoints, self-loops, and duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::EdgeOutOfRange(a, b, n));
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        for w in normalized.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(Supergraph {
            n,
            edges: normalized,
        })
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in (a + 1)..n {
                edges.push((a, b));
            }
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of realizable edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order, each with `n < l`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Exact connectivity by breadth-first traversal over all realizable
    /// edges.
    pub fn is_connected(&self) -> bool {
        self.is_connected_over(|_| true)
    }

    /// Connectivity of the subgraph keeping edge `e` iff `keep(e)`, with
    /// `e` indexing into [`Supergraph::edges`].
    pub fn is_connected_over(&self, keep: impl Fn(usize) -> bool) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if keep(e) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0);
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }
}
