//! Weighted graph Laplacians and the spectral quantities built on them.

use crate::eigen::Spectrum;
use crate::math;
use crate::matrix::SymmetricMatrix;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Below this value the algebraic connectivity of a mean Laplacian is
/// treated as zero, i.e. the mean topology counts as disconnected.
pub const CONNECTIVITY_TOL: f64 = 1e-8;

/// A weighted Laplacian `L = D − A`: diagonal carries the per-row weight
/// sums, off-diagonal `(n, l)` carries `−w_nl`. Rows sum to zero and the
/// matrix is positive semidefinite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    matrix: SymmetricMatrix,
    weightsum: Vec<f64>,
}

impl Laplacian {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    /// Per-row weight sums (the diagonal).
    pub fn weightsum(&self) -> &[f64] {
        &self.weightsum
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        self.matrix.eigen()
    }

    /// Entrywise `z^T L z`; for a Laplacian this equals
    /// `½ Σ_{n≠l} w_nl (z_n − z_l)²`.
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        let y = self.matrix.matvec(z);
        y.iter().zip(z).map(|(&a, &b)| a * b).sum()
    }

    pub(crate) fn from_weighted_edges_unchecked(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Laplacian {
        let mut matrix = SymmetricMatrix::zeros(n);
        let mut weightsum = vec![0.0; n];
        for (a, b, w) in edges {
            matrix.add(a, b, -w);
            weightsum[a] += w;
            weightsum[b] += w;
        }
        for (i, &s) in weightsum.iter().enumerate() {
            matrix.set(i, i, s);
        }
        Laplacian { matrix, weightsum }
    }
}

/// Builds the weighted Laplacian for an edge list with weights `w ≥ 0`.
/// Endpoints are validated; duplicate edges are rejected.
pub fn build_laplacian(n: usize, weighted_edges: &[(usize, usize, f64)]) -> Result<Laplacian> {
    if n < 2 {
        return Err(Error::TooFewVertices(n));
    }
    let mut seen: Vec<(usize, usize)> = Vec::with_capacity(weighted_edges.len());
    for &(a, b, w) in weighted_edges {
        if a >= n || b >= n {
            return Err(Error::EdgeOutOfRange(a, b, n));
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::BadWeight { n: a, l: b, value: w });
        }
        seen.push((a.min(b), a.max(b)));
    }
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
    }
    Ok(Laplacian::from_weighted_edges_unchecked(
        n,
        weighted_edges.iter().copied(),
    ))
}

/// Second-smallest Laplacian eigenvalue (the Fiedler value). Zero, up to
/// tolerance, exactly when the weighted graph is disconnected.
pub fn algebraic_connectivity(l: &Laplacian) -> Result<f64> {
    Ok(l.spectrum()?.second_smallest())
}

/// Unit eigenvector for the second-smallest eigenvalue, orthogonal to the
/// all-ones vector. With a degenerate λ₂ any unit vector of the eigenspace
/// may be returned.
pub fn fiedler_vector(l: &Laplacian) -> Result<Vec<f64>> {
    let spectrum = l.spectrum()?;
    // When λ₂ ≈ 0 the null space has dimension > 1 and the raw column need
    // not be orthogonal to 1; deflate explicitly and fall back to the first
    // column if the second is consumed by the 1-direction.
    for k in [1usize, 0] {
        let mut v: Vec<f64> = spectrum.eigenvector(k).to_vec();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        for x in &mut v {
            *x -= mean;
        }
        let norm = math::norm2(&v);
        if norm > 1e-8 {
            for x in &mut v {
                *x /= norm;
            }
            return Ok(v);
        }
    }
    Err(Error::NonFinite("fiedler vector"))
}

/// Spectral radius of `W − J/N` for a symmetric `W` that fixes the all-ones
/// vector: the contraction rate of the consensus error left after removing
/// the average-preserving direction.
pub fn deflated_spectral_radius(w: &SymmetricMatrix) -> Result<f64> {
    let n = w.n();
    if n == 0 {
        return Err(Error::TooFewVertices(0));
    }
    if !w.is_finite() {
        return Err(Error::NonFinite("deflated spectral radius input"));
    }
    let ones = vec![1.0; n];
    let wx = w.matvec(&ones);
    let residual = wx
        .iter()
        .map(|&x| math::abs(x - 1.0))
        .fold(0.0f64, f64::max);
    if residual > 1e-8 * (1.0 + w.max_abs()) {
        return Err(Error::OnesNotInvariant(residual));
    }
    let spectrum = w.minus_uniform().eigen()?;
    Ok(spectrum
        .eigenvalues()
        .iter()
        .map(|&x| math::abs(x))
        .fold(0.0, f64::max))
}
