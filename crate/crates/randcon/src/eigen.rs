//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit-shift
//! QL iteration, the classic EISPACK pair. Dense storage; intended for
//! matrices up to a couple of thousand rows, single-threaded per matrix.

use crate::math;
use crate::matrix::SymmetricMatrix;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Relative negligibility threshold used by the QL sweep when callers have
/// no reason to loosen it.
pub const DEFAULT_EIGEN_TOL: f64 = f64::EPSILON;

/// QL sweeps allowed per matrix row before giving up.
const SWEEPS_PER_ROW: usize = 30;

/// An eigendecomposition `M = U diag(eigenvalues) U^T`.
///
/// Eigenvalues are ascending; `eigenvector(k)` is the unit column of `U`
/// paired with `eigenvalues()[k]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n: usize,
    eigenvalues: Vec<f64>,
    // column-major: column k occupies vectors[k*n..(k+1)*n]
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.n - 1]
    }

    /// Second-smallest eigenvalue; for a Laplacian spectrum this is the
    /// algebraic connectivity.
    pub fn second_smallest(&self) -> f64 {
        self.eigenvalues[1]
    }

    /// `‖M − U Λ Uᵀ‖_F`, for verifying a decomposition against its source.
    pub fn reconstruction_residual(&self, m: &SymmetricMatrix) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.vectors[k * n + i] * self.eigenvalues[k] * self.vectors[k * n + j];
                }
                let d = m.get(i, j) - s;
                acc += d * d;
            }
        }
        math::sqrt(acc)
    }

    /// `‖UᵀU − I‖_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for r in 0..n {
                    s += self.vectors[a * n + r] * self.vectors[b * n + r];
                }
                let d = s - if a == b { 1.0 } else { 0.0 };
                acc += d * d;
            }
        }
        math::sqrt(acc)
    }
}

impl SymmetricMatrix {
    /// Eigendecomposition at the default tolerance.
    pub fn eigen(&self) -> Result<Spectrum> {
        symmetric_eigen(self, DEFAULT_EIGEN_TOL)
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// `tol` scales the off-diagonal negligibility test of the QL sweep; values
/// below machine epsilon are clamped to it. Fails on non-finite input and
/// when the sweep cap (30 per row) is exhausted.
pub fn symmetric_eigen(m: &SymmetricMatrix, tol: f64) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let n = m.n();
    if n == 0 {
        return Ok(Spectrum {
            n,
            eigenvalues: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let mut v = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e);
    ql_implicit(n, &mut v, &mut d, &mut e, tol.max(f64::EPSILON))?;

    // repack accumulated transforms: column k of v is the k-th eigenvector
    let mut vectors = vec![0.0; n * n];
    for k in 0..n {
        for r in 0..n {
            vectors[k * n + r] = v[r * n + k];
        }
    }
    Ok(Spectrum {
        n,
        eigenvalues: d,
        vectors,
    })
}

/// Householder reduction of `v` (row-major, overwritten with the
/// accumulated transform); diagonal lands in `d`, subdiagonal in `e`.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += math::abs(*item);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            // generate the Householder vector
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = math::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // apply similarity transformation to remaining rows
            for j in 0..i {
                let f = d[j];
                v[j * n + i] = f;
                let mut g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..(n - 1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal `(d, e)`, rotations accumulated
/// into `v`. Eigenvalues come out ascending with matching columns.
fn ql_implicit(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], eps: f64) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let sweep_cap = SWEEPS_PER_ROW * n;
    let mut sweeps = 0usize;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(math::abs(d[l]) + math::abs(e[l]));
        loop {
            // find the first negligible subdiagonal at or beyond l
            let mut m = l;
            while m < n - 1 {
                if math::abs(e[m]) <= eps * tst1 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }

            sweeps += 1;
            if sweeps > sweep_cap {
                return Err(Error::EigenNoConvergence(sweep_cap));
            }

            // implicit shift from the 2x2 at l
            let g = d[l];
            let mut p = (d[l + 1] - g) / (2.0 * e[l]);
            let mut r = math::hypot(p, 1.0);
            if p < 0.0 {
                r = -r;
            }
            d[l] = e[l] / (p + r);
            d[l + 1] = e[l] * (p + r);
            let dl1 = d[l + 1];
            let mut h = g - d[l];
            for item in d.iter_mut().take(n).skip(l + 2) {
                *item -= h;
            }
            f += h;

            // QL sweep with accumulated rotations
            p = d[m];
            let mut c = 1.0;
            let mut c2 = c;
            let mut c3 = c;
            let el1 = e[l + 1];
            let mut s = 0.0;
            let mut s2 = 0.0;
            for i in (l..m).rev() {
                c3 = c2;
                c2 = c;
                s2 = s;
                let g = c * e[i];
                h = c * p;
                r = math::hypot(p, e[i]);
                e[i + 1] = s * r;
                s = e[i] / r;
                c = p / r;
                p = c * d[i] - s * g;
                d[i + 1] = h + s * (c * g + s * d[i]);
                for k in 0..n {
                    let h = v[k * n + i + 1];
                    v[k * n + i + 1] = s * v[k * n + i] + c * h;
                    v[k * n + i] = c * v[k * n + i] - s * h;
                }
            }
            p = -s * s2 * c3 * el1 * e[l] / dl1;
            e[l] = s * p;
            d[l] = c * p;

            if math::abs(e[l]) <= eps * tst1 {
                break;
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // ascending order, columns follow their eigenvalues
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().take(n).skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for r in 0..n {
                v.swap(r * n + i, r * n + k);
            }
        }
    }
    Ok(())
}
