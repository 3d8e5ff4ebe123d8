//! Independent oracles and instance generators shared by the integration
//! suites. Everything here deliberately avoids the library's own
//! eigensolver: eigenvalues come from characteristic-polynomial root
//! hunting, expectations from exhaustive subset enumeration, and the
//! triangle design problem from a closed form plus grid search.

#![allow(dead_code)]

use randcon::{EdgeProbabilityMatrix, SeededRng, Supergraph, SymmetricMatrix};

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    let n = p.len() - 1;
    p[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (n - i) as f64)
        .collect()
}

fn synthetic_div(p: &[f64], r: f64) -> (Vec<f64>, f64) {
    let mut q = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &c in p {
        acc = acc * r + c;
        q.push(acc);
    }
    let rest = q.pop().unwrap();
    (q, rest)
}

/// All roots (ascending, with multiplicity) of a polynomial with only real
/// roots, given by descending coefficients. Roots of the derivative
/// bracket the roots, so recursion down to the quadratic closed form plus
/// bisection finds every one.
pub fn real_roots(poly: &[f64]) -> Vec<f64> {
    let lead = poly[0];
    let p: Vec<f64> = poly.iter().map(|&c| c / lead).collect();
    let deg = p.len() - 1;
    match deg {
        0 => Vec::new(),
        1 => vec![-p[1]],
        2 => {
            let disc = (p[1] * p[1] - 4.0 * p[2]).max(0.0).sqrt();
            let mut r = vec![(-p[1] - disc) / 2.0, (-p[1] + disc) / 2.0];
            r.sort_by(f64::total_cmp);
            r
        }
        _ => {
            let crit = real_roots(&poly_deriv(&p));
            let bound = 1.0 + p[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
            let scale = p.iter().map(|c| c.abs()).fold(1.0, f64::max);
            let mut pts = vec![-bound];
            pts.extend(&crit);
            pts.push(bound);

            let mut distinct: Vec<f64> = Vec::new();
            let push_root = |r: f64, distinct: &mut Vec<f64>| {
                if !distinct.iter().any(|&q| (q - r).abs() <= 1e-7) {
                    distinct.push(r);
                }
            };
            // repeated roots sit at critical points and produce no sign change
            for &t in &crit {
                if poly_eval(&p, t).abs() <= 1e-9 * scale {
                    push_root(t, &mut distinct);
                }
            }
            for w in pts.windows(2) {
                let (fa, fb) = (poly_eval(&p, w[0]), poly_eval(&p, w[1]));
                if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
                    continue;
                }
                let (mut lo, mut hi) = (w[0], w[1]);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if poly_eval(&p, mid).signum() == fa.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                push_root(0.5 * (lo + hi), &mut distinct);
            }
            distinct.sort_by(f64::total_cmp);

            let mut rem = p.clone();
            let mut out: Vec<f64> = Vec::new();
            for &r in &distinct {
                while out.len() < deg {
                    let (q, rest) = synthetic_div(&rem, r);
                    if rest.abs() <= 1e-6 * scale {
                        out.push(r);
                        rem = q;
                    } else {
                        break;
                    }
                }
            }
            if out.len() < deg {
                out.extend(real_roots(&rem));
            }
            out.sort_by(f64::total_cmp);
            out
        }
    }
}

fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn trace(n: usize, a: &[f64]) -> f64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

/// Characteristic polynomial `det(λI − M)` by the Faddeev–LeVerrier trace
/// recursion; descending coefficients, monic.
pub fn char_poly(m: &SymmetricMatrix) -> Vec<f64> {
    let n = m.n();
    let a = m.as_slice();
    let mut coeffs = vec![1.0];
    let mut mk: Vec<f64> = a.to_vec();
    for k in 1..=n {
        let ck = -trace(n, &mk) / k as f64;
        coeffs.push(ck);
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                shifted[i * n + i] += ck;
            }
            mk = matmul(n, a, &shifted);
        }
    }
    coeffs
}

/// Eigenvalues (ascending, with multiplicity) of a small symmetric matrix
/// by brute-force root finding on the characteristic polynomial.
pub fn eigenvalues_bruteforce(m: &SymmetricMatrix) -> Vec<f64> {
    assert!(m.n() <= 4, "brute-force eigenvalues are for n <= 4");
    real_roots(&char_poly(m))
}

fn unit_laplacian_matrix(n: usize, edges: &[(usize, usize)]) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(n);
    for &(a, b) in edges {
        m.set(a, b, m.get(a, b) - 1.0);
        m.set(a, a, m.get(a, a) + 1.0);
        m.set(b, b, m.get(b, b) + 1.0);
    }
    m
}

/// Exact convergence factor `E[ρ(I − αL − J/n)]` by enumerating every
/// edge subset with its Bernoulli probability.
pub fn exact_factor(p: &EdgeProbabilityMatrix, alpha: f64) -> f64 {
    exact_expectation(p, |lam2, lam_max| (1.0 - alpha * lam2).max(alpha * lam_max - 1.0))
}

/// Exact `E[λ₂(L)]` by subset enumeration.
pub fn exact_expected_lambda2(p: &EdgeProbabilityMatrix) -> f64 {
    exact_expectation(p, |lam2, _| lam2)
}

fn exact_expectation(p: &EdgeProbabilityMatrix, f: impl Fn(f64, f64) -> f64) -> f64 {
    let g = p.supergraph();
    let (n, m) = (g.n(), g.m());
    assert!(n <= 4 && m <= 12, "subset enumeration is for tiny instances");
    let probs = p.probs();
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        let mut weight = 1.0;
        let mut active = Vec::new();
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                weight *= probs[e];
                active.push((a, b));
            } else {
                weight *= 1.0 - probs[e];
            }
        }
        if weight == 0.0 {
            continue;
        }
        let ev = eigenvalues_bruteforce(&unit_laplacian_matrix(n, &active));
        total += weight * f(ev[1], ev[n - 1]);
    }
    total
}

/// `λ₂` of a weighted triangle, closed form: with `s` the weight sum and
/// `q` the sum of pairwise weight products, the nonzero eigenvalues are
/// `s ± sqrt(s² − 3q)`.
pub fn triangle_lambda2(w01: f64, w02: f64, w12: f64) -> f64 {
    let s = w01 + w02 + w12;
    let q = w01 * w02 + w01 * w12 + w02 * w12;
    s - (s * s - 3.0 * q).max(0.0).sqrt()
}

/// Best `λ₂` over the triangle's probability cube at 0.01 resolution,
/// subject to the cost budget. Costs follow the edge order
/// `(0,1), (0,2), (1,2)`.
pub fn k3_grid_max_lambda2(costs: &[f64; 3], budget: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..=100 {
        let p0 = i as f64 / 100.0;
        let c0 = costs[0] * p0;
        if c0 > budget + 1e-12 {
            break;
        }
        for j in 0..=100 {
            let p1 = j as f64 / 100.0;
            let c01 = c0 + costs[1] * p1;
            if c01 > budget + 1e-12 {
                break;
            }
            for k in 0..=100 {
                let p2 = k as f64 / 100.0;
                if c01 + costs[2] * p2 > budget + 1e-12 {
                    break;
                }
                best = best.max(triangle_lambda2(p0, p1, p2));
            }
        }
    }
    best
}

/// Random connected supergraph: a random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut SeededRng, n: usize) -> Supergraph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let u = (rng.next_u64() % v as u64) as usize;
        edges.push((u, v));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if !edges.contains(&(a, b)) && rng.bernoulli(0.4) {
                edges.push((a, b));
            }
        }
    }
    Supergraph::new(n, edges).unwrap()
}

pub fn random_values(rng: &mut SeededRng, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count).map(|_| lo + (hi - lo) * rng.next_f64()).collect()
}
