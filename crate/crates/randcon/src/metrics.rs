//! Monte-Carlo estimation of the mean-square convergence factor and the
//! per-iteration gain, plus step-size optimization over a shared sample set.

use crate::consensus::alpha_mss;
use crate::math;
use crate::rng::SeededRng;
use crate::topology::EdgeProbabilityMatrix;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Factors at or below this are treated as exact consensus when converting
/// to a gain; `ln` would otherwise overflow toward infinity.
pub const EXACT_CONSENSUS_FACTOR: f64 = 1e-15;

/// Gain reported for factors at or below [`EXACT_CONSENSUS_FACTOR`].
pub const GAIN_SENTINEL: f64 = 50.0;

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorEstimate {
    factor: f64,
    std_error: f64,
    n_samples: usize,
}

impl FactorEstimate {
    fn from_samples(values: impl Iterator<Item = f64>, n: usize) -> Self {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for v in values {
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let std_error = if n > 1 {
            let var = ((sumsq - sum * sum / n as f64) / (n as f64 - 1.0)).max(0.0);
            math::sqrt(var / n as f64)
        } else {
            0.0
        };
        FactorEstimate {
            factor: mean,
            std_error,
            n_samples: n,
        }
    }

    /// The sample mean.
    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// Standard error of the mean (zero for a single sample).
    pub fn std_error(&self) -> f64 {
        self.std_error
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
}

/// Extreme Laplacian eigenvalues, `(λ₂, λ_max)`, of a batch of sampled
/// topologies.
///
/// Holding these lets every step size reuse one eigendecomposition per
/// sample: the factor at `α` is the sample mean of
/// `max(1 − α·λ₂, α·λ_max − 1)`. Comparisons across step sizes then share
/// random numbers, so estimated curves are smooth in `α`.
#[derive(Debug, Clone)]
pub struct SampledSpectra {
    pairs: Vec<(f64, f64)>,
}

impl SampledSpectra {
    /// Draws `n_samples` topologies and records their extreme eigenvalues.
    ///
    /// Samples are derived from per-index child generators, so the same
    /// `rng` always yields the same batch regardless of evaluation order.
    pub fn draw(p: &EdgeProbabilityMatrix, n_samples: usize, rng: &SeededRng) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::TooFewSamples { need: 1, got: 0 });
        }
        let mut pairs = Vec::with_capacity(n_samples);
        for s in 0..n_samples {
            let mut child = rng.at_iteration(s as u64);
            let sample = p.sample_topology(&mut child);
            let spectrum = sample.laplacian().spectrum()?;
            pairs.push((spectrum.second_smallest(), spectrum.max_eigenvalue()));
        }
        Ok(SampledSpectra { pairs })
    }

    /// Builds the batch from precomputed `(λ₂, λ_max)` pairs.
    pub fn from_parts(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::TooFewSamples { need: 1, got: 0 });
        }
        for &(lo, hi) in &pairs {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite("eigenvalue pair"));
            }
            if lo < 0.0 || lo > hi {
                return Err(Error::BadParameter {
                    name: "eigenvalue pair",
                    value: lo,
                });
            }
        }
        Ok(SampledSpectra { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Estimated convergence factor at step size `alpha` over this batch.
    ///
    /// Per sample, the deflated weight-matrix eigenvalues lie in
    /// `[1 − α·λ_max, 1 − α·λ₂]`, so the largest magnitude is the larger
    /// interval endpoint magnitude.
    pub fn factor_at(&self, alpha: f64) -> FactorEstimate {
        assert!(alpha.is_finite(), "alpha must be finite");
        let n = self.pairs.len();
        FactorEstimate::from_samples(
            self.pairs
                .iter()
                .map(|&(lo, hi)| (1.0 - alpha * lo).max(alpha * hi - 1.0)),
            n,
        )
    }

    /// Sample mean of `λ₂` over the batch, with its standard error.
    pub fn expected_lambda2(&self) -> FactorEstimate {
        let n = self.pairs.len();
        FactorEstimate::from_samples(self.pairs.iter().map(|&(lo, _)| lo), n)
    }
}

/// Estimates the mean-square convergence factor at step size `alpha`:
/// the expected deflated spectral radius of `I − αL` over sampled
/// topologies.
pub fn estimate_convergence_factor(
    p: &EdgeProbabilityMatrix,
    alpha: f64,
    n_samples: usize,
    rng: &SeededRng,
) -> Result<FactorEstimate> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::BadParameter {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(SampledSpectra::draw(p, n_samples, rng)?.factor_at(alpha))
}

/// Per-iteration gain `−ln(factor)`, clamped to [`GAIN_SENTINEL`] once the
/// factor indicates exact consensus.
pub fn convergence_gain(factor: f64) -> f64 {
    if factor <= EXACT_CONSENSUS_FACTOR {
        GAIN_SENTINEL
    } else {
        // `factor == 1` gives `-0.0`; report a clean zero
        0.0 - math::ln(factor)
    }
}

/// Estimates `E[λ₂(L)]` over sampled topologies.
pub fn estimate_expected_lambda2(
    p: &EdgeProbabilityMatrix,
    n_samples: usize,
    rng: &SeededRng,
) -> Result<FactorEstimate> {
    Ok(SampledSpectra::draw(p, n_samples, rng)?.expected_lambda2())
}

/// Outcome of a step-size search.
#[derive(Debug, Clone)]
pub struct AlphaSearchResult {
    alpha: f64,
    factor: FactorEstimate,
    evaluations: usize,
}

impl AlphaSearchResult {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn factor(&self) -> &FactorEstimate {
        &self.factor
    }

    /// Number of factor evaluations the search spent.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

/// Minimizes the estimated convergence factor over the step size.
///
/// One batch of topologies is drawn up front and shared by every
/// evaluation, making the objective a deterministic piecewise-linear convex
/// function of `α`; golden-section search over `(0, 2/λ_max(L̄))` then
/// converges cleanly. The closed-form optimum for the mean system,
/// `2/(λ₂(L̄) + λ_max(L̄))`, is always tried as a candidate and kept when
/// it beats the bracket. `tol` is the final bracket width relative to the
/// full interval.
pub fn optimize_alpha(
    p: &EdgeProbabilityMatrix,
    n_samples: usize,
    tol: f64,
    rng: &SeededRng,
) -> Result<AlphaSearchResult> {
    if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
        return Err(Error::BadParameter {
            name: "tol",
            value: tol,
        });
    }
    let spectra = SampledSpectra::draw(p, n_samples, rng)?;
    let mean_spectrum = p.mean_laplacian().spectrum()?;
    let lam_max = mean_spectrum.max_eigenvalue();
    if lam_max <= 0.0 {
        // no edge can ever activate
        return Err(Error::EmptyEdgeSet);
    }

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (0.0, 2.0 / lam_max);
    let width = b;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = spectra.factor_at(c).factor();
    let mut fd = spectra.factor_at(d).factor();
    let mut evaluations = 2;
    while b - a > tol * width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = spectra.factor_at(c).factor();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = spectra.factor_at(d).factor();
        }
        evaluations += 1;
    }

    let mut best_alpha = 0.5 * (a + b);
    let mut best = spectra.factor_at(best_alpha);
    evaluations += 1;
    let lambda2 = mean_spectrum.second_smallest();
    if lambda2 > 0.0 {
        let alpha_star = 2.0 / (lambda2 + lam_max);
        let at_star = spectra.factor_at(alpha_star);
        evaluations += 1;
        if at_star.factor() < best.factor() {
            best_alpha = alpha_star;
            best = at_star;
        }
    }

    Ok(AlphaSearchResult {
        alpha: best_alpha,
        factor: best,
        evaluations,
    })
}

/// Lower bound on the best achievable gain from the conservative step size:
/// at `α = 1/(2·d_max)` the factor equals `1 − α·E[λ₂(L)]` exactly, so the
/// optimal gain is at least `−ln(1 − α·Ê[λ₂])`.
///
/// Returns [`GAIN_SENTINEL`] when the bound's factor reaches
/// [`EXACT_CONSENSUS_FACTOR`].
pub fn mss_gain_lower_bound(
    p: &EdgeProbabilityMatrix,
    n_samples: usize,
    rng: &SeededRng,
) -> Result<f64> {
    let alpha = alpha_mss(p.supergraph())?;
    let lambda2 = estimate_expected_lambda2(p, n_samples, rng)?;
    Ok(convergence_gain(1.0 - alpha * lambda2.factor()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Supergraph;
    use alloc::vec;

    fn single_edge(prob: f64) -> EdgeProbabilityMatrix {
        let g = Supergraph::new(2, [(0, 1)]).unwrap();
        EdgeProbabilityMatrix::uniform(g, prob).unwrap()
    }

    #[test]
    fn two_outcome_closed_forms() {
        // the lone edge activates with probability 1/2: λ₂ is 2 or 0, and
        // at α = 1/2 the factor per sample is 0 or 1
        let p = single_edge(0.5);
        let rng = SeededRng::new(7);
        let n = 20_000;
        let est = estimate_convergence_factor(&p, 0.5, n, &rng).unwrap();
        assert!((est.factor() - 0.5).abs() < 3.0 * est.std_error() + 1e-12);
        assert!(est.std_error() < 0.006);

        let lam = estimate_expected_lambda2(&p, n, &rng).unwrap();
        assert!((lam.factor() - 1.0).abs() < 3.0 * lam.std_error() + 1e-12);
    }

    #[test]
    fn from_parts_exact_statistics() {
        let s = SampledSpectra::from_parts(vec![(2.0, 2.0), (0.0, 0.0)]).unwrap();
        let f = s.factor_at(0.5);
        assert_eq!(f.factor(), 0.5);
        assert_eq!(f.std_error(), 0.5);
        assert_eq!(f.n_samples(), 2);
        let l = s.expected_lambda2();
        assert_eq!(l.factor(), 1.0);
        assert!((l.std_error() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_parts_rejects_bad_pairs() {
        assert!(matches!(
            SampledSpectra::from_parts(vec![]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            SampledSpectra::from_parts(vec![(f64::NAN, 1.0)]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            SampledSpectra::from_parts(vec![(2.0, 1.0)]),
            Err(Error::BadParameter { .. })
        ));
        assert!(matches!(
            SampledSpectra::from_parts(vec![(-0.5, 1.0)]),
            Err(Error::BadParameter { .. })
        ));
    }

    #[test]
    fn draw_requires_samples_and_replays() {
        let p = single_edge(0.3);
        let rng = SeededRng::new(11);
        assert!(matches!(
            SampledSpectra::draw(&p, 0, &rng),
            Err(Error::TooFewSamples { .. })
        ));
        let a = SampledSpectra::draw(&p, 64, &rng).unwrap();
        let b = SampledSpectra::draw(&p, 64, &rng).unwrap();
        assert_eq!(a.pairs(), b.pairs());
    }

    #[test]
    fn gain_values_and_sentinel() {
        assert!((convergence_gain(0.5) - core::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(convergence_gain(1.0), 0.0);
        assert_eq!(convergence_gain(1e-16), GAIN_SENTINEL);
        assert_eq!(convergence_gain(0.0), GAIN_SENTINEL);
    }

    #[test]
    fn estimator_rejects_bad_alpha() {
        let p = single_edge(0.5);
        let rng = SeededRng::new(1);
        assert!(matches!(
            estimate_convergence_factor(&p, 0.0, 10, &rng),
            Err(Error::BadParameter { .. })
        ));
        assert!(matches!(
            estimate_convergence_factor(&p, f64::NAN, 10, &rng),
            Err(Error::BadParameter { .. })
        ));
    }

    #[test]
    fn optimize_alpha_deterministic_triangle() {
        // every sample is the full triangle: factor |1 − 3α| vanishes at 1/3
        let g = Supergraph::complete(3).unwrap();
        let p = EdgeProbabilityMatrix::uniform(g, 1.0).unwrap();
        let rng = SeededRng::new(3);
        let res = optimize_alpha(&p, 32, 1e-4, &rng).unwrap();
        assert!((res.alpha() - 1.0 / 3.0).abs() < 1e-9);
        assert!(res.factor().factor() <= 1e-12);
        assert!(res.evaluations() >= 4);
    }

    #[test]
    fn optimize_alpha_two_outcome_edge() {
        // inactive samples contribute a constant 1; the active piece
        // |1 − 2α| pins the minimizer at 1/2 for any nonzero mix
        let p = single_edge(0.5);
        let rng = SeededRng::new(9);
        let res = optimize_alpha(&p, 4000, 1e-4, &rng).unwrap();
        assert!((res.alpha() - 0.5).abs() < 1e-3);
        assert!((res.factor().factor() - 0.5).abs() < 0.05);
    }

    #[test]
    fn optimize_alpha_rejects_bad_tol_and_dead_topology() {
        let p = single_edge(0.5);
        let rng = SeededRng::new(2);
        assert!(matches!(
            optimize_alpha(&p, 8, 0.0, &rng),
            Err(Error::BadParameter { .. })
        ));
        let dead = single_edge(0.0);
        assert!(matches!(
            optimize_alpha(&dead, 8, 1e-3, &rng),
            Err(Error::EmptyEdgeSet)
        ));
    }

    #[test]
    fn mss_bound_matches_factor_at_mss_step() {
        // at the conservative step the factor equals 1 − α·E[λ₂] sample by
        // sample, so the bound and the direct estimate agree on shared draws
        let g = Supergraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let p = EdgeProbabilityMatrix::uniform(g, 0.8).unwrap();
        let rng = SeededRng::new(21);
        let alpha = alpha_mss(p.supergraph()).unwrap();
        let direct = estimate_convergence_factor(&p, alpha, 500, &rng).unwrap();
        let bound = mss_gain_lower_bound(&p, 500, &rng).unwrap();
        assert!((bound - convergence_gain(direct.factor())).abs() < 1e-12);
    }
}
