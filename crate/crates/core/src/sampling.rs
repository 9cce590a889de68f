//! Seeded random priors, states and rank-one POVMs.
//!
//! Every sample is drawn from a ChaCha8 generator keyed by a 64-bit `seed`
//! and positioned on its own `stream` (the trial index). ChaCha is
//! counter-based, so `(seed, stream)` fixes the sample sequence bit for bit
//! regardless of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::PriorProfile;
use crate::quantum::{orthonormalize_columns, ComplexMatrix, Povm, StateVector, C64};

pub type TrialRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> TrialRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    /// Flat Dirichlet over the probability simplex.
    UniformSimplex,
    Equal,
}

/// A probability vector of length `d`, sorted descending.
pub fn random_priors<R: Rng + ?Sized>(d: usize, rng: &mut R, mode: PriorMode) -> Vec<f64> {
    match mode {
        PriorMode::Equal => vec![1.0 / d as f64; d],
        PriorMode::UniformSimplex => {
            let mut p: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let sum: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= sum);
            p.sort_by(|a, b| b.total_cmp(a));
            p
        }
    }
}

pub fn random_profile<R: Rng + ?Sized>(d: usize, count: usize, rng: &mut R, mode: PriorMode) -> PriorProfile {
    let per_basis = (0..count).map(|_| random_priors(d, rng, mode)).collect();
    PriorProfile::new(per_basis).expect("sampled priors are normalised")
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows×cols` matrix of independent standard complex Gaussians.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // fill row by row so the sample order does not depend on storage layout
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed `rows×cols` isometry (`rows ≥ cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    orthonormalize_columns(&gaussian_matrix(rows, cols, rng))
}

/// `D` rank-one elements `M_s = v_s† v_s` from the rows of a random `D×d`
/// isometry, so that `Σ_s M_s = I`.
pub fn random_rank_one_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<Povm> {
    if outcomes < d {
        return Err(Error::Argument(format!(
            "{outcomes} rank-one elements cannot sum to the identity in dimension {d}"
        )));
    }
    Povm::from_isometry_rows(&random_isometry(outcomes, d, rng)?)
}

/// Unitarily invariant random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::normalized((0..d).map(|_| complex_gaussian(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::validate_povm;

    #[test]
    fn equal_priors() {
        let mut rng = RngSeed::new(1, 0).rng();
        assert_eq!(random_priors(3, &mut rng, PriorMode::Equal), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn simplex_priors_are_sorted_and_normalised() {
        let mut rng = RngSeed::new(3, 9).rng();
        for d in 2..10 {
            let p = random_priors(d, &mut rng, PriorMode::UniformSimplex);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn seeds_reproduce_and_streams_differ() {
        let a = random_priors(2, &mut RngSeed::new(7, 3).rng(), PriorMode::UniformSimplex);
        let b = random_priors(2, &mut RngSeed::new(7, 3).rng(), PriorMode::UniformSimplex);
        let c = random_priors(2, &mut RngSeed::new(7, 4).rng(), PriorMode::UniformSimplex);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a[0] >= 0.5 && (a[0] + a[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn larger_prior_mean_is_three_quarters() {
        // max(U, 1-U) for U uniform on [0,1] has mean 3/4
        let mut rng = RngSeed::new(11, 0).rng();
        let n = 100_000;
        let mean = (0..n)
            .map(|_| random_priors(2, &mut rng, PriorMode::UniformSimplex)[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.75).abs() < 0.01, "{mean}");
    }

    #[test]
    fn rank_one_povm_shapes() {
        let mut rng = RngSeed::new(5, 1).rng();
        let p = random_rank_one_povm(2, 2, &mut rng).unwrap();
        assert_eq!(p.outcomes(), 2);
        assert!(validate_povm(&p, 1e-9).passed);
        for e in p.elements() {
            // projective: each element is idempotent
            let m = e.matrix();
            assert!((m * m - m).norm() < 1e-10);
        }
        let p = random_rank_one_povm(2, 16, &mut rng).unwrap();
        assert!(validate_povm(&p, 1e-9).passed);
        for e in p.elements() {
            let ev = e.eigenvalues();
            assert!(ev[0].abs() <= 1e-9, "{ev:?}");
        }
        assert!(matches!(random_rank_one_povm(3, 2, &mut rng), Err(Error::Argument(_))));
    }

    #[test]
    fn rank_one_povm_is_bitwise_deterministic() {
        let a = random_rank_one_povm(3, 7, &mut RngSeed::new(42, 17).rng()).unwrap();
        let b = random_rank_one_povm(3, 7, &mut RngSeed::new(42, 17).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn completeness_over_many_seeds() {
        for seed in 0..1000u64 {
            let mut rng = RngSeed::new(seed, seed * 31).rng();
            let d = 2 + (seed as usize % 15);
            let outcomes = d + (seed as usize * 7) % (65 - d);
            let p = random_rank_one_povm(d, outcomes, &mut rng).unwrap();
            let mut sum = ComplexMatrix::zeros(d, d);
            for e in p.elements() {
                sum += e.matrix();
            }
            let dev = (sum - ComplexMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-10, "seed {seed}: d={d} D={outcomes} dev {dev:e}");
        }
    }

    #[test]
    fn expected_trace_is_d_over_outcomes() {
        let (d, outcomes, n) = (3usize, 8usize, 4000);
        let mut traces = Vec::with_capacity(n);
        for t in 0..n as u64 {
            let p = random_rank_one_povm(d, outcomes, &mut RngSeed::new(99, t).rng()).unwrap();
            traces.push(p.elements()[0].trace());
        }
        let mean = traces.iter().sum::<f64>() / n as f64;
        let var = traces.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let sigma = (var / n as f64).sqrt();
        let expected = d as f64 / outcomes as f64;
        assert!((mean - expected).abs() < 3.0 * sigma, "{mean} vs {expected} ± {sigma}");
    }

    #[test]
    fn pure_states() {
        let a = random_pure_state(4, &mut RngSeed::new(2, 2).rng()).unwrap();
        let b = random_pure_state(4, &mut RngSeed::new(2, 2).rng()).unwrap();
        assert_eq!(a, b);
        let norm: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_first_population_mean() {
        let d = 3;
        let mut rng = RngSeed::new(8, 0).rng();
        let n = 100_000;
        let mean = (0..n)
            .map(|_| random_pure_state(d, &mut rng).unwrap().amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0 / d as f64).abs() < 0.01, "{mean}");
    }
}
