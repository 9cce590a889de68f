//! Probability and information pipeline.
//!
//! For a basis `{|i_m⟩}` with priors `p_i` and a POVM `{M_s}`:
//!
//! - conditional `p_{s|i} = ⟨i_m|M_s|i_m⟩`
//! - outcome probability `p(s) = Σ_i p_i p_{s|i}`
//! - posterior `p_{i|s} = p_i p_{s|i} / p(s)`
//! - `I_m = H{p_i} - Σ_s p(s) H{p_{i|s}}`
//!
//! All entropies are in bits.

use serde::Serialize;

use crate::error::{ensure_dim, Error, Result};
use crate::mub::{Basis, MubFamily};
use crate::quantum::Povm;

/// Outcomes with total probability below this carry no information.
pub const MIN_OUTCOME_PROB: f64 = 1e-14;

const PRIOR_SUM_TOL: f64 = 1e-12;
const ENTROPY_SUM_TOL: f64 = 1e-8;
const NEGATIVE_TOL: f64 = 1e-10;

/// Alice's per-basis priors `p^(m)`, each sorted in descending order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PriorProfile {
    per_basis: Vec<Vec<f64>>,
}

impl PriorProfile {
    /// Validates each vector and stores it sorted descending.
    pub fn new(per_basis: Vec<Vec<f64>>) -> Result<Self> {
        let d = per_basis
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Argument("prior profile needs at least one basis".into()))?;
        let mut per_basis = per_basis;
        for p in &mut per_basis {
            ensure_dim(d, p.len())?;
            if p.iter().any(|&x| x.is_nan() || x < 0.0 || !x.is_finite()) {
                return Err(Error::Argument(format!("priors must be nonnegative: {p:?}")));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > PRIOR_SUM_TOL {
                return Err(Error::Argument(format!("priors sum to {sum}, not 1")));
            }
            p.sort_by(|a, b| b.total_cmp(a));
        }
        Ok(Self { per_basis })
    }

    /// `count` bases, each with uniform priors `1/d`.
    pub fn equal(dim: usize, count: usize) -> Self {
        Self {
            per_basis: vec![vec![1.0 / dim as f64; dim]; count],
        }
    }

    pub fn dim(&self) -> usize {
        self.per_basis[0].len()
    }

    pub fn len(&self) -> usize {
        self.per_basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_basis.is_empty()
    }

    pub fn per_basis(&self) -> &[Vec<f64>] {
        &self.per_basis
    }

    /// Largest prior `p_1^(m)` of each basis.
    pub fn p1(&self) -> Vec<f64> {
        self.per_basis.iter().map(|p| p[0]).collect()
    }

    pub fn p_max(&self) -> f64 {
        self.p1().into_iter().fold(0.0, f64::max)
    }

    /// True when every prior equals `1/d` within `tol`.
    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.dim() as f64;
        self.per_basis.iter().flatten().all(|&x| (x - u).abs() <= tol)
    }
}

/// Per-basis and total information for one prior profile and measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfoBreakdown {
    /// `I_m` in bits.
    pub per_basis_info: Vec<f64>,
    /// `I_tot = Σ_m I_m` in bits.
    pub total: f64,
    /// `p^(m)(s)` for each basis.
    pub outcome_dist: Vec<Vec<f64>>,
}

/// `D×d` matrix of `p_{s|i}` (row `s`, column `i`), clamped to `[0, 1]`.
pub fn conditional_probs(basis: &Basis, povm: &Povm) -> Result<Vec<Vec<f64>>> {
    ensure_dim(basis.dim(), povm.dim())?;
    Ok(povm
        .elements()
        .iter()
        .map(|m| {
            basis
                .vectors()
                .iter()
                .map(|v| v.expectation(m).clamp(0.0, 1.0))
                .collect()
        })
        .collect())
}

/// Shannon entropy in bits of a probability vector.
///
/// Entries may be off by rounding noise: values down to `-1e-10` are treated
/// as zero and the vector is renormalised if its sum is within `1e-8` of 1.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::Argument("entropy of an empty distribution".into()));
    }
    if let Some(&x) = dist.iter().find(|&&x| x < -NEGATIVE_TOL || !x.is_finite()) {
        return Err(Error::Argument(format!("invalid probability {x}")));
    }
    let sum: f64 = dist.iter().map(|&x| x.max(0.0)).sum();
    if (sum - 1.0).abs() > ENTROPY_SUM_TOL {
        return Err(Error::Argument(format!("probabilities sum to {sum}, not 1")));
    }
    let h = shannon(dist.iter().map(|&x| x.max(0.0) / sum));
    Ok(h.clamp(0.0, (dist.len() as f64).log2()))
}

/// `-Σ q log₂ q` with `0·log 0 = 0`; no validation.
pub(crate) fn shannon(dist: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = dist
        .into_iter()
        .filter(|&q| q > 0.0)
        .map(|q| -q * q.log2())
        .sum();
    h.max(0.0)
}

/// Mutual information of a classical channel given as `cond[s][i] = p(s|i)`,
/// evaluated through posteriors: `H{p_i} - Σ_s p(s) H{p_{i|s}}`.
pub fn channel_information(priors: &[f64], cond: &[Vec<f64>]) -> f64 {
    let prior_entropy = shannon(priors.iter().copied());
    let mut remaining = 0.0;
    let mut posterior = vec![0.0; priors.len()];
    for row in cond {
        let mut ps = 0.0;
        for (i, (&p, &c)) in priors.iter().zip(row).enumerate() {
            posterior[i] = p * c;
            ps += posterior[i];
        }
        if ps < MIN_OUTCOME_PROB {
            continue;
        }
        remaining += ps * shannon(posterior.iter().map(|&x| x / ps));
    }
    (prior_entropy - remaining).clamp(0.0, prior_entropy)
}

/// The same quantity through the output side: `H{p(s)} - Σ_i p_i H{p_{s|i}}`.
pub fn channel_information_output_route(priors: &[f64], cond: &[Vec<f64>]) -> f64 {
    let outcome: Vec<f64> = cond
        .iter()
        .map(|row| priors.iter().zip(row).map(|(p, c)| p * c).sum())
        .collect();
    let noise: f64 = priors
        .iter()
        .enumerate()
        .map(|(i, &p)| p * shannon(cond.iter().map(|row| row[i])))
        .sum();
    shannon(outcome) - noise
}

fn outcome_distribution(priors: &[f64], cond: &[Vec<f64>]) -> Vec<f64> {
    cond.iter()
        .map(|row| priors.iter().zip(row).map(|(p, c)| p * c).sum())
        .collect()
}

/// `I_m` for one basis, in bits. The priors may be in any order.
pub fn mutual_information(priors: &[f64], basis: &Basis, povm: &Povm) -> Result<f64> {
    ensure_dim(basis.dim(), priors.len())?;
    let cond = conditional_probs(basis, povm)?;
    Ok(channel_information(priors, &cond))
}

/// `I_m` for every basis of the family and their sum.
pub fn total_information(profile: &PriorProfile, family: &MubFamily, povm: &Povm) -> Result<InfoBreakdown> {
    ensure_dim(family.len(), profile.len())?;
    ensure_dim(family.dim(), profile.dim())?;
    let mut per_basis_info = Vec::with_capacity(family.len());
    let mut outcome_dist = Vec::with_capacity(family.len());
    for (priors, basis) in profile.per_basis().iter().zip(family.bases()) {
        let cond = conditional_probs(basis, povm)?;
        per_basis_info.push(channel_information(priors, &cond));
        outcome_dist.push(outcome_distribution(priors, &cond));
    }
    let total = per_basis_info.iter().sum();
    Ok(InfoBreakdown {
        per_basis_info,
        total,
        outcome_dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::standard_mubs;
    use crate::quantum::{projector_povm, HermitianOperator, StateVector, C64};

    fn z_povm() -> Povm {
        projector_povm(&standard_mubs(2, 1).unwrap().bases()[0]).unwrap()
    }

    #[test]
    fn conditionals_for_qubit_bases() {
        let fam = standard_mubs(2, 2).unwrap();
        let zz = conditional_probs(&fam.bases()[0], &z_povm()).unwrap();
        assert_eq!(zz, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let xz = conditional_probs(&fam.bases()[1], &z_povm()).unwrap();
        for row in xz {
            for c in row {
                assert!((c - 0.5).abs() < 1e-15);
            }
        }
        let trivial = Povm::new(vec![HermitianOperator::identity(2)]).unwrap();
        let ones = conditional_probs(&fam.bases()[1], &trivial).unwrap();
        assert_eq!(ones.len(), 1);
        assert!(ones[0].iter().all(|&c| (c - 1.0).abs() < 1e-15));
    }

    #[test]
    fn conditional_dimension_mismatch() {
        let fam = standard_mubs(3, 1).unwrap();
        assert!(matches!(
            conditional_probs(&fam.bases()[0], &z_povm()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        // oracle: -0.75 log2 0.75 - 0.25 log2 0.25 evaluated by hand
        let h = entropy(&[0.75, 0.25]).unwrap();
        assert!((h - 0.811_278_124_459_132_9).abs() < 1e-15);
    }

    #[test]
    fn entropy_rejects_bad_input() {
        assert!(matches!(entropy(&[1.1, -0.1]), Err(Error::Argument(_))));
        assert!(matches!(entropy(&[0.5, 0.4]), Err(Error::Argument(_))));
        assert!(matches!(entropy(&[]), Err(Error::Argument(_))));
        // rounding noise is absorbed
        assert!(entropy(&[1.0 + 5e-11, -5e-11]).unwrap() < 1e-9);
    }

    #[test]
    fn mutual_information_examples() {
        let fam = standard_mubs(2, 2).unwrap();
        let z = z_povm();
        assert_eq!(mutual_information(&[0.5, 0.5], &fam.bases()[0], &z).unwrap(), 1.0);
        assert!(mutual_information(&[0.5, 0.5], &fam.bases()[1], &z).unwrap().abs() < 1e-15);
        let i = mutual_information(&[0.75, 0.25], &fam.bases()[0], &z).unwrap();
        assert!((i - 0.811_278_124_459_132_9).abs() < 1e-15);
    }

    #[test]
    fn total_information_examples() {
        let fam = standard_mubs(2, 3).unwrap();
        let b = total_information(&PriorProfile::equal(2, 3), &fam, &z_povm()).unwrap();
        assert_eq!(b.per_basis_info[0], 1.0);
        assert!(b.per_basis_info[1].abs() < 1e-15 && b.per_basis_info[2].abs() < 1e-15);
        assert!((b.total - 1.0).abs() < 1e-15);

        // projective measurement along (1,1,1)/√3
        let n = 1.0 / 3f64.sqrt();
        let theta = n.acos();
        let phi = std::f64::consts::FRAC_PI_4;
        let up = StateVector::new(vec![
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
        .unwrap();
        let down = StateVector::new(vec![
            C64::new((theta / 2.0).sin(), 0.0),
            -C64::from_polar((theta / 2.0).cos(), phi),
        ])
        .unwrap();
        let povm = Povm::new(vec![up.projector(), down.projector()]).unwrap();
        let b = total_information(&PriorProfile::equal(2, 3), &fam, &povm).unwrap();
        assert!((b.total - 0.768).abs() < 1e-3, "{}", b.total);

        let fam3 = standard_mubs(3, 2).unwrap();
        let trivial = Povm::new(vec![HermitianOperator::identity(3)]).unwrap();
        let b = total_information(&PriorProfile::equal(3, 2), &fam3, &trivial).unwrap();
        assert_eq!(b.per_basis_info, vec![0.0, 0.0]);
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn count_mismatch_rejected() {
        let fam = standard_mubs(2, 3).unwrap();
        assert!(total_information(&PriorProfile::equal(2, 2), &fam, &z_povm()).is_err());
    }

    #[test]
    fn prior_profile_sorts_and_validates() {
        let p = PriorProfile::new(vec![vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap();
        assert_eq!(p.per_basis()[0], vec![0.8, 0.2]);
        assert_eq!(p.p1(), vec![0.8, 0.5]);
        assert_eq!(p.p_max(), 0.8);
        assert!(!p.is_uniform(1e-12));
        assert!(PriorProfile::equal(3, 2).is_uniform(0.0));
        assert!(PriorProfile::new(vec![vec![0.7, 0.2]]).is_err());
        assert!(PriorProfile::new(vec![vec![1.2, -0.2]]).is_err());
        assert!(PriorProfile::new(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
    }

    #[test]
    fn zero_probability_outcome_contributes_nothing() {
        let fam = standard_mubs(2, 1).unwrap();
        let povm = Povm::new(vec![
            HermitianOperator::identity(2),
            HermitianOperator::zeros(2),
        ])
        .unwrap();
        assert_eq!(mutual_information(&[0.6, 0.4], &fam.bases()[0], &povm).unwrap(), 0.0);
    }
}
