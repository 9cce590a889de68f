//! Closed-form upper bounds on the information sent via `M` mutually
//! unbiased bases in dimension `d`, the entropic lower bounds they come
//! from, and a violation checker.
//!
//! With `K = ⌊M·d / (d+M-1)⌋`:
//!
//! ```text
//! tight  = M·log₂(d/K) - (K+1)·(M - K·(d+M-1)/d)·log₂(1 + 1/K)
//! weak   = M·log₂((d+M-1)/M)          (tight ≤ weak)
//! half   = (M/2)·log₂ d
//! ```
//!
//! Unequal priors enter either as per-basis weights `1/(d·p_1^(m))` on the
//! left-hand side ("weighted" forms) or as the factor `d·p_max` on the
//! right-hand side ("scaled" forms, named `…Weak`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies which inequality a [`BoundValue`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundName {
    /// `I_1 + I_2 ≤ log₂ d`, equal priors.
    TwoEqual,
    /// `Σ_m I_m/(d p_1^(m)) ≤ log₂ d`, two bases.
    TwoWeighted,
    /// `I_1 + I_2 ≤ d·p_max·log₂ d`.
    TwoWeak,
    MEqualTight,
    MEqualWeak,
    MEqualHalf,
    /// `Σ_m I_m/(d p_1^(m)) ≤ tight`.
    MWeightedTight,
    /// `I_tot ≤ d·p_max·tight`.
    MWeightedWeak,
    /// `Σ_m I_m/(d p_1^(m)) ≤ M·log₂((d+M-1)/M)`.
    MWeightedLoose,
    /// `I_tot ≤ d·p_max·M·log₂((d+M-1)/M)`.
    MWeightedLooseWeak,
    /// `Σ_m I_m/(d p_1^(m)) ≤ (M/2)·log₂ d`.
    MWeightedHalf,
    /// `I_tot ≤ d·p_max·(M/2)·log₂ d`.
    MWeightedHalfWeak,
    /// `I_1 + I_2 + I_3 ≤ 1` for a qubit, equal priors.
    QubitThree,
    /// `Σ_m I_m/(2 p_1^(m)) ≤ 1`.
    QubitThreeWeighted,
    /// `I_1 + I_2 + I_3 ≤ 2·p_max`.
    QubitThreeWeak,
}

impl BoundName {
    pub const ALL: [BoundName; 15] = [
        BoundName::TwoEqual,
        BoundName::TwoWeighted,
        BoundName::TwoWeak,
        BoundName::MEqualTight,
        BoundName::MEqualWeak,
        BoundName::MEqualHalf,
        BoundName::MWeightedTight,
        BoundName::MWeightedWeak,
        BoundName::MWeightedLoose,
        BoundName::MWeightedLooseWeak,
        BoundName::MWeightedHalf,
        BoundName::MWeightedHalfWeak,
        BoundName::QubitThree,
        BoundName::QubitThreeWeighted,
        BoundName::QubitThreeWeak,
    ];

    /// Bounds proven only for equal priors (conjectured otherwise).
    pub fn requires_equal_priors(self) -> bool {
        matches!(
            self,
            BoundName::TwoEqual
                | BoundName::MEqualTight
                | BoundName::MEqualWeak
                | BoundName::MEqualHalf
                | BoundName::QubitThree
        )
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.to_string() == s)
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Inputs a bound was evaluated with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub d: usize,
    pub m: usize,
    pub p1: Vec<f64>,
    pub p_max: f64,
    pub k: Option<usize>,
}

/// Right-hand side of one inequality, in bits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: BoundName,
    pub value: f64,
    /// Coefficients on `I_m` for weighted forms; `None` means all ones.
    pub weights: Option<Vec<f64>>,
    pub params: BoundParams,
}

impl BoundValue {
    /// The left-hand side this bound constrains: `Σ_m w_m I_m`.
    pub fn lhs(&self, per_basis_info: &[f64]) -> f64 {
        match &self.weights {
            Some(w) => w.iter().zip(per_basis_info).map(|(w, i)| w * i).sum(),
            None => per_basis_info.iter().sum(),
        }
    }
}

/// Outcome of comparing a left-hand side against a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub lhs: f64,
    pub bound: BoundValue,
    /// `bound.value - lhs`.
    pub slack: f64,
    pub violated: bool,
}

/// `K = ⌊M·d / (d+M-1)⌋` in exact integer arithmetic.
pub fn k_of(d: usize, m: usize) -> usize {
    (m * d) / (d + m - 1)
}

fn params(d: usize, m: usize, p1: Vec<f64>, k: Option<usize>) -> BoundParams {
    let p_max = p1.iter().copied().fold(1.0 / d as f64, f64::max);
    BoundParams { d, m, p1, p_max, k }
}

fn plain(name: BoundName, value: f64, params: BoundParams) -> BoundValue {
    BoundValue {
        name,
        value,
        weights: None,
        params,
    }
}

fn check_p1(d: usize, p1: &[f64]) -> Result<()> {
    match p1
        .iter()
        .find(|&&p| !(p * d as f64 >= 1.0 - 1e-12 && p <= 1.0 + 1e-12))
    {
        Some(p) => Err(Error::Argument(format!(
            "largest prior {p} must lie in [1/{d}, 1]"
        ))),
        None => Ok(()),
    }
}

fn check_dims(d: usize, m: usize) -> Result<()> {
    if d < 2 || m < 1 {
        return Err(Error::Argument(format!("need d >= 2 and M >= 1, got d={d}, M={m}")));
    }
    Ok(())
}

fn weights_for(d: usize, p1: &[f64]) -> Vec<f64> {
    p1.iter().map(|p| 1.0 / (d as f64 * p)).collect()
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// `I_1 + I_2 ≤ log₂ d`.
pub fn bound_two_equal(d: usize) -> BoundValue {
    plain(
        BoundName::TwoEqual,
        log2(d as f64),
        params(d, 2, vec![1.0 / d as f64; 2], None),
    )
}

/// Weighted and `p_max`-scaled bounds for two bases with largest priors
/// `p1_a`, `p1_b`.
pub fn bound_two_weighted(d: usize, p1_a: f64, p1_b: f64) -> Result<(BoundValue, BoundValue)> {
    check_dims(d, 2)?;
    let p1 = vec![p1_a, p1_b];
    check_p1(d, &p1)?;
    let pr = params(d, 2, p1.clone(), None);
    let weighted = BoundValue {
        name: BoundName::TwoWeighted,
        value: log2(d as f64),
        weights: Some(weights_for(d, &p1)),
        params: pr.clone(),
    };
    let weak = plain(BoundName::TwoWeak, d as f64 * pr.p_max * log2(d as f64), pr);
    Ok((weighted, weak))
}

/// Equal-prior bounds for `M` bases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MEqualBounds {
    pub tight: BoundValue,
    pub weak: BoundValue,
    pub half: BoundValue,
    /// The smaller of `tight` and `half`.
    pub effective: BoundValue,
}

fn tight_value(d: usize, m: usize) -> f64 {
    let k = k_of(d, m);
    let (df, mf, kf) = (d as f64, m as f64, k as f64);
    mf * log2(df / kf) - (kf + 1.0) * (mf - kf * (df + mf - 1.0) / df) * log2(1.0 + 1.0 / kf)
}

fn weak_value(d: usize, m: usize) -> f64 {
    let (df, mf) = (d as f64, m as f64);
    mf * log2((df + mf - 1.0) / mf)
}

fn half_value(d: usize, m: usize) -> f64 {
    m as f64 / 2.0 * log2(d as f64)
}

pub fn bound_m_equal(d: usize, m: usize) -> MEqualBounds {
    let pr = params(d, m, vec![1.0 / d as f64; m], Some(k_of(d, m)));
    let tight = plain(BoundName::MEqualTight, tight_value(d, m), pr.clone());
    let weak = plain(BoundName::MEqualWeak, weak_value(d, m), pr.clone());
    let half = plain(BoundName::MEqualHalf, half_value(d, m), pr);
    let effective = if half.value < tight.value {
        half.clone()
    } else {
        tight.clone()
    };
    MEqualBounds {
        tight,
        weak,
        half,
        effective,
    }
}

/// Unequal-prior bounds for `M` bases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MWeightedBounds {
    pub weighted_tight: BoundValue,
    pub weighted_weak: BoundValue,
    pub scaled_tight: BoundValue,
    pub scaled_weak: BoundValue,
    pub weighted_half: BoundValue,
    pub scaled_half: BoundValue,
}

impl MWeightedBounds {
    pub fn all(&self) -> [&BoundValue; 6] {
        [
            &self.weighted_tight,
            &self.weighted_weak,
            &self.scaled_tight,
            &self.scaled_weak,
            &self.weighted_half,
            &self.scaled_half,
        ]
    }
}

pub fn bound_m_weighted(d: usize, m: usize, p1: &[f64]) -> Result<MWeightedBounds> {
    check_dims(d, m)?;
    if p1.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p1.len(),
        });
    }
    check_p1(d, p1)?;
    let pr = params(d, m, p1.to_vec(), Some(k_of(d, m)));
    let scale = d as f64 * pr.p_max;
    let w = weights_for(d, p1);
    let weighted = |name, value| BoundValue {
        name,
        value,
        weights: Some(w.clone()),
        params: pr.clone(),
    };
    let (t, wk, h) = (tight_value(d, m), weak_value(d, m), half_value(d, m));
    Ok(MWeightedBounds {
        weighted_tight: weighted(BoundName::MWeightedTight, t),
        weighted_weak: weighted(BoundName::MWeightedLoose, wk),
        scaled_tight: plain(BoundName::MWeightedWeak, scale * t, pr.clone()),
        scaled_weak: plain(BoundName::MWeightedLooseWeak, scale * wk, pr.clone()),
        weighted_half: weighted(BoundName::MWeightedHalf, h),
        scaled_half: plain(BoundName::MWeightedHalfWeak, scale * h, pr.clone()),
    })
}

/// Qubit, three bases: equal-prior bound 1, weighted form and `2·p_max` form.
pub fn bound_qubit_three(p1: [f64; 3]) -> Result<(BoundValue, BoundValue, BoundValue)> {
    check_p1(2, &p1)?;
    let pr = params(2, 3, p1.to_vec(), Some(k_of(2, 3)));
    let equal = plain(BoundName::QubitThree, 1.0, params(2, 3, vec![0.5; 3], Some(1)));
    let weighted = BoundValue {
        name: BoundName::QubitThreeWeighted,
        value: 1.0,
        weights: Some(weights_for(2, &p1)),
        params: pr.clone(),
    };
    let weak = plain(BoundName::QubitThreeWeak, 2.0 * pr.p_max, pr);
    Ok((equal, weighted, weak))
}

/// Lower bounds on `Σ_m H{p^(m)_{i|s}}` for any state measured in `M` MUBs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropicLowerBounds {
    /// `M·log₂K + (K+1)(M - K(d+M-1)/d)·log₂(1+1/K)`
    pub tight: f64,
    /// `M·log₂(M·d/(d+M-1))`
    pub weak: f64,
    /// `(M/2)·log₂ d`
    pub half: f64,
}

impl EntropicLowerBounds {
    pub fn strongest(&self) -> f64 {
        self.tight.max(self.half)
    }
}

pub fn entropic_lower_bound(d: usize, m: usize) -> EntropicLowerBounds {
    let k = k_of(d, m);
    let (df, mf, kf) = (d as f64, m as f64, k as f64);
    EntropicLowerBounds {
        tight: mf * log2(kf) + (kf + 1.0) * (mf - kf * (df + mf - 1.0) / df) * log2(1.0 + 1.0 / kf),
        weak: mf * log2(mf * df / (df + mf - 1.0)),
        half: half_value(d, m),
    }
}

/// Average information per basis, `d/(d+1)`, for a complete set of `d+1` bases.
pub fn average_info_bound(d: usize) -> f64 {
    d as f64 / (d as f64 + 1.0)
}

/// The bound the unequal-prior conjectures predict: `log₂ d` for two bases
/// and the equal-prior tight form otherwise. Never a proven bound for
/// unequal priors.
pub fn conjectured_bound(d: usize, m: usize) -> f64 {
    if m == 2 {
        log2(d as f64)
    } else {
        tight_value(d, m)
    }
}

/// Scalar comparison: violated iff `lhs > bound.value + tol`.
pub fn check_violation(lhs: f64, bound: &BoundValue, tol: f64) -> Verdict {
    let slack = bound.value - lhs;
    Verdict {
        lhs,
        bound: bound.clone(),
        slack,
        violated: slack < -tol,
    }
}

/// Forms the bound's own left-hand side from per-basis information, then checks it.
pub fn check_breakdown(per_basis_info: &[f64], bound: &BoundValue, tol: f64) -> Verdict {
    check_violation(bound.lhs(per_basis_info), bound, tol)
}

/// Every bound that applies to `(d, M)` with the given largest priors.
pub fn applicable_bounds(d: usize, p1: &[f64]) -> Result<Vec<BoundValue>> {
    let m = p1.len();
    check_dims(d, m)?;
    let mut out = Vec::new();
    if m == 2 {
        out.push(bound_two_equal(d));
        let (w, s) = bound_two_weighted(d, p1[0], p1[1])?;
        out.push(w);
        out.push(s);
    }
    let eq = bound_m_equal(d, m);
    out.extend([eq.tight, eq.weak, eq.half]);
    out.extend(bound_m_weighted(d, m, p1)?.all().into_iter().cloned());
    if d == 2 && m == 3 {
        let (a, b, c) = bound_qubit_three([p1[0], p1[1], p1[2]])?;
        out.extend([a, b, c]);
    }
    Ok(out)
}
