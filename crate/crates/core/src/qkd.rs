//! Eavesdropper information caps.
//!
//! Bob and any eavesdroppers are treated as one joint receiver performing a
//! single POVM. Each party then sees only part of the classical outcome, and
//! discarding outcomes cannot increase mutual information, so the
//! equal-prior complementarity bounds cap the sum of what different parties
//! learn about different bases.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::bound_m_equal;
use crate::error::{Error, Result};
use crate::info::{channel_information, conditional_probs};
use crate::mub::MubFamily;
use crate::quantum::Povm;

const CAP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Bb84,
    SixState,
    QuditTwoBasis,
}

/// Measured `I(A:B)` per basis label, as reported by Alice and Bob.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    pub protocol: Protocol,
    pub d: usize,
    pub observed: BTreeMap<String, f64>,
}

impl ChannelEstimate {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Argument(format!("dimension must be at least 2, got {}", self.d)));
        }
        if matches!(self.protocol, Protocol::Bb84 | Protocol::SixState) && self.d != 2 {
            return Err(Error::Argument(format!("{:?} is a qubit protocol, got d={}", self.protocol, self.d)));
        }
        let max = (self.d as f64).log2();
        for (basis, &i) in &self.observed {
            if !(i >= 0.0 && i <= max + CAP_TOL) {
                return Err(Error::Argument(format!(
                    "observed information {i} for basis '{basis}' outside [0, log2 {}]",
                    self.d
                )));
            }
        }
        Ok(())
    }

    fn get(&self, basis: &str) -> Option<f64> {
        self.observed.get(basis).copied()
    }
}

fn clamp_cap(x: f64, max: f64) -> f64 {
    x.clamp(0.0, max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bb84Caps {
    /// Cap on `I_x(A:E)` from the observed `I_z(A:B)`.
    pub eve_x_cap: Option<f64>,
    /// Cap on `I_z(A:E)` from the observed `I_x(A:B)`.
    pub eve_z_cap: Option<f64>,
}

pub fn bb84_caps(est: &ChannelEstimate) -> Result<Bb84Caps> {
    est.validate()?;
    if est.d != 2 {
        return Err(Error::Argument("BB84 caps need d = 2".into()));
    }
    Ok(Bb84Caps {
        eve_x_cap: est.get("z").map(|i| clamp_cap(1.0 - i, 1.0)),
        eve_z_cap: est.get("x").map(|i| clamp_cap(1.0 - i, 1.0)),
    })
}

/// Cap on the combined information two eavesdroppers hold about the two
/// bases Bob did not test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointCap {
    pub observed_basis: String,
    pub other_bases: [String; 2],
    pub cap: f64,
}

pub fn six_state_caps(est: &ChannelEstimate) -> Result<Vec<JointCap>> {
    est.validate()?;
    const AXES: [&str; 3] = ["x", "y", "z"];
    let caps: Vec<JointCap> = AXES
        .iter()
        .enumerate()
        .filter_map(|(k, &axis)| {
            est.get(axis).map(|i| JointCap {
                observed_basis: axis.to_string(),
                other_bases: [AXES[(k + 1) % 3].to_string(), AXES[(k + 2) % 3].to_string()],
                cap: clamp_cap(1.0 - i, 1.0),
            })
        })
        .collect();
    Ok(caps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuditCap {
    pub observed_basis: String,
    pub cap: f64,
}

/// `log₂ d - I(A:B)` for every observed basis of a two-basis qudit protocol
/// with equal priors.
pub fn qudit_caps(est: &ChannelEstimate) -> Result<Vec<QuditCap>> {
    est.validate()?;
    let max = (est.d as f64).log2();
    Ok(est
        .observed
        .iter()
        .map(|(basis, &i)| QuditCap {
            observed_basis: basis.clone(),
            cap: clamp_cap(max - i, max),
        })
        .collect())
}

/// Everything the `qkd` command reports for one estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum CapReport {
    Bb84 { d: usize, caps: Bb84Caps },
    SixState { d: usize, caps: Vec<JointCap> },
    QuditTwoBasis { d: usize, caps: Vec<QuditCap> },
}

pub fn cap_report(est: &ChannelEstimate) -> Result<CapReport> {
    Ok(match est.protocol {
        Protocol::Bb84 => CapReport::Bb84 {
            d: est.d,
            caps: bb84_caps(est)?,
        },
        Protocol::SixState => CapReport::SixState {
            d: est.d,
            caps: six_state_caps(est)?,
        },
        Protocol::QuditTwoBasis => CapReport::QuditTwoBasis {
            d: est.d,
            caps: qudit_caps(est)?,
        },
    })
}

/// Receiving parties; Bob is party 0.
pub const PARTY_NAMES: [&str; 3] = ["B", "E", "F"];

/// Which parties see each outcome of the joint measurement, as a bitmask
/// over [`PARTY_NAMES`]. A party that does not see an outcome only learns
/// that one of its invisible outcomes occurred.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeSplit {
    pub parties: usize,
    pub visibility: Vec<u8>,
}

impl OutcomeSplit {
    pub fn new(parties: usize, visibility: Vec<u8>) -> Result<Self> {
        if !(1..=PARTY_NAMES.len()).contains(&parties) {
            return Err(Error::Argument(format!("between 1 and 3 parties supported, got {parties}")));
        }
        let allowed = (1u8 << parties) - 1;
        if let Some(v) = visibility.iter().find(|&&v| v & !allowed != 0) {
            return Err(Error::Argument(format!("visibility mask {v:#b} names an unknown party")));
        }
        Ok(Self { parties, visibility })
    }

    /// Every outcome visible to one party only.
    pub fn all_to(parties: usize, party: usize, outcomes: usize) -> Result<Self> {
        Self::new(parties, vec![1u8 << party; outcomes])
    }

    pub fn sees(&self, party: usize, outcome: usize) -> bool {
        self.visibility[outcome] & (1u8 << party) != 0
    }
}

/// A party's channel: visible outcomes stay separate, the rest merge into one.
fn party_channel(cond: &[Vec<f64>], split: &OutcomeSplit, party: usize) -> Vec<Vec<f64>> {
    let d = cond.first().map_or(0, Vec::len);
    let mut rows = Vec::new();
    let mut hidden = vec![0.0; d];
    for (s, row) in cond.iter().enumerate() {
        if split.sees(party, s) {
            rows.push(row.clone());
        } else {
            hidden.iter_mut().zip(row).for_each(|(h, c)| *h += c);
        }
    }
    rows.push(hidden);
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterceptCheck {
    /// `assignment[k]` is the basis whose information party `k` is charged with.
    pub assignment: Vec<usize>,
    pub sum: f64,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterceptRecord {
    /// `info[k][m]`: information party `k` holds about basis `m`, equal priors.
    pub info: Vec<Vec<f64>>,
    pub checks: Vec<InterceptCheck>,
}

impl InterceptRecord {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| !c.violated)
    }

    pub fn max_excess(&self) -> f64 {
        self.checks.iter().map(|c| c.sum - c.bound).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn assignments(parties: usize, bases: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(parties);
    fn rec(parties: usize, bases: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == parties {
            out.push(current.clone());
            return;
        }
        for m in 0..bases {
            if !current.contains(&m) {
                current.push(m);
                rec(parties, bases, current, out);
                current.pop();
            }
        }
    }
    rec(parties, bases, &mut current, &mut out);
    out
}

/// Splits one joint measurement among the parties and checks, for every way
/// of charging the parties with distinct bases, that their summed
/// information stays below the equal-prior bound for that many bases.
pub fn simulate_intercept(family: &MubFamily, povm: &Povm, split: &OutcomeSplit) -> Result<InterceptRecord> {
    if split.visibility.len() != povm.outcomes() {
        return Err(Error::Argument(format!(
            "split covers {} outcomes, POVM has {}",
            split.visibility.len(),
            povm.outcomes()
        )));
    }
    if split.parties > family.len() {
        return Err(Error::Argument(format!(
            "{} parties need at least as many bases, family has {}",
            split.parties,
            family.len()
        )));
    }
    let d = family.dim();
    let priors = vec![1.0 / d as f64; d];
    let conds = family
        .bases()
        .iter()
        .map(|b| conditional_probs(b, povm))
        .collect::<Result<Vec<_>>>()?;
    let info: Vec<Vec<f64>> = (0..split.parties)
        .map(|k| {
            conds
                .iter()
                .map(|cond| channel_information(&priors, &party_channel(cond, split, k)))
                .collect()
        })
        .collect();
    let bound = bound_m_equal(d, split.parties).effective.value;
    let checks = assignments(split.parties, family.len())
        .into_iter()
        .map(|assignment| {
            let sum: f64 = assignment.iter().enumerate().map(|(k, &m)| info[k][m]).sum();
            InterceptCheck {
                violated: sum > bound + CAP_TOL,
                assignment,
                sum,
                bound,
            }
        })
        .collect();
    Ok(InterceptRecord { info, checks })
}
