use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{applicable_bounds, BoundName};
use crate::error::{ensure_dim, Error, Result};
use crate::info::{total_information, PriorProfile};
use crate::mub::MubFamily;
use crate::quantum::Povm;
use crate::sampling::{random_profile, random_rank_one_povm, PriorMode, RngSeed};

/// Default tolerance for bound checks, in bits.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub d: usize,
    pub m: usize,
    pub trials: u64,
    pub outcomes_min: usize,
    pub outcomes_max: usize,
    pub prior_mode: PriorMode,
    pub seed: u64,
    pub tol: f64,
}

impl ScanConfig {
    /// Equal priors, rank-one POVMs with `d..=16` outcomes (at least `d`).
    pub fn new(d: usize, m: usize, trials: u64, seed: u64) -> Self {
        Self {
            d,
            m,
            trials,
            outcomes_min: d.max(2),
            outcomes_max: d.max(16),
            prior_mode: PriorMode::Equal,
            seed,
            tol: BOUND_TOL,
        }
    }

    pub fn with_priors(mut self, mode: PriorMode) -> Self {
        self.prior_mode = mode;
        self
    }

    pub fn with_outcomes(mut self, min: usize, max: usize) -> Self {
        self.outcomes_min = min;
        self.outcomes_max = max;
        self
    }

    pub fn validate(&self, family: &MubFamily) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Argument("trials must be at least 1".into()));
        }
        if self.outcomes_min < self.d || self.outcomes_max < self.outcomes_min {
            return Err(Error::Argument(format!(
                "outcome range {}..={} must satisfy d={} <= min <= max",
                self.outcomes_min, self.outcomes_max, self.d
            )));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Argument(format!("tolerance must be nonnegative, got {}", self.tol)));
        }
        ensure_dim(self.d, family.dim())?;
        ensure_dim(self.m, family.len())?;
        Ok(())
    }
}

/// One bound evaluated on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: BoundName,
    pub value: f64,
    pub lhs: f64,
    /// False when the bound is only conjectured for this trial's priors.
    pub proven: bool,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub stream: u64,
    pub d: usize,
    pub m: usize,
    pub outcomes: usize,
    pub priors: Vec<Vec<f64>>,
    pub p_max: f64,
    pub per_basis_info: Vec<f64>,
    pub total: f64,
    pub bounds: Vec<BoundCheck>,
    /// Excluded from serialised output so that reruns are byte-identical.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn bound(&self, name: BoundName) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

/// Everything drawn for one trial.
#[derive(Clone, Debug)]
pub struct TrialInputs {
    pub outcomes: usize,
    pub profile: PriorProfile,
    pub povm: Povm,
}

/// Regenerates the random inputs of trial `stream`.
pub fn trial_inputs(config: &ScanConfig, stream: u64) -> Result<TrialInputs> {
    let mut rng = RngSeed::new(config.seed, stream).rng();
    let outcomes = rng.random_range(config.outcomes_min..=config.outcomes_max);
    let profile = random_profile(config.d, config.m, &mut rng, config.prior_mode);
    let povm = random_rank_one_povm(config.d, outcomes, &mut rng)?;
    Ok(TrialInputs {
        outcomes,
        profile,
        povm,
    })
}

/// Whether the equal-prior form of a bound is proven for this trial: equal
/// priors, or a two-outcome qubit measurement with at most three bases.
fn equal_form_proven(profile: &PriorProfile, outcomes: usize) -> bool {
    profile.is_uniform(1e-12) || (profile.dim() == 2 && outcomes == 2 && profile.len() <= 3)
}

pub(crate) fn evaluate(
    config: &ScanConfig,
    family: &MubFamily,
    stream: u64,
    inputs: &TrialInputs,
) -> Result<TrialRecord> {
    let info = total_information(&inputs.profile, family, &inputs.povm)?;
    let equal_proven = equal_form_proven(&inputs.profile, inputs.outcomes);
    let bounds = applicable_bounds(config.d, &inputs.profile.p1())?
        .into_iter()
        .map(|b| {
            let lhs = b.lhs(&info.per_basis_info);
            BoundCheck {
                name: b.name,
                value: b.value,
                lhs,
                proven: !b.name.requires_equal_priors() || equal_proven,
                violated: lhs > b.value + config.tol,
            }
        })
        .collect();
    Ok(TrialRecord {
        seed: config.seed,
        stream,
        d: config.d,
        m: config.m,
        outcomes: inputs.outcomes,
        priors: inputs.profile.per_basis().to_vec(),
        p_max: inputs.profile.p_max(),
        per_basis_info: info.per_basis_info,
        total: info.total,
        bounds,
        wall_time_s: 0.0,
    })
}

pub fn run_trial(config: &ScanConfig, family: &MubFamily, stream: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let inputs = trial_inputs(config, stream)?;
    let mut record = evaluate(config, family, stream, &inputs)?;
    record.wall_time_s = start.elapsed().as_secs_f64();
    Ok(record)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ScanSummary {
    pub trials: u64,
    /// Records where the bound's left-hand side exceeded it.
    pub violations: BTreeMap<BoundName, u64>,
    /// Subset of `violations` where the bound is proven: any entry is a bug.
    pub proven_violations: BTreeMap<BoundName, u64>,
    /// Subset of `violations` where the bound is only conjectured.
    pub conjecture_exceedances: BTreeMap<BoundName, u64>,
    pub max_total: f64,
    pub max_total_stream: u64,
    pub min_total: f64,
    pub min_total_stream: u64,
    pub max_p_max: f64,
}

impl ScanSummary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut s = ScanSummary {
            trials: records.len() as u64,
            max_total: f64::NEG_INFINITY,
            min_total: f64::INFINITY,
            ..Default::default()
        };
        for r in records {
            for b in &r.bounds {
                s.violations.entry(b.name).or_insert(0);
                if b.violated {
                    *s.violations.get_mut(&b.name).expect("inserted") += 1;
                    let bucket = if b.proven {
                        &mut s.proven_violations
                    } else {
                        &mut s.conjecture_exceedances
                    };
                    *bucket.entry(b.name).or_insert(0) += 1;
                }
            }
            if r.total > s.max_total {
                s.max_total = r.total;
                s.max_total_stream = r.stream;
            }
            if r.total < s.min_total {
                s.min_total = r.total;
                s.min_total_stream = r.stream;
            }
            s.max_p_max = s.max_p_max.max(r.p_max);
        }
        s
    }

    pub fn proven_violation_count(&self) -> u64 {
        self.proven_violations.values().sum()
    }
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: ScanSummary,
}

/// Runs `config.trials` independent trials (in parallel) and returns them in
/// stream order with a summary.
pub fn scan(config: &ScanConfig, family: &MubFamily) -> Result<ScanOutcome> {
    config.validate(family)?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|stream| run_trial(config, family, stream))
        .collect::<Result<Vec<_>>>()?;
    let summary = ScanSummary::from_records(&records);
    Ok(ScanOutcome { records, summary })
}
