use rayon::prelude::*;
use serde::Serialize;

use super::optimize::{optimize_extremal, Objective, OptimizeConfig};
use super::scan::{scan, trial_inputs, ScanConfig, ScanSummary, TrialInputs, TrialRecord};
use crate::bounds::{bound_m_equal, bound_m_weighted, conjectured_bound};
use crate::error::{Error, Result};
use crate::info::PriorProfile;
use crate::mub::MubFamily;
use crate::quantum::Povm;
use crate::sampling::{random_profile, PriorMode, RngSeed};

/// Excess over the equal-prior bound that marks a counterexample candidate.
pub const CANDIDATE_TOL: f64 = 1e-6;

/// Optimizer restarts use streams from here upwards, away from scan streams.
const OPTIMIZER_STREAM_BASE: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq)]
pub struct HuntConfig {
    /// Trials for the random scan; its prior mode is forced to random.
    pub scan: ScanConfig,
    pub restarts: usize,
    pub max_evals: usize,
    pub tol: f64,
}

impl HuntConfig {
    pub fn new(d: usize, m: usize, trials: u64, seed: u64) -> Self {
        Self {
            scan: ScanConfig::new(d, m, trials, seed),
            restarts: super::optimize::DEFAULT_RESTARTS,
            max_evals: 20_000,
            tol: CANDIDATE_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CandidateSource {
    Scan { stream: u64 },
    Optimizer { restart: usize, stream: u64 },
}

/// A trial whose `I_tot` exceeded the equal-prior bound, with enough data to
/// reproduce it.
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub source: CandidateSource,
    pub seed: u64,
    pub d: usize,
    pub m: usize,
    pub priors: Vec<Vec<f64>>,
    pub povm: Povm,
    pub per_basis_info: Vec<f64>,
    pub total: f64,
    pub bound: f64,
    pub excess: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HuntReport {
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    /// The equal-prior value the sums are compared against.
    pub bound: f64,
    pub scan_summary: ScanSummary,
    pub scan_max_total: f64,
    pub optimizer_max_total: f64,
    pub max_total: f64,
    /// Largest `Σ I_m / (d·p1_m)` seen; proven to stay below the tight value.
    pub max_weighted_sum: f64,
    pub proven_violations: u64,
    pub candidates: Vec<Candidate>,
}

impl HuntReport {
    pub fn has_candidates(&self) -> bool {
        !self.candidates.is_empty()
    }
}

/// Indices (and excesses) of records whose `I_tot` exceeds `bound + tol`.
pub fn detect_candidates(records: &[TrialRecord], bound: f64, tol: f64) -> Vec<(usize, f64)> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.total > bound + tol)
        .map(|(i, r)| (i, r.total - bound))
        .collect()
}

/// Rebuilds the reproduction bundle for a scan record.
pub fn candidate_from_record(config: &ScanConfig, record: &TrialRecord, bound: f64) -> Result<Candidate> {
    let TrialInputs { povm, .. } = trial_inputs(config, record.stream)?;
    Ok(Candidate {
        source: CandidateSource::Scan { stream: record.stream },
        seed: record.seed,
        d: record.d,
        m: record.m,
        priors: record.priors.clone(),
        povm,
        per_basis_info: record.per_basis_info.clone(),
        total: record.total,
        bound,
        excess: record.total - bound,
    })
}

fn weighted_sum(profile: &PriorProfile, per_basis_info: &[f64]) -> f64 {
    let d = profile.dim() as f64;
    profile.p1().iter().zip(per_basis_info).map(|(p, i)| i / (d * p)).sum()
}

struct OptimizerRun {
    stream: u64,
    profile: PriorProfile,
    povm: Povm,
    per_basis_info: Vec<f64>,
    total: f64,
}

/// Random-prior scan plus optimizer restarts (each with its own random
/// priors), compared with the equal-prior bound for the same `(d, M)`.
pub fn conjecture_hunt(config: &HuntConfig, family: &MubFamily) -> Result<HuntReport> {
    if config.restarts == 0 && config.scan.trials == 0 {
        return Err(Error::Argument("hunt needs trials or restarts".into()));
    }
    let mut scan_cfg = config.scan.clone();
    scan_cfg.prior_mode = PriorMode::UniformSimplex;
    let (d, m) = (scan_cfg.d, scan_cfg.m);
    let bound = conjectured_bound(d, m);
    let tight = bound_m_equal(d, m).tight.value;

    let scanned = scan(&scan_cfg, family)?;
    let mut max_weighted_sum = f64::NEG_INFINITY;
    for r in &scanned.records {
        let profile = PriorProfile::new(r.priors.clone())?;
        max_weighted_sum = max_weighted_sum.max(weighted_sum(&profile, &r.per_basis_info));
    }
    let mut candidates = detect_candidates(&scanned.records, bound, config.tol)
        .into_iter()
        .map(|(i, _)| candidate_from_record(&scan_cfg, &scanned.records[i], bound))
        .collect::<Result<Vec<_>>>()?;

    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|r| -> Result<OptimizerRun> {
            let stream = OPTIMIZER_STREAM_BASE + r as u64;
            let mut rng = RngSeed::new(scan_cfg.seed, stream).rng();
            let profile = random_profile(d, m, &mut rng, PriorMode::UniformSimplex);
            let outcomes = if r % 2 == 0 { d } else { 2 * d };
            let opt = OptimizeConfig {
                outcomes,
                objective: Objective::Max,
                rank_one: true,
                restarts: 1,
                max_evals: config.max_evals,
                seed: scan_cfg.seed ^ stream,
            };
            let res = optimize_extremal(family, &profile, &opt)?;
            Ok(OptimizerRun {
                stream,
                profile,
                povm: res.povm,
                per_basis_info: res.breakdown.per_basis_info,
                total: res.breakdown.total,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut optimizer_max_total = f64::NEG_INFINITY;
    let mut proven_violations = scanned.summary.proven_violation_count();
    for (r, run) in runs.into_iter().enumerate() {
        optimizer_max_total = optimizer_max_total.max(run.total);
        let ws = weighted_sum(&run.profile, &run.per_basis_info);
        max_weighted_sum = max_weighted_sum.max(ws);
        let weighted = bound_m_weighted(d, m, &run.profile.p1())?;
        if weighted.all().iter().any(|b| b.lhs(&run.per_basis_info) > b.value + scan_cfg.tol) {
            proven_violations += 1;
        }
        if run.total > bound + config.tol {
            candidates.push(Candidate {
                source: CandidateSource::Optimizer {
                    restart: r,
                    stream: run.stream,
                },
                seed: scan_cfg.seed,
                d,
                m,
                priors: run.profile.per_basis().to_vec(),
                povm: run.povm,
                per_basis_info: run.per_basis_info,
                total: run.total,
                bound,
                excess: run.total - bound,
            });
        }
    }
    if max_weighted_sum > tight + scan_cfg.tol {
        log::warn!("weighted sum {max_weighted_sum} exceeds the proven value {tight}");
    }

    let scan_max_total = scanned.summary.max_total;
    Ok(HuntReport {
        d,
        m,
        seed: scan_cfg.seed,
        bound,
        scan_max_total,
        optimizer_max_total,
        max_total: scan_max_total.max(optimizer_max_total),
        max_weighted_sum,
        proven_violations,
        scan_summary: scanned.summary,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::run_trial;
    use crate::mub::standard_mubs;

    #[test]
    fn injected_record_is_flagged() {
        let fam = standard_mubs(2, 2).unwrap();
        let cfg = ScanConfig::new(2, 2, 3, 5).with_priors(PriorMode::UniformSimplex);
        let mut records: Vec<_> = (0..3).map(|s| run_trial(&cfg, &fam, s).unwrap()).collect();
        assert!(detect_candidates(&records, 1.0, CANDIDATE_TOL).is_empty());
        records[1].total = 1.5;
        let found = detect_candidates(&records, 1.0, CANDIDATE_TOL);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].0, 1);
        assert!((found[0].1 - 0.5).abs() < 1e-15);
        let bundle = candidate_from_record(&cfg, &records[1], 1.0).unwrap();
        assert_eq!(bundle.povm.outcomes(), records[1].outcomes);
        let json = serde_json::to_string(&bundle).unwrap();
        assert!(json.contains("\"kind\":\"scan\""));
    }

    #[test]
    fn small_qubit_hunt_finds_nothing() {
        let fam = standard_mubs(2, 2).unwrap();
        let cfg = HuntConfig {
            restarts: 4,
            ..HuntConfig::new(2, 2, 2_000, 17)
        };
        let report = conjecture_hunt(&cfg, &fam).unwrap();
        assert!(!report.has_candidates());
        assert_eq!(report.proven_violations, 0);
        assert!(report.max_total <= 1.0 + 1e-9);
        assert!(report.max_weighted_sum <= 1.0 + 1e-9);
    }

    #[test]
    fn two_outcome_qubit_three_bases() {
        let fam = standard_mubs(2, 3).unwrap();
        let mut cfg = HuntConfig {
            restarts: 2,
            ..HuntConfig::new(2, 3, 2_000, 23)
        };
        cfg.scan = cfg.scan.with_outcomes(2, 2);
        let report = conjecture_hunt(&cfg, &fam).unwrap();
        assert!(!report.has_candidates());
        assert_eq!(report.proven_violations, 0);
    }
}
