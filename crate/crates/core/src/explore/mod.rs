//! Monte Carlo exploration of the information sums.
//!
//! - [`scan`] draws random priors and rank-one POVMs and checks every
//!   applicable bound per trial.
//! - [`envelope`] bins trials by `p_max` and keeps the extremes of `I_tot`.
//! - [`optimize_extremal`] searches POVMs for the largest or smallest `I_tot`.
//! - [`conjecture_hunt`] combines both to look for unequal-prior
//!   counterexamples to the equal-prior bounds.

mod envelope;
mod hunt;
mod nelder_mead;
mod optimize;
mod output;
mod scan;

pub use envelope::{envelope, write_envelope_csv, EnvelopeBin};
pub use hunt::{
    candidate_from_record, conjecture_hunt, detect_candidates, Candidate, CandidateSource, HuntConfig, HuntReport,
    CANDIDATE_TOL,
};
pub use optimize::{
    optimize_extremal, Objective, OptimizeConfig, OptimizeResult, TracePoint, DEFAULT_RESTARTS,
};
pub use output::{read_csv_points, write_csv, write_jsonl, OutputFormat, ScanPoint};
pub use scan::{
    run_trial, scan, trial_inputs, BoundCheck, ScanConfig, ScanOutcome, ScanSummary, TrialInputs, TrialRecord,
    BOUND_TOL,
};
