use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{minimize, NmOptions};
use crate::error::{ensure_dim, Error, Result};
use crate::info::{total_information, InfoBreakdown, PriorProfile};
use crate::mub::MubFamily;
use crate::quantum::{orthonormalize_columns, validate_povm, ComplexMatrix, Povm, C64, POVM_TOL};
use crate::sampling::{gaussian_matrix, RngSeed};

pub const DEFAULT_RESTARTS: usize = 32;

const POLISH_ROUNDS: usize = 8;
const POLISH_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Max,
    Min,
}

impl Objective {
    fn sign(self) -> f64 {
        match self {
            Objective::Max => -1.0,
            Objective::Min => 1.0,
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Objective::Max => a > b,
            Objective::Min => a < b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub outcomes: usize,
    pub objective: Objective,
    pub rank_one: bool,
    pub restarts: usize,
    /// Objective evaluations allowed per restart, summed over polishing rounds.
    pub max_evals: usize,
    pub seed: u64,
}

impl OptimizeConfig {
    pub fn new(outcomes: usize, objective: Objective, seed: u64) -> Self {
        Self {
            outcomes,
            objective,
            rank_one: true,
            restarts: DEFAULT_RESTARTS,
            max_evals: 40_000,
            seed,
        }
    }
}

/// Best value found so far, recorded whenever it improves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iteration: usize,
    pub evaluations: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeResult {
    pub value: f64,
    pub povm: Povm,
    pub breakdown: InfoBreakdown,
    pub trace: Vec<TracePoint>,
    pub best_restart: usize,
    pub evaluations: usize,
    /// False when the winning restart hit its evaluation cap.
    pub converged: bool,
}

struct Encoding {
    rows: usize,
    d: usize,
    rank_one: bool,
    outcomes: usize,
}

impl Encoding {
    fn len(&self) -> usize {
        2 * self.rows * self.d
    }

    fn matrix(&self, x: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.d, |i, j| {
            let k = 2 * (i * self.d + j);
            C64::new(x[k], x[k + 1])
        })
    }

    fn vector(&self, m: &ComplexMatrix) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.len());
        for i in 0..self.rows {
            for j in 0..self.d {
                x.push(m[(i, j)].re);
                x.push(m[(i, j)].im);
            }
        }
        x
    }

    fn povm(&self, x: &[f64]) -> Result<Povm> {
        let q = orthonormalize_columns(&self.matrix(x))?;
        if self.rank_one {
            Povm::from_isometry_rows(&q)
        } else {
            Povm::from_isometry_blocks(&q, self.outcomes)
        }
    }

    fn retract(&self, x: &[f64]) -> Option<Vec<f64>> {
        orthonormalize_columns(&self.matrix(x)).ok().map(|q| self.vector(&q))
    }
}

struct RestartResult {
    x: Vec<f64>,
    value: f64,
    evaluations: usize,
    converged: bool,
    improvements: Vec<(usize, usize, f64)>,
}

fn run_restart(
    enc: &Encoding,
    profile: &PriorProfile,
    family: &MubFamily,
    config: &OptimizeConfig,
    restart: usize,
) -> RestartResult {
    let sign = config.objective.sign();
    let objective = |x: &[f64]| -> f64 {
        match enc.povm(x).and_then(|p| total_information(profile, family, &p)) {
            Ok(info) => sign * info.total,
            Err(_) => f64::INFINITY,
        }
    };

    let mut rng = RngSeed::new(config.seed, restart as u64).rng();
    let start = gaussian_matrix(enc.rows, enc.d, &mut rng);
    let mut x = enc.retract(&enc.vector(&start)).unwrap_or_else(|| enc.vector(&start));
    let mut fx = objective(&x);
    let mut evaluations = 1;
    let mut converged = false;
    let mut improvements = vec![(0, evaluations, fx)];
    let mut iteration_base = 0;
    let mut step = 0.3;

    for _ in 0..POLISH_ROUNDS {
        let budget = config.max_evals.saturating_sub(evaluations);
        if budget == 0 {
            converged = false;
            break;
        }
        let out = minimize(
            objective,
            &x,
            &NmOptions {
                max_evals: budget,
                initial_step: step,
                f_tol: 1e-15,
                x_tol: 1e-10,
            },
        );
        for &(it, v) in &out.improvements {
            if v < improvements.last().map_or(f64::INFINITY, |p| p.2) {
                improvements.push((iteration_base + it, evaluations + out.evals, v));
            }
        }
        iteration_base += out.improvements.last().map_or(0, |p| p.0);
        evaluations += out.evals;
        converged = out.converged;

        let Some(retracted) = enc.retract(&out.x) else {
            if out.fx < fx {
                x = out.x;
                fx = out.fx;
            }
            break;
        };
        let f_new = objective(&retracted);
        evaluations += 1;
        let gain = fx - f_new;
        if f_new <= fx {
            x = retracted;
            fx = f_new;
        }
        if gain < POLISH_GAIN {
            break;
        }
        step = (step * 0.3).max(1e-3);
    }

    RestartResult {
        x,
        value: fx,
        evaluations,
        converged,
        improvements,
    }
}

/// Multi-start search for the extremal `I_tot` over POVMs with
/// `config.outcomes` elements. Rank-one POVMs are parametrised by a `D×d`
/// complex matrix, general POVMs by a `(D·d)×d` one; both are pulled back to
/// an isometry by column orthonormalisation.
pub fn optimize_extremal(
    family: &MubFamily,
    profile: &PriorProfile,
    config: &OptimizeConfig,
) -> Result<OptimizeResult> {
    let d = family.dim();
    ensure_dim(d, profile.dim())?;
    ensure_dim(family.len(), profile.len())?;
    if config.restarts == 0 {
        return Err(Error::Argument("need at least one restart".into()));
    }
    if config.rank_one && config.outcomes < d {
        return Err(Error::Argument(format!(
            "rank-one POVMs need at least d={d} outcomes, got {}",
            config.outcomes
        )));
    }
    if config.outcomes == 0 {
        return Err(Error::Argument("need at least one outcome".into()));
    }
    let enc = Encoding {
        rows: if config.rank_one { config.outcomes } else { config.outcomes * d },
        d,
        rank_one: config.rank_one,
        outcomes: config.outcomes,
    };

    let runs: Vec<RestartResult> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&enc, profile, family, config, r))
        .collect();

    let sign = config.objective.sign();
    let mut trace = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    let mut evaluations = 0;
    for (r, run) in runs.iter().enumerate() {
        for &(iteration, evals, v) in &run.improvements {
            let value = sign * v;
            if best.is_none_or(|(_, b)| config.objective.better(value, b)) {
                best = Some((r, value));
                trace.push(TracePoint {
                    restart: r,
                    iteration,
                    evaluations: evaluations + evals,
                    value,
                });
            }
        }
        evaluations += run.evaluations;
    }
    let best_restart = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let winner = &runs[best_restart];
    let povm = enc.povm(&winner.x)?;
    let report = validate_povm(&povm, POVM_TOL);
    if !report.passed {
        return Err(Error::Validation(format!(
            "optimised POVM failed validation (completeness deviation {:e})",
            report.max_completeness_deviation
        )));
    }
    let breakdown = total_information(profile, family, &povm)?;
    if !winner.converged {
        log::warn!(
            "optimizer hit its evaluation cap on the best restart ({} evaluations); returning best so far",
            winner.evaluations
        );
    }
    Ok(OptimizeResult {
        value: breakdown.total,
        povm,
        breakdown,
        trace,
        best_restart,
        evaluations,
        converged: winner.converged,
    })
}
