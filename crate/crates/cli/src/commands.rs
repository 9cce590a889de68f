use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use serde::Serialize;

use mubinfo::bounds::{
    applicable_bounds, average_info_bound, conjectured_bound, entropic_lower_bound, k_of, BoundValue,
    EntropicLowerBounds,
};
use mubinfo::explore::{
    candidate_from_record, conjecture_hunt, envelope, optimize_extremal, read_csv_points, scan, write_csv,
    write_envelope_csv, write_jsonl, Candidate, HuntConfig, Objective, OptimizeConfig, ScanConfig, TracePoint,
    CANDIDATE_TOL,
};
use mubinfo::format::{rounded_json, sig};
use mubinfo::mub::{check_unbiased, family_to_json, import_family, standard_mubs};
use mubinfo::qkd::{cap_report, ChannelEstimate, Protocol};
use mubinfo::qubit::bloch_components;
use mubinfo::sampling::{random_profile, PriorMode, RngSeed};
use mubinfo::{Error, MubFamily, Povm, PriorProfile};

use crate::args::*;
use crate::manifest;
use crate::Status;

pub fn run(command: Command) -> anyhow::Result<Status> {
    match &command {
        Command::Mubs(a) => mubs(&command, a),
        Command::Bounds(a) => bounds(a),
        Command::Scan(a) => scan_cmd(&command, a),
        Command::Envelope(a) => envelope_cmd(&command, a),
        Command::Optimize(a) => optimize(&command, a),
        Command::Qkd(a) => qkd(&command, a),
        Command::Hunt(a) => hunt(&command, a),
        Command::Replay(a) => {
            let recorded = manifest::read(&a.manifest)?;
            if matches!(recorded.args, Command::Replay(_)) {
                bail!("a manifest cannot replay another replay");
            }
            run(recorded.args)
        }
    }
}

fn sink(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Reports go to stdout when the data went to a file, to stderr otherwise.
fn report(out: Option<&Path>, text: &str) {
    if out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn with_hint(e: Error) -> anyhow::Error {
    match e {
        Error::UnsupportedDimension(d) => anyhow::anyhow!(
            "dimension {d} is not prime, so no standard family is built; pass a precomputed family with --family <FILE> (see `mubinfo mubs` for the JSON layout)"
        ),
        other => other.into(),
    }
}

fn load_family(args: &FamilyArgs) -> anyhow::Result<MubFamily> {
    match &args.family {
        Some(path) => {
            let fam = import_family(path).with_context(|| format!("loading family {}", path.display()))?;
            if let Some(d) = args.dim {
                ensure!(d == fam.dim(), "--dim {d} disagrees with the family file (d = {})", fam.dim());
            }
            match args.mubs {
                Some(m) if m < fam.len() => Ok(fam.truncated(m)?),
                Some(m) if m > fam.len() => bail!("family file has {} bases, {m} requested", fam.len()),
                _ => Ok(fam),
            }
        }
        None => {
            let d = args.dim.context("--dim or --family is required")?;
            standard_mubs(d, args.mubs.unwrap_or(2)).map_err(with_hint)
        }
    }
}

fn mubs(command: &Command, a: &MubsArgs) -> anyhow::Result<Status> {
    let fam = standard_mubs(a.dim, a.count.unwrap_or(a.dim + 1)).map_err(with_hint)?;
    let check = check_unbiased(&fam, 1e-10);
    ensure!(check.passed, "constructed family failed the unbiasedness check: {check:?}");
    let mut w = sink(a.out.as_deref())?;
    w.write_all(family_to_json(&fam)?.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    let labels: Vec<&str> = fam.bases().iter().map(|b| b.label()).collect();
    report(
        a.out.as_deref(),
        &format!(
            "d = {}, bases [{}]: max orthonormality deviation {}, max overlap deviation {}",
            fam.dim(),
            labels.join(", "),
            sig(check.max_orthonormality_deviation),
            sig(check.max_overlap_deviation)
        ),
    );
    if let Some(out) = &a.out {
        manifest::write(command, None, out, vec![out.clone()])?;
    }
    Ok(Status::Clean)
}

#[derive(Serialize)]
struct BoundRow<'a> {
    #[serde(flatten)]
    bound: &'a BoundValue,
    proven: bool,
}

#[derive(Serialize)]
struct BoundsTable<'a> {
    d: usize,
    m: usize,
    k: usize,
    p1: &'a [f64],
    bounds: Vec<BoundRow<'a>>,
    entropic_lower: EntropicLowerBounds,
    conjectured: f64,
    average_info: f64,
}

fn bounds(a: &BoundsArgs) -> anyhow::Result<Status> {
    ensure!(a.dim >= 2, "--dim must be at least 2");
    ensure!(a.mubs >= 2, "--mubs must be at least 2");
    let p1 = a.p1.clone().unwrap_or_else(|| vec![1.0 / a.dim as f64; a.mubs]);
    ensure!(p1.len() == a.mubs, "--p1 needs {} values, got {}", a.mubs, p1.len());
    let equal = p1.iter().all(|&p| (p * a.dim as f64 - 1.0).abs() < 1e-12);
    let values = applicable_bounds(a.dim, &p1)?;
    let table = BoundsTable {
        d: a.dim,
        m: a.mubs,
        k: k_of(a.dim, a.mubs),
        p1: &p1,
        bounds: values
            .iter()
            .map(|b| BoundRow {
                bound: b,
                proven: equal || !b.name.requires_equal_priors(),
            })
            .collect(),
        entropic_lower: entropic_lower_bound(a.dim, a.mubs),
        conjectured: conjectured_bound(a.dim, a.mubs),
        average_info: average_info_bound(a.dim),
    };
    let stdout = io::stdout();
    let mut w = stdout.lock();
    if a.json {
        serde_json::to_writer_pretty(&mut w, &rounded_json(&table)?)?;
        writeln!(w)?;
        return Ok(Status::Clean);
    }
    let p1_text: Vec<String> = p1.iter().map(|&p| sig(p)).collect();
    writeln!(w, "d = {}, M = {}, K = {}, p1 = [{}]", table.d, table.m, table.k, p1_text.join(", "))?;
    writeln!(w, "{:<22} {:<18} status", "bound", "value")?;
    for row in &table.bounds {
        let status = if row.proven { "proven" } else { "conjectured" };
        writeln!(w, "{:<22} {:<18} {status}", row.bound.name.to_string(), sig(row.bound.value))?;
    }
    let e = &table.entropic_lower;
    writeln!(w, "{:<22} {:<18} entropy-sum lower bound", "EntropicTight", sig(e.tight))?;
    writeln!(w, "{:<22} {:<18} entropy-sum lower bound", "EntropicWeak", sig(e.weak))?;
    writeln!(w, "{:<22} {:<18} entropy-sum lower bound", "EntropicHalf", sig(e.half))?;
    writeln!(w, "{:<22} {:<18} unequal-prior conjecture", "Conjectured", sig(table.conjectured))?;
    writeln!(w, "{:<22} {:<18} per basis, complete set", "AverageInfo", sig(table.average_info))?;
    Ok(Status::Clean)
}

fn prior_mode(p: PriorArg) -> PriorMode {
    match p {
        PriorArg::Equal => PriorMode::Equal,
        PriorArg::Random => PriorMode::UniformSimplex,
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&rounded_json(value)?)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn scan_cmd(command: &Command, a: &ScanArgs) -> anyhow::Result<Status> {
    let fam = load_family(&a.family)?;
    let d = fam.dim();
    let cfg = ScanConfig {
        d,
        m: fam.len(),
        trials: a.trials,
        outcomes_min: a.povm_min.unwrap_or(d),
        outcomes_max: a.povm_max,
        prior_mode: prior_mode(a.priors),
        seed: a.seed,
        tol: a.tol,
    };
    let out = scan(&cfg, &fam)?;
    let mut w = sink(a.out.as_deref())?;
    match a.format {
        FormatArg::Csv => write_csv(&out.records, &mut w)?,
        FormatArg::Jsonl => write_jsonl(&out.records, &mut w)?,
    }
    w.flush()?;
    drop(w);

    let mut candidates: Vec<Candidate> = Vec::new();
    for r in &out.records {
        for b in r.bounds.iter().filter(|b| !b.proven && b.lhs > b.value + CANDIDATE_TOL) {
            candidates.push(candidate_from_record(&cfg, r, b.value)?);
        }
    }
    report(a.out.as_deref(), &serde_json::to_string_pretty(&rounded_json(&out.summary)?)?);

    let mut outputs: Vec<PathBuf> = a.out.iter().cloned().collect();
    if !candidates.is_empty() {
        log::warn!("{} counterexample candidate(s) against conjectured bounds", candidates.len());
        if let Some(o) = &a.out {
            let path = with_suffix(o, ".candidates.json");
            write_json(&path, &candidates)?;
            outputs.push(path);
        } else {
            eprintln!("{}", serde_json::to_string_pretty(&rounded_json(&candidates)?)?);
        }
    }
    if let Some(o) = &a.out {
        manifest::write(command, Some(a.seed), o, outputs)?;
    }
    let proven = out.summary.proven_violation_count();
    if proven > 0 {
        log::error!("{proven} proven-bound violation(s)");
        return Ok(Status::ProvenViolation);
    }
    Ok(if candidates.is_empty() { Status::Clean } else { Status::Candidate })
}

fn envelope_cmd(command: &Command, a: &EnvelopeArgs) -> anyhow::Result<Status> {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let points = read_csv_points(file)?;
    let bins = envelope(&points, a.bins)?;
    let mut w = sink(a.out.as_deref())?;
    write_envelope_csv(&bins, &mut w)?;
    w.flush()?;
    if let Some(o) = &a.out {
        manifest::write(command, None, o, vec![o.clone()])?;
    }
    Ok(Status::Clean)
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    value: f64,
    per_basis_info: &'a [f64],
    objective: ObjectiveArg,
    outcomes: usize,
    rank_one: bool,
    priors: &'a [Vec<f64>],
    converged: bool,
    best_restart: usize,
    evaluations: usize,
    /// Bloch vector of the first element, for qubits.
    bloch: Option<[f64; 3]>,
    exceeded: Vec<String>,
    trace: &'a [TracePoint],
    povm: &'a Povm,
}

fn optimize(command: &Command, a: &OptimizeArgs) -> anyhow::Result<Status> {
    let fam = load_family(&a.family)?;
    let (d, m) = (fam.dim(), fam.len());
    let profile = match a.priors {
        PriorArg::Equal => PriorProfile::equal(d, m),
        PriorArg::Random => {
            let mut rng = RngSeed::new(a.seed, u64::MAX).rng();
            random_profile(d, m, &mut rng, PriorMode::UniformSimplex)
        }
    };
    let cfg = OptimizeConfig {
        outcomes: a.outcomes,
        objective: match a.objective {
            ObjectiveArg::Max => Objective::Max,
            ObjectiveArg::Min => Objective::Min,
        },
        rank_one: a.rank_one,
        restarts: a.restarts,
        max_evals: a.max_evals,
        seed: a.seed,
    };
    let res = optimize_extremal(&fam, &profile, &cfg)?;

    let equal = profile.is_uniform(1e-12);
    let two_outcome_qubit = d == 2 && a.outcomes == 2 && m <= 3;
    let mut status = Status::Clean;
    let mut exceeded = Vec::new();
    for b in applicable_bounds(d, &profile.p1())? {
        let lhs = b.lhs(&res.breakdown.per_basis_info);
        if lhs > b.value + CANDIDATE_TOL {
            exceeded.push(b.name.to_string());
            if equal || two_outcome_qubit || !b.name.requires_equal_priors() {
                status = Status::ProvenViolation;
            } else if status == Status::Clean {
                status = Status::Candidate;
            }
        }
    }
    let bloch = (d == 2).then(|| bloch_components(&res.povm.elements()[0]).1);
    let out = OptimizeReport {
        value: res.value,
        per_basis_info: &res.breakdown.per_basis_info,
        objective: a.objective,
        outcomes: a.outcomes,
        rank_one: a.rank_one,
        priors: profile.per_basis(),
        converged: res.converged,
        best_restart: res.best_restart,
        evaluations: res.evaluations,
        bloch,
        exceeded,
        trace: &res.trace,
        povm: &res.povm,
    };
    let mut w = sink(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &rounded_json(&out)?)?;
    writeln!(w)?;
    w.flush()?;
    if let Some(o) = &a.out {
        println!("I_tot = {}", sig(res.value));
        manifest::write(command, Some(a.seed), o, vec![o.clone()])?;
    }
    if !res.converged {
        log::warn!("the best restart stopped at its evaluation cap");
    }
    Ok(status)
}

fn qkd(command: &Command, a: &QkdArgs) -> anyhow::Result<Status> {
    let est = match &a.estimate {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ChannelEstimate>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            ensure!(!a.observed.is_empty(), "give --observed BASIS=VALUE at least once, or --estimate FILE");
            ChannelEstimate {
                protocol: match a.protocol {
                    ProtocolArg::Bb84 => Protocol::Bb84,
                    ProtocolArg::SixState => Protocol::SixState,
                    ProtocolArg::QuditTwoBasis => Protocol::QuditTwoBasis,
                },
                d: a.dim,
                observed: a.observed.iter().cloned().collect(),
            }
        }
    };
    let caps = cap_report(&est)?;
    let mut w = sink(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &rounded_json(&caps)?)?;
    writeln!(w)?;
    w.flush()?;
    if let Some(o) = &a.out {
        manifest::write(command, None, o, vec![o.clone()])?;
    }
    Ok(Status::Clean)
}

fn hunt(command: &Command, a: &HuntArgs) -> anyhow::Result<Status> {
    let fam = load_family(&a.family)?;
    let d = fam.dim();
    let mut cfg = HuntConfig::new(d, fam.len(), a.trials, a.seed);
    cfg.restarts = a.restarts;
    cfg.max_evals = a.max_evals;
    cfg.scan = cfg.scan.with_outcomes(a.povm_min.unwrap_or(d), a.povm_max);
    let rep = conjecture_hunt(&cfg, &fam)?;
    let mut w = sink(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &rounded_json(&rep)?)?;
    writeln!(w)?;
    w.flush()?;
    report(
        a.out.as_deref(),
        &format!(
            "max I_tot {} (scan {}, optimizer {}) against {}; {} candidate(s), {} proven violation(s)",
            sig(rep.max_total),
            sig(rep.scan_max_total),
            sig(rep.optimizer_max_total),
            sig(rep.bound),
            rep.candidates.len(),
            rep.proven_violations
        ),
    );
    if let Some(o) = &a.out {
        manifest::write(command, Some(a.seed), o, vec![o.clone()])?;
    }
    Ok(if rep.proven_violations > 0 {
        Status::ProvenViolation
    } else if rep.has_candidates() {
        Status::Candidate
    } else {
        Status::Clean
    })
}
