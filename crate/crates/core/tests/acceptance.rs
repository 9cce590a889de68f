//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use mubinfo::bounds::{average_info_bound, bound_m_equal, entropic_lower_bound, BoundName};
use mubinfo::explore::{
    candidate_from_record, conjecture_hunt, detect_candidates, optimize_extremal, run_trial, scan, write_csv,
    HuntConfig, Objective, OptimizeConfig, ScanConfig, CANDIDATE_TOL,
};
use mubinfo::info::mutual_information;
use mubinfo::mub::{is_prime, standard_mubs};
use mubinfo::qkd::{simulate_intercept, OutcomeSplit};
use mubinfo::quantum::{projector_povm, revert_protocol, validate_povm, POVM_TOL};
use mubinfo::qubit::{
    bloch_components, random_axis_priors, random_measurement, series_bound_check, three_axis_sum, to_povm, Axis,
};
use mubinfo::sampling::{random_rank_one_povm, PriorMode, RngSeed};
use mubinfo::{PriorProfile, StateVector};
use rand::Rng;

const BOUND_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-3;
const SEED: u64 = 20_240_917;

// ---- independent oracles ----

fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn tight_oracle(d: usize, m: usize) -> f64 {
    let (df, mf) = (d as f64, m as f64);
    let k = (m * d) / (d + m - 1);
    let kf = k as f64;
    mf * (df / kf).log2() - (kf + 1.0) * (mf - kf * (df + mf - 1.0) / df) * (1.0 + 1.0 / kf).log2()
}

fn weak_oracle(d: usize, m: usize) -> f64 {
    m as f64 * ((d + m - 1) as f64 / m as f64).log2()
}

fn half_oracle(d: usize, m: usize) -> f64 {
    m as f64 / 2.0 * (d as f64).log2()
}

fn qubit_minimum() -> f64 {
    let p = (1.0 + 1.0 / 3f64.sqrt()) / 2.0;
    3.0 * (1.0 - h(&[p, 1.0 - p]))
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---- criteria ----

fn two_basis_reproduction() -> Outcome {
    let mut notes = Vec::new();
    for d in [2, 3, 5, 7] {
        let fam = standard_mubs(d, 2).map_err(err)?;
        let cfg = ScanConfig::new(d, 2, 100_000, SEED).with_outcomes(d, 16);
        let out = scan(&cfg, &fam).map_err(err)?;
        let limit = (d as f64).log2();
        let over = out.records.iter().filter(|r| r.total > limit + BOUND_TOL).count();
        ensure(over == 0, || format!("d={d}: {over} trials above log2 d"))?;
        ensure(out.summary.proven_violation_count() == 0, || {
            format!("d={d}: proven violations {:?}", out.summary.proven_violations)
        })?;
        notes.push(format!("d={d} max {:.6}/{:.6}", out.summary.max_total, limit));
    }
    Ok(notes.join(", "))
}

fn many_basis_reproduction() -> Outcome {
    let mut notes = Vec::new();
    for (d, m, limit) in [(2, 3, 1.0), (3, 4, tight_oracle(3, 4)), (5, 6, tight_oracle(5, 6))] {
        let fam = standard_mubs(d, m).map_err(err)?;
        let cfg = ScanConfig::new(d, m, 100_000, SEED + 1).with_outcomes(d, 16);
        let out = scan(&cfg, &fam).map_err(err)?;
        let over = out.records.iter().filter(|r| r.total > limit + BOUND_TOL).count();
        ensure(over == 0, || format!("d={d} M={m}: {over} trials above {limit}"))?;
        ensure(out.summary.proven_violation_count() == 0, || {
            format!("d={d} M={m}: proven violations {:?}", out.summary.proven_violations)
        })?;
        notes.push(format!("d={d} M={m} max {:.6}/{:.6}", out.summary.max_total, limit));
    }
    ensure((tight_oracle(3, 4) - 4.0 * 1.5f64.log2()).abs() < 1e-12, || "d=3 closed form".into())?;
    Ok(notes.join(", "))
}

fn qubit_minimum_direction() -> Outcome {
    let fam = standard_mubs(2, 3).map_err(err)?;
    let cfg = OptimizeConfig::new(2, Objective::Min, SEED);
    let res = optimize_extremal(&fam, &PriorProfile::equal(2, 3), &cfg).map_err(err)?;
    let target = qubit_minimum();
    ensure((res.value - target).abs() <= OPT_TOL, || {
        format!("min {:.6}, expected {:.6}", res.value, target)
    })?;
    ensure(validate_povm(&res.povm, POVM_TOL).passed, || "returned POVM invalid".into())?;
    let (_, r) = bloch_components(&res.povm.elements()[0]);
    let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n = r.map(|x| (x / len).abs());
    let spread = n.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - n.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(spread <= 1e-2, || format!("direction {n:?} not balanced"))?;
    Ok(format!(
        "min {:.6} (target {:.6}), |n| = ({:.4}, {:.4}, {:.4})",
        res.value, target, n[0], n[1], n[2]
    ))
}

fn saturation() -> Outcome {
    let mut notes = Vec::new();
    for d in [2, 3, 5] {
        let fam = standard_mubs(d, 2).map_err(err)?;
        let cfg = OptimizeConfig::new(d, Objective::Max, SEED + d as u64);
        let res = optimize_extremal(&fam, &PriorProfile::equal(d, 2), &cfg).map_err(err)?;
        let limit = (d as f64).log2();
        ensure(res.value >= limit - 1e-6, || format!("d={d}: max {:.9} < {:.9}", res.value, limit))?;
        ensure(res.value <= limit + 1e-6, || format!("d={d}: max {:.9} above bound", res.value))?;
        notes.push(format!("d={d} gap {:.1e}", limit - res.value));
    }
    Ok(notes.join(", "))
}

fn two_outcome_qubit() -> Outcome {
    let mut rng = RngSeed::new(SEED, 5).rng();
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0u32;
    for _ in 0..100_000 {
        let meas = random_measurement(&mut rng);
        let pri = random_axis_priors(&mut rng);
        let sum = three_axis_sum(&meas, &pri);
        ensure(sum <= 1.0 + BOUND_TOL, || format!("sum {sum} for {meas:?} {pri:?}"))?;
        worst = worst.max(sum);
        if meas.radius() == 0.0 {
            continue;
        }
        for axis in Axis::ALL {
            let s = series_bound_check(&meas, axis, pri.delta(axis), 200).map_err(err)?;
            ensure(s.holds(BOUND_TOL), || format!("series cap fails: {s:?}"))?;
            ensure(s.partial_sum <= s.closed_form + BOUND_TOL, || format!("partial sum above closed form: {s:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("max sum {worst:.9}, {checked} axis caps checked"))
}

fn entropic_duality() -> Outcome {
    let mut notes = Vec::new();
    for (d, m) in [(2, 2), (2, 3), (3, 4), (5, 6)] {
        let fam = standard_mubs(d, m).map_err(err)?;
        let rhs = m as f64 * (d as f64).log2() - tight_oracle(d, m).min(half_oracle(d, m));
        let lib = entropic_lower_bound(d, m).strongest();
        ensure((lib - rhs).abs() < 1e-12, || format!("d={d} M={m}: library {lib} vs {rhs}"))?;
        let mut rng = RngSeed::new(SEED, 6 + d as u64 * 10 + m as u64).rng();
        let mut outcomes = 0;
        let mut slack = f64::INFINITY;
        while outcomes < 10_000 {
            let povm = random_rank_one_povm(d, rng.random_range(d..=16), &mut rng).map_err(err)?;
            let ens = revert_protocol(&povm).map_err(err)?;
            for (state, &w) in ens.states().iter().zip(ens.weights()) {
                if w <= 1e-12 {
                    continue;
                }
                let hsum: f64 = fam
                    .bases()
                    .iter()
                    .map(|b| {
                        let p: Vec<f64> = b.vectors().iter().map(|v| v.expectation(state).max(0.0)).collect();
                        h(&p)
                    })
                    .sum();
                ensure(hsum >= rhs - BOUND_TOL, || format!("d={d} M={m}: H-sum {hsum} < {rhs}"))?;
                slack = slack.min(hsum - rhs);
                outcomes += 1;
            }
        }
        notes.push(format!("({d},{m}) min slack {slack:.2e}"));
    }
    for d in [2, 3, 5] {
        let fam = standard_mubs(d, 2).map_err(err)?;
        for i in 0..d {
            let rho = StateVector::basis_state(d, i).map_err(err)?.projector();
            let hsum: f64 = fam
                .bases()
                .iter()
                .map(|b| h(&b.vectors().iter().map(|v| v.expectation(&rho).max(0.0)).collect::<Vec<_>>()))
                .sum();
            let lb = entropic_lower_bound(d, 2).strongest();
            ensure((hsum - (d as f64).log2()).abs() < 1e-12 && (hsum - lb).abs() < 1e-12, || {
                format!("d={d} |{i}>: H-sum {hsum}, bound {lb}")
            })?;
        }
    }
    notes.push("basis states saturate for d=2,3,5".into());
    Ok(notes.join(", "))
}

fn bound_identities() -> Outcome {
    let mut cases = 0;
    for d in (2..=31).filter(|&d| is_prime(d)) {
        for m in 2..=d + 1 {
            let b = bound_m_equal(d, m);
            let (t, w, hf) = (tight_oracle(d, m), weak_oracle(d, m), half_oracle(d, m));
            ensure((b.tight.value - t).abs() < 1e-12 && (b.weak.value - w).abs() < 1e-12, || {
                format!("d={d} M={m}: library values differ from oracle")
            })?;
            ensure((b.half.value - hf).abs() < 1e-12, || format!("d={d} M={m}: half form"))?;
            ensure(t <= w + 1e-12, || format!("d={d} M={m}: tight {t} > weak {w}"))?;
            if (hf - t).abs() > 1e-12 {
                let half_stronger = hf < t;
                let predicted = (m as f64) < (d as f64).sqrt() + 1.0;
                ensure(half_stronger == predicted, || format!("d={d} M={m}: selection rule"))?;
            }
            cases += 1;
        }
        let t = tight_oracle(d, d + 1);
        let df = d as f64;
        ensure(df - 1.0 <= t + 1e-12 && t < df, || format!("d={d}: tight(d+1) = {t}"))?;
        ensure(average_info_bound(d) == df / (df + 1.0), || format!("d={d}: average bound"))?;
    }
    Ok(format!("{cases} (d, M) cases"))
}

fn conjecture_support() -> Outcome {
    let mut notes = Vec::new();
    for m in [2, 3] {
        let fam = standard_mubs(2, m).map_err(err)?;
        let mut cfg = HuntConfig::new(2, m, 100_000, SEED + m as u64);
        cfg.scan = cfg.scan.with_priors(PriorMode::UniformSimplex);
        let report = conjecture_hunt(&cfg, &fam).map_err(err)?;
        if report.has_candidates() {
            let path = std::env::temp_dir().join(format!("mubinfo_candidates_m{m}.json"));
            let body = serde_json::to_string_pretty(&report.candidates).map_err(err)?;
            std::fs::write(&path, body).map_err(err)?;
            return Err(format!(
                "M={m}: {} candidate(s), bundle written to {}",
                report.candidates.len(),
                path.display()
            ));
        }
        ensure(report.proven_violations == 0, || format!("M={m}: proven violations"))?;
        ensure(report.max_total <= report.bound + CANDIDATE_TOL, || {
            format!("M={m}: max {} above {}", report.max_total, report.bound)
        })?;
        notes.push(format!(
            "M={m} max {:.6} (scan {:.6}, optimizer {:.6}) vs {:.1}",
            report.max_total, report.scan_max_total, report.optimizer_max_total, report.bound
        ));
    }
    // the detector itself must fire on an injected excess
    let fam = standard_mubs(2, 2).map_err(err)?;
    let cfg = ScanConfig::new(2, 2, 1, SEED).with_priors(PriorMode::UniformSimplex);
    let mut rec = run_trial(&cfg, &fam, 0).map_err(err)?;
    rec.total = 1.5;
    let hits = detect_candidates(std::slice::from_ref(&rec), 1.0, CANDIDATE_TOL);
    ensure(hits.len() == 1, || "injected excess not flagged".into())?;
    let bundle = candidate_from_record(&cfg, &rec, 1.0).map_err(err)?;
    serde_json::to_string(&bundle).map_err(err)?;
    notes.push("injected excess flagged".into());
    Ok(notes.join(", "))
}

fn cross_validation() -> Outcome {
    let fam = standard_mubs(2, 3).map_err(err)?;
    let mut rng = RngSeed::new(SEED, 9).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let meas = random_measurement(&mut rng);
        let pri = random_axis_priors(&mut rng);
        let povm = to_povm(&meas);
        let mut matrix_total = 0.0;
        for axis in Axis::ALL {
            let basis = &fam.bases()[axis.family_index()];
            let p = pri.priors(axis);
            let i = mutual_information(&p, basis, &povm).map_err(err)?;
            let closed = mubinfo::qubit::axis_information(&meas, axis, pri.delta(axis));
            worst = worst.max((i - closed).abs());
            matrix_total += i;
        }
        worst = worst.max((matrix_total - three_axis_sum(&meas, &pri)).abs());
        ensure(worst <= 1e-10, || format!("disagreement {worst:e} for {meas:?} {pri:?}"))?;
    }
    Ok(format!("max disagreement {worst:.2e}"))
}

fn qkd_caps() -> Outcome {
    let mut rng = RngSeed::new(SEED, 10).rng();
    let mut worst = f64::NEG_INFINITY;
    for t in 0..10_000u64 {
        let (d, m, parties) = match t % 3 {
            0 => (2, 2, 2),
            1 => (2, 3, 3),
            _ => (3, 4, 2),
        };
        let fam = standard_mubs(d, m).map_err(err)?;
        let outcomes = rng.random_range(d..=12);
        let povm = random_rank_one_povm(d, outcomes, &mut rng).map_err(err)?;
        let masks = (0..outcomes).map(|_| rng.random_range(0..(1u8 << parties))).collect();
        let split = OutcomeSplit::new(parties, masks).map_err(err)?;
        let rec = simulate_intercept(&fam, &povm, &split).map_err(err)?;
        ensure(rec.ok(), || format!("trial {t}: excess {:e}", rec.max_excess()))?;
        worst = worst.max(rec.max_excess());
    }
    let fam = standard_mubs(2, 2).map_err(err)?;
    let x = projector_povm(&fam.bases()[1]).map_err(err)?;
    let split = OutcomeSplit::all_to(2, 1, 2).map_err(err)?;
    let rec = simulate_intercept(&fam, &x, &split).map_err(err)?;
    let (bob_z, eve_x) = (rec.info[0][0], rec.info[1][1]);
    ensure(bob_z.abs() < 1e-9 && (eve_x - 1.0).abs() < 1e-9, || format!("helpful Bob: {bob_z}, {eve_x}"))?;
    ensure((bob_z + eve_x - 1.0).abs() < 1e-9, || "helpful Bob sum".into())?;
    Ok(format!("max excess {worst:.2e}, helpful-Bob sum {:.12}", bob_z + eve_x))
}

fn determinism() -> Outcome {
    let fam = standard_mubs(2, 3).map_err(err)?;
    let cfg = ScanConfig::new(2, 3, 5_000, 7).with_priors(PriorMode::UniformSimplex);
    let render = || -> Result<Vec<u8>, String> {
        let out = scan(&cfg, &fam).map_err(err)?;
        let mut buf = Vec::new();
        write_csv(&out.records, &mut buf).map_err(err)?;
        Ok(buf)
    };
    let (a, b) = (render()?, render()?);
    ensure(a == b, || "CSV output differs between runs".into())?;
    ensure(a.len() > 1000, || "CSV unexpectedly small".into())?;
    let header = String::from_utf8_lossy(&a);
    ensure(header.contains(&format!("bound:{}", BoundName::QubitThree)), || "bound columns missing".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("two-basis bound, d in {2,3,5,7}", two_basis_reproduction),
        ("many-basis bounds, (2,3) (3,4) (5,6)", many_basis_reproduction),
        ("qubit minimum 0.768 along (1,1,1)", qubit_minimum_direction),
        ("two-basis saturation by optimizer", saturation),
        ("two-outcome qubit theorem", two_outcome_qubit),
        ("entropic uncertainty duality", entropic_duality),
        ("bound formula identities", bound_identities),
        ("unequal-prior conjecture support", conjecture_support),
        ("closed form vs matrix pipeline", cross_validation),
        ("QKD intercept caps", qkd_caps),
        ("byte-identical scan CSV", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
