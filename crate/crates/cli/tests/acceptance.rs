//! Acceptance criteria 1 to 8, one line each.
//!
//! Runs without the libtest harness so the lines always print. Criteria
//! listed in `KNOWN_UNATTAINABLE` must fail; if one starts passing the run
//! fails too, so the list stays honest.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qtv_core::channel::{reconstruct_channel, simulate, synth_prep_circuit, DiscrepancyKind};
use qtv_core::engine::{verify, DiffStatus, OutcomeStatus, VerificationReport};
use qtv_core::entanglement::{bipartition_report, entanglement_summary};
use qtv_core::protocols::{self, MatchStatus};
use qtv_core::{StateVector, Tolerances};

const SEED: u64 = 7;
const MAGNITUDE_TOL: f64 = 1e-12;
const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;
const ENTROPY_TOL: f64 = 1e-9;
const APPENDIX2_TOL: f64 = 1e-9;
const GATE_BUDGET: usize = 512;
const RECONSTRUCT_BUDGET: Duration = Duration::from_secs(1);

/// Printed single-qubit probes carry sign typos; no Pauli word corrects them.
const KNOWN_UNATTAINABLE: [u8; 1] = [2];

// regression pins
const TELEPORT1_PRINTED_COVERAGE: f64 = 0.78125;
const TELEPORT2_MALFORMED_ROWS: usize = 4;
const SIZE2_MIN_ENTROPY: f64 = 2.0;
const SIZE3_MIN_ENTROPY: f64 = 2.0;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Every nonzero outcome corrected to the floor.
fn all_corrected(r: &VerificationReport) -> bool {
    r.outcomes.iter().all(|o| match o.status {
        OutcomeStatus::ZeroProbability => true,
        _ => o.fidelity.is_some_and(|f| f >= FIDELITY_FLOOR),
    })
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let rec = reconstruct_channel().map_err(err)?;
    let elapsed = start.elapsed();
    let target = 1.0 / 32f64.sqrt();
    let support: Vec<f64> = rec
        .channel
        .amps()
        .iter()
        .map(|a| a.norm())
        .filter(|m| *m > 0.0)
        .collect();
    let worst = support
        .iter()
        .map(|m| (m - target).abs())
        .fold(0.0, f64::max);
    let cites = |s: &str| {
        rec.discrepancies
            .iter()
            .any(|d| d.state == s && d.kind == DiscrepancyKind::PrefixViolation)
    };
    check(
        support.len() == 32
            && worst <= MAGNITUDE_TOL
            && (rec.channel.norm() - 1.0).abs() <= MAGNITUDE_TOL
            && cites("E010")
            && cites("G111")
            && elapsed < RECONSTRUCT_BUDGET,
        format!(
            "{} nonzero amplitudes, worst |a|-1/sqrt32 {worst:.1e}, {} discrepancies (E010 {}, G111 {}), {:.1} ms",
            support.len(),
            rec.discrepancies.len(),
            cites("E010"),
            cites("G111"),
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn criterion2() -> Outcome {
    let t = tol();
    let printed = verify(
        &protocols::spec_teleport1_printed().map_err(err)?,
        100,
        SEED,
        &t,
    )
    .map_err(err)?;
    let derived = verify(&protocols::spec_teleport1().map_err(err)?, 100, SEED, &t).map_err(err)?;
    let pinned = (printed.coverage - TELEPORT1_PRINTED_COVERAGE).abs() <= t.probability_sum;
    let best = printed
        .outcomes
        .iter()
        .filter_map(|o| o.best_fidelity)
        .fold(f64::INFINITY, f64::min);
    check(
        all_corrected(&printed) && pinned,
        format!(
            "printed probes: coverage {} (pinned {}), {} of 4 outcomes correctable, best single-word fidelity {best:.6}; sign-corrected probes: coverage {}, min fidelity {:.12}",
            printed.coverage,
            pinned,
            printed.outcomes.iter().filter(|o| o.status == OutcomeStatus::Ok).count(),
            derived.coverage,
            derived.min_fidelity().unwrap_or(0.0),
        ),
    )
}

fn criterion3() -> Outcome {
    let t = tol();
    let spec = protocols::spec_teleport2().map_err(err)?;
    let r = verify(&spec, 100, SEED, &t).map_err(err)?;
    let printed = protocols::paper_table_teleport2().map_err(err)?;
    let correctable = r
        .outcomes
        .iter()
        .filter(|o| o.status == OutcomeStatus::Ok)
        .count();
    // every printed row lands in exactly one diff row
    let classified = printed
        .table
        .rows
        .keys()
        .all(|k| r.diffs.iter().filter(|d| &d.key == k).count() == 1);
    let count = |s: DiffStatus| r.diffs.iter().filter(|d| d.status == s).count();
    check(
        correctable == 16
            && r.outcomes.len() == 16
            && all_corrected(&r)
            && classified
            && printed.malformed == TELEPORT2_MALFORMED_ROWS,
        format!(
            "{correctable}/16 correctable, min fidelity {:.12}; diffs: {} match, {} phase-only, {} mismatch, {} missing; malformed rows {}",
            r.min_fidelity().unwrap_or(0.0),
            count(DiffStatus::Match),
            count(DiffStatus::PhaseOnly),
            count(DiffStatus::Mismatch),
            count(DiffStatus::Missing),
            printed.malformed
        ),
    )
}

fn criterion4() -> Outcome {
    let t = tol();
    let r = verify(&protocols::spec_teleport3().map_err(err)?, 50, SEED, &t).map_err(err)?;
    let three_letter = r.outcomes.iter().all(|o| {
        o.correction
            .as_deref()
            .is_some_and(|w| w.matches('⊗').count() == 2)
    });
    let inputs: Vec<StateVector> = (0..10)
        .map(|i| StateVector::random(3, SEED + i))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let residual = inputs
        .iter()
        .map(|s| protocols::appendix2_check(std::slice::from_ref(s)))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(err)?
        .into_iter()
        .fold(0.0, f64::max);
    check(
        r.outcomes.len() == 64 && three_letter && all_corrected(&r) && residual <= APPENDIX2_TOL,
        format!(
            "{} paths, 3-letter words {three_letter}, min fidelity {:.12}; appendix2 max residual {residual:.1e}",
            r.outcomes.len(),
            r.min_fidelity().unwrap_or(0.0)
        ),
    )
}

fn criterion5() -> Outcome {
    let t = tol();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, spec) in [
        ("qss1", protocols::spec_qss1()),
        ("qss2", protocols::spec_qss2()),
        ("qss3", protocols::spec_qss3()),
    ] {
        let r = verify(&spec.map_err(err)?, 50, SEED, &t).map_err(err)?;
        ok &= r.pass && all_corrected(&r);
        parts.push(format!(
            "{name} min fidelity {:.12}",
            r.min_fidelity().unwrap_or(0.0)
        ));
    }
    let bc = protocols::bc_ordering_search().map_err(err)?;
    ok &= bc.adopted.c_table_match;
    let fams = protocols::qss_family_report().map_err(err)?;
    let anchored = fams.iter().all(|m| !m.anchor.is_empty());
    ok &= anchored;
    let flagged = fams
        .iter()
        .filter(|m| m.status == MatchStatus::Flagged)
        .count();
    check(
        ok,
        format!(
            "{}; C table matches up to phase: {}; families: {} classified ({} match, {flagged} flagged), anchored {anchored}",
            parts.join(", "),
            bc.adopted.c_table_match,
            fams.len(),
            fams.len() - flagged
        ),
    )
}

fn criterion6() -> Outcome {
    let ch = reconstruct_channel().map_err(err)?.channel;
    let cuts = bipartition_report(&ch, &tol()).map_err(err)?;
    let singles_ok = cuts
        .iter()
        .filter(|c| c.subset.len() == 1)
        .all(|c| (c.entropy - 1.0).abs() <= ENTROPY_TOL);
    let s = entanglement_summary(&cuts);
    let min = |k: usize| s.0.get(&k).map_or(f64::NAN, |c| c.min);
    check(
        singles_ok
            && s.0.get(&1).is_some_and(|c| c.cuts == 7)
            && (min(2) - SIZE2_MIN_ENTROPY).abs() <= ENTROPY_TOL
            && (min(3) - SIZE3_MIN_ENTROPY).abs() <= ENTROPY_TOL,
        format!(
            "7 single cuts at 1 bit: {singles_ok}; size-2 min {:.9}, size-3 min {:.9}",
            min(2),
            min(3)
        ),
    )
}

fn criterion7() -> Outcome {
    let ch = reconstruct_channel().map_err(err)?.channel;
    let c = synth_prep_circuit(&ch).map_err(err)?;
    let f = simulate::<f64>(&c)
        .map_err(err)?
        .fidelity(&ch)
        .map_err(err)?;
    check(
        f >= FIDELITY_FLOOR && c.gate_count() <= GATE_BUDGET,
        format!("fidelity {f:.12}, {} gates", c.gate_count()),
    )
}

fn criterion8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qtv"))
            .args(["all", "--seed", &SEED.to_string()])
            .output()
            .map_err(err)
    };
    let (a, b) = (run()?, run()?);
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    check(
        same && a.status.code() == Some(1) && b.status.code() == Some(1),
        format!(
            "byte-identical {same} ({} bytes), exit codes {:?}/{:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u8, fn() -> Outcome); 8] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
    ];
    let mut unexpected = 0;
    for (n, f) in criteria {
        let result = f();
        let pass = result.is_ok();
        let detail = result.unwrap_or_else(|e| e);
        let known = KNOWN_UNATTAINABLE.contains(&n);
        let tag = if known && !pass { " (known)" } else { "" };
        println!(
            "criterion {n} {}: {detail}{tag}",
            if pass { "PASS" } else { "FAIL" }
        );
        if pass == known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria differ from the expected outcome");
        ExitCode::FAILURE
    }
}
