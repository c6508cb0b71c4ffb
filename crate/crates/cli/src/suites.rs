//! One function per command. Each returns a [`Report`] whose sections carry
//! a JSON body, the printed-data findings and an exit code.

use std::collections::BTreeMap;

use anyhow::{ensure, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use qtv_core::channel::{reconstruct_channel, simulate, synth_prep_circuit};
use qtv_core::engine::{
    check_orthonormal, compare_tables, corrections_for, trial_input, verify, DiffStatus,
    MeasurementBasis, OutcomeStatus, ProtocolSpec, TableDiff, VerificationReport,
};
use qtv_core::entanglement::{bipartition_report, entanglement_summary, entropy_cross_check};
use qtv_core::protocols::{self, MatchStatus};
use qtv_core::statefile::{parse_state, write_state};
use qtv_core::{StateVector, Tolerances};

pub const EXIT_CLEAN: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

/// Upper bound on gates for the channel's preparation circuit.
pub const CHANNEL_GATE_BUDGET: usize = 512;
/// Number of random draws for the three-qubit completeness check.
pub const APPENDIX2_DRAWS: usize = 10;
const STATE_EPS: f64 = 1e-15;

pub struct Ctx {
    pub seed: u64,
    pub trials: usize,
    pub tol: Tolerances,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Teleport1,
    Teleport2,
    Teleport3,
    Qss1,
    Qss2,
    Qss3,
}

impl Protocol {
    pub const ALL: [Protocol; 6] = [
        Protocol::Teleport1,
        Protocol::Teleport2,
        Protocol::Teleport3,
        Protocol::Qss1,
        Protocol::Qss2,
        Protocol::Qss3,
    ];

    fn name(self) -> &'static str {
        match self {
            Protocol::Teleport1 => "teleport1",
            Protocol::Teleport2 => "teleport2",
            Protocol::Teleport3 => "teleport3",
            Protocol::Qss1 => "qss1",
            Protocol::Qss2 => "qss2",
            Protocol::Qss3 => "qss3",
        }
    }

    fn specs(self) -> qtv_core::Result<(ProtocolSpec, ProtocolSpec)> {
        Ok(match self {
            Protocol::Teleport1 => (
                protocols::spec_teleport1()?,
                protocols::spec_teleport1_printed()?,
            ),
            Protocol::Teleport2 => (
                protocols::spec_teleport2()?,
                protocols::spec_teleport2_printed()?,
            ),
            Protocol::Teleport3 => (
                protocols::spec_teleport3()?,
                protocols::spec_teleport3_printed()?,
            ),
            Protocol::Qss1 => (protocols::spec_qss1()?, protocols::spec_qss1_printed()?),
            Protocol::Qss2 => (protocols::spec_qss2()?, protocols::spec_qss2_printed()?),
            Protocol::Qss3 => (protocols::spec_qss3()?, protocols::spec_qss3_printed()?),
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisName {
    Teleport1,
    Teleport1Derived,
    Teleport2,
    Teleport3,
    Teleport3Derived,
    Qss3Alice,
    Qss3AlicePrinted,
    Ghz,
}

impl BasisName {
    fn name(self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }

    /// The basis and whether it is a printed family.
    fn load(self) -> qtv_core::Result<(MeasurementBasis, bool)> {
        let first = |s: ProtocolSpec| {
            s.stages[0]
                .basis_for(&[])
                .cloned()
                .ok_or_else(|| qtv_core::Error::Spec(format!("{}: first stage is not fixed", s.id)))
        };
        Ok(match self {
            BasisName::Teleport1 => (protocols::basis_teleport1()?, true),
            BasisName::Teleport1Derived => (protocols::basis_teleport1_derived()?, false),
            BasisName::Teleport2 => (first(protocols::spec_teleport2_printed()?)?, true),
            BasisName::Teleport3 => (protocols::basis_teleport3_printed()?, true),
            BasisName::Teleport3Derived => (protocols::basis_teleport3_derived()?, false),
            BasisName::Qss3Alice => (first(protocols::spec_qss3()?)?, false),
            BasisName::Qss3AlicePrinted => (first(protocols::spec_qss3_printed()?)?, true),
            BasisName::Ghz => (MeasurementBasis::ghz(vec![0, 1, 2])?, false),
        })
    }
}

/// A printed artifact that disagrees with what was derived.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub anchor: String,
    pub kind: String,
    pub detail: String,
}

impl Finding {
    fn new(anchor: impl Into<String>, kind: &str, detail: impl Into<String>) -> Self {
        Self {
            anchor: anchor.into(),
            kind: kind.to_string(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub name: String,
    pub code: u8,
    pub findings: Vec<Finding>,
    pub body: Value,
}

impl Section {
    /// `failed` wins over findings.
    fn new(name: impl Into<String>, failed: bool, findings: Vec<Finding>, body: Value) -> Self {
        let code = if failed {
            EXIT_FAILURE
        } else if findings.is_empty() {
            EXIT_CLEAN
        } else {
            EXIT_FINDINGS
        };
        Self {
            name: name.into(),
            code,
            findings,
            body,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerances: Tolerances,
    pub exit_code: u8,
    pub sections: Vec<Section>,
}

impl Report {
    fn new(ctx: &Ctx, command: impl Into<String>, sections: Vec<Section>) -> Self {
        Self {
            command: command.into(),
            seed: ctx.seed,
            trials: ctx.trials,
            tolerances: ctx.tol,
            exit_code: sections.iter().map(|s| s.code).max().unwrap_or(EXIT_CLEAN),
            sections,
        }
    }
}

fn channel_section(ctx: &Ctx) -> Result<(Section, StateVector)> {
    let rec = reconstruct_channel()?;
    let ch = &rec.channel;
    let target = 1.0 / 32f64.sqrt();
    let support: Vec<f64> = ch
        .amps()
        .iter()
        .map(|a| a.norm())
        .filter(|m| *m > ctx.tol.zero_probability)
        .collect();
    let worst_magnitude = support
        .iter()
        .map(|m| (m - target).abs())
        .fold(0.0, f64::max);
    let norm_defect = (ch.norm() - 1.0).abs();
    let ok = support.len() == 32
        && worst_magnitude <= ctx.tol.probability_sum
        && norm_defect <= ctx.tol.probability_sum;
    let findings = rec
        .discrepancies
        .iter()
        .map(|d| {
            Ok(Finding::new(
                format!("channel_family.txt:{} {}", d.line, d.state),
                &kebab(&d.kind)?,
                format!("printed {} expected {}", d.printed, d.expected),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let body = json!({
        "support": support.len(),
        "worst_magnitude_defect": worst_magnitude,
        "norm_defect": norm_defect,
        "kets": ch.support(STATE_EPS).iter().map(|(b, a)| format!("{b} {:+.6}", a.re)).collect::<Vec<_>>(),
        "discrepancies": rec.discrepancies,
    });
    Ok((Section::new("channel", !ok, findings, body), rec.channel))
}

/// Serialized enum tag as a plain string.
fn kebab<T: Serialize>(v: &T) -> Result<String> {
    Ok(match serde_json::to_value(v)? {
        Value::String(s) => s,
        other => other.to_string(),
    })
}

/// Returns the report and the reconstructed channel as a state file.
pub fn channel_reconstruct(ctx: &Ctx) -> Result<(Report, String)> {
    let (section, ch) = channel_section(ctx)?;
    Ok((
        Report::new(ctx, "channel reconstruct", vec![section]),
        write_state(&ch, STATE_EPS),
    ))
}

/// Rows where a printed table disagrees; rows only the derivation lists are
/// not printed data and are skipped.
fn diff_findings(anchor: impl Fn(&str) -> String, diffs: &[TableDiff]) -> Vec<Finding> {
    diffs
        .iter()
        .filter(|d| match d.status {
            DiffStatus::Match => false,
            DiffStatus::Missing => d.printed.is_some(),
            DiffStatus::PhaseOnly | DiffStatus::Mismatch => true,
        })
        .map(|d| {
            let mut detail = format!(
                "{}: printed {} derived {}",
                d.key,
                d.printed.as_deref().unwrap_or("-"),
                d.derived.as_deref().unwrap_or("-")
            );
            if let Some(n) = &d.note {
                detail.push_str(&format!(" ({n})"));
            }
            Finding::new(
                anchor(&d.key),
                &kebab(&d.status).unwrap_or_default(),
                detail,
            )
        })
        .collect()
}

fn printed_run_finding(r: &VerificationReport) -> Option<Finding> {
    (!r.pass).then(|| {
        let fid = r
            .min_fidelity()
            .map_or_else(|| "none".to_string(), |f| format!("{f:.9}"));
        let bad = r
            .outcomes
            .iter()
            .filter(|o| matches!(o.status, OutcomeStatus::Uncorrectable | OutcomeStatus::LowFidelity))
            .count();
        Finding::new(
            &r.anchor,
            "printed-run",
            format!(
                "coverage {:.9}..{:.9} (expected {}), {bad} of {} outcomes not corrected, min fidelity {fid}",
                r.coverage_min,
                r.coverage_max,
                r.expected_coverage,
                r.outcomes.len()
            ),
        )
    })
}

/// Anchor of a printed table row, by key, falling back to the table's own.
fn row_anchors(p: Protocol, fallback: &str) -> Result<impl Fn(&str) -> String> {
    let rows: BTreeMap<String, String> = match p {
        Protocol::Teleport2 => protocols::paper_table_teleport2()?
            .rows
            .into_iter()
            .map(|r| (r.state, r.anchor))
            .collect(),
        _ => BTreeMap::new(),
    };
    let fallback = fallback.to_string();
    Ok(move |key: &str| rows.get(key).cloned().unwrap_or_else(|| fallback.clone()))
}

fn family_findings<'a>(rows: impl IntoIterator<Item = &'a protocols::FamilyMatch>) -> Vec<Finding> {
    rows.into_iter()
        .filter(|m| {
            m.status == MatchStatus::Flagged
                || m.note
                    .as_deref()
                    .is_some_and(|n| n.starts_with("malformed"))
        })
        .map(|m| {
            let mut detail = format!("{}: overlap {:.6} with {}", m.label, m.overlap, m.matched);
            if let Some(s) = m.in_span {
                detail.push_str(&format!(", in-span {s:.6}"));
            }
            if let Some(n) = &m.note {
                detail.push_str(&format!(" ({n})"));
            }
            Finding::new(&m.anchor, "family", detail)
        })
        .collect()
}

fn basis_findings(b: &MeasurementBasis, anchor: &str, tol: &Tolerances) -> (Value, Vec<Finding>) {
    let r = check_orthonormal(b, tol);
    let mut f = Vec::new();
    if !r.orthonormal {
        let (a, c) = r.worst_pair.clone().unwrap_or_default();
        f.push(Finding::new(
            anchor,
            "not-orthonormal",
            format!("{}: |<{a}|{c}>| = {:.6}", r.name, r.max_off_diagonal),
        ));
    }
    if let Some(d) = r.completeness_defect.filter(|d| *d > tol.orthonormality) {
        f.push(Finding::new(
            anchor,
            "incomplete",
            format!("{}: completeness defect {d:.6}", r.name),
        ));
    }
    (serde_json::to_value(&r).unwrap_or(Value::Null), f)
}

/// Extra printed artifacts belonging to each protocol.
fn protocol_extras(p: Protocol, tol: &Tolerances) -> Result<(Value, Vec<Finding>)> {
    let mut f = Vec::new();
    let body = match p {
        Protocol::Teleport1 => {
            let diffs = protocols::teleport1_term_diffs()?;
            f.extend(diffs.iter().map(|d| {
                Finding::new(
                    &d.anchor,
                    "sign",
                    format!(
                        "{} term {}: printed {:+} derived {:+}",
                        d.element, d.term, d.printed, d.derived
                    ),
                )
            }));
            let (basis, bf) = basis_findings(&protocols::basis_teleport1()?, "teleport1.txt", tol);
            f.extend(bf);
            json!({ "term_diffs": diffs, "printed_basis": basis })
        }
        Protocol::Teleport2 => {
            let table = protocols::paper_table_teleport2()?;
            f.extend(
                table.rows.iter().filter(|r| !r.well_formed).map(|r| {
                    Finding::new(&r.anchor, "malformed", format!("{}: {}", r.row, r.state))
                }),
            );
            let expansion = protocols::expansion_report()?;
            f.extend(expansion.iter().filter(|e| !e.consistent).map(|e| {
                let mut d = format!(
                    "{}: {} printed as {}",
                    e.group, e.combination, e.printed_state
                );
                if let Some(r) = &e.repeats {
                    d.push_str(&format!(", repeats {r}"));
                }
                Finding::new(&e.anchor, "expansion", d)
            }));
            let comps = protocols::teleport2_component_report()?;
            f.extend(family_findings(&comps));
            json!({
                "malformed_rows": table.malformed,
                "printed_rows": table.rows,
                "expansion": expansion,
                "components": comps,
            })
        }
        Protocol::Teleport3 => {
            let a1 = protocols::appendix1_family()?;
            f.extend(family_findings(&a1.flagged));
            json!({ "appendix1": a1 })
        }
        Protocol::Qss1 | Protocol::Qss2 => {
            let prefix = format!("{} ", p.name());
            let rows: Vec<_> = protocols::qss_family_report()?
                .into_iter()
                .filter(|m| m.label.starts_with(&prefix))
                .collect();
            f.extend(family_findings(&rows));
            json!({ "families": rows })
        }
        Protocol::Qss3 => {
            let rows: Vec<_> = protocols::qss_family_report()?
                .into_iter()
                .filter(|m| m.label.starts_with("qss3 "))
                .collect();
            f.extend(family_findings(&rows));
            let bc = protocols::bc_ordering_search()?;
            if !bc.candidates.iter().any(|c| c.bell_correctable) {
                f.push(Finding::new(
                    "qss3.txt BC",
                    "reading",
                    format!(
                        "none of {} orderings/conventions leaves the last party Pauli-correctable after a Bell measurement",
                        bc.candidates.len()
                    ),
                ));
            }
            if !bc.adopted.c_table_match {
                f.push(Finding::new(
                    "qss3.txt C",
                    "c-table",
                    "adopted reading does not reproduce the C table",
                ));
            }
            json!({ "families": rows, "bc_ordering": bc })
        }
    };
    Ok((body, f))
}

fn verify_section(ctx: &Ctx, p: Protocol) -> Result<Section> {
    let (derived_spec, printed_spec) = p.specs()?;
    let derived = verify(&derived_spec, ctx.trials, ctx.seed, &ctx.tol)?;
    let printed = verify(&printed_spec, ctx.trials, ctx.seed, &ctx.tol)?;
    let mut findings = diff_findings(row_anchors(p, &derived.anchor)?, &derived.diffs);
    findings.extend(printed_run_finding(&printed));
    let (extras, more) = protocol_extras(p, &ctx.tol)?;
    findings.extend(more);
    let body = json!({ "derived": derived, "printed": printed, "artifacts": extras });
    Ok(Section::new(
        format!("verify {}", p.name()),
        !derived.pass,
        findings,
        body,
    ))
}

pub fn verify_protocol(ctx: &Ctx, p: Protocol) -> Result<Report> {
    Ok(Report::new(
        ctx,
        format!("verify {}", p.name()),
        vec![verify_section(ctx, p)?],
    ))
}

pub fn derive_corrections(ctx: &Ctx, p: Protocol) -> Result<Report> {
    let (spec, _) = p.specs()?;
    let table = corrections_for(&spec, &ctx.tol)?;
    let diffs = spec
        .paper_table
        .as_ref()
        .map(|t| compare_tables(t, &table))
        .unwrap_or_default();
    let findings = diff_findings(row_anchors(p, &spec.anchor)?, &diffs);
    let failed = !table.uncorrectable.is_empty();
    let body = json!({ "anchor": spec.anchor, "table": table, "diffs": diffs });
    let section = Section::new(
        format!("derive corrections {}", p.name()),
        failed,
        findings,
        body,
    );
    Ok(Report::new(
        ctx,
        format!("derive corrections {}", p.name()),
        vec![section],
    ))
}

pub fn check_basis(ctx: &Ctx, name: BasisName) -> Result<Report> {
    let (basis, printed) = name.load()?;
    let (body, findings) = basis_findings(&basis, &name.name(), &ctx.tol);
    // a derived family with defects is an engine failure, not a typo
    let failed = !printed && !findings.is_empty();
    let section = Section::new(
        format!("check basis {}", name.name()),
        failed,
        findings,
        body,
    );
    Ok(Report::new(
        ctx,
        format!("check basis {}", name.name()),
        vec![section],
    ))
}

fn operators_section() -> Result<Section> {
    let ops = protocols::operator_table_report()?;
    let findings = ops
        .iter()
        .filter(|o| o.status != protocols::OperatorStatus::Match)
        .map(|o| {
            let detail = match &o.phase {
                Some(ph) => format!("{} differs from the standard matrix by phase {ph}", o.name),
                None => format!("{} differs from the standard matrix", o.name),
            };
            Ok(Finding::new(&o.anchor, &kebab(&o.status)?, detail))
        })
        .collect::<Result<Vec<_>>>()?;
    let failed = ops
        .iter()
        .any(|o| o.status == protocols::OperatorStatus::Mismatch);
    Ok(Section::new(
        "operators",
        failed,
        findings,
        serde_json::to_value(&ops)?,
    ))
}

fn appendix2_section(ctx: &Ctx) -> Result<Section> {
    let inputs = (0..APPENDIX2_DRAWS)
        .map(|t| trial_input(3, ctx.seed, t))
        .collect::<qtv_core::Result<Vec<_>>>()?;
    let residuals = inputs
        .iter()
        .map(|s| protocols::appendix2_check(std::slice::from_ref(s)))
        .collect::<qtv_core::Result<Vec<_>>>()?;
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let body = json!({ "draws": APPENDIX2_DRAWS, "max_residual": max, "residuals": residuals });
    Ok(Section::new(
        "appendix2",
        max > ctx.tol.fidelity,
        Vec::new(),
        body,
    ))
}

pub fn appendix2(ctx: &Ctx) -> Result<Report> {
    Ok(Report::new(ctx, "appendix2", vec![appendix2_section(ctx)?]))
}

fn entanglement_section(ctx: &Ctx, state: &StateVector, is_channel: bool) -> Result<Section> {
    ensure!(
        state.is_normalized(ctx.tol.orthonormality),
        "state has norm {}, expected 1",
        state.norm()
    );
    let cuts = bipartition_report(state, &ctx.tol)?;
    let summary = entanglement_summary(&cuts);
    let cross = cuts
        .iter()
        .map(|c| entropy_cross_check(state, &c.subset, &ctx.tol))
        .collect::<qtv_core::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut failed = cross > ctx.tol.fidelity;
    let mut findings = Vec::new();
    if is_channel {
        for (k, s) in &summary.0 {
            if s.min < *k as f64 - ctx.tol.fidelity {
                // single-qubit cuts below one bit mean the channel itself is wrong
                failed |= *k == 1;
                findings.push(Finding::new(
                    "channel",
                    "not-maximal",
                    format!(
                        "size-{k} cuts: min {:.9} bits, {} of {} maximally mixed",
                        s.min, s.maximally_mixed_count, s.cuts
                    ),
                ));
            }
        }
    }
    let body = json!({ "summary": summary, "cross_check_max_deviation": cross, "cuts": cuts });
    Ok(Section::new("entanglement", failed, findings, body))
}

pub fn entanglement(ctx: &Ctx, state_file: Option<&str>) -> Result<Report> {
    let section = match state_file {
        Some(text) => entanglement_section(ctx, &parse_state::<f64>(text)?, false)?,
        None => entanglement_section(ctx, &reconstruct_channel()?.channel, true)?,
    };
    Ok(Report::new(ctx, "entanglement", vec![section]))
}

fn synth_section(ctx: &Ctx, target: &StateVector, budget: Option<usize>) -> Result<Section> {
    let circuit = synth_prep_circuit(target)?;
    let fidelity = simulate::<f64>(&circuit)?.fidelity(target)?;
    let over = budget.is_some_and(|b| circuit.gate_count() > b);
    let body = json!({
        "n_qubits": circuit.n_qubits,
        "gate_count": circuit.gate_count(),
        "gate_budget": budget,
        "fidelity": fidelity,
        "circuit": circuit.to_string().lines().collect::<Vec<_>>(),
    });
    Ok(Section::new(
        "synth",
        fidelity < 1.0 - ctx.tol.fidelity || over,
        Vec::new(),
        body,
    ))
}

pub fn synth(ctx: &Ctx, state_file: &str) -> Result<Report> {
    let target = parse_state::<f64>(state_file)?;
    Ok(Report::new(
        ctx,
        "synth",
        vec![synth_section(ctx, &target, None)?],
    ))
}

/// Channel, the six protocols, operators, completeness, entanglement and
/// synthesis, in that order.
pub fn all(ctx: &Ctx) -> Result<Report> {
    let (channel, ch) = channel_section(ctx)?;
    let mut sections = vec![channel];
    for p in Protocol::ALL {
        sections.push(verify_section(ctx, p)?);
    }
    sections.push(operators_section()?);
    sections.push(appendix2_section(ctx)?);
    sections.push(entanglement_section(ctx, &ch, true)?);
    sections.push(synth_section(ctx, &ch, Some(CHANNEL_GATE_BUDGET))?);
    sections.push(Section::new(
        "data",
        false,
        Vec::new(),
        json!({ "checksum": protocols::data_checksum() }),
    ));
    Ok(Report::new(ctx, "all", sections))
}
