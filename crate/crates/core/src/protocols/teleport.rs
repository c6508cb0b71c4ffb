use std::collections::BTreeMap;

use serde::Serialize;

use super::{anchor, data, FamilyMatch};
use crate::channel::{ghz, xwz_channel, BellConvention, GhzIndex};
use crate::config::Tolerances;
use crate::engine::{
    conditioned_components, pauli_frame_vectors, CorrectionTable, MeasurementBasis, ProtocolSpec,
    QubitPartition, Stage,
};
use crate::ket::{KetExpr, PmBranch};
use crate::linalg::C64;
use crate::{Error, LocalOperatorWord, Result, StateVector};

/// Input symbols of the two-qubit protocol with the input ket each one
/// multiplies, in printed order.
pub(crate) const TELEPORT2_SYMBOLS: [(&str, usize); 4] =
    [("α", 0b00), ("μ", 0b10), ("γ", 0b01), ("β", 0b11)];

/// Component letter → the input ket its printed kets start with.
const TELEPORT2_LETTERS: [(char, usize); 4] = [('A', 0b00), ('B', 0b10), ('C', 0b01), ('D', 0b11)];

fn pm_label(key: &str, pm: PmBranch) -> String {
    key.replace('±', pm.suffix())
}

/// Printed ξ±, ν± on (unknown, channel 1-6), normalized on ingest.
pub fn basis_teleport1() -> Result<MeasurementBasis> {
    let mut els = Vec::new();
    for e in data("teleport1.txt")? {
        let expr = KetExpr::parse(&e.value)?;
        for pm in PmBranch::BOTH {
            let v = expr.evaluate(pm, &BellConvention::default())?.plain()?;
            els.push((pm_label(&e.key, pm), v));
        }
    }
    MeasurementBasis::new("teleport1 printed", (0..7).collect(), els)
}

/// Labels each derived vector with the printed element it overlaps most,
/// falling back to the word when two derived vectors pick the same one.
fn label_by_overlap(
    derived: &[(LocalOperatorWord, StateVector)],
    printed: &MeasurementBasis,
) -> Result<Vec<String>> {
    let mut labels = Vec::with_capacity(derived.len());
    for (_, v) in derived {
        let v = v.normalized()?;
        let mut best = (0.0, String::new());
        for e in printed.elements() {
            let f = e.probe.fidelity(&v)?;
            if f > best.0 {
                best = (f, e.label.clone());
            }
        }
        labels.push(best.1);
    }
    let mut sorted = labels.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != labels.len() || labels.iter().any(String::is_empty) {
        return Ok(derived.iter().map(|(w, _)| w.table_notation()).collect());
    }
    Ok(labels)
}

/// Channel-derived replacement for ξ±, ν±: one element per real Pauli word,
/// labeled by the printed element it reproduces.
pub fn basis_teleport1_derived() -> Result<MeasurementBasis> {
    let vecs = pauli_frame_vectors(&xwz_channel()?, &[6])?;
    let labels = label_by_overlap(&vecs, &basis_teleport1()?)?;
    let els = labels
        .into_iter()
        .zip(vecs)
        .map(|(l, (_, v))| (l, v))
        .collect();
    MeasurementBasis::new("teleport1 derived", (0..7).collect(), els)
}

fn teleport1_partition() -> Result<QubitPartition> {
    QubitPartition::new([
        ("unknown", vec![0]),
        ("alice", (1..7).collect()),
        ("bob", vec![7]),
    ])
}

pub fn spec_teleport1() -> Result<ProtocolSpec> {
    Ok(ProtocolSpec::new(
        "teleport1",
        xwz_channel()?,
        teleport1_partition()?,
        vec![Stage::fixed("alice", basis_teleport1_derived()?)],
        "bob",
    )?
    .with_anchor("teleport1.txt")
    .with_note("basis derived from the channel; see teleport1 term diffs for the printed signs"))
}

pub fn spec_teleport1_printed() -> Result<ProtocolSpec> {
    Ok(ProtocolSpec::new(
        "teleport1-printed",
        xwz_channel()?,
        teleport1_partition()?,
        vec![Stage::fixed("alice", basis_teleport1()?)],
        "bob",
    )?
    .with_anchor("teleport1.txt"))
}

/// A printed term whose sign disagrees with the derived element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermDiff {
    pub element: String,
    pub anchor: String,
    pub term: String,
    pub printed: i8,
    pub derived: i8,
}

/// Coefficients of a 7-qubit vector in the `|abcd⟩|GHZk⟩` product basis.
fn ghz_product_coeffs(v: &StateVector) -> Result<Vec<(String, C64)>> {
    let mut out = Vec::new();
    for p in 0..16usize {
        for g in GhzIndex::ALL {
            let probe = StateVector::basis(4, p)?.tensor(&ghz(g))?;
            let c = probe.inner(v)?;
            out.push((format!("|{p:04b}⟩|GHZ{}⟩", g.value()), c));
        }
    }
    Ok(out)
}

/// Term-by-term sign comparison of printed ξ±, ν± against the derived basis.
pub fn teleport1_term_diffs() -> Result<Vec<TermDiff>> {
    let printed = basis_teleport1()?;
    let derived = basis_teleport1_derived()?;
    let anchors: BTreeMap<String, String> = data("teleport1.txt")?
        .iter()
        .map(|e| (e.key.clone(), anchor("teleport1.txt", e)))
        .collect();
    let mut out = Vec::new();
    for p in printed.elements() {
        let Some(d) = derived.element(&p.label) else {
            continue;
        };
        let phase = d.probe.inner(&p.probe)?;
        let align = if phase.re < 0.0 { -1.0 } else { 1.0 };
        let pc = ghz_product_coeffs(&p.probe)?;
        let dc = ghz_product_coeffs(&d.probe)?;
        let scale = pc.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        let dscale = dc.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        for ((term, a), (_, b)) in pc.iter().zip(&dc) {
            let sa = (a.re / scale).round() as i8;
            let sb = (align * b.re / dscale).round() as i8;
            if sa != sb {
                let key = p.label.replace(['+', '-'], "±");
                out.push(TermDiff {
                    element: p.label.clone(),
                    anchor: anchors.get(&key).cloned().unwrap_or_default(),
                    term: term.clone(),
                    printed: sa,
                    derived: sb,
                });
            }
        }
    }
    Ok(out)
}

/// Bob-state string for a real matrix that permutes the input kets up to
/// signs, e.g. `α|00⟩+μ|10⟩+γ|01⟩+β|11⟩`; the overall sign is fixed so the
/// first term is positive.
pub(crate) fn signed_perm_string(
    m: &[Vec<C64>],
    symbols: &[(&str, usize)],
    n: usize,
    eps: f64,
) -> Option<String> {
    let mut terms = Vec::new();
    for (sym, x) in symbols {
        let col: Vec<(usize, C64)> = (0..m.len())
            .filter(|&y| m[y][*x].norm() > eps)
            .map(|y| (y, m[y][*x]))
            .collect();
        let [(y, c)] = col[..] else {
            return None;
        };
        terms.push((c, format!("{sym}|{y:0n$b}⟩")));
    }
    let (c0, _) = terms[0];
    let mag = c0.norm();
    let mut out = String::new();
    for (i, (c, t)) in terms.iter().enumerate() {
        let r = c / c0;
        if (r.norm() - 1.0).abs() > 1e-9 || r.im.abs() > 1e-9 || (c.norm() - mag).abs() > eps {
            return None;
        }
        if r.re < 0.0 {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        out.push_str(t);
    }
    Some(out)
}

fn teleport2_partition() -> Result<QubitPartition> {
    QubitPartition::new([
        ("unknown", vec![0, 1]),
        ("alice", (2..7).collect()),
        ("bob", vec![7, 8]),
    ])
}

/// Derived two-qubit basis: elements labeled by the state Bob receives.
fn basis_teleport2_derived() -> Result<MeasurementBasis> {
    let vecs = pauli_frame_vectors(&xwz_channel()?, &[5, 6])?;
    let mut els = Vec::new();
    for (w, v) in vecs {
        let label = signed_perm_string(&w.matrix::<f64>(), &TELEPORT2_SYMBOLS, 2, 1e-12)
            .ok_or_else(|| Error::Precondition(format!("{w} is not a signed permutation")))?;
        els.push((label, v));
    }
    MeasurementBasis::new("teleport2 derived", (0..7).collect(), els)
}

/// Printed A/B/C/D components keyed as printed (`A00` ...).
fn teleport2_components() -> Result<Vec<(String, String, StateVector)>> {
    data("teleport2.txt")?
        .iter()
        .map(|e| {
            Ok((
                e.key.clone(),
                anchor("teleport2.txt", e),
                KetExpr::parse(&e.value)?.plain()?,
            ))
        })
        .collect()
}

/// `|x⟩ ⊗ eta_y` for a component key such as `C01`.
fn teleport2_component_derived(key: &str) -> Result<StateVector> {
    let mut chars = key.chars();
    let letter = chars.next().unwrap_or(' ');
    let x = TELEPORT2_LETTERS
        .iter()
        .find(|(l, _)| *l == letter)
        .map(|(_, x)| *x)
        .ok_or_else(|| Error::Precondition(format!("bad component {key}")))?;
    let y = usize::from_str_radix(chars.as_str(), 2)
        .map_err(|_| Error::Precondition(format!("bad component {key}")))?;
    let etas = conditioned_components(&xwz_channel()?, &[5, 6])?;
    StateVector::basis(2, x)?.tensor(&etas[y])
}

/// Printed components against `|x⟩ ⊗ eta_y`.
pub fn teleport2_component_report() -> Result<Vec<FamilyMatch>> {
    teleport2_components()?
        .into_iter()
        .map(|(key, anchor, v)| {
            let d = teleport2_component_derived(&key)?.normalized()?;
            let ov = d.inner(&v.normalized()?)?.norm();
            Ok(FamilyMatch::single(key.clone(), anchor, v.norm(), key, ov))
        })
        .collect()
}

/// Evaluates `A01+B11-C00-D01` over a component lookup.
fn combination(expr: &str, lookup: &dyn Fn(&str) -> Result<StateVector>) -> Result<StateVector> {
    let mut acc: Option<StateVector> = None;
    let mut sign = 1.0;
    let mut name = String::new();
    let flush = |acc: &mut Option<StateVector>, name: &mut String, sign: f64| -> Result<()> {
        if name.is_empty() {
            return Ok(());
        }
        let v = lookup(name)?.scaled(C64::new(sign, 0.0));
        *acc = Some(match acc.take() {
            Some(a) => a.axpy(C64::new(1.0, 0.0), &v)?,
            None => v,
        });
        name.clear();
        Ok(())
    };
    for c in expr.chars().filter(|c| !c.is_whitespace()) {
        match c {
            '+' | '-' | '−' => {
                flush(&mut acc, &mut name, sign)?;
                sign = if c == '+' { 1.0 } else { -1.0 };
            }
            c => name.push(c),
        }
    }
    flush(&mut acc, &mut name, sign)?;
    acc.ok_or_else(|| Error::Precondition(format!("empty combination {expr:?}")))
}

/// Printed measurement: the sixteen component groupings.
fn basis_teleport2_printed() -> Result<MeasurementBasis> {
    let comps = teleport2_components()?;
    let lookup = |k: &str| -> Result<StateVector> {
        comps
            .iter()
            .find(|(key, _, _)| key == k)
            .map(|(_, _, v)| v.clone())
            .ok_or_else(|| Error::Precondition(format!("no component {k}")))
    };
    let mut els = Vec::new();
    for e in data("teleport2_expansion.txt")? {
        let f = e.fields();
        els.push((e.key.clone(), combination(f[0], &lookup)?));
    }
    MeasurementBasis::new("teleport2 printed", (0..7).collect(), els)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedRow {
    pub row: String,
    pub anchor: String,
    pub state: String,
    pub word: String,
    pub well_formed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedTable {
    pub table: CorrectionTable,
    pub rows: Vec<PrintedRow>,
    pub malformed: usize,
}

/// Matrix (Bob ket × input ket) of a printed Bob state over α, μ, γ, β.
fn state_matrix(state: &str) -> Result<Vec<Vec<C64>>> {
    let v = KetExpr::parse(state)?.evaluate(PmBranch::Plus, &BellConvention::default())?;
    let mut m = vec![vec![C64::new(0.0, 0.0); 4]; 4];
    for (sym, x) in TELEPORT2_SYMBOLS {
        let part = v.part(sym)?;
        for (y, row) in m.iter_mut().enumerate() {
            row[x] = part.amp(y);
        }
    }
    Ok(m)
}

/// The printed correction table with a well-formedness scan of each
/// printed Bob state.
pub fn paper_table_teleport2() -> Result<PrintedTable> {
    let mut table = CorrectionTable::default();
    let mut rows = Vec::new();
    for e in data("teleport2_table.txt")? {
        let f = e.fields();
        let (state, word) = (f[0].to_string(), f[1].to_string());
        let m = state_matrix(&state)?;
        let mut seen: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (sym, x) in TELEPORT2_SYMBOLS {
            for (y, row) in m.iter().enumerate() {
                if row[x].norm() > 0.0 {
                    seen.entry(y).or_default().push(sym);
                }
            }
        }
        let dup: Vec<String> = seen
            .iter()
            .filter(|(_, s)| s.len() > 1)
            .map(|(y, s)| format!("|{y:02b}⟩ carries {}", s.join(" and ")))
            .collect();
        let well_formed = dup.is_empty();
        let note = if !well_formed {
            Some(format!("duplicated ket: {}", dup.join("; ")))
        } else if signed_perm_string(&m, &TELEPORT2_SYMBOLS, 2, 1e-12).is_some()
            && !is_pauli_image(&m)
        {
            Some("not a Pauli image of the input".to_string())
        } else {
            None
        };
        let w: LocalOperatorWord = word.parse()?;
        table.insert(state.clone(), w)?;
        if let Some(n) = &note {
            table.annotate(state.clone(), n.clone());
        }
        rows.push(PrintedRow {
            row: e.key.clone(),
            anchor: anchor("teleport2_table.txt", &e),
            state,
            word,
            well_formed,
            note,
        });
    }
    let malformed = rows.iter().filter(|r| !r.well_formed).count();
    Ok(PrintedTable {
        table,
        rows,
        malformed,
    })
}

/// True when `m` equals some two-qubit Pauli word up to a phase.
fn is_pauli_image(m: &[Vec<C64>]) -> bool {
    LocalOperatorWord::pauli_words(2).iter().any(|w| {
        let p = w.matrix::<f64>();
        let mut ip = C64::new(0.0, 0.0);
        let mut nm = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                ip += p[r][c].conj() * m[r][c];
                nm += m[r][c].norm_sqr();
            }
        }
        (ip.norm() - 2.0 * nm.sqrt()).abs() < 1e-9
    })
}

pub fn spec_teleport2() -> Result<ProtocolSpec> {
    Ok(ProtocolSpec::new(
        "teleport2",
        xwz_channel()?,
        teleport2_partition()?,
        vec![Stage::fixed("alice", basis_teleport2_derived()?)],
        "bob",
    )?
    .with_anchor("teleport2_table.txt")
    .with_paper_table(paper_table_teleport2()?.table))
}

pub fn spec_teleport2_printed() -> Result<ProtocolSpec> {
    Ok(ProtocolSpec::new(
        "teleport2-printed",
        xwz_channel()?,
        teleport2_partition()?,
        vec![Stage::fixed("alice", basis_teleport2_printed()?)],
        "bob",
    )?
    .with_anchor("teleport2_expansion.txt"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionRow {
    pub group: String,
    pub anchor: String,
    pub combination: String,
    pub printed_state: String,
    /// Bob state the combination actually leaves, when it is a signed
    /// permutation of the input.
    pub derived_state: Option<String>,
    pub consistent: bool,
    /// Earlier group with the same combination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<String>,
}

/// Checks each printed grouping against the Bob state its combination of
/// (channel-derived) components produces.
pub fn expansion_report() -> Result<Vec<ExpansionRow>> {
    let ch = xwz_channel()?;
    let tol = Tolerances::default();
    let mut out: Vec<ExpansionRow> = Vec::new();
    for e in data("teleport2_expansion.txt")? {
        let f = e.fields();
        let (comb, printed) = (f[0].to_string(), f[1].to_string());
        let probe = combination(&comb, &|k| teleport2_component_derived(k))?.normalized()?;
        let mut m = vec![vec![C64::new(0.0, 0.0); 4]; 4];
        for x in 0..4 {
            let st = StateVector::basis(2, x)?.tensor(&ch)?;
            let r = st.contract(&probe, &(0..7).collect::<Vec<_>>())?;
            for (y, row) in m.iter_mut().enumerate() {
                row[x] = r.amp(y);
            }
        }
        let derived = signed_perm_string(&m, &TELEPORT2_SYMBOLS, 2, tol.rank);
        let repeats = out
            .iter()
            .find(|r| r.combination == comb)
            .map(|r| r.group.clone());
        out.push(ExpansionRow {
            group: e.key.clone(),
            anchor: anchor("teleport2_expansion.txt", &e),
            consistent: derived.as_deref() == Some(printed.as_str()),
            combination: comb,
            printed_state: printed,
            derived_state: derived,
            repeats,
        });
    }
    Ok(out)
}

fn teleport3_partition() -> Result<QubitPartition> {
    QubitPartition::new([
        ("unknown", vec![0, 1, 2]),
        ("alice", (3..7).collect()),
        ("bob", vec![7, 8, 9]),
    ])
}

pub fn spec_teleport3() -> Result<ProtocolSpec> {
    Ok(ProtocolSpec::new(
        "teleport3",
        xwz_channel()?,
        teleport3_partition()?,
        vec![Stage::fixed("alice", super::basis_teleport3_derived()?)],
        "bob",
    )?
    .with_anchor("channel_family.txt")
    .with_note(
        "Bob holds channel qubits 5-7; the three-qubit receiver kets need a three-qubit receiver",
    ))
}

pub fn spec_teleport3_printed() -> Result<ProtocolSpec> {
    Ok(ProtocolSpec::new(
        "teleport3-printed",
        xwz_channel()?,
        teleport3_partition()?,
        vec![Stage::fixed("alice", super::basis_teleport3_printed()?)],
        "bob",
    )?
    .with_anchor("channel_family.txt"))
}
