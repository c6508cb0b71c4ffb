use std::collections::BTreeMap;

use serde::Serialize;

use super::basis::MeasurementBasis;
use super::correction::{
    aligning_phase, compare_tables, CorrectionTable, TableDiff, MAX_CORRECTION_ARITY,
};
use crate::config::Tolerances;
use crate::{Error, LocalOperatorWord, Result, StateVector};

pub const UNKNOWN_ROLE: &str = "unknown";

/// Seed for the random member of the default probe set.
pub const PROBE_SEED: u64 = 0x5eed;

/// Role name → ordered global qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPartition {
    roles: BTreeMap<String, Vec<usize>>,
    n_qubits: usize,
}

impl QubitPartition {
    pub fn new<S: Into<String>>(roles: impl IntoIterator<Item = (S, Vec<usize>)>) -> Result<Self> {
        let roles: BTreeMap<String, Vec<usize>> =
            roles.into_iter().map(|(k, v)| (k.into(), v)).collect();
        let mut seen: Vec<usize> = roles.values().flatten().copied().collect();
        seen.sort_unstable();
        let n = seen.len();
        if seen.iter().enumerate().any(|(i, &q)| i != q) {
            return Err(Error::Spec(format!(
                "partition must cover 0..{n} exactly once, got {seen:?}"
            )));
        }
        Ok(Self { roles, n_qubits: n })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn role(&self, name: &str) -> Result<&[usize]> {
        self.roles
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Spec(format!("no role named {name:?}")))
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.roles.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StageBasis {
    Fixed(MeasurementBasis),
    /// Basis chosen by the labels of all earlier stages; a prefix without an
    /// entry is an unlisted path and contributes nothing to coverage.
    PerOutcome(BTreeMap<Vec<String>, MeasurementBasis>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub role: String,
    pub basis: StageBasis,
}

impl Stage {
    pub fn fixed(role: impl Into<String>, basis: MeasurementBasis) -> Self {
        Self {
            role: role.into(),
            basis: StageBasis::Fixed(basis),
        }
    }

    pub fn per_outcome(
        role: impl Into<String>,
        bases: BTreeMap<Vec<String>, MeasurementBasis>,
    ) -> Self {
        Self {
            role: role.into(),
            basis: StageBasis::PerOutcome(bases),
        }
    }

    pub fn basis_for(&self, prefix: &[String]) -> Option<&MeasurementBasis> {
        match &self.basis {
            StageBasis::Fixed(b) => Some(b),
            StageBasis::PerOutcome(m) => m.get(prefix),
        }
    }

    fn bases(&self) -> Vec<&MeasurementBasis> {
        match &self.basis {
            StageBasis::Fixed(b) => vec![b],
            StageBasis::PerOutcome(m) => m.values().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub id: String,
    /// Where the protocol's data lives, for reports.
    pub anchor: String,
    pub channel: StateVector,
    pub partition: QubitPartition,
    pub stages: Vec<Stage>,
    pub paper_table: Option<CorrectionTable>,
    /// Supplied corrections; derived from probes when absent.
    pub corrections: Option<CorrectionTable>,
    pub receiver_role: String,
    pub expected_coverage: f64,
    pub notes: Vec<String>,
}

impl ProtocolSpec {
    pub fn new(
        id: impl Into<String>,
        channel: StateVector,
        partition: QubitPartition,
        stages: Vec<Stage>,
        receiver_role: impl Into<String>,
    ) -> Result<Self> {
        let spec = Self {
            id: id.into(),
            anchor: String::new(),
            channel,
            partition,
            stages,
            paper_table: None,
            corrections: None,
            receiver_role: receiver_role.into(),
            expected_coverage: 1.0,
            notes: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_anchor(mut self, anchor: impl Into<String>) -> Self {
        self.anchor = anchor.into();
        self
    }

    pub fn with_paper_table(mut self, table: CorrectionTable) -> Self {
        self.paper_table = Some(table);
        self
    }

    pub fn with_corrections(mut self, table: CorrectionTable) -> Self {
        self.corrections = Some(table);
        self
    }

    pub fn with_expected_coverage(mut self, c: f64) -> Self {
        self.expected_coverage = c;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn unknown_qubits(&self) -> &[usize] {
        self.partition.role(UNKNOWN_ROLE).unwrap_or(&[])
    }

    pub fn unknown_arity(&self) -> usize {
        self.unknown_qubits().len()
    }

    pub fn receiver_qubits(&self) -> Result<&[usize]> {
        self.partition.role(&self.receiver_role)
    }

    pub fn validate(&self) -> Result<()> {
        let spec_err = |m: String| Err(Error::Spec(format!("{}: {m}", self.id)));
        let unknown = self.partition.role(UNKNOWN_ROLE)?;
        let u = unknown.len();
        if unknown.iter().enumerate().any(|(i, &q)| i != q) || u == 0 {
            return spec_err(format!("unknown role must be 0..{u}, got {unknown:?}"));
        }
        if self.partition.n_qubits() != u + self.channel.n_qubits() {
            return spec_err(format!(
                "partition covers {} qubits, input plus channel has {}",
                self.partition.n_qubits(),
                u + self.channel.n_qubits()
            ));
        }
        let receiver = self.receiver_qubits()?;
        if receiver.is_empty() || receiver.len() > MAX_CORRECTION_ARITY {
            return spec_err(format!("receiver arity {} out of range", receiver.len()));
        }
        let mut measured: Vec<usize> = Vec::new();
        for (i, stage) in self.stages.iter().enumerate() {
            let role = self.partition.role(&stage.role)?;
            let bases = stage.bases();
            let Some(first) = bases.first() else {
                return spec_err(format!("stage {i} has no basis"));
            };
            for b in &bases {
                if b.subset() != first.subset() {
                    return spec_err(format!("stage {i} bases disagree on their subset"));
                }
                if let Some(q) = b
                    .subset()
                    .iter()
                    .find(|q| !role.contains(q) && !unknown.contains(q))
                {
                    return spec_err(format!(
                        "stage {i} measures qubit {q}, outside role {:?} and the input",
                        stage.role
                    ));
                }
            }
            for q in first.subset() {
                if measured.contains(q) || receiver.contains(q) {
                    return spec_err(format!("stage {i} re-measures qubit {q}"));
                }
                measured.push(*q);
            }
        }
        Ok(())
    }

    /// Structural checks plus: the stages and the receiver account for
    /// every qubit. Only complete specs can be run end to end.
    pub fn validate_complete(&self) -> Result<()> {
        self.validate()?;
        let measured: usize = self
            .stages
            .iter()
            .filter_map(|s| s.bases().first().map(|b| b.subset().len()))
            .sum();
        if measured + self.receiver_qubits()?.len() != self.partition.n_qubits() {
            return Err(Error::Spec(format!(
                "{}: stages plus receiver do not account for every qubit",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord {
    pub labels: Vec<String>,
    pub probability: f64,
    /// Normalized residual, or a flagged placeholder for a zero-probability
    /// outcome.
    pub residual: StateVector,
    pub correction: Option<LocalOperatorWord>,
    pub fidelity_after: Option<f64>,
}

impl OutcomeRecord {
    pub fn key(&self) -> String {
        outcome_key(&self.labels)
    }

    pub fn is_zero(&self) -> bool {
        self.residual.is_placeholder()
    }
}

/// Table key for a path.
pub fn outcome_key(labels: &[String]) -> String {
    labels.join(" / ")
}

/// Projects `state` onto every element of `basis` (subset in the state's own
/// qubit numbering).
pub fn enumerate_outcomes(
    state: &StateVector,
    basis: &MeasurementBasis,
    tol: &Tolerances,
) -> Result<Vec<OutcomeRecord>> {
    basis
        .elements()
        .iter()
        .map(|e| {
            let p = state.project_subset_with(&e.probe, basis.subset(), tol)?;
            Ok(OutcomeRecord {
                labels: vec![e.label.clone()],
                probability: p.probability,
                residual: p.residual,
                correction: None,
                fidelity_after: None,
            })
        })
        .collect()
}

/// Every listed full-depth path for one input; residuals are on the
/// receiver's qubits in role order.
pub fn outcome_paths(
    spec: &ProtocolSpec,
    input: &StateVector,
    tol: &Tolerances,
) -> Result<Vec<OutcomeRecord>> {
    if input.n_qubits() != spec.unknown_arity() {
        return Err(Error::Dimension(input.n_qubits(), spec.unknown_arity()));
    }
    spec.validate_complete()?;
    let state = input.tensor(&spec.channel)?;
    let remaining: Vec<usize> = (0..state.n_qubits()).collect();
    let mut out = Vec::new();
    walk(spec, tol, Vec::new(), 1.0, state, remaining, &mut out)?;
    Ok(out)
}

pub(crate) fn local_positions(remaining: &[usize], globals: &[usize]) -> Result<Vec<usize>> {
    globals
        .iter()
        .map(|g| {
            remaining
                .iter()
                .position(|r| r == g)
                .ok_or_else(|| Error::Spec(format!("qubit {g} already measured")))
        })
        .collect()
}

fn walk(
    spec: &ProtocolSpec,
    tol: &Tolerances,
    labels: Vec<String>,
    probability: f64,
    state: StateVector,
    remaining: Vec<usize>,
    out: &mut Vec<OutcomeRecord>,
) -> Result<()> {
    let depth = labels.len();
    if depth == spec.stages.len() {
        let order = local_positions(&remaining, spec.receiver_qubits()?)?;
        let residual = if state.is_placeholder() {
            state
        } else {
            state.reorder(&order)?
        };
        out.push(OutcomeRecord {
            labels,
            probability,
            residual,
            correction: None,
            fidelity_after: None,
        });
        return Ok(());
    }
    let Some(basis) = spec.stages[depth].basis_for(&labels) else {
        return Ok(());
    };
    let local = local_positions(&remaining, basis.subset())?;
    let rest: Vec<usize> = remaining
        .iter()
        .copied()
        .filter(|q| !basis.subset().contains(q))
        .collect();
    for e in basis.elements() {
        let p = state.project_subset_with(&e.probe, &local, tol)?;
        let mut next = labels.clone();
        next.push(e.label.clone());
        let prob = if p.is_zero() {
            0.0
        } else {
            probability * p.probability
        };
        walk(spec, tol, next, prob, p.residual, rest.clone(), out)?;
    }
    Ok(())
}

/// `|0...0>`, `|1...1>`, the uniform superposition and one seeded random state.
pub fn default_probes(n_qubits: usize, seed: u64) -> Result<Vec<StateVector>> {
    let d = 1usize << n_qubits;
    let h = 1.0 / (d as f64).sqrt();
    Ok(vec![
        StateVector::basis(n_qubits, 0)?,
        StateVector::basis(n_qubits, d - 1)?,
        StateVector::from_real(n_qubits, &vec![h; d])?,
        StateVector::random(n_qubits, seed)?,
    ])
}

/// Corrections that work for every probe at once. Rows whose residual no
/// single Pauli word maps back to every probe are marked uncorrectable.
pub fn derive_correction_table(
    spec: &ProtocolSpec,
    probes: &[StateVector],
    tol: &Tolerances,
) -> Result<CorrectionTable> {
    if probes.len() < 2 {
        return Err(Error::Precondition(format!(
            "correction derivation needs at least 2 probes, got {}",
            probes.len()
        )));
    }
    let runs = probes
        .iter()
        .map(|p| outcome_paths(spec, p, tol))
        .collect::<Result<Vec<_>>>()?;
    let k = spec.receiver_qubits()?.len();
    let targets: Vec<usize> = (0..k).collect();
    let words = LocalOperatorWord::pauli_words(k);
    let mut table = CorrectionTable::default();
    for (i, rec) in runs[0].iter().enumerate() {
        let key = rec.key();
        let live: Vec<(&StateVector, &StateVector)> = runs
            .iter()
            .zip(probes)
            .map(|(run, probe)| (probe, &run[i]))
            .filter(|(_, r)| !r.is_zero())
            .map(|(p, r)| (p, &r.residual))
            .collect();
        let Some(&(p0, r0)) = live.first() else {
            table.annotate(key, "zero probability for every probe");
            continue;
        };
        let mut found = None;
        for w in &words {
            let mut ok = true;
            for (p, r) in &live {
                if r.apply_word(w, &targets)?.fidelity(p)? < 1.0 - tol.fidelity {
                    ok = false;
                    break;
                }
            }
            if ok {
                let z = p0.inner(&r0.apply_word(w, &targets)?)?;
                found = Some(w.with_phase(aligning_phase(z)));
                break;
            }
        }
        match found {
            Some(w) => table.insert(key, w)?,
            None => {
                table.uncorrectable.insert(key);
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeStatus {
    Ok,
    LowFidelity,
    Uncorrectable,
    ZeroProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub labels: Vec<String>,
    /// Mean over the inputs run.
    pub probability: f64,
    pub correction: Option<String>,
    /// Minimum over inputs of the corrected fidelity.
    pub fidelity: Option<f64>,
    /// For uncorrectable rows: the best any single Pauli word achieves,
    /// minimized over inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_fidelity: Option<f64>,
    pub status: OutcomeStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub protocol: String,
    pub anchor: String,
    pub trials: usize,
    pub coverage: f64,
    pub coverage_min: f64,
    pub coverage_max: f64,
    pub expected_coverage: f64,
    pub outcomes: Vec<OutcomeRow>,
    pub diffs: Vec<TableDiff>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn min_fidelity(&self) -> Option<f64> {
        self.outcomes
            .iter()
            .filter_map(|o| o.fidelity)
            .min_by(f64::total_cmp)
    }

    pub fn coverage_input_dependent(&self, tol: f64) -> bool {
        self.coverage_max - self.coverage_min > tol
    }
}

/// Runs one input through every path with derived (or supplied) corrections.
pub fn run_protocol(
    spec: &ProtocolSpec,
    input: &StateVector,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    evaluate(spec, std::slice::from_ref(input), tol)
}

/// Input `t` of a `verify` run.
pub fn trial_input(n_qubits: usize, seed: u64, t: usize) -> Result<StateVector> {
    StateVector::random(n_qubits, seed.wrapping_add(t as u64))
}

/// `trials` seeded random inputs through [`run_protocol`]'s pipeline.
pub fn verify(
    spec: &ProtocolSpec,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial required".into()));
    }
    let inputs = (0..trials)
        .map(|t| trial_input(spec.unknown_arity(), seed, t))
        .collect::<Result<Vec<_>>>()?;
    evaluate(spec, &inputs, tol)
}

/// Corrections used for `spec`: supplied ones, else derived from the
/// default probes.
pub fn corrections_for(spec: &ProtocolSpec, tol: &Tolerances) -> Result<CorrectionTable> {
    match &spec.corrections {
        Some(t) => Ok(t.clone()),
        None => derive_correction_table(
            spec,
            &default_probes(spec.unknown_arity(), PROBE_SEED)?,
            tol,
        ),
    }
}

#[derive(Default)]
struct Acc {
    labels: Vec<String>,
    prob_sum: f64,
    live: usize,
    min_fid: Option<f64>,
    // per-word minimum fidelity, uncorrectable rows only
    word_min: Vec<f64>,
}

fn evaluate(
    spec: &ProtocolSpec,
    inputs: &[StateVector],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    spec.validate_complete()?;
    let table = corrections_for(spec, tol)?;
    let k = spec.receiver_qubits()?.len();
    let targets: Vec<usize> = (0..k).collect();
    let words = LocalOperatorWord::pauli_words(k);
    let mut accs: Vec<Acc> = Vec::new();
    let mut coverages = Vec::with_capacity(inputs.len());
    for input in inputs {
        let recs = outcome_paths(spec, input, tol)?;
        if accs.is_empty() {
            accs = recs
                .iter()
                .map(|r| Acc {
                    labels: r.labels.clone(),
                    word_min: vec![1.0; words.len()],
                    ..Acc::default()
                })
                .collect();
        }
        coverages.push(recs.iter().map(|r| r.probability).sum::<f64>());
        for (acc, rec) in accs.iter_mut().zip(&recs) {
            acc.prob_sum += rec.probability;
            if rec.is_zero() {
                continue;
            }
            acc.live += 1;
            let key = rec.key();
            if let Some(w) = table.get(&key) {
                let f = rec.residual.apply_word(w, &targets)?.fidelity(input)?;
                acc.min_fid = Some(acc.min_fid.map_or(f, |m: f64| m.min(f)));
            } else {
                for (m, w) in acc.word_min.iter_mut().zip(&words) {
                    let f = rec.residual.apply_word(w, &targets)?.fidelity(input)?;
                    *m = m.min(f);
                }
            }
        }
    }
    let n = inputs.len() as f64;
    let outcomes: Vec<OutcomeRow> = accs
        .into_iter()
        .map(|acc| {
            let key = outcome_key(&acc.labels);
            let word = table.get(&key);
            let status = if acc.live == 0 {
                OutcomeStatus::ZeroProbability
            } else {
                match acc.min_fid {
                    Some(f) if f >= 1.0 - tol.fidelity => OutcomeStatus::Ok,
                    Some(_) => OutcomeStatus::LowFidelity,
                    None => OutcomeStatus::Uncorrectable,
                }
            };
            let best = (status == OutcomeStatus::Uncorrectable)
                .then(|| acc.word_min.iter().copied().fold(0.0, f64::max));
            OutcomeRow {
                labels: acc.labels,
                probability: acc.prob_sum / n,
                correction: word.map(|w| w.table_notation()),
                fidelity: acc.min_fid,
                best_fidelity: best,
                status,
            }
        })
        .collect();
    let coverage = coverages.iter().sum::<f64>() / n;
    let coverage_min = coverages.iter().copied().fold(f64::INFINITY, f64::min);
    let coverage_max = coverages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let diffs = spec
        .paper_table
        .as_ref()
        .map(|p| compare_tables(p, &table))
        .unwrap_or_default();
    let rows_ok = outcomes
        .iter()
        .all(|o| matches!(o.status, OutcomeStatus::Ok | OutcomeStatus::ZeroProbability));
    let coverage_ok = (coverage_min - spec.expected_coverage).abs() <= tol.probability_sum
        && (coverage_max - spec.expected_coverage).abs() <= tol.probability_sum;
    Ok(VerificationReport {
        protocol: spec.id.clone(),
        anchor: spec.anchor.clone(),
        trials: inputs.len(),
        coverage,
        coverage_min,
        coverage_max,
        expected_coverage: spec.expected_coverage,
        outcomes,
        diffs,
        pass: rows_ok && coverage_ok,
        notes: spec.notes.clone(),
    })
}

/// Fills `correction` and `fidelity_after` on records from [`outcome_paths`].
pub fn apply_corrections(
    records: &mut [OutcomeRecord],
    table: &CorrectionTable,
    input: &StateVector,
) -> Result<()> {
    for r in records.iter_mut() {
        if r.is_zero() {
            continue;
        }
        if let Some(w) = table.get(&r.key()) {
            let targets: Vec<usize> = (0..r.residual.n_qubits()).collect();
            r.fidelity_after = Some(r.residual.apply_word(w, &targets)?.fidelity(input)?);
            r.correction = Some(w.clone());
        }
    }
    Ok(())
}
