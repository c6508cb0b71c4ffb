use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::operator::Phase;
use crate::{Error, LocalOperatorWord, Result, StateVector};

/// Largest receiver arity the exhaustive Pauli search accepts.
pub const MAX_CORRECTION_ARITY: usize = 3;

/// Fidelity after applying `word` to `got`, measured against `want`.
pub fn word_fidelity(
    got: &StateVector,
    want: &StateVector,
    word: &LocalOperatorWord,
) -> Result<f64> {
    let targets: Vec<usize> = (0..got.n_qubits()).collect();
    got.apply_word(word, &targets)?.fidelity(want)
}

/// Phase from {1, i, -1, -i} that brings `z` closest to the positive real axis.
pub(crate) fn aligning_phase(z: num_complex::Complex<f64>) -> Phase {
    Phase::ALL
        .into_iter()
        .max_by(|a, b| {
            let ra = (a.to_complex::<f64>() * z).re;
            let rb = (b.to_complex::<f64>() * z).re;
            ra.total_cmp(&rb)
        })
        .unwrap_or(Phase::One)
}

/// Exhaustive search over the `4^k` Pauli words; the first (lexicographic)
/// word reaching `1 - fidelity_tol` wins.
pub fn solve_pauli_correction(
    got: &StateVector,
    want: &StateVector,
    fidelity_tol: f64,
) -> Result<Option<LocalOperatorWord>> {
    let k = got.n_qubits();
    if want.n_qubits() != k {
        return Err(Error::Dimension(k, want.n_qubits()));
    }
    if k == 0 || k > MAX_CORRECTION_ARITY {
        return Err(Error::Precondition(format!(
            "Pauli search supports 1..={MAX_CORRECTION_ARITY} qubits, got {k}"
        )));
    }
    let targets: Vec<usize> = (0..k).collect();
    for w in LocalOperatorWord::pauli_words(k) {
        let image = got.apply_word(&w, &targets)?;
        let z = want.inner(&image)?;
        if z.norm_sqr() >= 1.0 - fidelity_tol {
            return Ok(Some(w.with_phase(aligning_phase(z))));
        }
    }
    Ok(None)
}

/// Outcome key → correction word.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorrectionTable {
    pub rows: BTreeMap<String, LocalOperatorWord>,
    /// Free-text notes per key, e.g. why a printed row is malformed.
    pub annotations: BTreeMap<String, String>,
    /// Keys that carry probability but admit no single Pauli word.
    pub uncorrectable: BTreeSet<String>,
}

impl CorrectionTable {
    pub fn insert(&mut self, key: impl Into<String>, word: LocalOperatorWord) -> Result<()> {
        if !word.is_unitary() {
            return Err(Error::Word(format!("{word} is not a Pauli word")));
        }
        self.rows.insert(key.into(), word);
        Ok(())
    }

    pub fn annotate(&mut self, key: impl Into<String>, note: impl Into<String>) {
        self.annotations.insert(key.into(), note.into());
    }

    pub fn get(&self, key: &str) -> Option<&LocalOperatorWord> {
        self.rows.get(key)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Same keys mapped to the same letters, phases ignored.
    pub fn letter_equal(&self, other: &Self) -> bool {
        self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|((ka, a), (kb, b))| ka == kb && a.same_letters(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffStatus {
    Match,
    PhaseOnly,
    Mismatch,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableDiff {
    pub key: String,
    pub printed: Option<String>,
    pub derived: Option<String>,
    pub status: DiffStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Row-by-row comparison in key order. A printed row carrying an annotation
/// is reported as a mismatch with the note attached, whatever its word.
pub fn compare_tables(printed: &CorrectionTable, derived: &CorrectionTable) -> Vec<TableDiff> {
    let keys: BTreeSet<&String> = printed
        .rows
        .keys()
        .chain(derived.rows.keys())
        .chain(printed.annotations.keys())
        .chain(derived.uncorrectable.iter())
        .collect();
    keys.into_iter()
        .map(|key| {
            let p = printed.rows.get(key);
            let d = derived.rows.get(key);
            let mut note = printed.annotations.get(key).cloned();
            let status = match (p, d) {
                _ if note.is_some() => DiffStatus::Mismatch,
                (Some(_), None) if derived.uncorrectable.contains(key) => {
                    note = Some("no Pauli word corrects this outcome".into());
                    DiffStatus::Mismatch
                }
                (Some(a), Some(b)) if a == b => DiffStatus::Match,
                (Some(a), Some(b)) if a.same_letters(b) => DiffStatus::PhaseOnly,
                (Some(_), Some(_)) => DiffStatus::Mismatch,
                _ => DiffStatus::Missing,
            };
            TableDiff {
                key: key.clone(),
                printed: p.map(|w| w.table_notation()),
                derived: d.map(|w| w.table_notation()),
                status,
                note,
            }
        })
        .collect()
}
