//! Printed protocol data wired into the engine.
//!
//! Every printed artifact is kept as transcribed (typos included) under
//! `data/`; each protocol is available twice, once from the printed data
//! and once from channel-derived replacements.

mod family;
mod operators;
mod qss;
mod teleport;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::channel::CHANNEL_FAMILY_DATA;
use crate::datafile::{entries, Entry};
use crate::{Result, StateVector};

pub use family::{
    appendix1_family, appendix2_check, appendix2_check_with, basis_teleport3_derived,
    basis_teleport3_printed, Appendix1Report, Appendix2Options,
};
pub use operators::{operator_table_report, OperatorCheck, OperatorStatus};
pub use qss::{
    bc_ordering_search, qss_family_report, spec_qss1, spec_qss1_printed, spec_qss2,
    spec_qss2_printed, spec_qss3, spec_qss3_printed, BcCandidate, BcOrdering, BcOrderingReport,
};
pub use teleport::{
    basis_teleport1, basis_teleport1_derived, expansion_report, paper_table_teleport2,
    spec_teleport1, spec_teleport1_printed, spec_teleport2, spec_teleport2_printed, spec_teleport3,
    spec_teleport3_printed, teleport1_term_diffs, teleport2_component_report, ExpansionRow,
    PrintedRow, PrintedTable, TermDiff,
};

pub const TELEPORT1_DATA: &str = include_str!("../../data/teleport1.txt");
pub const TELEPORT2_DATA: &str = include_str!("../../data/teleport2.txt");
pub const TELEPORT2_TABLE_DATA: &str = include_str!("../../data/teleport2_table.txt");
pub const TELEPORT2_EXPANSION_DATA: &str = include_str!("../../data/teleport2_expansion.txt");
pub const QSS1_DATA: &str = include_str!("../../data/qss1.txt");
pub const QSS2_DATA: &str = include_str!("../../data/qss2.txt");
pub const QSS3_DATA: &str = include_str!("../../data/qss3.txt");
pub const OPERATORS_DATA: &str = include_str!("../../data/operators.txt");

/// Every embedded data file as `(name, contents)`.
pub const DATA_FILES: [(&str, &str); 9] = [
    ("channel_family.txt", CHANNEL_FAMILY_DATA),
    ("operators.txt", OPERATORS_DATA),
    ("qss1.txt", QSS1_DATA),
    ("qss2.txt", QSS2_DATA),
    ("qss3.txt", QSS3_DATA),
    ("teleport1.txt", TELEPORT1_DATA),
    ("teleport2.txt", TELEPORT2_DATA),
    ("teleport2_expansion.txt", TELEPORT2_EXPANSION_DATA),
    ("teleport2_table.txt", TELEPORT2_TABLE_DATA),
];

/// SHA-256 over all embedded data, hex encoded.
pub fn data_checksum() -> String {
    let mut h = Sha256::new();
    for (name, text) in DATA_FILES {
        h.update(name.as_bytes());
        h.update([0]);
        h.update(text.as_bytes());
        h.update([0]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// One printed expansion with its location and normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperDatum {
    /// `file:line key`.
    pub anchor: String,
    pub raw: String,
    pub raw_norm: f64,
    /// `raw / |raw|`, absent when the raw vector is zero.
    pub normalized: Option<StateVector>,
    pub notes: Vec<String>,
}

impl PaperDatum {
    pub fn new(anchor: String, raw: &str, vector: &StateVector) -> Self {
        Self {
            anchor,
            raw: raw.to_string(),
            raw_norm: vector.norm(),
            normalized: vector.normalized().ok(),
            notes: Vec::new(),
        }
    }
}

pub(crate) fn anchor(file: &str, e: &Entry) -> String {
    format!("{file}:{} {}", e.line, e.key)
}

pub(crate) fn data(file: &str) -> Result<Vec<Entry>> {
    let text = DATA_FILES
        .iter()
        .find(|(n, _)| *n == file)
        .map(|(_, t)| *t)
        .unwrap_or_default();
    entries(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchStatus {
    Match,
    Flagged,
}

/// A printed state compared with the derived state it is meant to be.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyMatch {
    pub label: String,
    pub anchor: String,
    pub raw_norm: f64,
    /// Derived state it was compared with.
    pub matched: String,
    /// `|<printed|derived>|` on normalized forms.
    pub overlap: f64,
    /// Squared norm of the printed state's projection onto the derived
    /// span, when a span rather than a single state is the reference.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_span: Option<f64>,
    pub status: MatchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FamilyMatch {
    pub(crate) fn single(
        label: String,
        anchor: String,
        raw_norm: f64,
        matched: String,
        overlap: f64,
    ) -> Self {
        let status = if 1.0 - overlap * overlap <= crate::Tolerances::default().fidelity {
            MatchStatus::Match
        } else {
            MatchStatus::Flagged
        };
        Self {
            label,
            anchor,
            raw_norm,
            matched,
            overlap,
            in_span: None,
            status,
            note: None,
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
