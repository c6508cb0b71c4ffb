//! Measurement-based protocol machinery: outcome enumeration, Pauli
//! corrections, table derivation, intermediate-party bases and table diffs.

mod basis;
mod correction;
mod frame;
mod isometry;
mod protocol;

pub use basis::{check_orthonormal, BasisElement, BasisReport, MeasurementBasis, NormRecord};
pub use correction::{
    compare_tables, solve_pauli_correction, word_fidelity, CorrectionTable, DiffStatus, TableDiff,
    MAX_CORRECTION_ARITY,
};
pub use frame::{conditioned_components, pauli_frame_vectors, real_pauli_words};
pub use isometry::{
    derive_intermediate_basis, derive_steering_basis, protocol_isometry, word_matrix, Isometry,
    SteeringBasis,
};
pub use protocol::{
    apply_corrections, corrections_for, default_probes, derive_correction_table,
    enumerate_outcomes, outcome_key, outcome_paths, run_protocol, trial_input, verify,
    OutcomeRecord, OutcomeRow, OutcomeStatus, ProtocolSpec, QubitPartition, Stage, StageBasis,
    VerificationReport, PROBE_SEED, UNKNOWN_ROLE,
};
