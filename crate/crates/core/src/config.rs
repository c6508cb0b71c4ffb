use std::sync::OnceLock;

/// Default qubit capacity (2^16 amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 16;

/// Environment variable that overrides the capacity cap.
pub const MAX_QUBITS_ENV: &str = "QTV_MAX_QUBITS";

/// Qubit cap for constructors and tensor products.
///
/// Read once from `QTV_MAX_QUBITS`; falls back to [`DEFAULT_MAX_QUBITS`] when
/// unset or unparsable.
pub fn max_qubits() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

/// Numerical thresholds shared by every layer.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Pairwise overlap / norm deviation allowed for an orthonormal family.
    pub orthonormality: f64,
    /// A recovered state counts as perfect when fidelity >= 1 - this.
    pub fidelity: f64,
    /// Allowed deviation of a complete probability sum from 1.
    pub probability_sum: f64,
    /// Outcomes below this probability become flagged placeholders.
    pub zero_probability: f64,
    /// Singular values at or below this are treated as zero.
    pub rank: f64,
    /// Eigenvalues below this are dropped from entropy sums.
    pub eigenvalue_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: 1e-10,
            fidelity: 1e-9,
            probability_sum: 1e-12,
            zero_probability: 1e-14,
            rank: 1e-9,
            eigenvalue_floor: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.orthonormality,
            self.fidelity,
            self.probability_sum,
            self.zero_probability,
            self.rank,
            self.eigenvalue_floor,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(crate::Error::Precondition(
                "tolerances must be finite and > 0".into(),
            ))
        }
    }
}
