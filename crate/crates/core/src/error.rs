//! Error types shared across the crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single violated density-matrix invariant with its measured magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum InvariantViolation {
    /// Largest |M[i][j] − conj(M[j][i])| over all entries.
    Hermiticity { defect: f64 },
    /// The measured trace (should be 1).
    Trace { trace: f64 },
    /// Smallest eigenvalue of the Hermitian part (should be ≥ 0).
    Positivity { min_eigenvalue: f64 },
}

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvariantViolation::Hermiticity { defect } => {
                write!(f, "hermiticity violated (defect {defect:e})")
            }
            InvariantViolation::Trace { trace } => write!(f, "trace violated (trace {trace})"),
            InvariantViolation::Positivity { min_eigenvalue } => {
                write!(f, "positivity violated (eigenvalue {min_eigenvalue})")
            }
        }
    }
}

/// Outcome of validating a candidate density matrix.
///
/// Always carries the measured defect magnitudes, also for matrices that pass,
/// so callers can report how close a rejected matrix came.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Largest |M[i][j] − conj(M[j][i])| over all entries.
    pub hermiticity_defect: f64,
    /// Real part of the trace.
    pub trace: f64,
    /// |tr(M) − 1| including any imaginary residue.
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part (M + M†)/2.
    pub min_eigenvalue: f64,
    /// Every invariant that exceeded its tolerance.
    pub violations: Vec<InvariantViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "all invariants satisfied");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be in [0, {limit}), got {value}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("dimension {dim} is not 2^{num_qubits}")]
    DimensionMismatch { dim: usize, num_qubits: usize },

    #[error("qubit count {num_qubits} exceeds the supported limit of {limit}")]
    TooManyQubits { num_qubits: usize, limit: usize },

    #[error("{0}")]
    Domain(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("{op} requires {required} qubits, state has {actual}")]
    UnsupportedArity {
        op: &'static str,
        required: &'static str,
        actual: usize,
    },

    #[error("impossible outcome: {variable} = {outcome} has prior probability {prior}")]
    ImpossibleOutcome {
        variable: String,
        outcome: u8,
        prior: f64,
    },

    #[error("state vector is not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(ValidationReport),

    #[error("internal consistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
