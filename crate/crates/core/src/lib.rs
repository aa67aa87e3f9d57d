//! Discrete phase-space toolkit for n-qubit systems.
//!
//! The crate computes discrete Wigner functions from density matrices and
//! back, applies classic and quantum measurement-collapse updating to joint
//! distributions and Wigner tables, and drives scripted two-particle
//! scenarios with measure-locality and no-communication checkers.
//!
//! All values are immutable after construction and freely shareable across
//! threads; sampling takes explicit seeds so concurrent runs stay
//! reproducible.

pub mod collapse;
pub mod epr;
pub mod error;
pub mod phasespace;
pub mod qstate;
pub mod random;

pub use collapse::{Axis, CollapseEvent, JointDistribution, ObservableId, Variable};
pub use epr::{
    MLocalityReport, NoCommunicationReport, OutcomeSpec, PlanStep, Scenario, ScenarioKind,
    ScenarioTrace, StepState, TraceStep, Verdict,
};
pub use error::{Error, InvariantViolation, Result, ValidationReport};
pub use phasespace::{PhasePoint, WignerFunction};
pub use qstate::{Complex64, ComplexMatrix, DensityMatrix, StateVector};
