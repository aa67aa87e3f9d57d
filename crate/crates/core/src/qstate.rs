//! Quantum states and the operator-level primitives the rest of the crate
//! consumes: computational and conjugate bases, tensor products, partial
//! transpose, purity, and density-matrix validation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, InvariantViolation, Result, ValidationReport};

pub type Complex64 = Complex<f64>;

/// Hermiticity defect tolerance for density matrices.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Trace defect tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues below −`POSITIVITY_TOL` fail the positive-semidefinite check.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Default cap on system size: 4^8 phase points, 256×256 matrices.
pub const DEFAULT_MAX_QUBITS: usize = 8;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; `entries.len()` must be `dim²`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("matrix dimension must be ≥ 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Domain(format!(
                "expected {} entries for a {dim}×{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("rows must form a square matrix".into()));
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// `self += coeff · other`, entrywise.
    pub fn add_scaled(&mut self, coeff: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            *a += b * coeff;
        }
    }

    /// tr(self · other) without forming the product matrix.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc
    }

    /// Largest |M[i][j] − conj(M[j][i])| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    /// Largest entrywise |self − other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part (M + M†)/2, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let herm =
            DMatrix::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut eigs: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        eigs
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(deserializer)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(raw.dim, entries).map_err(D::Error::custom)
    }
}

/// Pure state as a complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        assert!(!amplitudes.is_empty(), "state vector must be non-empty");
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩ with the conjugate on `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self⟩ ⊗ |other⟩ with `self` as the most-significant factor.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector::new(amplitudes)
    }
}

/// Validated density matrix over `num_qubits` qubits.
///
/// Construction goes through [`validate_density`] (or the constructors in
/// this module that are exact by construction), so a value of this type is
/// Hermitian, unit-trace and positive semidefinite within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    num_qubits: usize,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// I/2ⁿ.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits, DEFAULT_MAX_QUBITS)?;
        let dim = 1 << num_qubits;
        let matrix = ComplexMatrix::identity(dim).scaled(Complex64::new(1.0 / dim as f64, 0.0));
        Ok(Self { matrix, num_qubits })
    }
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    dim: usize,
    entries: Vec<[f64; 2]>,
    num_qubits: usize,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawDensity {
            dim: self.matrix.dim(),
            entries: self.matrix.entries().iter().map(|c| [c.re, c.im]).collect(),
            num_qubits: self.num_qubits,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    /// Deserialization re-validates every invariant, so a parsed value is as
    /// trustworthy as a constructed one.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDensity::deserialize(deserializer)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        let matrix = ComplexMatrix::new(raw.dim, entries).map_err(D::Error::custom)?;
        validate_density(&matrix, raw.num_qubits).map_err(D::Error::custom)
    }
}

fn check_qubit_count(num_qubits: usize, limit: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::Domain("qubit count must be ≥ 1".into()));
    }
    if num_qubits > limit {
        return Err(Error::TooManyQubits { num_qubits, limit });
    }
    Ok(())
}

/// Computational basis vector |q⟩ in an N-dimensional space.
pub fn basis_state_q(q: usize, dim: usize) -> Result<StateVector> {
    if q >= dim {
        return Err(Error::OutOfRange {
            what: "q",
            value: q,
            limit: dim,
        });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[q] = Complex64::new(1.0, 0.0);
    Ok(StateVector::new(amplitudes))
}

/// Conjugate basis vector |p⟩ = (1/√N) Σ_q e^{+i2πqp/N} |q⟩.
pub fn basis_state_p(p: usize, dim: usize) -> Result<StateVector> {
    if p >= dim {
        return Err(Error::OutOfRange {
            what: "p",
            value: p,
            limit: dim,
        });
    }
    let norm = 1.0 / (dim as f64).sqrt();
    let amplitudes = (0..dim)
        .map(|q| Complex64::from_polar(norm, 2.0 * PI * (q * p) as f64 / dim as f64))
        .collect();
    Ok(StateVector::new(amplitudes))
}

/// Rank-1 projector |ψ⟩⟨ψ| of a normalized vector.
pub fn density_from_vector(psi: &StateVector) -> Result<DensityMatrix> {
    let norm_sq = psi.norm_sqr();
    if (norm_sq - 1.0).abs() > HERMITICITY_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let dim = psi.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Domain(format!(
            "dimension {dim} is not a power of two ≥ 2"
        )));
    }
    let num_qubits = dim.trailing_zeros() as usize;
    check_qubit_count(num_qubits, DEFAULT_MAX_QUBITS)?;
    let mut matrix = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            matrix.set(i, j, psi.amplitudes()[i] * psi.amplitudes()[j].conj());
        }
    }
    Ok(DensityMatrix { matrix, num_qubits })
}

/// Two-qubit maximally entangled state (|00⟩ + |11⟩)/√2 in the ordered basis
/// |00⟩,|01⟩,|10⟩,|11⟩. Entries are exact dyadic values.
pub fn bell_state() -> DensityMatrix {
    let mut matrix = ComplexMatrix::zeros(4);
    let half = Complex64::new(0.5, 0.0);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        matrix.set(i, j, half);
    }
    DensityMatrix {
        matrix,
        num_qubits: 2,
    }
}

/// Kronecker product with `a` as the left (most-significant) factor.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Transposes the indices of one subsystem (1 or 2) of a two-qubit state.
///
/// The result is Hermitian with unchanged trace but may fail positivity;
/// negativity of an eigenvalue witnesses entanglement.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    if rho.num_qubits() != 2 {
        return Err(Error::UnsupportedArity {
            op: "partial_transpose",
            required: "exactly 2",
            actual: rho.num_qubits(),
        });
    }
    partial_transpose_matrix(rho.matrix(), subsystem)
}

/// [`partial_transpose`] on a raw 4×4 matrix, e.g. to transpose back a
/// non-positive result.
pub fn partial_transpose_matrix(m: &ComplexMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::UnsupportedArity {
            op: "partial_transpose",
            required: "exactly 2",
            actual: m.dim().trailing_zeros() as usize,
        });
    }
    if subsystem != 1 && subsystem != 2 {
        return Err(Error::Domain(format!(
            "subsystem index must be 1 or 2, got {subsystem}"
        )));
    }
    let mut out = ComplexMatrix::zeros(4);
    for q1 in 0..2 {
        for q2 in 0..2 {
            for r1 in 0..2 {
                for r2 in 0..2 {
                    let value = if subsystem == 1 {
                        m.get(2 * r1 + q2, 2 * q1 + r2)
                    } else {
                        m.get(2 * q1 + r2, 2 * r1 + q2)
                    };
                    out.set(2 * q1 + q2, 2 * r1 + r2, value);
                }
            }
        }
    }
    Ok(out)
}

/// tr(ρ²) ∈ (0, 1]; equals 1 exactly for pure states.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_product(rho.matrix()).re
}

/// Measures every density-matrix invariant of `m` and lists the violations.
pub fn validation_report(m: &ComplexMatrix) -> ValidationReport {
    let hermiticity_defect = m.hermiticity_defect();
    let tr = m.trace();
    let trace_defect = (tr - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = m.hermitian_eigenvalues()[0];

    let mut violations = Vec::new();
    if hermiticity_defect > HERMITICITY_TOL {
        violations.push(InvariantViolation::Hermiticity {
            defect: hermiticity_defect,
        });
    }
    if trace_defect > TRACE_TOL {
        violations.push(InvariantViolation::Trace { trace: tr.re });
    }
    if min_eigenvalue < -POSITIVITY_TOL {
        violations.push(InvariantViolation::Positivity { min_eigenvalue });
    }
    ValidationReport {
        hermiticity_defect,
        trace: tr.re,
        trace_defect,
        min_eigenvalue,
        violations,
    }
}

/// Validates `m` as an `num_qubits`-qubit density matrix.
///
/// On failure the error carries a [`ValidationReport`] naming each violated
/// invariant with its measured defect magnitude.
pub fn validate_density(m: &ComplexMatrix, num_qubits: usize) -> Result<DensityMatrix> {
    validate_density_with_limit(m, num_qubits, DEFAULT_MAX_QUBITS)
}

/// [`validate_density`] with a configurable qubit cap.
pub fn validate_density_with_limit(
    m: &ComplexMatrix,
    num_qubits: usize,
    limit: usize,
) -> Result<DensityMatrix> {
    check_qubit_count(num_qubits, limit)?;
    if m.dim() != 1 << num_qubits {
        return Err(Error::DimensionMismatch {
            dim: m.dim(),
            num_qubits,
        });
    }
    let report = validation_report(m);
    if report.is_valid() {
        Ok(DensityMatrix {
            matrix: m.clone(),
            num_qubits,
        })
    } else {
        Err(Error::InvalidDensity(report))
    }
}
