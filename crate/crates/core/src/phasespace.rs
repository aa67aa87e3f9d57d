//! Discrete phase space for n qubits: phase points, phase-point operators,
//! the Wigner transform and its inverse, the inner-product rule, and line
//! marginals.
//!
//! The phase space of n qubits is the set of 4ⁿ points
//! α = ((q₁,p₁), …, (qₙ,pₙ)) with binary coordinates. Points are enumerated
//! lexicographically by (q₁, p₁, q₂, p₂, …) so that tables serialize and
//! compare deterministically.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::collapse::{Axis, JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::qstate::{
    validate_density, Complex64, ComplexMatrix, DensityMatrix, DEFAULT_MAX_QUBITS,
};

/// Imaginary residue above this in any Wigner entry is an internal error.
pub const IMAG_TOL: f64 = 1e-9;

/// A point of the discrete phase space: one (q, p) bit pair per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    coords: Vec<(u8, u8)>,
}

impl PhasePoint {
    pub fn new(coords: Vec<(u8, u8)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("phase point needs at least one qubit".into()));
        }
        if coords.iter().any(|&(q, p)| q > 1 || p > 1) {
            return Err(Error::Domain(
                "phase-space coordinates must be 0 or 1".into(),
            ));
        }
        Ok(Self { coords })
    }

    pub fn num_qubits(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(u8, u8)] {
        &self.coords
    }

    /// Position in the lexicographic (q₁,p₁,q₂,p₂,…) enumeration.
    pub fn index(&self) -> usize {
        self.coords
            .iter()
            .fold(0, |acc, &(q, p)| (acc << 2) | ((q as usize) << 1) | p as usize)
    }

    pub fn from_index(index: usize, num_qubits: usize) -> Self {
        debug_assert!(index < 1 << (2 * num_qubits));
        let coords = (0..num_qubits)
            .map(|i| {
                let shift = 2 * (num_qubits - 1 - i);
                (((index >> (shift + 1)) & 1) as u8, ((index >> shift) & 1) as u8)
            })
            .collect();
        Self { coords }
    }

    pub fn enumerate(num_qubits: usize) -> impl Iterator<Item = PhasePoint> {
        (0..1usize << (2 * num_qubits)).map(move |i| PhasePoint::from_index(i, num_qubits))
    }
}

/// Real quasi-probability table over all 4ⁿ phase points.
///
/// Tables produced from unit-trace states sum to 1, but non-physical tables
/// (for example the partial transpose of an entangled state) are legitimate
/// values of this type; only density validation rejects them.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    num_qubits: usize,
    values: Vec<f64>,
}

impl WignerFunction {
    pub fn new(num_qubits: usize, values: Vec<f64>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Domain("qubit count must be ≥ 1".into()));
        }
        if num_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits {
                num_qubits,
                limit: DEFAULT_MAX_QUBITS,
            });
        }
        let expected = 1usize << (2 * num_qubits);
        if values.len() != expected {
            return Err(Error::Domain(format!(
                "expected {expected} phase-point values for {num_qubits} qubits, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("phase-point values must be finite".into()));
        }
        Ok(Self { num_qubits, values })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, point: &PhasePoint) -> f64 {
        self.values[point.index()]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn iter_points(&self) -> impl Iterator<Item = (PhasePoint, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (PhasePoint::from_index(i, self.num_qubits), v))
    }

    pub fn max_abs_diff(&self, other: &WignerFunction) -> f64 {
        assert_eq!(self.num_qubits, other.num_qubits, "qubit count mismatch");
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// One row per phase point: `q1,p1,…,qn,pn,value`.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = Vec::with_capacity(2 * self.num_qubits + 1);
        for i in 1..=self.num_qubits {
            header.push(format!("q{i}"));
            header.push(format!("p{i}"));
        }
        header.push("value".into());
        let mut out = header.join(",");
        out.push('\n');
        for (point, value) in self.iter_points() {
            let mut row: Vec<String> = Vec::with_capacity(2 * self.num_qubits + 1);
            for &(q, p) in point.coords() {
                row.push(q.to_string());
                row.push(p.to_string());
            }
            row.push(value.to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// 2ⁿ×2ⁿ grid with q-multilabel rows and p-multilabel columns.
    pub fn to_ascii(&self) -> String {
        let n = self.num_qubits;
        let side = 1usize << n;
        let label_width = n.max(3) + 1;
        let cell_width = 8;
        let label = |bits: usize| format!("{bits:0n$b}");

        let mut out = format!("{:>label_width$}", "q\\p");
        for col in 0..side {
            out.push_str(&format!("{:>cell_width$}", label(col)));
        }
        out.push('\n');
        for row in 0..side {
            out.push_str(&format!("{:>label_width$}", label(row)));
            for col in 0..side {
                let idx = (0..n).fold(0usize, |acc, i| {
                    let q = (row >> (n - 1 - i)) & 1;
                    let p = (col >> (n - 1 - i)) & 1;
                    (acc << 2) | (q << 1) | p
                });
                out.push_str(&format!("{:>cell_width$.3}", self.values[idx]));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct RawWigner {
    num_qubits: usize,
    values: Vec<f64>,
}

impl Serialize for WignerFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawWigner {
            num_qubits: self.num_qubits,
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WignerFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawWigner::deserialize(deserializer)?;
        WignerFunction::new(raw.num_qubits, raw.values).map_err(D::Error::custom)
    }
}

/// Single-qubit phase-point operator
/// Â(q,p) = ½ [ I + (−1)^q σz + (−1)^p σx + (−1)^{q+p} σy ].
pub fn single_qubit_phase_point(q: u8, p: u8) -> ComplexMatrix {
    assert!(q <= 1 && p <= 1, "phase-space coordinates are bits");
    let sz = if q == 0 { 1.0 } else { -1.0 };
    let sx = if p == 0 { 1.0 } else { -1.0 };
    let sy = if q == p { 1.0 } else { -1.0 };
    ComplexMatrix::from_rows(vec![
        vec![
            Complex64::new(0.5 * (1.0 + sz), 0.0),
            Complex64::new(0.5 * sx, -0.5 * sy),
        ],
        vec![
            Complex64::new(0.5 * sx, 0.5 * sy),
            Complex64::new(0.5 * (1.0 - sz), 0.0),
        ],
    ])
    .expect("2×2 literal")
}

/// Â(α) = Â(α₁) ⊗ … ⊗ Â(αₙ), qubit 1 as the left factor.
pub fn phase_point_operator(alpha: &PhasePoint) -> ComplexMatrix {
    let mut op = single_qubit_phase_point(alpha.coords()[0].0, alpha.coords()[0].1);
    for &(q, p) in &alpha.coords()[1..] {
        op = crate::qstate::tensor(&op, &single_qubit_phase_point(q, p));
    }
    op
}

/// W(α) = (1/N) tr[ρ Â(α)] over all 4ⁿ points.
pub fn wigner(rho: &DensityMatrix) -> Result<WignerFunction> {
    wigner_of_matrix(rho.matrix(), rho.num_qubits())
}

/// Wigner transform of an arbitrary (typically Hermitian) matrix.
///
/// Accepts non-density inputs such as partially transposed states; any entry
/// with imaginary residue above [`IMAG_TOL`] is an internal-consistency error.
pub fn wigner_of_matrix(m: &ComplexMatrix, num_qubits: usize) -> Result<WignerFunction> {
    if num_qubits == 0 {
        return Err(Error::Domain("qubit count must be ≥ 1".into()));
    }
    if num_qubits > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            num_qubits,
            limit: DEFAULT_MAX_QUBITS,
        });
    }
    if m.dim() != 1 << num_qubits {
        return Err(Error::DimensionMismatch {
            dim: m.dim(),
            num_qubits,
        });
    }
    let scale = 1.0 / (1u64 << num_qubits) as f64;
    let n_points = 1usize << (2 * num_qubits);
    let mut values = Vec::with_capacity(n_points);
    for idx in 0..n_points {
        let op = phase_point_operator(&PhasePoint::from_index(idx, num_qubits));
        let t = m.trace_product(&op) * scale;
        if t.im.abs() > IMAG_TOL {
            return Err(Error::Inconsistency(format!(
                "Wigner entry at point {idx} has imaginary residue {:e}",
                t.im
            )));
        }
        values.push(t.re);
    }
    WignerFunction::new(num_qubits, values)
}

/// Inverse transform ρ = Σ_α W(α) Â(α), exact because the Â form an
/// orthogonal operator basis.
pub fn reconstruct_matrix(w: &WignerFunction) -> ComplexMatrix {
    let dim = 1usize << w.num_qubits();
    let mut acc = ComplexMatrix::zeros(dim);
    for (idx, &value) in w.values().iter().enumerate() {
        let op = phase_point_operator(&PhasePoint::from_index(idx, w.num_qubits()));
        acc.add_scaled(value, &op);
    }
    acc
}

/// Rebuilds and validates the density matrix behind a Wigner table.
///
/// Non-physical tables reconstruct fine but fail validation; the error then
/// reports each violated invariant with its defect magnitude.
pub fn reconstruct(w: &WignerFunction) -> Result<DensityMatrix> {
    validate_density(&reconstruct_matrix(w), w.num_qubits())
}

/// Inner-product rule: tr(ρρ′) = N Σ_α W(α)W′(α).
pub fn inner_product(a: &WignerFunction, b: &WignerFunction) -> Result<f64> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::QubitCountMismatch {
            left: a.num_qubits(),
            right: b.num_qubits(),
        });
    }
    let n = (1u64 << a.num_qubits()) as f64;
    Ok(n * a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(x, y)| x * y)
        .sum::<f64>())
}

/// Sums W over the coordinates conjugate to the chosen axes, one axis per
/// qubit, yielding the Born probabilities of the corresponding product basis.
pub fn line_marginal(w: &WignerFunction, axes: &[Axis]) -> Result<JointDistribution> {
    let n = w.num_qubits();
    if axes.len() != n {
        return Err(Error::Domain(format!(
            "need one axis per qubit: got {} axes for {n} qubits",
            axes.len()
        )));
    }
    let variables: Vec<Variable> = axes
        .iter()
        .enumerate()
        .map(|(i, &axis)| Variable::observable(i + 1, axis))
        .collect();
    let mut probs = vec![0.0; 1 << n];
    for (idx, &value) in w.values().iter().enumerate() {
        let point = PhasePoint::from_index(idx, n);
        let out_idx = point
            .coords()
            .iter()
            .zip(axes.iter())
            .fold(0usize, |acc, (&(q, p), &axis)| {
                let bit = match axis {
                    Axis::Q => q,
                    Axis::P => p,
                };
                (acc << 1) | bit as usize
            });
        probs[out_idx] += value;
    }
    JointDistribution::new(variables, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        basis_state_q, bell_state, density_from_vector, partial_transpose, purity, tensor,
        DensityMatrix,
    };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent oracle: sum the four Pauli terms as written.
    fn pauli_sum(q: u8, p: u8) -> ComplexMatrix {
        let identity = ComplexMatrix::identity(2);
        let sigma_x = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let sigma_y = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let sigma_z = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let mut m = ComplexMatrix::zeros(2);
        m.add_scaled(0.5, &identity);
        m.add_scaled(0.5 * (-1.0f64).powi(q as i32), &sigma_z);
        m.add_scaled(0.5 * (-1.0f64).powi(p as i32), &sigma_x);
        m.add_scaled(0.5 * (-1.0f64).powi((q + p) as i32), &sigma_y);
        m
    }

    #[test]
    fn single_qubit_operators_match_pauli_sum() {
        for q in 0..2u8 {
            for p in 0..2u8 {
                let a = single_qubit_phase_point(q, p);
                assert_eq!(a, pauli_sum(q, p), "Â({q},{p})");
                assert!((a.trace() - c(1.0, 0.0)).norm() < 1e-15);
                assert_eq!(a.hermiticity_defect(), 0.0);
            }
        }
    }

    #[test]
    fn single_qubit_operator_frozen_values() {
        // Frozen from the Pauli-sum oracle above.
        let a00 = single_qubit_phase_point(0, 0);
        assert_eq!(a00.get(0, 0), c(1.0, 0.0));
        assert_eq!(a00.get(0, 1), c(0.5, -0.5));
        assert_eq!(a00.get(1, 0), c(0.5, 0.5));
        assert_eq!(a00.get(1, 1), c(0.0, 0.0));

        let a11 = single_qubit_phase_point(1, 1);
        assert_eq!(a11.get(0, 0), c(0.0, 0.0));
        assert_eq!(a11.get(0, 1), c(-0.5, -0.5));
        assert_eq!(a11.get(1, 0), c(-0.5, 0.5));
        assert_eq!(a11.get(1, 1), c(1.0, 0.0));
    }

    #[test]
    fn phase_point_operator_reduces_to_single_qubit() {
        let alpha = PhasePoint::new(vec![(1, 0)]).unwrap();
        assert_eq!(phase_point_operator(&alpha), single_qubit_phase_point(1, 0));
    }

    #[test]
    fn phase_point_operators_are_orthogonal_basis() {
        // tr[Â(α)Â(β)] = N δ(α,β), brute force over all pairs at n = 1 and 2.
        for n in 1..=2usize {
            let big_n = (1u64 << n) as f64;
            let ops: Vec<ComplexMatrix> = PhasePoint::enumerate(n)
                .map(|pt| phase_point_operator(&pt))
                .collect();
            for (i, a) in ops.iter().enumerate() {
                for (j, b) in ops.iter().enumerate() {
                    let t = a.trace_product(b);
                    let expected = if i == j { big_n } else { 0.0 };
                    assert!(
                        (t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12,
                        "n={n} tr[Â({i})Â({j})] = {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn phase_point_operators_sum_to_n_identity() {
        for n in 1..=2usize {
            let dim = 1usize << n;
            let mut sum = ComplexMatrix::zeros(dim);
            for pt in PhasePoint::enumerate(n) {
                sum.add_scaled(1.0, &phase_point_operator(&pt));
            }
            let expected = ComplexMatrix::identity(dim).scaled(c(dim as f64, 0.0));
            assert!(sum.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn point_index_round_trips() {
        for n in 1..=3usize {
            for idx in 0..1usize << (2 * n) {
                let pt = PhasePoint::from_index(idx, n);
                assert_eq!(pt.index(), idx);
                assert_eq!(pt.num_qubits(), n);
            }
        }
        // (q₁,p₁,q₂,p₂) = (1,0,0,1) sits at 0b1001.
        let pt = PhasePoint::new(vec![(1, 0), (0, 1)]).unwrap();
        assert_eq!(pt.index(), 0b1001);
        assert!(PhasePoint::new(vec![(2, 0)]).is_err());
    }

    #[test]
    fn wigner_of_basis_state_is_vertical_line() {
        let rho = density_from_vector(&basis_state_q(0, 2).unwrap()).unwrap();
        let w = wigner(&rho).unwrap();
        assert_eq!(w.values().len(), 4);
        // (q,p) order: (0,0), (0,1), (1,0), (1,1)
        for (idx, expected) in [(0usize, 0.5), (1, 0.5), (2, 0.0), (3, 0.0)] {
            assert!((w.values()[idx] - expected).abs() < 1e-12, "idx {idx}");
        }
    }

    #[test]
    fn wigner_of_maximally_mixed_is_uniform() {
        let w = wigner(&DensityMatrix::maximally_mixed(1).unwrap()).unwrap();
        for v in w.values() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn wigner_of_bell_state_is_eighth_with_four_negatives() {
        let w = wigner(&bell_state()).unwrap();
        let mut negatives = 0;
        for (point, value) in w.iter_points() {
            let (q1, p1) = point.coords()[0];
            let (q2, p2) = point.coords()[1];
            let expected = if q1 != q2 && p1 != p2 { -0.125 } else { 0.125 };
            assert!((value - expected).abs() < 1e-12, "point {point:?}");
            if value < 0.0 {
                negatives += 1;
            }
        }
        assert_eq!(negatives, 4);
        assert!((w.min_value() + 0.125).abs() < 1e-12);
    }

    #[test]
    fn wigner_of_partial_transpose_is_correlated_delta() {
        let pt = partial_transpose(&bell_state(), 2).unwrap();
        let w = wigner_of_matrix(&pt, 2).unwrap();
        for (point, value) in w.iter_points() {
            let (q1, p1) = point.coords()[0];
            let (q2, p2) = point.coords()[1];
            let expected = if q1 == q2 && p1 == p2 { 0.25 } else { 0.0 };
            assert!((value - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_round_trips_bell() {
        let bell = bell_state();
        let w = wigner(&bell).unwrap();
        let back = reconstruct(&w).unwrap();
        assert!(back.matrix().max_abs_diff(bell.matrix()) < 1e-12);
    }

    #[test]
    fn reconstruct_uniform_gives_maximally_mixed() {
        let w = WignerFunction::new(1, vec![0.25; 4]).unwrap();
        let rho = reconstruct(&w).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(1).unwrap().matrix())
                < 1e-12
        );
    }

    #[test]
    fn reconstruct_rejects_non_physical_table_with_defect() {
        // The table of the partially transposed Bell state is a legitimate
        // Wigner function but not a state: reconstruction reports the
        // negative eigenvalue.
        let pt = partial_transpose(&bell_state(), 2).unwrap();
        let w = wigner_of_matrix(&pt, 2).unwrap();
        let back = reconstruct_matrix(&w);
        assert!(back.max_abs_diff(&pt) < 1e-12);
        match reconstruct(&w) {
            Err(Error::InvalidDensity(report)) => {
                assert!((report.min_eigenvalue + 0.5).abs() < 1e-9);
            }
            other => panic!("expected positivity failure, got {other:?}"),
        }
    }

    #[test]
    fn inner_product_matches_trace_rule() {
        let w_bell = wigner(&bell_state()).unwrap();
        assert!((inner_product(&w_bell, &w_bell).unwrap() - 1.0).abs() < 1e-12);

        let w0 = wigner(&density_from_vector(&basis_state_q(0, 2).unwrap()).unwrap()).unwrap();
        let w1 = wigner(&density_from_vector(&basis_state_q(1, 2).unwrap()).unwrap()).unwrap();
        assert!(inner_product(&w0, &w1).unwrap().abs() < 1e-12);

        let w_mixed = wigner(&DensityMatrix::maximally_mixed(1).unwrap()).unwrap();
        assert!((inner_product(&w0, &w_mixed).unwrap() - 0.5).abs() < 1e-12);

        assert!(matches!(
            inner_product(&w_bell, &w0),
            Err(Error::QubitCountMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn inner_product_equals_purity_for_bell() {
        let bell = bell_state();
        let w = wigner(&bell).unwrap();
        assert!((inner_product(&w, &w).unwrap() - purity(&bell)).abs() < 1e-12);
    }

    #[test]
    fn line_marginals_of_bell_match_born_tables() {
        let w = wigner(&bell_state()).unwrap();

        let qq = line_marginal(&w, &[Axis::Q, Axis::Q]).unwrap();
        assert_eq!(qq.probs(), &[0.5, 0.0, 0.0, 0.5]);

        let qp = line_marginal(&w, &[Axis::Q, Axis::P]).unwrap();
        for v in qp.probs() {
            assert!((v - 0.25).abs() < 1e-12);
        }

        let pp = line_marginal(&w, &[Axis::P, Axis::P]).unwrap();
        assert_eq!(pp.probs(), &[0.5, 0.0, 0.0, 0.5]);

        assert!(line_marginal(&w, &[Axis::Q]).is_err());
    }

    #[test]
    fn tensor_structure_carries_to_operators() {
        let a = phase_point_operator(&PhasePoint::new(vec![(0, 1), (1, 0)]).unwrap());
        let b = tensor(
            &single_qubit_phase_point(0, 1),
            &single_qubit_phase_point(1, 0),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn csv_has_header_and_one_row_per_point() {
        let w = wigner(&bell_state()).unwrap();
        let csv = w.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "q1,p1,q2,p2,value");
        assert_eq!(lines.len(), 17);
        assert_eq!(lines.iter().filter(|l| l.ends_with("-0.125")).count(), 4);
        assert_eq!(lines[1], "0,0,0,0,0.125");
        assert_eq!(lines[4], "0,0,1,1,-0.125");
    }

    #[test]
    fn ascii_grid_lays_out_rows_by_q() {
        let rho = density_from_vector(&basis_state_q(0, 2).unwrap()).unwrap();
        let grid = wigner(&rho).unwrap().to_ascii();
        let lines: Vec<&str> = grid.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("q\\p"));
        assert_eq!(lines[1], "   0   0.500   0.500");
        assert_eq!(lines[2], "   1   0.000   0.000");
    }

    #[test]
    fn wigner_json_round_trips() {
        let w = wigner(&bell_state()).unwrap();
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.starts_with(r#"{"num_qubits":2,"values":[0.125"#));
        let back: WignerFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<WignerFunction>(r#"{"num_qubits":2,"values":[0.5]}"#)
            .is_err());
    }
}
