//! Joint distributions over binary observables, the classic (Bayesian)
//! collapse update, the bridge between Wigner tables and joint probabilities,
//! the quantum collapse update, and seeded outcome sampling.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::{PhasePoint, WignerFunction};

/// Entries may dip this far below zero from roundoff before being clamped.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
/// Distributions must sum to 1 within this before exact renormalization.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Outcomes with prior probability at or below this are impossible.
pub const ZERO_PRIOR: f64 = 1e-12;

/// Phase-space axis of an observable: position-like Q or momentum-like P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Q,
    P,
}

impl Axis {
    pub fn conjugate(self) -> Axis {
        match self {
            Axis::Q => Axis::P,
            Axis::P => Axis::Q,
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Q => write!(f, "Q"),
            Axis::P => write!(f, "P"),
        }
    }
}

/// A discrete observable: an axis on one subsystem, e.g. Q₁ or P₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservableId {
    pub subsystem: usize,
    pub axis: Axis,
}

impl ObservableId {
    pub fn new(subsystem: usize, axis: Axis) -> Self {
        assert!(subsystem >= 1, "subsystems are 1-indexed");
        Self { subsystem, axis }
    }
}

impl std::fmt::Display for ObservableId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.axis, self.subsystem)
    }
}

impl std::str::FromStr for ObservableId {
    type Err = Error;

    /// Parses names like `Q1` or `P2`.
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let axis = match chars.next() {
            Some('Q') | Some('q') => Axis::Q,
            Some('P') | Some('p') => Axis::P,
            _ => return Err(Error::UnknownVariable(s.to_string())),
        };
        let subsystem: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::UnknownVariable(s.to_string()))?;
        if subsystem == 0 {
            return Err(Error::UnknownVariable(s.to_string()));
        }
        Ok(ObservableId { subsystem, axis })
    }
}

/// A random variable of a joint distribution: a physical observable, or an
/// abstract named variable for purely classical tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Variable {
    Observable(ObservableId),
    Named(String),
}

impl Variable {
    pub fn observable(subsystem: usize, axis: Axis) -> Self {
        Variable::Observable(ObservableId::new(subsystem, axis))
    }

    pub fn named(name: impl Into<String>) -> Self {
        Variable::Named(name.into())
    }

    pub fn as_observable(&self) -> Option<ObservableId> {
        match self {
            Variable::Observable(obs) => Some(*obs),
            Variable::Named(_) => None,
        }
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variable::Observable(obs) => write!(f, "{obs}"),
            Variable::Named(name) => write!(f, "{name}"),
        }
    }
}

impl From<ObservableId> for Variable {
    fn from(obs: ObservableId) -> Self {
        Variable::Observable(obs)
    }
}

/// Normalized joint probability table over binary variables.
///
/// `probs` is indexed lexicographically by the outcome tuple, first variable
/// most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    variables: Vec<Variable>,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Validates and exactly renormalizes a probability table.
    ///
    /// Entries as low as −[`NEGATIVE_CLAMP`] are treated as roundoff and
    /// clamped to zero; anything lower is rejected.
    pub fn new(variables: Vec<Variable>, probs: Vec<f64>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Domain("distribution needs at least one variable".into()));
        }
        if variables.len() > 16 {
            return Err(Error::Domain(format!(
                "at most 16 variables supported, got {}",
                variables.len()
            )));
        }
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(Error::Domain(format!("duplicate variable {v}")));
            }
        }
        if probs.len() != 1 << variables.len() {
            return Err(Error::Domain(format!(
                "expected {} probabilities for {} binary variables, got {}",
                1usize << variables.len(),
                variables.len(),
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < -NEGATIVE_CLAMP) {
            return Err(Error::Domain(format!("negative probability {bad}")));
        }
        let mut probs: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        if sum != 1.0 {
            for p in probs.iter_mut() {
                *p /= sum;
            }
        }
        Ok(Self { variables, probs })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn position(&self, var: &Variable) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    /// Probability of a full outcome tuple, one bit per variable.
    pub fn prob(&self, outcomes: &[u8]) -> f64 {
        assert_eq!(outcomes.len(), self.variables.len(), "outcome arity");
        let idx = outcomes
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        self.probs[idx]
    }

    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len(), "table size mismatch");
        self.probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sums out every variable not in `keep`; the output variable order is
    /// the order of `keep`.
    pub fn marginal(&self, keep: &[Variable]) -> Result<JointDistribution> {
        if keep.is_empty() {
            return Err(Error::Domain("marginal needs at least one variable".into()));
        }
        let mut positions = Vec::with_capacity(keep.len());
        for var in keep {
            match self.position(var) {
                Some(pos) => {
                    if positions.contains(&pos) {
                        return Err(Error::Domain(format!("duplicate variable {var}")));
                    }
                    positions.push(pos);
                }
                None => return Err(Error::UnknownVariable(var.to_string())),
            }
        }
        let k = self.variables.len();
        let mut probs = vec![0.0; 1 << keep.len()];
        for (idx, &p) in self.probs.iter().enumerate() {
            let out_idx = positions
                .iter()
                .fold(0usize, |acc, &pos| (acc << 1) | ((idx >> (k - 1 - pos)) & 1));
            probs[out_idx] += p;
        }
        JointDistribution::new(keep.to_vec(), probs)
    }

    /// Classic-collapse update: after observing `var` = `outcome`, the table
    /// becomes δ(var, outcome) times the conditional of the rest.
    pub fn classic_collapse(&self, var: &Variable, outcome: u8) -> Result<JointDistribution> {
        if outcome > 1 {
            return Err(Error::Domain(format!("outcome must be a bit, got {outcome}")));
        }
        let pos = self
            .position(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let k = self.variables.len();
        let prior: f64 = self
            .probs
            .iter()
            .enumerate()
            .filter(|(idx, _)| ((idx >> (k - 1 - pos)) & 1) as u8 == outcome)
            .map(|(_, p)| p)
            .sum();
        if prior <= ZERO_PRIOR {
            return Err(Error::ImpossibleOutcome {
                variable: var.to_string(),
                outcome,
                prior,
            });
        }
        let already_collapsed = self
            .probs
            .iter()
            .enumerate()
            .all(|(idx, &p)| p == 0.0 || ((idx >> (k - 1 - pos)) & 1) as u8 == outcome);
        if already_collapsed {
            // conditioning on a certainty is the identity, bit for bit
            return Ok(self.clone());
        }
        let probs: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(idx, &p)| {
                if ((idx >> (k - 1 - pos)) & 1) as u8 == outcome {
                    p / prior
                } else {
                    0.0
                }
            })
            .collect();
        JointDistribution::new(self.variables.clone(), probs)
    }
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    variables: Vec<Variable>,
    probs: Vec<f64>,
}

impl Serialize for JointDistribution {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        RawDistribution {
            variables: self.variables.clone(),
            probs: self.probs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawDistribution::deserialize(deserializer)?;
        JointDistribution::new(raw.variables, raw.probs).map_err(D::Error::custom)
    }
}

/// One recorded measurement: which variable, which outcome, and the outcome's
/// pre-measurement marginal probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseEvent {
    pub variable: Variable,
    pub outcome: u8,
    pub prior_prob: f64,
}

/// Wigner value of the single-qubit basis state: ½δ on the axis coordinate.
fn basis_wigner_value(axis: Axis, outcome: u8, q: u8, p: u8) -> f64 {
    let coord = match axis {
        Axis::Q => q,
        Axis::P => p,
    };
    if coord == outcome {
        0.5
    } else {
        0.0
    }
}

/// Born marginal of a single observable, summed straight off the Wigner table.
pub fn observable_marginal(w: &WignerFunction, obs: ObservableId) -> Result<JointDistribution> {
    if obs.subsystem > w.num_qubits() {
        return Err(Error::Domain(format!(
            "observable {obs} addresses subsystem {} of a {}-qubit state",
            obs.subsystem,
            w.num_qubits()
        )));
    }
    let mut probs = [0.0; 2];
    for (point, value) in w.iter_points() {
        let (q, p) = point.coords()[obs.subsystem - 1];
        let bit = match obs.axis {
            Axis::Q => q,
            Axis::P => p,
        };
        probs[bit as usize] += value;
    }
    JointDistribution::new(vec![Variable::Observable(obs)], probs.to_vec())
}

/// Joint probability of a commuting pair (X₁, Y₂) from the inner-product
/// rule: P(x₁,y₂) = N Σ_α W_{|x₁,y₂⟩}(α) W(α).
///
/// Two independent routes reach this table; it must agree with
/// [`crate::phasespace::line_marginal`] on the same axes.
pub fn joint_prob(
    w: &WignerFunction,
    x_axis: ObservableId,
    y_axis: ObservableId,
) -> Result<JointDistribution> {
    if w.num_qubits() != 2 {
        return Err(Error::UnsupportedArity {
            op: "joint_prob",
            required: "exactly 2",
            actual: w.num_qubits(),
        });
    }
    if x_axis.subsystem != 1 || y_axis.subsystem != 2 {
        return Err(Error::Domain(format!(
            "joint_prob takes one observable per subsystem in order, got ({x_axis}, {y_axis})"
        )));
    }
    let big_n = 4.0;
    let mut probs = vec![0.0; 4];
    for a in 0..2u8 {
        for b in 0..2u8 {
            let mut acc = 0.0;
            for (point, value) in w.iter_points() {
                let (q1, p1) = point.coords()[0];
                let (q2, p2) = point.coords()[1];
                acc += basis_wigner_value(x_axis.axis, a, q1, p1)
                    * basis_wigner_value(y_axis.axis, b, q2, p2)
                    * value;
            }
            probs[((a << 1) | b) as usize] = big_n * acc;
        }
    }
    JointDistribution::new(
        vec![Variable::Observable(x_axis), Variable::Observable(y_axis)],
        probs,
    )
}

/// Wigner function of the product-basis mixture Σ P(x) |x⟩⟨x|.
///
/// The distribution's variables must be one observable per subsystem, in
/// subsystem order; the observables' axes pick the product basis.
pub fn mix_from_probs(p: &JointDistribution) -> Result<WignerFunction> {
    let n = p.num_variables();
    let mut axes = Vec::with_capacity(n);
    for (i, var) in p.variables().iter().enumerate() {
        match var.as_observable() {
            Some(obs) if obs.subsystem == i + 1 => axes.push(obs.axis),
            _ => {
                return Err(Error::Domain(format!(
                    "mix_from_probs needs one observable per subsystem in order, got {var} at position {i}"
                )))
            }
        }
    }
    let mut values = vec![0.0; 1 << (2 * n)];
    for (idx, value) in values.iter_mut().enumerate() {
        let point = PhasePoint::from_index(idx, n);
        let mut acc = 0.0;
        for (out_idx, &prob) in p.probs().iter().enumerate() {
            if prob == 0.0 {
                continue;
            }
            let mut weight = prob;
            for (i, &axis) in axes.iter().enumerate() {
                let bit = ((out_idx >> (n - 1 - i)) & 1) as u8;
                let (q, p_coord) = point.coords()[i];
                weight *= 2.0 * basis_wigner_value(axis, bit, q, p_coord);
            }
            // the factor 2ⁿ is divided back out so each basis table keeps
            // its 1/2-per-qubit normalization
            acc += weight / (1u64 << n) as f64;
        }
        *value = acc;
    }
    WignerFunction::new(n, values)
}

/// Quantum-collapse update: measuring one qubit's observable rebuilds the
/// state from the collapsed joint probabilities over a product basis,
/// W_b(α) = Σ δ(x₁,x̃₁) P_a(y₂|x̃₁) W_{|x₁,y₂⟩}(α).
///
/// `companion_axis` selects the basis axis of the unmeasured qubit (the sum
/// index written y₂; the printed index y₁ is a typo for it). For a
/// single-qubit state the companion is irrelevant and the result is the
/// basis-state table ½δ.
pub fn quantum_collapse(
    w: &WignerFunction,
    measured: ObservableId,
    outcome: u8,
    companion_axis: Axis,
) -> Result<WignerFunction> {
    match w.num_qubits() {
        1 => {
            if measured.subsystem != 1 {
                return Err(Error::Domain(format!(
                    "observable {measured} addresses subsystem {} of a 1-qubit state",
                    measured.subsystem
                )));
            }
            let before = observable_marginal(w, measured)?;
            let after = before.classic_collapse(&Variable::Observable(measured), outcome)?;
            mix_from_probs(&after)
        }
        2 => {
            let (x_axis, y_axis) = match measured.subsystem {
                1 => (measured, ObservableId::new(2, companion_axis)),
                2 => (ObservableId::new(1, companion_axis), measured),
                other => {
                    return Err(Error::Domain(format!(
                        "observable {measured} addresses subsystem {other} of a 2-qubit state"
                    )))
                }
            };
            let before = joint_prob(w, x_axis, y_axis)?;
            let after = before.classic_collapse(&Variable::Observable(measured), outcome)?;
            mix_from_probs(&after)
        }
        n => Err(Error::UnsupportedArity {
            op: "quantum_collapse",
            required: "at most 2",
            actual: n,
        }),
    }
}

/// Draws an outcome for `var` from its marginal by inverse CDF over the
/// outcome order (0 then 1). Deterministic for a fixed seed.
pub fn sample_outcome(
    p: &JointDistribution,
    var: &Variable,
    seed: u64,
) -> Result<CollapseEvent> {
    let marginal = p.marginal(std::slice::from_ref(var))?;
    let u: f64 = StdRng::seed_from_u64(seed).gen();
    let outcome = u8::from(u >= marginal.probs()[0]);
    Ok(CollapseEvent {
        variable: var.clone(),
        outcome,
        prior_prob: marginal.probs()[outcome as usize],
    })
}
