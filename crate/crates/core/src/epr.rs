//! Scripted two-particle scenario engine: the perfectly correlated classical
//! pair and the entangled quantum pair, with measure-locality and
//! no-communication checkers producing structured reports.

use serde::{Deserialize, Serialize};

use crate::collapse::{
    joint_prob, observable_marginal, quantum_collapse, sample_outcome, Axis, CollapseEvent,
    JointDistribution, ObservableId, Variable,
};
use crate::error::{Error, Result};
use crate::phasespace::{wigner, WignerFunction};
use crate::qstate::bell_state;

/// Deviations above this flag a probe distribution as non-m-local.
pub const M_LOCALITY_TOL: f64 = 1e-9;
/// Tolerance for the no-communication marginal comparisons.
pub const NO_COMMUNICATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Classical,
    Quantum,
}

/// How a planned measurement fixes its outcome: a scripted bit, or a draw
/// from the current marginal with a deterministic seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeSpec {
    Fixed { outcome: u8 },
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    #[serde(flatten)]
    pub observable: ObservableId,
    #[serde(flatten)]
    pub outcome: OutcomeSpec,
}

impl PlanStep {
    pub fn fixed(observable: ObservableId, outcome: u8) -> Self {
        Self {
            observable,
            outcome: OutcomeSpec::Fixed { outcome },
        }
    }

    pub fn sampled(observable: ObservableId, seed: u64) -> Self {
        Self {
            observable,
            outcome: OutcomeSpec::Sampled { seed },
        }
    }
}

/// An ordered measurement plan over the two-particle state.
///
/// The canonical scenarios measure only subsystem 1 (Alice); measurements on
/// subsystem 2 are accepted and handled by symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub plan: Vec<PlanStep>,
}

/// State table at one step of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "table", rename_all = "lowercase")]
pub enum StepState {
    Classical(JointDistribution),
    Quantum(WignerFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub label: String,
    pub state: StepState,
    pub event: Option<CollapseEvent>,
}

/// Ordered log of states before and after each measurement event.
///
/// Step 0 holds the initial state and no event; every later step records
/// exactly one collapse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTrace {
    pub kind: ScenarioKind,
    pub steps: Vec<TraceStep>,
}

impl ScenarioTrace {
    pub fn initial_state(&self) -> &StepState {
        &self.steps[0].state
    }

    pub fn final_state(&self) -> &StepState {
        &self.steps[self.steps.len() - 1].state
    }

    pub fn events(&self) -> impl Iterator<Item = &CollapseEvent> {
        self.steps.iter().filter_map(|s| s.event.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "m-local")]
    MLocal,
    #[serde(rename = "non-m-local")]
    NonMLocal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::MLocal => write!(f, "m-local"),
            Verdict::NonMLocal => write!(f, "non-m-local"),
        }
    }
}

/// Side-by-side comparison of a probe distribution before a measurement,
/// its classic-update prediction, and the actual distribution after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MLocalityReport {
    pub axis_pair: (ObservableId, ObservableId),
    pub measured: ObservableId,
    pub outcome: u8,
    pub before: JointDistribution,
    pub classic_prediction: JointDistribution,
    pub after: JointDistribution,
    pub max_deviation: f64,
    pub verdict: Verdict,
}

/// Per-outcome branch of a no-communication report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoCommBranch {
    pub outcome: u8,
    pub prior_prob: f64,
    /// Partner marginals read off the post-measurement state.
    pub post_marginals: Vec<JointDistribution>,
    /// Classic-update conditionals from the pre-measurement pair joints.
    pub classic_conditionals: Vec<JointDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoCommunicationReport {
    pub measured: ObservableId,
    pub partner_subsystem: usize,
    pub pre_marginals: Vec<JointDistribution>,
    pub branches: Vec<NoCommBranch>,
    /// Partner marginals averaged over outcomes, weighted by prior.
    pub averaged_marginals: Vec<JointDistribution>,
    pub max_marginal_deviation: f64,
    pub max_conditional_deviation: f64,
    pub preserved: bool,
}

/// The perfectly correlated classical pair:
/// P(q₁,p₁,q₂,p₂) = ¼ δ(q₁,q₂) δ(p₁,p₂).
pub fn classical_epr_initial() -> JointDistribution {
    let variables = vec![
        Variable::observable(1, Axis::Q),
        Variable::observable(1, Axis::P),
        Variable::observable(2, Axis::Q),
        Variable::observable(2, Axis::P),
    ];
    let probs = (0..16)
        .map(|idx: usize| {
            let bit = |k: usize| (idx >> (3 - k)) & 1;
            if bit(0) == bit(2) && bit(1) == bit(3) {
                0.25
            } else {
                0.0
            }
        })
        .collect();
    JointDistribution::new(variables, probs).expect("correlated pair is a valid distribution")
}

fn step_label(index: usize) -> String {
    if index < 26 {
        char::from(b'a' + index as u8).to_string()
    } else {
        format!("step{index}")
    }
}

/// Runs a measurement plan, recording every intermediate state.
///
/// Classical scenarios start from the correlated pair and apply the classic
/// collapse; quantum scenarios start from the entangled pair's Wigner
/// function and apply the quantum collapse with the measured axis as the
/// companion axis on the unmeasured qubit.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioTrace> {
    for step in &scenario.plan {
        if step.observable.subsystem == 0 || step.observable.subsystem > 2 {
            return Err(Error::Domain(format!(
                "plan measures subsystem {}, only 1 and 2 exist",
                step.observable.subsystem
            )));
        }
        if let OutcomeSpec::Fixed { outcome } = step.outcome {
            if outcome > 1 {
                return Err(Error::Domain(format!(
                    "outcome must be a bit, got {outcome}"
                )));
            }
        }
    }

    let mut steps = Vec::with_capacity(scenario.plan.len() + 1);
    match scenario.kind {
        ScenarioKind::Classical => {
            let mut state = classical_epr_initial();
            steps.push(TraceStep {
                label: step_label(0),
                state: StepState::Classical(state.clone()),
                event: None,
            });
            for (i, step) in scenario.plan.iter().enumerate() {
                let var = Variable::Observable(step.observable);
                let event = match step.outcome {
                    OutcomeSpec::Fixed { outcome } => CollapseEvent {
                        variable: var.clone(),
                        outcome,
                        prior_prob: state.marginal(std::slice::from_ref(&var))?.probs()
                            [outcome as usize],
                    },
                    OutcomeSpec::Sampled { seed } => sample_outcome(&state, &var, seed)?,
                };
                state = state.classic_collapse(&var, event.outcome)?;
                steps.push(TraceStep {
                    label: step_label(i + 1),
                    state: StepState::Classical(state.clone()),
                    event: Some(event),
                });
            }
        }
        ScenarioKind::Quantum => {
            let mut state = wigner(&bell_state())?;
            steps.push(TraceStep {
                label: step_label(0),
                state: StepState::Quantum(state.clone()),
                event: None,
            });
            for (i, step) in scenario.plan.iter().enumerate() {
                let var = Variable::Observable(step.observable);
                let marginal = observable_marginal(&state, step.observable)?;
                let event = match step.outcome {
                    OutcomeSpec::Fixed { outcome } => CollapseEvent {
                        variable: var,
                        outcome,
                        prior_prob: marginal.probs()[outcome as usize],
                    },
                    OutcomeSpec::Sampled { seed } => sample_outcome(&marginal, &var, seed)?,
                };
                state = quantum_collapse(
                    &state,
                    step.observable,
                    event.outcome,
                    step.observable.axis,
                )?;
                steps.push(TraceStep {
                    label: step_label(i + 1),
                    state: StepState::Quantum(state.clone()),
                    event: Some(event),
                });
            }
        }
    }
    Ok(ScenarioTrace {
        kind: scenario.kind,
        steps,
    })
}

/// Variables of a probe pair; a repeated observable collapses to a singleton.
fn probe_variables(probe: (ObservableId, ObservableId)) -> Result<Vec<Variable>> {
    if probe.0 == probe.1 {
        return Ok(vec![Variable::Observable(probe.0)]);
    }
    if probe.0.subsystem == probe.1.subsystem {
        return Err(Error::Domain(format!(
            "probe pair ({}, {}) is not simultaneously measurable",
            probe.0, probe.1
        )));
    }
    Ok(vec![
        Variable::Observable(probe.0),
        Variable::Observable(probe.1),
    ])
}

/// Joint distribution of a probe pair in a given step state.
fn probe_joint(
    state: &StepState,
    probe: (ObservableId, ObservableId),
    vars: &[Variable],
) -> Result<JointDistribution> {
    match state {
        StepState::Classical(p) => p.marginal(vars),
        StepState::Quantum(w) => {
            if vars.len() == 1 {
                return observable_marginal(w, probe.0);
            }
            let (on_one, on_two) = if probe.0.subsystem == 1 {
                (probe.0, probe.1)
            } else {
                (probe.1, probe.0)
            };
            if on_one.subsystem != 1 || on_two.subsystem != 2 {
                return Err(Error::Domain(format!(
                    "probe pair ({}, {}) addresses subsystems outside the pair",
                    probe.0, probe.1
                )));
            }
            joint_prob(w, on_one, on_two)?.marginal(vars)
        }
    }
}

/// Classic-update prediction for a probe of a quantum state: condition the
/// joint of probe ∪ {measured} on the outcome when that set is
/// simultaneously measurable; otherwise no joint exists and the classic
/// expectation is an unchanged probe table.
fn quantum_classic_prediction(
    w: &WignerFunction,
    vars: &[Variable],
    measured: ObservableId,
    outcome: u8,
    before: &JointDistribution,
) -> Result<JointDistribution> {
    let mut augmented: Vec<ObservableId> =
        vars.iter().filter_map(Variable::as_observable).collect();
    if !augmented.contains(&measured) {
        augmented.push(measured);
    }
    let compatible = augmented
        .iter()
        .enumerate()
        .all(|(i, a)| augmented[..i].iter().all(|b| a.subsystem != b.subsystem));
    if !compatible {
        return Ok(before.clone());
    }
    let joint = match augmented.as_slice() {
        [single] => observable_marginal(w, *single)?,
        [a, b] => {
            let (on_one, on_two) = if a.subsystem == 1 { (*a, *b) } else { (*b, *a) };
            joint_prob(w, on_one, on_two)?
        }
        _ => unreachable!("at most one observable per subsystem"),
    };
    joint
        .classic_collapse(&Variable::Observable(measured), outcome)?
        .marginal(vars)
}

/// Checks one probe pair of a trace against the classic updating formula.
///
/// The comparison targets the first measurement of the trace: the probe's
/// joint before it, the classic-update prediction given the measured
/// variable and outcome, and the actual joint after it.
pub fn mlocality_check(
    trace: &ScenarioTrace,
    probe: (ObservableId, ObservableId),
) -> Result<MLocalityReport> {
    if trace.steps.len() < 2 {
        return Err(Error::Domain(
            "trace has no measurement step to check".into(),
        ));
    }
    let vars = probe_variables(probe)?;
    let event = trace.steps[1]
        .event
        .as_ref()
        .ok_or_else(|| Error::Domain("step b records no measurement event".into()))?;

    let before = probe_joint(&trace.steps[0].state, probe, &vars)?;
    let after = probe_joint(&trace.steps[1].state, probe, &vars)?;

    let classic_prediction = match &trace.steps[0].state {
        StepState::Classical(full) => full
            .classic_collapse(&event.variable, event.outcome)?
            .marginal(&vars)?,
        StepState::Quantum(w) => {
            let measured = event
                .variable
                .as_observable()
                .ok_or_else(|| Error::Domain("measured variable is not an observable".into()))?;
            quantum_classic_prediction(w, &vars, measured, event.outcome, &before)?
        }
    };

    let max_deviation = after.max_abs_diff(&classic_prediction);
    let verdict = if max_deviation > M_LOCALITY_TOL {
        Verdict::NonMLocal
    } else {
        Verdict::MLocal
    };
    let measured = event
        .variable
        .as_observable()
        .ok_or_else(|| Error::Domain("measured variable is not an observable".into()))?;
    Ok(MLocalityReport {
        axis_pair: probe,
        measured,
        outcome: event.outcome,
        before,
        classic_prediction,
        after,
        max_deviation,
        verdict,
    })
}

/// Verifies that measuring one qubit of the entangled pair leaves the other
/// party's outcome-averaged marginals unchanged, and that each conditional
/// marginal follows the classic updating formula.
pub fn no_communication_check(measured: ObservableId) -> Result<NoCommunicationReport> {
    if measured.subsystem != 1 && measured.subsystem != 2 {
        return Err(Error::Domain(format!(
            "measured observable {measured} must act on subsystem 1 or 2"
        )));
    }
    let partner_subsystem = 3 - measured.subsystem;
    let partner_obs = [
        ObservableId::new(partner_subsystem, Axis::Q),
        ObservableId::new(partner_subsystem, Axis::P),
    ];

    let w_a = wigner(&bell_state())?;
    let pre_marginals: Vec<JointDistribution> = partner_obs
        .iter()
        .map(|&obs| observable_marginal(&w_a, obs))
        .collect::<Result<_>>()?;
    let measured_marginal = observable_marginal(&w_a, measured)?;

    let mut branches = Vec::new();
    let mut averaged = vec![[0.0f64; 2]; partner_obs.len()];
    let mut max_conditional_deviation: f64 = 0.0;
    for outcome in 0..2u8 {
        let prior_prob = measured_marginal.probs()[outcome as usize];
        if prior_prob <= 1e-12 {
            continue;
        }
        let w_b = quantum_collapse(&w_a, measured, outcome, measured.axis)?;
        let mut post_marginals = Vec::with_capacity(partner_obs.len());
        let mut classic_conditionals = Vec::with_capacity(partner_obs.len());
        for (k, &obs) in partner_obs.iter().enumerate() {
            let post = observable_marginal(&w_b, obs)?;
            let pair = if measured.subsystem == 1 {
                joint_prob(&w_a, measured, obs)?
            } else {
                joint_prob(&w_a, obs, measured)?
            };
            let classic = pair
                .classic_collapse(&Variable::Observable(measured), outcome)?
                .marginal(&[Variable::Observable(obs)])?;
            max_conditional_deviation =
                max_conditional_deviation.max(post.max_abs_diff(&classic));
            for (bit, slot) in averaged[k].iter_mut().enumerate() {
                *slot += prior_prob * post.probs()[bit];
            }
            post_marginals.push(post);
            classic_conditionals.push(classic);
        }
        branches.push(NoCommBranch {
            outcome,
            prior_prob,
            post_marginals,
            classic_conditionals,
        });
    }

    let averaged_marginals: Vec<JointDistribution> = partner_obs
        .iter()
        .zip(averaged.iter())
        .map(|(&obs, probs)| {
            JointDistribution::new(vec![Variable::Observable(obs)], probs.to_vec())
        })
        .collect::<Result<_>>()?;
    let max_marginal_deviation = averaged_marginals
        .iter()
        .zip(pre_marginals.iter())
        .map(|(avg, pre)| avg.max_abs_diff(pre))
        .fold(0.0, f64::max);
    let preserved = max_marginal_deviation <= NO_COMMUNICATION_TOL
        && max_conditional_deviation <= NO_COMMUNICATION_TOL;

    Ok(NoCommunicationReport {
        measured,
        partner_subsystem,
        pre_marginals,
        branches,
        averaged_marginals,
        max_marginal_deviation,
        max_conditional_deviation,
        preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1() -> ObservableId {
        ObservableId::new(1, Axis::Q)
    }
    fn p1() -> ObservableId {
        ObservableId::new(1, Axis::P)
    }
    fn q2() -> ObservableId {
        ObservableId::new(2, Axis::Q)
    }
    fn p2() -> ObservableId {
        ObservableId::new(2, Axis::P)
    }

    fn classical_dist(trace: &ScenarioTrace, step: usize) -> &JointDistribution {
        match &trace.steps[step].state {
            StepState::Classical(p) => p,
            StepState::Quantum(_) => panic!("expected classical step"),
        }
    }

    fn quantum_table(trace: &ScenarioTrace, step: usize) -> &WignerFunction {
        match &trace.steps[step].state {
            StepState::Quantum(w) => w,
            StepState::Classical(_) => panic!("expected quantum step"),
        }
    }

    #[test]
    fn classical_initial_is_quarter_delta() {
        let p = classical_epr_initial();
        assert_eq!(p.prob(&[0, 1, 0, 1]), 0.25);
        assert_eq!(p.prob(&[0, 1, 1, 1]), 0.0);
        for var in [q2(), p2()] {
            let m = p.marginal(&[Variable::Observable(var)]).unwrap();
            assert_eq!(m.probs(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn classical_run_collapses_both_particles() {
        for outcome in 0..2u8 {
            let trace = run_scenario(&Scenario {
                kind: ScenarioKind::Classical,
                plan: vec![PlanStep::fixed(q1(), outcome)],
            })
            .unwrap();
            assert_eq!(trace.steps.len(), 2);
            assert_eq!(trace.steps[1].label, "b");
            let after = classical_dist(&trace, 1);
            for idx in 0..16usize {
                let bit = |k: usize| ((idx >> (3 - k)) & 1) as u8;
                let expected =
                    if bit(0) == outcome && bit(2) == outcome && bit(1) == bit(3) {
                        0.5
                    } else {
                        0.0
                    };
                assert_eq!(after.probs()[idx], expected);
            }
        }
    }

    #[test]
    fn consecutive_classical_run_reaches_four_deltas() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Classical,
            plan: vec![PlanStep::fixed(q1(), 1), PlanStep::fixed(p1(), 0)],
        })
        .unwrap();
        assert_eq!(trace.steps.len(), 3);
        let after = classical_dist(&trace, 2);
        for idx in 0..16usize {
            let bit = |k: usize| ((idx >> (3 - k)) & 1) as u8;
            let expected =
                if bit(0) == 1 && bit(2) == 1 && bit(1) == 0 && bit(3) == 0 { 1.0 } else { 0.0 };
            assert_eq!(after.probs()[idx], expected);
        }
    }

    #[test]
    fn quantum_run_erases_conjugate_correlations() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0)],
        })
        .unwrap();
        let after = quantum_table(&trace, 1);
        for (point, value) in after.iter_points() {
            let (qa, _) = point.coords()[0];
            let (qb, _) = point.coords()[1];
            let expected = if qa == 0 && qb == 0 { 0.25 } else { 0.0 };
            assert!((value - expected).abs() < 1e-12);
        }

        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(p1(), 1)],
        })
        .unwrap();
        let after = quantum_table(&trace, 1);
        for (point, value) in after.iter_points() {
            let (_, pa) = point.coords()[0];
            let (_, pb) = point.coords()[1];
            let expected = if pa == 1 && pb == 1 { 0.25 } else { 0.0 };
            assert!((value - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_probe_of_conjugate_pair_is_non_m_local() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0)],
        })
        .unwrap();
        let report = mlocality_check(&trace, (p1(), p2())).unwrap();
        assert_eq!(report.verdict, Verdict::NonMLocal);
        assert!((report.max_deviation - 0.25).abs() < 1e-12);
        assert_eq!(report.before.probs(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(report.classic_prediction.probs(), &[0.5, 0.0, 0.0, 0.5]);
        for v in report.after.probs() {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_probe_of_conjugate_pair_is_m_local() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Classical,
            plan: vec![PlanStep::fixed(q1(), 0)],
        })
        .unwrap();
        let report = mlocality_check(&trace, (p1(), p2())).unwrap();
        assert_eq!(report.verdict, Verdict::MLocal);
        assert!(report.max_deviation <= 1e-12);
        assert_eq!(report.after.probs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn quantum_probe_of_measured_pair_is_m_local() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 1)],
        })
        .unwrap();
        let report = mlocality_check(&trace, (q1(), q2())).unwrap();
        assert_eq!(report.verdict, Verdict::MLocal);
        assert!(report.max_deviation <= 1e-12);
        assert_eq!(report.after.probs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn probe_order_may_be_swapped() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0)],
        })
        .unwrap();
        let report = mlocality_check(&trace, (p2(), p1())).unwrap();
        assert!((report.max_deviation - 0.25).abs() < 1e-12);
        assert_eq!(report.axis_pair, (p2(), p1()));
    }

    #[test]
    fn incompatible_probe_is_rejected() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0)],
        })
        .unwrap();
        assert!(matches!(
            mlocality_check(&trace, (q1(), p1())),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn singleton_probe_tracks_bobs_marginal() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 1)],
        })
        .unwrap();
        let report = mlocality_check(&trace, (q2(), q2())).unwrap();
        // Bob's own q marginal follows the conditional formula: m-local.
        assert_eq!(report.verdict, Verdict::MLocal);
        assert_eq!(report.after.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn no_communication_holds_for_both_measurements() {
        for measured in [q1(), p1()] {
            let report = no_communication_check(measured).unwrap();
            assert!(report.preserved, "measured {measured}");
            assert!(report.max_marginal_deviation <= NO_COMMUNICATION_TOL);
            assert!(report.max_conditional_deviation <= NO_COMMUNICATION_TOL);
            for avg in &report.averaged_marginals {
                assert_eq!(avg.probs(), &[0.5, 0.5]);
            }
        }
    }

    #[test]
    fn no_communication_conditionals_follow_classic_update() {
        let report = no_communication_check(q1()).unwrap();
        for branch in &report.branches {
            // P(q₂|q̃₁) = δ(q₂,q̃₁), P(p₂|q̃₁) = ½.
            let q_post = &branch.post_marginals[0];
            assert_eq!(q_post.probs()[branch.outcome as usize], 1.0);
            let p_post = &branch.post_marginals[1];
            assert_eq!(p_post.probs(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn sampled_runs_are_reproducible() {
        let scenario = Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::sampled(q1(), 42)],
        };
        let a = run_scenario(&scenario).unwrap();
        let b = run_scenario(&scenario).unwrap();
        assert_eq!(a, b);
        let event = a.steps[1].event.as_ref().unwrap();
        assert_eq!(event.prior_prob, 0.5);
    }

    #[test]
    fn impossible_plan_propagates_collapse_error() {
        let scenario = Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0), PlanStep::fixed(q2(), 1)],
        };
        match run_scenario(&scenario) {
            Err(Error::ImpossibleOutcome { prior, .. }) => assert!(prior.abs() < 1e-12),
            other => panic!("expected impossible outcome, got {other:?}"),
        }
    }

    #[test]
    fn scenario_json_round_trips() {
        let scenario = Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0), PlanStep::sampled(p1(), 7)],
        };
        let json = serde_json::to_string(&scenario).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"quantum","plan":[{"subsystem":1,"axis":"Q","outcome":0},{"subsystem":1,"axis":"P","seed":7}]}"#
        );
        let back: Scenario = serde_json::from_str(&json).unwrap();
        assert_eq!(back, scenario);
    }

    #[test]
    fn trace_json_names_verdict_strings() {
        let trace = run_scenario(&Scenario {
            kind: ScenarioKind::Quantum,
            plan: vec![PlanStep::fixed(q1(), 0)],
        })
        .unwrap();
        let report = mlocality_check(&trace, (p1(), p2())).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains(r#""verdict":"non-m-local""#));
        let trace_json = serde_json::to_string(&trace).unwrap();
        assert!(trace_json.contains(r#""label":"a""#));
        assert!(trace_json.contains(r#""kind":"quantum""#));
        let back: ScenarioTrace = serde_json::from_str(&trace_json).unwrap();
        assert_eq!(back, trace);
    }
}
