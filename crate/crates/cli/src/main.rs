//! Command-line front end: build states, print Wigner tables and heatmaps,
//! apply measurements, run scripted two-particle scenarios, and emit
//! locality reports in JSON, CSV, or plain text.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qwig::collapse::{observable_marginal, sample_outcome, quantum_collapse};
use qwig::epr::{
    mlocality_check, no_communication_check, run_scenario, MLocalityReport, PlanStep, Scenario,
    ScenarioKind, ScenarioTrace,
};
use qwig::phasespace::wigner;
use qwig::qstate::{
    basis_state_p, basis_state_q, bell_state, density_from_vector, validate_density,
    validation_report,
};
use qwig::{
    Axis, CollapseEvent, Complex64, ComplexMatrix, DensityMatrix, ObservableId, ValidationReport,
    Variable, WignerFunction,
};

#[derive(Parser)]
#[command(
    name = "qwig",
    version,
    about = "Discrete phase-space toolkit: Wigner tables, measurement updating, two-particle locality checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and print it as JSON
    State(StateArgs),
    /// Compute a Wigner table and render it as JSON, CSV, or an ASCII grid
    Wigner(WignerArgs),
    /// Apply one measurement to a state and print before/event/after
    Measure(MeasureArgs),
    /// Run a scripted two-particle scenario with optional locality probes
    Epr(EprArgs),
    /// Consistency checks: no-communication report, or state-file validation
    Check(CheckArgs),
}

/// Exactly one of these flags selects the input state.
#[derive(Args)]
struct StateSource {
    /// Two-qubit maximally entangled pair
    #[arg(long)]
    bell: bool,
    /// Basis state written as AXIS=INDEX, e.g. q=0 or p=3
    #[arg(long, value_name = "AXIS=INDEX")]
    basis: Option<String>,
    /// Maximally mixed state I/2^n
    #[arg(long)]
    mixed: bool,
    /// Qubit count for --basis and --mixed
    #[arg(long)]
    n: Option<usize>,
    /// Density-matrix JSON file
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    source: StateSource,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Ascii,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    source: StateSource,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Q,
    P,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::Q => Axis::Q,
            AxisArg::P => Axis::P,
        }
    }
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    source: StateSource,
    /// Observable to measure, e.g. Q1 or P2
    #[arg(long)]
    observable: String,
    /// Scripted outcome bit
    #[arg(long, conflicts_with = "seed")]
    outcome: Option<u8>,
    /// Sample the outcome deterministically with this seed
    #[arg(long)]
    seed: Option<u64>,
    /// Basis axis for the unmeasured qubit; defaults to the measured axis
    #[arg(long, value_enum)]
    companion: Option<AxisArg>,
}

#[derive(Args)]
struct EprArgs {
    /// Entangled-pair scenario
    #[arg(long, conflicts_with_all = ["classical", "plan"])]
    quantum: bool,
    /// Correlated classical-pair scenario
    #[arg(long, conflicts_with = "plan")]
    classical: bool,
    /// Measurement, e.g. Q1=0 (scripted) or Q1 (sampled, needs --seed)
    #[arg(long = "measure", value_name = "OBS[=BIT]")]
    measures: Vec<String>,
    /// Base seed for sampled measurements; step i uses seed + i
    #[arg(long)]
    seed: Option<u64>,
    /// Probe pair for the m-locality report, e.g. P1,P2
    #[arg(long = "probe", value_name = "OBS,OBS")]
    probes: Vec<String>,
    /// Scenario JSON file ({"kind", "plan"}) instead of inline flags
    #[arg(long, value_name = "FILE")]
    plan: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Verify the no-communication property of the entangled pair
    #[arg(long = "no-communication", conflicts_with = "validate")]
    no_communication: bool,
    /// Measured observable for the no-communication check, e.g. Q1
    #[arg(long)]
    measure: Option<String>,
    /// Validate a density-matrix JSON file and print the defect report
    #[arg(long, value_name = "FILE")]
    validate: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Validation(String),
    ImpossibleOutcome(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::ImpossibleOutcome(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::ImpossibleOutcome(_) => 3,
        }
    }
}

impl From<qwig::Error> for CliError {
    fn from(e: qwig::Error) -> Self {
        match e {
            qwig::Error::ImpossibleOutcome { .. } => CliError::ImpossibleOutcome(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::State(args) => cmd_state(args),
        Command::Wigner(args) => cmd_wigner(args),
        Command::Measure(args) => cmd_measure(args),
        Command::Epr(args) => cmd_epr(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn parse_basis_spec(spec: &str) -> Result<(Axis, usize), CliError> {
    let (axis, index) = spec
        .split_once('=')
        .ok_or_else(|| usage(format!("--basis expects AXIS=INDEX, got `{spec}`")))?;
    let axis = match axis.trim() {
        "q" | "Q" => Axis::Q,
        "p" | "P" => Axis::P,
        other => return Err(usage(format!("basis axis must be q or p, got `{other}`"))),
    };
    let index: usize = index
        .trim()
        .parse()
        .map_err(|_| usage(format!("basis index must be an integer, got `{index}`")))?;
    Ok((axis, index))
}

fn read_state_file(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid state file {}: {e}", path.display())))
}

fn resolve_state(src: &StateSource) -> Result<DensityMatrix, CliError> {
    let picked = [src.bell, src.basis.is_some(), src.mixed, src.input.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if picked != 1 {
        return Err(usage(
            "pick exactly one state source: --bell, --basis, --mixed, or --in",
        ));
    }
    if src.bell {
        return Ok(bell_state());
    }
    if let Some(spec) = &src.basis {
        let n = src.n.ok_or_else(|| usage("--basis needs --n <qubits>"))?;
        if n == 0 || n > 32 {
            return Err(usage("--n must be between 1 and 8"));
        }
        let (axis, index) = parse_basis_spec(spec)?;
        let dim = 1usize << n;
        let vector = match axis {
            Axis::Q => basis_state_q(index, dim),
            Axis::P => basis_state_p(index, dim),
        }?;
        return Ok(density_from_vector(&vector)?);
    }
    if src.mixed {
        let n = src.n.ok_or_else(|| usage("--mixed needs --n <qubits>"))?;
        return Ok(DensityMatrix::maximally_mixed(n)?);
    }
    read_state_file(src.input.as_ref().expect("checked above"))
}

fn parse_observable(name: &str) -> Result<ObservableId, CliError> {
    name.parse()
        .map_err(|_| usage(format!("cannot parse observable `{name}`; use names like Q1 or P2")))
}

fn cmd_state(args: StateArgs) -> Result<(), CliError> {
    let state = resolve_state(&args.source)?;
    println!("{}", serde_json::to_string(&state).expect("serializable"));
    Ok(())
}

fn cmd_wigner(args: WignerArgs) -> Result<(), CliError> {
    let state = resolve_state(&args.source)?;
    let table = wigner(&state)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string(&table).expect("serializable")),
        Format::Csv => print!("{}", table.to_csv()),
        Format::Ascii => print!("{}", table.to_ascii()),
    }
    Ok(())
}

#[derive(Serialize)]
struct MeasureOutput {
    before: WignerFunction,
    event: CollapseEvent,
    after: WignerFunction,
}

fn cmd_measure(args: MeasureArgs) -> Result<(), CliError> {
    let state = resolve_state(&args.source)?;
    let observable = parse_observable(&args.observable)?;
    let before = wigner(&state)?;
    let marginal = observable_marginal(&before, observable)?;
    let event = match (args.outcome, args.seed) {
        (Some(bit), _) => {
            if bit > 1 {
                return Err(usage(format!("--outcome must be 0 or 1, got {bit}")));
            }
            CollapseEvent {
                variable: Variable::Observable(observable),
                outcome: bit,
                prior_prob: marginal.probs()[bit as usize],
            }
        }
        (None, Some(seed)) => {
            sample_outcome(&marginal, &Variable::Observable(observable), seed)?
        }
        (None, None) => return Err(usage("give --outcome <BIT> or --seed <SEED>")),
    };
    let companion = args
        .companion
        .map(Axis::from)
        .unwrap_or(observable.axis);
    let after = quantum_collapse(&before, observable, event.outcome, companion)?;
    let output = MeasureOutput {
        before,
        event,
        after,
    };
    println!("{}", serde_json::to_string(&output).expect("serializable"));
    Ok(())
}

fn parse_measure_spec(
    spec: &str,
    step_index: usize,
    base_seed: Option<u64>,
) -> Result<PlanStep, CliError> {
    match spec.split_once('=') {
        Some((obs, bit)) => {
            let observable = parse_observable(obs.trim())?;
            let outcome: u8 = bit
                .trim()
                .parse()
                .map_err(|_| usage(format!("outcome must be 0 or 1, got `{bit}`")))?;
            if outcome > 1 {
                return Err(usage(format!("outcome must be 0 or 1, got {outcome}")));
            }
            Ok(PlanStep::fixed(observable, outcome))
        }
        None => {
            let observable = parse_observable(spec.trim())?;
            let seed = base_seed
                .ok_or_else(|| usage("sampled measurements (no =BIT) need --seed"))?;
            Ok(PlanStep::sampled(observable, seed + step_index as u64))
        }
    }
}

fn parse_probe(spec: &str) -> Result<(ObservableId, ObservableId), CliError> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| usage(format!("--probe expects OBS,OBS, got `{spec}`")))?;
    Ok((parse_observable(a.trim())?, parse_observable(b.trim())?))
}

#[derive(Serialize, Deserialize)]
struct EprOutput {
    trace: ScenarioTrace,
    reports: Vec<MLocalityReport>,
}

fn cmd_epr(args: EprArgs) -> Result<(), CliError> {
    let scenario = if let Some(path) = &args.plan {
        if !args.measures.is_empty() {
            return Err(usage("--plan and --measure are mutually exclusive"));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("invalid scenario file {}: {e}", path.display()))
        })?
    } else {
        let kind = match (args.quantum, args.classical) {
            (true, false) => ScenarioKind::Quantum,
            (false, true) => ScenarioKind::Classical,
            _ => return Err(usage("pick exactly one of --quantum or --classical")),
        };
        let plan = args
            .measures
            .iter()
            .enumerate()
            .map(|(i, spec)| parse_measure_spec(spec, i, args.seed))
            .collect::<Result<Vec<_>, _>>()?;
        Scenario { kind, plan }
    };

    let trace = run_scenario(&scenario)?;
    let probes = args
        .probes
        .iter()
        .map(|spec| parse_probe(spec))
        .collect::<Result<Vec<_>, _>>()?;
    let mut reports = Vec::with_capacity(probes.len());
    for probe in &probes {
        reports.push(mlocality_check(&trace, *probe)?);
    }
    let output = EprOutput { trace, reports };
    println!("{}", serde_json::to_string(&output).expect("serializable"));
    for report in &output.reports {
        println!(
            "probe ({},{}): {}, max deviation {}",
            report.axis_pair.0, report.axis_pair.1, report.verdict, report.max_deviation
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    num_qubits: usize,
    report: ValidationReport,
}

#[derive(Deserialize)]
struct RawDensityFile {
    dim: usize,
    entries: Vec<[f64; 2]>,
    num_qubits: usize,
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    if args.no_communication {
        let name = args
            .measure
            .as_deref()
            .ok_or_else(|| usage("--no-communication needs --measure <OBS>"))?;
        let measured = parse_observable(name)?;
        let report = no_communication_check(measured)?;
        println!("{}", serde_json::to_string(&report).expect("serializable"));
        println!(
            "no-communication after measuring {}: {} (marginal deviation {}, conditional deviation {})",
            report.measured,
            if report.preserved { "preserved" } else { "VIOLATED" },
            report.max_marginal_deviation,
            report.max_conditional_deviation
        );
        return Ok(());
    }
    if let Some(path) = &args.validate {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let raw: RawDensityFile = serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("invalid state file {}: {e}", path.display()))
        })?;
        let entries = raw
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        let matrix = ComplexMatrix::new(raw.dim, entries).map_err(CliError::from)?;
        let (valid, report) = match validate_density(&matrix, raw.num_qubits) {
            Ok(_) => (true, validation_report(&matrix)),
            Err(qwig::Error::InvalidDensity(report)) => (false, report),
            Err(structural) => return Err(structural.into()),
        };
        let output = ValidateOutput {
            valid,
            num_qubits: raw.num_qubits,
            report,
        };
        println!("{}", serde_json::to_string(&output).expect("serializable"));
        if !valid {
            return Err(CliError::Validation(format!(
                "{} is not a valid density matrix: {}",
                path.display(),
                output.report
            )));
        }
        return Ok(());
    }
    Err(usage("pick one of --no-communication or --validate <FILE>"))
}
