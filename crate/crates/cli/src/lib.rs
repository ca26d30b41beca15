//! Command-line front end for the ancilla preparation simulator.

pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ancilla_core::dots::{
    closed_form_pair_pulse_count, closed_form_pulse_count, compile_pair_schedule, compile_schedule,
    emit_photons, execute, DotArray, PulseSchedule,
};
use ancilla_core::pipeline::{
    build_entangled_pair, build_single_register, direct_oracle_pair, direct_oracle_single,
    AmplitudeProfile, PhaseMethod,
};
use ancilla_core::resources::{expected_attempts, failure_scaling, gate_counts_with};
use ancilla_core::teleport::{cz_via_double_teleportation, Classification, Qubit, Teleporter};
use ancilla_core::SparseState;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use output::{write_atomic, Destination};

/// Exit code for a completed run that met every tolerance.
pub const EXIT_OK: i32 = 0;
/// Exit code for a completed run with a fidelity below tolerance.
pub const EXIT_TOLERANCE: i32 = 1;
/// Exit code for usage errors and invalid input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ancilla", version, about = "Exact simulator for entangled photon ancilla states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a register state through the gate pipeline and compare it with the oracle.
    Build(BuildArgs),
    /// Fidelity between two state files.
    Verify(VerifyArgs),
    /// Teleport one qubit through a single-register ancilla.
    Teleport(TeleportArgs),
    /// Controlled-sign gate by double teleportation over basis and |+⟩ inputs.
    Czgate(CzArgs),
    /// Compile, execute and emit a quantum-dot pulse schedule.
    Dots(DotsArgs),
    /// Gate counts and success probabilities.
    Resources(ResourcesArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Pairwise,
    Parity,
    Oracle,
}

impl Method {
    fn phase_method(self) -> PhaseMethod {
        match self {
            Method::Pairwise => PhaseMethod::PairwiseGates,
            Method::Parity => PhaseMethod::ParityAncilla,
            Method::Oracle => PhaseMethod::DirectOracle,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Method::Pairwise => "pairwise",
            Method::Parity => "parity",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// Photons per register; may be omitted when the profile file supplies it.
    #[arg(long)]
    pub n: Option<usize>,
    /// `constant`, `delta`, or a path to a profile JSON file.
    #[arg(long, default_value = "constant")]
    pub profile: String,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_enum, default_value = "parity")]
    pub method: Method,
    /// Build one x,y register instead of the entangled pair.
    #[arg(long)]
    pub single: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub left: PathBuf,
    pub right: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TeleportArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Input amplitudes `alpha,beta`; complex values such as `0.6+0.8i` are accepted.
    #[arg(long, default_value = "1,0")]
    pub input: String,
    /// Ancilla state file; the pipeline-built register is used otherwise.
    #[arg(long)]
    pub ancilla: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CzArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_enum, default_value = "parity")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DotsArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Prepare the entangled pair instead of one register.
    #[arg(long)]
    pub pair: bool,
    /// Same-register interaction phase, cancelled by the correction pulse.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Execute this JSONL schedule instead of compiling one.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Write the compiled schedule as JSONL.
    #[arg(long)]
    pub schedule_out: Option<PathBuf>,
    /// Write the emitted photon state as JSON.
    #[arg(long)]
    pub state_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ResourcesArgs {
    /// Smallest n of the table.
    #[arg(long)]
    pub n: usize,
    /// Largest n of the table; defaults to `--n`.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Phase methods to report; repeat or comma-separate.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Pairwise, Method::Parity])]
    pub method: Vec<Method>,
    /// Success probability of one post-selected gate.
    #[arg(long, default_value_t = 0.25)]
    pub p: f64,
    /// Monte Carlo trials per row; 0 skips sampling.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Tolerance(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Tolerance(m) => write!(f, "tolerance not met: {m}"),
        }
    }
}

impl From<ancilla_core::Error> for Failure {
    fn from(e: ancilla_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Build(a) => build(a),
        Command::Verify(a) => verify(a),
        Command::Teleport(a) => teleport(a),
        Command::Czgate(a) => czgate(a),
        Command::Dots(a) => dots(a),
        Command::Resources(a) => resources(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{f}");
            match f {
                Failure::Usage(_) => EXIT_USAGE,
                Failure::Tolerance(_) => EXIT_TOLERANCE,
            }
        }
    }
}

fn check_tolerance(tol: f64) -> Outcome {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_fidelity(what: &str, fidelity: f64, tol: f64) -> Outcome {
    if 1.0 - fidelity <= tol {
        Ok(())
    } else {
        Err(Failure::Tolerance(format!("{what} fidelity {fidelity} below 1 - {tol:e}")))
    }
}

fn load_profile(args: &ProfileArgs) -> std::result::Result<AmplitudeProfile, Failure> {
    if args.n == Some(0) {
        return Err(Failure::Usage("--n must be at least 1".to_string()));
    }
    let need_n = || {
        args.n
            .ok_or_else(|| Failure::Usage(format!("--n is required with --profile {}", args.profile)))
    };
    let prof = match args.profile.as_str() {
        "constant" => AmplitudeProfile::constant(need_n()?)?,
        "delta" => AmplitudeProfile::delta(need_n()?)?,
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read profile {path}: {e}")))?;
            let prof = AmplitudeProfile::from_json(&text)?;
            if let Some(n) = args.n {
                if n != prof.n() {
                    return Err(Failure::Usage(format!("--n {n} disagrees with profile n = {}", prof.n())));
                }
            }
            prof
        }
    };
    Ok(prof)
}

fn read_state(path: &Path) -> std::result::Result<SparseState, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read state {}: {e}", path.display())))?;
    Ok(SparseState::from_json(&text)?)
}

fn parse_qubit(text: &str) -> std::result::Result<Qubit, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Failure::Usage(format!("--input expects `alpha,beta`, got {text:?}")));
    }
    let parse = |s: &str| {
        Complex64::from_str(s).map_err(|_| Failure::Usage(format!("invalid amplitude {s:?}")))
    };
    Ok(Qubit::normalized(parse(parts[0])?, parse(parts[1])?)?)
}

fn csv_string<F>(header: &[&str], fill: F) -> std::result::Result<String, Failure>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> std::result::Result<(), Failure>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Usage(e.to_string()))
}

fn json_string<T: Serialize>(value: &T) -> std::result::Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn counts_label(counts: &[u32]) -> String {
    counts.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn build(a: &BuildArgs) -> Outcome {
    check_tolerance(a.tolerance)?;
    let prof = load_profile(&a.profile)?;
    let n = prof.n();
    let (prepared, oracle, label) = if a.single {
        (build_single_register(&prof)?, direct_oracle_single(&prof), "single".to_string())
    } else {
        let built = build_entangled_pair(&prof, a.method.phase_method())?;
        (built, direct_oracle_pair(&prof), a.method.name().to_string())
    };
    let fidelity = prepared.state.fidelity(&oracle)?;
    let dest = Destination::resolve(a.out.as_deref(), &format!("build-n{n}-{label}.json"));
    dest.write(&(prepared.state.to_json() + "\n"))?;
    let t = prepared.tally;
    eprintln!(
        "n={n} kind={label} terms={} fidelity={fidelity} conditional_transfers={} controlled_signs={} cnots={} toffolis={}",
        prepared.state.len(),
        t.conditional_transfers,
        t.controlled_signs,
        t.cnots,
        t.toffolis
    );
    check_fidelity("build", fidelity, a.tolerance)
}

#[derive(Serialize)]
struct VerifyReport {
    left: String,
    right: String,
    modes: usize,
    fidelity: f64,
}

fn verify(a: &VerifyArgs) -> Outcome {
    check_tolerance(a.tolerance)?;
    let left = read_state(&a.left)?;
    let right = read_state(&a.right)?;
    let fidelity = left.fidelity(&right)?;
    let report = VerifyReport {
        left: a.left.display().to_string(),
        right: a.right.display().to_string(),
        modes: left.modes(),
        fidelity,
    };
    Destination::resolve(a.out.as_deref(), "verify.json").write(&json_string(&report)?)?;
    check_fidelity("verify", fidelity, a.tolerance)
}

fn teleport(a: &TeleportArgs) -> Outcome {
    check_tolerance(a.tolerance)?;
    let prof = load_profile(&a.profile)?;
    let n = prof.n();
    let q = parse_qubit(&a.input)?;
    let ancilla = match &a.ancilla {
        Some(p) => read_state(p)?,
        None => build_single_register(&prof)?.state,
    };
    let report = Teleporter::new(n)?.teleport(&q, &ancilla)?;
    let body = match a.format {
        Format::Json => json_string(&report)?,
        Format::Csv => csv_string(
            &["outcome_counts", "k", "probability", "classification", "fidelity"],
            |w| {
                for o in &report.outcomes {
                    let class = match o.classification {
                        Classification::Success { register } => format!("success y{register}"),
                        Classification::Failure => "failure".to_string(),
                    };
                    let fid = o.fidelity.map(num).unwrap_or_default();
                    w.write_record([
                        counts_label(&o.counts),
                        o.k.to_string(),
                        num(o.probability),
                        class,
                        fid,
                    ])?;
                }
                Ok(())
            },
        )?,
    };
    let name = format!("teleport-n{n}.{}", a.format.ext());
    Destination::resolve(a.out.as_deref(), &name).write(&body)?;
    eprintln!(
        "n={n} success_probability={} failure_probability={} min_fidelity={} unresolved={}",
        report.success_probability,
        report.failure_probability,
        report.min_fidelity,
        report.unresolved.len()
    );
    check_fidelity("teleport", report.min_fidelity, a.tolerance)
}

#[derive(Serialize)]
struct CzRow {
    input: &'static str,
    success_probability: f64,
    failure_probability: f64,
    min_fidelity: f64,
    outcomes: usize,
    unresolved: usize,
}

fn czgate(a: &CzArgs) -> Outcome {
    check_tolerance(a.tolerance)?;
    let prof = load_profile(&a.profile)?;
    let n = prof.n();
    let pair = build_entangled_pair(&prof, a.method.phase_method())?.state;
    let tp = Teleporter::new(n)?;
    let inputs = [
        ("00", Qubit::zero(), Qubit::zero()),
        ("01", Qubit::zero(), Qubit::one()),
        ("10", Qubit::one(), Qubit::zero()),
        ("11", Qubit::one(), Qubit::one()),
        ("++", Qubit::plus(), Qubit::plus()),
    ];
    let mut rows = Vec::new();
    for (label, q1, q2) in inputs {
        let rep = cz_via_double_teleportation(&tp, &q1, &q2, &pair)?;
        rows.push(CzRow {
            input: label,
            success_probability: rep.success_probability,
            failure_probability: rep.failure_probability,
            min_fidelity: rep.min_fidelity,
            outcomes: rep.outcomes.len(),
            unresolved: rep.unresolved.len(),
        });
    }
    let body = match a.format {
        Format::Json => json_string(&rows)?,
        Format::Csv => csv_string(
            &["input", "success_probability", "failure_probability", "min_fidelity", "outcomes", "unresolved"],
            |w| {
                for r in &rows {
                    w.write_record([
                        r.input.to_string(),
                        num(r.success_probability),
                        num(r.failure_probability),
                        num(r.min_fidelity),
                        r.outcomes.to_string(),
                        r.unresolved.to_string(),
                    ])?;
                }
                Ok(())
            },
        )?,
    };
    let name = format!("czgate-n{n}-{}.{}", a.method.name(), a.format.ext());
    Destination::resolve(a.out.as_deref(), &name).write(&body)?;
    let worst = rows.iter().map(|r| r.min_fidelity).fold(1.0, f64::min);
    check_fidelity("czgate", worst, a.tolerance)
}

#[derive(Serialize)]
struct DotsReport {
    n: usize,
    registers: usize,
    lambda: f64,
    pulses: usize,
    closed_form_pulses: usize,
    terms: usize,
    fidelity: f64,
}

fn dots(a: &DotsArgs) -> Outcome {
    check_tolerance(a.tolerance)?;
    let prof = load_profile(&a.profile)?;
    let n = prof.n();
    let (array, oracle, closed) = if a.pair {
        (DotArray::pair(n), direct_oracle_pair(&prof), closed_form_pair_pulse_count(n))
    } else {
        (DotArray::single(n), direct_oracle_single(&prof), closed_form_pulse_count(n))
    };
    let schedule = match &a.schedule {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("cannot read schedule {}: {e}", p.display())))?;
            PulseSchedule::from_jsonl(&text)?
        }
        None if a.pair => compile_pair_schedule(&prof, a.lambda)?,
        None => compile_schedule(&prof)?,
    };
    if let Some(p) = &a.schedule_out {
        write_atomic(p, &schedule.to_jsonl())?;
    }
    let dots = execute(&array, &schedule, &array.empty())?;
    let photons = emit_photons(&dots, n)?;
    if let Some(p) = &a.state_out {
        write_atomic(p, &(photons.to_json() + "\n"))?;
    }
    let report = DotsReport {
        n,
        registers: if a.pair { 2 } else { 1 },
        lambda: a.lambda,
        pulses: schedule.len(),
        closed_form_pulses: closed,
        terms: photons.len(),
        fidelity: photons.fidelity(&oracle)?,
    };
    let body = match a.format {
        Format::Json => json_string(&report)?,
        Format::Csv => csv_string(
            &["n", "registers", "lambda", "pulses", "closed_form_pulses", "terms", "fidelity"],
            |w| {
                w.write_record([
                    report.n.to_string(),
                    report.registers.to_string(),
                    num(report.lambda),
                    report.pulses.to_string(),
                    report.closed_form_pulses.to_string(),
                    report.terms.to_string(),
                    num(report.fidelity),
                ])?;
                Ok(())
            },
        )?,
    };
    let kind = if a.pair { "pair" } else { "single" };
    let name = format!("dots-n{n}-{kind}.{}", a.format.ext());
    Destination::resolve(a.out.as_deref(), &name).write(&body)?;
    check_fidelity("dots", report.fidelity, a.tolerance)
}

#[derive(Serialize)]
struct ResourceRow {
    n: usize,
    method: &'static str,
    conditional_gates: usize,
    phase_gates: usize,
    total: usize,
    p: f64,
    success_probability: f64,
    klm_failure: f64,
    hf_failure: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_attempts: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_error: Option<f64>,
}

fn resources(a: &ResourcesArgs) -> Outcome {
    let hi = a.n_max.unwrap_or(a.n);
    if a.n == 0 || hi < a.n {
        return Err(Failure::Usage(format!("invalid n range {}..={hi}", a.n)));
    }
    let mut rows = Vec::new();
    for n in a.n..=hi {
        let scaling = failure_scaling(n)?;
        for &m in &a.method {
            let r = gate_counts_with(n, m.phase_method(), a.p)?;
            let sampled = if a.trials > 0 {
                Some(expected_attempts(n, m.phase_method(), a.p, a.trials, a.seed)?)
            } else {
                None
            };
            rows.push(ResourceRow {
                n,
                method: m.name(),
                conditional_gates: r.conditional_transfer_gates,
                phase_gates: r.phase_gates,
                total: r.total_gates,
                p: a.p,
                success_probability: r.success_probability,
                klm_failure: scaling.klm,
                hf_failure: scaling.high_fidelity,
                mean_attempts: sampled.map(|e| e.mean),
                standard_error: sampled.map(|e| e.standard_error),
            });
        }
    }
    let body = match a.format {
        Format::Json => json_string(&rows)?,
        Format::Csv => {
            let mut header = vec![
                "n",
                "method",
                "conditional_gates",
                "phase_gates",
                "total",
                "p",
                "success_probability",
                "klm_failure",
                "hf_failure",
            ];
            if a.trials > 0 {
                header.extend(["mean_attempts", "standard_error"]);
            }
            csv_string(&header, |w| {
                for r in &rows {
                    let mut rec = vec![
                        r.n.to_string(),
                        r.method.to_string(),
                        r.conditional_gates.to_string(),
                        r.phase_gates.to_string(),
                        r.total.to_string(),
                        num(r.p),
                        num(r.success_probability),
                        num(r.klm_failure),
                        num(r.hf_failure),
                    ];
                    if let (Some(m), Some(s)) = (r.mean_attempts, r.standard_error) {
                        rec.extend([num(m), num(s)]);
                    }
                    w.write_record(&rec)?;
                }
                Ok(())
            })?
        }
    };
    let name = format!("resources-n{}-{hi}.{}", a.n, a.format.ext());
    Destination::resolve(a.out.as_deref(), &name).write(&body)?;
    Ok(())
}
