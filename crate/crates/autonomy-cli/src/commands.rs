//! Command-line surface: argument parsing and subcommand execution.
//!
//! Exit codes: 0 on success, 1 when the verdict is below threshold (level 0
//! assessments, or any integrity event while monitoring), 2 on input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use autonomy_core::{
    assess, curtin_autonomy, doboli_integral, insaurralde_level, insaurralde_ratio,
    open_loop_displacement, reliability, responsiveness, sensitivity_sweep, AssessmentError,
    BaselineError, CurtinParams, EffortGrid, IntegrityError, IntegrityMonitor, MetricValue,
    ModelError, MonitorConfig, SweepRange, SystemSpec, TaskSpec,
};

use crate::doc::{parse_spec_file, DocError, InsufficientCell, SpecDocument};
use crate::generate::{generate, FaultProfile, GenerateError};
use crate::report;
use crate::scenario;
use crate::telemetry::{read_telemetry_file, write_telemetry, TelemetryError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_THRESHOLD: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "autonomy",
    version,
    about = "Requirement-based autonomy assessment and capability integrity monitoring"
)]
pub struct Cli {
    /// Reject documents with unknown fields instead of warning.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Seed for synthetic telemetry generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the machine-readable result (JSON or CSV) to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Spec document to load.
    #[arg(long, value_name = "PATH", conflicts_with = "scenario")]
    pub spec: Option<PathBuf>,
    /// Bundled scenario to load (see `scenario list`).
    #[arg(long, value_name = "NAME")]
    pub scenario: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a system against a task: level of autonomy and per-region
    /// degree of autonomy. Exit code 0 iff the level is at least 1.
    Assess {
        #[command(flatten)]
        source: SourceArgs,
        /// System to assess; all of the document's systems when omitted.
        #[arg(long)]
        system: Option<String>,
    },
    /// Replay a telemetry log through the integrity monitor. Exit code 0
    /// iff no integrity event fired.
    Monitor {
        #[command(flatten)]
        source: SourceArgs,
        /// Cross-check this system against the task before monitoring.
        #[arg(long)]
        system: Option<String>,
        /// Telemetry CSV (timestamp,capability,kind,value).
        #[arg(long, value_name = "PATH")]
        telemetry: PathBuf,
        /// Monitor against this region's local requirements instead of the
        /// essential (tightest) ones.
        #[arg(long)]
        region: Option<String>,
        /// Window length for gaussian-error capabilities (samples).
        #[arg(long)]
        window: Option<usize>,
        /// Window length for success capabilities (outcomes).
        #[arg(long)]
        outcome_window: Option<usize>,
        /// Time to alert for capabilities whose requirement omits one (s).
        #[arg(long)]
        default_tta: Option<f64>,
    },
    /// Generate seed-reproducible synthetic telemetry for a system.
    Generate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        system: String,
        /// Simulated duration in seconds.
        #[arg(long)]
        duration: f64,
        /// Fault injection, repeatable:
        /// `<capability>:step:<factor>@<start>` or
        /// `<capability>:ramp:<factor>@<start>..<end>`.
        #[arg(long = "fault", value_name = "PROFILE")]
        faults: Vec<String>,
    },
    /// Emit metric and degree curves as CSV.
    Sweep {
        #[command(subcommand)]
        mode: SweepMode,
    },
    /// Evaluate one of the earlier autonomy formulas.
    Baseline {
        #[command(subcommand)]
        variant: BaselineCmd,
    },
    /// Inspect bundled scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioCmd,
    },
    /// Open-loop displacement of a vehicle between control updates.
    OpenLoop {
        /// Vehicle speed in km/h.
        #[arg(long)]
        speed: f64,
        /// Control update rate in Hz.
        #[arg(long)]
        rate: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepMode {
    /// Degree of autonomy vs one capability's actual standard deviation.
    Doa {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        system: String,
        #[arg(long)]
        capability: String,
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        step: f64,
    },
    /// Reliability quotient vs actual sigma, one column per reference sigma.
    Rel {
        /// Comma-separated reference sigmas.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_ref: Vec<f64>,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        step: f64,
    },
    /// Responsiveness quotient vs actual response time, one column per
    /// reference time.
    Res {
        /// Comma-separated reference response times (seconds).
        #[arg(long, value_delimiter = ',', required = true)]
        t_ref: Vec<f64>,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        step: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum BaselineCmd {
    /// Mean level of automation over the five problem-solving capabilities.
    InsaurraldeLevel {
        /// Five levels: definition,exploration,selection,implementation,verification.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        n: u32,
    },
    /// Scaled mean of actual/standard behaviour ratios.
    InsaurraldeRatio {
        #[arg(long, value_delimiter = ',', required = true)]
        act: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        std: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        n: u32,
    },
    /// Trapezoidal integral of a human-effort grid (JSON file).
    Doboli {
        /// JSON: {performance_bounds, area_bounds, time_bounds, shape, values}.
        #[arg(long, value_name = "PATH")]
        grid: PathBuf,
    },
    /// Bandwidth/contact-time formula.
    Curtin {
        #[arg(long)]
        control_bits: f64,
        #[arg(long)]
        total_bits: f64,
        #[arg(long)]
        contact_time: f64,
        #[arg(long)]
        total_time: f64,
        /// Scale constant (uncalibrated default 1).
        #[arg(long)]
        scale: Option<f64>,
        /// Exponent on the bits ratio (uncalibrated default 1).
        #[arg(long)]
        bits_exponent: Option<f64>,
        /// Exponent on the time ratio (uncalibrated default 1).
        #[arg(long)]
        time_exponent: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCmd {
    /// List bundled scenarios.
    List,
    /// Write a bundled scenario as a spec document.
    Export { name: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Telemetry(#[from] TelemetryError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error(transparent)]
    Integrity(#[from] IntegrityError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] autonomy_core::MetricError),
    #[error("cannot write `{path}`: {source}")]
    WriteOut { path: String, source: std::io::Error },
    #[error("refused: {count} diagnostic(s) listed above")]
    Refused { count: usize },
}

pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Assess { source, system } => {
            cmd_assess(&source, system.as_deref(), cli.strict, out)
        }
        Command::Monitor {
            source,
            system,
            telemetry,
            region,
            window,
            outcome_window,
            default_tta,
        } => cmd_monitor(
            &source,
            system.as_deref(),
            &telemetry,
            region.as_deref(),
            window,
            outcome_window,
            default_tta,
            cli.strict,
            out,
        ),
        Command::Generate { source, system, duration, faults } => {
            cmd_generate(&source, &system, duration, &faults, cli.strict, cli.seed, out)
        }
        Command::Sweep { mode } => cmd_sweep(mode, cli.strict, out),
        Command::Baseline { variant } => cmd_baseline(variant, out),
        Command::Scenario { action } => cmd_scenario(action, cli.strict, out),
        Command::OpenLoop { speed, rate } => {
            let d = open_loop_displacement(speed, rate)?;
            println!("open-loop displacement: {d:.6} m ({speed} km/h at {rate} Hz)");
            Ok(EXIT_OK)
        }
    }
}

// ── shared input plumbing ────────────────────────────────────────────

fn load_document(source: &SourceArgs, strict: bool) -> Result<SpecDocument, CliError> {
    match (&source.spec, &source.scenario) {
        (Some(path), None) => {
            let parsed = parse_spec_file(path, strict)?;
            for warning in &parsed.warnings {
                eprintln!("warning: {warning}");
            }
            Ok(parsed.document)
        }
        (None, Some(name)) => scenario::find(name)
            .map(|s| s.document)
            .ok_or_else(|| CliError::Usage(format!(
                "unknown scenario `{name}`; run `autonomy scenario list`"
            ))),
        _ => Err(CliError::Usage("exactly one of --spec or --scenario is required".into())),
    }
}

fn resolve_document(doc: &SpecDocument) -> Result<(TaskSpec, Vec<SystemSpec>), CliError> {
    match doc.resolve() {
        Ok(resolved) => Ok((resolved.task, resolved.systems)),
        Err(missing) => Err(refuse_insufficient(&missing)),
    }
}

fn refuse_insufficient(missing: &[InsufficientCell]) -> CliError {
    for cell in missing {
        eprintln!("diagnostic: {cell}");
    }
    CliError::Refused { count: missing.len() }
}

fn pick_systems<'a>(
    systems: &'a [SystemSpec],
    wanted: Option<&str>,
) -> Result<Vec<&'a SystemSpec>, CliError> {
    match wanted {
        Some(name) => systems
            .iter()
            .find(|s| s.name == name)
            .map(|s| vec![s])
            .ok_or_else(|| CliError::Usage(format!("document defines no system `{name}`"))),
        None => {
            if systems.is_empty() {
                Err(CliError::Usage("document defines no systems to assess".into()))
            } else {
                Ok(systems.iter().collect())
            }
        }
    }
}

fn write_out(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|source| CliError::WriteOut { path: path.display().to_string(), source })
}

// ── assess ───────────────────────────────────────────────────────────

fn cmd_assess(
    source: &SourceArgs,
    system: Option<&str>,
    strict: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let doc = load_document(source, strict)?;
    let (task, systems) = resolve_document(&doc)?;
    let selected = pick_systems(&systems, system)?;

    let mut machine = Vec::new();
    let mut all_at_least_one = true;
    for (i, system) in selected.iter().enumerate() {
        let report = match assess(&task, system) {
            Ok(report) => report,
            Err(AssessmentError::Validation(diags)) => {
                for d in &diags {
                    eprintln!("diagnostic: {d}");
                }
                return Err(CliError::Refused { count: diags.len() });
            }
            Err(other) => return Err(other.into()),
        };
        if i > 0 {
            println!();
        }
        print!("{}", report::render_assessment(&report));
        all_at_least_one &= report.loa.index() >= 1;
        machine.push(report::machine_assessment(&report));
    }

    if let Some(path) = out {
        let json = if machine.len() == 1 {
            report::to_machine_json(&machine[0])
        } else {
            #[derive(serde::Serialize)]
            struct Set<'a> {
                schema: u32,
                kind: &'static str,
                results: &'a [report::MachineAssessment],
            }
            report::to_machine_json(&Set { schema: 1, kind: "assessment-set", results: &machine })
        };
        write_out(path, &json)?;
    }

    Ok(if all_at_least_one { EXIT_OK } else { EXIT_THRESHOLD })
}

// ── monitor ──────────────────────────────────────────────────────────

#[allow(clippy::too_many_arguments)]
fn cmd_monitor(
    source: &SourceArgs,
    system: Option<&str>,
    telemetry: &Path,
    region: Option<&str>,
    window: Option<usize>,
    outcome_window: Option<usize>,
    default_tta: Option<f64>,
    strict: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let doc = load_document(source, strict)?;
    let (task, systems) = resolve_document(&doc)?;

    if let Some(name) = system {
        let system = systems
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| CliError::Usage(format!("document defines no system `{name}`")))?;
        let diagnostics = autonomy_core::validate_task_spec(&task, system);
        if !diagnostics.is_empty() {
            for d in &diagnostics {
                eprintln!("diagnostic: {d}");
            }
            return Err(CliError::Refused { count: diagnostics.len() });
        }
    }

    let mut config = MonitorConfig::default();
    if let Some(w) = window {
        config.error_window = w;
    }
    if let Some(w) = outcome_window {
        config.outcome_window = w;
    }
    if let Some(tta) = default_tta {
        config.default_tta = tta;
    }

    let mut monitor = match region {
        Some(name) => IntegrityMonitor::for_region(&task, name, config)?,
        None => IntegrityMonitor::new(&task, config)?,
    };

    let log = read_telemetry_file(telemetry)?;
    let mut last_ts = f64::NEG_INFINITY;
    let mut events = Vec::new();
    for (index, event) in log.iter().enumerate() {
        if event.timestamp < last_ts {
            return Err(TelemetryError::Record {
                line: index as u64 + 2,
                message: format!(
                    "timestamp {} goes backwards (previous {})",
                    event.timestamp, last_ts
                ),
            }
            .into());
        }
        last_ts = event.timestamp;
        for emitted in monitor.ingest(event)? {
            println!("{}", report::render_event(&emitted));
            events.push(emitted);
        }
    }

    let summary = monitor.risk_summary()?;
    println!();
    print!("{}", report::render_risk_summary(&summary));

    if let Some(path) = out {
        let machine = report::machine_monitor(&task.name, &events, &summary);
        write_out(path, &report::to_machine_json(&machine))?;
    }

    Ok(if summary.total_integrity_events == 0 { EXIT_OK } else { EXIT_THRESHOLD })
}

// ── generate ─────────────────────────────────────────────────────────

fn cmd_generate(
    source: &SourceArgs,
    system: &str,
    duration: f64,
    fault_specs: &[String],
    strict: bool,
    seed: u64,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let doc = load_document(source, strict)?;
    let (task, systems) = resolve_document(&doc)?;
    let system = systems
        .iter()
        .find(|s| s.name == system)
        .ok_or_else(|| CliError::Usage(format!("document defines no system `{system}`")))?;

    let faults = fault_specs
        .iter()
        .map(|s| FaultProfile::parse(s))
        .collect::<Result<Vec<_>, _>>()?;

    let log = generate(&task, system, duration, seed, &faults)?;
    match out {
        Some(path) => {
            let mut buffer = Vec::new();
            write_telemetry(&mut buffer, &log)?;
            fs::write(path, &buffer)
                .map_err(|source| CliError::WriteOut { path: path.display().to_string(), source })?;
            eprintln!("wrote {} samples to {}", log.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            write_telemetry(stdout.lock(), &log)?;
        }
    }
    Ok(EXIT_OK)
}

// ── sweep ────────────────────────────────────────────────────────────

fn write_csv(
    out: Option<&Path>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
) -> Result<(), CliError> {
    let mut buffer = Vec::new();
    {
        let mut csv = csv::Writer::from_writer(&mut buffer);
        csv.write_record(&header).map_err(csv_io)?;
        for row in rows {
            csv.write_record(&row).map_err(csv_io)?;
        }
        csv.flush().map_err(|e| CliError::Telemetry(TelemetryError::Write(e)))?;
    }
    match out {
        Some(path) => fs::write(path, &buffer)
            .map_err(|source| CliError::WriteOut { path: path.display().to_string(), source }),
        None => {
            std::io::stdout()
                .write_all(&buffer)
                .map_err(|e| CliError::Telemetry(TelemetryError::Write(e)))?;
            Ok(())
        }
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Telemetry(TelemetryError::Record { line: 0, message: e.to_string() })
}

fn metric_cell(value: MetricValue) -> String {
    match value {
        MetricValue::Finite(v) => format!("{v}"),
        MetricValue::Infinite => "inf".to_string(),
    }
}

fn grid_points(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    let range = SweepRange::new(min, max, step);
    // Reuse the assessment-range validation for consistent errors.
    if step <= 0.0 || !step.is_finite() {
        return Err(AssessmentError::NonPositiveStep { step }.into());
    }
    if !(min.is_finite() && max.is_finite()) || min <= 0.0 || max < min {
        return Err(AssessmentError::EmptyRange.into());
    }
    Ok(range.points())
}

fn cmd_sweep(mode: SweepMode, strict: bool, out: Option<&Path>) -> Result<i32, CliError> {
    match mode {
        SweepMode::Doa { source, system, capability, region, min, max, step } => {
            let doc = load_document(&source, strict)?;
            let (task, systems) = resolve_document(&doc)?;
            let system = systems
                .iter()
                .find(|s| s.name == system)
                .ok_or_else(|| CliError::Usage(format!("document defines no system `{system}`")))?;
            let curve = sensitivity_sweep(
                &task,
                system,
                region.as_deref(),
                &capability,
                SweepRange::new(min, max, step),
            )?;
            let rows = curve
                .iter()
                .map(|p| vec![format!("{}", p.sigma_act), metric_cell(p.doa)])
                .collect();
            write_csv(out, vec!["sigma_act".into(), "doa".into()], rows)?;
        }
        SweepMode::Rel { sigma_ref, min, max, step } => {
            let points = grid_points(min, max, step)?;
            let mut header = vec!["sigma_act".to_string()];
            header.extend(sigma_ref.iter().map(|s| format!("crel[sigma_ref={s}]")));
            let mut rows = Vec::with_capacity(points.len());
            for sigma_act in points {
                let mut row = vec![format!("{sigma_act}")];
                for s in &sigma_ref {
                    let c = reliability(s * s, sigma_act * sigma_act)?;
                    row.push(metric_cell(c));
                }
                rows.push(row);
            }
            write_csv(out, header, rows)?;
        }
        SweepMode::Res { t_ref, min, max, step } => {
            let points = grid_points(min, max, step)?;
            let mut header = vec!["t_act".to_string()];
            header.extend(t_ref.iter().map(|t| format!("cres[t_ref={t}]")));
            let mut rows = Vec::with_capacity(points.len());
            for t_act in points {
                let mut row = vec![format!("{t_act}")];
                for t in &t_ref {
                    let c = responsiveness(*t, t_act)?;
                    row.push(metric_cell(c));
                }
                rows.push(row);
            }
            write_csv(out, header, rows)?;
        }
    }
    Ok(EXIT_OK)
}

// ── baseline ─────────────────────────────────────────────────────────

#[derive(serde::Deserialize)]
struct GridFile {
    performance_bounds: [f64; 2],
    area_bounds: [f64; 2],
    time_bounds: [f64; 2],
    shape: [usize; 3],
    values: Vec<f64>,
}

fn cmd_baseline(variant: BaselineCmd, out: Option<&Path>) -> Result<i32, CliError> {
    let (name, value, notes): (&str, f64, Vec<String>) = match variant {
        BaselineCmd::InsaurraldeLevel { deltas, n } => {
            let deltas: [f64; 5] = deltas
                .try_into()
                .map_err(|v: Vec<f64>| CliError::Usage(format!("expected 5 deltas, got {}", v.len())))?;
            ("insaurralde-level", insaurralde_level(&deltas, n)?, vec![])
        }
        BaselineCmd::InsaurraldeRatio { act, std, n } => {
            if act.len() != 5 || std.len() != 5 {
                return Err(CliError::Usage(format!(
                    "expected 5 act and 5 std values, got {} and {}",
                    act.len(),
                    std.len()
                )));
            }
            let pairs: [(f64, f64); 5] =
                std::array::from_fn(|i| (act[i], std[i]));
            ("insaurralde-ratio", insaurralde_ratio(&pairs, n)?, vec![])
        }
        BaselineCmd::Doboli { grid } => {
            let text = fs::read_to_string(&grid).map_err(|source| CliError::Doc(DocError::Io {
                path: grid.display().to_string(),
                source,
            }))?;
            let file: GridFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad grid file: {e}")))?;
            let grid = EffortGrid::new(
                (file.performance_bounds[0], file.performance_bounds[1]),
                (file.area_bounds[0], file.area_bounds[1]),
                (file.time_bounds[0], file.time_bounds[1]),
                (file.shape[0], file.shape[1], file.shape[2]),
                file.values,
            )?;
            (
                "doboli-integral",
                doboli_integral(&grid)?,
                vec!["trapezoidal quadrature; error is O(h^2) per axis".to_string()],
            )
        }
        BaselineCmd::Curtin {
            control_bits,
            total_bits,
            contact_time,
            total_time,
            scale,
            bits_exponent,
            time_exponent,
        } => {
            let defaulted = scale.is_none() || bits_exponent.is_none() || time_exponent.is_none();
            let params = CurtinParams {
                control_bits,
                total_bits,
                contact_time,
                total_time,
                scale: scale.unwrap_or(1.0),
                bits_exponent: bits_exponent.unwrap_or(1.0),
                time_exponent: time_exponent.unwrap_or(1.0),
            };
            let mut notes = Vec::new();
            if defaulted {
                notes.push(
                    "scale/exponent constants have no published calibration; defaults of 1 in use"
                        .to_string(),
                );
            }
            ("curtin", curtin_autonomy(params)?, notes)
        }
    };

    println!("{name}: {value}");
    for note in &notes {
        println!("note: {note}");
    }
    if let Some(path) = out {
        #[derive(serde::Serialize)]
        struct BaselineOut<'a> {
            schema: u32,
            kind: &'static str,
            variant: &'a str,
            value: f64,
            notes: &'a [String],
        }
        write_out(
            path,
            &report::to_machine_json(&BaselineOut {
                schema: 1,
                kind: "baseline",
                variant: name,
                value,
                notes: &notes,
            }),
        )?;
    }
    Ok(EXIT_OK)
}

// ── scenario ─────────────────────────────────────────────────────────

fn cmd_scenario(action: ScenarioCmd, _strict: bool, out: Option<&Path>) -> Result<i32, CliError> {
    match action {
        ScenarioCmd::List => {
            for s in scenario::all() {
                println!("{:<16} {}", s.name, s.title);
                println!("{:<16} {}", "", s.summary);
            }
            Ok(EXIT_OK)
        }
        ScenarioCmd::Export { name } => {
            let s = scenario::find(&name).ok_or_else(|| {
                CliError::Usage(format!("unknown scenario `{name}`; run `autonomy scenario list`"))
            })?;
            let json = s.document.to_canonical_json();
            match out {
                Some(path) => write_out(path, &json)?,
                None => print!("{json}"),
            }
            Ok(EXIT_OK)
        }
    }
}
