//! Command-line front end.
//!
//! Exit codes: `0` valid, `1` error, `2` the test ran but was invalidated.
//! Only the requested artifact goes to stdout; everything else goes to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::fixtures;
use crate::measurement::MeasurementSet;
use crate::metrics::{self, MetricKind, MetricResult, PacketSizeWeights, WeightProfile};
use crate::orchestrator::scenario::{
    load_device, parse_json, resolve_device_path, run_scenario, write_atomic, Scenario, ScenarioError, ScenarioOutcome,
};
use crate::report::{export_table, render_comparison, AllowanceSpec, DeviceReport, ExportFormat};
use crate::sim::DeviceModel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALIDATED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "greenbench", version, about = "Energy-efficiency benchmarks for simulated network devices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file, or output directory for `run`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Overrides the orchestrator seed of every scenario.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file, or every `*.json` scenario in a directory.
    Run { scenario: PathBuf },
    /// Compute one metric from a measurement file.
    Metrics {
        measurement: PathBuf,
        #[arg(long, value_parser = MetricKind::from_str)]
        metric: MetricKind,
        /// Replaces the set's weights, as `alpha,beta,epsilon`.
        #[arg(long)]
        weights: Option<String>,
        /// Packet-size weights for WEIGHTED_PEAK, as `64:0.3,1518:0.7`.
        #[arg(long)]
        packet_weights: Option<String>,
        /// Allowance specification (JSON) for ALLOWANCE.
        #[arg(long)]
        allowance: Option<PathBuf>,
    },
    /// Render one metric across device reports.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, value_parser = MetricKind::from_str, default_value = "ecr")]
        metric: MetricKind,
    },
    /// Check device, scenario, measurement or report files.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    execute(&cli, stdout, stderr)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Run { scenario } => cmd_run(cli, scenario, stderr),
        Command::Metrics { measurement, metric, weights, packet_weights, allowance } => cmd_metrics(
            cli,
            measurement,
            *metric,
            weights.as_deref(),
            packet_weights.as_deref(),
            allowance.as_deref(),
            stdout,
        ),
        Command::Compare { reports, metric } => cmd_compare(cli, reports, *metric, stdout),
        Command::Validate { paths } => cmd_validate(paths, stderr),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn emit(cli: &Cli, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            write_atomic(path, bytes)?;
        }
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn scenario_files(path: &Path) -> Result<Vec<PathBuf>, Failure> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure(format!("{}: no scenario files", path.display())));
    }
    Ok(files)
}

fn run_one(path: &Path, seed: Option<u64>, fixture_dir: &Path) -> Result<ScenarioOutcome, ScenarioError> {
    let scenario = Scenario::load(path)?.with_orchestrator_seed(seed);
    let model = load_device(&resolve_device_path(path, &scenario.device, fixture_dir))?;
    run_scenario(&scenario, model)
}

fn cmd_run(cli: &Cli, path: &Path, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let files = scenario_files(path)?;
    let fixture_dir = fixtures::fixture_dir();
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let outcomes: Vec<(PathBuf, Result<ScenarioOutcome, ScenarioError>)> =
        files.par_iter().map(|f| (f.clone(), run_one(f, cli.seed, &fixture_dir))).collect();

    let mut code = EXIT_OK;
    for (file, outcome) in outcomes {
        match outcome.and_then(|o| o.write_to(&out_dir).map(|w| (o, w))) {
            Ok((outcome, written)) => {
                for w in written {
                    let _ = writeln!(stderr, "wrote {}", w.display());
                }
                for entry in outcome.report.invalid_entries() {
                    let reason = entry.reason.as_deref().unwrap_or("unspecified");
                    let _ = writeln!(stderr, "{}: {} invalidated: {reason}", file.display(), entry.procedure);
                    if code == EXIT_OK {
                        code = EXIT_INVALIDATED;
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {}: {e}", file.display());
                code = EXIT_ERROR;
            }
        }
    }
    Ok(code)
}

fn parse_weights(text: &str, base: WeightProfile) -> Result<WeightProfile, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| Failure(format!("--weights {text:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    let [a, b, e] = parts[..] else {
        return Err(Failure(format!("--weights expects alpha,beta,epsilon, got {text:?}")));
    };
    Ok(base.with_weights(a, b, e)?)
}

fn parse_packet_weights(text: &str) -> Result<PacketSizeWeights, Failure> {
    let mut entries = Vec::new();
    for item in text.split(',') {
        let (size, weight) = item
            .split_once(':')
            .ok_or_else(|| Failure(format!("--packet-weights expects size:weight pairs, got {item:?}")))?;
        let size: u32 = size.trim().parse().map_err(|e| Failure(format!("packet size {size:?}: {e}")))?;
        let weight: f64 = weight.trim().parse().map_err(|e| Failure(format!("packet weight {weight:?}: {e}")))?;
        entries.push((size, weight));
    }
    Ok(PacketSizeWeights::new(entries)?)
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    Ok(parse_json(path, &read_file(path)?)?)
}

fn cmd_metrics(
    cli: &Cli,
    path: &Path,
    kind: MetricKind,
    weights: Option<&str>,
    packet_weights: Option<&str>,
    allowance: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let set: MeasurementSet = load_json(path)?;
    set.ensure_valid()?;
    let profile = match weights {
        Some(text) => Some(parse_weights(text, set.weights.unwrap_or_else(WeightProfile::verizon))?),
        None => None,
    };
    let result: MetricResult = match kind {
        MetricKind::Ecr => set.ecr()?,
        MetricKind::Teeer => set.teeer(profile.as_ref())?,
        MetricKind::TeerAtis => set.teer_atis(profile.as_ref())?,
        MetricKind::EerVl => set.eer_vl(profile.as_ref())?,
        MetricKind::EerEx => set.eer_ex(profile.as_ref())?,
        MetricKind::WeightedPeak => {
            let w = match packet_weights {
                Some(text) => parse_packet_weights(text)?,
                None => return Err(Failure("WEIGHTED_PEAK needs --packet-weights".into())),
            };
            set.weighted_peak(&w)?
        }
        MetricKind::Allowance => {
            let Some(spec_path) = allowance else {
                return Err(Failure("ALLOWANCE needs --allowance <file>".into()));
            };
            let spec: AllowanceSpec = load_json(spec_path)?;
            let sample = set.samples.first().ok_or_else(|| Failure("measurement set has no samples".into()))?;
            metrics::allowance_budget(&spec.interface_counts, &spec.table, sample.sample.power)?.to_metric()
        }
    };
    let bytes = match cli.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => crate::report::to_json_bytes(&result)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["metric", "units", "value"])?;
            w.write_record([result.kind.as_str(), result.units.as_str(), &result.value.to_string()])?;
            w.into_inner().map_err(|e| Failure(e.to_string()))?
        }
        OutputFormat::Table => {
            format!("{} = {} {}\n", result.kind, crate::report::format_significant(result.value, 4), result.units)
                .into_bytes()
        }
    };
    emit(cli, &bytes, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_compare(cli: &Cli, paths: &[PathBuf], metric: MetricKind, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let reports: Vec<DeviceReport> = paths.iter().map(|p| load_json(p)).collect::<Result<_, _>>()?;
    let table = render_comparison(&reports, metric)?;
    let bytes = match cli.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => export_table(&table, ExportFormat::Json)?,
        OutputFormat::Csv => export_table(&table, ExportFormat::Csv)?,
        OutputFormat::Table => table.to_text().into_bytes(),
    };
    emit(cli, &bytes, stdout)?;
    Ok(EXIT_OK)
}

/// What a JSON file turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Device,
    Scenario,
    Measurement,
    Report,
}

impl FileKind {
    fn as_str(self) -> &'static str {
        match self {
            FileKind::Device => "device",
            FileKind::Scenario => "scenario",
            FileKind::Measurement => "measurement",
            FileKind::Report => "report",
        }
    }

    /// Guesses the kind from top-level keys so errors can name the right schema.
    fn detect(value: &serde_json::Value) -> Option<FileKind> {
        let obj = value.as_object()?;
        if obj.contains_key("states") && obj.contains_key("line_rate") {
            Some(FileKind::Device)
        } else if obj.contains_key("procedure") && obj.contains_key("samples") {
            Some(FileKind::Measurement)
        } else if obj.contains_key("procedure") && obj.contains_key("device") {
            Some(FileKind::Scenario)
        } else if obj.contains_key("metrics") && obj.contains_key("validity") {
            Some(FileKind::Report)
        } else {
            None
        }
    }
}

/// Validates one file against the schema its keys suggest.
pub fn validate_file(path: &Path) -> Result<FileKind, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: serde_json::Value = parse_json(path, &text).map_err(|e| e.to_string())?;
    let kind = FileKind::detect(&value)
        .ok_or_else(|| format!("{}: not a device, scenario, measurement or report file", path.display()))?;
    let checked = match kind {
        FileKind::Device => parse_json::<DeviceModel>(path, &text).map(drop),
        FileKind::Scenario => parse_json::<Scenario>(path, &text).and_then(|s| s.validate()),
        FileKind::Measurement => parse_json::<MeasurementSet>(path, &text).map(drop),
        FileKind::Report => parse_json::<DeviceReport>(path, &text).map(drop),
    };
    checked.map_err(|e| match e {
        ScenarioError::Parse { .. } => e.to_string(),
        other => format!("{}: {other}", path.display()),
    })?;
    Ok(kind)
}

fn cmd_validate(paths: &[PathBuf], stderr: &mut dyn Write) -> Result<i32, Failure> {
    let mut code = EXIT_OK;
    for path in paths {
        match validate_file(path) {
            Ok(kind) => {
                let _ = writeln!(stderr, "{}: ok ({})", path.display(), kind.as_str());
            }
            Err(msg) => {
                let _ = writeln!(stderr, "error: {msg}");
                code = EXIT_ERROR;
            }
        }
    }
    Ok(code)
}
