//! Scenario files: which device, which procedure, with what parameters and seeds.
//!
//! ```json
//! {
//!   "device": "table2_router.json",
//!   "procedure": "peak",
//!   "parameters": { "packet_size_weights": [[1518, 1.0]] },
//!   "seeds": { "device": 1, "orchestrator": 7 }
//! }
//! ```
//!
//! A relative device path is looked up next to the scenario file first and
//! then in the fixture directory.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{
    find_ndr, run_extended_idle_test, run_peak_suite, run_variable_load_test, warmup_until_stable, ExTestPlan,
    NdrSearchConfig, OrchestratorError, PeakConfig, VlTestPlan, WarmupConfig,
};
use crate::measurement::{MeasurementSet, Provenance};
use crate::metrics::{PacketSizeWeights, Throughput};
use crate::report::{artifact_file_name, AllowanceSpec, ConfigDigest, DeviceReport, ReportError, ReportOptions};
use crate::sim::{Device, DeviceModel, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioProcedure {
    Peak,
    VariableLoad,
    ExtendedIdle,
    FullSuite,
}

impl ScenarioProcedure {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioProcedure::Peak => "peak",
            ScenarioProcedure::VariableLoad => "variable_load",
            ScenarioProcedure::ExtendedIdle => "extended_idle",
            ScenarioProcedure::FullSuite => "full_suite",
        }
    }
}

impl fmt::Display for ScenarioProcedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    /// Overrides the seed stored in the device model.
    #[serde(default)]
    pub device: Option<u64>,
    #[serde(default)]
    pub orchestrator: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParameters {
    #[serde(default)]
    pub packet_size_weights: Option<PacketSizeWeights>,
    #[serde(default)]
    pub peak: PeakConfig,
    /// Known NDR for variable-load and extended-idle runs; searched when absent.
    #[serde(default)]
    pub ndr_gbps: Option<Throughput>,
    #[serde(default)]
    pub warmup: WarmupConfig,
    /// Warm-up precondition for peak and extended-idle runs. Variable-load runs
    /// use the flag in their own plan.
    #[serde(default = "yes")]
    pub warmup_required: bool,
    #[serde(default)]
    pub variable_load: Option<VlTestPlan>,
    #[serde(default)]
    pub extended_idle: Option<ExTestPlan>,
    #[serde(default)]
    pub allowance: Option<AllowanceSpec>,
}

fn yes() -> bool {
    true
}

impl Default for ScenarioParameters {
    fn default() -> Self {
        Self {
            packet_size_weights: None,
            peak: PeakConfig::default(),
            ndr_gbps: None,
            warmup: WarmupConfig::default(),
            warmup_required: true,
            variable_load: None,
            extended_idle: None,
            allowance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub device: String,
    pub procedure: ScenarioProcedure,
    #[serde(default)]
    pub parameters: ScenarioParameters,
    #[serde(default)]
    pub seeds: Seeds,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Orchestrator(#[from] OrchestratorError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = read(path)?;
        parse_json(path, &text)
    }

    /// Checks that the parameters needed by the chosen procedure are present
    /// and well formed.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let p = &self.parameters;
        let needs_peak = matches!(self.procedure, ScenarioProcedure::Peak | ScenarioProcedure::FullSuite);
        if needs_peak && p.packet_size_weights.is_none() {
            return Err(ScenarioError::Invalid(format!(
                "procedure {} needs parameters.packet_size_weights",
                self.procedure
            )));
        }
        if self.procedure == ScenarioProcedure::VariableLoad && p.variable_load.is_none() {
            return Err(ScenarioError::Invalid("procedure variable_load needs parameters.variable_load".into()));
        }
        if self.procedure == ScenarioProcedure::ExtendedIdle && p.extended_idle.is_none() {
            return Err(ScenarioError::Invalid("procedure extended_idle needs parameters.extended_idle".into()));
        }
        p.peak.ndr_search.validate()?;
        p.warmup.validate()?;
        if let Some(plan) = &p.variable_load {
            plan.validate()?;
        }
        if let Some(plan) = &p.extended_idle {
            plan.validate()?;
        }
        Ok(())
    }

    /// Orchestrator seed and device seed after applying an optional override.
    pub fn with_orchestrator_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seeds.orchestrator = s;
        }
        self
    }
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Deserializes `text`, reporting failures with position and field path.
pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, ScenarioError> {
    let located = |e: &serde_json::Error, field: Option<String>| {
        let full = e.to_string();
        let message = full.rsplit_once(" at line ").map_or(full.clone(), |(head, _)| head.to_string());
        let message = match field {
            Some(f) if f != "." => format!("{f}: {message}"),
            _ => message,
        };
        ScenarioError::Parse { path: path.display().to_string(), line: e.line(), column: e.column(), message }
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let value =
        serde_path_to_error::deserialize(&mut de).map_err(|e| located(e.inner(), Some(e.path().to_string())))?;
    de.end().map_err(|e| located(&e, None))?;
    Ok(value)
}

/// Loads a device model, reporting parse and invariant failures with position.
pub fn load_device(path: &Path) -> Result<DeviceModel, ScenarioError> {
    let text = read(path)?;
    parse_json(path, &text)
}

/// Resolves a scenario's device path: absolute paths as-is, relative paths
/// next to the scenario file, then in `fixture_dir`.
pub fn resolve_device_path(scenario_path: &Path, device: &str, fixture_dir: &Path) -> PathBuf {
    let device = Path::new(device);
    if device.is_absolute() {
        return device.to_path_buf();
    }
    let beside = scenario_path.parent().unwrap_or_else(|| Path::new(".")).join(device);
    if beside.exists() {
        return beside;
    }
    fixture_dir.join(device)
}

/// Short digest of everything that determines a run's outcome.
pub fn config_hash(scenario: &Scenario, model: &DeviceModel) -> String {
    #[derive(Serialize)]
    struct Hashed<'a> {
        procedure: ScenarioProcedure,
        parameters: &'a ScenarioParameters,
        seeds: &'a Seeds,
        device: &'a DeviceModel,
    }
    let canonical = serde_json::to_vec(&Hashed {
        procedure: scenario.procedure,
        parameters: &scenario.parameters,
        seeds: &scenario.seeds,
        device: model,
    })
    .expect("scenario serializes");
    let digest = Sha256::digest(&canonical);
    hex::encode(&digest[..6])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub device: String,
    pub procedure: ScenarioProcedure,
    pub config_hash: String,
    pub sets: Vec<MeasurementSet>,
    pub report: DeviceReport,
}

impl ScenarioOutcome {
    pub fn all_valid(&self) -> bool {
        self.sets.iter().all(|s| s.valid)
    }

    pub fn report_file_name(&self) -> String {
        artifact_file_name(&self.device, self.procedure.as_str(), &self.config_hash)
    }

    pub fn set_file_name(&self, set: &MeasurementSet) -> String {
        let name = artifact_file_name(&self.device, set.procedure.as_str(), &self.config_hash);
        name.replace(".json", ".measurement.json")
    }

    /// Writes every measurement set and the report into `dir`, each through a
    /// temporary file and a rename. Returns the written paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| ScenarioError::Io { path: dir.display().to_string(), message: e.to_string() })?;
        let mut written = Vec::new();
        for set in &self.sets {
            let bytes = crate::report::to_json_bytes(set).map_err(ReportError::from)?;
            written.push(write_atomic(&dir.join(self.set_file_name(set)), &bytes)?);
        }
        let bytes = crate::report::export_report(&self.report, crate::report::ExportFormat::Json)?;
        written.push(write_atomic(&dir.join(self.report_file_name()), &bytes)?);
        Ok(written)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<PathBuf, ScenarioError> {
    let io_err = |e: std::io::Error| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() };
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, bytes).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(path.to_path_buf())
}

/// Runs a scenario against a fresh instance of `model`.
pub fn run_scenario(scenario: &Scenario, mut model: DeviceModel) -> Result<ScenarioOutcome, ScenarioError> {
    scenario.validate()?;
    if let Some(seed) = scenario.seeds.device {
        model.seed = seed;
    }
    let hash = config_hash(scenario, &model);
    let p = &scenario.parameters;
    let mut device = Device::new(model.clone());

    let needs_warm = match scenario.procedure {
        ScenarioProcedure::VariableLoad => p.variable_load.as_ref().is_some_and(|v| v.warmup_required),
        _ => p.warmup_required,
    };
    if needs_warm && !device.is_warm() {
        warmup_until_stable(&mut device, &p.warmup)?;
    }

    let mut sets = Vec::new();
    let mut known_ndr = std::collections::BTreeMap::new();
    if matches!(scenario.procedure, ScenarioProcedure::Peak | ScenarioProcedure::FullSuite) {
        let weights = p.packet_size_weights.as_ref().expect("validated");
        let suite = run_peak_suite(&mut device, weights, &p.peak)?;
        known_ndr = suite.ndr.clone();
        sets.push(suite.set);
    }
    let mut ndr_for = |device: &mut Device, size: u32| -> Result<Throughput, OrchestratorError> {
        if let Some(ndr) = p.ndr_gbps {
            return Ok(ndr);
        }
        if let Some(ndr) = known_ndr.get(&size) {
            return Ok(*ndr);
        }
        let ndr = find_ndr(device, &NdrSearchConfig { packet_size_bytes: size, ..p.peak.ndr_search })?;
        known_ndr.insert(size, ndr);
        Ok(ndr)
    };
    let run_vl = matches!(scenario.procedure, ScenarioProcedure::VariableLoad | ScenarioProcedure::FullSuite);
    if let (true, Some(plan)) = (run_vl, &p.variable_load) {
        let ndr = ndr_for(&mut device, plan.packet_size_bytes)?;
        sets.push(run_variable_load_test(&mut device, ndr, plan, scenario.seeds.orchestrator)?);
    }
    let run_ex = matches!(scenario.procedure, ScenarioProcedure::ExtendedIdle | ScenarioProcedure::FullSuite);
    if let (true, Some(plan)) = (run_ex, &p.extended_idle) {
        let ndr = ndr_for(&mut device, plan.packet_size_bytes)?;
        sets.push(run_extended_idle_test(&mut device, ndr, plan)?);
    }

    let provenance = Provenance {
        config_hash: hash.clone(),
        device_seed: model.seed,
        orchestrator_seed: scenario.seeds.orchestrator,
    };
    for set in &mut sets {
        set.provenance = Some(provenance.clone());
    }

    let weights = p.variable_load.as_ref().map(|v| v.weights).or_else(|| p.extended_idle.as_ref().map(|e| e.weights));
    let packet_sizes = p.packet_size_weights.as_ref().map(|w| w.packet_sizes().collect()).unwrap_or_default();
    let digest = ConfigDigest {
        config_hash: hash.clone(),
        device_seed: model.seed,
        orchestrator_seed: scenario.seeds.orchestrator,
        weights,
        packet_sizes,
    };
    let options = ReportOptions { packet_weights: p.packet_size_weights.as_ref(), allowance: p.allowance.as_ref() };
    let report = DeviceReport::from_sets(model.name.clone(), model.label.clone(), &sets, &options, digest)?;
    Ok(ScenarioOutcome { device: model.name, procedure: scenario.procedure, config_hash: hash, sets, report })
}
