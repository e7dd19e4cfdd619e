//! The canonical spec-document format.
//!
//! A document is UTF-8 JSON with a versioned `schema` field carrying one task
//! and any number of systems. Fields mirror the in-memory model; dispersions
//! are written as `{repr, value, unit}` with repr one of
//! `sigma | variance | alert_limit | probability`, timings as `{repr, value}`
//! with repr `hz | seconds`. Requirement cells may be explicit `null` to
//! record that a source left them unspecified; resolving such a document for
//! assessment fails loudly with one "insufficient specification" diagnostic
//! per missing cell.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use autonomy_core::{
    CapabilityRequirement, Dispersion, DispersionRepr, MeasureKind, MeasuredPerformance,
    OperatingRegion, RequirementOverride, SystemSpec, TaskSpec, TimingRepr, TimingReq,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub metadata: Value,
    pub task: TaskDoc,
    #[serde(default)]
    pub systems: Vec<SystemDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDoc {
    pub name: String,
    pub capabilities: Vec<CapabilityDoc>,
    #[serde(default)]
    pub regions: Vec<RegionDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityDoc {
    pub name: String,
    /// `null` records a requirement cell the source left unspecified.
    pub dispersion: Option<DispersionDoc>,
    /// `null` records a requirement cell the source left unspecified.
    pub timing: Option<TimingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrity_risk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tta: Option<f64>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionDoc {
    pub repr: ReprDoc,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReprDoc {
    Sigma,
    Variance,
    AlertLimit,
    Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingDoc {
    pub repr: TimingReprDoc,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingReprDoc {
    Hz,
    Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub name: String,
    #[serde(default)]
    pub overrides: BTreeMap<String, OverrideDoc>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OverrideDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrity_risk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub name: String,
    pub capabilities: BTreeMap<String, PerformanceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceDoc {
    pub dispersion: DispersionDoc,
    pub timing: TimingDoc,
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u64 },
    #[error("document does not match the schema: {0}")]
    Shape(String),
    #[error("unknown field `{0}` (strict mode)")]
    UnknownField(String),
}

/// A resolution problem: the document is well-formed but cannot produce a
/// complete in-memory specification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InsufficientCell {
    pub capability: String,
    pub cell: CellKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellKind {
    Dispersion,
    Timing,
}

impl fmt::Display for InsufficientCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = match self.cell {
            CellKind::Dispersion => "dispersion requirement",
            CellKind::Timing => "timing requirement",
        };
        write!(f, "insufficient specification: capability `{}` has no {cell}", self.capability)
    }
}

/// Parse outcome: the document plus any unknown-field warnings gathered in
/// lenient mode.
#[derive(Debug)]
pub struct ParsedDocument {
    pub document: SpecDocument,
    pub warnings: Vec<String>,
}

pub fn parse_spec_file(path: &Path, strict: bool) -> Result<ParsedDocument, DocError> {
    let text = fs::read_to_string(path)
        .map_err(|source| DocError::Io { path: path.display().to_string(), source })?;
    parse_spec_str(&text, strict)
}

pub fn parse_spec_str(text: &str, strict: bool) -> Result<ParsedDocument, DocError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    match value.get("schema").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => return Err(DocError::SchemaVersion { found: v }),
        None => return Err(DocError::Shape("missing or non-integer `schema` field".into())),
    }

    let unknown = unknown_fields(&value);
    if strict {
        if let Some(first) = unknown.first() {
            return Err(DocError::UnknownField(first.clone()));
        }
    }

    let document: SpecDocument =
        serde_json::from_value(value).map_err(|e| DocError::Shape(e.to_string()))?;
    let warnings = unknown.into_iter().map(|p| format!("unknown field `{p}`")).collect();
    Ok(ParsedDocument { document, warnings })
}

/// Collects paths of fields outside the schema. The `metadata` subtree is
/// free-form and skipped.
fn unknown_fields(root: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let obj = match root.as_object() {
        Some(o) => o,
        None => return out,
    };
    check_keys(obj, &["schema", "name", "metadata", "task", "systems"], "", &mut out);

    if let Some(task) = root.get("task").and_then(Value::as_object) {
        check_keys(task, &["name", "capabilities", "regions"], "task.", &mut out);
        if let Some(caps) = task.get("capabilities").and_then(Value::as_array) {
            for (i, cap) in caps.iter().enumerate() {
                if let Some(cap) = cap.as_object() {
                    let base = format!("task.capabilities[{i}].");
                    check_keys(
                        cap,
                        &["name", "dispersion", "timing", "integrity_risk", "tta", "weight"],
                        &base,
                        &mut out,
                    );
                    check_dispersion_keys(cap.get("dispersion"), &format!("{base}dispersion."), &mut out);
                    check_timing_keys(cap.get("timing"), &format!("{base}timing."), &mut out);
                }
            }
        }
        if let Some(regions) = task.get("regions").and_then(Value::as_array) {
            for (i, region) in regions.iter().enumerate() {
                if let Some(region) = region.as_object() {
                    let base = format!("task.regions[{i}].");
                    check_keys(region, &["name", "overrides"], &base, &mut out);
                    if let Some(ovs) = region.get("overrides").and_then(Value::as_object) {
                        for (cap_name, ov) in ovs {
                            if let Some(ov) = ov.as_object() {
                                let base = format!("{base}overrides.{cap_name}.");
                                check_keys(
                                    ov,
                                    &["dispersion", "timing", "integrity_risk", "tta"],
                                    &base,
                                    &mut out,
                                );
                                check_dispersion_keys(
                                    ov.get("dispersion"),
                                    &format!("{base}dispersion."),
                                    &mut out,
                                );
                                check_timing_keys(ov.get("timing"), &format!("{base}timing."), &mut out);
                            }
                        }
                    }
                }
            }
        }
    }

    if let Some(systems) = root.get("systems").and_then(Value::as_array) {
        for (i, system) in systems.iter().enumerate() {
            if let Some(system) = system.as_object() {
                let base = format!("systems[{i}].");
                check_keys(system, &["name", "capabilities"], &base, &mut out);
                if let Some(caps) = system.get("capabilities").and_then(Value::as_object) {
                    for (cap_name, perf) in caps {
                        if let Some(perf) = perf.as_object() {
                            let base = format!("{base}capabilities.{cap_name}.");
                            check_keys(perf, &["dispersion", "timing"], &base, &mut out);
                            check_dispersion_keys(
                                perf.get("dispersion"),
                                &format!("{base}dispersion."),
                                &mut out,
                            );
                            check_timing_keys(perf.get("timing"), &format!("{base}timing."), &mut out);
                        }
                    }
                }
            }
        }
    }

    out
}

fn check_keys(
    obj: &serde_json::Map<String, Value>,
    allowed: &[&str],
    prefix: &str,
    out: &mut Vec<String>,
) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            out.push(format!("{prefix}{key}"));
        }
    }
}

fn check_dispersion_keys(value: Option<&Value>, prefix: &str, out: &mut Vec<String>) {
    if let Some(obj) = value.and_then(Value::as_object) {
        check_keys(obj, &["repr", "value", "unit"], prefix, out);
    }
}

fn check_timing_keys(value: Option<&Value>, prefix: &str, out: &mut Vec<String>) {
    if let Some(obj) = value.and_then(Value::as_object) {
        check_keys(obj, &["repr", "value"], prefix, out);
    }
}

// ── conversion to the in-memory model ────────────────────────────────

impl DispersionDoc {
    fn to_model(&self) -> Dispersion {
        let kind = match self.repr {
            ReprDoc::Probability => MeasureKind::SuccessProbability,
            _ => MeasureKind::GaussianError { unit: self.unit.clone().unwrap_or_default() },
        };
        let repr = match self.repr {
            ReprDoc::Sigma => DispersionRepr::Sigma,
            ReprDoc::Variance => DispersionRepr::Variance,
            ReprDoc::AlertLimit => DispersionRepr::AlertLimit,
            ReprDoc::Probability => DispersionRepr::Probability,
        };
        Dispersion { kind, repr, value: self.value }
    }

    fn from_model(d: &Dispersion) -> Self {
        let repr = match d.repr {
            DispersionRepr::Sigma => ReprDoc::Sigma,
            DispersionRepr::Variance => ReprDoc::Variance,
            DispersionRepr::AlertLimit => ReprDoc::AlertLimit,
            DispersionRepr::Probability => ReprDoc::Probability,
        };
        let unit = match &d.kind {
            MeasureKind::GaussianError { unit } => Some(unit.clone()),
            MeasureKind::SuccessProbability => None,
        };
        DispersionDoc { repr, value: d.value, unit }
    }
}

impl TimingDoc {
    fn to_model(&self) -> TimingReq {
        TimingReq {
            repr: match self.repr {
                TimingReprDoc::Hz => TimingRepr::FrequencyHertz,
                TimingReprDoc::Seconds => TimingRepr::PeriodSeconds,
            },
            value: self.value,
        }
    }

    fn from_model(t: &TimingReq) -> Self {
        TimingDoc {
            repr: match t.repr {
                TimingRepr::FrequencyHertz => TimingReprDoc::Hz,
                TimingRepr::PeriodSeconds => TimingReprDoc::Seconds,
            },
            value: t.value,
        }
    }
}

/// A document resolved against the in-memory model.
#[derive(Debug, Clone)]
pub struct ResolvedSpec {
    pub task: TaskSpec,
    pub systems: Vec<SystemSpec>,
}

impl SpecDocument {
    /// Resolves into model types. Requirement cells recorded as `null` make
    /// resolution fail with one diagnostic per missing cell.
    pub fn resolve(&self) -> Result<ResolvedSpec, Vec<InsufficientCell>> {
        let mut missing = Vec::new();
        let mut capabilities = Vec::new();
        for cap in &self.task.capabilities {
            if cap.dispersion.is_none() {
                missing.push(InsufficientCell {
                    capability: cap.name.clone(),
                    cell: CellKind::Dispersion,
                });
            }
            if cap.timing.is_none() {
                missing.push(InsufficientCell {
                    capability: cap.name.clone(),
                    cell: CellKind::Timing,
                });
            }
            if let (Some(d), Some(t)) = (&cap.dispersion, &cap.timing) {
                capabilities.push(CapabilityRequirement {
                    name: cap.name.clone(),
                    dispersion: d.to_model(),
                    timing: t.to_model(),
                    integrity_risk: cap.integrity_risk,
                    tta: cap.tta,
                    weight: cap.weight,
                });
            }
        }
        if !missing.is_empty() {
            return Err(missing);
        }

        let regions = self
            .task
            .regions
            .iter()
            .map(|r| OperatingRegion {
                name: r.name.clone(),
                overrides: r
                    .overrides
                    .iter()
                    .map(|(cap, ov)| {
                        (
                            cap.clone(),
                            RequirementOverride {
                                dispersion: ov.dispersion.as_ref().map(DispersionDoc::to_model),
                                timing: ov.timing.as_ref().map(TimingDoc::to_model),
                                integrity_risk: ov.integrity_risk,
                                tta: ov.tta,
                            },
                        )
                    })
                    .collect(),
            })
            .collect();

        let task = TaskSpec { name: self.task.name.clone(), capabilities, regions };

        let systems = self
            .systems
            .iter()
            .map(|s| SystemSpec {
                name: s.name.clone(),
                capabilities: s
                    .capabilities
                    .iter()
                    .map(|(cap, perf)| {
                        (
                            cap.clone(),
                            MeasuredPerformance {
                                dispersion: perf.dispersion.to_model(),
                                timing: perf.timing.to_model(),
                            },
                        )
                    })
                    .collect(),
            })
            .collect();

        Ok(ResolvedSpec { task, systems })
    }

    pub fn system(&self, name: &str) -> Option<&SystemDoc> {
        self.systems.iter().find(|s| s.name == name)
    }

    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("document serializes");
        text.push('\n');
        text
    }
}

/// Builders used by bundled scenarios (and handy in tests).
pub fn capability_doc(req: &CapabilityRequirement) -> CapabilityDoc {
    CapabilityDoc {
        name: req.name.clone(),
        dispersion: Some(DispersionDoc::from_model(&req.dispersion)),
        timing: Some(TimingDoc::from_model(&req.timing)),
        integrity_risk: req.integrity_risk,
        tta: req.tta,
        weight: req.weight,
    }
}

pub fn override_doc(ov: &RequirementOverride) -> OverrideDoc {
    OverrideDoc {
        dispersion: ov.dispersion.as_ref().map(DispersionDoc::from_model),
        timing: ov.timing.as_ref().map(TimingDoc::from_model),
        integrity_risk: ov.integrity_risk,
        tta: ov.tta,
    }
}

pub fn performance_doc(perf: &MeasuredPerformance) -> PerformanceDoc {
    PerformanceDoc {
        dispersion: DispersionDoc::from_model(&perf.dispersion),
        timing: TimingDoc::from_model(&perf.timing),
    }
}
