//! Domain model: capabilities, requirements, operating regions, task and
//! system specifications.
//!
//! Values are plain data; nothing here enforces invariants at construction
//! time. [`validate_task_spec`] reports violations as diagnostics, and the
//! operations that need well-formed input ([`Dispersion::to_variance`],
//! [`essential_requirement`]) return errors when they get garbage.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Gaussian coverage factor mapping a standard deviation to the error bound
/// that leaves a 1e-8 two-sided tail (99.999999% coverage). An alert limit is
/// `SIGMA_TO_ALERT * sigma_ref`; a protection level is
/// `SIGMA_TO_ALERT * sigma_act`.
pub const SIGMA_TO_ALERT: f64 = 5.730729;

/// What a capability's dispersion measures.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MeasureKind {
    /// Zero-mean measurement error with a free-form unit ("m", "deg", "km/h").
    /// Units are compared for equality only; there is no conversion.
    GaussianError { unit: String },
    /// Per-trial success probability. Per-trial variance is `p * (1 - p)`.
    SuccessProbability,
}

impl MeasureKind {
    pub fn is_success(&self) -> bool {
        matches!(self, MeasureKind::SuccessProbability)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::GaussianError { unit } => write!(f, "gaussian-error[{unit}]"),
            MeasureKind::SuccessProbability => write!(f, "success-probability"),
        }
    }
}

/// How a dispersion value is written down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DispersionRepr {
    Sigma,
    Variance,
    /// `SIGMA_TO_ALERT * sigma`; divides back out on conversion.
    AlertLimit,
    /// Success probability in [0, 1]; only valid with
    /// [`MeasureKind::SuccessProbability`].
    Probability,
}

impl fmt::Display for DispersionRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DispersionRepr::Sigma => "sigma",
            DispersionRepr::Variance => "variance",
            DispersionRepr::AlertLimit => "alert_limit",
            DispersionRepr::Probability => "probability",
        };
        f.write_str(s)
    }
}

/// A dispersion (statistical error bound) in one of four representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispersion {
    pub kind: MeasureKind,
    pub repr: DispersionRepr,
    pub value: f64,
}

impl Dispersion {
    pub fn sigma(value: f64, unit: &str) -> Self {
        Dispersion {
            kind: MeasureKind::GaussianError { unit: unit.to_string() },
            repr: DispersionRepr::Sigma,
            value,
        }
    }

    pub fn variance(value: f64, unit: &str) -> Self {
        Dispersion {
            kind: MeasureKind::GaussianError { unit: unit.to_string() },
            repr: DispersionRepr::Variance,
            value,
        }
    }

    pub fn alert_limit(value: f64, unit: &str) -> Self {
        Dispersion {
            kind: MeasureKind::GaussianError { unit: unit.to_string() },
            repr: DispersionRepr::AlertLimit,
            value,
        }
    }

    pub fn probability(value: f64) -> Self {
        Dispersion {
            kind: MeasureKind::SuccessProbability,
            repr: DispersionRepr::Probability,
            value,
        }
    }

    /// Converts to a variance:
    /// sigma → sigma², alert limit → (value / [`SIGMA_TO_ALERT`])²,
    /// probability p → p(1−p), variance → unchanged.
    pub fn to_variance(&self) -> Result<f64, ModelError> {
        if !self.value.is_finite() {
            return Err(ModelError::NonFiniteValue { value: self.value });
        }
        match self.repr {
            DispersionRepr::Probability => {
                if !self.kind.is_success() {
                    return Err(ModelError::ProbabilityReprOnGaussian);
                }
                if !(0.0..=1.0).contains(&self.value) {
                    return Err(ModelError::ProbabilityOutOfRange { value: self.value });
                }
                Ok(self.value * (1.0 - self.value))
            }
            repr => {
                if self.value < 0.0 {
                    return Err(ModelError::NegativeDispersion { value: self.value });
                }
                Ok(match repr {
                    DispersionRepr::Sigma => self.value * self.value,
                    DispersionRepr::Variance => self.value,
                    DispersionRepr::AlertLimit => {
                        let sigma = self.value / SIGMA_TO_ALERT;
                        sigma * sigma
                    }
                    DispersionRepr::Probability => unreachable!(),
                })
            }
        }
    }

    /// Standard-deviation view of the same dispersion.
    pub fn to_sigma(&self) -> Result<f64, ModelError> {
        Ok(self.to_variance()?.sqrt())
    }

    /// The probability behind a probability-representation value, if any.
    pub fn as_probability(&self) -> Option<f64> {
        (self.repr == DispersionRepr::Probability).then_some(self.value)
    }
}

/// How a response-time requirement or measurement is written down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TimingRepr {
    PeriodSeconds,
    FrequencyHertz,
}

/// A response-time figure; period and frequency are interchangeable
/// (`period = 1 / frequency`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingReq {
    pub repr: TimingRepr,
    pub value: f64,
}

impl TimingReq {
    pub fn hertz(value: f64) -> Self {
        TimingReq { repr: TimingRepr::FrequencyHertz, value }
    }

    pub fn seconds(value: f64) -> Self {
        TimingReq { repr: TimingRepr::PeriodSeconds, value }
    }

    /// Response period in seconds.
    pub fn period_seconds(&self) -> Result<f64, ModelError> {
        if !self.value.is_finite() || self.value <= 0.0 {
            return Err(ModelError::NonPositiveTiming { value: self.value });
        }
        Ok(match self.repr {
            TimingRepr::PeriodSeconds => self.value,
            TimingRepr::FrequencyHertz => 1.0 / self.value,
        })
    }
}

/// One requisite capability's performance requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityRequirement {
    pub name: String,
    /// Required dispersion bound (sigma_ref, alert limit, or success floor).
    pub dispersion: Dispersion,
    /// Essential response time (t_ref, as period or frequency).
    pub timing: TimingReq,
    /// Integrity-risk budget in failures per operating hour, in (0, 1].
    /// `None` when the task does not budget this capability.
    pub integrity_risk: Option<f64>,
    /// Time to alert in seconds; faults must be alerted within this long.
    /// `None` defers to the monitor's default.
    pub tta: Option<f64>,
    /// Importance weight for weighted aggregation; must be positive.
    pub weight: f64,
}

impl CapabilityRequirement {
    pub fn new(name: &str, dispersion: Dispersion, timing: TimingReq) -> Self {
        CapabilityRequirement {
            name: name.to_string(),
            dispersion,
            timing,
            integrity_risk: None,
            tta: None,
            weight: 1.0,
        }
    }

    pub fn with_integrity_risk(mut self, failures_per_hour: f64) -> Self {
        self.integrity_risk = Some(failures_per_hour);
        self
    }

    pub fn with_tta(mut self, seconds: f64) -> Self {
        self.tta = Some(seconds);
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// Field-level requirement override inside an operating region. Absent
/// fields inherit from the task's base requirement.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RequirementOverride {
    pub dispersion: Option<Dispersion>,
    pub timing: Option<TimingReq>,
    pub integrity_risk: Option<f64>,
    pub tta: Option<f64>,
}

/// A named operating region with local (functional) requirement overrides.
/// Regions are symbolic; no geometry is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingRegion {
    pub name: String,
    pub overrides: BTreeMap<String, RequirementOverride>,
}

impl OperatingRegion {
    pub fn new(name: &str) -> Self {
        OperatingRegion { name: name.to_string(), overrides: BTreeMap::new() }
    }

    pub fn with_override(mut self, capability: &str, ov: RequirementOverride) -> Self {
        self.overrides.insert(capability.to_string(), ov);
        self
    }
}

/// A task: the requisite capability set with its essential requirements and
/// the operating regions that refine them.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub name: String,
    /// Ordered requisite capabilities; names must be unique and the set
    /// non-empty.
    pub capabilities: Vec<CapabilityRequirement>,
    /// May be empty, in which case the base requirements stand alone.
    pub regions: Vec<OperatingRegion>,
}

impl TaskSpec {
    pub fn capability(&self, name: &str) -> Option<&CapabilityRequirement> {
        self.capabilities.iter().find(|c| c.name == name)
    }

    /// The requirement governing `capability` inside `region`: the region's
    /// override fields layered over the base requirement.
    pub fn local_requirement(
        &self,
        capability: &str,
        region: &OperatingRegion,
    ) -> Result<CapabilityRequirement, ModelError> {
        let base = self
            .capability(capability)
            .ok_or_else(|| ModelError::UnknownCapability { name: capability.to_string() })?;
        let mut req = base.clone();
        if let Some(ov) = region.overrides.get(capability) {
            if let Some(d) = &ov.dispersion {
                req.dispersion = d.clone();
            }
            if let Some(t) = &ov.timing {
                req.timing = *t;
            }
            if ov.integrity_risk.is_some() {
                req.integrity_risk = ov.integrity_risk;
            }
            if ov.tta.is_some() {
                req.tta = ov.tta;
            }
        }
        Ok(req)
    }
}

/// A system's measured performance for one capability.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredPerformance {
    /// Actual dispersion (sigma_act, protection level, or success rate).
    pub dispersion: Dispersion,
    /// Actual response time (t_act).
    pub timing: TimingReq,
}

/// The system under assessment: its claimed capability set.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub capabilities: BTreeMap<String, MeasuredPerformance>,
}

impl SystemSpec {
    pub fn new(name: &str) -> Self {
        SystemSpec { name: name.to_string(), capabilities: BTreeMap::new() }
    }

    pub fn with_capability(mut self, name: &str, perf: MeasuredPerformance) -> Self {
        self.capabilities.insert(name.to_string(), perf);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dispersion value must be non-negative, got {value}")]
    NegativeDispersion { value: f64 },
    #[error("probability must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { value: f64 },
    #[error("probability representation requires a success-probability capability")]
    ProbabilityReprOnGaussian,
    #[error("value must be finite, got {value}")]
    NonFiniteValue { value: f64 },
    #[error("timing value must be positive and finite, got {value}")]
    NonPositiveTiming { value: f64 },
    #[error("unknown capability `{name}`")]
    UnknownCapability { name: String },
    #[error("unknown region `{name}`")]
    UnknownRegion { name: String },
}

/// What a validation diagnostic is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    MissingCapability,
    KindMismatch,
    NonPositiveTiming,
    ProbabilityOutOfRange,
    NegativeDispersion,
    NonFiniteValue,
    DuplicateCapability,
    EmptyCapabilitySet,
    UnknownOverrideTarget,
    NonPositiveWeight,
    InvalidIntegrityRisk,
    InvalidTta,
    ProbabilityReprRequired,
}

/// One validation finding, identifying the capability/region it concerns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub capability: Option<String>,
    pub region: Option<String>,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, message: String) -> Self {
        Diagnostic { kind, capability: None, region: None, message }
    }

    fn for_capability(kind: DiagnosticKind, capability: &str, message: String) -> Self {
        Diagnostic { kind, capability: Some(capability.to_string()), region: None, message }
    }

    fn for_region(kind: DiagnosticKind, capability: &str, region: &str, message: String) -> Self {
        Diagnostic {
            kind,
            capability: Some(capability.to_string()),
            region: Some(region.to_string()),
            message,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.capability, &self.region) {
            (Some(c), Some(r)) => write!(f, "{c} [{r}]: {}", self.message),
            (Some(c), None) => write!(f, "{c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

fn check_dispersion(
    d: &Dispersion,
    capability: &str,
    region: Option<&str>,
    out: &mut Vec<Diagnostic>,
) {
    let mut push = |kind, message| {
        out.push(match region {
            Some(r) => Diagnostic::for_region(kind, capability, r, message),
            None => Diagnostic::for_capability(kind, capability, message),
        })
    };
    if !d.value.is_finite() {
        push(DiagnosticKind::NonFiniteValue, format!("dispersion value {} is not finite", d.value));
        return;
    }
    match d.repr {
        DispersionRepr::Probability => {
            if !d.kind.is_success() {
                push(
                    DiagnosticKind::KindMismatch,
                    "probability representation on a gaussian-error capability".to_string(),
                );
            }
            if !(0.0..=1.0).contains(&d.value) {
                push(
                    DiagnosticKind::ProbabilityOutOfRange,
                    format!("probability {} out of range [0, 1]", d.value),
                );
            }
        }
        _ => {
            if d.value < 0.0 {
                push(
                    DiagnosticKind::NegativeDispersion,
                    format!("negative dispersion {}", d.value),
                );
            }
            if d.kind.is_success() {
                push(
                    DiagnosticKind::ProbabilityReprRequired,
                    format!(
                        "success-probability capability must use probability representation, got {}",
                        d.repr
                    ),
                );
            }
        }
    }
}

fn check_timing(t: &TimingReq, capability: &str, region: Option<&str>, out: &mut Vec<Diagnostic>) {
    if !t.value.is_finite() || t.value <= 0.0 {
        let message = format!("timing value {} must be positive", t.value);
        out.push(match region {
            Some(r) => Diagnostic::for_region(DiagnosticKind::NonPositiveTiming, capability, r, message),
            None => Diagnostic::for_capability(DiagnosticKind::NonPositiveTiming, capability, message),
        });
    }
}

fn check_requirement_extras(req: &CapabilityRequirement, out: &mut Vec<Diagnostic>) {
    if !req.weight.is_finite() || req.weight <= 0.0 {
        out.push(Diagnostic::for_capability(
            DiagnosticKind::NonPositiveWeight,
            &req.name,
            format!("weight {} must be positive", req.weight),
        ));
    }
    if let Some(ir) = req.integrity_risk {
        if !ir.is_finite() || ir <= 0.0 || ir > 1.0 {
            out.push(Diagnostic::for_capability(
                DiagnosticKind::InvalidIntegrityRisk,
                &req.name,
                format!("integrity risk {ir} must lie in (0, 1] failures per hour"),
            ));
        }
    }
    if let Some(tta) = req.tta {
        if !tta.is_finite() || tta <= 0.0 {
            out.push(Diagnostic::for_capability(
                DiagnosticKind::InvalidTta,
                &req.name,
                format!("time to alert {tta} must be positive"),
            ));
        }
    }
}

/// Checks every structural invariant of a task/system pair and returns one
/// diagnostic per violation. An empty list means the pair is assessable.
///
/// The result is a multiset: permuting capabilities or regions changes only
/// the order the diagnostics appear in, never their content.
pub fn validate_task_spec(task: &TaskSpec, system: &SystemSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if task.capabilities.is_empty() {
        out.push(Diagnostic::new(
            DiagnosticKind::EmptyCapabilitySet,
            "task has no requisite capabilities".to_string(),
        ));
    }

    let mut seen = std::collections::BTreeSet::new();
    for req in &task.capabilities {
        if !seen.insert(req.name.as_str()) {
            out.push(Diagnostic::for_capability(
                DiagnosticKind::DuplicateCapability,
                &req.name,
                "duplicate requisite capability".to_string(),
            ));
        }
        check_dispersion(&req.dispersion, &req.name, None, &mut out);
        check_timing(&req.timing, &req.name, None, &mut out);
        check_requirement_extras(req, &mut out);
    }

    for region in &task.regions {
        for (cap, ov) in &region.overrides {
            let Some(base) = task.capability(cap) else {
                out.push(Diagnostic::for_region(
                    DiagnosticKind::UnknownOverrideTarget,
                    cap,
                    &region.name,
                    "override targets a capability outside the requisite set".to_string(),
                ));
                continue;
            };
            if let Some(d) = &ov.dispersion {
                if d.kind != base.dispersion.kind {
                    out.push(Diagnostic::for_region(
                        DiagnosticKind::KindMismatch,
                        cap,
                        &region.name,
                        format!(
                            "override kind {} differs from base kind {}",
                            d.kind, base.dispersion.kind
                        ),
                    ));
                }
                check_dispersion(d, cap, Some(&region.name), &mut out);
            }
            if let Some(t) = &ov.timing {
                check_timing(t, cap, Some(&region.name), &mut out);
            }
        }
    }

    for req in &task.capabilities {
        let Some(perf) = system.capabilities.get(&req.name) else {
            out.push(Diagnostic::for_capability(
                DiagnosticKind::MissingCapability,
                &req.name,
                format!("system `{}` lacks this requisite capability", system.name),
            ));
            continue;
        };
        if perf.dispersion.kind != req.dispersion.kind {
            out.push(Diagnostic::for_capability(
                DiagnosticKind::KindMismatch,
                &req.name,
                format!(
                    "system kind {} does not match required kind {}",
                    perf.dispersion.kind, req.dispersion.kind
                ),
            ));
        }
        check_dispersion(&perf.dispersion, &req.name, None, &mut out);
        check_timing(&perf.timing, &req.name, None, &mut out);
    }

    out
}

/// The essential (global) requirement for a capability: the tightest bound
/// across the base requirement and every region override. Tightest means
/// minimum variance (maximum floor for success probabilities), minimum
/// period, and the strictest integrity figures (smallest budget, smallest
/// time to alert).
pub fn essential_requirement(
    capability: &str,
    task: &TaskSpec,
) -> Result<CapabilityRequirement, ModelError> {
    let base = task
        .capability(capability)
        .ok_or_else(|| ModelError::UnknownCapability { name: capability.to_string() })?;

    let mut tightest = base.clone();
    let mut best_var = base.dispersion.to_variance()?;
    let mut best_period = base.timing.period_seconds()?;

    for region in &task.regions {
        let local = task.local_requirement(capability, region)?;

        let var = local.dispersion.to_variance()?;
        let stricter_dispersion = match (
            tightest.dispersion.as_probability(),
            local.dispersion.as_probability(),
        ) {
            // Success floors: a higher floor is the stricter requirement.
            (Some(cur), Some(new)) => new > cur,
            _ => var < best_var,
        };
        if stricter_dispersion {
            tightest.dispersion = local.dispersion.clone();
            best_var = var;
        }

        let period = local.timing.period_seconds()?;
        if period < best_period {
            tightest.timing = local.timing;
            best_period = period;
        }

        tightest.integrity_risk = min_opt(tightest.integrity_risk, local.integrity_risk);
        tightest.tta = min_opt(tightest.tta, local.tta);
    }

    Ok(tightest)
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}
