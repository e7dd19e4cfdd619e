//! Requirement-based autonomy scoring and capability integrity monitoring.
//!
//! The library evaluates a fully autonomous system against the performance
//! requirements of a task: each requisite capability is scored on reliability
//! (required vs. actual error variance) and responsiveness (required vs.
//! actual response time). From those scores it derives a Level of Autonomy
//! (an ordinal verdict over operating regions) and a Degree of Autonomy
//! (a ratio-scale score of how far performance exceeds requirements), and it
//! can watch the same capabilities online: a sliding-window estimator turns
//! telemetry into protection levels that are checked against alert limits,
//! with time-to-alert promotion and failure-rate budget accounting.
//!
//! Modules:
//! - [`model`] — capability requirements, operating regions, task and system
//!   specifications, dispersion/timing representations.
//! - [`metrics`] — the reliability and responsiveness quotients and the
//!   per-capability aggregation term.
//! - [`assessment`] — LoA classification, DoA aggregation, sensitivity
//!   sweeps, open-loop displacement.
//! - [`integrity`] — online protection-level monitoring over telemetry.
//! - [`baselines`] — earlier autonomy formulas for side-by-side reporting.

pub mod assessment;
pub mod baselines;
pub mod integrity;
pub mod metrics;
pub mod model;

pub use assessment::{
    assess, classify_loa, degree_of_autonomy, open_loop_displacement, sensitivity_sweep,
    weighted_degree_of_autonomy, AssessmentError, AssessmentReport, CapabilityScore, DimPass,
    FailedCheck, FailedDimension, LoaLevel, PassMatrix, RegionAssessment, SweepPoint, SweepRange,
};
pub use baselines::{
    curtin_autonomy, doboli_integral, insaurralde_level, insaurralde_ratio, BaselineError,
    CurtinParams, EffortGrid,
};
pub use integrity::{
    replay, CapabilityRisk, IntegrityError, IntegrityEvent, IntegrityEventKind, IntegrityMonitor,
    MonitorConfig, ReplayOutcome, RiskSummary, TelemetryEvent, TelemetryPayload,
};
pub use metrics::{
    capability_term, reliability, reliability_success, responsiveness, MetricError, MetricValue,
};
pub use model::{
    essential_requirement, validate_task_spec, CapabilityRequirement, Diagnostic, DiagnosticKind,
    Dispersion, DispersionRepr, MeasureKind, MeasuredPerformance, ModelError, OperatingRegion,
    RequirementOverride, SystemSpec, TaskSpec, TimingRepr, TimingReq, SIGMA_TO_ALERT,
};
