//! Online integrity monitoring.
//!
//! Each requisite capability feeds timestamped telemetry (signed error
//! samples or success/failure outcomes) into a sliding-window estimator. The
//! windowed dispersion becomes a protection level `PL = SIGMA_TO_ALERT *
//! sigma_hat` which is checked against the capability's alert limit. A
//! violation opens a fault; a fault that survives longer than the time to
//! alert is promoted to an integrity event; recovery closes it. Observed
//! integrity events are finally accounted against the capability's
//! failures-per-hour budget.
//!
//! Response timing is treated as constant for a given capability and never
//! contributes to fault decisions; only the sample values do.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::metrics::{reliability, reliability_success, MetricError};
use crate::model::{
    essential_requirement, validate_task_spec, Diagnostic, MeasureKind, ModelError, SystemSpec,
    TaskSpec, SIGMA_TO_ALERT,
};

/// Estimator sizing and fallbacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    /// Window length, in samples, for gaussian-error capabilities.
    pub error_window: usize,
    /// Window length, in outcomes, for success-probability capabilities.
    pub outcome_window: usize,
    /// Time to alert used when a requirement does not state one, seconds.
    pub default_tta: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig { error_window: 100, outcome_window: 200, default_tta: 1.0 }
    }
}

/// One telemetry sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryEvent {
    /// Seconds; non-decreasing per capability.
    pub timestamp: f64,
    pub capability: String,
    pub payload: TelemetryPayload,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TelemetryPayload {
    /// Signed error sample in the capability's unit.
    ErrorSample(f64),
    /// Success (true) or failure (false) of one trial.
    Outcome(bool),
}

/// What the monitor emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrityEventKind {
    /// Protection level first exceeded the alert limit.
    FaultOnset,
    /// The fault outlived the time to alert.
    IntegrityEvent,
    /// Protection level dropped back under the alert limit.
    FaultCleared,
}

impl IntegrityEventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntegrityEventKind::FaultOnset => "fault-onset",
            IntegrityEventKind::IntegrityEvent => "integrity-event",
            IntegrityEventKind::FaultCleared => "fault-cleared",
        }
    }
}

/// A monitor emission, with the protection level and alert limit at the
/// moment it fired.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrityEvent {
    pub capability: String,
    pub kind: IntegrityEventKind,
    pub timestamp: f64,
    pub protection_level: f64,
    pub alert_limit: f64,
}

/// Sliding window with incremental mean/spread updates (Welford forward,
/// inverse Welford on eviction).
///
/// Inverse updates cancel precision when the data scale drops: evicting a
/// value far outside the remaining spread leaves m2 carrying absolute error
/// from the old scale. A running error bound tracks the rounding injected by
/// each update, and the accumulators are rebuilt two-pass from the window
/// once the bound stops being negligible against m2.
#[derive(Debug, Clone)]
struct SlidingStats {
    window: VecDeque<f64>,
    capacity: usize,
    mean: f64,
    m2: f64,
    err_bound: f64,
}

impl SlidingStats {
    fn new(capacity: usize) -> Self {
        SlidingStats {
            window: VecDeque::with_capacity(capacity),
            capacity,
            mean: 0.0,
            m2: 0.0,
            err_bound: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        if self.window.len() == self.capacity {
            let old = self.window.pop_front().expect("non-empty window");
            let n = self.window.len() as f64 + 1.0;
            if self.window.is_empty() {
                self.mean = 0.0;
                self.m2 = 0.0;
                self.err_bound = 0.0;
            } else {
                let new_mean = (n * self.mean - old) / (n - 1.0);
                let contribution = (old - self.mean) * (old - new_mean);
                self.m2 -= contribution;
                self.mean = new_mean;
                self.err_bound += f64::EPSILON * (contribution.abs() + self.m2.abs());
            }
        }
        self.window.push_back(x);
        let n = self.window.len() as f64;
        let delta = x - self.mean;
        self.mean += delta / n;
        let added = delta * (x - self.mean);
        self.m2 += added;
        self.err_bound += f64::EPSILON * (added.abs() + self.m2.abs());
        if self.err_bound > self.m2.abs() * 1e-10 && self.err_bound > 0.0 {
            self.recompute();
        }
    }

    /// Exact two-pass rebuild of the accumulators from the window contents.
    fn recompute(&mut self) {
        let n = self.window.len() as f64;
        self.mean = self.window.iter().sum::<f64>() / n;
        self.m2 = self.window.iter().map(|x| (x - self.mean) * (x - self.mean)).sum();
        self.err_bound = f64::EPSILON * self.m2 * n.sqrt();
    }

    fn is_full(&self) -> bool {
        self.window.len() == self.capacity
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance over the window; `None` below two samples.
    fn sample_variance(&self) -> Option<f64> {
        let n = self.window.len();
        (n >= 2).then(|| (self.m2 / (n as f64 - 1.0)).max(0.0))
    }
}

/// Sliding window over boolean outcomes.
#[derive(Debug, Clone)]
struct OutcomeWindow {
    window: VecDeque<bool>,
    capacity: usize,
    successes: usize,
}

impl OutcomeWindow {
    fn new(capacity: usize) -> Self {
        OutcomeWindow { window: VecDeque::with_capacity(capacity), capacity, successes: 0 }
    }

    fn push(&mut self, ok: bool) {
        if self.window.len() == self.capacity {
            if self.window.pop_front().expect("non-empty window") {
                self.successes -= 1;
            }
        }
        self.window.push_back(ok);
        if ok {
            self.successes += 1;
        }
    }

    fn is_full(&self) -> bool {
        self.window.len() == self.capacity
    }

    fn success_rate(&self) -> Option<f64> {
        (!self.window.is_empty()).then(|| self.successes as f64 / self.window.len() as f64)
    }
}

#[derive(Debug, Clone)]
enum Estimator {
    Error(SlidingStats),
    Outcome(OutcomeWindow),
}

#[derive(Debug, Clone)]
struct CapabilityState {
    name: String,
    kind: MeasureKind,
    /// Reference standard deviation behind the alert limit.
    sigma_ref: f64,
    /// Success floor, for success-probability capabilities.
    p_ref: Option<f64>,
    alert_limit: f64,
    tta: f64,
    ir_budget: Option<f64>,
    estimator: Estimator,
    fault_open_since: Option<f64>,
    breach_emitted: bool,
    first_seen: Option<f64>,
    last_seen: Option<f64>,
    bias_flagged: bool,
    events: Vec<IntegrityEvent>,
}

impl CapabilityState {
    /// Current dispersion estimate; `None` until the window is full.
    fn sigma_estimate(&self) -> Option<f64> {
        match &self.estimator {
            Estimator::Error(s) => {
                s.is_full().then(|| s.sample_variance().unwrap_or(0.0).sqrt())
            }
            Estimator::Outcome(w) => w.is_full().then(|| {
                let p = w.success_rate().unwrap_or(0.0);
                (p * (1.0 - p)).sqrt()
            }),
        }
    }

    /// Whether the capability currently violates its requirement; `None`
    /// while the window is still filling.
    fn violated(&self) -> Result<Option<bool>, MetricError> {
        match &self.estimator {
            Estimator::Error(s) => {
                if !s.is_full() {
                    return Ok(None);
                }
                let var_ref = self.sigma_ref * self.sigma_ref;
                let c_rel = reliability(var_ref, s.sample_variance().unwrap_or(0.0))?;
                Ok(Some(!c_rel.is_passing()))
            }
            Estimator::Outcome(w) => {
                if !w.is_full() {
                    return Ok(None);
                }
                let p_ref = self.p_ref.expect("success capability has a floor");
                let c_rel = reliability_success(p_ref, w.success_rate().unwrap_or(0.0))?;
                Ok(Some(!c_rel.is_passing()))
            }
        }
    }

    fn operating_hours(&self) -> f64 {
        match (self.first_seen, self.last_seen) {
            (Some(a), Some(b)) => (b - a) / 3600.0,
            _ => 0.0,
        }
    }
}

/// Per-capability account of observed integrity events against the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityRisk {
    pub capability: String,
    pub integrity_events: usize,
    pub fault_onsets: usize,
    pub operating_hours: f64,
    /// Integrity events per operating hour; `None` without operating time.
    pub observed_rate_fph: Option<f64>,
    /// Budgeted failures per hour; `None` when the task does not budget one.
    pub ir_budget_fph: Option<f64>,
    /// `None` when either side of the comparison is unavailable.
    pub within_budget: Option<bool>,
    /// Window mean strayed beyond sigma_ref at some point, undermining the
    /// zero-mean reading of variance as error power.
    pub bias_flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskSummary {
    pub capabilities: Vec<CapabilityRisk>,
    pub total_integrity_events: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrityError {
    #[error("unknown capability `{name}`")]
    UnknownCapability { name: String },
    #[error("payload kind does not match capability `{name}` ({kind})")]
    KindMismatch { name: String, kind: MeasureKind },
    #[error("out-of-order timestamp {timestamp} for `{capability}` (previous {previous})")]
    OutOfOrder { capability: String, timestamp: f64, previous: f64 },
    #[error("telemetry log is not globally sorted at entry {index}")]
    UnsortedLog { index: usize },
    #[error("timestamp {value} is not finite")]
    NonFiniteTimestamp { value: f64 },
    #[error("no operating time accumulated")]
    ZeroOperatingTime,
    #[error("window sizes must be at least 2 samples / 1 outcome and time to alert positive")]
    InvalidConfig,
    #[error("specification is not monitorable: {} diagnostic(s)", .0.len())]
    Validation(Vec<Diagnostic>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Online monitor over a task's requisite capabilities. States for distinct
/// capabilities are independent; a single ingest touches exactly one.
#[derive(Debug, Clone)]
pub struct IntegrityMonitor {
    capabilities: Vec<CapabilityState>,
    index: BTreeMap<String, usize>,
}

impl IntegrityMonitor {
    /// Builds a monitor checking each capability against its essential
    /// (tightest across regions) requirement.
    pub fn new(task: &TaskSpec, config: MonitorConfig) -> Result<Self, IntegrityError> {
        Self::with_requirements(task, None, config)
    }

    /// Builds a monitor checking against one region's local requirements
    /// instead of the essential ones.
    pub fn for_region(
        task: &TaskSpec,
        region: &str,
        config: MonitorConfig,
    ) -> Result<Self, IntegrityError> {
        Self::with_requirements(task, Some(region), config)
    }

    fn with_requirements(
        task: &TaskSpec,
        region: Option<&str>,
        config: MonitorConfig,
    ) -> Result<Self, IntegrityError> {
        if config.error_window < 2 || config.outcome_window < 1 {
            return Err(IntegrityError::InvalidConfig);
        }
        if !config.default_tta.is_finite() || config.default_tta <= 0.0 {
            return Err(IntegrityError::InvalidConfig);
        }
        let region = match region {
            Some(name) => Some(
                task.regions
                    .iter()
                    .find(|r| r.name == name)
                    .ok_or_else(|| ModelError::UnknownRegion { name: name.to_string() })?,
            ),
            None => None,
        };

        let mut capabilities = Vec::with_capacity(task.capabilities.len());
        let mut index = BTreeMap::new();
        for req in &task.capabilities {
            let requirement = match region {
                Some(r) => task.local_requirement(&req.name, r)?,
                None => essential_requirement(&req.name, task)?,
            };
            let sigma_ref = requirement.dispersion.to_sigma()?;
            let p_ref = requirement.dispersion.as_probability();
            let estimator = match requirement.dispersion.kind {
                MeasureKind::GaussianError { .. } => {
                    Estimator::Error(SlidingStats::new(config.error_window))
                }
                MeasureKind::SuccessProbability => {
                    Estimator::Outcome(OutcomeWindow::new(config.outcome_window))
                }
            };
            index.insert(req.name.clone(), capabilities.len());
            capabilities.push(CapabilityState {
                name: req.name.clone(),
                kind: requirement.dispersion.kind.clone(),
                sigma_ref,
                p_ref,
                alert_limit: SIGMA_TO_ALERT * sigma_ref,
                tta: requirement.tta.unwrap_or(config.default_tta),
                ir_budget: requirement.integrity_risk,
                estimator,
                fault_open_since: None,
                breach_emitted: false,
                first_seen: None,
                last_seen: None,
                bias_flagged: false,
                events: Vec::new(),
            });
        }
        Ok(IntegrityMonitor { capabilities, index })
    }

    /// Feeds one sample; returns the events it caused (at most one).
    pub fn ingest(&mut self, event: &TelemetryEvent) -> Result<Vec<IntegrityEvent>, IntegrityError> {
        if !event.timestamp.is_finite() {
            return Err(IntegrityError::NonFiniteTimestamp { value: event.timestamp });
        }
        let idx = *self
            .index
            .get(&event.capability)
            .ok_or_else(|| IntegrityError::UnknownCapability { name: event.capability.clone() })?;
        let cap = &mut self.capabilities[idx];

        if let Some(last) = cap.last_seen {
            if event.timestamp < last {
                return Err(IntegrityError::OutOfOrder {
                    capability: cap.name.clone(),
                    timestamp: event.timestamp,
                    previous: last,
                });
            }
        }

        match (&mut cap.estimator, event.payload) {
            (Estimator::Error(stats), TelemetryPayload::ErrorSample(x)) => stats.push(x),
            (Estimator::Outcome(window), TelemetryPayload::Outcome(ok)) => window.push(ok),
            _ => {
                return Err(IntegrityError::KindMismatch {
                    name: cap.name.clone(),
                    kind: cap.kind.clone(),
                })
            }
        }

        cap.first_seen.get_or_insert(event.timestamp);
        cap.last_seen = Some(event.timestamp);

        if let Estimator::Error(stats) = &cap.estimator {
            if stats.is_full() && stats.mean().abs() > cap.sigma_ref {
                cap.bias_flagged = true;
            }
        }

        let mut emitted = Vec::new();
        if let Some(violated) = cap.violated()? {
            let pl = SIGMA_TO_ALERT * cap.sigma_estimate().unwrap_or(0.0);
            let mut emit = |kind, state: &mut CapabilityState| {
                let ev = IntegrityEvent {
                    capability: state.name.clone(),
                    kind,
                    timestamp: event.timestamp,
                    protection_level: pl,
                    alert_limit: state.alert_limit,
                };
                state.events.push(ev.clone());
                emitted.push(ev);
            };
            match (violated, cap.fault_open_since) {
                (true, None) => {
                    cap.fault_open_since = Some(event.timestamp);
                    cap.breach_emitted = false;
                    emit(IntegrityEventKind::FaultOnset, cap);
                }
                (true, Some(opened)) => {
                    if !cap.breach_emitted && event.timestamp - opened > cap.tta {
                        cap.breach_emitted = true;
                        emit(IntegrityEventKind::IntegrityEvent, cap);
                    }
                }
                (false, Some(_)) => {
                    cap.fault_open_since = None;
                    cap.breach_emitted = false;
                    emit(IntegrityEventKind::FaultCleared, cap);
                }
                (false, None) => {}
            }
        }
        Ok(emitted)
    }

    /// All events so far, ordered by timestamp (ties resolved by capability
    /// declaration order, then emission order).
    pub fn events(&self) -> Vec<IntegrityEvent> {
        let mut all: Vec<(usize, usize, &IntegrityEvent)> = Vec::new();
        for (ci, cap) in self.capabilities.iter().enumerate() {
            for (ei, ev) in cap.events.iter().enumerate() {
                all.push((ci, ei, ev));
            }
        }
        all.sort_by(|a, b| {
            a.2.timestamp
                .partial_cmp(&b.2.timestamp)
                .expect("finite timestamps")
                .then(a.0.cmp(&b.0))
                .then(a.1.cmp(&b.1))
        });
        all.into_iter().map(|(_, _, ev)| ev.clone()).collect()
    }

    /// Current dispersion estimate for a capability (`None` until its window
    /// is full).
    pub fn sigma_estimate(&self, capability: &str) -> Option<f64> {
        self.index.get(capability).and_then(|i| self.capabilities[*i].sigma_estimate())
    }

    /// Current protection level (`None` until the window is full).
    pub fn protection_level(&self, capability: &str) -> Option<f64> {
        self.sigma_estimate(capability).map(|s| SIGMA_TO_ALERT * s)
    }

    pub fn alert_limit(&self, capability: &str) -> Option<f64> {
        self.index.get(capability).map(|i| self.capabilities[*i].alert_limit)
    }

    pub fn fault_open_since(&self, capability: &str) -> Option<f64> {
        self.index.get(capability).and_then(|i| self.capabilities[*i].fault_open_since)
    }

    /// Accounts observed integrity events against each capability's
    /// failures-per-hour budget. Errors when no capability accumulated any
    /// operating time.
    pub fn risk_summary(&self) -> Result<RiskSummary, IntegrityError> {
        if self.capabilities.iter().all(|c| c.operating_hours() <= 0.0) {
            return Err(IntegrityError::ZeroOperatingTime);
        }
        let mut rows = Vec::with_capacity(self.capabilities.len());
        let mut total = 0usize;
        for cap in &self.capabilities {
            let integrity_events = cap
                .events
                .iter()
                .filter(|e| e.kind == IntegrityEventKind::IntegrityEvent)
                .count();
            let fault_onsets = cap
                .events
                .iter()
                .filter(|e| e.kind == IntegrityEventKind::FaultOnset)
                .count();
            total += integrity_events;
            let hours = cap.operating_hours();
            let observed = (hours > 0.0).then(|| integrity_events as f64 / hours);
            let within = match (observed, cap.ir_budget) {
                (Some(rate), Some(budget)) => Some(rate <= budget),
                _ => None,
            };
            rows.push(CapabilityRisk {
                capability: cap.name.clone(),
                integrity_events,
                fault_onsets,
                operating_hours: hours,
                observed_rate_fph: observed,
                ir_budget_fph: cap.ir_budget,
                within_budget: within,
                bias_flagged: cap.bias_flagged,
            });
        }
        Ok(RiskSummary { capabilities: rows, total_integrity_events: total })
    }
}

/// Batch replay outcome: everything the monitor emitted plus the final
/// budget accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub events: Vec<IntegrityEvent>,
    pub summary: RiskSummary,
}

/// Replays a globally sorted telemetry log through a fresh monitor.
/// Equivalent to calling [`IntegrityMonitor::ingest`] in log order; identical
/// logs produce identical outcomes.
pub fn replay(
    task: &TaskSpec,
    system: Option<&SystemSpec>,
    log: &[TelemetryEvent],
    config: MonitorConfig,
) -> Result<ReplayOutcome, IntegrityError> {
    if let Some(system) = system {
        let diagnostics = validate_task_spec(task, system);
        if !diagnostics.is_empty() {
            return Err(IntegrityError::Validation(diagnostics));
        }
    }
    for (i, pair) in log.windows(2).enumerate() {
        if pair[1].timestamp < pair[0].timestamp {
            return Err(IntegrityError::UnsortedLog { index: i + 1 });
        }
    }
    let mut monitor = IntegrityMonitor::new(task, config)?;
    for event in log {
        monitor.ingest(event)?;
    }
    let summary = monitor.risk_summary()?;
    Ok(ReplayOutcome { events: monitor.events(), summary })
}
