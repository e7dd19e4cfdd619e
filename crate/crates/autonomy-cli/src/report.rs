//! Report rendering: human-readable tables for standard output and stable
//! machine JSON documents for `--out`. Identical inputs produce byte-identical
//! machine output.

use serde::Serialize;

use autonomy_core::{
    AssessmentReport, IntegrityEvent, MetricValue, RiskSummary,
};

/// JSON image of a metric value: a number, or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MetricJson {
    Finite(f64),
    Symbol(&'static str),
}

impl From<MetricValue> for MetricJson {
    fn from(value: MetricValue) -> Self {
        match value {
            MetricValue::Finite(v) => MetricJson::Finite(v),
            MetricValue::Infinite => MetricJson::Symbol("inf"),
        }
    }
}

/// Micro-unit fixed-point image of a degree value, rounded to four decimals
/// first so the printed integer matches the conventional `x10^-6` notation.
pub fn doa_micro(value: f64) -> Option<i64> {
    let scaled = (value * 1e4).round();
    if scaled.is_finite() && scaled.abs() < 9e16 {
        Some(scaled as i64 * 100)
    } else {
        None
    }
}

pub fn format_fixed_point(value: MetricValue) -> String {
    match value {
        MetricValue::Infinite => "inf".to_string(),
        MetricValue::Finite(v) => match doa_micro(v) {
            Some(micro) => format!("{micro}×10⁻⁶"),
            None => format!("{v}"),
        },
    }
}

fn format_metric(value: Option<MetricValue>) -> String {
    match value {
        None => "-".to_string(),
        Some(MetricValue::Infinite) => "inf".to_string(),
        Some(MetricValue::Finite(v)) => format!("{v:.6}"),
    }
}

// ── assessment ───────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct MachineAssessment {
    pub schema: u32,
    pub kind: &'static str,
    pub task: String,
    pub system: String,
    pub loa: u8,
    pub loa_label: String,
    pub loa_description: String,
    pub functioning_level: Option<u8>,
    pub regions: Vec<MachineRegion>,
    pub failed_checks: Vec<MachineFailedCheck>,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct MachineRegion {
    pub name: String,
    pub feasible: bool,
    pub doa: Option<MetricJson>,
    pub doa_micro: Option<i64>,
    pub weighted_doa: Option<MetricJson>,
    pub capabilities: Vec<MachineScore>,
}

#[derive(Debug, Serialize)]
pub struct MachineScore {
    pub capability: String,
    pub reliability: Option<MetricJson>,
    pub responsiveness: Option<MetricJson>,
    pub term: Option<MetricJson>,
}

#[derive(Debug, Serialize)]
pub struct MachineFailedCheck {
    pub capability: String,
    pub region: String,
    pub dimension: String,
}

pub fn machine_assessment(report: &AssessmentReport) -> MachineAssessment {
    MachineAssessment {
        schema: 1,
        kind: "assessment",
        task: report.task.clone(),
        system: report.system.clone(),
        loa: report.loa.index(),
        loa_label: report.loa.short_label().to_string(),
        loa_description: report.loa.description().to_string(),
        functioning_level: report.loa.functioning_level(),
        regions: report
            .regions
            .iter()
            .map(|r| MachineRegion {
                name: r.region.clone(),
                feasible: r.feasible,
                doa: r.doa.map(MetricJson::from),
                doa_micro: match r.doa {
                    Some(MetricValue::Finite(v)) => doa_micro(v),
                    _ => None,
                },
                weighted_doa: r.weighted_doa.map(MetricJson::from),
                capabilities: r
                    .scores
                    .iter()
                    .map(|s| MachineScore {
                        capability: s.capability.clone(),
                        reliability: s.reliability.map(MetricJson::from),
                        responsiveness: s.responsiveness.map(MetricJson::from),
                        term: s.term.map(MetricJson::from),
                    })
                    .collect(),
            })
            .collect(),
        failed_checks: report
            .failed_checks
            .iter()
            .map(|f| MachineFailedCheck {
                capability: f.capability.clone(),
                region: f.region.clone(),
                dimension: f.dimension.to_string(),
            })
            .collect(),
        notes: report.notes.clone(),
    }
}

pub fn render_assessment(report: &AssessmentReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };

    push(&mut out, format!("task `{}` — system `{}`", report.task, report.system));
    let functioning = match report.loa.functioning_level() {
        Some(l) => format!(" [functioning level {l}]"),
        None => String::new(),
    };
    push(
        &mut out,
        format!("{} — {}{}", report.loa, report.loa.description(), functioning),
    );
    push(&mut out, String::new());

    push(
        &mut out,
        format!("{:<24} {:<9} {:<22} {}", "region", "feasible", "DoA", "DoA (fixed-point)"),
    );
    for region in &report.regions {
        let (doa, fixed) = match region.doa {
            Some(value) => {
                let full = match value {
                    MetricValue::Finite(v) => format!("{v:.9}"),
                    MetricValue::Infinite => "inf".to_string(),
                };
                (full, format_fixed_point(value))
            }
            None => ("-".to_string(), "-".to_string()),
        };
        push(
            &mut out,
            format!(
                "{:<24} {:<9} {:<22} {}",
                region.region,
                if region.feasible { "yes" } else { "no" },
                doa,
                fixed
            ),
        );
        if let Some(w) = region.weighted_doa {
            push(
                &mut out,
                format!("{:<24} {:<9} {:<22} {}", "  (weighted)", "", format_metric(Some(w)), ""),
            );
        }
    }

    push(&mut out, String::new());
    push(&mut out, "capability scores:".to_string());
    for region in &report.regions {
        push(&mut out, format!("  {}:", region.region));
        for score in &region.scores {
            push(
                &mut out,
                format!(
                    "    {:<32} C_rel={:<12} C_res={:<12} term={}",
                    score.capability,
                    format_metric(score.reliability),
                    format_metric(score.responsiveness),
                    format_metric(score.term),
                ),
            );
        }
    }

    if !report.failed_checks.is_empty() {
        push(&mut out, String::new());
        push(&mut out, "failed checks:".to_string());
        for check in &report.failed_checks {
            push(
                &mut out,
                format!("  {} / {}: {}", check.region, check.capability, check.dimension),
            );
        }
    }
    for note in &report.notes {
        push(&mut out, format!("note: {note}"));
    }
    out
}

// ── monitor ──────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct MachineMonitor {
    pub schema: u32,
    pub kind: &'static str,
    pub task: String,
    pub events: Vec<MachineEvent>,
    pub risk: Vec<MachineRisk>,
    pub total_integrity_events: usize,
}

#[derive(Debug, Serialize)]
pub struct MachineEvent {
    pub capability: String,
    pub kind: String,
    pub timestamp: f64,
    pub protection_level: f64,
    pub alert_limit: f64,
}

#[derive(Debug, Serialize)]
pub struct MachineRisk {
    pub capability: String,
    pub integrity_events: usize,
    pub fault_onsets: usize,
    pub operating_hours: f64,
    pub observed_rate_fph: Option<f64>,
    pub ir_budget_fph: Option<f64>,
    pub within_budget: Option<bool>,
    pub bias_flagged: bool,
}

pub fn machine_monitor(task: &str, events: &[IntegrityEvent], summary: &RiskSummary) -> MachineMonitor {
    MachineMonitor {
        schema: 1,
        kind: "monitor",
        task: task.to_string(),
        events: events.iter().map(machine_event).collect(),
        risk: summary
            .capabilities
            .iter()
            .map(|c| MachineRisk {
                capability: c.capability.clone(),
                integrity_events: c.integrity_events,
                fault_onsets: c.fault_onsets,
                operating_hours: c.operating_hours,
                observed_rate_fph: c.observed_rate_fph,
                ir_budget_fph: c.ir_budget_fph,
                within_budget: c.within_budget,
                bias_flagged: c.bias_flagged,
            })
            .collect(),
        total_integrity_events: summary.total_integrity_events,
    }
}

fn machine_event(ev: &IntegrityEvent) -> MachineEvent {
    MachineEvent {
        capability: ev.capability.clone(),
        kind: ev.kind.as_str().to_string(),
        timestamp: ev.timestamp,
        protection_level: ev.protection_level,
        alert_limit: ev.alert_limit,
    }
}

pub fn render_event(ev: &IntegrityEvent) -> String {
    format!(
        "t={:<12.6} {:<32} {:<16} PL={:.6} AL={:.6}",
        ev.timestamp,
        ev.capability,
        ev.kind.as_str(),
        ev.protection_level,
        ev.alert_limit
    )
}

pub fn render_risk_summary(summary: &RiskSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<32} {:>7} {:>7} {:>12} {:>14} {:>14} {:>8} {:>6}\n",
        "capability", "events", "onsets", "hours", "rate (FPH)", "budget (FPH)", "within", "bias"
    ));
    for cap in &summary.capabilities {
        let rate = cap.observed_rate_fph.map_or("-".to_string(), |r| format!("{r:.6}"));
        let budget = cap.ir_budget_fph.map_or("-".to_string(), |b| format!("{b:e}"));
        let within = match cap.within_budget {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        out.push_str(&format!(
            "{:<32} {:>7} {:>7} {:>12.6} {:>14} {:>14} {:>8} {:>6}\n",
            cap.capability,
            cap.integrity_events,
            cap.fault_onsets,
            cap.operating_hours,
            rate,
            budget,
            within,
            if cap.bias_flagged { "YES" } else { "-" }
        ));
    }
    out.push_str(&format!("total integrity events: {}\n", summary.total_integrity_events));
    out
}

pub fn to_machine_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("machine report serializes");
    text.push('\n');
    text
}
