//! Seed-reproducible synthetic telemetry.
//!
//! Each capability is sampled at its system's actual rate: gaussian-error
//! capabilities draw zero-mean normal error samples at the claimed
//! dispersion, success capabilities draw Bernoulli outcomes at the claimed
//! rate. Fault profiles scale the dispersion (or the failure probability)
//! from a start time onward, either as a step or a linear ramp. Streams are
//! seeded per capability from the global seed and the capability name, so
//! output is byte-identical for identical inputs and independent of
//! capability order.

use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use thiserror::Error;

use autonomy_core::{
    validate_task_spec, SystemSpec, TaskSpec, TelemetryEvent, TelemetryPayload,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultKind {
    Step,
    Ramp,
}

/// A dispersion disturbance: `factor` multiplies the clean sigma (or the
/// failure probability of a success capability) from `start` on; a ramp
/// blends linearly from 1 at `start` to `factor` at `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultProfile {
    pub capability: String,
    pub kind: FaultKind,
    pub factor: f64,
    pub start: f64,
    pub end: Option<f64>,
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("bad fault profile `{0}`: expected `<capability>:step:<factor>@<start>` or `<capability>:ramp:<factor>@<start>..<end>`")]
    BadProfile(String),
    #[error("fault profile references unknown capability `{0}`")]
    UnknownCapability(String),
    #[error("duration must be positive, got {0}")]
    BadDuration(f64),
    #[error("specification is not generatable: {0} diagnostic(s)")]
    Invalid(usize),
    #[error(transparent)]
    Model(#[from] autonomy_core::ModelError),
}

impl FaultProfile {
    pub fn parse(text: &str) -> Result<Self, GenerateError> {
        let bad = || GenerateError::BadProfile(text.to_string());
        let mut parts = text.splitn(3, ':');
        let capability = parts.next().filter(|s| !s.is_empty()).ok_or_else(bad)?.to_string();
        let kind = match parts.next().ok_or_else(bad)? {
            "step" => FaultKind::Step,
            "ramp" => FaultKind::Ramp,
            _ => return Err(bad()),
        };
        let rest = parts.next().ok_or_else(bad)?;
        let (factor_text, when) = rest.split_once('@').ok_or_else(bad)?;
        let factor: f64 = factor_text.parse().map_err(|_| bad())?;
        let (start, end): (f64, Option<f64>) = match when.split_once("..") {
            Some((a, b)) => {
                (a.parse().map_err(|_| bad())?, Some(b.parse().map_err(|_| bad())?))
            }
            None => (when.parse().map_err(|_| bad())?, None),
        };
        if !factor.is_finite() || factor <= 0.0 || !start.is_finite() || start < 0.0 {
            return Err(bad());
        }
        match (kind, end) {
            (FaultKind::Ramp, Some(e)) if e > start => {}
            (FaultKind::Ramp, _) => return Err(bad()),
            (FaultKind::Step, Some(_)) => return Err(bad()),
            (FaultKind::Step, None) => {}
        }
        Ok(FaultProfile { capability, kind, factor, start, end })
    }

    fn factor_at(&self, t: f64) -> f64 {
        if t < self.start {
            return 1.0;
        }
        match self.kind {
            FaultKind::Step => self.factor,
            FaultKind::Ramp => {
                let end = self.end.expect("ramp has an end");
                if t >= end {
                    self.factor
                } else {
                    1.0 + (self.factor - 1.0) * (t - self.start) / (end - self.start)
                }
            }
        }
    }
}

fn capability_rng(seed: u64, capability: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(capability.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Generates a globally sorted telemetry log simulating `system` executing
/// `task` for `duration` seconds.
pub fn generate(
    task: &TaskSpec,
    system: &SystemSpec,
    duration: f64,
    seed: u64,
    faults: &[FaultProfile],
) -> Result<Vec<TelemetryEvent>, GenerateError> {
    if !duration.is_finite() || duration <= 0.0 {
        return Err(GenerateError::BadDuration(duration));
    }
    let diagnostics = validate_task_spec(task, system);
    if !diagnostics.is_empty() {
        return Err(GenerateError::Invalid(diagnostics.len()));
    }
    for fault in faults {
        if task.capability(&fault.capability).is_none() {
            return Err(GenerateError::UnknownCapability(fault.capability.clone()));
        }
    }

    // (timestamp, declaration index, payload) triples, merged afterwards.
    let mut entries: Vec<(f64, usize, TelemetryPayload)> = Vec::new();
    for (index, req) in task.capabilities.iter().enumerate() {
        let perf = &system.capabilities[&req.name];
        let period = perf.timing.period_seconds()?;
        let count = (duration / period).floor() as u64;
        let mut rng = capability_rng(seed, &req.name);
        let cap_faults: Vec<&FaultProfile> =
            faults.iter().filter(|f| f.capability == req.name).collect();
        let factor_at = |t: f64| cap_faults.iter().map(|f| f.factor_at(t)).product::<f64>();

        match perf.dispersion.as_probability() {
            Some(p_act) => {
                for k in 0..count {
                    let t = k as f64 * period;
                    let p = (1.0 - (1.0 - p_act) * factor_at(t)).clamp(0.0, 1.0);
                    let u: f64 = rng.gen();
                    entries.push((t, index, TelemetryPayload::Outcome(u < p)));
                }
            }
            None => {
                let sigma_act = perf.dispersion.to_sigma()?;
                for k in 0..count {
                    let t = k as f64 * period;
                    let z: f64 = StandardNormal.sample(&mut rng);
                    entries.push((t, index, TelemetryPayload::ErrorSample(z * sigma_act * factor_at(t))));
                }
            }
        }
    }

    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite timestamps").then(a.1.cmp(&b.1)));
    Ok(entries
        .into_iter()
        .map(|(timestamp, index, payload)| TelemetryEvent {
            timestamp,
            capability: task.capabilities[index].name.clone(),
            payload,
        })
        .collect())
}
