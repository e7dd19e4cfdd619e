//! Level-of-autonomy classification and degree-of-autonomy scoring.
//!
//! Classification builds a pass matrix: every requisite capability is checked
//! for reliability and responsiveness against each operating region's local
//! requirements. A region where everything passes is feasible. The level then
//! follows from which dimensions block the infeasible regions. The degree of
//! autonomy condenses the same quotients into a single ratio-scale score per
//! feasible region, `n^2 / sum(1 / (c_rel_i * c_res_i))`, i.e. `n` times the
//! harmonic mean of the per-capability products.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::metrics::{
    capability_term, reliability, reliability_success, responsiveness, MetricError, MetricValue,
};
use crate::model::{
    essential_requirement, validate_task_spec, CapabilityRequirement, Diagnostic, DiagnosticKind,
    MeasuredPerformance, ModelError, OperatingRegion, SystemSpec, TaskSpec,
};

/// Verdict over the regions: does the system function fully autonomously,
/// and if only conditionally, which dimension conditions it?
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoaLevel {
    /// Some requisite capability is absent or fails everywhere; the system
    /// needs external control or supervision for this task.
    ExternallyControlled,
    /// Full autonomy conditioned on both responsiveness and reliability.
    RelAndResConditioned,
    /// Full autonomy conditioned on reliability only.
    ReliabilityConditioned,
    /// Full autonomy conditioned on responsiveness only.
    ResponsivenessConditioned,
    /// Unconditional full autonomy: every capability passes everywhere.
    Unconditional,
}

impl LoaLevel {
    pub fn index(&self) -> u8 {
        match self {
            LoaLevel::ExternallyControlled => 0,
            LoaLevel::RelAndResConditioned => 1,
            LoaLevel::ReliabilityConditioned => 2,
            LoaLevel::ResponsivenessConditioned => 3,
            LoaLevel::Unconditional => 4,
        }
    }

    pub fn short_label(&self) -> &'static str {
        match self {
            LoaLevel::ExternallyControlled => "externally-controlled",
            LoaLevel::RelAndResConditioned => "responsiveness- & reliability-conditioned",
            LoaLevel::ReliabilityConditioned => "reliability-conditioned",
            LoaLevel::ResponsivenessConditioned => "responsiveness-conditioned",
            LoaLevel::Unconditional => "unconditional",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            LoaLevel::ExternallyControlled => {
                "Externally controlled or supervised autonomous functioning."
            }
            LoaLevel::RelAndResConditioned => {
                "Responsiveness- & reliability-conditioned full autonomy."
            }
            LoaLevel::ReliabilityConditioned => "Reliability-conditioned full autonomy.",
            LoaLevel::ResponsivenessConditioned => "Responsiveness-conditioned full autonomy.",
            LoaLevel::Unconditional => "Unconditional full autonomy.",
        }
    }

    /// Position on the ten-level functioning chart that also covers
    /// externally supervised modes. The no-external-operator band maps
    /// 4→9, 3→8, 2→7, 1→6; level 0 spans the supervised band (5 and below)
    /// and cannot be pinned down without modelling the operator.
    pub fn functioning_level(&self) -> Option<u8> {
        match self.index() {
            0 => None,
            i => Some(i + 5),
        }
    }
}

impl fmt::Display for LoaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LoA {} ({})", self.index(), self.short_label())
    }
}

/// Reliability/responsiveness outcome for one capability in one context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimPass {
    pub reliability: bool,
    pub responsiveness: bool,
}

impl DimPass {
    pub fn both(&self) -> bool {
        self.reliability && self.responsiveness
    }

    const FAIL: DimPass = DimPass { reliability: false, responsiveness: false };
}

/// Pass/fail grid: capabilities × regions, plus a per-capability essential
/// row checked against the tightest (global) requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct PassMatrix {
    pub capabilities: Vec<String>,
    pub regions: Vec<String>,
    /// Indexed `cells[capability][region]`.
    pub cells: Vec<Vec<DimPass>>,
    /// Per capability, against the essential requirement.
    pub essential: Vec<DimPass>,
}

impl PassMatrix {
    pub fn cell(&self, capability: &str, region: &str) -> Option<DimPass> {
        let ci = self.capabilities.iter().position(|c| c == capability)?;
        let ri = self.regions.iter().position(|r| r == region)?;
        Some(self.cells[ci][ri])
    }

    pub fn region_feasible(&self, region_index: usize) -> bool {
        self.cells.iter().all(|row| row[region_index].both())
    }

    pub fn feasible_regions(&self) -> Vec<String> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(i, _)| self.region_feasible(*i))
            .map(|(_, r)| r.clone())
            .collect()
    }
}

/// Which metric failed a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailedDimension {
    Reliability,
    Responsiveness,
}

impl fmt::Display for FailedDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailedDimension::Reliability => "reliability",
            FailedDimension::Responsiveness => "responsiveness",
        })
    }
}

/// One failed (capability, region, dimension) triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FailedCheck {
    pub capability: String,
    pub region: String,
    pub dimension: FailedDimension,
}

/// Metric scores for one capability in one region. Fields are `None` when
/// the system does not possess the capability.
#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityScore {
    pub capability: String,
    pub reliability: Option<MetricValue>,
    pub responsiveness: Option<MetricValue>,
    pub term: Option<MetricValue>,
}

/// Assessment outcome for one operating region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAssessment {
    pub region: String,
    pub feasible: bool,
    /// Present only for feasible regions.
    pub doa: Option<MetricValue>,
    /// Present for feasible regions when capability weights are not all
    /// equal; equals `doa` otherwise and is omitted.
    pub weighted_doa: Option<MetricValue>,
    pub scores: Vec<CapabilityScore>,
}

/// The full verdict: level, per-region degrees, pass matrix, and every
/// failed check.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentReport {
    pub task: String,
    pub system: String,
    pub loa: LoaLevel,
    pub pass_matrix: PassMatrix,
    pub regions: Vec<RegionAssessment>,
    pub failed_checks: Vec<FailedCheck>,
    pub notes: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssessmentError {
    #[error("specification is not assessable: {} diagnostic(s)", .0.len())]
    Validation(Vec<Diagnostic>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("indeterminate term for `{capability}` in region `{region}`: reliability and responsiveness combine as 0 x inf")]
    Indeterminate { capability: String, region: String },
    #[error("degree of autonomy needs at least one capability term")]
    EmptyTerms,
    #[error("capability term must be a non-negative finite value or infinite, got {value}")]
    InvalidTerm { value: f64 },
    #[error("got {terms} terms but {weights} weights")]
    LengthMismatch { terms: usize, weights: usize },
    #[error("weights must be positive and finite, got {value}")]
    InvalidWeight { value: f64 },
    #[error("task defines multiple regions; a region name is required here")]
    RegionRequired,
    #[error("sweeping requires a gaussian-error capability, `{capability}` is not one")]
    SweepRequiresGaussianError { capability: String },
    #[error("sweep step must be positive, got {step}")]
    NonPositiveStep { step: f64 },
    #[error("sweep range is empty or not positive")]
    EmptyRange,
    #[error("speed must be non-negative and finite, got {value}")]
    InvalidSpeed { value: f64 },
    #[error("update rate must be positive and finite, got {value}")]
    InvalidRate { value: f64 },
}

/// Reliability and responsiveness of a measured performance against one
/// requirement. Success-probability capabilities go through the floor-guarded
/// quotient; everything else compares variances.
pub(crate) fn metric_pair(
    req: &CapabilityRequirement,
    perf: &MeasuredPerformance,
) -> Result<(MetricValue, MetricValue), AssessmentError> {
    let c_rel = match (req.dispersion.as_probability(), perf.dispersion.as_probability()) {
        (Some(p_ref), Some(p_act)) => reliability_success(p_ref, p_act)?,
        _ => reliability(req.dispersion.to_variance()?, perf.dispersion.to_variance()?)?,
    };
    let c_res =
        responsiveness(req.timing.period_seconds()?, perf.timing.period_seconds()?)?;
    Ok((c_rel, c_res))
}

/// The regions to evaluate: the task's own, or a synthetic "global" region
/// when it declares none.
fn effective_regions(task: &TaskSpec) -> Vec<OperatingRegion> {
    if task.regions.is_empty() {
        vec![OperatingRegion::new("global")]
    } else {
        task.regions.clone()
    }
}

fn missing_capabilities(task: &TaskSpec, system: &SystemSpec) -> BTreeSet<String> {
    task.capabilities
        .iter()
        .filter(|req| !system.capabilities.contains_key(&req.name))
        .map(|req| req.name.clone())
        .collect()
}

/// Gate shared by classification and assessment: structural problems refuse
/// the evaluation, while missing capabilities are a legitimate verdict
/// (they force level 0) and pass through.
fn validation_gate(task: &TaskSpec, system: &SystemSpec) -> Result<(), AssessmentError> {
    let blocking: Vec<Diagnostic> = validate_task_spec(task, system)
        .into_iter()
        .filter(|d| d.kind != DiagnosticKind::MissingCapability)
        .collect();
    if blocking.is_empty() {
        Ok(())
    } else {
        Err(AssessmentError::Validation(blocking))
    }
}

/// Classifies the system's level of autonomy at the task and returns the
/// pass matrix behind the verdict.
///
/// Every region is checked with its local requirements; the essential row is
/// checked with the tightest requirement across regions. All regions
/// feasible means level 4. With a non-empty feasible set, the dimensions that
/// fail elsewhere pick level 2 (reliability only), 3 (responsiveness only)
/// or 1 (both). An empty feasible set, or any missing requisite capability,
/// means level 0.
pub fn classify_loa(
    task: &TaskSpec,
    system: &SystemSpec,
) -> Result<(LoaLevel, PassMatrix), AssessmentError> {
    validation_gate(task, system)?;

    let regions = effective_regions(task);
    let missing = missing_capabilities(task, system);

    let mut cells = Vec::with_capacity(task.capabilities.len());
    let mut essential = Vec::with_capacity(task.capabilities.len());
    for req in &task.capabilities {
        let Some(perf) = system.capabilities.get(&req.name) else {
            cells.push(vec![DimPass::FAIL; regions.len()]);
            essential.push(DimPass::FAIL);
            continue;
        };
        let mut row = Vec::with_capacity(regions.len());
        for region in &regions {
            let local = task.local_requirement(&req.name, region).unwrap_or_else(|_| req.clone());
            let (c_rel, c_res) = metric_pair(&local, perf)?;
            row.push(DimPass {
                reliability: c_rel.is_passing(),
                responsiveness: c_res.is_passing(),
            });
        }
        cells.push(row);

        let global = if task.regions.is_empty() {
            req.clone()
        } else {
            essential_requirement(&req.name, task)?
        };
        let (c_rel, c_res) = metric_pair(&global, perf)?;
        essential.push(DimPass {
            reliability: c_rel.is_passing(),
            responsiveness: c_res.is_passing(),
        });
    }

    let matrix = PassMatrix {
        capabilities: task.capabilities.iter().map(|c| c.name.clone()).collect(),
        regions: regions.iter().map(|r| r.name.clone()).collect(),
        cells,
        essential,
    };

    let feasible: Vec<usize> =
        (0..matrix.regions.len()).filter(|i| matrix.region_feasible(*i)).collect();

    let level = if !missing.is_empty() || feasible.is_empty() {
        LoaLevel::ExternallyControlled
    } else if feasible.len() == matrix.regions.len() {
        LoaLevel::Unconditional
    } else {
        let mut rel_fail = false;
        let mut res_fail = false;
        for (ri, _) in matrix.regions.iter().enumerate() {
            if feasible.contains(&ri) {
                continue;
            }
            for row in &matrix.cells {
                rel_fail |= !row[ri].reliability;
                res_fail |= !row[ri].responsiveness;
            }
        }
        match (rel_fail, res_fail) {
            (true, true) => LoaLevel::RelAndResConditioned,
            (true, false) => LoaLevel::ReliabilityConditioned,
            (false, true) => LoaLevel::ResponsivenessConditioned,
            (false, false) => unreachable!("infeasible region without failed cells"),
        }
    };

    Ok((level, matrix))
}

fn check_terms(terms: &[MetricValue]) -> Result<(), AssessmentError> {
    if terms.is_empty() {
        return Err(AssessmentError::EmptyTerms);
    }
    for t in terms {
        if let MetricValue::Finite(v) = t {
            if !v.is_finite() || *v < 0.0 {
                return Err(AssessmentError::InvalidTerm { value: *v });
            }
        }
    }
    Ok(())
}

/// Aggregates capability terms into the degree of autonomy,
/// `n^2 / sum(terms)`.
///
/// Any infinite term (a failed capability) collapses the degree to 0. An
/// all-zero term list (every capability scored infinite) has no finite
/// degree and returns the symbolic infinity.
pub fn degree_of_autonomy(terms: &[MetricValue]) -> Result<MetricValue, AssessmentError> {
    check_terms(terms)?;
    if terms.iter().any(MetricValue::is_infinite) {
        return Ok(MetricValue::Finite(0.0));
    }
    let sum: f64 = terms.iter().filter_map(MetricValue::as_finite).sum();
    if sum == 0.0 {
        return Ok(MetricValue::Infinite);
    }
    let n = terms.len() as f64;
    Ok(MetricValue::Finite(n * n / sum))
}

/// Degree of autonomy with importance weights:
/// `n / (sum(w_i * term_i) / sum(w_i))`. Equal weights reduce this to
/// [`degree_of_autonomy`].
pub fn weighted_degree_of_autonomy(
    terms: &[MetricValue],
    weights: &[f64],
) -> Result<MetricValue, AssessmentError> {
    check_terms(terms)?;
    if terms.len() != weights.len() {
        return Err(AssessmentError::LengthMismatch {
            terms: terms.len(),
            weights: weights.len(),
        });
    }
    for w in weights {
        if !w.is_finite() || *w <= 0.0 {
            return Err(AssessmentError::InvalidWeight { value: *w });
        }
    }
    if terms.iter().any(MetricValue::is_infinite) {
        return Ok(MetricValue::Finite(0.0));
    }
    let weight_sum: f64 = weights.iter().sum();
    let weighted_sum: f64 = terms
        .iter()
        .zip(weights)
        .filter_map(|(t, w)| t.as_finite().map(|v| v * w))
        .sum();
    if weighted_sum == 0.0 {
        return Ok(MetricValue::Infinite);
    }
    let n = terms.len() as f64;
    Ok(MetricValue::Finite(n * weight_sum / weighted_sum))
}

/// Full assessment: classifies the level, then scores the degree of autonomy
/// for every feasible region from that region's local requirements, and
/// enumerates every failed (capability, region, dimension) check.
pub fn assess(task: &TaskSpec, system: &SystemSpec) -> Result<AssessmentReport, AssessmentError> {
    let (loa, matrix) = classify_loa(task, system)?;
    let regions = effective_regions(task);
    let missing = missing_capabilities(task, system);

    let weights: Vec<f64> = task.capabilities.iter().map(|c| c.weight).collect();
    let uniform_weights = weights.windows(2).all(|w| w[0] == w[1]);

    let mut notes: Vec<String> = missing
        .iter()
        .map(|c| format!("system `{}` lacks requisite capability `{c}`", system.name))
        .collect();

    let mut region_reports = Vec::with_capacity(regions.len());
    let mut failed_checks = Vec::new();

    for (ri, region) in regions.iter().enumerate() {
        let feasible = matrix.region_feasible(ri);
        let mut scores = Vec::with_capacity(task.capabilities.len());
        let mut terms = Vec::new();
        let mut all_present = true;

        for req in &task.capabilities {
            let Some(perf) = system.capabilities.get(&req.name) else {
                all_present = false;
                scores.push(CapabilityScore {
                    capability: req.name.clone(),
                    reliability: None,
                    responsiveness: None,
                    term: None,
                });
                failed_checks.push(FailedCheck {
                    capability: req.name.clone(),
                    region: region.name.clone(),
                    dimension: FailedDimension::Reliability,
                });
                failed_checks.push(FailedCheck {
                    capability: req.name.clone(),
                    region: region.name.clone(),
                    dimension: FailedDimension::Responsiveness,
                });
                continue;
            };
            let local = task.local_requirement(&req.name, region)?;
            let (c_rel, c_res) = metric_pair(&local, perf)?;
            if !c_rel.is_passing() {
                failed_checks.push(FailedCheck {
                    capability: req.name.clone(),
                    region: region.name.clone(),
                    dimension: FailedDimension::Reliability,
                });
            }
            if !c_res.is_passing() {
                failed_checks.push(FailedCheck {
                    capability: req.name.clone(),
                    region: region.name.clone(),
                    dimension: FailedDimension::Responsiveness,
                });
            }
            let term = capability_term(c_rel, c_res).map_err(|e| match e {
                MetricError::IndeterminateTerm => AssessmentError::Indeterminate {
                    capability: req.name.clone(),
                    region: region.name.clone(),
                },
                other => AssessmentError::Metric(other),
            })?;
            terms.push(term);
            scores.push(CapabilityScore {
                capability: req.name.clone(),
                reliability: Some(c_rel),
                responsiveness: Some(c_res),
                term: Some(term),
            });
        }

        let (doa, weighted_doa) = if feasible && all_present {
            let doa = degree_of_autonomy(&terms)?;
            if doa.is_infinite() {
                notes.push(format!(
                    "region `{}`: every capability scored infinite; degree of autonomy is unbounded",
                    region.name
                ));
            }
            let weighted = if uniform_weights {
                None
            } else {
                Some(weighted_degree_of_autonomy(&terms, &weights)?)
            };
            (Some(doa), weighted)
        } else {
            (None, None)
        };

        region_reports.push(RegionAssessment {
            region: region.name.clone(),
            feasible,
            doa,
            weighted_doa,
            scores,
        });
    }

    Ok(AssessmentReport {
        task: task.name.clone(),
        system: system.name.clone(),
        loa,
        pass_matrix: matrix,
        regions: region_reports,
        failed_checks,
        notes,
    })
}

/// One point of a degree-of-autonomy sensitivity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub sigma_act: f64,
    pub doa: MetricValue,
}

/// Inclusive sweep grid over actual standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, end: f64, step: f64) -> Self {
        SweepRange { start, end, step }
    }

    fn validate(&self) -> Result<(), AssessmentError> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(AssessmentError::NonPositiveStep { step: self.step });
        }
        if !self.start.is_finite() || !self.end.is_finite() || self.start <= 0.0 || self.end < self.start
        {
            return Err(AssessmentError::EmptyRange);
        }
        Ok(())
    }

    /// Grid points `start, start + step, ...` up to `end` (inclusive within
    /// one part in 1e9 of a step).
    pub fn points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let x = self.start + k as f64 * self.step;
            if x > self.end + self.step * 1e-9 {
                break;
            }
            out.push(x);
            k += 1;
        }
        out
    }
}

/// Recomputes the degree of autonomy of one region while varying one
/// gaussian-error capability's actual standard deviation over a grid,
/// everything else held fixed. Grid points where the capability fails score
/// a degree of 0.
///
/// `region` may be `None` only for tasks without declared regions.
pub fn sensitivity_sweep(
    task: &TaskSpec,
    system: &SystemSpec,
    region: Option<&str>,
    capability: &str,
    range: SweepRange,
) -> Result<Vec<SweepPoint>, AssessmentError> {
    validation_gate(task, system)?;
    range.validate()?;

    let req = task
        .capability(capability)
        .ok_or_else(|| ModelError::UnknownCapability { name: capability.to_string() })?;
    if req.dispersion.as_probability().is_some() {
        return Err(AssessmentError::SweepRequiresGaussianError {
            capability: capability.to_string(),
        });
    }

    let regions = effective_regions(task);
    let region = match region {
        Some(name) => regions
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| ModelError::UnknownRegion { name: name.to_string() })?,
        None => {
            if regions.len() == 1 {
                &regions[0]
            } else {
                return Err(AssessmentError::RegionRequired);
            }
        }
    };

    // Terms of the untouched capabilities are constant across the sweep.
    let mut fixed_terms = Vec::new();
    for other in &task.capabilities {
        if other.name == capability {
            continue;
        }
        let perf = system.capabilities.get(&other.name).ok_or_else(|| {
            AssessmentError::Validation(vec![validate_task_spec(task, system)
                .into_iter()
                .find(|d| d.kind == DiagnosticKind::MissingCapability)
                .expect("missing capability diagnostic")])
        })?;
        let local = task.local_requirement(&other.name, region)?;
        let (c_rel, c_res) = metric_pair(&local, perf)?;
        fixed_terms.push(capability_term(c_rel, c_res).map_err(|e| match e {
            MetricError::IndeterminateTerm => AssessmentError::Indeterminate {
                capability: other.name.clone(),
                region: region.name.clone(),
            },
            other => AssessmentError::Metric(other),
        })?);
    }

    let perf = system
        .capabilities
        .get(capability)
        .ok_or_else(|| ModelError::UnknownCapability { name: capability.to_string() })?;
    let local = task.local_requirement(capability, region)?;
    let var_ref = local.dispersion.to_variance()?;
    let t_ref = local.timing.period_seconds()?;
    let t_act = perf.timing.period_seconds()?;

    let mut curve = Vec::new();
    for sigma_act in range.points() {
        let c_rel = reliability(var_ref, sigma_act * sigma_act)?;
        let c_res = responsiveness(t_ref, t_act)?;
        let term = capability_term(c_rel, c_res).map_err(|e| match e {
            MetricError::IndeterminateTerm => AssessmentError::Indeterminate {
                capability: capability.to_string(),
                region: region.name.clone(),
            },
            other => AssessmentError::Metric(other),
        })?;
        let mut terms = fixed_terms.clone();
        terms.push(term);
        curve.push(SweepPoint { sigma_act, doa: degree_of_autonomy(&terms)? });
    }
    Ok(curve)
}

/// Distance travelled blind between control updates: speed (km/h, converted
/// to m/s) divided by the update rate (Hz).
pub fn open_loop_displacement(speed_kmh: f64, rate_hz: f64) -> Result<f64, AssessmentError> {
    if !speed_kmh.is_finite() || speed_kmh < 0.0 {
        return Err(AssessmentError::InvalidSpeed { value: speed_kmh });
    }
    if !rate_hz.is_finite() || rate_hz <= 0.0 {
        return Err(AssessmentError::InvalidRate { value: rate_hz });
    }
    Ok(speed_kmh / 3.6 / rate_hz)
}
