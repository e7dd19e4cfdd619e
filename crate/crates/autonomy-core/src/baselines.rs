//! Earlier autonomy formulas, kept for side-by-side reporting.
//!
//! These reproduce the printed formulas only; no claim is made to the full
//! methodologies behind them. All functions are stateless.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("capability count must be positive")]
    ZeroCapabilityCount,
    #[error("standard behaviour value must be nonzero (pair {index})")]
    ZeroStandardBehaviour { index: usize },
    #[error("{name} must be nonzero")]
    ZeroDenominator { name: &'static str },
    #[error("ratio {name} must be positive when its exponent is nonzero")]
    NonPositiveRatio { name: &'static str },
    #[error("axis {axis} is degenerate: needs at least 2 points and ordered bounds")]
    DegenerateAxis { axis: &'static str },
    #[error("expected {expected} grid values, got {got}")]
    GridSizeMismatch { expected: usize, got: usize },
    #[error("input must be finite")]
    NonFiniteInput,
}

fn ensure_finite(values: &[f64]) -> Result<(), BaselineError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(BaselineError::NonFiniteInput)
    }
}

/// Average level of automation over the five problem-solving capabilities
/// (definition, exploration, selection, implementation, verification):
/// `(d_def + d_exp + d_sel + d_imp + d_ver) / n`.
pub fn insaurralde_level(levels: &[f64; 5], n: u32) -> Result<f64, BaselineError> {
    ensure_finite(levels)?;
    if n == 0 {
        return Err(BaselineError::ZeroCapabilityCount);
    }
    Ok(levels.iter().sum::<f64>() / n as f64)
}

/// Scaled mean of actual-to-standard behaviour ratios over the same five
/// capabilities: `10 * sum(act_i / std_i) / n`.
pub fn insaurralde_ratio(pairs: &[(f64, f64); 5], n: u32) -> Result<f64, BaselineError> {
    if n == 0 {
        return Err(BaselineError::ZeroCapabilityCount);
    }
    let mut sum = 0.0;
    for (index, (act, std)) in pairs.iter().enumerate() {
        if !act.is_finite() || !std.is_finite() {
            return Err(BaselineError::NonFiniteInput);
        }
        if *std == 0.0 {
            return Err(BaselineError::ZeroStandardBehaviour { index });
        }
        sum += act / std;
    }
    Ok(10.0 * sum / n as f64)
}

/// Inputs of the bandwidth/contact-time formula:
/// `scale * (control_bits / total_bits)^(-bits_exponent)
///        * (contact_time / total_time)^(-time_exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurtinParams {
    pub control_bits: f64,
    pub total_bits: f64,
    pub contact_time: f64,
    pub total_time: f64,
    /// Scale constant; no published calibration, 1 by convention.
    pub scale: f64,
    pub bits_exponent: f64,
    pub time_exponent: f64,
}

impl CurtinParams {
    /// Uncalibrated defaults: scale 1, both exponents 1.
    pub fn with_defaults(
        control_bits: f64,
        total_bits: f64,
        contact_time: f64,
        total_time: f64,
    ) -> Self {
        CurtinParams {
            control_bits,
            total_bits,
            contact_time,
            total_time,
            scale: 1.0,
            bits_exponent: 1.0,
            time_exponent: 1.0,
        }
    }
}

pub fn curtin_autonomy(p: CurtinParams) -> Result<f64, BaselineError> {
    ensure_finite(&[
        p.control_bits,
        p.total_bits,
        p.contact_time,
        p.total_time,
        p.scale,
        p.bits_exponent,
        p.time_exponent,
    ])?;
    if p.total_bits == 0.0 {
        return Err(BaselineError::ZeroDenominator { name: "total message size" });
    }
    if p.total_time == 0.0 {
        return Err(BaselineError::ZeroDenominator { name: "total mission time" });
    }
    let bits_ratio = p.control_bits / p.total_bits;
    let time_ratio = p.contact_time / p.total_time;
    if p.bits_exponent != 0.0 && bits_ratio <= 0.0 {
        return Err(BaselineError::NonPositiveRatio { name: "control bits" });
    }
    if p.time_exponent != 0.0 && time_ratio <= 0.0 {
        return Err(BaselineError::NonPositiveRatio { name: "contact time" });
    }
    Ok(p.scale * bits_ratio.powf(-p.bits_exponent) * time_ratio.powf(-p.time_exponent))
}

/// Human-effort samples on a rectangular (performance, area, time) grid.
///
/// Axis bounds are inclusive; samples are stored with performance varying
/// fastest: `values[(k * na + j) * np + i]` for time index `k`, area index
/// `j`, performance index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortGrid {
    pub performance_bounds: (f64, f64),
    pub area_bounds: (f64, f64),
    pub time_bounds: (f64, f64),
    pub shape: (usize, usize, usize),
    pub values: Vec<f64>,
}

impl EffortGrid {
    pub fn new(
        performance_bounds: (f64, f64),
        area_bounds: (f64, f64),
        time_bounds: (f64, f64),
        shape: (usize, usize, usize),
        values: Vec<f64>,
    ) -> Result<Self, BaselineError> {
        let grid = EffortGrid { performance_bounds, area_bounds, time_bounds, shape, values };
        grid.validate()?;
        Ok(grid)
    }

    /// Samples `f(p, a, t)` on an evenly spaced grid.
    pub fn from_fn(
        performance_bounds: (f64, f64),
        area_bounds: (f64, f64),
        time_bounds: (f64, f64),
        shape: (usize, usize, usize),
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self, BaselineError> {
        let (np, na, nt) = shape;
        let axis = |bounds: (f64, f64), n: usize, i: usize| {
            bounds.0 + (bounds.1 - bounds.0) * i as f64 / (n as f64 - 1.0)
        };
        let mut values = Vec::with_capacity(np * na * nt);
        for k in 0..nt {
            let t = axis(time_bounds, nt, k);
            for j in 0..na {
                let a = axis(area_bounds, na, j);
                for i in 0..np {
                    values.push(f(axis(performance_bounds, np, i), a, t));
                }
            }
        }
        EffortGrid::new(performance_bounds, area_bounds, time_bounds, shape, values)
    }

    fn validate(&self) -> Result<(), BaselineError> {
        let checks = [
            ("performance", self.performance_bounds, self.shape.0),
            ("area", self.area_bounds, self.shape.1),
            ("time", self.time_bounds, self.shape.2),
        ];
        for (axis, bounds, n) in checks {
            if n < 2 || !bounds.0.is_finite() || !bounds.1.is_finite() || bounds.1 < bounds.0 {
                return Err(BaselineError::DegenerateAxis { axis });
            }
        }
        let expected = self.shape.0 * self.shape.1 * self.shape.2;
        if self.values.len() != expected {
            return Err(BaselineError::GridSizeMismatch { expected, got: self.values.len() });
        }
        ensure_finite(&self.values)
    }
}

/// Triple integral of the effort field over its box by composite trapezoidal
/// quadrature. Error is O(h^2) per axis for smooth fields.
pub fn doboli_integral(grid: &EffortGrid) -> Result<f64, BaselineError> {
    grid.validate()?;
    let (np, na, nt) = grid.shape;
    let h = |bounds: (f64, f64), n: usize| (bounds.1 - bounds.0) / (n as f64 - 1.0);
    let hp = h(grid.performance_bounds, np);
    let ha = h(grid.area_bounds, na);
    let ht = h(grid.time_bounds, nt);
    let w = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };

    let mut sum = 0.0;
    for k in 0..nt {
        let wk = w(k, nt);
        for j in 0..na {
            let wjk = wk * w(j, na);
            let row = (k * na + j) * np;
            for i in 0..np {
                sum += wjk * w(i, np) * grid.values[row + i];
            }
        }
    }
    Ok(sum * hp * ha * ht)
}
