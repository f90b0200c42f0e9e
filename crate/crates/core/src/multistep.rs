//! Alternating projections of successive residuals onto a band and its
//! complement.
//!
//! Step `k` with band `I_k` computes `x̂_k = P_{I_k} x_k`, `y_k = x_k - x̂_k`,
//! `ŷ_k = P_{I_k^c} y_k` and `x_{k+1} = y_k - ŷ_k`, starting from `x_0 = x`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lbl::{LblProjector, DEFAULT_COEFFS};
use crate::spectral::{Band, OneSidedSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct MultistepConfig {
    /// Band schedule, cycled when shorter than the run.
    pub bands: Vec<Band>,
    pub max_steps: usize,
    /// Relative level below which a residual counts as zero.
    pub stop_tol: f64,
    /// Relative level below which a decrease counts as zero.
    pub decrease_tol: f64,
    pub coeffs: usize,
    /// Projector horizon; `None` uses the input horizon.
    pub horizon: Option<usize>,
    pub lambda: Option<f64>,
}

impl MultistepConfig {
    pub fn new(band: Band) -> Self {
        Self {
            bands: vec![band],
            max_steps: 16,
            stop_tol: 1e-6,
            decrease_tol: 1e-4,
            coeffs: DEFAULT_COEFFS,
            horizon: None,
            lambda: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.bands.is_empty() {
            return Err(Error::invalid("band schedule is empty"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps must be >= 1"));
        }
        if !(self.stop_tol > 0.0 && self.decrease_tol > 0.0) {
            return Err(Error::invalid("stop and decrease tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    PredictableY,
    PredictableX,
    NonreducibleX,
    NonreducibleY,
    MaxSteps,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::PredictableY => "PREDICTABLE_Y",
            StopReason::PredictableX => "PREDICTABLE_X",
            StopReason::NonreducibleX => "NONREDUCIBLE_X",
            StopReason::NonreducibleY => "NONREDUCIBLE_Y",
            StopReason::MaxSteps => "MAX_STEPS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub k: usize,
    pub band: Band,
    pub norm_x: f64,
    pub norm_y: f64,
    pub norm_x_next: f64,
    /// `δ_k = ‖x_k‖ - ‖y_k‖`.
    pub delta: f64,
    /// `δ̄_k = ‖y_k‖ - ‖x_{k+1}‖`.
    pub delta_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub x_hat: OneSidedSequence,
    /// Absent when the run stopped on `y_k` before `ŷ_k` was accepted.
    pub y_hat: Option<OneSidedSequence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultistepResult {
    pub components: Vec<Component>,
    pub steps: Vec<StepRecord>,
    pub stop_reason: StopReason,
    pub predictable_part: OneSidedSequence,
    pub noise_part: OneSidedSequence,
    pub norm_x: f64,
}

/// Projectors sharing one factorization per half-width.
struct ProjectorCache<'a> {
    cfg: &'a MultistepConfig,
    horizon: usize,
    by_width: HashMap<u64, LblProjector>,
}

impl ProjectorCache<'_> {
    fn get(&mut self, band: Band) -> Result<LblProjector> {
        let key = band.half_width().to_bits();
        if let Some(p) = self.by_width.get(&key) {
            return Ok(p.recentered(band.center()));
        }
        let p = LblProjector::build(band, self.cfg.coeffs, self.horizon, self.cfg.lambda)?;
        self.by_width.insert(key, p.clone());
        Ok(p)
    }
}

fn at_step(k: usize, e: Error) -> Error {
    match e {
        Error::Factorization(m) => Error::Factorization(format!("step {k}: {m}")),
        Error::InvalidInput(m) => Error::InvalidInput(format!("step {k}: {m}")),
        other => other,
    }
}

pub fn decompose(x: &OneSidedSequence, cfg: &MultistepConfig) -> Result<MultistepResult> {
    cfg.validate()?;
    let horizon = cfg.horizon.unwrap_or(x.horizon());
    let x = x.padded(horizon)?;
    let norm_x = x.l2();
    let zeros = OneSidedSequence::zeros(horizon)?;
    if norm_x == 0.0 {
        return Ok(MultistepResult {
            components: Vec::new(),
            steps: Vec::new(),
            stop_reason: StopReason::PredictableY,
            predictable_part: zeros.clone(),
            noise_part: zeros,
            norm_x,
        });
    }
    let stop = cfg.stop_tol * norm_x;
    let flat = cfg.decrease_tol * norm_x;
    let mut cache = ProjectorCache { cfg, horizon, by_width: HashMap::new() };

    let mut components = Vec::new();
    let mut steps = Vec::new();
    let mut predictable = zeros;
    let mut xk = x;
    for k in 0..cfg.max_steps {
        let band = cfg.bands[k % cfg.bands.len()];
        let x_hat = cache.get(band).and_then(|p| p.apply(&xk)).map_err(|e| at_step(k, e))?;
        let yk = &xk - &x_hat;
        let y_hat = cache.get(band.complement()).and_then(|p| p.apply(&yk)).map_err(|e| at_step(k, e))?;
        let x_next = &yk - &y_hat;

        let record = StepRecord {
            k,
            band,
            norm_x: xk.l2(),
            norm_y: yk.l2(),
            norm_x_next: x_next.l2(),
            delta: xk.l2() - yk.l2(),
            delta_bar: yk.l2() - x_next.l2(),
        };
        steps.push(record);

        let reason = if record.norm_y <= stop {
            Some(StopReason::PredictableY)
        } else if record.norm_x_next <= stop {
            Some(StopReason::PredictableX)
        } else if record.delta <= flat {
            Some(StopReason::NonreducibleX)
        } else if record.delta_bar <= flat {
            Some(StopReason::NonreducibleY)
        } else if k + 1 == cfg.max_steps {
            Some(StopReason::MaxSteps)
        } else {
            None
        };

        predictable = &predictable + &x_hat;
        match reason {
            Some(r @ (StopReason::PredictableY | StopReason::NonreducibleX)) => {
                components.push(Component { x_hat, y_hat: None });
                return Ok(MultistepResult {
                    components,
                    steps,
                    stop_reason: r,
                    predictable_part: predictable,
                    noise_part: yk,
                    norm_x,
                });
            }
            Some(r) => {
                predictable = &predictable + &y_hat;
                components.push(Component { x_hat, y_hat: Some(y_hat) });
                return Ok(MultistepResult {
                    components,
                    steps,
                    stop_reason: r,
                    predictable_part: predictable,
                    noise_part: x_next,
                    norm_x,
                });
            }
            None => {
                predictable = &predictable + &y_hat;
                components.push(Component { x_hat, y_hat: Some(y_hat) });
                xk = x_next;
            }
        }
    }
    unreachable!("the final step always yields a stop reason")
}

/// `‖noise‖` for a stopped run; under `MAX_STEPS` the larger of `‖x_k‖` and
/// `‖y_k‖` at the final step.
pub fn quantify_randomness(r: &MultistepResult) -> f64 {
    match (r.stop_reason, r.steps.last()) {
        (StopReason::MaxSteps, Some(s)) => s.norm_x.max(s.norm_y),
        _ => r.noise_part.l2(),
    }
}
