//! Causal FIR prediction of band-limited sequences.
//!
//! For the centered band `(-Ω, Ω)` the taps minimize
//! `∫_{-Ω}^{Ω} |1 - Σ_{j=1}^{L} k_j e^{-iωj}|² dω`, i.e. the one-step
//! prediction error on the band. A band centered at `ω_I` uses the same taps
//! on the demodulated input:
//! `x̂(t) = e^{iω_I t} Σ_j k_j e^{-iω_I (t-j)} x(t-j)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::band_estimator::{estimate_band, BandEstimate, BandEstimatorConfig};
use crate::error::{Error, Result};
use crate::linalg::{sinc, solve_psd_truncated};
use crate::spectral::{Band, OneSidedSequence, C64};

/// Relative eigenvalue floor of the design Gram matrix.
pub const DESIGN_CUTOFF: f64 = 1e-13;

const ERROR_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct FirPredictor {
    center: f64,
    half_width: f64,
    taps: Vec<f64>,
    design_error: f64,
    dropped: usize,
}

impl FirPredictor {
    pub fn design(band: Band, length: usize) -> Result<Self> {
        Self::design_centered(band.half_width(), length).map(|p| Self { center: band.center(), ..p })
    }

    /// Design for `(-Ω, Ω)`; unlike [`Band`], `Ω = π` is allowed here.
    pub fn design_centered(half_width: f64, length: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= PI) {
            return Err(Error::invalid(format!("half-width {half_width} outside (0, π]")));
        }
        if length == 0 {
            return Err(Error::invalid("predictor length L must be >= 1"));
        }
        let w = half_width;
        let g = DMatrix::from_fn(length, length, |a, b| 2.0 * w * sinc(w * (a as f64 - b as f64)));
        let rhs: Vec<f64> = (1..=length).map(|a| 2.0 * w * sinc(w * a as f64)).collect();
        let (taps, dropped) = solve_psd_truncated(&g, &rhs, DESIGN_CUTOFF * 2.0 * w);
        if taps.iter().any(|k| !k.is_finite()) {
            return Err(Error::Factorization("predictor normal equations produced non-finite taps".into()));
        }
        let design_error = (0..=ERROR_GRID)
            .map(|n| -w + 2.0 * w * n as f64 / ERROR_GRID as f64)
            .map(|omega| (C64::new(1.0, 0.0) - transfer(&taps, omega)).norm())
            .fold(0.0, f64::max);
        Ok(Self { center: 0.0, half_width: w, taps, design_error, dropped })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Taps `k̂(1 ..= L)` of the centered design.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// `max_{|ω|<=Ω} |1 - K(ω)|` with `K(ω) = Σ_j k̂(j) e^{-iωj}`.
    pub fn design_error(&self) -> f64 {
        self.design_error
    }

    /// Eigen-directions of the design Gram matrix dropped as numerically null.
    pub fn dropped_directions(&self) -> usize {
        self.dropped
    }

    /// The same taps for a band of equal width around `center`.
    pub fn recentered(&self, center: f64) -> Self {
        Self { center, ..self.clone() }
    }

    /// Effective taps `k̂(j) e^{iω_I j}` acting on the raw input.
    pub fn modulated_taps(&self) -> Vec<C64> {
        self.taps.iter().zip(1..).map(|(&k, j)| C64::from_polar(k, self.center * j as f64)).collect()
    }

    /// Predicts the sample following `history`, whose `t = 0` is the most
    /// recent observation. Samples older than the history count as zero.
    pub fn predict_next(&self, history: &OneSidedSequence) -> C64 {
        self.modulated_taps().iter().zip(1..).map(|(&k, j)| k * history.get(1 - j)).sum()
    }

    /// Predictions for the next `horizon` samples, feeding each prediction
    /// back as history.
    pub fn predict_recursive(&self, history: &OneSidedSequence, horizon: usize) -> Vec<C64> {
        let taps = self.modulated_taps();
        let mut buf: Vec<C64> = history.values().to_vec();
        let start = buf.len();
        for _ in 0..horizon {
            let n = buf.len();
            let next = taps.iter().zip(1..).filter(|&(_, j)| j <= n).map(|(&k, j)| k * buf[n - j]).sum();
            buf.push(next);
        }
        buf.split_off(start)
    }

    /// Error bound of the `h`-th recursive prediction in units of the
    /// one-step bound: `g_1 = 1`, `g_h = 1 + Σ_{j<h} |k̂(j)| g_{h-j}`.
    pub fn error_gain(&self, horizon: usize) -> Vec<f64> {
        let mut g: Vec<f64> = Vec::with_capacity(horizon);
        for h in 1..=horizon {
            let carried: f64 = (1..h).filter(|&j| j <= self.taps.len()).map(|j| self.taps[j - 1].abs() * g[h - j - 1]).sum();
            g.push(1.0 + carried);
        }
        g
    }
}

impl Serialize for FirPredictor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Tap {
            re: f64,
            im: f64,
        }
        let taps: Vec<Tap> = self.taps.iter().map(|&re| Tap { re, im: 0.0 }).collect();
        let mut st = s.serialize_struct("FirPredictor", 5)?;
        st.serialize_field("omega_I", &self.center)?;
        st.serialize_field("Omega", &self.half_width)?;
        st.serialize_field("L", &self.taps.len())?;
        st.serialize_field("taps", &taps)?;
        st.serialize_field("design_error", &self.design_error)?;
        st.end()
    }
}

fn transfer(taps: &[f64], omega: f64) -> C64 {
    taps.iter().zip(1..).map(|(&k, j)| C64::from_polar(k, -omega * j as f64)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub estimate: BandEstimate,
    pub band: Band,
    pub predictor: FirPredictor,
    /// Predictions for `t = 1 ..= horizon`.
    #[serde(skip)]
    pub predictions: Vec<C64>,
    /// Per-step bound factors from [`FirPredictor::error_gain`] times the
    /// design error.
    pub step_error_bound: Vec<f64>,
}

/// Estimates the band from `{t <= τ_split}`, designs a predictor on it and
/// predicts `t = 1 ..= horizon` from `{τ_split < s <= 0}`.
///
/// `half_width` overrides the estimated half-width while keeping the
/// estimated center.
pub fn predict_with_estimated_band(
    x: &OneSidedSequence,
    estimator: &BandEstimatorConfig,
    length: usize,
    horizon: usize,
    half_width: Option<f64>,
) -> Result<PredictionReport> {
    if estimator.tau_split >= 0 {
        return Err(Error::invalid(format!("tau_split = {} must be negative", estimator.tau_split)));
    }
    let estimate = estimate_band(x, estimator)?;
    let i_hat = estimate.band()?;
    let band = match half_width {
        Some(w) => Band::new(i_hat.center(), w)?,
        None => i_hat,
    };
    let predictor = FirPredictor::design(band, length)?;
    let recent = (-estimator.tau_split) as usize;
    let history = OneSidedSequence::from_fn(recent.min(x.horizon()), |t| x.get(t))?;
    let predictions = predictor.predict_recursive(&history, horizon);
    let step_error_bound = predictor.error_gain(horizon).iter().map(|g| g * predictor.design_error()).collect();
    Ok(PredictionReport { estimate, band, predictor, predictions, step_error_bound })
}
