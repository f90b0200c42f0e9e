//! Estimation of the spectral support arc of a left-band-limited sequence
//! from its deep past.
//!
//! The circle is cut into `M` equal arcs of width at most `ν/3`. For each arc
//! the deep-past window is projected onto the complementary band; an arc is
//! admissible when that projection leaves a relative residual below `tol`.
//! Admissible arcs form a run inside the spectral gap and the estimate takes
//! the complement of the middle arc of the longest run.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lbl::LblProjector;
use crate::spectral::{wrap_angle, Band, OneSidedSequence};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEstimatorConfig {
    /// Lower bound `ν` on the measure of the spectral gap, in `(0, 2π)`.
    pub nu: f64,
    /// Only samples with `t <= tau_split` are used.
    pub tau_split: i64,
    /// Number of samples taken from the deep past.
    pub window: usize,
    /// Sinc coefficient range; `None` scales it with the window.
    pub coeffs: Option<usize>,
    pub tol: f64,
    pub lambda: Option<f64>,
}

impl BandEstimatorConfig {
    pub fn new(nu: f64, tau_split: i64) -> Self {
        Self { nu, tau_split, window: 128, coeffs: None, tol: 1e-3, lambda: None }
    }

    /// Number of arcs in the candidate family, `ceil(2π / (ν/3))`.
    pub fn candidate_count(&self) -> usize {
        (6.0 * PI / self.nu - 1e-9).ceil().max(2.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BandStatus {
    Ok,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateResidual {
    /// Center of the band the window was projected onto.
    pub center: f64,
    pub half_width: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandEstimate {
    pub omega_c_hat: f64,
    #[serde(rename = "I_hat")]
    pub i_hat: Band,
    pub residual_table: Vec<CandidateResidual>,
    pub status: BandStatus,
    pub nu_hat: f64,
    /// Index of the winning excluded arc in the candidate family.
    #[serde(skip)]
    pub winner: usize,
    #[serde(skip)]
    pub reason: Option<String>,
}

impl BandEstimate {
    pub fn is_ambiguous(&self) -> bool {
        self.status == BandStatus::Ambiguous
    }

    /// The estimated band, or an error when the estimate is ambiguous.
    pub fn band(&self) -> Result<Band> {
        match self.status {
            BandStatus::Ok => Ok(self.i_hat),
            BandStatus::Ambiguous => {
                Err(Error::AmbiguousBand(self.reason.clone().unwrap_or_else(|| "no unique admissible arc".into())))
            }
        }
    }
}

/// `ω̂_c` from the center of the estimated band.
pub fn complement_center(omega_i_hat: f64) -> f64 {
    if omega_i_hat > 0.0 && omega_i_hat <= PI {
        omega_i_hat - PI
    } else {
        omega_i_hat + PI
    }
}

/// Longest circular run of `true`; returns `(start, len)`, ties to the
/// smallest start. Requires at least one `false`.
fn longest_run(pass: &[bool]) -> (usize, usize) {
    let m = pass.len();
    let anchor = pass.iter().position(|p| !p).expect("at least one failing candidate");
    let mut best = (0, 0);
    let mut i = 1;
    while i <= m {
        let idx = (anchor + i) % m;
        if pass[idx] {
            let start = idx;
            let mut len = 0;
            while i <= m && pass[(anchor + i) % m] {
                len += 1;
                i += 1;
            }
            if len > best.1 || (len == best.1 && start < best.0) {
                best = (start, len);
            }
        } else {
            i += 1;
        }
    }
    best
}

pub fn estimate_band(x: &OneSidedSequence, cfg: &BandEstimatorConfig) -> Result<BandEstimate> {
    if !(cfg.nu > 0.0 && cfg.nu < 2.0 * PI) {
        return Err(Error::invalid(format!("nu = {} outside (0, 2π)", cfg.nu)));
    }
    if cfg.tau_split > 0 {
        return Err(Error::invalid(format!("tau_split = {} must be <= 0", cfg.tau_split)));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let available = x.horizon() as i64 + cfg.tau_split;
    if available < 1 || cfg.window == 0 {
        return Err(Error::invalid(format!(
            "no observations at or before tau_split = {} (horizon {})",
            cfg.tau_split,
            x.horizon()
        )));
    }
    let window = (cfg.window as i64).min(available) as usize;
    let past = x.window_ending_at(cfg.tau_split, window)?;

    let m = cfg.candidate_count();
    let width = 2.0 * PI / m as f64;
    let half_width = PI - width / 2.0;
    let coeffs = cfg.coeffs.unwrap_or_else(|| (1.25 * window as f64 * half_width / PI).ceil() as usize).max(1);
    let base = LblProjector::build(Band::centered(half_width)?, coeffs, window, cfg.lambda)?;

    let norm = past.l2();
    let excluded: Vec<f64> = (0..m).map(|k| wrap_angle(-PI + width * (k as f64 + 0.5))).collect();
    let residual_table = excluded
        .par_iter()
        .map(|&c| {
            let p = base.recentered(c + PI);
            let d = if norm == 0.0 { 0.0 } else { p.project(&past, 0)?.residual / norm };
            Ok(CandidateResidual { center: p.band().center(), half_width, d })
        })
        .collect::<Result<Vec<_>>>()?;

    let pass: Vec<bool> = residual_table.iter().map(|r| r.d <= cfg.tol).collect();
    let smallest = (0..m).fold(0, |b, k| if residual_table[k].d < residual_table[b].d { k } else { b });
    let (winner, status, reason) = if norm == 0.0 {
        (smallest, BandStatus::Ambiguous, Some("the observation window is identically zero".to_string()))
    } else if pass.iter().all(|&p| p) {
        (smallest, BandStatus::Ambiguous, Some("every candidate arc is admissible".to_string()))
    } else if !pass.iter().any(|&p| p) {
        let msg = format!("no candidate residual below {:e} (best {:e})", cfg.tol, residual_table[smallest].d);
        (smallest, BandStatus::Ambiguous, Some(msg))
    } else {
        let (start, len) = longest_run(&pass);
        ((start + (len - 1) / 2) % m, BandStatus::Ok, None)
    };

    let i_hat = Band::new(residual_table[winner].center, half_width)?;
    Ok(BandEstimate {
        omega_c_hat: complement_center(i_hat.center()),
        i_hat,
        residual_table,
        status,
        nu_hat: cfg.nu / 3.0,
        winner,
        reason,
    })
}
