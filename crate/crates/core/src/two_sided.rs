//! Randomness of two-sided sequences measured by the essential infimum of the
//! spectrum modulus, the constant-modulus noise split, and single-sample
//! recovery with worst-case-optimal error.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{grid_frequency, wrap_angle, ztransform, ztransform_at, SpectrumGrid, TwoSidedSequence, C64};

/// `σ(x) = min_n |X_n|` and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaReport {
    pub sigma: f64,
    pub omega0: f64,
    /// `2π σ / ‖X‖_{L1}`, zero for a vanishing spectrum.
    pub normalized_ratio: f64,
    pub grid_size: usize,
}

pub fn sigma_of(x: &TwoSidedSequence, grid_size: usize) -> Result<SigmaReport> {
    Ok(sigma_of_spectrum(&ztransform(x, grid_size)?))
}

/// Grid minimum of `|X|`; ties go to the smallest frequency.
pub fn sigma_of_spectrum(spectrum: &SpectrumGrid) -> SigmaReport {
    let (n0, sigma) = spectrum
        .values()
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) });
    let l1 = spectrum.l1();
    let normalized_ratio = if l1 > 0.0 { (2.0 * PI * sigma / l1).min(1.0) } else { 0.0 };
    SigmaReport { sigma, omega0: spectrum.frequency(n0), normalized_ratio, grid_size: spectrum.size() }
}

/// The closed arc `{ω : |e^{iω} - e^{iω_0}| <= ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonArc {
    pub center: f64,
    pub epsilon: f64,
    /// Angular half-width `2 asin(ε/2)`; equals `π` once `ε >= 2`.
    pub half_angle: f64,
}

impl EpsilonArc {
    pub fn new(center: f64, epsilon: f64) -> Self {
        let half_angle = if epsilon >= 2.0 { PI } else { 2.0 * (epsilon / 2.0).asin() };
        Self { center: wrap_angle(center), epsilon, half_angle }
    }

    pub fn contains(&self, omega: f64) -> bool {
        let chord = 2.0 * ((omega - self.center) / 2.0).sin().abs();
        chord <= self.epsilon
    }
}

/// `X = Y + N` with `N = γ_ε X`.
#[derive(Debug, Clone)]
pub struct GammaDecomposition {
    pub spectrum: SpectrumGrid,
    /// `Y = X - N`, vanishing on the ε-arc.
    pub predictable: SpectrumGrid,
    /// `N = γ_ε X`, of constant modulus `σ` off the ε-arc.
    pub noise: SpectrumGrid,
    pub sigma: f64,
    pub omega0: f64,
    pub epsilon: f64,
    pub eps_arc: Option<EpsilonArc>,
    /// Set when `σ = 0` and `ε = 0`; the split is then `Y = X`, `N = 0`.
    pub degenerate: bool,
}

impl GammaDecomposition {
    /// `n_ε` on `t_min ..= t_max` by grid quadrature.
    pub fn noise_sequence(&self, t_min: i64, t_max: i64) -> Result<TwoSidedSequence> {
        crate::spectral::inverse_ztransform(&self.noise, t_min, t_max)
    }

    /// `y_ε` on `t_min ..= t_max` by grid quadrature.
    pub fn predictable_sequence(&self, t_min: i64, t_max: i64) -> Result<TwoSidedSequence> {
        crate::spectral::inverse_ztransform(&self.predictable, t_min, t_max)
    }

    /// The noise gain `γ_ε` at grid node `n`.
    pub fn gain(&self, n: usize) -> f64 {
        let x = self.spectrum.values()[n].norm();
        if x == 0.0 {
            0.0
        } else {
            self.noise.values()[n].norm() / x
        }
    }
}

pub fn gamma_decompose(x: &TwoSidedSequence, epsilon: f64, grid_size: usize) -> Result<GammaDecomposition> {
    gamma_decompose_spectrum(ztransform(x, grid_size)?, epsilon)
}

pub fn gamma_decompose_spectrum(spectrum: SpectrumGrid, epsilon: f64) -> Result<GammaDecomposition> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon {epsilon} must be a finite nonnegative number")));
    }
    let report = sigma_of_spectrum(&spectrum);
    let sigma = report.sigma;
    let eps_arc = (epsilon > 0.0).then(|| EpsilonArc::new(report.omega0, epsilon));
    let degenerate = sigma == 0.0 && epsilon == 0.0;

    let mut noise = Vec::with_capacity(spectrum.size());
    let mut predictable = Vec::with_capacity(spectrum.size());
    for (w, x) in spectrum.iter() {
        let modulus = x.norm();
        let gain = if eps_arc.is_some_and(|arc| arc.contains(w)) {
            1.0
        } else if modulus == 0.0 {
            0.0
        } else {
            sigma / modulus
        };
        let n = x * gain;
        noise.push(n);
        predictable.push(x - n);
    }
    Ok(GammaDecomposition {
        predictable: SpectrumGrid::new(predictable)?,
        noise: SpectrumGrid::new(noise)?,
        spectrum,
        sigma,
        omega0: report.omega0,
        epsilon,
        eps_arc,
        degenerate,
    })
}

/// Prior knowledge about the class the missing sample is recovered in.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RecoveryClass {
    /// Frequency at which the class attains its minimal spectrum modulus.
    pub omega0: Option<f64>,
    /// The class level `σ`.
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Supplied,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub m: i64,
    pub estimate: C64,
    pub omega0: f64,
    pub omega0_source: Provenance,
    /// Class-wide worst-case error `σ`; falls back to the `σ` of the
    /// zero-filled observation when the class level is not supplied.
    pub worst_case_error: f64,
    pub worst_case_source: Provenance,
}

/// Estimates `x(m)` from all other samples as `-e^{imω_0} Y(e^{iω_0})`,
/// where `Y` is the transform of the observation with `x(m)` removed.
///
/// Any stored value at `t = m` is ignored. Without a supplied `ω_0` the
/// frequency is taken where the implied completion `-e^{imω} Y(e^{iω})` is
/// flattest on the grid; ties go to the largest frequency.
pub fn recover_missing(
    observed: &TwoSidedSequence,
    m: i64,
    grid_size: usize,
    class: &RecoveryClass,
) -> Result<RecoveryReport> {
    if grid_size < 3 {
        return Err(Error::invalid(format!("grid size {grid_size} < 3")));
    }
    if let Some(s) = class.sigma {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("class sigma {s} must be finite and nonnegative")));
        }
    }
    let y = observed.without(m);
    let completion = |w: f64, yw: C64| -C64::from_polar(1.0, m as f64 * w) * yw;

    let y_grid = ztransform(&y, grid_size)?;
    let (estimate, omega0, omega0_source) = match class.omega0 {
        Some(w0) => {
            if !w0.is_finite() {
                return Err(Error::invalid("omega0 must be finite"));
            }
            let w0 = wrap_angle(w0);
            (completion(w0, ztransform_at(&y, w0)), w0, Provenance::Supplied)
        }
        None => {
            let implied: Vec<C64> = y_grid.iter().map(|(w, v)| completion(w, v)).collect();
            let n = implied.len();
            let slope: Vec<f64> =
                (0..n).map(|i| (implied[(i + 1) % n] - implied[(i + n - 1) % n]).norm()).collect();
            let floor = slope.iter().cloned().fold(f64::INFINITY, f64::min);
            let scale = slope.iter().cloned().fold(0.0, f64::max);
            let tie = floor + 1e-9 * scale;
            let best = (0..n).rev().find(|&i| slope[i] <= tie).unwrap_or(n - 1);
            (implied[best], grid_frequency(best, grid_size), Provenance::Estimated)
        }
    };

    let (worst_case_error, worst_case_source) = match class.sigma {
        Some(s) => (s, Provenance::Supplied),
        None => (sigma_of_spectrum(&y_grid).sigma, Provenance::Estimated),
    };
    Ok(RecoveryReport { m, estimate, omega0, omega0_source, worst_case_error, worst_case_source })
}
