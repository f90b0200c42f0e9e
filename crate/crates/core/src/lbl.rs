//! Projection of one-sided sequences onto left-band-limited classes.
//!
//! A band `I` with center `ω_I` and half-width `Ω` is handled by demodulating
//! the input to the centered band `(-Ω, Ω)`, fitting the truncated sinc series
//! `(Ω/π) Σ_{|k|<=K} y_k sinc(kπ + Ωt)` to the samples `t = -T+1 ..= 0`, and
//! modulating back.

use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mul_real, mul_real_transpose, sinc, ThinSvd};
use crate::spectral::{Band, Modulate, OneSidedSequence, TwoSidedSequence, C64};

pub const DEFAULT_COEFFS: usize = 32;
pub const DEFAULT_HORIZON: usize = 4096;

/// Relative eigenvalue floor of the Gram matrix below which directions are
/// treated as numerically null.
pub const GRAM_CUTOFF: f64 = 1e-10;

fn check_half_width(half_width: f64) -> Result<()> {
    if half_width > 0.0 && half_width < PI {
        Ok(())
    } else {
        Err(Error::invalid(format!("half-width {half_width} outside (0, π)")))
    }
}

fn kernel(k: i64, t: i64, half_width: f64) -> f64 {
    half_width / PI * sinc(k as f64 * PI + half_width * t as f64)
}

/// `(Qy)(t) = (Ω/π) Σ_k y_k sinc(kπ + Ωt)` with `y` indexed `k = -K ..= K`.
pub fn q_apply(y: &[C64], half_width: f64, times: RangeInclusive<i64>) -> Result<TwoSidedSequence> {
    check_half_width(half_width)?;
    if y.len().is_multiple_of(2) {
        return Err(Error::invalid(format!("coefficient vector length {} is not 2K+1", y.len())));
    }
    if times.is_empty() {
        return Err(Error::invalid("empty time range"));
    }
    let kk = (y.len() / 2) as i64;
    TwoSidedSequence::from_fn(*times.start(), *times.end(), |t| {
        y.iter().zip(-kk..=kk).map(|(&yk, k)| yk * kernel(k, t, half_width)).sum()
    })
}

/// `(Q*x)_k = (Ω/π) Σ_{j<=0} sinc(kπ + Ωj) x(j)` for `k = -K ..= K`.
pub fn q_adjoint(x: &OneSidedSequence, half_width: f64, coeffs: usize) -> Result<Vec<C64>> {
    check_half_width(half_width)?;
    let kk = coeffs as i64;
    Ok((-kk..=kk).map(|k| x.iter().map(|(j, v)| v * kernel(k, j, half_width)).sum()).collect())
}

/// Serializable projector parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorConfig {
    #[serde(rename = "omega_I")]
    pub center: f64,
    #[serde(rename = "Omega")]
    pub half_width: f64,
    #[serde(rename = "K")]
    pub coeffs: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    /// `None` selects the pseudoinverse solve; `Some(λ)` solves `R + λ Id`.
    pub lambda: Option<f64>,
}

impl ProjectorConfig {
    pub fn new(band: Band) -> Self {
        Self {
            center: band.center(),
            half_width: band.half_width(),
            coeffs: DEFAULT_COEFFS,
            horizon: DEFAULT_HORIZON,
            lambda: None,
        }
    }

    pub fn band(&self) -> Result<Band> {
        Band::new(self.center, self.half_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SolverSummary {
    /// Minimum-norm least squares keeping `rank` of `2K+1` directions.
    Pseudoinverse { cutoff: f64, rank: usize, dropped: usize },
    Tikhonov { lambda: f64 },
}

enum Solver {
    Pseudoinverse { svd: ThinSvd, rank: usize, cutoff: f64 },
    Tikhonov { chol: Cholesky<f64, Dyn>, lambda: f64 },
}

/// Everything that depends on `(Ω, K, T, λ)` but not on the band center.
struct CenteredBasis {
    half_width: f64,
    coeffs: usize,
    horizon: usize,
    q: DMatrix<f64>,
    gram: DMatrix<f64>,
    solver: Solver,
    /// Orthonormal basis of the full column space of `Q`; built lazily for
    /// kernel witnesses.
    range: std::sync::OnceLock<Result<DMatrix<f64>>>,
}

impl CenteredBasis {
    fn build(half_width: f64, coeffs: usize, horizon: usize, lambda: Option<f64>) -> Result<Self> {
        check_half_width(half_width)?;
        if coeffs == 0 {
            return Err(Error::invalid("coefficient range K must be >= 1"));
        }
        if horizon == 0 {
            return Err(Error::invalid("horizon T must be >= 1"));
        }
        let kk = coeffs as i64;
        let first = -(horizon as i64 - 1);
        let q = DMatrix::from_fn(horizon, 2 * coeffs + 1, |r, c| kernel(c as i64 - kk, first + r as i64, half_width));
        let gram = q.tr_mul(&q);
        let gram = (&gram + gram.transpose()) * 0.5;
        let max_diag = gram.diagonal().max();

        let solver = match lambda {
            None => {
                let svd = ThinSvd::new(q.clone())?;
                let cutoff = GRAM_CUTOFF * max_diag;
                let rank = svd.rank_above(cutoff);
                if rank == 0 {
                    return Err(Error::Factorization("Gram matrix has no direction above the cutoff".into()));
                }
                Solver::Pseudoinverse { svd, rank, cutoff }
            }
            Some(lambda) => {
                if !(lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::invalid(format!("regularization {lambda} must be finite and >= 0")));
                }
                let shifted = &gram + DMatrix::identity(gram.nrows(), gram.ncols()) * lambda;
                let chol = Cholesky::new(shifted).ok_or_else(|| {
                    Error::Factorization(format!("R + {lambda:e} Id is not numerically positive definite"))
                })?;
                let min_pivot = chol.l_dirty().diagonal().min();
                if min_pivot * min_pivot <= f64::EPSILON * max_diag * gram.nrows() as f64 {
                    return Err(Error::Factorization(format!(
                        "R + {lambda:e} Id is numerically singular; supply a larger regularization"
                    )));
                }
                Solver::Tikhonov { chol, lambda }
            }
        };
        Ok(Self { half_width, coeffs, horizon, q, gram, solver, range: Default::default() })
    }

    fn coefficients(&self, z: &[C64]) -> Vec<C64> {
        match &self.solver {
            Solver::Pseudoinverse { svd, rank, .. } => {
                let u = svd.u.columns(0, *rank).into_owned();
                let v = svd.v.columns(0, *rank).into_owned();
                let mut w = mul_real_transpose(&u, z);
                for (wi, s) in w.iter_mut().zip(&svd.s) {
                    *wi /= *s;
                }
                mul_real(&v, &w)
            }
            Solver::Tikhonov { chol, .. } => {
                let rhs = mul_real_transpose(&self.q, z);
                let re = chol.solve(&nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().map(|c| c.re)));
                let im = chol.solve(&nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().map(|c| c.im)));
                re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)).collect()
            }
        }
    }

    fn range(&self) -> Result<&DMatrix<f64>> {
        self.range
            .get_or_init(|| match &self.solver {
                Solver::Pseudoinverse { svd, .. } => Ok(svd.u.clone()),
                Solver::Tikhonov { .. } => Ok(ThinSvd::new(self.q.clone())?.u),
            })
            .as_ref()
            .map_err(|e| Error::Factorization(e.to_string()))
    }

    fn summary(&self) -> SolverSummary {
        match &self.solver {
            Solver::Pseudoinverse { svd, rank, cutoff } => {
                SolverSummary::Pseudoinverse { cutoff: *cutoff, rank: *rank, dropped: svd.s.len() - rank }
            }
            Solver::Tikhonov { lambda, .. } => SolverSummary::Tikhonov { lambda: *lambda },
        }
    }
}

/// Truncated realization of `P_I = p_{ω_I} Q R⁻¹ Q* p_{-ω_I}`.
///
/// Cloning is cheap and [`LblProjector::recentered`] reuses the factorization,
/// so a family of bands with a common half-width costs one build.
#[derive(Clone)]
pub struct LblProjector {
    band: Band,
    lambda: Option<f64>,
    basis: Arc<CenteredBasis>,
}

impl std::fmt::Debug for LblProjector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LblProjector")
            .field("band", &self.band)
            .field("coeffs", &self.basis.coeffs)
            .field("horizon", &self.basis.horizon)
            .field("solver", &self.basis.summary())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub x_hat: OneSidedSequence,
    /// `y_k` for `k = -K ..= K`, in the demodulated frame.
    pub coefficients: Vec<C64>,
    pub residual: f64,
    pub norm_x: f64,
    /// The same series on `t = 1 ..= H`.
    pub extrapolation: Option<TwoSidedSequence>,
    /// Set when the residual exceeds `‖x‖`, which signals a too-coarse truncation.
    pub warning: Option<String>,
}

impl LblProjector {
    pub fn build(band: Band, coeffs: usize, horizon: usize, lambda: Option<f64>) -> Result<Self> {
        let basis = CenteredBasis::build(band.half_width(), coeffs, horizon, lambda)?;
        Ok(Self { band, lambda, basis: Arc::new(basis) })
    }

    pub fn from_config(cfg: &ProjectorConfig) -> Result<Self> {
        Self::build(cfg.band()?, cfg.coeffs, cfg.horizon, cfg.lambda)
    }

    pub fn config(&self) -> ProjectorConfig {
        ProjectorConfig {
            center: self.band.center(),
            half_width: self.band.half_width(),
            coeffs: self.basis.coeffs,
            horizon: self.basis.horizon,
            lambda: self.lambda,
        }
    }

    /// The same projector for the band of equal width around `center`.
    pub fn recentered(&self, center: f64) -> Self {
        Self { band: self.band.recentered(center), lambda: self.lambda, basis: Arc::clone(&self.basis) }
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn coeff_range(&self) -> usize {
        self.basis.coeffs
    }

    pub fn horizon(&self) -> usize {
        self.basis.horizon
    }

    /// The truncated Gram matrix `R = QᵀQ` on `k, m = -K ..= K`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.basis.gram
    }

    pub fn solver(&self) -> SolverSummary {
        self.basis.summary()
    }

    fn demodulated(&self, x: &OneSidedSequence) -> Result<Vec<C64>> {
        if x.horizon() > self.horizon() {
            return Err(Error::invalid(format!(
                "input horizon {} exceeds projector horizon {}",
                x.horizon(),
                self.horizon()
            )));
        }
        Ok(x.padded(self.horizon())?.modulate(-self.band.center()).values().to_vec())
    }

    fn synthesize(&self, y: &[C64], times: RangeInclusive<i64>) -> Vec<C64> {
        let kk = self.basis.coeffs as i64;
        let w = self.basis.half_width;
        let c = self.band.center();
        times
            .map(|t| {
                let s: C64 = y.iter().zip(-kk..=kk).map(|(&yk, k)| yk * kernel(k, t, w)).sum();
                s * C64::from_polar(1.0, c * t as f64)
            })
            .collect()
    }

    pub fn project(&self, x: &OneSidedSequence, extrapolate: usize) -> Result<ProjectionResult> {
        let z = self.demodulated(x)?;
        let coefficients = self.basis.coefficients(&z);
        let fitted = mul_real(&self.basis.q, &coefficients);
        let c = self.band.center();
        let first = -(self.horizon() as i64 - 1);
        let x_hat = OneSidedSequence::new(
            fitted.iter().zip(first..).map(|(&v, t)| v * C64::from_polar(1.0, c * t as f64)).collect(),
        )?;
        let x_full = x.padded(self.horizon())?;
        let residual = (&x_full - &x_hat).l2();
        let norm_x = x.l2();
        let extrapolation = (extrapolate > 0)
            .then(|| TwoSidedSequence::new(1, self.synthesize(&coefficients, 1..=extrapolate as i64)))
            .transpose()?;
        let warning = (residual > norm_x * (1.0 + 1e-9) + f64::MIN_POSITIVE).then(|| {
            format!("residual {residual:e} exceeds the input norm {norm_x:e}; increase K or lower the regularization")
        });
        Ok(ProjectionResult { x_hat, coefficients, residual, norm_x, extrapolation, warning })
    }

    /// `P_I x` on `t = -T+1 ..= 0`.
    pub fn apply(&self, x: &OneSidedSequence) -> Result<OneSidedSequence> {
        Ok(self.project(x, 0)?.x_hat)
    }

    /// Whether `‖x - P_I x‖ <= tol ‖x‖`, together with the residual.
    pub fn is_left_bandlimited(&self, x: &OneSidedSequence, tol: f64) -> Result<(bool, f64)> {
        let r = self.project(x, 0)?;
        Ok((r.residual <= tol * r.norm_x, r.residual))
    }

    /// A unit-norm `n` with `Q* p_{-ω_I} n = 0`, hence `P_I n = 0`.
    pub fn find_annihilated(&self) -> Result<OneSidedSequence> {
        let cols = 2 * self.basis.coeffs + 1;
        if self.horizon() <= cols {
            return Err(Error::invalid(format!(
                "no kernel vector: horizon T = {} must exceed 2K+1 = {cols}",
                self.horizon()
            )));
        }
        let u = self.basis.range()?;
        let t = self.horizon();
        let mut best: Option<(f64, Vec<f64>)> = None;
        // the newest sample first; older ones only if it lies in the range
        for pos in (0..t).rev().take(cols + 1) {
            let mut v = vec![0.0; t];
            v[pos] = 1.0;
            for _ in 0..2 {
                let coeffs = u.tr_mul(&nalgebra::DVector::from_column_slice(&v));
                let proj = u * coeffs;
                for (vi, pi) in v.iter_mut().zip(proj.iter()) {
                    *vi -= pi;
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 0.5 {
                best = Some((norm, v));
                break;
            }
            if best.as_ref().is_none_or(|(n, _)| norm > *n) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("horizon exceeds 2K+1");
        let witness = OneSidedSequence::new(v.iter().map(|&a| C64::new(a / norm, 0.0)).collect())?;
        let witness = witness.modulate(self.band.center());
        let image = q_adjoint(&witness.modulate(-self.band.center()), self.basis.half_width, self.basis.coeffs)?;
        let image_norm = image.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if image_norm > 1e-8 {
            return Err(Error::Factorization(format!("kernel witness leaves an adjoint image of norm {image_norm:e}")));
        }
        Ok(witness)
    }
}
