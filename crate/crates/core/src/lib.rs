//! Pathwise randomness of deterministic discrete-time sequences.
//!
//! Two-sided sequences are measured by the minimum modulus of their spectrum
//! and split into a predictable part plus a constant-modulus noise. One-sided
//! sequences are projected onto left-band-limited classes, extrapolated,
//! predicted, and peeled into band-limited components plus a residual noise
//! that no further projection can shrink.

pub mod band_estimator;
pub mod error;
pub mod io;
pub mod lbl;
mod linalg;
pub mod multistep;
pub mod predictor;
pub mod spectral;
pub mod two_sided;

pub use band_estimator::{estimate_band, BandEstimate, BandEstimatorConfig, BandStatus};
pub use error::{Error, Result};
pub use lbl::{q_adjoint, q_apply, LblProjector, ProjectionResult, ProjectorConfig};
pub use linalg::sinc;
pub use multistep::{decompose, quantify_randomness, MultistepConfig, MultistepResult, StopReason};
pub use predictor::{predict_with_estimated_band, FirPredictor};
pub use spectral::{
    grid_frequency, inverse_ztransform, wrap_angle, ztransform, ztransform_at, Band, Modulate, OneSidedSequence,
    SpectrumGrid, TwoSidedSequence, C64, DEFAULT_GRID,
};
pub use two_sided::{
    gamma_decompose, recover_missing, sigma_of, GammaDecomposition, RecoveryClass, RecoveryReport, SigmaReport,
};
