//! Deterministic inputs shared by the benchmarks.

use pathnoise::{q_apply, OneSidedSequence, TwoSidedSequence, C64};

/// A deterministic pseudo-random two-sided sequence on `0 ..len`.
pub fn test_sequence(len: usize) -> TwoSidedSequence {
    TwoSidedSequence::from_fn(0, len as i64 - 1, |t| {
        let t = t as f64;
        C64::new((1.3 * t).sin() + 0.5 * (0.21 * t * t).cos(), (0.7 * t).cos())
    })
    .expect("valid sequence")
}

/// The sinc synthesis of a fixed coefficient vector, restricted to `t <= 0`.
pub fn band_limited(half_width: f64, coeffs: usize, horizon: usize) -> OneSidedSequence {
    let y: Vec<C64> = (0..2 * coeffs + 1).map(|k| C64::new(1.0 / (1.0 + k as f64), 0.25)).collect();
    let s = q_apply(&y, half_width, -(horizon as i64 - 1)..=0).expect("valid band");
    OneSidedSequence::from_fn(horizon, |t| s.get(t)).expect("valid sequence")
}
