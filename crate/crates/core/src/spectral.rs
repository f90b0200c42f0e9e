//! Sequence containers, frequency arcs and the grid-sampled Z-transform pair.
//!
//! Two-sided sequences live on a contiguous integer window and are zero
//! outside it. One-sided sequences cover `t = -T+1 ..= 0` and are zero in the
//! older past. Spectra are sampled on the grid `ω_n = -π + 2π(n+1)/N`, so the
//! last node is exactly `π` and the grid covers `(-π, π]`.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default number of grid nodes used for spectral quantities.
pub const DEFAULT_GRID: usize = 4096;

const TWO_PI: f64 = 2.0 * PI;

// Below this many multiply-adds the rayon split costs more than it saves.
const PAR_THRESHOLD: usize = 1 << 15;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(omega: f64) -> f64 {
    let r = omega.rem_euclid(TWO_PI);
    if r > PI {
        r - TWO_PI
    } else {
        r
    }
}

fn check_finite(values: &[C64], offset: i64) -> Result<()> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(i) => Err(Error::NonFinite { index: offset + i as i64 }),
        None => Ok(()),
    }
}

fn l1(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).sum()
}

fn l2(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn linf(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// A finitely supported sequence on `t_min ..= t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedSequence {
    t_min: i64,
    values: Vec<C64>,
}

impl TwoSidedSequence {
    pub fn new(t_min: i64, values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("a two-sided sequence needs at least one sample"));
        }
        check_finite(&values, t_min)?;
        Ok(Self { t_min, values })
    }

    pub fn from_real(t_min: i64, values: &[f64]) -> Result<Self> {
        Self::new(t_min, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// `value` at time `t`, zero elsewhere.
    pub fn impulse(t: i64, value: C64) -> Self {
        Self { t_min: t, values: vec![value] }
    }

    pub fn zeros(t_min: i64, t_max: i64) -> Result<Self> {
        if t_max < t_min {
            return Err(Error::invalid(format!("empty window {t_min}..={t_max}")));
        }
        Ok(Self { t_min, values: vec![C64::new(0.0, 0.0); (t_max - t_min + 1) as usize] })
    }

    /// Builds `f(t)` for every `t` in the window.
    pub fn from_fn(t_min: i64, t_max: i64, f: impl FnMut(i64) -> C64) -> Result<Self> {
        if t_max < t_min {
            return Err(Error::invalid(format!("empty window {t_min}..={t_max}")));
        }
        Self::new(t_min, (t_min..=t_max).map(f).collect())
    }

    pub fn t_min(&self) -> i64 {
        self.t_min
    }

    pub fn t_max(&self) -> i64 {
        self.t_min + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Sample at `t`; zero outside the stored window.
    pub fn get(&self, t: i64) -> C64 {
        if t < self.t_min || t > self.t_max() {
            C64::new(0.0, 0.0)
        } else {
            self.values[(t - self.t_min) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.t_min + i as i64, v))
    }

    /// Same sequence with the sample at `t` replaced by zero.
    pub fn without(&self, t: i64) -> Self {
        let mut out = self.clone();
        if t >= self.t_min && t <= self.t_max() {
            out.values[(t - self.t_min) as usize] = C64::new(0.0, 0.0);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { t_min: self.t_min, values: self.values.iter().map(|&v| v * c).collect() }
    }

    /// Pointwise `a·self + b·other` over the union of both windows.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Self {
        let t_min = self.t_min.min(other.t_min);
        let t_max = self.t_max().max(other.t_max());
        let values = (t_min..=t_max).map(|t| a * self.get(t) + b * other.get(t)).collect();
        Self { t_min, values }
    }

    pub fn l1(&self) -> f64 {
        l1(&self.values)
    }

    pub fn l2(&self) -> f64 {
        l2(&self.values)
    }

    pub fn linf(&self) -> f64 {
        linf(&self.values)
    }
}

/// Observations `x(t)` for `t = -T+1 ..= 0`; zero for `t <= -T`.
///
/// `values()[T-1]` is the most recent sample, taken at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedSequence {
    values: Vec<C64>,
}

impl OneSidedSequence {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("a one-sided sequence needs horizon T >= 1"));
        }
        check_finite(&values, -(values.len() as i64 - 1))?;
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn zeros(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("a one-sided sequence needs horizon T >= 1"));
        }
        Ok(Self { values: vec![C64::new(0.0, 0.0); horizon] })
    }

    /// Evaluates `f(t)` for `t = -horizon+1 ..= 0`.
    pub fn from_fn(horizon: usize, mut f: impl FnMut(i64) -> C64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("a one-sided sequence needs horizon T >= 1"));
        }
        let first = -(horizon as i64 - 1);
        Self::new((first..=0).map(&mut f).collect())
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// Earliest stored time, `-T+1`.
    pub fn t_first(&self) -> i64 {
        -(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Sample at `t`; zero before the horizon and for `t > 0`.
    pub fn get(&self, t: i64) -> C64 {
        if t > 0 || t < self.t_first() {
            C64::new(0.0, 0.0)
        } else {
            self.values[(t - self.t_first()) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let first = self.t_first();
        self.values.iter().enumerate().map(move |(i, &v)| (first + i as i64, v))
    }

    /// Extends the horizon to `horizon` by prepending zeros in the older past.
    pub fn padded(&self, horizon: usize) -> Result<Self> {
        if horizon < self.horizon() {
            return Err(Error::invalid(format!(
                "cannot pad horizon {} down to {}",
                self.horizon(),
                horizon
            )));
        }
        let mut values = vec![C64::new(0.0, 0.0); horizon - self.horizon()];
        values.extend_from_slice(&self.values);
        Ok(Self { values })
    }

    /// Re-indexes the samples `t <= shift` so that `t = shift` lands on 0,
    /// keeping `horizon` samples.
    pub fn window_ending_at(&self, shift: i64, horizon: usize) -> Result<Self> {
        if shift > 0 {
            return Err(Error::invalid(format!("window end {shift} lies in the future")));
        }
        Self::from_fn(horizon, |s| self.get(s + shift))
    }

    pub fn to_two_sided(&self) -> TwoSidedSequence {
        TwoSidedSequence { t_min: self.t_first(), values: self.values.clone() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { values: self.values.iter().map(|&v| v * c).collect() }
    }

    pub fn l1(&self) -> f64 {
        l1(&self.values)
    }

    pub fn l2(&self) -> f64 {
        l2(&self.values)
    }

    pub fn linf(&self) -> f64 {
        linf(&self.values)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let horizon = self.horizon().max(other.horizon());
        let first = -(horizon as i64 - 1);
        Self { values: (first..=0).map(|t| f(self.get(t), other.get(t))).collect() }
    }
}

impl Add for &OneSidedSequence {
    type Output = OneSidedSequence;

    fn add(self, rhs: Self) -> OneSidedSequence {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &OneSidedSequence {
    type Output = OneSidedSequence;

    fn sub(self, rhs: Self) -> OneSidedSequence {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Sample-wise multiplication by `e^{iωt}`.
pub trait Modulate {
    fn modulate(&self, omega: f64) -> Self;
}

fn phase(omega: f64, t: i64) -> C64 {
    C64::from_polar(1.0, omega * t as f64)
}

impl Modulate for TwoSidedSequence {
    fn modulate(&self, omega: f64) -> Self {
        if omega == 0.0 {
            return self.clone();
        }
        Self {
            t_min: self.t_min,
            values: self.iter().map(|(t, v)| v * phase(omega, t)).collect(),
        }
    }
}

impl Modulate for OneSidedSequence {
    fn modulate(&self, omega: f64) -> Self {
        if omega == 0.0 {
            return self.clone();
        }
        Self { values: self.iter().map(|(t, v)| v * phase(omega, t)).collect() }
    }
}

/// An arc of the unit circle, `[center - half_width, center + half_width)`
/// taken modulo `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    center: f64,
    half_width: f64,
}

impl Band {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid("band center must be finite"));
        }
        if !(half_width > 0.0 && half_width < PI) {
            return Err(Error::invalid(format!(
                "band half-width {half_width} outside (0, π)"
            )));
        }
        Ok(Self { center: wrap_angle(center), half_width })
    }

    /// `I_0 = (-Ω, Ω)`.
    pub fn centered(half_width: f64) -> Result<Self> {
        Self::new(0.0, half_width)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn measure(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn contains(&self, omega: f64) -> bool {
        let d = wrap_angle(omega - self.center);
        (-self.half_width..self.half_width).contains(&d)
    }

    pub fn complement(&self) -> Band {
        Band { center: wrap_angle(self.center + PI), half_width: PI - self.half_width }
    }

    /// Same width, new center.
    pub fn recentered(&self, center: f64) -> Band {
        Band { center: wrap_angle(center), half_width: self.half_width }
    }
}

/// `X(e^{iω_n})` on the uniform grid `ω_n = -π + 2π(n+1)/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    values: Vec<C64>,
}

impl SpectrumGrid {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid(format!("grid size {} < 2", values.len())));
        }
        check_finite(&values, 0)?;
        Ok(Self { values })
    }

    pub fn constant(size: usize, value: C64) -> Result<Self> {
        Self::new(vec![value; size])
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn frequency(&self, n: usize) -> f64 {
        grid_frequency(n, self.values.len())
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|n| self.frequency(n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.values.iter().enumerate().map(|(n, &v)| (self.frequency(n), v))
    }

    /// Trapezoid rule on the periodic grid: `(2π/N) Σ |X_n|`.
    pub fn l1(&self) -> f64 {
        TWO_PI / self.values.len() as f64 * l1(&self.values)
    }

    pub fn linf(&self) -> f64 {
        linf(&self.values)
    }
}

/// Node `n` of an `size`-point grid; the last node is exactly `π`.
pub fn grid_frequency(n: usize, size: usize) -> f64 {
    if n + 1 == size {
        PI
    } else {
        -PI + TWO_PI * (n + 1) as f64 / size as f64
    }
}

/// `Σ_t x(t) e^{-iωt}` at a single frequency.
pub fn ztransform_at(x: &TwoSidedSequence, omega: f64) -> C64 {
    x.iter().map(|(t, v)| v * phase(-omega, t)).sum()
}

/// Direct summation of the Z-transform on an `size`-point grid.
pub fn ztransform(x: &TwoSidedSequence, size: usize) -> Result<SpectrumGrid> {
    if size < 2 {
        return Err(Error::invalid(format!("grid size {size} < 2")));
    }
    check_finite(x.values(), x.t_min())?;
    let eval = |n: usize| ztransform_at(x, grid_frequency(n, size));
    let values: Vec<C64> = if size * x.len() >= PAR_THRESHOLD {
        (0..size).into_par_iter().map(eval).collect()
    } else {
        (0..size).map(eval).collect()
    };
    Ok(SpectrumGrid { values })
}

/// Grid quadrature of the inverse transform, `(1/N) Σ_n X_n e^{iω_n t}`.
pub fn inverse_ztransform(spectrum: &SpectrumGrid, t_min: i64, t_max: i64) -> Result<TwoSidedSequence> {
    if t_max < t_min {
        return Err(Error::invalid(format!("empty window {t_min}..={t_max}")));
    }
    let size = spectrum.size();
    let scale = 1.0 / size as f64;
    let eval = |t: i64| -> C64 {
        spectrum.iter().map(|(w, v)| v * phase(w, t)).sum::<C64>() * scale
    };
    let len = (t_max - t_min + 1) as usize;
    let values: Vec<C64> = if size * len >= PAR_THRESHOLD {
        (t_min..=t_max).into_par_iter().map(eval).collect()
    } else {
        (t_min..=t_max).map(eval).collect()
    };
    TwoSidedSequence::new(t_min, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn grid_ends_at_pi() {
        for size in [2, 3, 8, 4096, 1000] {
            assert_eq!(grid_frequency(size - 1, size), PI);
            let g: Vec<f64> = (0..size).map(|n| grid_frequency(n, size)).collect();
            assert!(g.windows(2).all(|w| w[0] < w[1]));
            assert!(g[0] > -PI);
        }
    }

    #[test]
    fn impulse_at_zero_has_flat_spectrum() {
        let x = TwoSidedSequence::impulse(0, c(1.0, 0.0));
        let grid = ztransform(&x, 64).unwrap();
        assert!(grid.values().iter().all(|v| (*v - c(1.0, 0.0)).norm() == 0.0));
    }

    #[test]
    fn delayed_impulse_is_a_phase_ramp() {
        let x = TwoSidedSequence::impulse(1, c(1.0, 0.0));
        let grid = ztransform(&x, 32).unwrap();
        for (w, v) in grid.iter() {
            assert!((v - C64::from_polar(1.0, -w)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_tap_spectrum_matches_hand_sum() {
        let x = TwoSidedSequence::from_real(0, &[1.0, 0.5]).unwrap();
        let grid = ztransform(&x, 8).unwrap();
        for n in 0..8 {
            let w = -PI + 2.0 * PI * (n + 1) as f64 / 8.0;
            let expected = c(1.0 + 0.5 * w.cos(), -0.5 * w.sin());
            assert!((grid.values()[n] - expected).norm() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn inverse_of_flat_spectrum_is_impulse() {
        let grid = SpectrumGrid::constant(128, c(1.0, 0.0)).unwrap();
        let x = inverse_ztransform(&grid, -5, 5).unwrap();
        for (t, v) in x.iter() {
            let expected = if t == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expected, 0.0)).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn inverse_of_phase_ramp_is_delayed_impulse() {
        let grid = SpectrumGrid::new((0..64).map(|n| C64::from_polar(1.0, -grid_frequency(n, 64))).collect())
            .unwrap();
        let x = inverse_ztransform(&grid, -3, 3).unwrap();
        for (t, v) in x.iter() {
            let expected = if t == 1 { 1.0 } else { 0.0 };
            assert!((v - c(expected, 0.0)).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn round_trip_on_short_support() {
        let x = TwoSidedSequence::new(
            -3,
            vec![c(0.3, -1.0), c(2.0, 0.1), c(-0.7, 0.0), c(1.0, 1.0), c(0.0, -0.2), c(0.5, 0.5), c(-1.5, 0.25)],
        )
        .unwrap();
        let back = inverse_ztransform(&ztransform(&x, 64).unwrap(), -3, 3).unwrap();
        for (a, b) in x.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TwoSidedSequence::new(0, vec![]).is_err());
        assert!(matches!(
            TwoSidedSequence::new(4, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { index: 5 })
        ));
        let x = TwoSidedSequence::impulse(0, c(1.0, 0.0));
        assert!(ztransform(&x, 1).is_err());
        assert!(OneSidedSequence::new(vec![]).is_err());
        assert!(OneSidedSequence::from_real(&[1.0, f64::INFINITY]).is_err());
        assert!(SpectrumGrid::new(vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn modulation_examples() {
        let x = TwoSidedSequence::from_real(-2, &[1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(x.modulate(0.0), x);
        let back = x.modulate(0.77).modulate(-0.77);
        for (a, b) in x.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        let y = TwoSidedSequence::impulse(2, c(1.0, 0.0)).modulate(PI / 2.0);
        assert!((y.get(2) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn norms_of_small_sequences() {
        let imp = TwoSidedSequence::impulse(7, c(1.0, 0.0));
        assert_eq!((imp.l1(), imp.l2(), imp.linf()), (1.0, 1.0, 1.0));
        let x = TwoSidedSequence::from_real(0, &[1.0, 0.5]).unwrap();
        assert_eq!(x.l1(), 1.5);
        assert!((x.l2() - 1.25f64.sqrt()).abs() < 1e-15);
        let flat = SpectrumGrid::constant(4096, c(1.0, 0.0)).unwrap();
        assert!((flat.l1() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn band_membership_wraps() {
        let b = Band::new(3.0, 0.5).unwrap();
        assert!(b.contains(3.0));
        assert!(b.contains(-3.0)); // 3.283 wrapped
        assert!(b.contains(2.5)); // lower edge included
        assert!(!b.contains(wrap_angle(3.5))); // upper edge excluded
        assert!(!b.contains(0.0));
        let c0 = b.complement();
        assert!((c0.center() - wrap_angle(3.0 + PI)).abs() < 1e-15);
        assert!((b.measure() + c0.measure() - 2.0 * PI).abs() < 1e-15);
        assert!(c0.contains(wrap_angle(3.5)));
        assert!(!c0.contains(2.5 + 1e-9));
    }

    #[test]
    fn band_rejects_degenerate_widths() {
        assert!(Band::new(0.0, 0.0).is_err());
        assert!(Band::new(0.0, PI).is_err());
        assert!(Band::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn one_sided_indexing_and_padding() {
        let x = OneSidedSequence::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x.horizon(), 3);
        assert_eq!(x.get(0), c(3.0, 0.0));
        assert_eq!(x.get(-2), c(1.0, 0.0));
        assert_eq!(x.get(-3), c(0.0, 0.0));
        let p = x.padded(5).unwrap();
        assert_eq!(p.get(-1), c(2.0, 0.0));
        assert_eq!(p.values()[0], c(0.0, 0.0));
        assert!(x.padded(2).is_err());
        let w = x.window_ending_at(-1, 2).unwrap();
        assert_eq!(w.values(), &[c(1.0, 0.0), c(2.0, 0.0)]);
        let d = &p - &x;
        assert!(d.l2() == 0.0);
    }
}
