use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use pathnoise::band_estimator::BandStatus;
use pathnoise::io::{read_sequence_file, to_json, to_one_sided, write_grid, write_samples};
use pathnoise::lbl::SolverSummary;
use pathnoise::multistep::StepRecord;
use pathnoise::{
    decompose, estimate_band, gamma_decompose, predict_with_estimated_band, quantify_randomness, recover_missing,
    sigma_of, Band, BandEstimatorConfig, Error, LblProjector, MultistepConfig, OneSidedSequence, RecoveryClass,
    Result, C64, DEFAULT_GRID,
};

use crate::config::Knobs;

/// A finished command: the JSON report plus any series files for `--out`.
pub struct Output {
    pub report: String,
    pub files: Vec<(String, Vec<u8>)>,
    /// Raised after the report has been emitted.
    pub error: Option<Error>,
}

impl Output {
    fn new(report: &impl Serialize) -> Result<Self> {
        Ok(Self { report: to_json(report)?, files: Vec::new(), error: None })
    }

    fn file(mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Self> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.files.push((name.to_string(), buf));
        Ok(self)
    }

    /// Writes the report and series into `dir`, or the report to stdout.
    pub fn emit(&self, dir: Option<&Path>) -> Result<()> {
        match dir {
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.report.as_bytes())?;
                out.flush()?;
            }
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("report.json"), &self.report)?;
                for (name, bytes) in &self.files {
                    let mut w = BufWriter::new(File::create(dir.join(name))?);
                    w.write_all(bytes)?;
                    w.flush()?;
                }
            }
        }
        Ok(())
    }
}

fn one_sided_input(k: &Knobs) -> Result<OneSidedSequence> {
    to_one_sided(&read_sequence_file(k.input()?)?)
}

pub fn analyze(k: &Knobs) -> Result<Output> {
    let x = read_sequence_file(k.input()?)?;
    let grid = k.grid.unwrap_or(DEFAULT_GRID);
    let report = sigma_of(&x, grid)?;
    let spectrum = pathnoise::ztransform(&x, grid)?;
    Output::new(&report)?.file("spectrum.csv", |w| write_grid(w, &spectrum))
}

#[derive(Serialize)]
struct DecomposeReport {
    sigma: f64,
    omega0: f64,
    epsilon: f64,
    degenerate: bool,
    grid_size: usize,
    l1_x: f64,
    l1_y: f64,
    l1_n: f64,
    linf_x: f64,
    linf_y: f64,
    linf_n: f64,
}

pub fn decompose2(k: &Knobs) -> Result<Output> {
    let x = read_sequence_file(k.input()?)?;
    let d = gamma_decompose(&x, k.eps.unwrap_or(0.0), k.grid.unwrap_or(DEFAULT_GRID))?;
    let report = DecomposeReport {
        sigma: d.sigma,
        omega0: d.omega0,
        epsilon: d.epsilon,
        degenerate: d.degenerate,
        grid_size: d.spectrum.size(),
        l1_x: d.spectrum.l1(),
        l1_y: d.predictable.l1(),
        l1_n: d.noise.l1(),
        linf_x: d.spectrum.linf(),
        linf_y: d.predictable.linf(),
        linf_n: d.noise.linf(),
    };
    let noise = d.noise_sequence(x.t_min(), x.t_max())?;
    let predictable = d.predictable_sequence(x.t_min(), x.t_max())?;
    Output::new(&report)?
        .file("Y.csv", |w| write_grid(w, &d.predictable))?
        .file("N.csv", |w| write_grid(w, &d.noise))?
        .file("noise.csv", |w| write_samples(w, noise.iter()))?
        .file("predictable.csv", |w| write_samples(w, predictable.iter()))
}

#[derive(Serialize)]
struct RecoverReport {
    m: i64,
    estimate_re: f64,
    estimate_im: f64,
    worst_case_error: f64,
    omega0: f64,
    omega0_source: pathnoise::two_sided::Provenance,
    worst_case_source: pathnoise::two_sided::Provenance,
}

pub fn recover(k: &Knobs) -> Result<Output> {
    let x = read_sequence_file(k.input()?)?;
    let m = k.m.ok_or_else(|| Error::InvalidInput("--m is required".into()))?;
    let class = RecoveryClass { omega0: k.omega0, sigma: k.sigma };
    let r = recover_missing(&x, m, k.grid.unwrap_or(DEFAULT_GRID), &class)?;
    Output::new(&RecoverReport {
        m: r.m,
        estimate_re: r.estimate.re,
        estimate_im: r.estimate.im,
        worst_case_error: r.worst_case_error,
        omega0: r.omega0,
        omega0_source: r.omega0_source,
        worst_case_source: r.worst_case_source,
    })
}

#[derive(Serialize)]
struct ProjectReport {
    config: pathnoise::ProjectorConfig,
    solver: SolverSummary,
    residual: f64,
    norm_x: f64,
    relative_residual: f64,
    left_bandlimited: bool,
    coefficients_path: Option<&'static str>,
    warning: Option<String>,
}

pub fn project(k: &Knobs) -> Result<Output> {
    let x = one_sided_input(k)?;
    let horizon = k.horizon_t.unwrap_or(x.horizon());
    let p = LblProjector::build(k.band()?, k.coeffs.unwrap_or(pathnoise::lbl::DEFAULT_COEFFS), horizon, k.reg)?;
    let r = p.project(&x, k.horizon.unwrap_or(0))?;
    let relative = if r.norm_x > 0.0 { r.residual / r.norm_x } else { 0.0 };
    let report = ProjectReport {
        config: p.config(),
        solver: p.solver(),
        residual: r.residual,
        norm_x: r.norm_x,
        relative_residual: relative,
        left_bandlimited: r.residual <= 1e-6 * r.norm_x,
        coefficients_path: k.out.as_ref().map(|_| "coefficients.csv"),
        warning: r.warning.clone(),
    };
    let kk = p.coeff_range() as i64;
    let mut out = Output::new(&report)?
        .file("x_hat.csv", |w| write_samples(w, r.x_hat.iter()))?
        .file("coefficients.csv", |w| {
            writeln!(w, "k,re,im")?;
            for (c, kidx) in r.coefficients.iter().zip(-kk..) {
                writeln!(w, "{kidx},{},{}", pathnoise::io::fmt_f64(c.re), pathnoise::io::fmt_f64(c.im))?;
            }
            Ok(())
        })?;
    if let Some(ext) = &r.extrapolation {
        out = out.file("extrapolation.csv", |w| write_samples(w, ext.iter()))?;
    }
    Ok(out)
}

fn estimator_config(k: &Knobs) -> BandEstimatorConfig {
    BandEstimatorConfig {
        lambda: k.reg,
        ..BandEstimatorConfig::new(k.nu.unwrap_or(PI), k.tau_split.unwrap_or(-16))
    }
}

pub fn estimate(k: &Knobs) -> Result<Output> {
    let x = one_sided_input(k)?;
    let est = estimate_band(&x, &estimator_config(k))?;
    let mut out = Output::new(&est)?;
    if est.status == BandStatus::Ambiguous {
        out.error = est.band().err();
    }
    Ok(out)
}

#[derive(Serialize)]
struct Sample {
    t: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct PredictReport<'a> {
    band: Band,
    predictor: &'a pathnoise::FirPredictor,
    predictions: Vec<Sample>,
    step_error_bound: &'a [f64],
}

pub fn predict(k: &Knobs) -> Result<Output> {
    let x = one_sided_input(k)?;
    let r = predict_with_estimated_band(
        &x,
        &estimator_config(k),
        k.taps.unwrap_or(32),
        k.horizon.unwrap_or(8),
        k.half_width,
    )?;
    let samples: Vec<(i64, C64)> = (1..).zip(r.predictions.iter().copied()).collect();
    let report = PredictReport {
        band: r.band,
        predictor: &r.predictor,
        predictions: samples.iter().map(|&(t, v)| Sample { t, re: v.re, im: v.im }).collect(),
        step_error_bound: &r.step_error_bound,
    };
    Output::new(&report)?.file("predictions.csv", |w| write_samples(w, samples.iter().copied()))
}

#[derive(Serialize)]
struct MultistepReport<'a> {
    stop_reason: &'static str,
    norm_x: f64,
    randomness: f64,
    steps: &'a [StepRecord],
}

pub fn multistep(k: &Knobs) -> Result<Output> {
    let x = one_sided_input(k)?;
    let defaults = MultistepConfig::new(k.band()?);
    let cfg = MultistepConfig {
        max_steps: k.max_steps.unwrap_or(defaults.max_steps),
        stop_tol: k.stop_tol.unwrap_or(defaults.stop_tol),
        decrease_tol: k.decrease_tol.unwrap_or(defaults.decrease_tol),
        coeffs: k.coeffs.unwrap_or(defaults.coeffs),
        horizon: k.horizon_t,
        lambda: k.reg,
        ..defaults
    };
    let r = decompose(&x, &cfg)?;
    let report = MultistepReport {
        stop_reason: r.stop_reason.as_str(),
        norm_x: r.norm_x,
        randomness: quantify_randomness(&r),
        steps: &r.steps,
    };
    let mut out = Output::new(&report)?
        .file("predictable.csv", |w| write_samples(w, r.predictable_part.iter()))?
        .file("noise.csv", |w| write_samples(w, r.noise_part.iter()))?;
    for (i, c) in r.components.iter().enumerate() {
        out = out.file(&format!("x_hat_{i}.csv"), |w| write_samples(w, c.x_hat.iter()))?;
        if let Some(y) = &c.y_hat {
            out = out.file(&format!("y_hat_{i}.csv"), |w| write_samples(w, y.iter()))?;
        }
    }
    Ok(out)
}
