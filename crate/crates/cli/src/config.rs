use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use pathnoise::{Band, Error, Result};

/// Numeric knobs shared by every subcommand. A JSON config file may set any
/// of them under the same names; flags given on the command line win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Knobs {
    /// Sequence CSV with header t,re,im
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory; the JSON report goes to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of spectral grid nodes
    #[arg(long)]
    pub grid: Option<usize>,
    /// Band as <center>,<half_width> in radians
    #[arg(long, allow_hyphen_values = true)]
    pub band: Option<String>,
    /// Sinc coefficient range K
    #[arg(long)]
    pub coeffs: Option<usize>,
    /// Projector time horizon T
    #[arg(long = "horizon-T")]
    #[serde(rename = "horizon-T")]
    pub horizon_t: Option<usize>,
    /// Diagonal regularization; omit for the pseudoinverse solve
    #[arg(long)]
    pub reg: Option<f64>,
    /// Radius of the arc around the spectral minimum kept entirely as noise
    #[arg(long)]
    pub eps: Option<f64>,
    /// Lower bound on the spectral gap for band estimation
    #[arg(long)]
    pub nu: Option<f64>,
    /// Predictor length L
    #[arg(long)]
    pub taps: Option<usize>,
    /// Extrapolation or prediction horizon
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub stop_tol: Option<f64>,
    #[arg(long)]
    pub decrease_tol: Option<f64>,
    /// Last time index used for band estimation
    #[arg(long, allow_hyphen_values = true)]
    pub tau_split: Option<i64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Index of the missing sample
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    /// Frequency where the class attains its minimal spectrum modulus
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Class level used as the worst-case error
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Predictor half-width, overriding the estimated one
    #[arg(long)]
    pub half_width: Option<f64>,
    /// JSON file with default values for any of these options
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! merge {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl Knobs {
    /// Fills unset knobs from the config file, if one was given.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path)?;
        let file: Knobs = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: format!("{}: {e}", path.display()),
        })?;
        merge!(
            self, file, input, out, grid, band, coeffs, horizon_t, reg, eps, nu, taps, horizon, max_steps, stop_tol,
            decrease_tol, tau_split, threads, m, omega0, sigma, half_width
        );
        Ok(self)
    }

    pub fn input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| Error::InvalidInput("--input is required".into()))
    }

    pub fn band(&self) -> Result<Band> {
        let text = self.band.as_deref().ok_or_else(|| Error::InvalidInput("--band is required".into()))?;
        parse_band(text)
    }
}

pub fn parse_band(text: &str) -> Result<Band> {
    let bad = || Error::InvalidInput(format!("band {text:?} is not <center>,<half_width>"));
    let (c, w) = text.split_once(',').ok_or_else(bad)?;
    let c: f64 = c.trim().parse().map_err(|_| bad())?;
    let w: f64 = w.trim().parse().map_err(|_| bad())?;
    Band::new(c, w)
}
