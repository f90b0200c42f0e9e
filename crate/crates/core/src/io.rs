//! Sequence and spectrum files, and byte-stable JSON.
//!
//! Sequences are CSV with header `t,re,im` (`im` optional), one sample per
//! row in any order. Spectra are CSV `omega,re,im`. Floats are written with 17
//! significant digits.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{OneSidedSequence, SpectrumGrid, TwoSidedSequence, C64};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn read_sequence<R: Read>(reader: R) -> Result<TwoSidedSequence> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_im = match names.as_slice() {
        ["t", "re"] => false,
        ["t", "re", "im"] => true,
        _ => return Err(parse_err(1, format!("expected header t,re[,im], found {}", names.join(",")))),
    };

    let mut samples = BTreeMap::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let expected = if has_im { 2..=3 } else { 2..=2 };
        if !expected.contains(&record.len()) {
            return Err(parse_err(line, format!("expected {} fields, found {}", headers.len(), record.len())));
        }
        let t: i64 = record[0].parse().map_err(|_| parse_err(line, format!("bad time index {:?}", &record[0])))?;
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| parse_err(line, format!("bad number {s:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("non-finite value {s:?}")))
            }
        };
        let re = num(&record[1])?;
        let im = match record.get(2) {
            Some(s) if !s.is_empty() => num(s)?,
            _ => 0.0,
        };
        if samples.insert(t, C64::new(re, im)).is_some() {
            return Err(parse_err(line, format!("duplicate time index {t}")));
        }
    }
    let (&t_min, _) = samples.first_key_value().ok_or_else(|| parse_err(1, "no samples"))?;
    let (&t_max, _) = samples.last_key_value().expect("nonempty");
    TwoSidedSequence::from_fn(t_min, t_max, |t| samples.get(&t).copied().unwrap_or_default())
}

pub fn read_sequence_file(path: &std::path::Path) -> Result<TwoSidedSequence> {
    read_sequence(std::fs::File::open(path)?)
}

/// Reads a sequence as one-sided: all samples must lie at `t <= 0`; the
/// horizon reaches back to the earliest sample.
pub fn to_one_sided(x: &TwoSidedSequence) -> Result<OneSidedSequence> {
    if x.t_max() > 0 {
        return Err(Error::invalid(format!("one-sided input has a sample at t = {} > 0", x.t_max())));
    }
    OneSidedSequence::from_fn((1 - x.t_min().min(0)) as usize, |t| x.get(t))
}

pub fn write_samples<W: Write>(mut w: W, samples: impl IntoIterator<Item = (i64, C64)>) -> Result<()> {
    writeln!(w, "t,re,im")?;
    for (t, v) in samples {
        writeln!(w, "{t},{},{}", fmt_f64(v.re), fmt_f64(v.im))?;
    }
    Ok(())
}

pub fn write_grid<W: Write>(mut w: W, grid: &SpectrumGrid) -> Result<()> {
    writeln!(w, "omega,re,im")?;
    for (omega, v) in grid.iter() {
        writeln!(w, "{},{},{}", fmt_f64(omega), fmt_f64(v.re), fmt_f64(v.im))?;
    }
    Ok(())
}

struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with every float written by [`fmt_f64`] and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    value.serialize(&mut ser).map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}
