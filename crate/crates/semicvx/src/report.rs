//! Verification reports and deterministic serialization.
//!
//! All floating-point output is written with 17 significant digits so that
//! identical runs produce byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::Result;

/// Outcome of one sampled check: the worst violation seen over a declared
/// deterministic sample set. `max_violation` already has any per-sample grid
/// slack subtracted, so `pass` means `max_violation <= tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub samples: usize,
    pub skipped: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    /// Sample at which the maximum violation occurred, if any sample was used.
    pub worst_sample: Option<Vec<f64>>,
    /// For constant-finding checks: the empirical constant observed.
    pub empirical_constant: Option<f64>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn from_violations(check: &str, tolerance: f64) -> ReportBuilder {
        ReportBuilder {
            check: check.to_string(),
            tolerance,
            samples: 0,
            skipped: 0,
            max_violation: f64::NEG_INFINITY,
            worst_sample: None,
            empirical_constant: None,
        }
    }
}

pub struct ReportBuilder {
    check: String,
    tolerance: f64,
    samples: usize,
    skipped: usize,
    max_violation: f64,
    worst_sample: Option<Vec<f64>>,
    empirical_constant: Option<f64>,
}

impl ReportBuilder {
    pub fn record(&mut self, violation: f64, sample: &[f64]) {
        self.samples += 1;
        if violation > self.max_violation {
            self.max_violation = violation;
            self.worst_sample = Some(sample.to_vec());
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn empirical_constant(&mut self, c: f64) {
        self.empirical_constant = Some(c);
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn finish(self) -> VerificationReport {
        let max_violation = if self.samples == 0 { 0.0 } else { self.max_violation };
        VerificationReport {
            check: self.check,
            samples: self.samples,
            skipped: self.skipped,
            max_violation,
            tolerance: self.tolerance,
            worst_sample: self.worst_sample,
            empirical_constant: self.empirical_constant,
            pass: max_violation <= self.tolerance,
        }
    }
}

/// Pretty JSON formatter that renders every float with 17 significant digits.
struct FixedFloatFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> FixedFloatFormatter<'a> {
    fn new() -> Self {
        Self { inner: PrettyFormatter::new() }
    }
}

impl<'a> Formatter for FixedFloatFormatter<'a> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("non-finite float {value} in report"),
            ));
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serialize `value` as pretty JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, FixedFloatFormatter::new());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serializer emits utf-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = to_json_string(value)?;
    std::fs::write(path, s)?;
    Ok(())
}

/// Minimal CSV writer: comma separators, header row, LF line endings, floats
/// with 17 significant digits.
pub struct CsvWriter {
    out: BufWriter<File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        Ok(Self { out, columns: header.len() })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        assert_eq!(values.len(), self.columns, "csv row width mismatch");
        let mut line = String::new();
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format_float(*v));
        }
        line.push('\n');
        self.out.write_all(line.as_bytes())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}
