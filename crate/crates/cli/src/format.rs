//! Number formatting and output destinations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{CliError, Result};

/// Version of every JSON document the tool writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Only environment setting honoured: base directory for relative `--out` paths.
pub const OUT_DIR_ENV: &str = "LOMMEL_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "pretty" => Some(Format::Pretty),
            _ => None,
        }
    }

    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "txt" => Some(Format::Pretty),
            _ => None,
        }
    }
}

/// 17 significant digits, the machine format.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        non_finite(x)
    }
}

/// 6 significant digits in the style of `%g`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return non_finite(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = format!("{x:.5e}");
    let e: i32 = exp.rsplit('e').next().and_then(|s| s.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&e) {
        let fixed = format!("{:.*}", (5 - e) as usize, x);
        trim_zeros(&fixed)
    } else {
        let (mantissa, power) = exp.split_once('e').unwrap_or((&exp, "0"));
        format!("{}e{}", trim_zeros(mantissa), power)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn non_finite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A float that serializes with 17 significant digits, or `null` when not finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| CliError::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Builds CSV text with a fixed header.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(csv_error)?;
        Ok(CsvTable { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_error)
    }

    pub fn finish(self) -> Result<String> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| CliError::usage(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Aligned plain-text table.
#[derive(Default)]
pub struct PrettyTable {
    rows: Vec<Vec<String>>,
}

impl PrettyTable {
    pub fn new(header: &[&str]) -> Self {
        PrettyTable { rows: vec![header.iter().map(|s| s.to_string()).collect()] }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.rows.push(fields);
    }

    pub fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols)
            .map(|c| self.rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            let line: Vec<String> = row.iter().zip(&widths).map(|(f, w)| format!("{f:>w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}

/// Where a rendered document goes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    /// Resolves `--out` against the output-directory override.
    pub fn resolve(out: Option<&Path>, out_dir: Option<&Path>) -> Sink {
        match (out, out_dir) {
            (None, _) => Sink::Stdout,
            (Some(p), Some(dir)) if p.is_relative() => Sink::File(dir.join(p)),
            (Some(p), _) => Sink::File(p.to_path_buf()),
        }
    }

    pub fn emit(&self, text: &str) -> Result<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
            Sink::File(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: path.clone(), source })?;
                }
                fs::write(path, text).map_err(|source| CliError::Write { path: path.clone(), source })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig17(1.0), "1.0000000000000000e0");
        assert_eq!(sig17(-0.1), "-1.0000000000000001e-1");
        assert_eq!(sig17(f64::NAN), "nan");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(2.0 / std::f64::consts::PI.sqrt()), "1.12838");
        assert_eq!(sig6(-0.59511432), "-0.595114");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(3.2e-7), "3.2e-7");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn json_numbers() {
        let s = serde_json::to_string(&[Num(0.5), Num(f64::INFINITY)]).unwrap();
        assert_eq!(s, "[5.0000000000000000e-1,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Some(0.5), None]);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = CsvTable::new(&["a", "b"]).unwrap();
        t.row(["1", "x,y"]).unwrap();
        assert_eq!(t.finish().unwrap(), "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn out_dir_applies_to_relative_paths() {
        let dir = Path::new("/tmp/o");
        assert_eq!(Sink::resolve(Some(Path::new("r.csv")), Some(dir)), Sink::File(dir.join("r.csv")));
        assert_eq!(Sink::resolve(Some(Path::new("/a/r.csv")), Some(dir)), Sink::File("/a/r.csv".into()));
        assert_eq!(Sink::resolve(None, Some(dir)), Sink::Stdout);
    }

    #[test]
    fn formats_from_extension() {
        assert_eq!(Format::from_path(Path::new("x.json")), Some(Format::Json));
        assert_eq!(Format::from_path(Path::new("x.dat")), None);
    }
}
