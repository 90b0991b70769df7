//! Optional `key=value` configuration file. Flags given on the command line
//! take precedence over its entries.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, Result};

/// Keys accepted in a configuration file.
pub const KEYS: &[&str] = &[
    "format",
    "out",
    "threads",
    "precision",
    "mu-range",
    "mu-step",
    "z-range",
    "z-step",
    "refine-depth",
    "sign-tolerance",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key=value", n + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("line {}: unknown key '{key}'", n + 1)));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The flag value if present, else the parsed file entry.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(v) => parse(v)
                .map(Some)
                .ok_or_else(|| CliError::usage(format!("config: invalid value '{v}' for {key}"))),
        }
    }
}

/// Parses `lo:hi`.
pub fn parse_range(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once(':')?;
    let lo: f64 = a.trim().parse().ok()?;
    let hi: f64 = b.trim().parse().ok()?;
    (lo.is_finite() && hi.is_finite()).then_some((lo, hi))
}
