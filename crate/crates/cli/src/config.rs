//! Flat `key=value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys are the long flag names
//! with `_` in place of `-`; a flag given on the command line wins over the
//! file, which wins over the built-in default.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "threads",
    "budget",
    "tolerance",
    "target",
    "restarts",
    "max_iterations",
    "smoothing_p",
    "smoothing_p_final",
    "step_size",
    "step_decay",
    "convergence_tol",
    "allow_nonconverged",
    "baseline_trials",
    "source",
    "import_dir",
    "trials",
    "noise_power",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!("config line {}: expected key=value", i + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            if values.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(CliError::usage(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config line {line}: bad value for `{key}`: {e}"))),
        }
    }

    /// `flag`, else the file's value for `key`, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}
