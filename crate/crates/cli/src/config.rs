//! Flat `key = value` configuration files.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment; blank
//! lines are ignored; keys are `[a-z0-9_]+` and may appear once. Vectors are
//! comma-separated numbers. Every key must be consumed by the command that
//! reads the file, so typos are reported rather than ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Vector3;
use shp_core::FourVector;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    source: Option<PathBuf>,
    entries: BTreeMap<String, Entry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ": key '{key}'")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::parse(&text).map_err(|mut e| {
            e.source = path.display().to_string();
            e
        })?;
        config.source = Some(path.to_path_buf());
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |key: Option<&str>, message: String| ConfigError {
                source: "<config>".into(),
                line: Some(line),
                key: key.map(str::to_owned),
                message,
            };
            let (key, value) = content.split_once('=').ok_or_else(|| err(None, format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(err(None, format!("invalid key '{key}'")));
            }
            if value.is_empty() {
                return Err(err(Some(key), "missing value".into()));
            }
            if let Some(previous) = entries.insert(key.to_owned(), Entry { value: value.to_owned(), line }) {
                return Err(err(Some(key), format!("duplicate key (first set on line {})", previous.line)));
            }
        }
        Ok(Self { source: None, entries })
    }

    fn source_name(&self) -> String {
        self.source.as_ref().map_or_else(|| "<config>".into(), |p| p.display().to_string())
    }

    fn error(&self, key: &str, line: Option<usize>, message: impl Into<String>) -> CliError {
        CliError::Config(ConfigError {
            source: self.source_name(),
            line,
            key: Some(key.to_owned()),
            message: message.into(),
        })
    }

    /// Removes `key` and parses its value.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        let Some(entry) = self.entries.remove(key) else {
            return Ok(None);
        };
        entry
            .value
            .parse()
            .map(Some)
            .map_err(|e| self.error(key, Some(entry.line), format!("cannot parse '{}': {e}", entry.value)))
    }

    pub fn take_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn take_list(&mut self, key: &str, len: usize) -> Result<Option<Vec<f64>>, CliError> {
        let Some(entry) = self.entries.remove(key) else {
            return Ok(None);
        };
        let values = parse_list(&entry.value, len).map_err(|m| self.error(key, Some(entry.line), m))?;
        Ok(Some(values))
    }

    pub fn take_vec3(&mut self, key: &str) -> Result<Option<Vector3<f64>>, CliError> {
        Ok(self.take_list(key, 3)?.map(|v| Vector3::new(v[0], v[1], v[2])))
    }

    pub fn take_four(&mut self, key: &str) -> Result<Option<FourVector>, CliError> {
        Ok(self.take_list(key, 4)?.map(|v| FourVector::new(v[0], v[1], v[2], v[3])))
    }

    /// Drops `key` because a command-line flag supersedes it.
    pub fn overridden(&mut self, key: &str) {
        self.entries.remove(key);
    }

    /// Fails on the first key no command consumed.
    pub fn finish(self) -> Result<(), CliError> {
        match self.entries.iter().min_by_key(|(_, e)| e.line) {
            Some((key, entry)) => Err(self.error(key, Some(entry.line), "unknown key")),
            None => Ok(()),
        }
    }

    /// An error attributed to `key` after it was taken.
    pub fn invalid(&self, key: &str, message: impl Into<String>) -> CliError {
        self.error(key, None, message)
    }
}

/// Parses `len` comma-separated finite numbers.
pub fn parse_list(text: &str, len: usize) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|part| part.trim().parse::<f64>().map_err(|e| format!("cannot parse '{}': {e}", part.trim())))
        .collect::<Result<_, _>>()?;
    if values.len() != len {
        return Err(format!("expected {len} comma-separated numbers, got {}", values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let mut c = ConfigFile::parse("# header\n\nseed = 7  # trailing\nk1_dir = 0, 0, 1\n").unwrap();
        assert_eq!(c.take::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.take_vec3("k1_dir").unwrap(), Some(Vector3::z()));
        assert_eq!(c.take::<u64>("seed").unwrap(), None);
        c.finish().unwrap();
    }

    #[test]
    fn overridden_keys_are_consumed() {
        let mut c = ConfigFile::parse("samples = 10\n").unwrap();
        c.overridden("samples");
        c.finish().unwrap();
    }

    #[test]
    fn reports_line_and_key() {
        let e = ConfigFile::parse("a = 1\nb 2\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = ConfigFile::parse("a = 1\na = 2\n").unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(2), Some("a")));
        let e = ConfigFile::parse("A = 1").unwrap_err();
        assert!(e.message.contains("invalid key"));

        let mut c = ConfigFile::parse("x = 1\nsamples = many\n").unwrap();
        let msg = c.take::<usize>("samples").unwrap_err().to_string();
        assert!(msg.contains(":2") && msg.contains("samples"), "{msg}");
        let msg = c.finish().unwrap_err().to_string();
        assert!(msg.contains("'x'") && msg.contains("unknown key"), "{msg}");
    }

    #[test]
    fn list_validation() {
        assert!(parse_list("1, 2", 3).is_err());
        assert!(parse_list("1, x, 3", 3).is_err());
        assert!(parse_list("1, inf, 3", 3).is_err());
        assert_eq!(parse_list("1,2,3,4", 4).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    }
}
