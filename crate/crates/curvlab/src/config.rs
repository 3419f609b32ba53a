//! `key = value` config files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value   # trailing comment
//! ```
//!
//! Keys are the long flag names without the leading dashes (`_` and `-`
//! are interchangeable). Blank lines are ignored, a key may appear once,
//! and values are taken verbatim after trimming. A value cannot contain `#`.
//! Flags given on the command line override file values.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

fn normalise(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected `key = value`", k + 1)))?;
            let key = normalise(key);
            if key.is_empty() {
                return Err(CliError::Validation(format!("config line {}: empty key", k + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Validation(format!("config line {}: duplicate key `{key}`", k + 1)));
            }
        }
        Ok(Self { entries, used: RefCell::default() })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        let key = normalise(key);
        let v = self.entries.get(&key)?;
        self.used.borrow_mut().insert(key);
        Some(v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Validation(format!("config key `{key}`: cannot parse {v:?}"))),
        }
    }

    /// Flag value if given, else the file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => {
                // still mark the key as known
                let _ = self.raw(key);
                Ok(Some(v))
            }
            None => self.get(key),
        }
    }

    /// Keys present in the file that no lookup asked for.
    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.entries.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }

    /// Reject keys the current subcommand does not understand.
    pub fn finish(&self, command: &str) -> Result<(), CliError> {
        let unused = self.unused();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(format!("config keys not used by `{command}`: {}", unused.join(", "))))
        }
    }
}

/// Comma-separated list, e.g. `10,40,160`.
pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Validation(format!("{what}: cannot parse {t:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let c = ConfigFile::parse("# header\nfamily = c10\n\nn=4 # trailing\nr0_x = 0.5\n").unwrap();
        assert_eq!(c.get::<String>("family").unwrap().as_deref(), Some("c10"));
        assert_eq!(c.pick(Some(5usize), "n").unwrap(), Some(5));
        assert_eq!(c.get::<f64>("r0-x").unwrap(), Some(0.5));
        assert!(c.unused().is_empty());
        assert!(c.finish("example").is_ok());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("just text").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2").is_err());
        assert!(ConfigFile::parse(" = 3").is_err());
        let c = ConfigFile::parse("n = three").unwrap();
        assert!(c.get::<usize>("n").is_err());
    }

    #[test]
    fn reports_unknown_keys() {
        let c = ConfigFile::parse("n = 3\ncolour = red").unwrap();
        let _ = c.get::<usize>("n");
        assert_eq!(c.unused(), vec!["colour".to_string()]);
        assert!(c.finish("example").is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list::<f64>("10, 40,160", "i").unwrap(), vec![10.0, 40.0, 160.0]);
        assert!(parse_list::<f64>("", "i").unwrap().is_empty());
        assert!(parse_list::<f64>("1,x", "i").is_err());
    }
}
