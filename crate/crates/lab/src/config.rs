//! Flat `key = value` configuration files.
//!
//! Keys are long flag names; `-` and `_` are interchangeable. Blank lines
//! and lines starting with `#` are skipped.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{LabError, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (usize, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| LabError::Config {
                line: i + 1,
                msg: format!("expected key = value, got `{line}`"),
            })?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(LabError::Config { line: i + 1, msg: "empty key".into() });
            }
            let value = v.trim().trim_matches('"').to_string();
            if entries.insert(key.clone(), (i + 1, value)).is_some() {
                return Err(LabError::Config { line: i + 1, msg: format!("duplicate key `{key}`") });
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        ConfigFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(|(_, v)| v.as_str())
    }

    /// Rejects keys outside `known`.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (k, (line, _)) in &self.entries {
            if !known.iter().any(|x| normalize(x) == *k) {
                return Err(LabError::Config { line: *line, msg: format!("unknown key `{k}`") });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let c = ConfigFile::parse("# plan\nmodel = cbst\nmax_leaves=5\n\np = \"1/2\"\n").unwrap();
        assert_eq!(c.get("model"), Some("cbst"));
        assert_eq!(c.get("max-leaves"), Some("5"));
        assert_eq!(c.get("p"), Some("1/2"));
        assert!(c.check_keys(&["model", "max-leaves", "p"]).is_ok());
        assert!(c.check_keys(&["model"]).is_err());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(ConfigFile::parse("model cbst"), Err(LabError::Config { line: 1, .. })));
        assert!(ConfigFile::parse("a=1\na=2").is_err());
    }
}
