//! `key=value` configuration files, one setting per line.
//!
//! Keys are the CLI long-flag names; `_` and `-` are interchangeable. Blank
//! lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type ConfigMap = BTreeMap<String, String>;

pub fn parse_config(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::Config {
            line: i + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(err("empty key".into()));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let m =
            parse_config("# budget\nhorizon = 1000\n\nfcfs_baselines=true\n--seed=7\n").unwrap();
        assert_eq!(m["horizon"], "1000");
        assert_eq!(m["fcfs-baselines"], "true");
        assert_eq!(m["seed"], "7");
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            parse_config("a=1\nnonsense"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(parse_config("a=1\na=2").is_err());
        assert!(parse_config("=2").is_err());
    }
}
