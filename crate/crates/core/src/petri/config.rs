use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

/// Instance counts and timing values (in clock cycles) binding a model.
///
/// Counts and timings share one namespace: a key is a hierarchy count if the
/// model declares a hierarchy with that count parameter, otherwise a timing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Config {
    pub standard: String,
    pub params: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`")]
    Malformed { line: usize },
    #[error("line {line}: `{key}` must be a positive integer, got `{value}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: unsupported format version `{value}`")]
    Format { line: usize, value: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
}

/// Raw `key=value` entries of a flat text file, `#` comments stripped.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ConfigError::Malformed { line: i + 1 })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl Config {
    pub fn new(standard: impl Into<String>) -> Self {
        Self {
            standard: standard.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: u32) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn set(&mut self, key: &str, value: u32) {
        self.params.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<u32> {
        self.params.get(key).copied()
    }

    /// Parse a `.cfg` file. `preset=` lines are returned separately so the
    /// caller can merge a bundled preset underneath.
    pub fn parse(text: &str) -> Result<(Config, Option<String>), ConfigError> {
        let mut cfg = Config::default();
        let mut preset = None;
        for (line, key, value) in parse_kv(text)? {
            match key.as_str() {
                "format" => {
                    if value != "1" {
                        return Err(ConfigError::Format { line, value });
                    }
                }
                "standard" => cfg.standard = value,
                "preset" => preset = Some(value),
                _ => {
                    let v: u32 = value.parse().ok().filter(|&v| v >= 1).ok_or_else(|| {
                        ConfigError::BadValue {
                            line,
                            key: key.clone(),
                            value: value.clone(),
                        }
                    })?;
                    if cfg.params.insert(key.clone(), v).is_some() {
                        return Err(ConfigError::Duplicate { line, key });
                    }
                }
            }
        }
        Ok((cfg, preset))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("format=1\n");
        writeln!(out, "standard={}", self.standard).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }

    /// Entries of `other` override entries of `self`.
    pub fn overlay(&self, other: &Config) -> Config {
        let mut merged = self.clone();
        if !other.standard.is_empty() {
            merged.standard = other.standard.clone();
        }
        merged
            .params
            .extend(other.params.iter().map(|(k, v)| (k.clone(), *v)));
        merged
    }
}
