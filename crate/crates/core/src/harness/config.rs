//! `key = value` configuration files.
//!
//! One setting per line, `#` starts a comment, keys use the long CLI flag
//! names without the leading dashes (`qmax = 32768`, `ebno = 4, 5, 6`).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::{HarnessError, SimConfig};
use crate::decoders::DecoderKind;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyValues(pub BTreeMap<String, String>);

pub fn parse_key_values(text: &str) -> Result<KeyValues, HarnessError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", i + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(KeyValues(map))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad value `{value}` for `{key}`")))
}

/// Parses a list of dB values separated by commas and/or whitespace.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, HarnessError> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl KeyValues {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError> {
        self.get(key).map(|v| parse(key, v)).transpose()
    }
}

impl SimConfig {
    /// Overrides fields present in `kv`. Keys outside the simulation
    /// settings are left for the caller.
    pub fn apply_key_values(&mut self, kv: &KeyValues) -> Result<(), HarnessError> {
        if let Some(v) = kv.get("code") {
            self.code = v.to_string();
        }
        if let Some(v) = kv.get("decoder") {
            self.decoder.kind = DecoderKind::from_str(v).map_err(HarnessError::Config)?;
        }
        if let Some(v) = kv.get_parsed("qmax")? {
            self.decoder.q_max = v;
        }
        if let Some(v) = kv.get_parsed("cmax")? {
            self.decoder.c_max = v;
        }
        if let Some(v) = kv.get_parsed("threshold")? {
            self.decoder.epsilon_t = v;
        }
        if let Some(v) = kv.get_parsed("theta")? {
            self.decoder.theta = v;
        }
        if let Some(v) = kv.get_parsed("strict-eq3")? {
            self.decoder.strict_eq3 = v;
        }
        if let Some(v) = kv.get("ebno") {
            self.ebno_db = parse_list("ebno", v)?;
        }
        if let Some(v) = kv.get_parsed("seed")? {
            self.seed = v;
        }
        if let Some(v) = kv.get_parsed("workers")? {
            self.workers = v;
        }
        if let Some(v) = kv.get_parsed("min-errors")? {
            self.min_block_errors = v;
        }
        if let Some(v) = kv.get_parsed("max-trials")? {
            self.max_trials = v;
        }
        if let Some(v) = kv.get("out") {
            self.out_dir = Some(PathBuf::from(v));
        }
        Ok(())
    }
}
