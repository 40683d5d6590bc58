//! `key = value` run configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};

/// Keys accepted in a config file.
pub const KEYS: [&str; 11] = ["p", "e", "modulus", "format", "jobs", "cap", "seed", "n_min", "n_max", "lemma", "epsilon"];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {}: expected key = value", lineno + 1);
            };
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                bail!("config line {}: unknown key {k:?}", lineno + 1);
            }
            map.insert(k, v.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    /// Parsed value for `key`, if present.
    pub fn get<T>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| anyhow::anyhow!("config key {key}: {e}")),
        }
    }
}

/// `"1,0,1"` as a residue list, constant term first.
pub fn parse_residues(s: &str) -> anyhow::Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().with_context(|| format!("bad residue {x:?} in modulus")))
        .collect()
}
