//! Flat key=value configuration files shared by all subcommands.
//!
//! Each command consumes exactly the keys it understands and rejects the
//! rest, so a misspelled key fails loudly instead of silently falling back
//! to a default.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

/// Parsed configuration entries, handed out one key at a time.
#[derive(Debug)]
pub struct KeyValues {
    entries: HashMap<String, String>,
}

impl KeyValues {
    pub fn empty() -> Self {
        Self {
            entries: HashMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|error| format!("{}: {error}", path.display()))?;
        let mut entries = HashMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "{} line {}: expected key=value",
                    path.display(),
                    index + 1
                ));
            };
            let key = key.trim().to_string();
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(format!(
                    "{} line {}: duplicate key '{key}'",
                    path.display(),
                    index + 1
                ));
            }
        }
        Ok(Self { entries })
    }

    /// Removes and parses a key; an absent key yields the default.
    pub fn take<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, String> {
        match self.entries.remove(key) {
            None => Ok(default),
            Some(text) => text
                .parse()
                .map_err(|_| format!("config key '{key}': cannot parse '{text}'")),
        }
    }

    /// Fails on any key no take() consumed.
    pub fn finish(self) -> Result<(), String> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let mut leftover: Vec<String> = self.entries.into_keys().collect();
        leftover.sort();
        Err(format!("unknown config keys: {}", leftover.join(", ")))
    }
}
