// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! The optional flat TOML settings file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;

use kolmoverify::{Error, Result};

pub fn load(path: &Path) -> Result<BTreeMap<String, toml::Value>> {
    let src = std::fs::read_to_string(path)?;
    let table: toml::Table = src.parse().map_err(|e: toml::de::Error| Error::Parse(format!("{}: {e}", path.display())))?;
    for (k, v) in &table {
        if v.is_table() {
            return Err(Error::Parse(format!("{}: `{k}` is a table; the config file is flat", path.display())));
        }
    }
    Ok(table.into_iter().collect())
}

/// Resolves a setting from a flag, then the file, then a default.
pub struct Resolver {
    file: BTreeMap<String, toml::Value>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, toml::Value>) -> Self {
        Self { file }
    }

    pub fn pick<T: DeserializeOwned>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::Parse(format!("config key `{key}`: {e}"))),
            None => Ok(default),
        }
    }

    /// A file value as JSON, for experiment parameters.
    pub fn file_json(&self, key: &str) -> Result<Option<serde_json::Value>> {
        self.file
            .get(key)
            .map(|v| serde_json::to_value(v).map_err(|e| Error::Parse(format!("config key `{key}`: {e}"))))
            .transpose()
    }
}
