//! `key=value` config files. Flags override file values; the file supplies
//! defaults for anything the command line omits.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!(
                        "{}: line {}: expected key=value, found {line:?}",
                        path.display(),
                        idx + 1
                    );
                };
                entries.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(KvConfig { entries })
    }

    /// Resolves one setting: explicit flag, then config file, then default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: Option<T>,
    ) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(raw) = self.entries.get(key) {
            return raw
                .parse()
                .map_err(|_| anyhow::anyhow!("config key {key}: cannot parse {raw:?}"));
        }
        match default {
            Some(v) => Ok(v),
            None => bail!("missing required setting --{key} (flag or config file)"),
        }
    }
}
