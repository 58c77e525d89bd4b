//! Merges command-line flags with an optional JSON config file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::Failure;

pub const DEFAULT_SEED: u64 = 0;

pub struct Settings {
    config: Map<String, Value>,
    seed: u64,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// A config is a JSON object of parameters. A run manifest is accepted
    /// too: its `params`, `seed` and primary output are used.
    pub fn load(path: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self, Failure> {
        let mut config = Map::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let Value::Object(mut obj) = value else {
                return Err(Failure::Input(format!("{}: expected a JSON object", path.display())));
            };
            if let Some(Value::Object(params)) = obj.remove("params") {
                for key in ["seed", "out"] {
                    if let Some(v) = obj.remove(key) {
                        config.insert(key.into(), v);
                    }
                }
                config.extend(params);
            } else {
                config = obj;
            }
        }
        let mut s = Self {
            config,
            seed: DEFAULT_SEED,
            out: None,
        };
        s.seed = s.pick(seed, "seed", DEFAULT_SEED)?;
        s.out = s.pick_opt(out, "out")?;
        Ok(s)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Flag if given, else config entry, else `default`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.config.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Failure::Input(format!("config key `{key}`: {e}"))),
        }
    }
}
