//! Run configuration: defaults, then a `key = value` file, then flags.

use std::path::Path;

use qgkpz::rules::EnumConfig;
use qgkpz::trees::Degree;
use qgkpz::{Error, Result};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub alpha: Degree,
    pub kappa: Degree,
    pub max_param: u32,
    pub max_noises: usize,
    pub format: Format,
    pub mollifier: String,
}

impl Default for Config {
    fn default() -> Self {
        let e = EnumConfig::default();
        Config { alpha: e.alpha, kappa: e.kappa, max_param: e.max_param, max_noises: 3, format: Format::Text, mollifier: "poly".into() }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value {value:?} for {key}"))
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "alpha" => self.alpha = value.parse().map_err(|_| bad(key, value))?,
            "kappa" => self.kappa = value.parse().map_err(|_| bad(key, value))?,
            "max_param" => self.max_param = value.parse().map_err(|_| bad(key, value))?,
            "max_noises" => self.max_noises = value.parse().map_err(|_| bad(key, value))?,
            "format" => {
                self.format = match value {
                    "text" => Format::Text,
                    "json" => Format::Json,
                    _ => return Err(bad(key, value)),
                }
            }
            "mollifier" => self.mollifier = value.to_string(),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Lines of `key = value`; blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn enum_config(&self, noises: impl IntoIterator<Item = usize>) -> Result<EnumConfig> {
        let cfg = EnumConfig { alpha: self.alpha, kappa: self.kappa, noise_counts: noises.into_iter().collect(), max_param: self.max_param };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha.to_string(),
            "kappa": self.kappa.to_string(),
            "maxParam": self.max_param,
            "maxNoises": self.max_noises,
            "format": if self.format == Format::Json { "json" } else { "text" },
            "mollifier": self.mollifier,
        })
    }
}
