//! JSON run configs.
//!
//! Every key carries its unit as a suffix. Unknown keys are rejected and
//! omitted keys take their defaults, so `{}` is a complete config.

use std::path::{Path, PathBuf};

use kiq_core::ensemble::linear_grid;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{CliError, Result};

pub struct Loaded<T> {
    pub config: T,
    /// The config document exactly as read, minus surrounding whitespace.
    pub raw: Box<RawValue>,
    /// Directory that relative input paths resolve against.
    pub base_dir: PathBuf,
}

impl<T> Loaded<T> {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (config, raw) = parse(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, raw, base_dir })
}

/// Parses a config document; errors name the line, column and key path.
pub fn parse<T: DeserializeOwned>(text: &str) -> std::result::Result<(T, Box<RawValue>), String> {
    let raw: Box<RawValue> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut de = serde_json::Deserializer::from_str(raw.get());
    let config = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.into_inner().to_string()
        } else {
            format!("key `{path}`: {}", e.into_inner())
        }
    })?;
    Ok((config, raw))
}

/// `n` evenly spaced samples from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Grid {
    pub const fn new(start: f64, stop: f64, n: usize) -> Self {
        Self { start, stop, n }
    }

    pub fn points(&self, key: &str) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Err(CliError::Config(format!("{key}: empty sweep axis")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(format!("{key}: grid bounds must be finite")));
        }
        if self.n > 1 && self.stop <= self.start {
            return Err(CliError::Config(format!(
                "{key}: grid stop {} must exceed start {}",
                self.stop, self.start
            )));
        }
        Ok(linear_grid(self.start, self.stop, self.n))
    }
}

/// Fluxonium energies in GHz and the reduced external flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitConfig {
    #[serde(rename = "E_J_GHz")]
    pub e_j_ghz: f64,
    #[serde(rename = "E_C_GHz")]
    pub e_c_ghz: f64,
    #[serde(rename = "E_L_GHz")]
    pub e_l_ghz: f64,
    pub phi_ext_frac: f64,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            e_j_ghz: 10.0,
            e_c_ghz: 4.0,
            e_l_ghz: 1.0,
            phi_ext_frac: 0.5,
        }
    }
}
