//! `kiq fitres`: notch-resonator fit of a complex S21 trace.

use std::path::PathBuf;

use kiq_core::io::read_trace_file;
use kiq_core::spectro::{fit_resonance, ResonanceFit, ResonanceModel};
use serde::{Deserialize, Serialize};

use super::{to_value, Outcome};
use crate::config::Loaded;
use crate::error::{CliError, Result};
use crate::output::render_json;

pub const JSON_FILE: &str = "resonance.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitresConfig {
    /// Trace CSV with `freq_Hz,re,im`; relative paths resolve against the config's directory.
    pub input_csv: Option<PathBuf>,
    pub guess: Option<GuessConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessConfig {
    #[serde(rename = "f_r_Hz")]
    pub f_r_hz: f64,
    #[serde(rename = "Q_i")]
    pub q_i: f64,
    #[serde(rename = "Q_c")]
    pub q_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceValues {
    #[serde(rename = "f_r_Hz")]
    pub f_r: f64,
    #[serde(rename = "Q_i")]
    pub q_i: f64,
    #[serde(rename = "Q_c")]
    pub q_c: f64,
    /// Impedance-mismatch rotation of the dip circle.
    pub phi0_rad: f64,
    pub amp: f64,
    /// Environmental phase at the trace centre.
    pub alpha_rad: f64,
    pub delay_s: f64,
}

/// `resonance.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceRecord {
    pub points: usize,
    pub model: ResonanceValues,
    pub sigma: ResonanceValues,
    #[serde(rename = "Q_l")]
    pub q_l: f64,
    pub iterations: usize,
    pub residual_rms: f64,
}

impl ResonanceRecord {
    pub fn new(fit: &ResonanceFit, points: usize) -> Self {
        let m = &fit.model;
        let s = &fit.sigma;
        Self {
            points,
            model: ResonanceValues {
                f_r: m.f_r,
                q_i: m.q_i,
                q_c: m.q_c,
                phi0_rad: m.phi0,
                amp: m.amp,
                alpha_rad: m.alpha,
                delay_s: m.delay,
            },
            sigma: ResonanceValues {
                f_r: s.f_r,
                q_i: s.q_i,
                q_c: s.q_c,
                phi0_rad: s.phi0,
                amp: s.amp,
                alpha_rad: s.alpha,
                delay_s: s.delay,
            },
            q_l: m.q_l(),
            iterations: fit.iterations,
            residual_rms: fit.residual_rms,
        }
    }

    pub fn to_model(&self) -> ResonanceModel {
        let v = &self.model;
        ResonanceModel {
            f_r: v.f_r,
            q_i: v.q_i,
            q_c: v.q_c,
            phi0: v.phi0_rad,
            amp: v.amp,
            alpha: v.alpha_rad,
            delay: v.delay_s,
        }
    }
}

pub fn run(loaded: &Loaded<FitresConfig>, _seed: Option<u64>) -> Result<Outcome> {
    let cfg = &loaded.config;
    let input = cfg
        .input_csv
        .as_deref()
        .ok_or_else(|| CliError::Config("input_csv is required".into()))?;
    let path = loaded.resolve(input);
    let trace = read_trace_file(&path).map_err(|e| CliError::in_file(&path, e))?;
    let guess = cfg
        .guess
        .map(|g| ResonanceModel::new(g.f_r_hz, g.q_i, g.q_c))
        .transpose()?;
    let fit = fit_resonance(&trace, guess.as_ref()).map_err(|e| CliError::in_file(&path, e))?;
    let record = ResonanceRecord::new(&fit, trace.len());
    Ok(Outcome {
        payload: to_value(&record)?,
        files: vec![(JSON_FILE, render_json(&record)?)],
        errors: Vec::new(),
        seed: None,
    })
}
