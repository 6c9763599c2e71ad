//! `kiq synthesize`: seeded forward-model field sweep.

use kiq_core::ensemble::{synthesize_sweep, AvoidedCrossing, EnsembleParams};
use kiq_core::io::write_sweep;
use serde::{Deserialize, Serialize};

use super::{to_value, Outcome};
use crate::config::{Grid, Loaded};
use crate::error::{CliError, Result};

pub const CSV_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesizeConfig {
    pub g: f64,
    #[serde(rename = "T_S_K")]
    pub t_s_k: f64,
    /// Magnitude of the magnetization shift at saturation.
    #[serde(rename = "saturation_shift_Hz")]
    pub saturation_shift_hz: f64,
    #[serde(rename = "c2_Hz_per_T2")]
    pub c2_hz_per_t2: f64,
    #[serde(rename = "f_r0_Hz")]
    pub f_r0_hz: f64,
    #[serde(rename = "B_par_T")]
    pub b_par_t: Grid,
    #[serde(rename = "noise_Hz")]
    pub noise_hz: f64,
    pub seed: u64,
    pub artifacts: Vec<ArtifactConfig>,
}

/// A transversely coupled spin species producing an avoided crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactConfig {
    pub g: f64,
    #[serde(rename = "coupling_Hz")]
    pub coupling_hz: f64,
}

impl Default for SynthesizeConfig {
    fn default() -> Self {
        let e = EnsembleParams::default();
        Self {
            g: e.g,
            t_s_k: e.t_s,
            saturation_shift_hz: e.beta * e.f_r0,
            c2_hz_per_t2: e.c2,
            f_r0_hz: e.f_r0,
            b_par_t: Grid::new(0.0, 0.6, 121),
            noise_hz: 0.0,
            seed: 0,
            artifacts: Vec::new(),
        }
    }
}

impl SynthesizeConfig {
    pub fn ensemble(&self) -> EnsembleParams {
        EnsembleParams {
            g: self.g,
            t_s: self.t_s_k,
            beta: self.saturation_shift_hz / self.f_r0_hz,
            c2: self.c2_hz_per_t2,
            f_r0: self.f_r0_hz,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizeSummary {
    pub points: usize,
    #[serde(rename = "f_r0_Hz")]
    pub f_r0: f64,
    #[serde(rename = "noise_Hz")]
    pub noise: f64,
}

pub fn run(loaded: &Loaded<SynthesizeConfig>, seed: Option<u64>) -> Result<Outcome> {
    let cfg = &loaded.config;
    let seed = seed.unwrap_or(cfg.seed);
    let grid = cfg.b_par_t.points("B_par_T")?;
    let artifacts: Vec<AvoidedCrossing> = cfg
        .artifacts
        .iter()
        .map(|a| AvoidedCrossing {
            g: a.g,
            coupling: a.coupling_hz,
        })
        .collect();
    let trace = synthesize_sweep(&cfg.ensemble(), &grid, cfg.noise_hz, seed, &artifacts)?;
    let mut csv = Vec::new();
    write_sweep(&mut csv, &trace).map_err(|e| CliError::Io(e.to_string()))?;
    let summary = SynthesizeSummary {
        points: trace.len(),
        f_r0: trace.f_r0(),
        noise: cfg.noise_hz,
    };
    Ok(Outcome {
        payload: to_value(&summary)?,
        files: vec![(CSV_FILE, csv)],
        errors: Vec::new(),
        seed: Some(seed),
    })
}
