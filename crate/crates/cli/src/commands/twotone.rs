//! `kiq twotone`: steady-state two-tone map and the ESR ridge.

use kiq_core::ensemble::{steady_state_map, EnsembleParams, RateModelParams};
use kiq_core::physics::{esr_field, esr_frequency};
use serde::{Deserialize, Serialize};

use super::{to_value, Outcome};
use crate::config::{Grid, Loaded};
use crate::error::Result;
use crate::output::{render_csv, render_json, Cell};

pub const CSV_FILE: &str = "twotone.csv";
pub const CSV_HEADER: [&str; 3] = ["f_drive_Hz", "B_par_T", "dM_over_MS"];
pub const RIDGE_FILE: &str = "ridge.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoToneConfig {
    pub g: f64,
    #[serde(rename = "T_S_K")]
    pub t_s_k: f64,
    /// Gaussian sigma of the inhomogeneous ESR line.
    #[serde(rename = "sigma_inh_Hz")]
    pub sigma_inh_hz: f64,
    #[serde(rename = "f_drive_res_Hz")]
    pub f_drive_res_hz: f64,
    #[serde(rename = "kappa_Hz")]
    pub kappa_hz: f64,
    /// Peak saturation parameter on resonance.
    pub drive_strength: f64,
    #[serde(rename = "T1_s")]
    pub t1_s: f64,
    #[serde(rename = "f_drive_Hz")]
    pub f_drive_hz: Grid,
    #[serde(rename = "B_par_T")]
    pub b_par_t: Grid,
}

impl Default for TwoToneConfig {
    fn default() -> Self {
        let r = RateModelParams::default();
        Self {
            g: 1.83,
            t_s_k: 0.070,
            sigma_inh_hz: 0.25e6,
            f_drive_res_hz: r.f_drive_res,
            kappa_hz: r.kappa,
            drive_strength: r.drive_strength,
            t1_s: r.t1,
            f_drive_hz: Grid::new(9.834e9, 9.846e9, 61),
            b_par_t: Grid::new(0.3836, 0.3848, 601),
        }
    }
}

impl TwoToneConfig {
    pub fn ensemble(&self) -> EnsembleParams {
        EnsembleParams {
            g: self.g,
            t_s: self.t_s_k,
            sigma_inh: self.sigma_inh_hz,
            ..Default::default()
        }
    }

    pub fn rates(&self) -> RateModelParams {
        RateModelParams {
            f_drive_res: self.f_drive_res_hz,
            kappa: self.kappa_hz,
            drive_strength: self.drive_strength,
            t1: self.t1_s,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RidgePoint {
    #[serde(rename = "B_par_T")]
    pub b_par: f64,
    #[serde(rename = "f_Hz")]
    pub f: f64,
}

/// `ridge.json`: the ESR line `f = g mu_B B / h` on the map's field grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ridge {
    pub g: f64,
    pub points: Vec<RidgePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoToneSummary {
    /// Field where the ESR line meets the drive resonator.
    #[serde(rename = "crossing_B_T")]
    pub crossing_b: f64,
    /// Map row nearest the drive resonator.
    #[serde(rename = "drive_row_f_Hz")]
    pub drive_row_f: f64,
    /// Field of the largest response on that row; `None` when the row is flat zero.
    #[serde(rename = "peak_B_T")]
    pub peak_b: Option<f64>,
    #[serde(rename = "max_dM_over_MS")]
    pub max_response: f64,
}

pub fn run(loaded: &Loaded<TwoToneConfig>, _seed: Option<u64>) -> Result<Outcome> {
    let cfg = &loaded.config;
    let f_grid = cfg.f_drive_hz.points("f_drive_Hz")?;
    let b_grid = cfg.b_par_t.points("B_par_T")?;
    let map = steady_state_map(&cfg.ensemble(), &cfg.rates(), &f_grid, &b_grid)?;

    let ridge = Ridge {
        g: cfg.g,
        points: b_grid
            .iter()
            .map(|&b| Ok(RidgePoint { b_par: b, f: esr_frequency(b, cfg.g)? }))
            .collect::<Result<_>>()?,
    };
    let drive_row = (0..f_grid.len())
        .min_by(|&a, &b| {
            (f_grid[a] - cfg.f_drive_res_hz)
                .abs()
                .total_cmp(&(f_grid[b] - cfg.f_drive_res_hz).abs())
        })
        .unwrap_or(0);
    let row = &map.values[drive_row];
    let peak = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).filter(|&j| row[j] > 0.0);
    let summary = TwoToneSummary {
        crossing_b: esr_field(cfg.f_drive_res_hz, cfg.g)?,
        drive_row_f: f_grid[drive_row],
        peak_b: peak.map(|j| b_grid[j]),
        max_response: map.values.iter().flatten().copied().fold(0.0, f64::max),
    };

    let cells = f_grid.iter().enumerate().flat_map(|(i, &f)| {
        let values = &map.values[i];
        b_grid
            .iter()
            .zip(values)
            .map(move |(&b, &v)| vec![Cell::from(f), Cell::from(b), Cell::from(v)])
    });
    Ok(Outcome {
        payload: to_value(&summary)?,
        files: vec![
            (CSV_FILE, render_csv(&CSV_HEADER, cells)?),
            (RIDGE_FILE, render_json(&ridge)?),
        ],
        errors: Vec::new(),
        seed: None,
    })
}
