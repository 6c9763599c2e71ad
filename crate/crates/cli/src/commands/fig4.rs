//! `kiq fig4`: spin-flip qubit shift table.

use kiq_core::fluxonium::{
    fig4c_sweep, solve_fluxonium, FluxoniumParams, NanojunctionGeometry, SpinReadoutScenario, MIN_BASIS_DIM,
};
use kiq_core::physics::{DipoleMoment, MaterialParams, Polarity};
use serde::{Deserialize, Serialize};

use super::{to_value, Outcome};
use crate::config::{CircuitConfig, Loaded};
use crate::envelope::RowError;
use crate::error::{CliError, Result};
use crate::output::{render_csv, Cell};

pub const CSV_FILE: &str = "fig4c.csv";
pub const CSV_HEADER: [&str; 3] = ["d_nm", "B_par_mT", "delta_fq_Hz"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig4Config {
    pub circuit: CircuitConfig,
    #[serde(rename = "moment_muB")]
    pub moment_mu_b: f64,
    #[serde(rename = "d_nm")]
    pub d_nm: Vec<f64>,
    #[serde(rename = "B_par_mT")]
    pub b_par_mt: Vec<f64>,
    pub junction_edge_nm: f64,
    /// Midpoint nodes per cube axis.
    pub grid_n: usize,
    pub lateral_offset_nm: [f64; 2],
    #[serde(rename = "B_c_T")]
    pub b_c_t: f64,
    pub basis_dim: usize,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Self {
            circuit: CircuitConfig::default(),
            moment_mu_b: 10.0,
            d_nm: (1..=10).map(|i| 10.0 * i as f64).collect(),
            b_par_mt: vec![100.0, 200.0, 500.0],
            junction_edge_nm: 20.0,
            grid_n: 16,
            lateral_offset_nm: [0.0, 0.0],
            b_c_t: 1.5,
            basis_dim: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Summary {
    /// Qubit frequency of the circuit without the spin.
    #[serde(rename = "circuit_f_q_Hz")]
    pub circuit_f_q: f64,
    pub cells: usize,
    pub failed: usize,
    #[serde(rename = "max_abs_delta_fq_Hz")]
    pub max_abs_delta_fq: Option<f64>,
}

pub fn run(loaded: &Loaded<Fig4Config>, _seed: Option<u64>) -> Result<Outcome> {
    let cfg = &loaded.config;
    if cfg.d_nm.is_empty() || cfg.b_par_mt.is_empty() {
        return Err(CliError::Config("empty sweep axis".into()));
    }
    if cfg.basis_dim < MIN_BASIS_DIM {
        return Err(CliError::Config(format!(
            "basis_dim must be at least {MIN_BASIS_DIM}, got {}",
            cfg.basis_dim
        )));
    }
    let c = cfg.circuit;
    let circuit = FluxoniumParams::from_ghz(c.e_j_ghz, c.e_c_ghz, c.e_l_ghz, c.phi_ext_frac)?;
    let material = MaterialParams {
        b_c: cfg.b_c_t,
        ..Default::default()
    };
    material.validate()?;
    let junction = NanojunctionGeometry {
        edge: cfg.junction_edge_nm * 1e-9,
        grid_n: cfg.grid_n,
        ..Default::default()
    };
    junction.validate()?;
    let template = SpinReadoutScenario {
        moment: DipoleMoment::in_plane(cfg.moment_mu_b, Polarity::Up)?,
        distance_d: 0.0,
        b_par: 0.0,
        material,
        circuit,
        junction,
        lateral_offset: cfg.lateral_offset_nm.map(|x| x * 1e-9),
        basis_dim: cfg.basis_dim,
    };
    let bare = solve_fluxonium(&circuit, cfg.basis_dim)?;

    let d: Vec<f64> = cfg.d_nm.iter().map(|x| x * 1e-9).collect();
    let b: Vec<f64> = cfg.b_par_mt.iter().map(|x| x * 1e-3).collect();
    let rows = fig4c_sweep(&template, &d, &b)?;

    let nb = b.len();
    let mut errors = Vec::new();
    let mut table = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let (d_nm, b_mt) = (cfg.d_nm[i / nb], cfg.b_par_mt[i % nb]);
        if let Some(msg) = &row.error {
            errors.push(RowError {
                row: Some(i),
                message: format!("d = {d_nm} nm, B_par = {b_mt} mT: {msg}"),
            });
        }
        table.push(vec![Cell::from(d_nm), Cell::from(b_mt), Cell::from(row.delta_fq)]);
    }
    let summary = Fig4Summary {
        circuit_f_q: bare.f_q(),
        cells: rows.len(),
        failed: errors.len(),
        max_abs_delta_fq: rows.iter().filter_map(|r| r.delta_fq).map(f64::abs).reduce(f64::max),
    };
    Ok(Outcome {
        payload: to_value(&summary)?,
        files: vec![(CSV_FILE, render_csv(&CSV_HEADER, table)?)],
        errors,
        seed: None,
    })
}
