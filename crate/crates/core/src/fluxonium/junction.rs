//! Spin-dependent Josephson energy of a granular-aluminium nanojunction.
//!
//! The junction is a cube whose local gap follows the total field
//! `B_par x_hat + B_dipole(r)`. Its Josephson energy scales with the volume
//! integral of the gap, normalised so that a vanishing spin field returns the
//! nominal circuit value at the given bias.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{solve_fluxonium, FluxoniumParams};
use crate::error::{Error, Result};
use crate::physics::{dipole_field, gap_ratio_from_magnitude, DipoleMoment, MaterialParams, Polarity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NanojunctionGeometry {
    /// Cube edge length (m).
    pub edge: f64,
    /// Cube centre (m).
    pub center: Vector3<f64>,
    /// Midpoint-rule nodes per axis.
    pub grid_n: usize,
}

impl Default for NanojunctionGeometry {
    fn default() -> Self {
        Self {
            edge: 20e-9,
            center: Vector3::zeros(),
            grid_n: 16,
        }
    }
}

impl NanojunctionGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.edge > 0.0) || !self.edge.is_finite() {
            return Err(Error::NonPositive {
                name: "junction edge",
                value: self.edge,
            });
        }
        if self.grid_n < 2 {
            return Err(Error::InvalidInput(format!(
                "junction grid needs at least 2 nodes per axis, got {}",
                self.grid_n
            )));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput("junction centre must be finite".into()));
        }
        Ok(())
    }

    /// Node `(i, j, k)` of the midpoint grid.
    pub fn node(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        let h = self.edge / self.grid_n as f64;
        let offset = |n: usize| (n as f64 + 0.5) * h - 0.5 * self.edge;
        self.center + Vector3::new(offset(i), offset(j), offset(k))
    }
}

/// A single spin above a nanojunction fluxonium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinReadoutScenario {
    /// Spin moment; its polarity is overridden per evaluation.
    pub moment: DipoleMoment,
    /// Height of the spin above the junction's top face (m).
    pub distance_d: f64,
    /// In-plane bias field along x (T).
    pub b_par: f64,
    pub material: MaterialParams,
    /// Circuit at zero spin field.
    pub circuit: FluxoniumParams,
    pub junction: NanojunctionGeometry,
    /// In-plane (x, y) offset of the spin from the junction axis (m).
    pub lateral_offset: [f64; 2],
    /// Oscillator basis size for the fluxonium solves.
    pub basis_dim: usize,
}

impl SpinReadoutScenario {
    /// 10 mu_B in-plane spin over a default junction, 1.5 T critical field.
    pub fn new(circuit: FluxoniumParams, distance_d: f64, b_par: f64) -> Result<Self> {
        let s = Self {
            moment: DipoleMoment::in_plane(10.0, Polarity::Up)?,
            distance_d,
            b_par,
            material: MaterialParams::default(),
            circuit,
            junction: NanojunctionGeometry::default(),
            lateral_offset: [0.0, 0.0],
            basis_dim: 120,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn spin_position(&self) -> Vector3<f64> {
        self.junction.center
            + Vector3::new(
                self.lateral_offset[0],
                self.lateral_offset[1],
                0.5 * self.junction.edge + self.distance_d,
            )
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.circuit.validate()?;
        self.junction.validate()?;
        if !(self.distance_d >= 0.0) || !self.distance_d.is_finite() {
            return Err(Error::InvalidInput(format!(
                "spin distance must be >= 0, got {}",
                self.distance_d
            )));
        }
        if !self.b_par.is_finite() || self.b_par.abs() >= self.material.b_c {
            return Err(Error::FieldExceedsCritical {
                field: self.b_par.abs(),
                critical: self.material.b_c,
            });
        }
        Ok(())
    }
}

/// Josephson energy (Hz) with the spin in state `polarity`.
///
/// Midpoint-rule average of `Delta(B_par + B_spin(r)) / Delta(B_par)` over
/// the cube. Each node contributes its deviation from one, evaluated without
/// cancellation, so the result equals the nominal E_J exactly when the spin
/// field underflows against the bias.
pub fn nanojunction_ej(scenario: &SpinReadoutScenario, polarity: Polarity) -> Result<f64> {
    scenario.validate()?;
    let b_c = scenario.material.b_c;
    let b0 = scenario.b_par;
    let s0 = gap_ratio_from_magnitude(b0.abs(), b_c)?;
    let moment = scenario.moment.with_polarity(polarity);
    let spin = scenario.spin_position();
    let n = scenario.junction.grid_n;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = scenario.junction.node(i, j, k) - spin;
                let b = dipole_field(&moment, &r)?.0;
                let total = Vector3::new(b0 + b.x, b.y, b.z);
                let s = gap_ratio_from_magnitude(total.norm(), b_c).map_err(|_| Error::NodeExceedsCritical {
                    node: [i, j, k],
                    field: total.norm(),
                })?;
                // |B0 + b|^2 - |B0|^2 without forming either square
                let excess = 2.0 * b0 * b.x + b.norm_squared();
                sum += -excess / (b_c * b_c) / ((s + s0) * s0);
            }
        }
    }
    let mean_deviation = sum / (n * n * n) as f64;
    Ok(scenario.circuit.e_j * (1.0 + mean_deviation))
}

/// Both Josephson energies `(E_J up, E_J down)`.
pub fn nanojunction_ej_pair(scenario: &SpinReadoutScenario) -> Result<(f64, f64)> {
    Ok((
        nanojunction_ej(scenario, Polarity::Up)?,
        nanojunction_ej(scenario, Polarity::Down)?,
    ))
}

/// Qubit frequency change `f_q(E_J up) - f_q(E_J down)` for a spin flip (Hz).
pub fn spin_flip_shift(scenario: &SpinReadoutScenario) -> Result<f64> {
    let (ej_up, ej_down) = nanojunction_ej_pair(scenario)?;
    let up = solve_fluxonium(&scenario.circuit.with_e_j(ej_up), scenario.basis_dim)?;
    let down = solve_fluxonium(&scenario.circuit.with_e_j(ej_down), scenario.basis_dim)?;
    Ok(up.f_q() - down.f_q())
}
