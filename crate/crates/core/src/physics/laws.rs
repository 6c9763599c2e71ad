//! Closed-form material and spin laws.

use serde::{Deserialize, Serialize};

use super::constants::{H, K_B, MU_B};
use super::field::Vec3Field;
use crate::error::{Error, Result};

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Superconducting film parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Critical field (T).
    pub b_c: f64,
    /// Unperturbed kinetic inductance (H).
    pub l_kin0: f64,
    /// Nonlinearity current scale (A).
    pub i_star: f64,
    /// Kinetic inductance fraction, in (0, 1].
    pub alpha: f64,
}

impl MaterialParams {
    pub fn new(b_c: f64, l_kin0: f64, i_star: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            b_c,
            l_kin0,
            i_star,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("B_c", self.b_c)?;
        require_positive("L_kin0", self.l_kin0)?;
        require_positive("I_star", self.i_star)?;
        require_positive("alpha", self.alpha)?;
        if self.alpha > 1.0 {
            return Err(Error::InvalidInput(format!(
                "kinetic inductance fraction must be <= 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

impl Default for MaterialParams {
    /// Thin-film granular aluminium: B_c = 1.5 T, 1 nH, 1 uA, alpha = 1.
    fn default() -> Self {
        Self {
            b_c: 1.5,
            l_kin0: 1e-9,
            i_star: 1e-6,
            alpha: 1.0,
        }
    }
}

/// Local gap ratio `Delta(B) / Delta(0) = sqrt(1 - (|B| / B_c)^2)`.
pub fn gap_suppression_ratio(b_total: &Vec3Field, b_c: f64) -> Result<f64> {
    require_positive("B_c", b_c)?;
    gap_ratio_from_magnitude(b_total.magnitude(), b_c)
}

pub(crate) fn gap_ratio_from_magnitude(b: f64, b_c: f64) -> Result<f64> {
    if !(b <= b_c) {
        return Err(Error::FieldExceedsCritical {
            field: b,
            critical: b_c,
        });
    }
    let x = b / b_c;
    Ok((1.0 - x * x).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticInductance {
    pub henry: f64,
    /// Set when |I_p| > I*, where the quadratic expansion is no longer trustworthy.
    pub beyond_perturbative: bool,
}

/// `L_kin(I_p) = L_kin0 (1 + (I_p / I*)^2)`.
pub fn kinetic_inductance(i_p: f64, mat: &MaterialParams) -> KineticInductance {
    let ratio = i_p / mat.i_star;
    KineticInductance {
        henry: mat.l_kin0 * (1.0 + ratio * ratio),
        beyond_perturbative: i_p.abs() > mat.i_star,
    }
}

/// Thermal polarisation `tanh(g mu_B B / 2 k_B T)` of a spin-1/2 ensemble.
pub fn polarization(b_par: f64, g: f64, t_s: f64) -> f64 {
    (g * MU_B * b_par / (2.0 * K_B * t_s)).tanh()
}

/// `M = M_S tanh(g mu_B B / 2 k_B T_S)`.
pub fn paramagnetic_magnetization(b_par: f64, g: f64, t_s: f64, m_s: f64) -> Result<f64> {
    require_positive("spin temperature", t_s)?;
    require_positive("saturation magnetization", m_s)?;
    Ok(m_s * polarization(b_par, g, t_s))
}

/// Resonance field `B = h f / (g mu_B)`.
pub fn esr_field(f: f64, g: f64) -> Result<f64> {
    require_positive("frequency", f)?;
    require_positive("g-factor", g)?;
    Ok(H * f / (g * MU_B))
}

/// Zeeman frequency `f = g mu_B B / h`.
pub fn esr_frequency(b: f64, g: f64) -> Result<f64> {
    require_positive("field", b)?;
    require_positive("g-factor", g)?;
    Ok(g * MU_B * b / H)
}

/// `g_z = delta_omega / 2`.
pub fn longitudinal_coupling(delta_omega: f64) -> f64 {
    delta_omega / 2.0
}
