//! Fluxonium spectrum in the eigenbasis of its harmonic part.
//!
//! `H = 4 E_C n^2 + E_L (phi - phi_ext)^2 / 2 - E_J cos(phi)`. With
//! `phi = phi_ext + theta (a + a^dag)` the quadratic part is an oscillator of
//! frequency `sqrt(8 E_L E_C)` and `theta = (2 E_C / E_L)^(1/4)`. The cosine
//! is assembled from the closed-form matrix elements of the displacement
//! operator `exp(i theta (a + a^dag))`, which are Gaussian-damped associated
//! Laguerre polynomials, so no truncation error enters the matrix itself.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest basis accepted by [`solve_fluxonium`].
pub const MIN_BASIS_DIM: usize = 20;
/// Basis increment used for the convergence check.
pub const CONVERGENCE_STEP: usize = 20;
/// Relative change of f_q between successive bases below which a spectrum counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-9;

/// Circuit energies in frequency units (E / h, Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumParams {
    pub e_j: f64,
    pub e_c: f64,
    pub e_l: f64,
    /// External flux in units of the flux quantum.
    pub phi_ext_frac: f64,
}

impl FluxoniumParams {
    pub fn new(e_j: f64, e_c: f64, e_l: f64, phi_ext_frac: f64) -> Result<Self> {
        let p = Self {
            e_j,
            e_c,
            e_l,
            phi_ext_frac,
        };
        p.validate()?;
        Ok(p)
    }

    /// From energies given in GHz.
    pub fn from_ghz(e_j: f64, e_c: f64, e_l: f64, phi_ext_frac: f64) -> Result<Self> {
        Self::new(e_j * 1e9, e_c * 1e9, e_l * 1e9, phi_ext_frac)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("E_C", self.e_c), ("E_L", self.e_l)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if !(self.e_j >= 0.0) || !self.e_j.is_finite() {
            return Err(Error::InvalidInput(format!("E_J must be >= 0, got {}", self.e_j)));
        }
        if !self.phi_ext_frac.is_finite() {
            return Err(Error::InvalidInput("external flux must be finite".into()));
        }
        Ok(())
    }

    pub fn with_e_j(mut self, e_j: f64) -> Self {
        self.e_j = e_j;
        self
    }

    /// Plasma frequency of the quadratic part, `sqrt(8 E_L E_C)`.
    pub fn oscillator_frequency(&self) -> f64 {
        (8.0 * self.e_l * self.e_c).sqrt()
    }

    /// Zero-point phase spread `(2 E_C / E_L)^(1/4)`.
    pub fn phase_zpf(&self) -> f64 {
        (2.0 * self.e_c / self.e_l).sqrt().sqrt()
    }
}

/// Sorted eigenvalues (Hz) of a truncated fluxonium Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub basis_dim: usize,
    /// Whether f_q moved by less than [`CONVERGENCE_TOL`] (relative) when the
    /// basis grew by [`CONVERGENCE_STEP`] states.
    pub converged: bool,
    /// The relative change of f_q behind `converged`.
    pub convergence_delta: f64,
}

impl Spectrum {
    /// Qubit transition `(E_1 - E_0) / h`.
    pub fn f_q(&self) -> f64 {
        self.eigenvalues[1] - self.eigenvalues[0]
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `cos(theta (a + a^dag))` and `sin(theta (a + a^dag))` on the first `dim` Fock states.
///
/// For `m = n + k`, `<m| exp(i theta x) |n> = i^k e^{-theta^2/2} sqrt(n!/m!) theta^k L_n^(k)(theta^2)`;
/// even `k` feeds the cosine and odd `k` the sine.
pub fn displacement_cos_sin(theta: f64, dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let x = theta * theta;
    let ln_fact = ln_factorials(2 * dim);
    let ln_theta = theta.ln();
    let mut cos = DMatrix::zeros(dim, dim);
    let mut sin = DMatrix::zeros(dim, dim);
    let mut laguerre = vec![0.0; dim];
    for k in 0..dim {
        let kf = k as f64;
        let len = dim - k;
        laguerre[0] = 1.0;
        if len > 1 {
            laguerre[1] = 1.0 + kf - x;
        }
        for j in 1..len.saturating_sub(1) {
            let jf = j as f64;
            laguerre[j + 1] =
                ((2.0 * jf + 1.0 + kf - x) * laguerre[j] - (jf + kf) * laguerre[j - 1]) / (jf + 1.0);
        }
        // i^k folded to a real sign for the cosine (k even) or sine (k odd) part
        let phase = match k % 4 {
            0 | 1 => 1.0,
            _ => -1.0,
        };
        for n in 0..len {
            let l = laguerre[n];
            if l == 0.0 {
                continue;
            }
            let ln_mag = -0.5 * x + 0.5 * (ln_fact[n] - ln_fact[n + k]) + kf * ln_theta + l.abs().ln();
            let v = phase * l.signum() * ln_mag.exp();
            let m = n + k;
            let target = if k % 2 == 0 { &mut cos } else { &mut sin };
            target[(m, n)] = v;
            target[(n, m)] = v;
        }
    }
    (cos, sin)
}

/// The Hamiltonian matrix (Hz) in the oscillator basis of size `dim`.
pub fn fluxonium_hamiltonian(p: &FluxoniumParams, dim: usize) -> DMatrix<f64> {
    let omega = p.oscillator_frequency();
    let (cos, sin) = displacement_cos_sin(p.phase_zpf(), dim);
    let phi_e = 2.0 * PI * p.phi_ext_frac;
    // cos(phi_e + t) = cos(phi_e) cos(t) - sin(phi_e) sin(t)
    let mut h = cos * (-p.e_j * phi_e.cos()) + sin * (p.e_j * phi_e.sin());
    for i in 0..dim {
        h[(i, i)] += omega * (i as f64 + 0.5);
    }
    h
}

fn sorted_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Diagonalises the fluxonium Hamiltonian in a `basis_dim`-state oscillator basis.
///
/// The same problem is solved again with `basis_dim + 20` states to set the
/// spectrum's convergence flag.
pub fn solve_fluxonium(p: &FluxoniumParams, basis_dim: usize) -> Result<Spectrum> {
    p.validate()?;
    if basis_dim < MIN_BASIS_DIM {
        return Err(Error::InvalidInput(format!(
            "basis_dim must be at least {MIN_BASIS_DIM}, got {basis_dim}"
        )));
    }
    let eigenvalues = sorted_eigenvalues(fluxonium_hamiltonian(p, basis_dim));
    let larger = sorted_eigenvalues(fluxonium_hamiltonian(p, basis_dim + CONVERGENCE_STEP));
    let f_q = eigenvalues[1] - eigenvalues[0];
    let f_q_larger = larger[1] - larger[0];
    let convergence_delta = ((f_q - f_q_larger) / f_q_larger).abs();
    Ok(Spectrum {
        eigenvalues,
        basis_dim,
        converged: convergence_delta < CONVERGENCE_TOL,
        convergence_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> FluxoniumParams {
        FluxoniumParams::from_ghz(20.0, 2.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn harmonic_limit_is_evenly_spaced() {
        for phi in [0.0, 0.13, 0.5, 2.7] {
            let p = FluxoniumParams {
                e_j: 0.0,
                ..FluxoniumParams::from_ghz(1.0, 2.0, 1.0, phi).unwrap()
            };
            let h = fluxonium_hamiltonian(&p, 40);
            let ev = sorted_eigenvalues(h);
            let spacing = (8.0f64 * 1e9 * 2e9).sqrt();
            for w in ev.windows(2).take(10) {
                assert!(((w[1] - w[0]) - spacing).abs() / spacing < 1e-10);
            }
        }
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let h = fluxonium_hamiltonian(&reference(), 100);
        let asym = (&h - h.transpose()).norm();
        assert!(asym <= 1e-12 * h.norm());
    }

    #[test]
    fn flux_symmetry_about_half() {
        for x in [0.01, 0.07, 0.2] {
            let a = solve_fluxonium(&FluxoniumParams::from_ghz(20.0, 2.0, 1.0, 0.5 + x).unwrap(), 100).unwrap();
            let b = solve_fluxonium(&FluxoniumParams::from_ghz(20.0, 2.0, 1.0, 0.5 - x).unwrap(), 100).unwrap();
            for (ea, eb) in a.eigenvalues.iter().zip(&b.eigenvalues).take(10) {
                assert!((ea - eb).abs() / ea.abs() < 1e-10, "{ea} vs {eb}");
            }
        }
    }

    #[test]
    fn cosine_matches_spectral_route() {
        // cos(theta X) from an eigendecomposition of X in a much larger truncated
        // basis; its low block converges to the exact matrix elements.
        let theta = 1.3;
        let big = 260;
        let mut x = DMatrix::zeros(big, big);
        for n in 0..big - 1 {
            let v = ((n + 1) as f64).sqrt();
            x[(n, n + 1)] = v;
            x[(n + 1, n)] = v;
        }
        let eig = x.symmetric_eigen();
        let cos_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (theta * l).cos()));
        let sin_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (theta * l).sin()));
        let cos_ref = &eig.eigenvectors * cos_diag * eig.eigenvectors.transpose();
        let sin_ref = &eig.eigenvectors * sin_diag * eig.eigenvectors.transpose();
        let (cos, sin) = displacement_cos_sin(theta, 60);
        for i in 0..60 {
            for j in 0..60 {
                assert!((cos[(i, j)] - cos_ref[(i, j)]).abs() < 1e-10, "cos {i},{j}");
                assert!((sin[(i, j)] - sin_ref[(i, j)]).abs() < 1e-10, "sin {i},{j}");
            }
        }
    }

    #[test]
    fn convergence_flag() {
        let p = reference();
        let s = solve_fluxonium(&p, 100).unwrap();
        assert!(s.converged, "delta {}", s.convergence_delta);
        let s = solve_fluxonium(&p, 20).unwrap();
        assert!(!s.converged);
        assert!(solve_fluxonium(&p, 10).is_err());
    }

    #[test]
    fn basis_convergence_from_80() {
        let p = reference();
        for dim in [80, 100, 120] {
            let a = solve_fluxonium(&p, dim).unwrap().f_q();
            let b = solve_fluxonium(&p, dim + 20).unwrap().f_q();
            assert!(((a - b) / b).abs() < 1e-9, "dim {dim}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FluxoniumParams::from_ghz(-1.0, 2.0, 1.0, 0.5).is_err());
        assert!(FluxoniumParams::from_ghz(1.0, 2.0, 1.0, f64::NAN).is_err());
    }
}
