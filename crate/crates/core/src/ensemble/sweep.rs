//! Resonator frequency shift versus in-plane field.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::constants::{H, MU_B};
use crate::physics::polarization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// In-plane field (T).
    pub b_par: f64,
    /// Resonance shift from the zero-field value (Hz).
    pub delta_f: f64,
    /// One-sigma uncertainty of `delta_f` (Hz).
    pub sigma_f: f64,
}

/// A field sweep with strictly increasing `b_par`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    points: Vec<SweepPoint>,
    f_r0: f64,
}

impl SweepTrace {
    pub fn new(points: Vec<SweepPoint>, f_r0: f64) -> Result<Self> {
        if !(f_r0 > 0.0) || !f_r0.is_finite() {
            return Err(Error::NonPositive {
                name: "f_r0",
                value: f_r0,
            });
        }
        for (i, p) in points.iter().enumerate() {
            if !p.b_par.is_finite() || !p.delta_f.is_finite() || !p.sigma_f.is_finite() {
                return Err(Error::Schema {
                    row: Some(i),
                    message: "non-finite value".into(),
                });
            }
            if p.sigma_f < 0.0 {
                return Err(Error::Schema {
                    row: Some(i),
                    message: format!("negative uncertainty {}", p.sigma_f),
                });
            }
            if i > 0 && !(p.b_par > points[i - 1].b_par) {
                return Err(Error::Schema {
                    row: Some(i),
                    message: format!(
                        "B_par not strictly increasing ({} after {})",
                        p.b_par,
                        points[i - 1].b_par
                    ),
                });
            }
        }
        Ok(Self { points, f_r0 })
    }

    pub fn points(&self) -> &[SweepPoint] {
        &self.points
    }

    pub fn f_r0(&self) -> f64 {
        self.f_r0
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds `offset` Hz to every shift.
    pub fn shifted(&self, offset: f64) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| SweepPoint {
                delta_f: p.delta_f + offset,
                ..*p
            })
            .collect();
        Self {
            points,
            f_r0: self.f_r0,
        }
    }
}

/// Spin-ensemble and bare-resonator parameters of a field sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub g: f64,
    /// Spin temperature (K).
    pub t_s: f64,
    /// Saturation magnetization; shifts depend only on `M / M_S`.
    pub m_s: f64,
    /// Saturation shift `delta_f_M(sat) = -beta f_r0`.
    pub beta: f64,
    /// Bare-resonator parabola curvature (Hz/T^2), negative.
    pub c2: f64,
    /// Inhomogeneous ESR linewidth, Gaussian sigma (Hz).
    pub sigma_inh: f64,
    /// Zero-field resonance frequency (Hz).
    pub f_r0: f64,
}

impl Default for EnsembleParams {
    /// g = 1.8, 70 mK, 1 MHz saturation shift on a 7.8 GHz resonator.
    fn default() -> Self {
        Self {
            g: 1.8,
            t_s: 0.070,
            m_s: 1.0,
            beta: 1e6 / 7.8e9,
            c2: -20e6,
            sigma_inh: 0.25e6,
            f_r0: 7.8e9,
        }
    }
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g", self.g),
            ("T_S", self.t_s),
            ("M_S", self.m_s),
            ("beta", self.beta),
            ("sigma_inh", self.sigma_inh),
            ("f_r0", self.f_r0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if !(self.c2 < 0.0) {
            return Err(Error::InvalidInput(format!(
                "bare-resonator curvature c2 must be negative, got {}",
                self.c2
            )));
        }
        Ok(())
    }

    /// `M(B) / M_S`.
    pub fn polarization(&self, b_par: f64) -> f64 {
        polarization(b_par, self.g, self.t_s)
    }

    /// `-beta f_r0 (M / M_S)^2`.
    pub fn magnetization_shift(&self, b_par: f64) -> f64 {
        let m = self.polarization(b_par);
        -self.beta * self.f_r0 * m * m
    }

    /// Noise-free shift without artifacts.
    pub fn total_shift(&self, b_par: f64) -> f64 {
        self.c2 * b_par * b_par + self.magnetization_shift(b_par)
    }
}

/// Transverse coupling to a spin species, seen as a dispersive pull on the resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvoidedCrossing {
    pub g: f64,
    /// Transverse coupling strength (Hz).
    pub coupling: f64,
}

impl AvoidedCrossing {
    /// Resonator-branch deviation at `b_par` for a resonator at `f_r0`.
    ///
    /// The resonator is pushed up below the crossing and down above it, by
    /// `sqrt(detuning^2 / 4 + coupling^2) - |detuning| / 2`.
    pub fn deviation(&self, b_par: f64, f_r0: f64) -> f64 {
        let detuning = self.g * MU_B * b_par.abs() / H - f_r0;
        let pull = (0.25 * detuning * detuning + self.coupling * self.coupling).sqrt() - 0.5 * detuning.abs();
        if detuning < 0.0 {
            pull
        } else {
            -pull
        }
    }
}

/// Forward model of a resonator field sweep.
///
/// `delta_f(B) = c2 B^2 - beta f_r0 (M/M_S)^2 + artifacts + N(0, noise_sigma)`,
/// with the noise drawn from a ChaCha8 stream seeded by `seed`. Every point
/// carries `sigma_f = noise_sigma`.
pub fn synthesize_sweep(
    params: &EnsembleParams,
    b_grid: &[f64],
    noise_sigma: f64,
    seed: u64,
    artifacts: &[AvoidedCrossing],
) -> Result<SweepTrace> {
    params.validate()?;
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidInput(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let points = b_grid
        .iter()
        .map(|&b| {
            let mut df = params.total_shift(b);
            for a in artifacts {
                df += a.deviation(b, params.f_r0);
            }
            if noise_sigma > 0.0 {
                df += normal.sample(&mut rng);
            }
            SweepPoint {
                b_par: b,
                delta_f: df,
                sigma_f: noise_sigma,
            }
        })
        .collect();
    SweepTrace::new(points, params.f_r0)
}

/// `n` evenly spaced fields from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
