//! Magnetic field vectors and point-dipole magnetostatics.
//!
//! Frame convention: `x` is in-plane along the strip (the B_parallel axis),
//! `z` is out of the chip plane (B_perp). Vectors carry no frame tag.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::constants::{MU_0_OVER_4PI, MU_B};
use crate::error::{Error, Result};

/// Magnetic flux density in tesla.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3Field(pub Vector3<f64>);

impl Vec3Field {
    pub const ZERO: Vec3Field = Vec3Field(Vector3::new(0.0, 0.0, 0.0));

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    /// Uniform in-plane bias of `b` tesla.
    pub fn parallel(b: f64) -> Self {
        Self::new(b, 0.0, 0.0)
    }

    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl std::ops::Add for Vec3Field {
    type Output = Vec3Field;

    fn add(self, rhs: Self) -> Self {
        Vec3Field(self.0 + rhs.0)
    }
}

impl std::ops::Neg for Vec3Field {
    type Output = Vec3Field;

    fn neg(self) -> Self {
        Vec3Field(-self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Up,
    Down,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Up => 1.0,
            Polarity::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Up => Polarity::Down,
            Polarity::Down => Polarity::Up,
        }
    }
}

/// A two-state point moment: `polarity * magnitude * axis`, magnitude in Bohr magnetons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleMoment {
    magnitude_mu_b: f64,
    axis: Vector3<f64>,
    polarity: Polarity,
}

impl DipoleMoment {
    /// `axis` is normalised here; it must be non-zero and finite.
    pub fn new(magnitude_mu_b: f64, axis: Vector3<f64>, polarity: Polarity) -> Result<Self> {
        if !(magnitude_mu_b > 0.0) || !magnitude_mu_b.is_finite() {
            return Err(Error::NonPositive {
                name: "moment magnitude",
                value: magnitude_mu_b,
            });
        }
        let norm = axis.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput(format!(
                "moment axis must be a finite non-zero vector, got {axis:?}"
            )));
        }
        Ok(Self {
            magnitude_mu_b,
            axis: axis / norm,
            polarity,
        })
    }

    /// Moment along +x (the bias-field direction).
    pub fn in_plane(magnitude_mu_b: f64, polarity: Polarity) -> Result<Self> {
        Self::new(magnitude_mu_b, Vector3::x(), polarity)
    }

    pub fn magnitude_mu_b(&self) -> f64 {
        self.magnitude_mu_b
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    pub fn with_magnitude(self, magnitude_mu_b: f64) -> Result<Self> {
        Self::new(magnitude_mu_b, self.axis, self.polarity)
    }

    /// Moment vector in A m^2.
    pub fn vector(&self) -> Vector3<f64> {
        self.axis * (self.polarity.sign() * self.magnitude_mu_b * MU_B)
    }
}

/// Field of a point dipole at displacement `r` (metres) from the moment.
///
/// `B = (mu_0 / 4 pi) (3 (m . r_hat) r_hat - m) / |r|^3`
pub fn dipole_field(moment: &DipoleMoment, r: &Vector3<f64>) -> Result<Vec3Field> {
    let dist = r.norm();
    if !(dist > 0.0) {
        return Err(Error::DipoleSingularity);
    }
    let r_hat = r / dist;
    let m = moment.vector();
    let b = (3.0 * m.dot(&r_hat) * r_hat - m) * (MU_0_OVER_4PI / (dist * dist * dist));
    Ok(Vec3Field(b))
}
