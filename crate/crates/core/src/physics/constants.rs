//! CODATA 2018 values, SI units.

/// Bohr magneton (J/T).
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Boltzmann constant (J/K), exact.
pub const K_B: f64 = 1.380_649e-23;
/// Planck constant (J s), exact.
pub const H: f64 = 6.626_070_15e-34;
/// Elementary charge (C), exact.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permeability (T m / A).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Magnetic flux quantum h / 2e (Wb).
pub const PHI_0: f64 = 2.067_833_848e-15;

/// mu_0 / 4 pi, the prefactor of every dipole field.
pub const MU_0_OVER_4PI: f64 = MU_0 / (4.0 * std::f64::consts::PI);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive() {
        for c in [MU_B, K_B, H, E_CHARGE, MU_0, PHI_0] {
            assert!(c > 0.0);
        }
    }

    #[test]
    fn flux_quantum_matches_h_over_2e() {
        let derived = H / (2.0 * E_CHARGE);
        assert!((derived - PHI_0).abs() / PHI_0 < 1e-9);
    }
}
