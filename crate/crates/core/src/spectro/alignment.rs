//! Perpendicular-field compensation by maximizing the resonance frequency.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::golden_section_max;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerpCompensation {
    /// Perpendicular field that maximizes the frequency (T).
    pub b_perp: f64,
    pub frequency: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of `f_of_b_perp` on `range` to `tol` tesla.
pub fn compensate_perp_field<F>(f_of_b_perp: F, range: (f64, f64), tol: f64) -> Result<PerpCompensation>
where
    F: FnMut(f64) -> f64,
{
    let m = golden_section_max(f_of_b_perp, range.0, range.1, tol)?;
    Ok(PerpCompensation {
        b_perp: m.x,
        frequency: m.value,
        iterations: m.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn finds_offset_parabola() {
        let r = compensate_perp_field(|b| 7.8e9 - 1e12 * (b - 3e-3).powi(2), (-0.02, 0.02), 1e-6).unwrap();
        assert!((r.b_perp - 3e-3).abs() <= 1e-6);
    }

    #[test]
    fn symmetric_response_peaks_at_zero() {
        let r = compensate_perp_field(|b: f64| -b.abs().powf(1.5), (-0.01, 0.01), 1e-7).unwrap();
        assert!(r.b_perp.abs() <= 1e-7);
    }

    #[test]
    fn monotone_response_has_no_interior_maximum() {
        let err = compensate_perp_field(|b| b, (-0.01, 0.01), 1e-6).unwrap_err();
        assert!(matches!(err, Error::NoInteriorMaximum { .. }));
    }
}
