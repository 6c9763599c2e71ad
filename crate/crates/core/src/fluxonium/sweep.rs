use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::junction::{spin_flip_shift, SpinReadoutScenario};
use crate::error::{Error, Result};

/// One `(d, B_par)` cell of a spin-flip shift sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    /// Spin height above the junction (m).
    pub distance_d: f64,
    /// Bias field (T).
    pub b_par: f64,
    /// `f_q(up) - f_q(down)` in Hz, `None` when the cell failed.
    pub delta_fq: Option<f64>,
    pub error: Option<String>,
}

/// Spin-flip qubit shift over every `(d, B_par)` pair, `d` outermost.
///
/// Cells are evaluated in parallel; the output order is fixed by the input
/// order. Failures are recorded per row.
pub fn fig4c_sweep(
    template: &SpinReadoutScenario,
    distances: &[f64],
    fields: &[f64],
) -> Result<Vec<ShiftRow>> {
    if distances.is_empty() || fields.is_empty() {
        return Err(Error::InvalidInput("empty sweep axis".into()));
    }
    let cells: Vec<(f64, f64)> = distances
        .iter()
        .flat_map(|&d| fields.iter().map(move |&b| (d, b)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(d, b)| {
            let scenario = SpinReadoutScenario {
                distance_d: d,
                b_par: b,
                ..*template
            };
            match spin_flip_shift(&scenario) {
                Ok(shift) => ShiftRow {
                    distance_d: d,
                    b_par: b,
                    delta_fq: Some(shift),
                    error: None,
                },
                Err(e) => ShiftRow {
                    distance_d: d,
                    b_par: b,
                    delta_fq: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxonium::FluxoniumParams;

    fn template() -> SpinReadoutScenario {
        let circuit = FluxoniumParams::from_ghz(10.0, 4.0, 1.0, 0.5).unwrap();
        let mut s = SpinReadoutScenario::new(circuit, 10e-9, 0.1).unwrap();
        s.basis_dim = 80;
        s.junction.grid_n = 8;
        s
    }

    #[test]
    fn singleton_matches_direct() {
        let t = template();
        let rows = fig4c_sweep(&t, &[t.distance_d], &[t.b_par]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].delta_fq, Some(spin_flip_shift(&t).unwrap()));
    }

    #[test]
    fn columns_decrease_with_distance() {
        let d: Vec<f64> = (1..=10).map(|i| i as f64 * 10e-9).collect();
        let b = [0.1, 0.2, 0.5];
        let rows = fig4c_sweep(&template(), &d, &b).unwrap();
        assert_eq!(rows.len(), 30);
        for (bi, _) in b.iter().enumerate() {
            let col: Vec<f64> = (0..d.len()).map(|di| rows[di * 3 + bi].delta_fq.unwrap().abs()).collect();
            assert!(col.windows(2).all(|w| w[1] < w[0]), "{col:?}");
        }
    }

    #[test]
    fn linear_in_moment() {
        let mut t = template();
        t.junction.grid_n = 16;
        let one = fig4c_sweep(&t, &[50e-9], &[0.2]).unwrap()[0].delta_fq.unwrap();
        t.moment = t.moment.with_magnitude(20.0).unwrap();
        let two = fig4c_sweep(&t, &[50e-9], &[0.2]).unwrap()[0].delta_fq.unwrap();
        assert!((two / one - 2.0).abs() < 0.1, "{}", two / one);
    }

    #[test]
    fn row_errors_do_not_abort() {
        let rows = fig4c_sweep(&template(), &[10e-9], &[0.1, 1.6]).unwrap();
        assert!(rows[0].delta_fq.is_some());
        assert!(rows[1].delta_fq.is_none());
        assert!(rows[1].error.is_some());
    }

    #[test]
    fn empty_axis() {
        assert!(fig4c_sweep(&template(), &[], &[0.1]).is_err());
    }
}
