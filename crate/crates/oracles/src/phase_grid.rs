//! Fluxonium levels from a finite-difference phase grid.
//!
//! `H = -4 E_C d^2/dphi^2 + E_L/2 (phi - 2 pi x)^2 - E_J cos(phi)` on
//! `[-L, L]` with Dirichlet walls, second-order central differences, and
//! eigenvalues located by Sturm-sequence bisection of the tridiagonal matrix.

use std::f64::consts::PI;

/// Half-width of the phase box, in radians.
pub const DEFAULT_HALF_WIDTH: f64 = 12.0 * PI;

/// Tridiagonal finite-difference Hamiltonian.
pub struct PhaseGrid {
    diag: Vec<f64>,
    off: f64,
}

impl PhaseGrid {
    /// `n` interior nodes; energies in any common unit.
    pub fn new(e_j: f64, e_c: f64, e_l: f64, phi_ext_frac: f64, n: usize, half_width: f64) -> Self {
        let h = 2.0 * half_width / (n + 1) as f64;
        let kinetic = 4.0 * e_c / (h * h);
        let diag = (1..=n)
            .map(|i| {
                let phi = -half_width + i as f64 * h;
                let shifted = phi - 2.0 * PI * phi_ext_frac;
                2.0 * kinetic + 0.5 * e_l * shifted * shifted - e_j * phi.cos()
            })
            .collect();
        Self { diag, off: -kinetic }
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th eigenvalue, counting from zero.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let spread = 2.0 * self.off.abs();
        let mut lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - spread;
        let mut hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + spread;
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `E_1 - E_0` on an `n`-node grid.
pub fn qubit_frequency(e_j: f64, e_c: f64, e_l: f64, phi_ext_frac: f64, n: usize, half_width: f64) -> f64 {
    let g = PhaseGrid::new(e_j, e_c, e_l, phi_ext_frac, n, half_width);
    g.eigenvalue(1) - g.eigenvalue(0)
}

/// Richardson extrapolation of the O(h^2) grid error from `n` and `2n` nodes.
pub fn qubit_frequency_extrapolated(e_j: f64, e_c: f64, e_l: f64, phi_ext_frac: f64, n: usize) -> f64 {
    let coarse = qubit_frequency(e_j, e_c, e_l, phi_ext_frac, n, DEFAULT_HALF_WIDTH);
    let fine = qubit_frequency(e_j, e_c, e_l, phi_ext_frac, 2 * n + 1, DEFAULT_HALF_WIDTH);
    (4.0 * fine - coarse) / 3.0
}

/// Two Richardson steps over `n`, `2n+1` and `4n+3` nodes, cancelling the
/// O(h^2) and O(h^4) grid errors.
///
/// Coarser grids keep the kinetic term, and with it the rounding floor of
/// the Sturm count, small.
pub fn qubit_frequency_romberg(e_j: f64, e_c: f64, e_l: f64, phi_ext_frac: f64, n: usize) -> f64 {
    let f = |m: usize| qubit_frequency(e_j, e_c, e_l, phi_ext_frac, m, DEFAULT_HALF_WIDTH);
    let (a, b, c) = (f(n), f(2 * n + 1), f(4 * n + 3));
    let r1 = (4.0 * b - a) / 3.0;
    let r2 = (4.0 * c - b) / 3.0;
    (16.0 * r2 - r1) / 15.0
}
