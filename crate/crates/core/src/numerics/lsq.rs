//! Least-squares solvers: weighted linear fits and a Levenberg-Marquardt
//! minimiser for small dense problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of a linear least-squares problem.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coeffs: DVector<f64>,
    /// `(A^T W A)^-1`; scale by the reduced chi-square for unweighted fits.
    pub covariance: DMatrix<f64>,
    pub chi_square: f64,
    pub dof: usize,
}

/// Minimises `sum_i w_i (y_i - (A c)_i)^2`. `weights = None` means unit weights.
pub fn weighted_linear_fit(
    design: &DMatrix<f64>,
    y: &DVector<f64>,
    weights: Option<&DVector<f64>>,
) -> Result<LinearFit> {
    let (m, n) = design.shape();
    if m < n || y.len() != m {
        return Err(Error::InvalidInput(format!(
            "linear fit needs at least {n} rows matching the data, got {m} and {}",
            y.len()
        )));
    }
    let mut a = design.clone();
    let mut b = y.clone();
    if let Some(w) = weights {
        for i in 0..m {
            let s = w[i].sqrt();
            a.row_mut(i).scale_mut(s);
            b[i] *= s;
        }
    }
    // column equilibration keeps R well conditioned when bases differ in scale
    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let s = a.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    if (0..n).any(|i| r[(i, i)].abs() < 1e-14) {
        return Err(Error::Singular);
    }
    let qtb = qr.q().transpose() * &b;
    let mut c = r
        .solve_upper_triangular(&qtb.rows(0, n).into_owned())
        .ok_or(Error::Singular)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(n, n))
        .ok_or(Error::Singular)?;
    let mut cov = &r_inv * r_inv.transpose();
    for j in 0..n {
        c[j] /= scales[j];
        for k in 0..n {
            cov[(j, k)] /= scales[j] * scales[k];
        }
    }
    let resid = &b - &a * {
        let mut scaled = c.clone();
        for j in 0..n {
            scaled[j] *= scales[j];
        }
        scaled
    };
    Ok(LinearFit {
        coeffs: c,
        covariance: cov,
        chi_square: resid.norm_squared(),
        dof: m - n,
    })
}

/// A residual vector `r(p)` with an optional analytic Jacobian.
pub trait LeastSquaresProblem {
    fn n_params(&self) -> usize;

    fn n_residuals(&self) -> usize;

    fn residuals(&self, params: &[f64], out: &mut [f64]);

    /// Defaults to central differences.
    fn jacobian(&self, params: &[f64], jac: &mut DMatrix<f64>) {
        numerical_jacobian(self, params, jac);
    }
}

/// Central-difference Jacobian, step `1e-6 * max(|p_j|, 1e-6)`.
pub fn numerical_jacobian<P: LeastSquaresProblem + ?Sized>(
    problem: &P,
    params: &[f64],
    jac: &mut DMatrix<f64>,
) {
    let m = problem.n_residuals();
    let mut p = params.to_vec();
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for j in 0..params.len() {
        let h = 1e-6 * params[j].abs().max(1e-6);
        p[j] = params[j] + h;
        problem.residuals(&p, &mut plus);
        p[j] = params[j] - h;
        problem.residuals(&p, &mut minus);
        p[j] = params[j];
        for i in 0..m {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Stop when `|dp_j| <= xtol * (|p_j| + xtol)` for every parameter.
    pub xtol: f64,
    /// Stop when the relative decrease of the cost falls below this.
    pub ftol: f64,
    pub initial_lambda: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            xtol: 1e-10,
            ftol: 1e-16,
            initial_lambda: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(J^T J)^-1` at the solution, unscaled by the residual variance.
    pub covariance: Option<DMatrix<f64>>,
    pub n_residuals: usize,
}

impl LmReport {
    /// Residual variance estimate `cost / (m - n)`.
    pub fn residual_variance(&self) -> f64 {
        let dof = self.n_residuals.saturating_sub(self.params.len()).max(1);
        self.cost / dof as f64
    }

    /// One-sigma parameter errors assuming unit-weighted residuals of unknown scale.
    pub fn std_errors(&self) -> Option<Vec<f64>> {
        let cov = self.covariance.as_ref()?;
        let s2 = self.residual_variance();
        Some((0..self.params.len()).map(|j| (cov[(j, j)] * s2).max(0.0).sqrt()).collect())
    }
}

fn column_scales(jac: &DMatrix<f64>, prev: Option<&[f64]>) -> Vec<f64> {
    (0..jac.ncols())
        .map(|j| {
            let s = jac.column(j).norm();
            let s = prev.map_or(s, |p| s.max(p[j]));
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect()
}

/// Solves `min |[J S^-1; sqrt(lambda) I] y + [r; 0]|` by QR; returns `dp = S^-1 y`.
fn damped_step(jac: &DMatrix<f64>, r: &DVector<f64>, scales: &[f64], lambda: f64) -> Option<DVector<f64>> {
    let (m, n) = jac.shape();
    let mut a = DMatrix::zeros(m + n, n);
    for j in 0..n {
        for i in 0..m {
            a[(i, j)] = jac[(i, j)] / scales[j];
        }
        a[(m + j, j)] = lambda.sqrt();
    }
    let mut b = DVector::zeros(m + n);
    for i in 0..m {
        b[i] = -r[i];
    }
    let qr = a.qr();
    let qtb = qr.q().transpose() * b;
    let y = qr.r().solve_upper_triangular(&qtb.rows(0, n).into_owned())?;
    Some(DVector::from_iterator(n, (0..n).map(|j| y[j] / scales[j])))
}

fn unscaled_covariance(jac: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = jac.ncols();
    let scales = column_scales(jac, None);
    let mut a = jac.clone();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let r = a.qr().r();
    if (0..n).any(|i| r[(i, i)].abs() < 1e-13) {
        return None;
    }
    let r_inv = r.solve_upper_triangular(&DMatrix::identity(n, n))?;
    let mut cov = &r_inv * r_inv.transpose();
    for j in 0..n {
        for k in 0..n {
            cov[(j, k)] /= scales[j] * scales[k];
        }
    }
    Some(cov)
}

/// Levenberg-Marquardt with Marquardt column scaling.
pub fn levenberg_marquardt<P: LeastSquaresProblem + ?Sized>(
    problem: &P,
    initial: &[f64],
    config: &LmConfig,
) -> LmReport {
    let n = problem.n_params();
    let m = problem.n_residuals();
    let mut p = initial.to_vec();
    let mut r = DVector::zeros(m);
    problem.residuals(&p, r.as_mut_slice());
    let mut cost = r.norm_squared();
    let mut jac = DMatrix::zeros(m, n);
    let mut lambda = config.initial_lambda;
    let mut scales: Option<Vec<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![0.0; n];
    let mut r_trial = DVector::zeros(m);

    if !cost.is_finite() {
        return LmReport {
            params: p,
            cost,
            iterations: 0,
            converged: false,
            covariance: None,
            n_residuals: m,
        };
    }

    'outer: while iterations < config.max_iterations {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        problem.jacobian(&p, &mut jac);
        let s = column_scales(&jac, scales.as_deref());
        scales = Some(s.clone());

        loop {
            let Some(step) = damped_step(&jac, &r, &s, lambda) else {
                lambda *= 10.0;
                if lambda > 1e16 {
                    break 'outer;
                }
                continue;
            };
            for j in 0..n {
                trial[j] = p[j] + step[j];
            }
            problem.residuals(&trial, r_trial.as_mut_slice());
            let trial_cost = r_trial.norm_squared();
            if trial_cost.is_finite() && trial_cost <= cost {
                let small_step = (0..n).all(|j| step[j].abs() <= config.xtol * (p[j].abs() + config.xtol));
                let small_gain = cost - trial_cost <= config.ftol * cost;
                p.copy_from_slice(&trial);
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-15);
                if small_step || small_gain {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // even a vanishing gradient step fails to descend: stationary to rounding
                converged = true;
                break 'outer;
            }
        }
    }

    problem.jacobian(&p, &mut jac);
    LmReport {
        params: p,
        cost,
        iterations,
        converged,
        covariance: unscaled_covariance(&jac),
        n_residuals: m,
    }
}
