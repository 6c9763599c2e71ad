//! Magnetization curve and spin temperature from a resonator field sweep.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{levenberg_marquardt, weighted_linear_fit, LeastSquaresProblem, LmConfig};
use crate::physics::constants::{K_B, MU_B};

use super::sweep::SweepTrace;

pub const DEFAULT_TAIL_START: f64 = 0.32;
pub const DEFAULT_EXCLUSION: (f64, f64) = (0.244, 0.302);
pub const MIN_TAIL_POINTS: usize = 5;

/// The tanh argument depends on `g / T_S` only, so one of them is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeemanConstraint {
    /// Known g-factor; the spin temperature is fitted.
    FixedG(f64),
    /// Known spin temperature (K); the g-factor is fitted.
    FixedTemperature(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    pub tail_start: f64,
    pub exclusion: Option<(f64, f64)>,
    pub zeeman: ZeemanConstraint,
    /// Refit the baseline jointly with the saturation curve on all retained points.
    pub joint_baseline: bool,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            tail_start: DEFAULT_TAIL_START,
            exclusion: Some(DEFAULT_EXCLUSION),
            zeeman: ZeemanConstraint::FixedG(1.8),
            joint_baseline: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationPoint {
    pub b_par: f64,
    /// `M / M_S`, clamped at zero.
    pub m: f64,
    pub sigma: f64,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    /// Bare-resonator curvature (Hz/T^2).
    pub c2_fit: f64,
    pub c2_sigma: f64,
    /// Magnetization shift at saturation (Hz).
    pub offset_fit: f64,
    pub offset_sigma: f64,
    /// Constant absorbed at zero field (Hz); zero for the plain tail fit.
    pub zero_field_offset: f64,
    pub zero_field_offset_sigma: f64,
    pub magnetization_curve: Vec<MagnetizationPoint>,
    /// `None` when the result is degenerate.
    pub t_s_fit: Option<f64>,
    pub t_s_sigma: Option<f64>,
    pub g_fit: Option<f64>,
    pub g_sigma: Option<f64>,
    /// Exclusion window clipped to the sweep range.
    pub excluded_window: Option<(f64, f64)>,
    pub reduced_chi_square: Option<f64>,
    pub joint_baseline: bool,
    /// No magnetization signal: the saturation offset was not a red shift.
    pub degenerate: bool,
}

/// Extracts `M(B) / M_S` and the spin temperature (or g-factor) from a sweep.
///
/// The baseline `c0 + c2 B^2` is fitted on `B >= tail_start`, subtracted,
/// and `M / M_S = sqrt(max(delta_f_M / c0, 0))`. A tanh fit of the curve
/// outside the exclusion window gives `g / T_S`.
///
/// With `joint_baseline` the tail result seeds a fit of
/// `K + c2 B^2 + c0 tanh^2(k B)` to every retained point, after which the
/// curve and the tanh fit are redone. This removes the bias of a tail that
/// is not fully saturated and absorbs a constant offset into `K`.
pub fn extract_magnetization(trace: &SweepTrace, opts: &ExtractionOptions) -> Result<ExtractionResult> {
    match opts.zeeman {
        ZeemanConstraint::FixedG(g) if !(g > 0.0) => return Err(Error::NonPositive { name: "g", value: g }),
        ZeemanConstraint::FixedTemperature(t) if !(t > 0.0) => {
            return Err(Error::NonPositive { name: "T_S", value: t })
        }
        _ => {}
    }
    let pts = trace.points();
    let tail: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].b_par >= opts.tail_start).collect();
    if tail.len() < MIN_TAIL_POINTS {
        return Err(Error::InsufficientTail {
            found: tail.len(),
            needed: MIN_TAIL_POINTS,
            tail_start: opts.tail_start,
        });
    }
    let weighted = pts.iter().any(|p| p.sigma_f > 0.0);
    if weighted && pts.iter().any(|p| p.sigma_f == 0.0) {
        return Err(Error::InvalidInput(
            "uncertainties must be all zero or all positive".into(),
        ));
    }
    let excluded_window = opts.exclusion.and_then(|(lo, hi)| {
        let (b_min, b_max) = (pts[0].b_par, pts[pts.len() - 1].b_par);
        let (lo, hi) = (lo.max(b_min), hi.min(b_max));
        (lo < hi).then_some((lo, hi))
    });
    let is_excluded = |b: f64| excluded_window.is_some_and(|(lo, hi)| b >= lo && b <= hi);

    let base = fit_baseline(trace, &tail)?;
    if !(base.c0 < 0.0) {
        return Ok(degenerate(trace, &base, excluded_window, false, &is_excluded));
    }
    let curve = magnetization_curve(trace, &base, &is_excluded);
    let fit = fit_tanh(&curve, weighted)?;
    if !opts.joint_baseline {
        return Ok(finish(base, curve, fit, opts, excluded_window, false));
    }
    let retained: Vec<usize> = (0..pts.len()).filter(|&i| !is_excluded(pts[i].b_par)).collect();
    let base = fit_joint_baseline(trace, &retained, &base, fit.k)?;
    if !(base.c0 < 0.0) {
        return Ok(degenerate(trace, &base, excluded_window, true, &is_excluded));
    }
    let curve = magnetization_curve(trace, &base, &is_excluded);
    let fit = fit_tanh(&curve, weighted)?;
    Ok(finish(base, curve, fit, opts, excluded_window, true))
}

#[derive(Debug, Clone, Copy)]
struct Baseline {
    c0: f64,
    c0_sigma: f64,
    c2: f64,
    c2_sigma: f64,
    k0: f64,
    k0_sigma: f64,
}

/// Weighted `c0 + c2 B^2` on the tail rows.
fn fit_baseline(trace: &SweepTrace, rows: &[usize]) -> Result<Baseline> {
    let pts = trace.points();
    let design = DMatrix::from_fn(rows.len(), 2, |r, c| if c == 0 { 1.0 } else { pts[rows[r]].b_par.powi(2) });
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| pts[i].delta_f));
    let weighted = pts[rows[0]].sigma_f > 0.0;
    let w = weighted.then(|| DVector::from_iterator(rows.len(), rows.iter().map(|&i| pts[i].sigma_f.powi(-2))));
    let fit = weighted_linear_fit(&design, &y, w.as_ref())?;
    let scale = if weighted { 1.0 } else { fit.chi_square / fit.dof.max(1) as f64 };
    let sd = |j: usize| (fit.covariance[(j, j)] * scale).max(0.0).sqrt();
    Ok(Baseline {
        c0: fit.coeffs[0],
        c0_sigma: sd(0),
        c2: fit.coeffs[1],
        c2_sigma: sd(1),
        k0: 0.0,
        k0_sigma: 0.0,
    })
}

/// Parameters `[K, c2, c0, ln k]`.
struct JointBaseline<'a> {
    trace: &'a SweepTrace,
    rows: &'a [usize],
    weighted: bool,
}

impl LeastSquaresProblem for JointBaseline<'_> {
    fn n_params(&self) -> usize {
        4
    }

    fn n_residuals(&self) -> usize {
        self.rows.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let k = p[3].exp();
        for (o, &i) in out.iter_mut().zip(self.rows) {
            let pt = self.trace.points()[i];
            let t = (k * pt.b_par).tanh();
            let r = p[0] + p[1] * pt.b_par * pt.b_par + p[2] * t * t - pt.delta_f;
            *o = if self.weighted { r / pt.sigma_f } else { r };
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
        let k = p[3].exp();
        for (r, &i) in self.rows.iter().enumerate() {
            let pt = self.trace.points()[i];
            let x = k * pt.b_par;
            let t = x.tanh();
            let w = if self.weighted { 1.0 / pt.sigma_f } else { 1.0 };
            jac[(r, 0)] = w;
            jac[(r, 1)] = w * pt.b_par * pt.b_par;
            jac[(r, 2)] = w * t * t;
            jac[(r, 3)] = w * 2.0 * p[2] * t * (1.0 - t * t) * x;
        }
    }
}

fn fit_joint_baseline(trace: &SweepTrace, rows: &[usize], start: &Baseline, k: f64) -> Result<Baseline> {
    if rows.len() < 5 {
        return Err(Error::InvalidInput("fewer than five points outside the exclusion window".into()));
    }
    let weighted = trace.points()[rows[0]].sigma_f > 0.0;
    let problem = JointBaseline { trace, rows, weighted };
    let rep = levenberg_marquardt(&problem, &[0.0, start.c2, start.c0, k.ln()], &LmConfig::default());
    if !rep.converged {
        return Err(Error::NotConverged { iterations: rep.iterations });
    }
    let scale = if weighted { 1.0 } else { rep.residual_variance() };
    let sd = |j: usize| {
        rep.covariance
            .as_ref()
            .map_or(f64::NAN, |c| (c[(j, j)] * scale).max(0.0).sqrt())
    };
    Ok(Baseline {
        c0: rep.params[2],
        c0_sigma: sd(2),
        c2: rep.params[1],
        c2_sigma: sd(1),
        k0: rep.params[0],
        k0_sigma: sd(0),
    })
}

fn magnetization_curve(
    trace: &SweepTrace,
    base: &Baseline,
    is_excluded: &dyn Fn(f64) -> bool,
) -> Vec<MagnetizationPoint> {
    trace
        .points()
        .iter()
        .map(|p| {
            let df_m = p.delta_f - base.k0 - base.c2 * p.b_par * p.b_par;
            let u = (df_m / base.c0).max(0.0);
            let m = u.sqrt();
            let sigma_u = p.sigma_f / base.c0.abs();
            MagnetizationPoint {
                b_par: p.b_par,
                m,
                // exact for u = m^2 +- sigma_u, finite at m = 0
                sigma: (m * m + sigma_u).sqrt() - m,
                excluded: is_excluded(p.b_par),
            }
        })
        .collect()
}

struct TanhFit {
    /// `g mu_B / (2 k_B T_S)` (1/T).
    k: f64,
    ln_k_sigma: f64,
    reduced_chi_square: f64,
}

struct TanhProblem {
    b: Vec<f64>,
    m: Vec<f64>,
    inv_sigma: Vec<f64>,
}

impl LeastSquaresProblem for TanhProblem {
    fn n_params(&self) -> usize {
        1
    }

    fn n_residuals(&self) -> usize {
        self.b.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let k = p[0].exp();
        for (i, o) in out.iter_mut().enumerate() {
            *o = ((k * self.b[i].abs()).tanh() - self.m[i]) * self.inv_sigma[i];
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
        let k = p[0].exp();
        for i in 0..self.b.len() {
            let x = k * self.b[i].abs();
            let sech = 1.0 / x.cosh();
            jac[(i, 0)] = x * sech * sech * self.inv_sigma[i];
        }
    }
}

/// Multi-start fit of `tanh(k |B|)` over `ln k`, starts log-spaced from 5 mK to 1 K at g = 2.
fn fit_tanh(curve: &[MagnetizationPoint], weighted: bool) -> Result<TanhFit> {
    let used: Vec<&MagnetizationPoint> = curve.iter().filter(|p| !p.excluded).collect();
    if used.len() < 2 {
        return Err(Error::InvalidInput("fewer than two points outside the exclusion window".into()));
    }
    let problem = TanhProblem {
        b: used.iter().map(|p| p.b_par).collect(),
        m: used.iter().map(|p| p.m).collect(),
        inv_sigma: used
            .iter()
            .map(|p| if weighted { 1.0 / p.sigma } else { 1.0 })
            .collect(),
    };
    let k_at = |t: f64| 2.0 * MU_B / (2.0 * K_B * t);
    let starts = 7;
    let mut best: Option<crate::numerics::LmReport> = None;
    for s in 0..starts {
        let t = 5e-3 * (1.0_f64 / 5e-3).powf(s as f64 / (starts - 1) as f64);
        let rep = levenberg_marquardt(&problem, &[k_at(t).ln()], &LmConfig::default());
        if best.as_ref().is_none_or(|b| rep.cost < b.cost) {
            best = Some(rep);
        }
    }
    let rep = best.unwrap();
    if !rep.converged {
        return Err(Error::NotConverged { iterations: rep.iterations });
    }
    let dof = (used.len() - 1) as f64;
    let var = rep.covariance.as_ref().map(|c| c[(0, 0)]).ok_or(Error::Singular)?;
    let scale = if weighted { 1.0 } else { rep.cost / dof };
    Ok(TanhFit {
        k: rep.params[0].exp(),
        ln_k_sigma: (var * scale).max(0.0).sqrt(),
        reduced_chi_square: rep.cost / dof,
    })
}

fn finish(
    base: Baseline,
    curve: Vec<MagnetizationPoint>,
    fit: TanhFit,
    opts: &ExtractionOptions,
    excluded_window: Option<(f64, f64)>,
    joint_baseline: bool,
) -> ExtractionResult {
    let (g, t_s) = match opts.zeeman {
        ZeemanConstraint::FixedG(g) => (g, g * MU_B / (2.0 * K_B * fit.k)),
        ZeemanConstraint::FixedTemperature(t) => (2.0 * K_B * t * fit.k / MU_B, t),
    };
    let (g_sigma, t_s_sigma) = match opts.zeeman {
        ZeemanConstraint::FixedG(_) => (0.0, t_s * fit.ln_k_sigma),
        ZeemanConstraint::FixedTemperature(_) => (g * fit.ln_k_sigma, 0.0),
    };
    ExtractionResult {
        c2_fit: base.c2,
        c2_sigma: base.c2_sigma,
        offset_fit: base.c0,
        offset_sigma: base.c0_sigma,
        zero_field_offset: base.k0,
        zero_field_offset_sigma: base.k0_sigma,
        magnetization_curve: curve,
        t_s_fit: Some(t_s),
        t_s_sigma: Some(t_s_sigma),
        g_fit: Some(g),
        g_sigma: Some(g_sigma),
        excluded_window,
        reduced_chi_square: Some(fit.reduced_chi_square),
        joint_baseline,
        degenerate: false,
    }
}

fn degenerate(
    trace: &SweepTrace,
    base: &Baseline,
    excluded_window: Option<(f64, f64)>,
    joint_baseline: bool,
    is_excluded: &dyn Fn(f64) -> bool,
) -> ExtractionResult {
    ExtractionResult {
        c2_fit: base.c2,
        c2_sigma: base.c2_sigma,
        offset_fit: base.c0,
        offset_sigma: base.c0_sigma,
        zero_field_offset: base.k0,
        zero_field_offset_sigma: base.k0_sigma,
        magnetization_curve: trace
            .points()
            .iter()
            .map(|p| MagnetizationPoint {
                b_par: p.b_par,
                m: 0.0,
                sigma: 0.0,
                excluded: is_excluded(p.b_par),
            })
            .collect(),
        t_s_fit: None,
        t_s_sigma: None,
        g_fit: None,
        g_sigma: None,
        excluded_window,
        reduced_chi_square: None,
        joint_baseline,
        degenerate: true,
    }
}
