//! Rate-equation spin dynamics: two-tone steady state, excitation and decay.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{levenberg_marquardt, LeastSquaresProblem, LmConfig};
use crate::physics::constants::{H, MU_B};

use super::sweep::EnsembleParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModelParams {
    /// Drive-resonator frequency (Hz).
    pub f_drive_res: f64,
    /// Drive-resonator FWHM (Hz).
    pub kappa: f64,
    /// Peak saturation parameter `s = W * 2 T1`.
    pub drive_strength: f64,
    /// Relaxation time (s); also the 1/e time of the decay.
    pub t1: f64,
    /// Stretching exponent in (0, 1].
    pub stretch_beta: f64,
}

impl Default for RateModelParams {
    fn default() -> Self {
        Self {
            f_drive_res: 9.84e9,
            kappa: 2e6,
            drive_strength: 10.0,
            t1: 0.38,
            stretch_beta: 0.7,
        }
    }
}

impl RateModelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("f_drive_res", self.f_drive_res), ("kappa", self.kappa), ("T1", self.t1)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if !(self.drive_strength >= 0.0) || !self.drive_strength.is_finite() {
            return Err(Error::InvalidInput(format!(
                "drive strength must be >= 0, got {}",
                self.drive_strength
            )));
        }
        if !(self.stretch_beta > 0.0 && self.stretch_beta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "stretch exponent must lie in (0, 1], got {}",
                self.stretch_beta
            )));
        }
        Ok(())
    }
}

/// Unit-peak Lorentzian of full width `fwhm`.
pub fn lorentzian(f: f64, center: f64, fwhm: f64) -> f64 {
    let x = (f - center) / (0.5 * fwhm);
    1.0 / (1.0 + x * x)
}

/// Unit-peak Gaussian of standard deviation `sigma`.
pub fn gaussian(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp()
}

/// Saturation parameter `s = drive_strength * Lor * Gauss` at drive `f_d` and field `b`.
pub fn saturation_parameter(ens: &EnsembleParams, rates: &RateModelParams, f_d: f64, b: f64) -> f64 {
    let f_spin = ens.g * MU_B * b / H;
    rates.drive_strength * lorentzian(f_d, rates.f_drive_res, rates.kappa) * gaussian(f_d - f_spin, ens.sigma_inh)
}

/// Pump rate `W = s / (2 T1)` (1/s).
pub fn pump_rate(ens: &EnsembleParams, rates: &RateModelParams, f_d: f64, b: f64) -> f64 {
    saturation_parameter(ens, rates, f_d, b) / (2.0 * rates.t1)
}

/// Steady-state magnetization change on a drive-frequency by field grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoToneMap {
    pub f_drive: Vec<f64>,
    pub b_par: Vec<f64>,
    /// `values[i][j]` is `delta_M / M_S` at `f_drive[i]`, `b_par[j]`.
    pub values: Vec<Vec<f64>>,
}

impl TwoToneMap {
    /// Row index of the largest value in column `j`.
    pub fn column_argmax(&self, j: usize) -> usize {
        (0..self.f_drive.len())
            .max_by(|&a, &b| self.values[a][j].total_cmp(&self.values[b][j]))
            .unwrap_or(0)
    }
}

/// `delta_M / M_S = W / (W + 1 / 2T1) * M_eq / M_S` on every cell.
pub fn steady_state_map(
    ens: &EnsembleParams,
    rates: &RateModelParams,
    f_drive_grid: &[f64],
    b_grid: &[f64],
) -> Result<TwoToneMap> {
    ens.validate()?;
    rates.validate()?;
    if f_drive_grid.is_empty() || b_grid.is_empty() {
        return Err(Error::InvalidInput("empty map grid".into()));
    }
    let values = f_drive_grid
        .par_iter()
        .map(|&f| {
            b_grid
                .iter()
                .map(|&b| {
                    let s = saturation_parameter(ens, rates, f, b);
                    s / (1.0 + s) * ens.polarization(b)
                })
                .collect()
        })
        .collect();
    Ok(TwoToneMap {
        f_drive: f_drive_grid.to_vec(),
        b_par: b_grid.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationTrace {
    /// Steady-state fraction of the equilibrium magnetization.
    pub steady_state: f64,
    pub tau_rise: f64,
    pub values: Vec<f64>,
}

/// `delta_M(t) = delta_M_ss (1 - exp(-t / tau_rise))`, `tau_rise = 1 / (W + 1/T1)`.
pub fn simulate_excitation(rates: &RateModelParams, w: f64, t_grid: &[f64]) -> Result<ExcitationTrace> {
    rates.validate()?;
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::InvalidInput(format!("pump rate must be >= 0, got {w}")));
    }
    check_time_grid(t_grid)?;
    let steady_state = w / (w + 0.5 / rates.t1);
    let tau_rise = 1.0 / (w + 1.0 / rates.t1);
    let values = t_grid.iter().map(|&t| -steady_state * (-t / tau_rise).exp_m1()).collect();
    Ok(ExcitationTrace {
        steady_state,
        tau_rise,
        values,
    })
}

/// `exp(-(t / T1)^beta)`.
pub fn simulate_decay(rates: &RateModelParams, t_grid: &[f64]) -> Result<Vec<f64>> {
    rates.validate()?;
    check_time_grid(t_grid)?;
    Ok(t_grid.iter().map(|&t| stretched_exp(t, rates.t1, rates.stretch_beta)).collect())
}

/// Decay samples `(t, exp(-(t / T1)^beta) + N(0, noise_sigma))` from a ChaCha8
/// stream seeded by `seed`; noise is in units of the initial amplitude.
pub fn sample_decay(rates: &RateModelParams, t_grid: &[f64], noise_sigma: f64, seed: u64) -> Result<Vec<(f64, f64)>> {
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidInput(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let clean = simulate_decay(rates, t_grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(t_grid
        .iter()
        .zip(clean)
        .map(|(&t, y)| if noise_sigma > 0.0 { (t, y + normal.sample(&mut rng)) } else { (t, y) })
        .collect())
}

fn stretched_exp(t: f64, tau: f64, beta: f64) -> f64 {
    (-(t / tau).powf(beta)).exp()
}

fn check_time_grid(t: &[f64]) -> Result<()> {
    if t.first().is_some_and(|&t0| t0 < 0.0) {
        return Err(Error::InvalidInput("time grid must start at or after 0".into()));
    }
    if let Some(i) = (1..t.len()).find(|&i| !(t[i] > t[i - 1])) {
        return Err(Error::InvalidInput(format!("time grid not increasing at index {i}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Time at which the fitted curve reaches 1/e (s).
    pub tau_1e: f64,
    pub tau_sigma: f64,
    pub stretch_beta: f64,
    pub beta_sigma: f64,
    /// The samples do not straddle 1/e; `tau_1e` lies outside the data.
    pub extrapolated: bool,
}

pub const MIN_DECAY_SAMPLES: usize = 8;

struct DecayProblem<'a> {
    samples: &'a [(f64, f64)],
}

impl LeastSquaresProblem for DecayProblem<'_> {
    fn n_params(&self) -> usize {
        2
    }

    fn n_residuals(&self) -> usize {
        self.samples.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let (tau, beta) = (p[0].exp(), p[1].exp());
        for (o, &(t, y)) in out.iter_mut().zip(self.samples) {
            *o = stretched_exp(t, tau, beta) - y;
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut nalgebra::DMatrix<f64>) {
        let (tau, beta) = (p[0].exp(), p[1].exp());
        for (i, &(t, _)) in self.samples.iter().enumerate() {
            if t <= 0.0 {
                jac[(i, 0)] = 0.0;
                jac[(i, 1)] = 0.0;
                continue;
            }
            let x = (t / tau).powf(beta);
            let f = (-x).exp();
            jac[(i, 0)] = f * x * beta;
            jac[(i, 1)] = -f * x * (t / tau).ln() * beta;
        }
    }
}

/// Least-squares stretched-exponential fit over `(ln tau, ln beta)`.
///
/// Seven starts log-spaced in `tau` from 1/100 to 10 times the sampled span.
pub fn fit_decay_tau(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < MIN_DECAY_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_DECAY_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
    check_time_grid(&times)?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.1), hi.max(s.1)));
    if hi - lo <= 1e-9 * hi.abs().max(1.0) {
        return Err(Error::NoDecay);
    }
    let span = times[times.len() - 1];
    if !(span > 0.0) {
        return Err(Error::InvalidInput("samples span zero time".into()));
    }
    let problem = DecayProblem { samples };
    let starts = 7;
    let mut best: Option<crate::numerics::LmReport> = None;
    for s in 0..starts {
        let tau = span * 1e-2 * 1e3_f64.powf(s as f64 / (starts - 1) as f64);
        let rep = levenberg_marquardt(&problem, &[tau.ln(), 0.8_f64.ln()], &LmConfig::default());
        if best.as_ref().is_none_or(|b| rep.cost < b.cost) {
            best = Some(rep);
        }
    }
    let rep = best.expect("at least one start");
    if !rep.converged {
        return Err(Error::NotConverged { iterations: rep.iterations });
    }
    let (tau, beta) = (rep.params[0].exp(), rep.params[1].exp());
    if !tau.is_finite() || tau > 1e3 * span {
        return Err(Error::NoDecay);
    }
    let se = rep.std_errors().unwrap_or_else(|| vec![f64::NAN; 2]);
    let inv_e = (-1.0_f64).exp();
    Ok(DecayFit {
        tau_1e: tau,
        tau_sigma: tau * se[0],
        stretch_beta: beta,
        beta_sigma: beta * se[1],
        extrapolated: !(lo <= inv_e && hi >= inv_e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, t_max: f64) -> Vec<f64> {
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn zero_drive_gives_zero_map() {
        let rates = RateModelParams {
            drive_strength: 0.0,
            ..Default::default()
        };
        let m = steady_state_map(&EnsembleParams::default(), &rates, &[9.83e9, 9.84e9], &[0.38, 0.39]).unwrap();
        assert!(m.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn map_is_bounded_by_equilibrium() {
        let ens = EnsembleParams::default();
        let rates = RateModelParams {
            drive_strength: 1e6,
            ..Default::default()
        };
        let b: Vec<f64> = (0..41).map(|i| 0.3 + 0.005 * i as f64).collect();
        let f: Vec<f64> = (0..41).map(|i| 9.82e9 + 1e6 * i as f64).collect();
        let m = steady_state_map(&ens, &rates, &f, &b).unwrap();
        for row in &m.values {
            for (j, &v) in row.iter().enumerate() {
                assert!(v >= 0.0 && v <= ens.polarization(b[j]));
            }
        }
    }

    #[test]
    fn excitation_limits() {
        let rates = RateModelParams::default();
        let w = 3.0;
        let tr = simulate_excitation(&rates, w, &[0.0]).unwrap();
        assert_eq!(tr.values[0], 0.0);
        let late = simulate_excitation(&rates, w, &[30.0 * tr.tau_rise]).unwrap();
        assert!((late.values[0] - tr.steady_state).abs() < 1e-12);
        let stronger = simulate_excitation(&rates, 2.0 * w, &[0.0]).unwrap();
        assert!(stronger.steady_state > tr.steady_state);
        assert!(stronger.tau_rise < tr.tau_rise);
    }

    #[test]
    fn exponential_reaches_inverse_e_at_t1() {
        let rates = RateModelParams {
            stretch_beta: 1.0,
            t1: 0.38,
            ..Default::default()
        };
        let v = simulate_decay(&rates, &[0.0, 0.38]).unwrap();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn decay_fit_round_trip() {
        let rates = RateModelParams::default();
        let t = grid(60, 2.0);
        let y = simulate_decay(&rates, &t).unwrap();
        let samples: Vec<_> = t.into_iter().zip(y).collect();
        let fit = fit_decay_tau(&samples).unwrap();
        assert!((fit.tau_1e / 0.38 - 1.0).abs() < 1e-3);
        assert!((fit.stretch_beta - 0.7).abs() < 1e-3);
        assert!(!fit.extrapolated);
    }

    #[test]
    fn short_window_is_flagged_extrapolated() {
        let rates = RateModelParams::default();
        let t = grid(20, 0.1);
        let y = simulate_decay(&rates, &t).unwrap();
        let samples: Vec<_> = t.into_iter().zip(y).collect();
        let fit = fit_decay_tau(&samples).unwrap();
        assert!(fit.extrapolated);
        assert!((fit.tau_1e / 0.38 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_input_has_no_decay() {
        let samples: Vec<_> = grid(20, 1.0).into_iter().map(|t| (t, 1.0)).collect();
        assert_eq!(fit_decay_tau(&samples), Err(Error::NoDecay));
    }

    #[test]
    fn rejects_bad_rates() {
        for r in [
            RateModelParams { kappa: 0.0, ..Default::default() },
            RateModelParams { t1: -1.0, ..Default::default() },
            RateModelParams { stretch_beta: 1.2, ..Default::default() },
            RateModelParams { stretch_beta: 0.0, ..Default::default() },
        ] {
            assert!(r.validate().is_err());
        }
    }
}
