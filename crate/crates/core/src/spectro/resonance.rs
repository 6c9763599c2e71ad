//! Notch-type resonator transmission and its complex least-squares fit.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{levenberg_marquardt, LeastSquaresProblem, LmConfig};

/// `S21 = amp e^{i alpha} e^{-2 pi i f delay} [1 - (Q_l/Q_c) e^{i phi0} / (1 + 2i Q_l (f/f_r - 1))]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceModel {
    pub f_r: f64,
    pub q_i: f64,
    pub q_c: f64,
    /// Impedance-mismatch rotation of the resonance circle (rad).
    pub phi0: f64,
    pub amp: f64,
    /// Environmental phase at zero frequency (rad), in (-pi, pi].
    pub alpha: f64,
    /// Cable delay (s).
    pub delay: f64,
}

impl ResonanceModel {
    pub fn new(f_r: f64, q_i: f64, q_c: f64) -> Result<Self> {
        let m = Self {
            f_r,
            q_i,
            q_c,
            phi0: 0.0,
            amp: 1.0,
            alpha: 0.0,
            delay: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("f_r", self.f_r), ("Q_i", self.q_i), ("Q_c", self.q_c), ("amp", self.amp)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if ![self.phi0, self.alpha, self.delay].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite resonance parameter".into()));
        }
        Ok(())
    }

    /// Loaded quality factor `(1/Q_i + 1/Q_c)^-1`.
    pub fn q_l(&self) -> f64 {
        1.0 / (1.0 / self.q_i + 1.0 / self.q_c)
    }

    pub fn s21(&self, f: f64) -> Complex64 {
        let ql = self.q_l();
        let env = Complex64::from_polar(self.amp, self.alpha - 2.0 * PI * f * self.delay);
        let k = Complex64::from_polar(ql / self.q_c, self.phi0);
        let d = Complex64::new(1.0, 2.0 * ql * (f / self.f_r - 1.0));
        env * (1.0 - k / d)
    }
}

/// `S21` of `m` at `f`.
pub fn s21_model(m: &ResonanceModel, f: f64) -> Complex64 {
    m.s21(f)
}

/// A transmission trace with strictly increasing frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    freqs: Vec<f64>,
    s21: Vec<Complex64>,
}

impl ComplexTrace {
    pub fn new(freqs: Vec<f64>, s21: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != s21.len() {
            return Err(Error::InvalidInput(format!(
                "{} frequencies but {} samples",
                freqs.len(),
                s21.len()
            )));
        }
        for i in 0..freqs.len() {
            if !freqs[i].is_finite() || !s21[i].re.is_finite() || !s21[i].im.is_finite() {
                return Err(Error::Schema {
                    row: Some(i),
                    message: "non-finite value".into(),
                });
            }
            if i > 0 && !(freqs[i] > freqs[i - 1]) {
                return Err(Error::Schema {
                    row: Some(i),
                    message: format!("frequency not strictly increasing ({} after {})", freqs[i], freqs[i - 1]),
                });
            }
        }
        Ok(Self { freqs, s21 })
    }

    /// Samples `m` on `freqs`.
    pub fn from_model(m: &ResonanceModel, freqs: Vec<f64>) -> Result<Self> {
        let s21 = freqs.iter().map(|&f| m.s21(f)).collect();
        Self::new(freqs, s21)
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn s21(&self) -> &[Complex64] {
        &self.s21
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Every sample multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            freqs: self.freqs.clone(),
            s21: self.s21.iter().map(|z| z * c).collect(),
        }
    }
}

/// One-sigma uncertainties from the fit covariance.
///
/// They reflect white noise only and understate Fano-interference systematics on `q_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSigma {
    pub f_r: f64,
    pub q_i: f64,
    pub q_c: f64,
    pub phi0: f64,
    pub amp: f64,
    pub alpha: f64,
    pub delay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFit {
    pub model: ResonanceModel,
    pub sigma: ResonanceSigma,
    pub iterations: usize,
    /// RMS of the stacked (Re, Im) residuals.
    pub residual_rms: f64,
}

/// Internal parameters `[f_r, ln Q_i, ln Q_c, phi0, ln amp, alpha_ref, delay]`,
/// with `alpha_ref` the environmental phase at `f_ref`.
struct NotchProblem<'a> {
    trace: &'a ComplexTrace,
    f_ref: f64,
}

struct Terms {
    env: Complex64,
    k: Complex64,
    d: Complex64,
    ql: f64,
    qi: f64,
    qc: f64,
}

impl NotchProblem<'_> {
    fn terms(&self, p: &[f64], f: f64) -> Terms {
        let (qi, qc) = (p[1].exp(), p[2].exp());
        let ql = 1.0 / (1.0 / qi + 1.0 / qc);
        Terms {
            env: Complex64::from_polar(p[4].exp(), p[5] - 2.0 * PI * (f - self.f_ref) * p[6]),
            k: Complex64::from_polar(ql / qc, p[3]),
            d: Complex64::new(1.0, 2.0 * ql * (f / p[0] - 1.0)),
            ql,
            qi,
            qc,
        }
    }

    fn to_internal(&self, m: &ResonanceModel) -> [f64; 7] {
        let alpha_ref = m.alpha - 2.0 * PI * self.f_ref * m.delay;
        [m.f_r, m.q_i.ln(), m.q_c.ln(), m.phi0, m.amp.ln(), alpha_ref, m.delay]
    }

    fn to_model(&self, p: &[f64]) -> ResonanceModel {
        ResonanceModel {
            f_r: p[0],
            q_i: p[1].exp(),
            q_c: p[2].exp(),
            phi0: wrap_phase(p[3]),
            amp: p[4].exp(),
            alpha: wrap_phase(p[5] + 2.0 * PI * self.f_ref * p[6]),
            delay: p[6],
        }
    }
}

fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

impl LeastSquaresProblem for NotchProblem<'_> {
    fn n_params(&self) -> usize {
        7
    }

    fn n_residuals(&self) -> usize {
        2 * self.trace.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let n = self.trace.len();
        for (i, (&f, &z)) in self.trace.freqs.iter().zip(&self.trace.s21).enumerate() {
            let t = self.terms(p, f);
            let r = t.env * (1.0 - t.k / t.d) - z;
            out[i] = r.re;
            out[n + i] = r.im;
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
        let n = self.trace.len();
        let i_unit = Complex64::i();
        for (i, &f) in self.trace.freqs.iter().enumerate() {
            let Terms { env, k, d, ql, qi, qc } = self.terms(p, f);
            let kd = k / d;
            let s = env * (1.0 - kd);
            let dd_dql = Complex64::new(0.0, 2.0 * (f / p[0] - 1.0));
            // d(K/D)/dQ_x = K_x / D - K / D^2 * dD/dQ_l * dQ_l/dQ_x
            let dql_dqi = ql * ql / (qi * qi);
            let dql_dqc = ql * ql / (qc * qc);
            let dk_dqi = k * (dql_dqi / ql);
            let dk_dqc = k * (dql_dqc / ql - 1.0 / qc);
            let dkd_dqi = dk_dqi / d - kd / d * dd_dql * dql_dqi;
            let dkd_dqc = dk_dqc / d - kd / d * dd_dql * dql_dqc;
            let dd_dfr = Complex64::new(0.0, -2.0 * ql * f / (p[0] * p[0]));
            let cols = [
                env * kd / d * dd_dfr,
                -env * dkd_dqi * qi,
                -env * dkd_dqc * qc,
                -env * i_unit * kd,
                s,
                i_unit * s,
                -2.0 * PI * (f - self.f_ref) * i_unit * s,
            ];
            for (j, c) in cols.iter().enumerate() {
                jac[(i, j)] = c.re;
                jac[(n + i, j)] = c.im;
            }
        }
    }
}

/// Complex least-squares fit of the notch model.
///
/// Without a guess the fit starts from an estimate built from the trace:
/// cable delay from the phase slope of the outer tenth on each side, the
/// off-resonant level from the same edges, resonance at the largest
/// deviation from that level, and `Q_l` from the half-power width.
pub fn fit_resonance(trace: &ComplexTrace, guess: Option<&ResonanceModel>) -> Result<ResonanceFit> {
    if trace.len() < 10 {
        return Err(Error::InvalidInput(format!("need at least 10 points, got {}", trace.len())));
    }
    // dip detection runs even when a guess is supplied
    let estimate = initial_estimate(trace)?;
    let start = match guess {
        Some(g) => {
            g.validate()?;
            *g
        }
        None => estimate,
    };
    let f_ref = 0.5 * (trace.freqs[0] + trace.freqs[trace.len() - 1]);
    let problem = NotchProblem { trace, f_ref };
    let p0 = problem.to_internal(&start);
    let rep = levenberg_marquardt(&problem, &p0, &LmConfig::default());
    if !rep.converged {
        return Err(Error::NotConverged {
            iterations: rep.iterations,
        });
    }
    let model = problem.to_model(&rep.params);
    model.validate()?;
    let se = rep.std_errors().unwrap_or_else(|| vec![f64::NAN; 7]);
    let sigma = ResonanceSigma {
        f_r: se[0],
        q_i: model.q_i * se[1],
        q_c: model.q_c * se[2],
        phi0: se[3],
        amp: model.amp * se[4],
        alpha: {
            // alpha = alpha_ref + 2 pi f_ref delay
            let cov = rep.covariance.as_ref();
            let s2 = rep.residual_variance();
            let w = 2.0 * PI * f_ref;
            cov.map(|c| ((c[(5, 5)] + 2.0 * w * c[(5, 6)] + w * w * c[(6, 6)]) * s2).max(0.0).sqrt())
                .unwrap_or(f64::NAN)
        },
        delay: se[6],
    };
    Ok(ResonanceFit {
        model,
        sigma,
        iterations: rep.iterations,
        residual_rms: (rep.cost / rep.n_residuals as f64).sqrt(),
    })
}

fn unwrapped_phase(z: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(z.len());
    let mut offset = 0.0;
    let mut prev = z[0].arg();
    out.push(prev);
    for w in &z[1..] {
        let a = w.arg();
        let step = a - prev;
        if step > PI {
            offset -= 2.0 * PI;
        } else if step < -PI {
            offset += 2.0 * PI;
        }
        prev = a;
        out.push(a + offset);
    }
    out
}

fn initial_estimate(trace: &ComplexTrace) -> Result<ResonanceModel> {
    let n = trace.len();
    let f = &trace.freqs;
    let z = &trace.s21;
    if z.iter().any(|w| w.norm() == 0.0) {
        return Err(Error::NoDip);
    }
    let edge = (n / 10).max(3);
    let edges: Vec<usize> = (0..edge).chain(n - edge..n).collect();
    let f_ref = 0.5 * (f[0] + f[n - 1]);

    let phase = unwrapped_phase(z);
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &i in &edges {
        let x = f[i] - f_ref;
        sx += x;
        sy += phase[i];
        sxx += x * x;
        sxy += x * phase[i];
    }
    let m = edges.len() as f64;
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let delay = -slope / (2.0 * PI);

    let undelayed: Vec<Complex64> = (0..n)
        .map(|i| z[i] * Complex64::from_polar(1.0, 2.0 * PI * (f[i] - f_ref) * delay))
        .collect();
    let level = edges.iter().map(|&i| undelayed[i]).sum::<Complex64>() / m;
    if level.norm() == 0.0 {
        return Err(Error::NoDip);
    }
    let dev: Vec<f64> = undelayed.iter().map(|w| (1.0 - w / level).norm()).collect();
    let (imax, &diameter) = dev
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut edge_dev: Vec<f64> = edges.iter().map(|&i| dev[i]).collect();
    edge_dev.sort_by(f64::total_cmp);
    let floor = edge_dev[edge_dev.len() / 2];
    if !(diameter > 1e-6) || diameter < 5.0 * floor {
        return Err(Error::NoDip);
    }

    let half = diameter * std::f64::consts::FRAC_1_SQRT_2;
    let mut lo = imax;
    while lo > 0 && dev[lo] >= half {
        lo -= 1;
    }
    let mut hi = imax;
    while hi < n - 1 && dev[hi] >= half {
        hi += 1;
    }
    if dev[lo] >= half || dev[hi] >= half {
        return Err(Error::NoDip);
    }
    let cross = |a: usize, b: usize| {
        let t = (half - dev[a]) / (dev[b] - dev[a]);
        f[a] + t * (f[b] - f[a])
    };
    let width = cross(hi, hi - 1) - cross(lo, lo + 1);
    if !(width > 0.0) {
        return Err(Error::NoDip);
    }
    let f_r = f[imax];
    let q_l = f_r / width;
    let ratio = diameter.min(0.999);
    let q_c = q_l / ratio;
    let inv_qi = 1.0 / q_l - 1.0 / q_c;
    let q_i = if inv_qi > 0.0 { 1.0 / inv_qi } else { 100.0 * q_l };
    let phi0 = (1.0 - undelayed[imax] / level).arg();
    let alpha_ref = level.arg();
    Ok(ResonanceModel {
        f_r,
        q_i,
        q_c,
        phi0,
        amp: level.norm(),
        alpha: wrap_phase(alpha_ref + 2.0 * PI * f_ref * delay),
        delay,
    })
}
