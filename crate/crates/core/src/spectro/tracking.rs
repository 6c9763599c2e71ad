//! Resonance frequency versus field from a stack of transmission traces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{SweepPoint, SweepTrace};
use crate::error::{Error, Result};

use super::resonance::{fit_resonance, ComplexTrace, ResonanceFit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Start each fit from the previous field point's result.
    pub warm_start: bool,
    /// Fit chunks of this many traces in parallel; warm starts restart at
    /// every chunk boundary.
    pub chunk_size: Option<usize>,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            warm_start: true,
            chunk_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackFailure {
    pub index: usize,
    pub b_par: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackResult {
    /// Successful points only, `delta_f = f_r(B) - f_r(B_0)`.
    pub sweep: SweepTrace,
    /// One entry per input trace.
    pub fits: Vec<Option<ResonanceFit>>,
    pub failures: Vec<TrackFailure>,
}

/// Fits every trace and reports shifts relative to the first field point.
///
/// Uncertainties add the two fits' `f_r` sigmas in quadrature; the reference
/// row has zero uncertainty. Failed points are listed in `failures` and
/// omitted from the sweep; a failure at the first point is an error.
pub fn track_frequency(traces: &[(f64, ComplexTrace)], opts: &TrackOptions) -> Result<TrackResult> {
    if traces.is_empty() {
        return Err(Error::InvalidInput("no traces to track".into()));
    }
    if let Some(i) = (1..traces.len()).find(|&i| !(traces[i].0 > traces[i - 1].0)) {
        return Err(Error::Schema {
            row: Some(i),
            message: "B_par not strictly increasing".into(),
        });
    }
    let chunk = opts.chunk_size.unwrap_or(traces.len()).max(1);
    let fits: Vec<Result<ResonanceFit>> = traces
        .par_chunks(chunk)
        .flat_map_iter(|part| {
            let mut prev: Option<ResonanceFit> = None;
            part.iter()
                .map(|(_, tr)| {
                    let guess = if opts.warm_start { prev.map(|p| p.model) } else { None };
                    let fit = fit_resonance(tr, guess.as_ref()).or_else(|e| match guess {
                        Some(_) => fit_resonance(tr, None),
                        None => Err(e),
                    });
                    if let Ok(f) = &fit {
                        prev = Some(*f);
                    }
                    fit
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let reference = match &fits[0] {
        Ok(f) => *f,
        Err(e) => return Err(e.clone()),
    };
    let mut points = Vec::with_capacity(traces.len());
    let mut failures = Vec::new();
    let mut kept = Vec::with_capacity(traces.len());
    for (i, fit) in fits.into_iter().enumerate() {
        let b_par = traces[i].0;
        match fit {
            Ok(f) => {
                let sigma_f = if i == 0 {
                    0.0
                } else {
                    f.sigma.f_r.hypot(reference.sigma.f_r)
                };
                points.push(SweepPoint {
                    b_par,
                    delta_f: f.model.f_r - reference.model.f_r,
                    sigma_f: if sigma_f.is_finite() { sigma_f } else { 0.0 },
                });
                kept.push(Some(f));
            }
            Err(e) => {
                failures.push(TrackFailure {
                    index: i,
                    b_par,
                    error: e.to_string(),
                });
                kept.push(None);
            }
        }
    }
    Ok(TrackResult {
        sweep: SweepTrace::new(points, reference.model.f_r)?,
        fits: kept,
        failures,
    })
}
