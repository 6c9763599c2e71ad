//! Spin-ensemble field sweeps, magnetization extraction and rate dynamics.

mod dynamics;
mod extract;
mod sweep;

pub use dynamics::{
    fit_decay_tau, gaussian, lorentzian, pump_rate, sample_decay, saturation_parameter, simulate_decay, simulate_excitation,
    steady_state_map, DecayFit, ExcitationTrace, RateModelParams, TwoToneMap, MIN_DECAY_SAMPLES,
};
pub use extract::{
    extract_magnetization, ExtractionOptions, ExtractionResult, MagnetizationPoint, ZeemanConstraint,
    DEFAULT_EXCLUSION, DEFAULT_TAIL_START, MIN_TAIL_POINTS,
};
pub use sweep::{linear_grid, synthesize_sweep, AvoidedCrossing, EnsembleParams, SweepPoint, SweepTrace};
