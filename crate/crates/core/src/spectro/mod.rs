//! Notch-resonator S21 modeling and fitting, frequency tracking and field alignment.

mod alignment;
mod resonance;
mod tracking;

pub use alignment::{compensate_perp_field, PerpCompensation};
pub use resonance::{fit_resonance, s21_model, ComplexTrace, ResonanceFit, ResonanceModel, ResonanceSigma};
pub use tracking::{track_frequency, TrackFailure, TrackOptions, TrackResult};
