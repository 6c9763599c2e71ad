//! Physical constants, magnetostatics and the closed-form material laws.

pub mod constants;
mod field;
mod laws;

pub use field::{dipole_field, DipoleMoment, Polarity, Vec3Field};
pub use laws::{
    esr_field, esr_frequency, gap_suppression_ratio, kinetic_inductance, longitudinal_coupling,
    paramagnetic_magnetization, polarization, KineticInductance, MaterialParams,
};
pub(crate) use laws::gap_ratio_from_magnitude;
