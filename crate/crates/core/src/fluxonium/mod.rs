//! Fluxonium spectrum and single-spin readout through a nanojunction.

mod hamiltonian;
mod junction;
mod sweep;

pub use hamiltonian::{
    displacement_cos_sin, fluxonium_hamiltonian, solve_fluxonium, FluxoniumParams, Spectrum,
    CONVERGENCE_STEP, CONVERGENCE_TOL, MIN_BASIS_DIM,
};
pub use junction::{
    nanojunction_ej, nanojunction_ej_pair, spin_flip_shift, NanojunctionGeometry, SpinReadoutScenario,
};
pub use sweep::{fig4c_sweep, ShiftRow};
