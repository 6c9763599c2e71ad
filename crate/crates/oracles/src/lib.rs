//! Reference computations that share no code with `kiq-core`.
//!
//! Everything here is deliberately plain: slow, dependency-free, and built
//! on a different discretisation or formula than the library route it checks.

pub mod circle;
pub mod phase_grid;
