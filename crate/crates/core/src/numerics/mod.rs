//! Small numerical toolbox shared by the fitting modules.

mod golden;
mod lsq;

pub use golden::{golden_iteration_bound, golden_section_max, GoldenMax};
pub use lsq::{
    levenberg_marquardt, numerical_jacobian, weighted_linear_fit, LeastSquaresProblem, LinearFit,
    LmConfig, LmReport,
};
