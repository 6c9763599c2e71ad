use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dipole singularity: zero displacement from the moment")]
    DipoleSingularity,

    #[error("field exceeds critical field: |B| = {field} T > B_c = {critical} T")]
    FieldExceedsCritical { field: f64, critical: f64 },

    #[error("local field exceeds critical field at junction node ({}, {}, {}): |B| = {field} T", node[0], node[1], node[2])]
    NodeExceedsCritical { node: [usize; 3], field: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient tail points: {found} found beyond {tail_start} T, need at least {needed}")]
    InsufficientTail {
        found: usize,
        needed: usize,
        tail_start: f64,
    },

    #[error("no dip detected in the transmission trace")]
    NoDip,

    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("no interior maximum in [{lo}, {hi}]")]
    NoInteriorMaximum { lo: f64, hi: f64 },

    #[error("samples show no decay")]
    NoDecay,

    #[error("singular normal equations")]
    Singular,

    /// `row` counts data rows from 0, excluding any header.
    #[error("{}{message}", row.map(|r| format!("row {r}: ")).unwrap_or_default())]
    Schema { row: Option<usize>, message: String },

    #[error("i/o: {0}")]
    Io(String),
}
