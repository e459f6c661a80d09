use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("point {point:?} lies outside chart `{chart}`")]
    Domain { chart: String, point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("c = {c} is not in the {expected} family")]
    Family { c: f64, expected: &'static str },

    #[error("degenerate plane: |X|^2|Y|^2 - <X,Y>^2 = {denominator:e}")]
    DegeneratePlane { denominator: f64 },

    #[error("primitive mismatch: max |dα - ω| = {residual:e}")]
    PrimitiveMismatch { residual: f64 },

    #[error("deformed transverse form not positive: min eigenvalue {eigenvalue:e} at {point:?}")]
    DeformationTooLarge { eigenvalue: f64, point: Vec<f64> },

    #[error("function is not basic: max |df(R)| = {residual:e}")]
    NotBasic { residual: f64 },

    #[error("line bundle model: {0}")]
    Model(String),

    #[error("quadrature did not converge: relative change {change:e} > {tol:e} at level {level}")]
    Quadrature { change: f64, tol: f64, level: usize },

    #[error("invalid state: {0}")]
    State(String),

    #[error("truncation tail bound {bound:e} exceeds tolerance {tol:e}")]
    Truncation { bound: f64, tol: f64 },

    #[error("sampling in `{chart}` accepted only {accepted} of {drawn} draws")]
    Sampling {
        chart: String,
        accepted: usize,
        drawn: usize,
    },

    #[error("degenerate alignment: cross-correlation has rank {rank} < {expected}")]
    DegenerateAlignment { rank: usize, expected: usize },

    #[error("alignment residual {residual:e} on holdout exceeds {limit:e}")]
    AlignmentMismatch { residual: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
