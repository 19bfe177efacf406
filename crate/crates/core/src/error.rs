use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: max |A - A^dag| = {residual:e} exceeds {tol:e}")]
    Hermiticity { residual: f64, tol: f64 },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("quadrature did not converge on [{a}, {b}] within depth {max_depth}")]
    Quadrature { a: f64, b: f64, max_depth: usize },

    #[error("truncation at dim {dim} leaves Poisson tail {tail:e} > {tol:e}; minimal admissible dim is {minimal_dim}")]
    Truncation {
        dim: usize,
        tail: f64,
        tol: f64,
        minimal_dim: usize,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("tolerance violated: {0}")]
    Tolerance(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
