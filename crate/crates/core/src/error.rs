use thiserror::Error;

/// Errors raised by the synthesis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("weight vector is zero")]
    ZeroWeight,

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),

    #[error(
        "quadrature did not converge: max entry change {max_change:.3e} at {n_theta}x{n_phi} nodes"
    )]
    QuadratureNotConverged {
        max_change: f64,
        n_theta: usize,
        n_phi: usize,
    },

    #[error("constraint matrix has rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("linear system is numerically singular: {0}")]
    Singular(String),

    #[error("norm ball is infeasible: minimum-norm feasible point has |w|^2 = {min_norm_sq:.6e} > b = {bound:.6e}")]
    InfeasibleBall { min_norm_sq: f64, bound: f64 },

    #[error("multiplier bisection failed: {0}")]
    BisectionFailure(String),

    #[error("over-constrained design: N = {n}, M = {m} leaves m_max = {m_max}")]
    OverConstrained { n: usize, m: usize, m_max: i64 },

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("sidelobe region is empty")]
    EmptySidelobeRegion,
}

pub type Result<T> = std::result::Result<T, Error>;
