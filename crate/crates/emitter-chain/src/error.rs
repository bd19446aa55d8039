use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A lattice sum that could not reach the requested tolerance. `partial`
    /// is the best available value and `achieved` its error estimate, which is
    /// infinite when the series diverges.
    #[error(
        "lattice sum did not converge: achieved tolerance {achieved:e} after {truncation} terms (partial value {partial})"
    )]
    NotConverged {
        partial: Complex64,
        achieved: f64,
        truncation: usize,
    },

    #[error("G̃_d − G̃_2d is not purely imaginary: real part {real_part:e}")]
    NotImaginary { real_part: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("ambiguous eigenvalue clustering: clusters {gap:e} apart at tolerance {tolerance:e}; change the tolerance")]
    AmbiguousClustering { gap: f64, tolerance: f64 },

    #[error("ambiguous edge-state candidates: states {first} and {second} have boundary weights {weight_first:.6} and {weight_second:.6}")]
    AmbiguousEdge {
        first: usize,
        second: usize,
        weight_first: f64,
        weight_second: f64,
    },

    #[error("edge block not identified at N = {0}")]
    EdgeNotFound(usize),

    #[error("tail not algebraic on this window (r² = {r_squared:.4})")]
    TailNotAlgebraic { r_squared: f64 },

    #[error("band tracking lost at λ = {lambda}: overlap {overlap:.3}; refine grid")]
    TrackingLost { lambda: f64, overlap: f64 },

    #[error("line gap closed (g² = {g_sq}, h² = {h_sq}); Q undefined")]
    LineGapClosed { g_sq: f64, h_sq: f64 },

    #[error("input not in SSH form: chiral residual {0:e}")]
    NotChiral(f64),

    #[error("residual norm {residual:e} still above threshold at t = {t_max}; increase t_max")]
    ResidualNorm { residual: f64, t_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
