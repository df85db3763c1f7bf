//! Small dense real/complex matrix kernel.
//!
//! Everything here is sized for the 2x2 .. 12x12 quadrature-space matrices of
//! a few bosonic modes (plus the 36x36 vectorised Lyapunov system). Routines
//! are plain value-semantic functions.

pub(crate) mod eigen;
mod expm;
mod matrix;
mod polar;
mod solve;

pub use eigen::{eig_general, eigvals_general, sqrt_spd, sym_eig, EigenPair, SymEigen};
pub use expm::expm;
pub use matrix::{
    pauli, symplectic_form, symplectic_residual, ComplexMat, Matrix, RealMat, Scalar,
};
pub use polar::{polar, PolarFactors, PolarSide};
pub use solve::{invert, solve};

use thiserror::Error;

/// Numerical tolerances shared by the library and its tests.
pub mod tol {
    /// Pivot magnitude below `SINGULAR_PIVOT_REL * max|a_ij|` is treated as singular.
    pub const SINGULAR_PIVOT_REL: f64 = 1e-12;
    /// Required max-abs residual of `A A^-1 - I`.
    pub const INVERSE_RESIDUAL: f64 = 1e-10;
    /// Max asymmetry accepted by the symmetric eigensolver.
    pub const SYMMETRY: f64 = 1e-12;
    /// Eigenpair residual for symmetric problems.
    pub const SYM_EIG_RESIDUAL: f64 = 1e-9;
    /// Eigenpair residual for general (non-symmetric) problems.
    pub const GENERAL_EIG_RESIDUAL: f64 = 1e-8;
    /// Relative truncation tolerance of the exponential's Taylor core.
    pub const EXPM_REL: f64 = 1e-13;
    /// Residual of polar reconstruction.
    pub const POLAR_RECONSTRUCTION: f64 = 1e-8;
    /// Iteration caps.
    pub const JACOBI_MAX_SWEEPS: usize = 100;
    pub const QR_MAX_ITERATIONS: usize = 1000;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is singular or near-singular: pivot {pivot:e} below threshold {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },
    #[error("matrix is not symmetric: max |m - m^T| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}
