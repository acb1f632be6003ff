//! Small dense complex linear algebra and numerical kernels.

mod eigh;
mod fit;
mod lbfgs;
mod mat;
mod quad;

pub use eigh::{column, eigh, expm_hermitian};
pub use fit::{fit_sin_squared, SinSquaredFit};
pub use lbfgs::{minimize_qn, Minimum, OptimizerOptions};
pub use mat::{
    bloch_rotation, matexp_pauli, outer, pauli_dot, rotation, sigma_x, sigma_y, sigma_z, Mat, Mat2,
    Mat4, C64, I, ONE, ZERO,
};
pub use quad::{bisect, gauss_legendre, quad_adaptive, LogPanels};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("degenerate axis: rotation generator has zero length")]
    DegenerateAxis,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("invalid interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    QuadratureDiverged { estimate: f64, error: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("non-finite value{}", match .index { Some(i) => format!(" at parameter {i}"), None => String::new() })]
    NonFinite { index: Option<usize> },
    #[error("optimizer options out of range")]
    InvalidOptions,
    #[error("no oscillation detected")]
    NoOscillation,
    #[error("bad fit input: {0}")]
    FitInput(String),
}
