//! Dense real and complex kernels: QR with phase fixing, Pfaffians, the matrix
//! exponential and the principal logarithm on SO(2n).

mod expm;
mod pfaffian;
mod qr;
mod so;

pub use expm::matrix_exp;
pub use pfaffian::{pfaffian, pfaffian_real};
pub use qr::{qr_unitary, qr_unitary_real};
pub use so::{logm_special_orthogonal, so_normal_form, NormalForm};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type RMatrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on antisymmetry accepted by [`pfaffian`].
pub const ANTISYMMETRY_TOL: f64 = 1e-10;
/// Tolerance used when checking membership of SO(2n).
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Largest absolute entry.
pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// `max |M†M - I|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && unitarity_residual(m) < tol
}

pub fn is_special_orthogonal(m: &RMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    max_abs_real(&(m.transpose() * m - RMatrix::identity(n, n))) < tol
        && (m.determinant() - 1.0).abs() < tol.max(1e-12) * n as f64
}

pub fn is_antisymmetric(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m + m.transpose())) < tol
}

pub fn is_antisymmetric_real(m: &RMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_real(&(m + m.transpose())) < tol
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) < tol
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// The standard symplectic form `⊕_j [[0, 1], [-1, 0]]` on `2n` modes.
pub fn symplectic_form(modes: usize) -> RMatrix {
    let mut j = RMatrix::zeros(modes, modes);
    for p in (0..modes).step_by(2) {
        j[(p, p + 1)] = 1.0;
        j[(p + 1, p)] = -1.0;
    }
    j
}
