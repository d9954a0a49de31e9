//! Dense complex linear algebra at small dimension, plus the quadrature and
//! finite-difference kernels shared by every other module.
//!
//! Units: ħ = 1 everywhere.

mod calculus;
mod expm;
mod grid;

pub use calculus::{central_derivative, cumulative_quadrature, Sample};
pub use expm::{hermitian_eigen, polar_unitary, unitary_expm, ANTI_HERMITIAN_TOL};
pub use grid::Grid;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// The imaginary unit.
pub const IM: C64 = C64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// e^{iθ}
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn anti_hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m + m.adjoint()))
}

/// ‖U†U − I‖ (entrywise max).
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermitian_deviation(m) <= tol
}

pub fn is_anti_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && anti_hermitian_deviation(m) <= tol
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && unitarity_deviation(m) <= tol
}

/// (A − A†)/2
pub fn anti_hermitian_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()).scale(0.5)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Matrix multiplied by a complex scalar.
pub fn scaled(m: &CMatrix, z: C64) -> CMatrix {
    m.map(|x| x * z)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
