//! Built-in Hamiltonian families with closed-form solutions.

mod gamma;
mod spin;

pub use gamma::{gamma_matrices, pi_matrices, GammaModel, RotatingSolution};
pub use spin::SpinHalfModel;

use crate::error::{Error, Result};
use crate::numerics::{c64, hermitian_eigen, CMatrix, CVector, C64};
use std::f64::consts::PI;

pub(crate) fn pauli() -> [CMatrix; 3] {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

pub(crate) fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Shared parameters of the rotating-field models: `H(t) = (b/2) r(t)·X`
/// with `r = (sinθ cos wt, sinθ sin wt, cosθ)`. The rescaled time runs over
/// `periods` full turns of the field, so `v = w / (2π·periods)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FieldParams {
    pub b: f64,
    pub theta: f64,
    pub w: f64,
    pub periods: f64,
}

impl FieldParams {
    pub fn new(b: f64, theta: f64, w: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("b must be positive, got {b}")));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter(format!("w must be positive, got {w}")));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be finite, got {theta}")));
        }
        Ok(Self {
            b,
            theta,
            w,
            periods: 1.0,
        })
    }

    pub fn with_periods(mut self, periods: f64) -> Result<Self> {
        if !(periods > 0.0 && periods.is_finite()) {
            return Err(Error::InvalidParameter(format!("periods must be positive, got {periods}")));
        }
        self.periods = periods;
        Ok(self)
    }

    pub fn v(&self) -> f64 {
        self.w / (2.0 * PI * self.periods)
    }

    pub fn phase_rate(&self) -> f64 {
        2.0 * PI * self.periods
    }
}

/// `exp(−i t K)` for a fixed Hermitian `K`, diagonalised once.
#[derive(Debug, Clone)]
pub(crate) struct HermitianFlow {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl HermitianFlow {
    pub fn new(k: &CMatrix) -> Self {
        let (values, vectors) = hermitian_eigen(k);
        Self { values, vectors }
    }

    pub fn apply(&self, t: f64, psi: &CVector) -> CVector {
        let mut c = self.vectors.adjoint() * psi;
        for (x, e) in c.iter_mut().zip(&self.values) {
            *x *= C64::from_polar(1.0, -e * t);
        }
        &self.vectors * c
    }
}
