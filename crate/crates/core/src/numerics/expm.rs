use nalgebra::SymmetricEigen;

use super::{anti_hermitian_deviation, cis, max_abs, CMatrix, C64, IM};
use crate::error::{Error, Result};

/// Relative tolerance on ‖A + A†‖ accepted by [`unitary_expm`].
pub const ANTI_HERMITIAN_TOL: f64 = 1e-8;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 1 {
        return (vec![h[(0, 0)].re], CMatrix::identity(1, 1));
    }
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// exp(A·dt) for anti-Hermitian `A`, through the eigendecomposition of the
/// Hermitian matrix `iA`. The result is unitary to roundoff.
pub fn unitary_expm(a: &CMatrix, dt: f64) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::InvalidParameter(format!(
            "generator must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = anti_hermitian_deviation(a);
    if deviation > ANTI_HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotAntiHermitian { deviation });
    }
    let n = a.nrows();
    if n == 1 {
        return Ok(CMatrix::from_element(1, 1, cis(a[(0, 0)].im * dt)));
    }
    // A = -iH with H = iA Hermitian, so exp(A dt) = V diag(e^{-iλ dt}) V†.
    let h = a.map(|z| z * IM);
    let h = (&h + h.adjoint()).scale(0.5);
    let (values, vectors) = hermitian_eigen(&h);
    let mut scaled_vectors = vectors.clone();
    for (k, lambda) in values.iter().enumerate() {
        let phase = cis(-lambda * dt);
        scaled_vectors.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(scaled_vectors * vectors.adjoint())
}

/// Unitary factor `W V†` of the singular-value decomposition `M = W Σ V†`,
/// together with the smallest singular value.
pub fn polar_unitary(m: &CMatrix) -> (CMatrix, f64) {
    if m.nrows() == 1 && m.ncols() == 1 {
        let z = m[(0, 0)];
        let r = z.norm();
        let u = if r > 0.0 { z / r } else { C64::new(1.0, 0.0) };
        return (CMatrix::from_element(1, 1, u), r);
    }
    let svd = m.clone().svd(true, true);
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let w = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    (w * v_t, sigma_min)
}
