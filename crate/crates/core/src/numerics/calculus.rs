use super::{CMatrix, CVector, Grid, C64};
use crate::error::{Error, Result};

/// Values that can be combined linearly by the grid kernels.
pub trait Sample: Clone {
    fn zeroed(&self) -> Self;
    /// `self += alpha * other`
    fn add_scaled(&mut self, alpha: f64, other: &Self);
    /// `self += other`, carrying the rounding error in `comp`.
    fn compensated_add(&mut self, comp: &mut Self, other: &Self);
}

fn two_sum(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
    *sum = t;
}

fn two_sum_c64(sum: &mut C64, comp: &mut C64, x: &C64) {
    two_sum(&mut sum.re, &mut comp.re, x.re);
    two_sum(&mut sum.im, &mut comp.im, x.im);
}

impl Sample for f64 {
    fn zeroed(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        *self += alpha * other;
    }
    fn compensated_add(&mut self, comp: &mut Self, other: &Self) {
        two_sum(self, comp, *other);
    }
}

impl Sample for C64 {
    fn zeroed(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        *self += other * alpha;
    }
    fn compensated_add(&mut self, comp: &mut Self, other: &Self) {
        two_sum_c64(self, comp, other);
    }
}

impl Sample for CMatrix {
    fn zeroed(&self) -> Self {
        CMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        self.zip_apply(other, |a, b| *a += b * alpha);
    }
    fn compensated_add(&mut self, comp: &mut Self, other: &Self) {
        for ((s, c), x) in self.iter_mut().zip(comp.iter_mut()).zip(other.iter()) {
            two_sum_c64(s, c, x);
        }
    }
}

impl Sample for CVector {
    fn zeroed(&self) -> Self {
        CVector::zeros(self.len())
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        self.zip_apply(other, |a, b| *a += b * alpha);
    }
    fn compensated_add(&mut self, comp: &mut Self, other: &Self) {
        for ((s, c), x) in self.iter_mut().zip(comp.iter_mut()).zip(other.iter()) {
            two_sum_c64(s, c, x);
        }
    }
}

fn combine<T: Sample>(terms: &[(f64, &T)]) -> T {
    let mut out = terms[0].1.zeroed();
    for (alpha, x) in terms {
        out.add_scaled(*alpha, x);
    }
    out
}

fn require_samples<T>(grid: &Grid, f: &[T]) -> Result<()> {
    if f.len() < 3 {
        return Err(Error::GridTooSmall { len: f.len(), min: 3 });
    }
    grid.check_len(f.len())
}

/// Running integral `F(s_k) = ∫₀^{s_k} f`, with `F(0) = 0`.
///
/// Even nodes carry the composite Simpson sum. Odd nodes (and the last
/// interval of an even-length grid) add a single interval integrated with the
/// quadratic through three neighbouring samples, so every node is exact for
/// quadratics.
pub fn cumulative_quadrature<T: Sample>(grid: &Grid, f: &[T]) -> Result<Vec<T>> {
    require_samples(grid, f)?;
    let n = f.len();
    let h = grid.spacing();
    let mut out = Vec::with_capacity(n);
    out.push(f[0].zeroed());
    // long grids and large 1/v prefactors downstream make plain running sums
    // lose digits, so the even-node sum is compensated
    let mut sum = f[0].zeroed();
    let mut comp = f[0].zeroed();
    let corrected = |sum: &T, comp: &T| {
        let mut x = sum.clone();
        x.add_scaled(1.0, comp);
        x
    };
    let mut k = 0;
    while k + 2 < n {
        let base = corrected(&sum, &comp);
        let mut odd = base;
        // ∫_{s_k}^{s_{k+1}} of the quadratic through k, k+1, k+2
        odd.add_scaled(5.0 * h / 12.0, &f[k]);
        odd.add_scaled(8.0 * h / 12.0, &f[k + 1]);
        odd.add_scaled(-h / 12.0, &f[k + 2]);
        let mut step = f[k].zeroed();
        step.add_scaled(h / 3.0, &f[k]);
        step.add_scaled(4.0 * h / 3.0, &f[k + 1]);
        step.add_scaled(h / 3.0, &f[k + 2]);
        sum.compensated_add(&mut comp, &step);
        out.push(odd);
        out.push(corrected(&sum, &comp));
        k += 2;
    }
    if out.len() < n {
        // ∫_{s_{n-2}}^{s_{n-1}} of the quadratic through n-3, n-2, n-1
        let mut last = out[n - 2].clone();
        last.add_scaled(-h / 12.0, &f[n - 3]);
        last.add_scaled(8.0 * h / 12.0, &f[n - 2]);
        last.add_scaled(5.0 * h / 12.0, &f[n - 1]);
        out.push(last);
    }
    Ok(out)
}

/// Second-order finite-difference derivative: central in the interior,
/// one-sided three-point at both ends.
pub fn central_derivative<T: Sample>(grid: &Grid, f: &[T]) -> Result<Vec<T>> {
    require_samples(grid, f)?;
    let n = f.len();
    let inv = 1.0 / (2.0 * grid.spacing());
    let mut out = Vec::with_capacity(n);
    out.push(combine(&[(-3.0 * inv, &f[0]), (4.0 * inv, &f[1]), (-inv, &f[2])]));
    for k in 1..n - 1 {
        out.push(combine(&[(inv, &f[k + 1]), (-inv, &f[k - 1])]));
    }
    out.push(combine(&[
        (3.0 * inv, &f[n - 1]),
        (-4.0 * inv, &f[n - 2]),
        (inv, &f[n - 3]),
    ]));
    Ok(out)
}
