use super::{CorrectionBlocks, DynamicalPhase};
use crate::error::{Context, Error, Result};
use crate::numerics::{cis, CMatrix, CVector, Grid};
use crate::spectral::SpectralPath;

/// Amplitudes of a family of solutions in the instantaneous eigenbasis.
///
/// Row `h` of `amplitudes()[k]` is the state with initial label `h` at node
/// `k`; column `(n, g)` (levels concatenated) is the coefficient on `|n^g(s)⟩`.
#[derive(Debug, Clone)]
pub struct StateFamily {
    order: Option<usize>,
    grid: Grid,
    dims: Vec<usize>,
    amplitudes: Vec<CMatrix>,
}

impl StateFamily {
    pub fn new(order: Option<usize>, grid: Grid, dims: Vec<usize>, amplitudes: Vec<CMatrix>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                context: Context::Samples,
                expected: grid.len(),
                found: amplitudes.len(),
            });
        }
        let total: usize = dims.iter().sum();
        if let Some(bad) = amplitudes.iter().find(|a| a.ncols() != total) {
            return Err(Error::DimensionMismatch {
                context: Context::StateDimension,
                expected: total,
                found: bad.ncols(),
            });
        }
        Ok(Self {
            order,
            grid,
            dims,
            amplitudes,
        })
    }

    /// Perturbative order, `None` for a partial sum.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[CMatrix] {
        &self.amplitudes
    }

    pub fn rows(&self) -> usize {
        self.amplitudes[0].nrows()
    }

    /// State vectors in the original basis for initial label `row`.
    pub fn to_computational(&self, path: &SpectralPath, row: usize) -> Result<Vec<CVector>> {
        if path.grid() != &self.grid {
            return Err(Error::DimensionMismatch {
                context: Context::Grid,
                expected: self.grid.len(),
                found: path.grid().len(),
            });
        }
        if path.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                context: Context::Levels,
                expected: self.dims.len(),
                found: path.dims().len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(path.frames())
            .map(|(a, f)| f.basis() * a.row(row).transpose())
            .collect())
    }
}

/// `Ψ^{(p)} = Σ_{n,m} e^{−iω_m/v} B^{(p)}_{mn} |n⟩`.
pub fn assemble_state(blocks: &CorrectionBlocks, phases: &DynamicalPhase, v: f64) -> Result<StateFamily> {
    if !(v > 0.0) {
        return Err(Error::InvalidParameter(format!("v must be positive, got {v}")));
    }
    let grid = *blocks.grid();
    if phases.grid() != &grid {
        return Err(Error::DimensionMismatch {
            context: Context::Grid,
            expected: grid.len(),
            found: phases.grid().len(),
        });
    }
    let dims = blocks.dims().to_vec();
    let levels = dims.len();
    let total: usize = dims.iter().sum();
    let rows = blocks.d_max();
    let amplitudes = (0..grid.len())
        .map(|k| {
            let mut a = CMatrix::zeros(rows, total);
            let mut col = 0;
            for n in 0..levels {
                let mut acc = CMatrix::zeros(rows, dims[n]);
                for m in 0..levels {
                    acc += &blocks.block(m, n)[k] * cis(-phases.omega(m)[k] / v);
                }
                a.columns_mut(col, dims[n]).copy_from(&acc);
                col += dims[n];
            }
            a
        })
        .collect();
    StateFamily::new(Some(blocks.order()), grid, dims, amplitudes)
}

/// Partial sum `Σ_p v^p Ψ^{(p)}` of families given in increasing order.
pub fn series_state(families: &[StateFamily], v: f64) -> Result<StateFamily> {
    let first = families
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty series".into()))?;
    let mut amplitudes = first.amplitudes.clone();
    let mut weight = 1.0;
    for fam in &families[1..] {
        if fam.grid != first.grid || fam.dims != first.dims {
            return Err(Error::DimensionMismatch {
                context: Context::Levels,
                expected: first.dims.len(),
                found: fam.dims.len(),
            });
        }
        weight *= v;
        for (acc, x) in amplitudes.iter_mut().zip(&fam.amplitudes) {
            *acc += x * crate::numerics::c64(weight, 0.0);
        }
    }
    StateFamily::new(None, first.grid, first.dims.clone(), amplitudes)
}
