//! Snapshot eigensystems of H(s) grouped into degenerate levels, and gauge
//! smoothing of the eigenvector blocks along the grid.

use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_deviation, hermitian_eigen, max_abs, polar_unitary, CMatrix, Grid,
};
use crate::source::HamiltonianSource;

/// Default relative threshold for grouping eigenvalues into one level.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Smallest singular value of a frame overlap accepted by [`smooth_gauge`].
pub const MIN_OVERLAP_SINGULAR: f64 = 0.5;

const HERMITIAN_TOL: f64 = 1e-12;

/// One degenerate level: its energy and the orthonormal eigenvectors
/// `|n^g⟩` as columns of `block`.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub block: CMatrix,
}

impl Level {
    pub fn degeneracy(&self) -> usize {
        self.block.ncols()
    }
}

/// Eigensystem of H at one value of `s`, levels sorted by energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrame {
    pub s: f64,
    pub levels: Vec<Level>,
}

impl SpectralFrame {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(Level::degeneracy).collect()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.levels[0].block.nrows()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// All eigenvectors side by side, level by level.
    pub fn basis(&self) -> CMatrix {
        let rows = self.hilbert_dim();
        let cols: usize = self.levels.iter().map(Level::degeneracy).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut c0 = 0;
        for level in &self.levels {
            let d = level.degeneracy();
            out.columns_mut(c0, d).copy_from(&level.block);
            c0 += d;
        }
        out
    }

    pub fn projector(&self, level: usize) -> CMatrix {
        let b = &self.levels[level].block;
        b * b.adjoint()
    }

    /// Worst deviation from orthonormality within and across levels.
    pub fn orthonormality_deviation(&self) -> f64 {
        let b = self.basis();
        let n = b.ncols();
        max_abs(&(b.adjoint() * &b - CMatrix::identity(n, n)))
    }
}

/// Snapshot frames on every node of a grid, with constant level structure.
#[derive(Debug, Clone)]
pub struct SpectralPath {
    grid: Grid,
    frames: Vec<SpectralFrame>,
    dims: Vec<usize>,
}

impl SpectralPath {
    pub fn new(grid: Grid, frames: Vec<SpectralFrame>) -> Result<Self> {
        grid.check_len(frames.len())?;
        let dims = frames[0].dims();
        for f in &frames {
            let found = f.dims();
            if found != dims {
                return Err(Error::DegeneracyChanged {
                    s: f.s,
                    expected: dims,
                    found,
                });
            }
            if f.levels.windows(2).any(|w| w[1].energy <= w[0].energy) {
                return Err(Error::InvalidParameter(format!(
                    "levels at s = {} are not strictly increasing in energy",
                    f.s
                )));
            }
        }
        Ok(Self { grid, frames, dims })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn frames(&self) -> &[SpectralFrame] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &SpectralFrame {
        &self.frames[k]
    }

    /// Degeneracies `d_n`, constant along the path.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Degeneracy of the most degenerate level.
    pub fn d_max(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn n_levels(&self) -> usize {
        self.dims.len()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.frames[0].hilbert_dim()
    }

    /// Column offset of each level inside [`SpectralFrame::basis`].
    pub fn offsets(&self) -> Vec<usize> {
        self.dims
            .iter()
            .scan(0, |acc, d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect()
    }

    pub fn blocks(&self, level: usize) -> Vec<CMatrix> {
        self.frames.iter().map(|f| f.levels[level].block.clone()).collect()
    }

    pub fn energies(&self, level: usize) -> Vec<f64> {
        self.frames.iter().map(|f| f.levels[level].energy).collect()
    }

    /// Every other frame; inverse of sampling on [`Grid::refine`].
    pub fn coarsen(&self) -> Option<SpectralPath> {
        let grid = self.grid.coarsen()?;
        let frames = self.frames.iter().step_by(2).cloned().collect();
        Some(SpectralPath {
            grid,
            frames,
            dims: self.dims.clone(),
        })
    }

    /// Apply one constant unitary per level, `block → block·W_n`, with `W_n`
    /// chosen so that the first frame best matches `reference`. When the
    /// reference spans the same subspaces the first frame becomes the
    /// reference exactly.
    pub fn align_to(&self, reference: &SpectralFrame) -> Result<SpectralPath> {
        if reference.dims() != self.dims {
            return Err(Error::DegeneracyChanged {
                s: reference.s,
                expected: self.dims.clone(),
                found: reference.dims(),
            });
        }
        let rotations: Vec<CMatrix> = self.frames[0]
            .levels
            .iter()
            .zip(&reference.levels)
            .map(|(mine, target)| polar_unitary(&(mine.block.adjoint() * &target.block)).0)
            .collect();
        Ok(self.rotate(&rotations))
    }

    /// `block_n → block_n · rotations[n]` at every node.
    pub fn rotate(&self, rotations: &[CMatrix]) -> SpectralPath {
        let frames = self
            .frames
            .iter()
            .map(|f| SpectralFrame {
                s: f.s,
                levels: f
                    .levels
                    .iter()
                    .zip(rotations)
                    .map(|(l, w)| Level {
                        energy: l.energy,
                        block: &l.block * w,
                    })
                    .collect(),
            })
            .collect();
        SpectralPath {
            grid: self.grid,
            frames,
            dims: self.dims.clone(),
        }
    }
}

/// Diagonalize one Hermitian matrix and cluster its spectrum.
///
/// Neighbouring eigenvalues join a level when
/// `|E_i − E_j| ≤ tol · max(1, |E_i|)`.
pub fn eigen_frame(h: &CMatrix, s: f64, degeneracy_tol: f64) -> Result<SpectralFrame> {
    let deviation = hermitian_deviation(h);
    if deviation > HERMITIAN_TOL * max_abs(h).max(1.0) {
        return Err(Error::NonHermitianInput { s, deviation });
    }
    let symmetric = (h + h.adjoint()).scale(0.5);
    let (values, vectors) = hermitian_eigen(&symmetric);
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len()
            || (values[i] - values[i - 1]).abs() > degeneracy_tol * values[i - 1].abs().max(1.0);
        if split {
            clusters.push((start, i - start));
            start = i;
        }
    }
    let levels = clusters
        .into_iter()
        .map(|(c0, d)| Level {
            energy: values[c0..c0 + d].iter().sum::<f64>() / d as f64,
            block: vectors.columns(c0, d).into_owned(),
        })
        .collect();
    Ok(SpectralFrame { s, levels })
}

/// Eigensystems of `H(s)` at every grid node, in the raw gauge of the
/// eigensolver.
pub fn snapshot_eigensystem(
    source: &dyn HamiltonianSource,
    grid: &Grid,
    degeneracy_tol: f64,
) -> Result<SpectralPath> {
    if !(degeneracy_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "degeneracy tolerance must be positive, got {degeneracy_tol}"
        )));
    }
    let frames = grid
        .points()
        .map(|s| eigen_frame(&source.hamiltonian(s), s, degeneracy_tol))
        .collect::<Result<Vec<_>>>()?;
    SpectralPath::new(*grid, frames)
}

/// Frames supplied by the model itself, if it has them.
pub fn analytic_path(source: &dyn HamiltonianSource, grid: &Grid) -> Option<Result<SpectralPath>> {
    let frames: Option<Vec<SpectralFrame>> = grid.points().map(|s| source.frame(s)).collect();
    frames.map(|f| SpectralPath::new(*grid, f))
}

/// Discrete parallel transport of every level's frame.
///
/// Frame `k+1` is right-multiplied by the unitary that makes its overlap with
/// (already smoothed) frame `k` Hermitian positive definite. Frame 0 is kept.
pub fn smooth_gauge(path: &SpectralPath) -> Result<SpectralPath> {
    let mut frames = path.frames.clone();
    for k in 1..frames.len() {
        let (done, rest) = frames.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for (n, (p, c)) in prev.levels.iter().zip(cur.levels.iter_mut()).enumerate() {
            let overlap = p.block.adjoint() * &c.block;
            let (w, sigma_min) = polar_unitary(&overlap);
            if sigma_min < MIN_OVERLAP_SINGULAR {
                return Err(Error::RankDeficientOverlap {
                    level: n,
                    s: path.grid.point(k),
                    sigma_min,
                });
            }
            c.block = &c.block * w.adjoint();
        }
    }
    Ok(SpectralPath {
        grid: path.grid,
        frames,
        dims: path.dims.clone(),
    })
}
