//! Coupling matrices between eigenvector blocks.
//!
//! Two index layouts appear in the theory and both are exposed:
//!
//! * entry layout, `M^{nm}_{h g} = ⟨n^h| d/ds m^g⟩`, shape `d_n × d_m`
//!   ([`CouplingSet::entry`]);
//! * recursion layout, `[𝐌^{kn}]_{h g} = ⟨n^g| d/ds k^h⟩ = M^{nk}_{g h}`,
//!   shape `d_k × d_n`, which is what multiplies the correction blocks from
//!   the right ([`CouplingSet::recursion`]).
//!
//! Storage is in the recursion layout; `entry` transposes.

use crate::error::{Error, Result};
use crate::numerics::{anti_hermitian_part, central_derivative, max_abs, CMatrix, Grid};
use crate::source::HamiltonianSource;
use crate::spectral::SpectralPath;

/// Relative gap floor: gaps below `DEFAULT_GAP_FLOOR_REL · max|E|` are refused.
pub const DEFAULT_GAP_FLOOR_REL: f64 = 1e-6;

/// Coupling matrices on every node of a grid.
#[derive(Debug, Clone)]
pub struct CouplingSet {
    grid: Grid,
    dims: Vec<usize>,
    energies: Vec<Vec<f64>>,
    // recursion[k][n][node] = 𝐌^{kn}
    recursion: Vec<Vec<Vec<CMatrix>>>,
    hermitian_defect: f64,
}

impl CouplingSet {
    fn zeros(path: &SpectralPath) -> Self {
        let dims = path.dims().to_vec();
        let n_nodes = path.grid().len();
        let recursion = dims
            .iter()
            .map(|&dk| {
                dims.iter()
                    .map(|&dn| vec![CMatrix::zeros(dk, dn); n_nodes])
                    .collect()
            })
            .collect();
        Self {
            grid: *path.grid(),
            energies: (0..dims.len()).map(|n| path.energies(n)).collect(),
            dims,
            recursion,
            hermitian_defect: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_levels(&self) -> usize {
        self.dims.len()
    }

    /// `𝐌^{kn}` at every node, `[𝐌^{kn}]_{h_k g_n} = ⟨n^{g_n}| d/ds k^{h_k}⟩`.
    pub fn recursion(&self, k: usize, n: usize) -> &[CMatrix] {
        &self.recursion[k][n]
    }

    /// `M^{nm}` at one node in the entry layout, `M^{nm}_{h g} = ⟨n^h| d/ds m^g⟩`.
    pub fn entry(&self, n: usize, m: usize, node: usize) -> CMatrix {
        self.recursion[m][n][node].transpose()
    }

    pub fn energy(&self, n: usize, node: usize) -> f64 {
        self.energies[n][node]
    }

    /// `Δ_{mn}(s) = E_m(s) − E_n(s)`
    pub fn gap(&self, m: usize, n: usize, node: usize) -> f64 {
        self.energies[m][node] - self.energies[n][node]
    }

    /// Largest Hermitian part removed from the finite-difference `M^{nn}`
    /// before it was stored; O(h²) for a smooth orthonormal frame.
    pub fn diagonal_hermitian_defect(&self) -> f64 {
        self.hermitian_defect
    }

    /// Diagonal blocks of `self`, off-diagonal blocks of `offdiag`.
    pub fn merge(offdiag: &CouplingSet, diag: &CouplingSet) -> Result<CouplingSet> {
        if offdiag.dims != diag.dims || offdiag.grid != diag.grid {
            return Err(Error::DimensionMismatch {
                context: crate::error::Context::Levels,
                expected: offdiag.dims.len(),
                found: diag.dims.len(),
            });
        }
        let mut out = offdiag.clone();
        for n in 0..out.dims.len() {
            out.recursion[n][n] = diag.recursion[n][n].clone();
        }
        out.hermitian_defect = diag.hermitian_defect;
        Ok(out)
    }

    /// Even nodes of a set computed on a refined grid.
    pub fn coarsen(&self) -> Option<CouplingSet> {
        let grid = self.grid.coarsen()?;
        Some(CouplingSet {
            grid,
            dims: self.dims.clone(),
            energies: self
                .energies
                .iter()
                .map(|e| e.iter().step_by(2).copied().collect())
                .collect(),
            recursion: self
                .recursion
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|series| series.iter().step_by(2).cloned().collect())
                        .collect()
                })
                .collect(),
            hermitian_defect: self.hermitian_defect,
        })
    }

    /// Odd nodes of a set computed on a refined grid, i.e. `𝐌^{kn}` at the
    /// interval midpoints of the coarse grid.
    pub fn midpoints(&self, k: usize, n: usize) -> Option<Vec<CMatrix>> {
        self.grid.coarsen()?;
        Some(self.recursion[k][n].iter().skip(1).step_by(2).cloned().collect())
    }

    /// Entrywise conjugates `A^{nm} = (M^{nm})^*`, same indexing.
    pub fn to_a(&self) -> ConnectionSet {
        let levels = self.dims.len();
        let a = (0..levels)
            .map(|n| {
                (0..levels)
                    .map(|m| self.recursion[m][n].iter().map(|x| x.adjoint()).collect())
                    .collect()
            })
            .collect();
        ConnectionSet {
            grid: self.grid,
            dims: self.dims.clone(),
            a,
        }
    }

    /// Largest violation of `M^{nm} = −(M^{mn})†` over all pairs and nodes.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.dims.len() {
            for n in 0..self.dims.len() {
                for (a, b) in self.recursion[k][n].iter().zip(&self.recursion[n][k]) {
                    worst = worst.max(max_abs(&(a + b.adjoint())));
                }
            }
        }
        worst
    }
}

/// `A^{nm}_{h g} = (M^{nm}_{h g})^*` on every node.
#[derive(Debug, Clone)]
pub struct ConnectionSet {
    grid: Grid,
    dims: Vec<usize>,
    a: Vec<Vec<Vec<CMatrix>>>,
}

impl ConnectionSet {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn block(&self, n: usize, m: usize) -> &[CMatrix] {
        &self.a[n][m]
    }
}

/// Smallest admissible gap for a path: `rel · max_{n,s} |E_n(s)|`.
pub fn gap_floor(path: &SpectralPath, rel: f64) -> f64 {
    let max_e = path
        .frames()
        .iter()
        .flat_map(|f| f.levels.iter().map(|l| l.energy.abs()))
        .fold(0.0, f64::max);
    rel * max_e
}

/// dH/ds on the grid: closed form when the source has it, else central
/// differences of the samples.
pub fn hamiltonian_derivative(source: &dyn HamiltonianSource, grid: &Grid) -> Result<Vec<CMatrix>> {
    let analytic: Option<Vec<CMatrix>> = grid.points().map(|s| source.derivative(s)).collect();
    match analytic {
        Some(d) => Ok(d),
        None => {
            let samples: Vec<CMatrix> = grid.points().map(|s| source.hamiltonian(s)).collect();
            central_derivative(grid, &samples)
        }
    }
}

/// Off-diagonal couplings from the gap formula,
/// `⟨n^g| d/ds k^h⟩ = ⟨n^g|Ḣ|k^h⟩ / Δ_{kn}`. Diagonal blocks are left zero.
pub fn coupling_offdiag(path: &SpectralPath, h_dot: &[CMatrix], gap_floor: f64) -> Result<CouplingSet> {
    path.grid().check_len(h_dot.len())?;
    let mut cs = CouplingSet::zeros(path);
    let levels = cs.dims.len();
    for (node, (frame, hd)) in path.frames().iter().zip(h_dot).enumerate() {
        for k in 0..levels {
            for n in 0..levels {
                if k == n {
                    continue;
                }
                let gap = frame.levels[k].energy - frame.levels[n].energy;
                if gap.abs() <= gap_floor {
                    return Err(Error::GapCollapse {
                        s: frame.s,
                        lower: k.min(n),
                        upper: k.max(n),
                        gap: gap.abs(),
                    });
                }
                let nb = &frame.levels[n].block;
                let kb = &frame.levels[k].block;
                let elements = nb.adjoint() * hd * kb;
                cs.recursion[k][n][node] = elements.transpose().unscale(gap);
            }
        }
    }
    Ok(cs)
}

/// Intra-level couplings `⟨n^g| d/ds n^h⟩` from central differences of the
/// frame blocks. The path must be gauge-smooth. Only the anti-Hermitian part
/// is kept; the discarded Hermitian part is reported by
/// [`CouplingSet::diagonal_hermitian_defect`].
pub fn coupling_diag(path: &SpectralPath) -> Result<CouplingSet> {
    let mut cs = CouplingSet::zeros(path);
    let mut defect: f64 = 0.0;
    for n in 0..cs.dims.len() {
        let blocks = path.blocks(n);
        let derivs = central_derivative(path.grid(), &blocks)?;
        for (node, (b, db)) in blocks.iter().zip(&derivs).enumerate() {
            let raw = (b.adjoint() * db).transpose();
            let projected = anti_hermitian_part(&raw);
            defect = defect.max(max_abs(&(&raw - &projected)));
            cs.recursion[n][n][node] = projected;
        }
    }
    cs.hermitian_defect = defect;
    Ok(cs)
}

/// Full coupling set: gap formula off the diagonal, frame derivatives on it.
pub fn couplings(path: &SpectralPath, h_dot: &[CMatrix], gap_floor: f64) -> Result<CouplingSet> {
    CouplingSet::merge(&coupling_offdiag(path, h_dot, gap_floor)?, &coupling_diag(path)?)
}
