//! End-to-end construction: frames, couplings, transport and correction
//! blocks for one Hamiltonian on one grid.

use crate::couplings::{couplings, gap_floor, hamiltonian_derivative, CouplingSet, DEFAULT_GAP_FLOOR_REL};
use crate::dapt::{
    assemble_state, first_order_blocks, j_integrals, series_state, validity_margins, CorrectionBlocks,
    DynamicalPhase, InitialCondition, JIntegrals, StateFamily, ValidityReport,
};
use crate::error::{Context, Error, Result};
use crate::holonomy::{corrected_holonomy, wz_transport, CorrectedHolonomy, HolonomyPath};
use crate::numerics::{CMatrix, CVector, Grid};
use crate::source::HamiltonianSource;
use crate::spectral::{
    analytic_path, smooth_gauge, snapshot_eigensystem, SpectralFrame, SpectralPath, DEFAULT_DEGENERACY_TOL,
};

/// How eigenframes are obtained.
#[derive(Debug, Clone, Default)]
pub enum FrameMode {
    /// The source's own frames when it has them, numerical ones otherwise.
    #[default]
    Auto,
    /// Always diagonalize numerically and smooth the gauge.
    Numeric,
    /// Numerical frames, rotated so that the frame at `s = 0` matches a
    /// reference.
    NumericAligned(SpectralFrame),
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub degeneracy_tol: f64,
    pub gap_floor_rel: f64,
    /// Highest perturbative order computed.
    pub order_cap: usize,
    pub frames: FrameMode,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            gap_floor_rel: DEFAULT_GAP_FLOOR_REL,
            order_cap: 2,
            frames: FrameMode::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitialSpec {
    Ground,
    Condition(InitialCondition),
    /// A normalized state in the original basis at `s = 0`.
    State(CVector),
}

/// Everything the series needs, independent of `v`.
#[derive(Debug, Clone)]
pub struct Dapt {
    path: SpectralPath,
    couplings: CouplingSet,
    holonomies: Vec<HolonomyPath>,
    phases: DynamicalPhase,
    init: InitialCondition,
    j: JIntegrals,
    blocks: Vec<CorrectionBlocks>,
}

impl Dapt {
    /// Build on an `n`-node grid. Frames and couplings are evaluated on the
    /// refined grid so that transport can use interval midpoints.
    pub fn build(source: &dyn HamiltonianSource, n: usize, init: InitialSpec, options: &PipelineOptions) -> Result<Self> {
        if !(options.degeneracy_tol > 0.0) || !(options.gap_floor_rel > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        let grid = Grid::uniform(n)?;
        if n < 3 {
            return Err(Error::GridTooSmall { len: n, min: 3 });
        }
        let fine = grid.refine();
        let numeric = || -> Result<SpectralPath> { smooth_gauge(&snapshot_eigensystem(source, &fine, options.degeneracy_tol)?) };
        let path = match &options.frames {
            FrameMode::Auto => match analytic_path(source, &fine) {
                Some(p) => p?,
                None => numeric()?,
            },
            FrameMode::Numeric => numeric()?,
            FrameMode::NumericAligned(reference) => numeric()?.align_to(reference)?,
        };
        let h_dot = hamiltonian_derivative(source, &fine)?;
        let floor = gap_floor(&path, options.gap_floor_rel);
        let cs = couplings(&path, &h_dot, floor)?;
        Self::from_fine(&path, &cs, init, options.order_cap)
    }

    /// Build from frames and couplings sampled on a refined grid
    /// (`2n − 1` nodes, odd nodes at the midpoints of the working grid).
    pub fn from_fine(fine_path: &SpectralPath, fine: &CouplingSet, init: InitialSpec, order_cap: usize) -> Result<Self> {
        let path = fine_path
            .coarsen()
            .ok_or(Error::GridTooSmall { len: fine_path.grid().len(), min: 5 })?;
        let cs = fine.coarsen().ok_or(Error::GridTooSmall { len: fine.grid().len(), min: 5 })?;
        let grid = *path.grid();
        let dims = path.dims().to_vec();
        let init = match init {
            InitialSpec::Ground => InitialCondition::ground(&dims),
            InitialSpec::Condition(c) => {
                if c.dims() != dims {
                    return Err(Error::DimensionMismatch {
                        context: Context::Levels,
                        expected: dims.len(),
                        found: c.dims().len(),
                    });
                }
                c
            }
            InitialSpec::State(psi) => InitialCondition::from_state(path.frame(0), &psi)?,
        };
        let holonomies = (0..dims.len())
            .map(|n| {
                let generators: Vec<CMatrix> = fine.midpoints(n, n).expect("refined grid").into_iter().map(|m| -m).collect();
                wz_transport(n, &grid, &generators, &init.unitaries()[n])
            })
            .collect::<Result<Vec<_>>>()?;
        let phases = crate::dapt::dynamical_phase(&cs)?;
        let j = j_integrals(&cs, &holonomies)?;
        let mut blocks = vec![CorrectionBlocks::zeroth_order(&init, &holonomies)?];
        for _ in 0..order_cap {
            let next = blocks.last().unwrap().advance(&cs, &holonomies)?;
            blocks.push(next);
        }
        Ok(Self {
            path,
            couplings: cs,
            holonomies,
            phases,
            init,
            j,
            blocks,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.path.grid()
    }

    pub fn path(&self) -> &SpectralPath {
        &self.path
    }

    pub fn couplings(&self) -> &CouplingSet {
        &self.couplings
    }

    pub fn holonomies(&self) -> &[HolonomyPath] {
        &self.holonomies
    }

    pub fn phases(&self) -> &DynamicalPhase {
        &self.phases
    }

    pub fn initial_condition(&self) -> &InitialCondition {
        &self.init
    }

    pub fn j(&self) -> &JIntegrals {
        &self.j
    }

    pub fn order_cap(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self, order: usize) -> &CorrectionBlocks {
        &self.blocks[order]
    }

    /// `Ψ^{(p)}` for one value of `v`.
    pub fn state(&self, order: usize, v: f64) -> Result<StateFamily> {
        let blocks = self.blocks.get(order).ok_or_else(|| {
            Error::InvalidParameter(format!("order {order} exceeds the computed cap {}", self.order_cap()))
        })?;
        assemble_state(blocks, &self.phases, v)
    }

    /// `Σ_{p ≤ order} v^p Ψ^{(p)}`.
    pub fn series(&self, order: usize, v: f64) -> Result<StateFamily> {
        let parts = (0..=order).map(|p| self.state(p, v)).collect::<Result<Vec<_>>>()?;
        series_state(&parts, v)
    }

    /// Rows of a family as vectors in the original basis.
    pub fn computational(&self, family: &StateFamily, row: usize) -> Result<Vec<CVector>> {
        family.to_computational(&self.path, row)
    }

    /// First order from the closed-form block expressions instead of the
    /// recursion.
    pub fn first_order_explicit(&self) -> Result<CorrectionBlocks> {
        first_order_blocks(&self.couplings, &self.holonomies, &self.init, &self.j)
    }

    pub fn validity(&self, v: f64, threshold: f64) -> Result<ValidityReport> {
        validity_margins(&self.couplings, &self.holonomies, &self.j, &self.phases, v, threshold)
    }

    /// First-order corrected holonomy; needs a ground start and order ≥ 1.
    pub fn corrected_holonomy(&self, v: f64) -> Result<CorrectedHolonomy> {
        corrected_holonomy(&self.state(0, v)?, &self.state(1, v)?, &self.phases, v)
    }

    /// Holonomy of a closed loop expressed in the frame at `s = 0`:
    /// `U(1) Oᵀ` with `O_{g'g} = ⟨n^{g'}(0)|n^g(1)⟩`. Equals `U(1)` when the
    /// frames close on themselves.
    pub fn cyclic_holonomy(&self, level: usize) -> CMatrix {
        let first = &self.path.frame(0).levels[level].block;
        let last = &self.path.frames().last().unwrap().levels[level].block;
        let overlap = first.adjoint() * last;
        self.holonomies[level].last() * overlap.transpose()
    }
}
