use crate::couplings::CouplingSet;
use crate::error::{Context, Error, Result};
use crate::holonomy::HolonomyPath;
use crate::numerics::{
    central_derivative, cumulative_quadrature, identity, unitarity_deviation, vec_norm, CMatrix, CVector, Grid,
    C64, IM,
};
use crate::spectral::SpectralFrame;

const NORMALIZATION_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

/// `Ψ(0) = Σ_n b_n Σ_g [U^n(0)]_{0g} |n^g(0)⟩`.
#[derive(Debug, Clone)]
pub struct InitialCondition {
    amplitudes: Vec<C64>,
    unitaries: Vec<CMatrix>,
}

impl InitialCondition {
    /// All weight in the lowest level, `U^n(0) = 1`.
    pub fn ground(dims: &[usize]) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dims.len()];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self {
            amplitudes,
            unitaries: dims.iter().map(|&d| identity(d)).collect(),
        }
    }

    pub fn new(amplitudes: Vec<C64>, unitaries: Vec<CMatrix>) -> Result<Self> {
        if amplitudes.len() != unitaries.len() {
            return Err(Error::DimensionMismatch {
                context: Context::Levels,
                expected: unitaries.len(),
                found: amplitudes.len(),
            });
        }
        for u in &unitaries {
            let deviation = unitarity_deviation(u);
            if !u.is_square() || deviation > UNITARY_TOL {
                return Err(Error::NonUnitaryInitial { deviation });
            }
        }
        let norm_sq: f64 = amplitudes.iter().map(|b| b.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::BadInitialCondition { norm_sq });
        }
        Ok(Self { amplitudes, unitaries })
    }

    /// Decompose a normalized state on the eigenframe at `s = 0`. Each
    /// `U^n(0)` is completed to a unitary whose first row holds the
    /// normalized components in level `n`.
    pub fn from_state(frame: &SpectralFrame, psi: &CVector) -> Result<Self> {
        if psi.len() != frame.hilbert_dim() {
            return Err(Error::DimensionMismatch {
                context: Context::StateDimension,
                expected: frame.hilbert_dim(),
                found: psi.len(),
            });
        }
        let mut amplitudes = Vec::new();
        let mut unitaries = Vec::new();
        for level in &frame.levels {
            let c = level.block.adjoint() * psi;
            let b = vec_norm(&c);
            let d = level.degeneracy();
            if b < 1e-300 {
                amplitudes.push(C64::new(0.0, 0.0));
                unitaries.push(identity(d));
            } else {
                amplitudes.push(C64::new(b, 0.0));
                unitaries.push(complete_unitary(&c.unscale(b)).transpose());
            }
        }
        Self::new(amplitudes, unitaries)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn dims(&self) -> Vec<usize> {
        self.unitaries.iter().map(|u| u.nrows()).collect()
    }
}

/// Unitary whose first column is the unit vector `u`.
fn complete_unitary(u: &CVector) -> CMatrix {
    let d = u.len();
    let mut cols: Vec<CVector> = vec![u.clone()];
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut x = CVector::zeros(d);
        x[e] = C64::new(1.0, 0.0);
        for c in &cols {
            let p = c.dotc(&x);
            x -= c * p;
        }
        let norm = vec_norm(&x);
        if norm > 1e-6 {
            cols.push(x.unscale(norm));
        }
    }
    CMatrix::from_columns(&cols)
}

fn embed(m: &CMatrix, rows: usize) -> CMatrix {
    let mut out = CMatrix::zeros(rows, m.ncols());
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

/// Blocks `B^{(p)}_{mn}(s)` of one perturbative order. Rows carry the
/// initial-condition label (padded to the largest degeneracy), columns the
/// basis of level `n`.
#[derive(Debug, Clone)]
pub struct CorrectionBlocks {
    order: usize,
    grid: Grid,
    dims: Vec<usize>,
    blocks: Vec<Vec<Vec<CMatrix>>>,
}

impl CorrectionBlocks {
    /// `B^{(0)}_{nn} = b_n U^n(s)`, all off-diagonal blocks zero.
    pub fn zeroth_order(init: &InitialCondition, holonomies: &[HolonomyPath]) -> Result<Self> {
        let dims = init.dims();
        if holonomies.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                context: Context::Levels,
                expected: dims.len(),
                found: holonomies.len(),
            });
        }
        let grid = *holonomies[0].grid();
        let d_max = dims.iter().copied().max().unwrap_or(0);
        let mut blocks = empty_blocks(&dims, d_max, grid.len());
        for (n, hol) in holonomies.iter().enumerate() {
            let b = init.amplitudes()[n];
            for (node, u) in hol.unitaries().iter().enumerate() {
                blocks[n][n][node] = embed(&(u * b), d_max);
            }
        }
        Ok(Self {
            order: 0,
            grid,
            dims,
            blocks,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn d_max(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn block(&self, m: usize, n: usize) -> &[CMatrix] {
        &self.blocks[m][n]
    }

    /// `‖Σ_m B_{mn}(0)‖` maximised over `n`; zero when the initial
    /// condition is met exactly.
    pub fn initial_defect(&self) -> f64 {
        let levels = self.dims.len();
        (0..levels)
            .map(|n| {
                let sum = (0..levels).fold(CMatrix::zeros(self.d_max(), self.dims[n]), |acc, m| {
                    acc + &self.blocks[m][n][0]
                });
                crate::numerics::max_abs(&sum)
            })
            .fold(0.0, f64::max)
    }

    /// Next order from the recursion: off-diagonal blocks algebraically,
    /// diagonal blocks from the constraint ODE.
    pub fn advance(&self, couplings: &CouplingSet, holonomies: &[HolonomyPath]) -> Result<Self> {
        let levels = self.dims.len();
        if couplings.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                context: Context::Levels,
                expected: self.dims.len(),
                found: couplings.dims().len(),
            });
        }
        if couplings.grid() != &self.grid {
            return Err(Error::DimensionMismatch {
                context: Context::Grid,
                expected: self.grid.len(),
                found: couplings.grid().len(),
            });
        }
        let d_max = self.d_max();
        let nodes = self.grid.len();
        let mut next = empty_blocks(&self.dims, d_max, nodes);

        for m in 0..levels {
            for n in (0..levels).filter(|&n| n != m) {
                let deriv = central_derivative(&self.grid, &self.blocks[m][n])?;
                for node in 0..nodes {
                    let mut acc = deriv[node].clone();
                    for k in 0..levels {
                        acc += &self.blocks[m][k][node] * &couplings.recursion(k, n)[node];
                    }
                    let gap = couplings.gap(m, n, node);
                    next[m][n][node] = acc / (IM * gap);
                }
            }
        }

        for n in 0..levels {
            let initial = (0..levels)
                .filter(|&m| m != n)
                .fold(CMatrix::zeros(d_max, self.dims[n]), |acc, m| acc - &next[m][n][0]);
            let forcing: Vec<CMatrix> = (0..nodes)
                .map(|node| {
                    (0..levels).filter(|&k| k != n).fold(
                        CMatrix::zeros(d_max, self.dims[n]),
                        |acc, k| acc - &next[n][k][node] * &couplings.recursion(k, n)[node],
                    )
                })
                .collect();
            next[n][n] = solve_constraint(&initial, &forcing, &holonomies[n])?;
        }

        Ok(Self {
            order: self.order + 1,
            grid: self.grid,
            dims: self.dims.clone(),
            blocks: next,
        })
    }

    pub(crate) fn from_parts(order: usize, grid: Grid, dims: Vec<usize>, blocks: Vec<Vec<Vec<CMatrix>>>) -> Self {
        Self {
            order,
            grid,
            dims,
            blocks,
        }
    }
}

fn empty_blocks(dims: &[usize], d_max: usize, nodes: usize) -> Vec<Vec<Vec<CMatrix>>> {
    dims.iter()
        .map(|_| dims.iter().map(|&dn| vec![CMatrix::zeros(d_max, dn); nodes]).collect())
        .collect()
}

/// Solve `Ḃ = −B 𝐌^{nn} + F` with `B(0)` given, using the transported
/// holonomy `U̇ = −U 𝐌^{nn}`: `B = [B(0)U(0)† + ∫ F U†] U`.
pub fn solve_constraint(initial: &CMatrix, forcing: &[CMatrix], holonomy: &HolonomyPath) -> Result<Vec<CMatrix>> {
    let grid = holonomy.grid();
    if forcing.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            context: Context::Samples,
            expected: grid.len(),
            found: forcing.len(),
        });
    }
    let us = holonomy.unitaries();
    let y0 = initial * us[0].adjoint();
    let integrand: Vec<CMatrix> = forcing.iter().zip(us).map(|(f, u)| f * u.adjoint()).collect();
    let integral = cumulative_quadrature(grid, &integrand)?;
    Ok(integral.iter().zip(us).map(|(y, u)| (&y0 + y) * u).collect())
}

/// `J^{nmn}(s) = ∫₀ˢ U^n 𝐌^{nm} 𝐌^{mn} U^{n†} / Δ_{nm}` for every pair.
#[derive(Debug, Clone)]
pub struct JIntegrals {
    j: Vec<Vec<Vec<CMatrix>>>,
}

impl JIntegrals {
    /// Zero when `m == n`.
    pub fn get(&self, n: usize, m: usize) -> &[CMatrix] {
        &self.j[n][m]
    }

    /// `Σ_{m≠n} J^{nmn}` at one node.
    pub fn summed(&self, n: usize, node: usize) -> CMatrix {
        let d = self.j[n][n][node].nrows();
        self.j[n].iter().fold(CMatrix::zeros(d, d), |acc, series| acc + &series[node])
    }
}

pub fn j_integrals(couplings: &CouplingSet, holonomies: &[HolonomyPath]) -> Result<JIntegrals> {
    let levels = couplings.n_levels();
    let grid = *couplings.grid();
    let dims = couplings.dims();
    let mut j = Vec::with_capacity(levels);
    for n in 0..levels {
        let mut row = Vec::with_capacity(levels);
        for m in 0..levels {
            if m == n {
                row.push(vec![CMatrix::zeros(dims[n], dims[n]); grid.len()]);
                continue;
            }
            let integrand: Vec<CMatrix> = (0..grid.len())
                .map(|k| {
                    let u = holonomies[n].at(k);
                    let w = u * &couplings.recursion(n, m)[k] * &couplings.recursion(m, n)[k] * u.adjoint();
                    w / C64::new(couplings.gap(n, m, k), 0.0)
                })
                .collect();
            row.push(cumulative_quadrature(&grid, &integrand)?);
        }
        j.push(row);
    }
    Ok(JIntegrals { j })
}

/// First-order blocks in closed form:
/// `B_{mn} = i b_m U^m 𝐌^{mn} / Δ_{nm}` for `m ≠ n`, and
/// `B_{nn} = [i b_n Σ_m J^{nmn} − i Σ_m b_m U^m(0)𝐌^{mn}(0)U^n(0)† / Δ_{nm}(0)] U^n`.
pub fn first_order_blocks(
    couplings: &CouplingSet,
    holonomies: &[HolonomyPath],
    init: &InitialCondition,
    j: &JIntegrals,
) -> Result<CorrectionBlocks> {
    let dims = couplings.dims().to_vec();
    let levels = dims.len();
    if init.dims() != dims || holonomies.len() != levels {
        return Err(Error::DimensionMismatch {
            context: Context::Levels,
            expected: levels,
            found: holonomies.len(),
        });
    }
    let grid = *couplings.grid();
    let d_max = dims.iter().copied().max().unwrap_or(0);
    let mut blocks = empty_blocks(&dims, d_max, grid.len());
    let b = init.amplitudes();

    for m in 0..levels {
        for n in (0..levels).filter(|&n| n != m) {
            for k in 0..grid.len() {
                let x = holonomies[m].at(k) * &couplings.recursion(m, n)[k] * (IM * b[m] / couplings.gap(n, m, k));
                blocks[m][n][k] = embed(&x, d_max);
            }
        }
    }

    for n in 0..levels {
        let mut y0 = CMatrix::zeros(d_max, dims[n]);
        for m in (0..levels).filter(|&m| m != n) {
            let w = holonomies[m].initial() * &couplings.recursion(m, n)[0] * holonomies[n].initial().adjoint();
            y0 -= embed(&w, d_max) * (IM * b[m] / couplings.gap(n, m, 0));
        }
        for k in 0..grid.len() {
            let y = &y0 + embed(&(j.summed(n, k) * (IM * b[n])), d_max);
            blocks[n][n][k] = y * holonomies[n].at(k);
        }
    }
    Ok(CorrectionBlocks::from_parts(1, grid, dims, blocks))
}
