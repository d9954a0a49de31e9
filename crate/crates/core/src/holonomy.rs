//! Wilczek-Zee transport inside a degenerate level, and the first-order
//! corrected non-Abelian phase.

use crate::dapt::{DynamicalPhase, StateFamily};
use crate::error::{Error, Result};
use crate::numerics::{cis, max_abs, unitarity_deviation, unitary_expm, CMatrix, Grid};

const INITIAL_UNITARITY_TOL: f64 = 1e-10;

/// `U^n(s)` on every node of a grid.
#[derive(Debug, Clone)]
pub struct HolonomyPath {
    level: usize,
    grid: Grid,
    unitaries: Vec<CMatrix>,
}

impl HolonomyPath {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn at(&self, node: usize) -> &CMatrix {
        &self.unitaries[node]
    }

    pub fn initial(&self) -> &CMatrix {
        &self.unitaries[0]
    }

    pub fn last(&self) -> &CMatrix {
        self.unitaries.last().expect("grid has at least two nodes")
    }

    pub fn max_unitarity_deviation(&self) -> f64 {
        self.unitaries.iter().map(unitarity_deviation).fold(0.0, f64::max)
    }
}

/// Time-ordered transport `U(s_{k+1}) = U(s_k) · exp(A(s_{k+½}) h)`.
///
/// `midpoint_generators[k]` is `A^{nn}` at the midpoint of interval `k`; later
/// times multiply from the right, so `U(0)` stays leftmost.
pub fn wz_transport(
    level: usize,
    grid: &Grid,
    midpoint_generators: &[CMatrix],
    initial: &CMatrix,
) -> Result<HolonomyPath> {
    if midpoint_generators.len() + 1 != grid.len() {
        return Err(Error::DimensionMismatch {
            context: crate::error::Context::Samples,
            expected: grid.len() - 1,
            found: midpoint_generators.len(),
        });
    }
    let deviation = unitarity_deviation(initial);
    if !initial.is_square() || deviation > INITIAL_UNITARITY_TOL {
        return Err(Error::NonUnitaryInitial { deviation });
    }
    let h = grid.spacing();
    let mut unitaries = Vec::with_capacity(grid.len());
    unitaries.push(initial.clone());
    for a in midpoint_generators {
        let step = unitary_expm(a, h)?;
        let next = unitaries.last().unwrap() * step;
        unitaries.push(next);
    }
    Ok(HolonomyPath {
        level,
        grid: *grid,
        unitaries,
    })
}

/// Midpoint generators approximated by averaging node samples, for callers
/// that only have `A` on the nodes.
pub fn midpoints_from_nodes(nodes: &[CMatrix]) -> Vec<CMatrix> {
    nodes.windows(2).map(|w| (&w[0] + &w[1]).scale(0.5)).collect()
}

/// First-order corrected holonomy of the ground level.
#[derive(Debug, Clone)]
pub struct CorrectedHolonomy {
    pub v: f64,
    pub grid: Grid,
    /// `V⁽⁰⁾(s)`: ground-level coefficients of `Ψ⁽⁰⁾ + vΨ⁽¹⁾` with the
    /// dynamical phase removed, truncated at first order.
    pub v0: Vec<CMatrix>,
    /// `F(s)` with `V⁽⁰⁾ = (1 + vF) U⁽⁰⁾`.
    pub correction: Vec<CMatrix>,
    /// `P(s) = |⟨Ψ⁽⁰⁾|Ψ⟩_N|²` per initial label (rows of the family).
    pub probability: Vec<Vec<f64>>,
    /// `N(s) = 1/‖Ψ⁽⁰⁾ + vΨ⁽¹⁾‖` per initial label.
    pub normalization: Vec<Vec<f64>>,
    /// Excited-level coefficients `c^n(s)` per node and level `n ≥ 1`,
    /// defined by `Ψ_N = … + v e^{−iω_n/v} N c^n |n⟩`; rows are initial labels.
    pub leakage: Vec<Vec<CMatrix>>,
}

impl CorrectedHolonomy {
    pub fn max_unitarity_deviation(&self) -> f64 {
        self.v0.iter().map(unitarity_deviation).fold(0.0, f64::max)
    }

    pub fn unitarity_deviation_at(&self, node: usize) -> f64 {
        unitarity_deviation(&self.v0[node])
    }
}

/// Build `V⁽⁰⁾` from the zeroth- and first-order families of a ground start.
pub fn corrected_holonomy(
    order0: &StateFamily,
    order1: &StateFamily,
    phases: &DynamicalPhase,
    v: f64,
) -> Result<CorrectedHolonomy> {
    if !(v > 0.0) {
        return Err(Error::InvalidParameter(format!("v must be positive, got {v}")));
    }
    if order0.grid() != order1.grid() || order0.dims() != order1.dims() {
        return Err(Error::DimensionMismatch {
            context: crate::error::Context::Levels,
            expected: order0.dims().len(),
            found: order1.dims().len(),
        });
    }
    let dims = order0.dims().to_vec();
    let d0 = dims[0];
    let total: usize = dims.iter().sum();
    let first = &order0.amplitudes()[0];
    let leak = max_abs(&first.view((0, d0), (d0, total - d0)).into_owned());
    if leak > 1e-10 {
        return Err(Error::NotGroundStart { leakage: leak });
    }

    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let grid = *order0.grid();
    let mut v0 = Vec::with_capacity(grid.len());
    let mut correction = Vec::with_capacity(grid.len());
    let mut probability = Vec::with_capacity(grid.len());
    let mut normalization = Vec::with_capacity(grid.len());
    let mut leakage = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let a0 = &order0.amplitudes()[node];
        let a1 = &order1.amplitudes()[node];
        let full = a0 + a1.scale(v);
        let undo0 = cis(phases.omega(0)[node] / v);
        let u = a0.view((0, 0), (d0, d0)).map(|z| z * undo0);
        let vm = full.view((0, 0), (d0, d0)).map(|z| z * undo0);
        correction.push(((&vm - &u) * u.adjoint()).unscale(v));
        let mut p_row = Vec::with_capacity(d0);
        let mut n_row = Vec::with_capacity(d0);
        for h in 0..d0 {
            let row = full.row(h);
            let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let overlap: crate::numerics::C64 = a0
                .row(h)
                .iter()
                .zip(row.iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            p_row.push((overlap / norm).norm_sqr());
            n_row.push(1.0 / norm);
        }
        let mut node_leak = Vec::new();
        for n in 1..dims.len() {
            let undo = cis(phases.omega(n)[node] / v);
            let c = CMatrix::from_fn(d0, dims[n], |h, g| {
                full[(h, offsets[n] + g)] * undo / v
            });
            node_leak.push(c);
        }
        v0.push(vm);
        probability.push(p_row);
        normalization.push(n_row);
        leakage.push(node_leak);
    }
    Ok(CorrectedHolonomy {
        v,
        grid,
        v0,
        correction,
        probability,
        normalization,
        leakage,
    })
}
