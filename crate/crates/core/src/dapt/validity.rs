use super::{DynamicalPhase, JIntegrals};
use crate::couplings::CouplingSet;
use crate::error::{Context, Error, Result};
use crate::holonomy::HolonomyPath;
use crate::numerics::{cis, Grid};

pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

/// Left-hand sides of the two adiabaticity conditions for a start in the
/// first ground-level state.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub v: f64,
    pub threshold: f64,
    pub grid: Grid,
    /// `q1[g][node] = v |[Σ_n J^{0n0} U^0]_{0g}|`
    pub q1: Vec<Vec<f64>>,
    /// `q2[n−1][g][node]` for each excited level `n`.
    pub q2: Vec<Vec<Vec<f64>>>,
    pub q1_sup: Vec<f64>,
    pub q2_sup: Vec<Vec<f64>>,
    pub q1_end: Vec<f64>,
    pub q2_end: Vec<Vec<f64>>,
    pub adiabatic_ok: bool,
}

impl ValidityReport {
    /// Largest margin over every condition and every `s`.
    pub fn max_sup(&self) -> f64 {
        self.q1_sup
            .iter()
            .chain(self.q2_sup.iter().flatten())
            .copied()
            .fold(0.0, f64::max)
    }

    /// Largest margin at `s = 1`.
    pub fn max_end(&self) -> f64 {
        self.q1_end
            .iter()
            .chain(self.q2_end.iter().flatten())
            .copied()
            .fold(0.0, f64::max)
    }
}

fn sup(series: &[f64]) -> f64 {
    series.iter().copied().fold(0.0, f64::max)
}

pub fn validity_margins(
    couplings: &CouplingSet,
    holonomies: &[HolonomyPath],
    j: &JIntegrals,
    phases: &DynamicalPhase,
    v: f64,
    threshold: f64,
) -> Result<ValidityReport> {
    if !(v > 0.0) || !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "v and threshold must be positive, got v = {v}, threshold = {threshold}"
        )));
    }
    let dims = couplings.dims();
    let levels = dims.len();
    if holonomies.len() != levels || phases.n_levels() != levels {
        return Err(Error::DimensionMismatch {
            context: Context::Levels,
            expected: levels,
            found: holonomies.len(),
        });
    }
    let grid = *couplings.grid();
    let nodes = grid.len();

    let mut q1 = vec![vec![0.0; nodes]; dims[0]];
    for k in 0..nodes {
        let x = j.summed(0, k) * holonomies[0].at(k);
        for (g, series) in q1.iter_mut().enumerate() {
            series[k] = v * x[(0, g)].norm();
        }
    }

    let u0_init = holonomies[0].initial();
    let mut q2 = Vec::with_capacity(levels.saturating_sub(1));
    for n in 1..levels {
        let w0 = u0_init * &couplings.recursion(0, n)[0] * holonomies[n].initial().adjoint();
        let gap0 = couplings.gap(n, 0, 0);
        let mut per_g = vec![vec![0.0; nodes]; dims[n]];
        for k in 0..nodes {
            let local = holonomies[0].at(k) * &couplings.recursion(0, n)[k] / crate::numerics::c64(couplings.gap(n, 0, k), 0.0);
            let boundary = &w0 * holonomies[n].at(k) * (cis(-phases.relative(n, 0, k) / v) / gap0);
            for (g, series) in per_g.iter_mut().enumerate() {
                series[k] = v * (local[(0, g)] - boundary[(0, g)]).norm();
            }
        }
        q2.push(per_g);
    }

    let q1_sup: Vec<f64> = q1.iter().map(|s| sup(s)).collect();
    let q1_end: Vec<f64> = q1.iter().map(|s| s[nodes - 1]).collect();
    let q2_sup: Vec<Vec<f64>> = q2.iter().map(|l| l.iter().map(|s| sup(s)).collect()).collect();
    let q2_end: Vec<Vec<f64>> = q2.iter().map(|l| l.iter().map(|s| s[nodes - 1]).collect()).collect();
    let adiabatic_ok = q1_sup.iter().chain(q2_sup.iter().flatten()).all(|&x| x <= threshold);
    Ok(ValidityReport {
        v,
        threshold,
        grid,
        q1,
        q2,
        q1_sup,
        q2_sup,
        q1_end,
        q2_end,
        adiabatic_ok,
    })
}
