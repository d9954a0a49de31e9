use crate::couplings::CouplingSet;
use crate::error::Result;
use crate::numerics::{cumulative_quadrature, Grid};

/// `ω_n(s) = ∫₀ˢ E_n`, with the convention `ω_n(0) = 0`.
#[derive(Debug, Clone)]
pub struct DynamicalPhase {
    grid: Grid,
    omega: Vec<Vec<f64>>,
}

impl DynamicalPhase {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn omega(&self, level: usize) -> &[f64] {
        &self.omega[level]
    }

    /// `ω_{mn} = ω_m − ω_n` at one node.
    pub fn relative(&self, m: usize, n: usize, node: usize) -> f64 {
        self.omega[m][node] - self.omega[n][node]
    }

    pub fn n_levels(&self) -> usize {
        self.omega.len()
    }
}

pub fn dynamical_phase(couplings: &CouplingSet) -> Result<DynamicalPhase> {
    let grid = *couplings.grid();
    let omega = (0..couplings.n_levels())
        .map(|n| {
            let e: Vec<f64> = (0..grid.len()).map(|k| couplings.energy(n, k)).collect();
            cumulative_quadrature(&grid, &e)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DynamicalPhase { grid, omega })
}
