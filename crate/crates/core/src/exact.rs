//! Reference propagator for `i v ψ' = H(s) ψ` in rescaled time.

use crate::error::{Context, Error, Result};
use crate::numerics::{max_abs_vec, vec_norm, CMatrix, CVector, Grid, C64};
use crate::source::HamiltonianSource;

#[derive(Debug, Clone, Copy)]
pub struct PropagationOptions {
    /// Largest `‖H‖ δs / v` allowed in one RK4 substep.
    pub max_phase_step: f64,
    /// Refuse to run when more substeps than this would be needed.
    pub max_substeps: u64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            max_phase_step: 5e-3,
            max_substeps: 500_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub grid: Grid,
    pub states: Vec<CVector>,
    /// `|‖ψ(s_k)‖ − ‖ψ(0)‖|` per node.
    pub norm_drift: Vec<f64>,
    pub substeps: u64,
}

impl PropagationResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().copied().fold(0.0, f64::max)
    }
}

/// Upper bound on the spectral norm of a Hermitian matrix.
fn norm_bound(h: &CMatrix) -> f64 {
    let frobenius = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let row_sum = h
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    frobenius.min(row_sum)
}

pub fn propagate(
    source: &dyn HamiltonianSource,
    v: f64,
    psi0: &CVector,
    grid: &Grid,
    options: &PropagationOptions,
) -> Result<PropagationResult> {
    if !(v > 0.0) || !(options.max_phase_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "v and max_phase_step must be positive, got v = {v}, step = {}",
            options.max_phase_step
        )));
    }
    if psi0.len() != source.dim() {
        return Err(Error::DimensionMismatch {
            context: Context::StateDimension,
            expected: source.dim(),
            found: psi0.len(),
        });
    }
    let h = grid.spacing();
    let mut bound: f64 = 0.0;
    for k in 0..grid.len() {
        bound = bound.max(norm_bound(&source.hamiltonian(grid.point(k))));
        if k + 1 < grid.len() {
            bound = bound.max(norm_bound(&source.hamiltonian(grid.midpoint(k))));
        }
    }
    let per_interval = ((h * bound / (v * options.max_phase_step)).ceil() as u64).max(1);
    let required = per_interval.saturating_mul(grid.len() as u64 - 1);
    if required > options.max_substeps {
        return Err(Error::StepTooLarge {
            required,
            budget: options.max_substeps,
        });
    }

    let delta = h / per_interval as f64;
    let factor = C64::new(0.0, -1.0 / v);
    let initial_norm = vec_norm(psi0);
    let mut psi = psi0.clone();
    let mut states = Vec::with_capacity(grid.len());
    let mut norm_drift = Vec::with_capacity(grid.len());
    states.push(psi.clone());
    norm_drift.push(0.0);
    let mut h_left = source.hamiltonian(0.0) * factor;
    for k in 0..grid.len() - 1 {
        let s0 = grid.point(k);
        for j in 0..per_interval {
            let s = s0 + j as f64 * delta;
            let s_end = if j + 1 == per_interval {
                grid.point(k + 1)
            } else {
                s + delta
            };
            let h_mid = source.hamiltonian(s + 0.5 * delta) * factor;
            let h_right = source.hamiltonian(s_end) * factor;
            let k1 = &h_left * &psi;
            let k2 = &h_mid * (&psi + &k1 * C64::from(0.5 * delta));
            let k3 = &h_mid * (&psi + &k2 * C64::from(0.5 * delta));
            let k4 = &h_right * (&psi + &k3 * C64::from(delta));
            psi += (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(delta / 6.0);
            h_left = h_right;
        }
        norm_drift.push((vec_norm(&psi) - initial_norm).abs());
        states.push(psi.clone());
    }
    Ok(PropagationResult {
        grid: *grid,
        states,
        norm_drift,
        substeps: required,
    })
}

/// Pointwise `‖a_k − b_k‖` and its maximum.
#[derive(Debug, Clone)]
pub struct Residual {
    pub per_node: Vec<f64>,
    pub sup: f64,
    /// Largest single-component deviation.
    pub max_component: f64,
}

pub fn residual(a: &[CVector], b: &[CVector]) -> Result<Residual> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: Context::Samples,
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut per_node = Vec::with_capacity(a.len());
    let mut max_component: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                context: Context::StateDimension,
                expected: x.len(),
                found: y.len(),
            });
        }
        let d = x - y;
        per_node.push(vec_norm(&d));
        max_component = max_component.max(max_abs_vec(&d));
    }
    let sup = per_node.iter().copied().fold(0.0, f64::max);
    Ok(Residual {
        per_node,
        sup,
        max_component,
    })
}
