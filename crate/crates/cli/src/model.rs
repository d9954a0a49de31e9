use dapt_core::exact::{propagate, PropagationOptions};
use dapt_core::models::{GammaModel, SpinHalfModel};
use dapt_core::numerics::{max_abs, vec_norm, CMatrix, CVector, Grid};
use dapt_core::pipeline::{Dapt, FrameMode, InitialSpec, PipelineOptions};
use dapt_core::source::{HamiltonianSource, SampledHamiltonian};

use crate::config::{FrameChoice, ModelKind, RunConfig};
use crate::error::{CliError, CliResult};

pub enum Model {
    Gamma(GammaModel),
    Spin(SpinHalfModel),
    File(SampledHamiltonian),
}

/// Reference solution on the working grid.
pub struct Reference {
    pub states: Vec<CVector>,
    pub norm_drift: Vec<f64>,
    pub method: &'static str,
    pub substeps: u64,
}

impl Model {
    pub fn from_config(c: &RunConfig) -> CliResult<Self> {
        Ok(match c.model {
            ModelKind::Gamma => Model::Gamma(GammaModel::new(c.b, c.theta, c.w)?.with_periods(c.periods)?),
            ModelKind::Spin => Model::Spin(SpinHalfModel::new(c.b, c.theta, c.w)?.with_periods(c.periods)?),
            ModelKind::File => {
                let path = c
                    .hamiltonian
                    .as_ref()
                    .ok_or_else(|| CliError::Config("model `file` needs a hamiltonian path".into()))?;
                let h = SampledHamiltonian::read(path).map_err(|source| CliError::Input {
                    path: path.clone(),
                    source,
                })?;
                Model::File(h)
            }
        })
    }

    /// The built-in model at the rate of `c`; `None` for sampled input,
    /// whose Hamiltonian does not depend on the rate.
    pub fn rated(&self, c: &RunConfig) -> CliResult<Option<Self>> {
        Ok(match self {
            Model::File(_) => None,
            _ => Some(Self::from_config(c)?),
        })
    }

    pub fn source(&self) -> &dyn HamiltonianSource {
        match self {
            Model::Gamma(m) => m,
            Model::Spin(m) => m,
            Model::File(h) => h,
        }
    }

    pub fn build(&self, c: &RunConfig, order_cap: usize) -> CliResult<Dapt> {
        let options = PipelineOptions {
            degeneracy_tol: c.degeneracy_tol,
            gap_floor_rel: c.gap_floor_rel,
            order_cap,
            frames: match c.frames {
                FrameChoice::Auto => FrameMode::Auto,
                FrameChoice::Numeric => FrameMode::Numeric,
            },
        };
        Ok(Dapt::build(self.source(), c.nodes, InitialSpec::Ground, &options)?)
    }

    /// Exact evolution of `psi0` from `s = 0`: closed form for the built-in
    /// models, RK4 for sampled input.
    pub fn reference(&self, psi0: &CVector, grid: &Grid, v: f64, c: &RunConfig) -> CliResult<Reference> {
        let closed = |at: &dyn Fn(f64) -> CVector| {
            let n0 = vec_norm(psi0);
            let states: Vec<CVector> = grid.points().map(at).collect();
            let norm_drift = states.iter().map(|x| (vec_norm(x) - n0).abs()).collect();
            Reference {
                states,
                norm_drift,
                method: "closed-form",
                substeps: 0,
            }
        };
        Ok(match self {
            Model::Gamma(m) => {
                let sol = m.exact_from(psi0)?;
                closed(&|s| sol.at(m.time(s)))
            }
            Model::Spin(m) => {
                let sol = m.exact_from(psi0)?;
                closed(&|s| sol.at(m.time(s)))
            }
            Model::File(h) => {
                let opts = PropagationOptions {
                    max_phase_step: c.max_phase_step,
                    ..Default::default()
                };
                let r = propagate(h, v, psi0, grid, &opts)?;
                Reference {
                    states: r.states,
                    norm_drift: r.norm_drift,
                    method: "rk4",
                    substeps: r.substeps,
                }
            }
        })
    }

    /// Largest entry error of the numeric ground holonomy and of `V⁽⁰⁾`
    /// against the model's closed forms, over all nodes. `None` for sampled
    /// input or numerically gauged frames.
    pub fn holonomy_errors(&self, d: &Dapt, v0: Option<&[CMatrix]>, c: &RunConfig) -> Option<(f64, Option<f64>)> {
        if c.frames != FrameChoice::Auto {
            return None;
        }
        let grid = d.grid();
        let u = d.holonomies()[0].unitaries();
        match self {
            Model::Gamma(m) => {
                let u_err = (0..grid.len())
                    .map(|k| max_abs(&(&u[k] - m.wz(m.time(grid.point(k))))))
                    .fold(0.0, f64::max);
                let v_err = v0.map(|v0| {
                    (0..grid.len())
                        .map(|k| max_abs(&(&v0[k] - m.corrected_wz(m.time(grid.point(k))))))
                        .fold(0.0, f64::max)
                });
                Some((u_err, v_err))
            }
            Model::Spin(m) => {
                let u_err = (0..grid.len())
                    .map(|k| (u[k][(0, 0)] - m.berry_holonomy(m.time(grid.point(k)))).norm())
                    .fold(0.0, f64::max);
                Some((u_err, None))
            }
            Model::File(_) => None,
        }
    }
}
