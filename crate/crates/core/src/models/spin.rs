use super::gamma::RotatingSolution;
use super::{pauli, FieldParams};
use crate::error::{Context, Error, Result};
use crate::numerics::{c64, cis, CMatrix, CVector, C64};
use crate::source::HamiltonianSource;
use crate::spectral::{Level, SpectralFrame};

/// Non-degenerate two-level model `H(t) = (b/2) r(t)·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalfModel {
    p: FieldParams,
}

impl SpinHalfModel {
    pub fn new(b: f64, theta: f64, w: f64) -> Result<Self> {
        Ok(Self {
            p: FieldParams::new(b, theta, w)?,
        })
    }

    pub fn with_periods(self, periods: f64) -> Result<Self> {
        Ok(Self {
            p: self.p.with_periods(periods)?,
        })
    }

    pub fn b(&self) -> f64 {
        self.p.b
    }

    pub fn theta(&self) -> f64 {
        self.p.theta
    }

    pub fn w(&self) -> f64 {
        self.p.w
    }

    pub fn v(&self) -> f64 {
        self.p.v()
    }

    pub fn time(&self, s: f64) -> f64 {
        s / self.v()
    }

    pub fn hamiltonian_at_phase(&self, phi: f64) -> CMatrix {
        let (st, ct) = self.p.theta.sin_cos();
        let s = pauli();
        (s[0].scale(st * phi.cos()) + s[1].scale(st * phi.sin()) + s[2].scale(ct)).scale(0.5 * self.p.b)
    }

    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        self.hamiltonian_at_phase(self.p.w * t)
    }

    /// Ground `(sin θ/2, −e^{iφ} cos θ/2)` and excited `(cos θ/2, e^{iφ} sin θ/2)`.
    pub fn kets_at_phase(&self, phi: f64) -> CMatrix {
        let (sh, ch) = (self.p.theta / 2.0).sin_cos();
        let e = cis(phi);
        CMatrix::from_row_slice(2, 2, &[c64(sh, 0.0), c64(ch, 0.0), -e * ch, e * sh])
    }

    fn frame_at_phase(&self, phi: f64, s: f64) -> SpectralFrame {
        let k = self.kets_at_phase(phi);
        SpectralFrame {
            s,
            levels: vec![
                Level {
                    energy: -0.5 * self.p.b,
                    block: k.columns(0, 1).into_owned(),
                },
                Level {
                    energy: 0.5 * self.p.b,
                    block: k.columns(1, 1).into_owned(),
                },
            ],
        }
    }

    pub fn eigvectors(&self, t: f64) -> SpectralFrame {
        self.frame_at_phase(self.p.w * t, self.v() * t)
    }

    /// Rabi solution for an arbitrary initial state.
    pub fn exact_from(&self, psi0: &CVector) -> Result<RotatingSolution> {
        if psi0.len() != 2 {
            return Err(Error::DimensionMismatch {
                context: Context::StateDimension,
                expected: 2,
                found: psi0.len(),
            });
        }
        let k = self.hamiltonian_at_phase(0.0) - pauli()[2].scale(0.5 * self.p.w);
        Ok(RotatingSolution::new_spin(&k, psi0, self.p.w))
    }

    /// Exact state from the ground state at `t = 0`.
    pub fn exact(&self, t: f64) -> CVector {
        let psi0 = self.kets_at_phase(0.0).column(0).into_owned();
        self.exact_from(&psi0).expect("two-component state").at(t)
    }

    /// Berry factor of the ground level in the gauge of `kets_at_phase`:
    /// `exp(−i (wt/2)(1 + cos θ))`.
    pub fn berry_holonomy(&self, t: f64) -> C64 {
        cis(-0.5 * self.p.w * t * (1.0 + self.p.theta.cos()))
    }

    /// Same for the excited level: `exp(−i (wt/2)(1 − cos θ))`.
    pub fn berry_holonomy_excited(&self, t: f64) -> C64 {
        cis(-0.5 * self.p.w * t * (1.0 - self.p.theta.cos()))
    }
}

impl HamiltonianSource for SpinHalfModel {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        self.hamiltonian_at_phase(self.p.phase_rate() * s)
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        let phi = self.p.phase_rate() * s;
        let st = self.p.theta.sin();
        let sg = pauli();
        Some((sg[0].scale(-st * phi.sin()) + sg[1].scale(st * phi.cos())).scale(0.5 * self.p.b * self.p.phase_rate()))
    }

    fn frame(&self, s: f64) -> Option<SpectralFrame> {
        Some(self.frame_at_phase(self.p.phase_rate() * s, s))
    }
}
