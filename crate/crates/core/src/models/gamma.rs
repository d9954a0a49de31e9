use super::{kron, pauli, FieldParams, HermitianFlow};
use crate::error::{Context, Error, Result};
use crate::numerics::{c64, cis, identity, CMatrix, CVector, C64, IM};
use crate::source::HamiltonianSource;
use crate::spectral::{Level, SpectralFrame};

/// `Γ_j = σ_x ⊗ σ_j` in the basis `(↑↑, ↑↓, ↓↑, ↓↓)`.
pub fn gamma_matrices() -> [CMatrix; 3] {
    let s = pauli();
    [kron(&s[0], &s[0]), kron(&s[0], &s[1]), kron(&s[0], &s[2])]
}

/// `Π_j = 1 ⊗ σ_j`.
pub fn pi_matrices() -> [CMatrix; 3] {
    let s = pauli();
    let one = identity(2);
    [kron(&one, &s[0]), kron(&one, &s[1]), kron(&one, &s[2])]
}

/// Four-level model `H(t) = (b/2) r(t)·Γ` with two doubly degenerate levels
/// `∓b/2` and a field rotating at frequency `w` around the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaModel {
    p: FieldParams,
}

impl GammaModel {
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

    pub fn periods(&self) -> f64 {
        self.p.periods
    }

    /// Adiabatic parameter for `s ∈ [0, 1]`.
    pub fn v(&self) -> f64 {
        self.p.v()
    }

    /// Physical time at rescaled time `s`.
    pub fn time(&self, s: f64) -> f64 {
        s / self.v()
    }

    pub fn hamiltonian_at_phase(&self, phi: f64) -> CMatrix {
        let (st, ct) = self.p.theta.sin_cos();
        let g = gamma_matrices();
        let r = [st * phi.cos(), st * phi.sin(), ct];
        (g[0].scale(r[0]) + g[1].scale(r[1]) + g[2].scale(r[2])).scale(0.5 * self.p.b)
    }

    /// `H(t)` at physical time `t`.
    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        self.hamiltonian_at_phase(self.p.w * t)
    }

    /// `dH/dφ`.
    fn phase_derivative(&self, phi: f64) -> CMatrix {
        let st = self.p.theta.sin();
        let g = gamma_matrices();
        (g[0].scale(-st * phi.sin()) + g[1].scale(st * phi.cos())).scale(0.5 * self.p.b)
    }

    /// Columns `|0^0⟩, |0^1⟩, |1^0⟩, |1^1⟩` at azimuth `φ`.
    pub fn kets_at_phase(&self, phi: f64) -> CMatrix {
        let alpha = cis(phi) * self.p.theta.sin();
        let beta = c64(self.p.theta.cos(), 0.0);
        let z = c64(0.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = CMatrix::zeros(4, 4);
        for n in 0..2 {
            let sign = c64(if n == 0 { 1.0 } else { -1.0 }, 0.0);
            let k0 = [alpha.conj(), -beta, z, -sign];
            let k1 = [beta, alpha, -sign, z];
            for i in 0..4 {
                out[(i, 2 * n)] = k0[i] * r;
                out[(i, 2 * n + 1)] = k1[i] * r;
            }
        }
        out
    }

    pub fn kets(&self, t: f64) -> CMatrix {
        self.kets_at_phase(self.p.w * t)
    }

    fn frame_at_phase(&self, phi: f64, s: f64) -> SpectralFrame {
        let k = self.kets_at_phase(phi);
        SpectralFrame {
            s,
            levels: vec![
                Level {
                    energy: -0.5 * self.p.b,
                    block: k.columns(0, 2).into_owned(),
                },
                Level {
                    energy: 0.5 * self.p.b,
                    block: k.columns(2, 2).into_owned(),
                },
            ],
        }
    }

    /// Snapshot eigensystem at physical time `t`; the frame's `s` is `v t`.
    pub fn eigvectors(&self, t: f64) -> SpectralFrame {
        self.frame_at_phase(self.p.w * t, self.v() * t)
    }

    /// `Ω_±`.
    pub fn omegas(&self) -> (f64, f64) {
        let (b, w, c) = (self.p.b, self.p.w, self.p.theta.cos());
        (
            (w * w + b * b + 2.0 * w * b * c).sqrt(),
            (w * w + b * b - 2.0 * w * b * c).sqrt(),
        )
    }

    /// Snapshot-basis coefficients of the exact solution from `|0^0(0)⟩`.
    pub fn exact_coefficients(&self, t: f64) -> [C64; 4] {
        let (b, w) = (self.p.b, self.p.w);
        let (s, c) = self.p.theta.sin_cos();
        let (op, om) = self.omegas();
        let a = |o: f64, sign: f64| c64((o * t / 2.0).cos(), (b + sign * w * c) / o * (o * t / 2.0).sin());
        let bb = |o: f64| c64(0.0, w / o * (o * t / 2.0).sin());
        let (ap, am) = (a(op, 1.0), a(om, -1.0));
        let (bp, bm) = (bb(op), bb(om));
        let e = cis(w * t / 2.0);
        [
            e * (am * ((1.0 + c) / 2.0) + ap * ((1.0 - c) / 2.0)),
            e.conj() * s * (ap - am) / 2.0,
            e * s * s * (bp + bm) / 2.0,
            e.conj() * s * (bm * ((1.0 + c) / 2.0) - bp * ((1.0 - c) / 2.0)),
        ]
    }

    /// Exact state from `|0^0(0)⟩` in the computational basis.
    pub fn exact(&self, t: f64) -> CVector {
        self.kets(t) * CVector::from_row_slice(&self.exact_coefficients(t))
    }

    /// Exact propagator for an arbitrary initial state, obtained in the frame
    /// co-rotating with the field.
    pub fn exact_from(&self, psi0: &CVector) -> Result<RotatingSolution> {
        if psi0.len() != 4 {
            return Err(Error::DimensionMismatch {
                context: Context::StateDimension,
                expected: 4,
                found: psi0.len(),
            });
        }
        let k = self.hamiltonian_at_phase(0.0) - pi_matrices()[2].scale(0.5 * self.p.w);
        Ok(RotatingSolution {
            flow: HermitianFlow::new(&k),
            psi0: psi0.clone(),
            w: self.p.w,
        })
    }

    /// `(z_1, z_2)`.
    pub fn wz_entries(&self, t: f64) -> (C64, C64) {
        let wt = self.p.w * t;
        let (s, c) = self.p.theta.sin_cos();
        let e = cis(wt / 2.0);
        let arg = wt / 2.0 * c;
        let z1 = e * c64(arg.cos(), -c * arg.sin());
        let z2 = IM * e * s * arg.sin();
        (z1, z2)
    }

    /// `[[z_1, −z_2*], [z_2, z_1*]]`, the same for both levels.
    pub fn wz(&self, t: f64) -> CMatrix {
        let (z1, z2) = self.wz_entries(t);
        CMatrix::from_row_slice(2, 2, &[z1, -z2.conj(), z2, z1.conj()])
    }

    /// Zeroth-order state `e^{ibt/2}(z_1|0^0⟩ − z_2*|0^1⟩)`.
    pub fn order0(&self, t: f64) -> CVector {
        let (z1, z2) = self.wz_entries(t);
        let k = self.kets(t);
        (k.column(0) * z1 - k.column(1) * z2.conj()) * cis(self.p.b * t / 2.0)
    }

    /// First-order state `Ψ⁽¹⁾`, to be weighted by `v` in the series.
    pub fn order1(&self, t: f64) -> CVector {
        let (b, w, v) = (self.p.b, self.p.w, self.v());
        let (z1, z2) = self.wz_entries(t);
        let (s, c) = self.p.theta.sin_cos();
        let k = self.kets(t);
        let (sb, cb) = (b * t / 2.0).sin_cos();
        let own = self.order0(t) * c64(0.0, w * w * t / (4.0 * b * v) * s * s);
        let up0 = IM * (w / (b * v) * sb * s) * (z1 * s + z2 * c);
        let up1 = (z2.conj() * cb + IM * sb * c * (z1.conj() * s + z2.conj() * c)) * (w / (b * v));
        own + k.column(2) * up0 + k.column(3) * up1
    }

    /// `V⁽⁰⁾ = (1 + i w²t sin²θ/(4b)) U⁽⁰⁾`.
    pub fn corrected_wz(&self, t: f64) -> CMatrix {
        let s = self.p.theta.sin();
        self.wz(t) * c64(1.0, self.p.w * self.p.w * t * s * s / (4.0 * self.p.b))
    }
}

impl HamiltonianSource for GammaModel {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        self.hamiltonian_at_phase(self.p.phase_rate() * s)
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        Some(self.phase_derivative(self.p.phase_rate() * s).scale(self.p.phase_rate()))
    }

    fn frame(&self, s: f64) -> Option<SpectralFrame> {
        Some(self.frame_at_phase(self.p.phase_rate() * s, s))
    }
}

/// `ψ(t) = R(wt) exp(−it(H(0) − (w/2)Z)) ψ(0)`, with `R(φ) = exp(−iφZ/2)` on
/// the rotated spin.
#[derive(Debug, Clone)]
pub struct RotatingSolution {
    flow: HermitianFlow,
    psi0: CVector,
    w: f64,
}

impl RotatingSolution {
    pub(crate) fn new_spin(k: &CMatrix, psi0: &CVector, w: f64) -> Self {
        Self {
            flow: HermitianFlow::new(k),
            psi0: psi0.clone(),
            w,
        }
    }

    pub fn at(&self, t: f64) -> CVector {
        let mut chi = self.flow.apply(t, &self.psi0);
        let half = self.w * t / 2.0;
        let (down, up) = (cis(half), cis(-half));
        // the rotated spin is the last tensor factor, so parity of the index
        // gives its σ_z eigenvalue in both the 2- and 4-level models
        for (i, x) in chi.iter_mut().enumerate() {
            *x *= if i % 2 == 0 { up } else { down };
        }
        chi
    }
}
