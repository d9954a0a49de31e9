use std::fmt;

/// Errors raised by the numerical pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("generator is not anti-Hermitian: ‖A + A†‖ = {deviation:.3e}")]
    NotAntiHermitian { deviation: f64 },

    #[error("Hamiltonian is not Hermitian at s = {s}: ‖H − H†‖ = {deviation:.3e}")]
    NonHermitianInput { s: f64, deviation: f64 },

    #[error("need at least {min} grid samples, got {len}")]
    GridTooSmall { len: usize, min: usize },

    #[error("degeneracy pattern changed at s = {s}: expected {expected:?}, found {found:?}")]
    DegeneracyChanged {
        s: f64,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("overlap between consecutive frames of level {level} is rank deficient at s = {s} (σ_min = {sigma_min:.3e}); grid too coarse or levels cross")]
    RankDeficientOverlap { level: usize, s: f64, sigma_min: f64 },

    #[error("gap between levels {lower} and {upper} collapsed at s = {s}: |Δ| = {gap:.3e}")]
    GapCollapse {
        s: f64,
        lower: usize,
        upper: usize,
        gap: f64,
    },

    #[error("initial holonomy is not unitary: ‖U†U − I‖ = {deviation:.3e}")]
    NonUnitaryInitial { deviation: f64 },

    #[error("zeroth-order state has weight {leakage:.3e} outside the ground level at s = 0")]
    NotGroundStart { leakage: f64 },

    #[error("initial condition is not normalized: Σ|b_n|² = {norm_sq}")]
    BadInitialCondition { norm_sq: f64 },

    #[error("propagation needs {required} RK4 substeps, budget is {budget}")]
    StepTooLarge { required: u64, budget: u64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: Context,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where a [`Error::DimensionMismatch`] was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context {
    Samples,
    StateDimension,
    Levels,
    Grid,
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Context::Samples => "sample count",
            Context::StateDimension => "state dimension",
            Context::Levels => "level structure",
            Context::Grid => "grid",
        };
        f.write_str(name)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
