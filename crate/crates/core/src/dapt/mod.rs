//! Dynamical adiabatic perturbation series: correction blocks, assembled
//! state families and validity margins.

mod blocks;
mod phase;
mod state;
mod validity;

pub use blocks::{
    first_order_blocks, j_integrals, solve_constraint, CorrectionBlocks, InitialCondition, JIntegrals,
};
pub use phase::{dynamical_phase, DynamicalPhase};
pub use state::{assemble_state, series_state, StateFamily};
pub use validity::{validity_margins, ValidityReport, DEFAULT_VALIDITY_THRESHOLD};
