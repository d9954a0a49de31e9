pub mod error;
pub mod numerics;
pub mod source;
pub mod spectral;

pub use error::{Error, Result};
pub mod couplings;
pub mod dapt;
pub mod holonomy;
pub mod exact;
pub mod models;
pub mod fit;
pub mod pipeline;
