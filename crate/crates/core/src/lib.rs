//! Linear stability of a planar plasma-vacuum interface in ideal compressible MHD
//! with the vacuum electric field governed by the full Maxwell system.

pub mod cli;
pub mod energy;
pub mod error;
pub mod jsonfmt;
pub mod matrices;
pub mod poly;
pub mod scan;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use state::{CaseFlag, EquilibriumState};
