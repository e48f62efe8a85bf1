//! Computational laboratory for uniform resolvent estimates of higher-order
//! elliptic operators on explicit model spectra.

pub mod cli;
pub mod cplx;
pub mod error;
pub mod quad;
pub mod multiplier;
pub mod oracle;
pub mod oscint;
pub mod probe;
pub mod region;
pub mod residue;
pub mod spectra;
pub mod suite;
pub mod sphere;
pub mod symbol;

pub use error::{LabError, Result};
