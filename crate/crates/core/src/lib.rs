//! Exact arithmetic, local solubility, Brauer–Manin evaluation and Picard
//! cohomology for twisted Markoff surfaces `ax² + y² + z² − xyz = m`.

pub mod arith;
pub mod brauer;
pub mod cohomology;
pub mod error;
pub mod geometry;
pub mod padic;
pub mod report;
pub mod search;
pub mod solubility;

pub use error::{Error, Result};
