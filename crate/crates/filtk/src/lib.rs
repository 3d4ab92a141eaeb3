//! Standard-library layer over `filtk-core`: JSON formats, the embedded case
//! data, the two verification drivers and the command-line front end.

pub mod caselib;
pub mod cli;
pub mod formats;
pub mod resources;

pub use filtk_core::{ckk, diagram, fgab, finspace, intlin, BigInt};
