//! End-to-end drivers over the embedded case data: the non-lifting
//! automorphism over the diamond space and the reduction chain over the
//! pseudo-circle.

mod counterexample;
mod pseudocircle;

pub use counterexample::{
    extended_shape, fmt_matrix, refined_corner, verify_counterexample, verify_counterexample_with,
    CertificateReport, CounterexampleOptions, CounterexampleReport, CspCase, RefinedCornerData,
    StageReport,
};
pub use pseudocircle::{
    injective_at, projective_at, support_table_module, verify_pseudocircle_steps, IdentityCheck,
    PseudocircleReport, StepReport, VertexCheck,
};

use filtk_core::ckk::CkkError;
use filtk_core::diagram::DiagramError;
use filtk_core::fgab::FgabError;

use crate::formats::FormatError;

#[derive(Debug, thiserror::Error)]
pub enum CaseError {
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{0}")]
    Diagram(#[from] DiagramError),
    #[error("{0}")]
    Ckk(#[from] CkkError),
    #[error("{0}")]
    Group(#[from] FgabError),
    #[error("precondition fails: {}", .0.join("; "))]
    Precondition(Vec<String>),
    #[error("case data: {0}")]
    Data(String),
}
