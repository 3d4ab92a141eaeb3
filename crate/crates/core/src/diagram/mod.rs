//! Diagram modules: groups on the vertices `(Y, degree)` of a finite quiver
//! with arrows `i`, `r`, `δ`, their homomorphisms, and the checks and
//! constructions used on ideal-related K-theory.
//!
//! Paths and relations compose like functions: in `[f, g]` the arrow `g`
//! is applied first.

mod hom;
mod module;
mod ops;
mod reduced;
mod shape;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fgab::FgabError;
use crate::finspace::SpaceError;
use crate::intlin::ShapeError;

pub use hom::{
    solve_hom, verify_hom, DiagramHom, HomSolveOutcome, NaturalityFailure, NaturalityReport,
};
pub use module::{
    check_rrz_like, check_six_term_exact, validate_module, DiagramModule, ExactnessFailure,
    ExactnessReport, ModuleIssue, ModuleReport, RrzReport, Variance,
};
pub use ops::{
    attach_corner_paths, co_extend_to_corner, concentrated, dualize, extend_from_corner,
    point_module, suspend, tensor_with_group, validate_provenance, Provenance,
};
pub use reduced::{
    check_exact_r_module, reduced_from_full, unit_group, RModuleReport, ReducedInvariant,
    ReducedPoint,
};
pub use shape::{ArrowKind, ArrowSpec, DiagramShape, Relation, RelationRhs, SixTerm, VertexSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagramError {
    Shape(String),
    MissingVertex(String),
    MissingArrow(String),
    ShapeMismatch,
    Asymmetric(String),
    NotFree(String),
    TorsionPresent(String),
    Provenance(String),
    ExtensionInconsistent(Vec<String>),
    BadPin(String),
    Group(FgabError),
    Space(SpaceError),
}

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramError::Shape(s) => write!(f, "shape: {s}"),
            DiagramError::MissingVertex(v) => write!(f, "missing vertex {v}"),
            DiagramError::MissingArrow(a) => write!(f, "missing arrow {a}"),
            DiagramError::ShapeMismatch => write!(f, "modules live on different shapes"),
            DiagramError::Asymmetric(s) => {
                write!(f, "shape is not symmetric under degree swap at {s}")
            }
            DiagramError::NotFree(v) => write!(f, "group at {v} is not presented as free"),
            DiagramError::TorsionPresent(v) => write!(f, "group at {v} has relations"),
            DiagramError::Provenance(s) => write!(f, "provenance: {s}"),
            DiagramError::ExtensionInconsistent(v) => {
                write!(f, "extension is not natural: {}", v.join("; "))
            }
            DiagramError::BadPin(s) => write!(f, "pinned component: {s}"),
            DiagramError::Group(e) => write!(f, "{e}"),
            DiagramError::Space(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DiagramError {}

impl From<FgabError> for DiagramError {
    fn from(e: FgabError) -> Self {
        DiagramError::Group(e)
    }
}

impl From<ShapeError> for DiagramError {
    fn from(e: ShapeError) -> Self {
        DiagramError::Group(FgabError::Shape(e))
    }
}

impl From<SpaceError> for DiagramError {
    fn from(e: SpaceError) -> Self {
        DiagramError::Space(e)
    }
}
