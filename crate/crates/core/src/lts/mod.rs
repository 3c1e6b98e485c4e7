//! Finite presheaves over the base category of states and labelled
//! transitions, their morphisms, the colimits the arity construction needs,
//! and lifting problems against the source maps `s^a`.

mod colimit;
mod io;
mod labels;
mod lifting;
mod morphism;
mod presheaf;

pub use colimit::{colimit, Colimit, Diagram};
pub use io::{from_json, from_json_lines, from_json_with_labels, to_dot, to_json, to_json_value, PresheafFile};
pub use labels::{Label, LabelSet};
pub use lifting::{
    all_morphisms, find_lifting, functional_bisim_counterexample, functional_bisim_counterexample_on,
    is_functional_bisimulation, is_pullback_square, pullback_failures, Counterexample,
};
pub use morphism::{Morphism, Square};
pub use presheaf::{EdgeData, EdgeIx, Object, Presheaf, PresheafBuilder, StateIx};

/// A lifting problem: `left: A -> B`, `right: X -> Y`, `top: A -> X`, `bottom: B -> Y`.
pub type LiftingSquare = Square;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("edge `{0}` has an endpoint that is not a declared state")]
    DanglingEdge(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label sets must be non-empty")]
    EmptyLabelSet,
    #[error("presheaves are over different label sets")]
    LabelMismatch,
    #[error("square does not commute")]
    NonCommutingSquare,
    #[error("unsupported diagram shape: {0}")]
    ShapeUnsupported(String),
    #[error("not a morphism: {0}")]
    NotNatural(String),
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("not a cocone: {0}")]
    NotACocone(String),
    #[error("malformed presheaf file: {0}")]
    Format(String),
}
