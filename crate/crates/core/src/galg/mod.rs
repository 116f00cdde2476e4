//! Graded algebras: presentations `K^αH ⊗ M_s̄(K)`, structure-constant
//! algebras, graded homomorphisms and the tuple symmetries.

mod hom;
mod presentation;
mod structure;

pub use hom::{GradedHom, HomCertificate, HomDoc};
pub use presentation::{AlphaDoc, Block, BlockDecomposition, Presentation, PresentationDoc, SymmetryOp};
pub(crate) use structure::same_group;
pub use structure::{Elem, Prod, ProductDoc, StructureAlgebra, StructureDoc};

use thiserror::Error;

use crate::cocycles::CocycleError;
use crate::groups::GroupError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GalgError {
    #[error("operands belong to different groups or algebras")]
    MismatchedParent,
    #[error("replacement is not in the same right coset")]
    NotSameCoset,
    #[error("H is not a subgroup of the block group")]
    NotSubgroup,
    #[error("product of basis {0} and {1} leaves the expected degree")]
    GradingViolated(usize, usize),
    #[error("product is not associative at basis ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("malformed algebra data")]
    Shape,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}

#[cfg(test)]
mod tests;
