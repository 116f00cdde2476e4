//! Multilinear graded polynomials, identity testing on graded bases,
//! bounded identity spaces and separating identities.

mod eval;
mod poly;
mod space;
mod witness;

pub use eval::{evaluate, is_identity, nonvanish_product, IdentityCheck, NonvanishWitness};
pub use poly::{permutations, sign, MultilinearPoly, PolyDoc, TermDoc, Word};
pub use space::{identity_space, inclusion_bounded, IdentitySpace, InclusionReport, Violation};
pub use witness::{witness_separate, SeparatorCase, SeparatorReport};

use thiserror::Error;

use crate::cocycles::CocycleError;
use crate::galg::GalgError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("degree {0} is not an element of the grading group")]
    DegreeOutsideGroup(usize),
    #[error("word is not a permutation of the variables")]
    NotMultilinear,
    #[error("degree constraint violated")]
    DegreeMismatch,
    #[error("assignment has {got} entries, polynomial has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("polynomial and algebra use different grading groups")]
    MismatchedGroup,
    #[error("{needed} evaluations exceed the budget of {limit}")]
    BudgetExceeded { needed: u128, limit: u64 },
    #[error("input polynomial is an identity of the algebra")]
    InputIsIdentity,
    #[error("the embedding exists, so no separating identity exists")]
    DecisionWasTrue,
    #[error("no separating identity found within the budget")]
    NotFoundWithinBudget,
    #[error("case does not apply: {0}")]
    NotApplicable(String),
    #[error("separator failed verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}

/// Limits for the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Longest multidegree scanned by bounded inclusion.
    pub max_len: usize,
    /// Cap on assignments × permutations per identity space.
    pub max_evals: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_len: 4, max_evals: 10_000_000 }
    }
}

impl Budget {
    /// Default budget, with `max_evals` overridden by `GRADALG_BUDGET` when set.
    pub fn from_env() -> Budget {
        let mut b = Budget::default();
        if let Some(v) = Budget::from_env_override() {
            b.max_evals = v;
        }
        b
    }

    /// The `GRADALG_BUDGET` cap on evaluations, if set to a number.
    pub fn from_env_override() -> Option<u64> {
        std::env::var("GRADALG_BUDGET").ok().and_then(|s| s.trim().parse().ok())
    }
}
