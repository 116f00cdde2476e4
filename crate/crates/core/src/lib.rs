//! Exact computation with G-graded simple algebras `K^αH ⊗ M_s̄(K)`: graded
//! embeddings, their certificates, and bounded graded-identity checks.

pub mod cocycles;
pub mod corpus;
pub mod embed;
pub mod envelope;
pub mod galg;
pub mod groups;
pub mod identities;
pub mod linalg;
pub mod scalars;
pub mod semisimple;
pub mod tuples;
