//! Spread-sets, Kerdock sets, orthogonal spreads and dual hyperovals over
//! small finite fields.
//!
//! The crate builds the classical families of these objects (desarguesian,
//! semifield-shadow, nearly-flag-transitive, Yoshiara, Huybrechts, ...),
//! verifies their defining axioms from scratch, moves between the operator
//! and subspace pictures (shadows, twists, dilations, lifts, projections),
//! and decides equivalence of split orthogonal dual hyperovals by exhaustive
//! kernel-structure-guided search.
//!
//! Layout:
//! - [`field`]: `F_{p^k}` arithmetic, Frobenius, traces, subfield chains.
//! - [`linalg`]: bit-packed `F_2` and dense generic matrices/subspaces.
//! - [`forms`]: symplectic and quadratic ambient spaces, quotients.
//! - [`opsets`]: the operator-set calculus (verification, labelings,
//!   shadows, twists, dilations).
//! - [`spreadgeom`]: subspace families, lifts and projections, qDHOs.
//! - [`families`]: the named constructions and the counting bounds.
//! - [`equiv`]: fingerprints, isomorphism search, automorphism groups.

pub mod equiv;
pub mod exec;
pub mod families;
pub mod field;
pub mod forms;
pub mod linalg;
pub mod opsets;
pub mod report;
pub mod serial;
pub mod spreadgeom;
