//! Typed combinatory algebras at desk scale.
//!
//! The crate builds up, layer by layer:
//!
//! - [`kernel`] — the typed combinator language (the closed terms form the
//!   concrete model; equality is convertibility of normal forms);
//! - [`tca`] — derived machinery: bracket abstraction, numerals, a decidable
//!   equality combinator and bounded minimization;
//! - [`apartness`] — the type translation `σ ↦ (σ⁺, σ⁻)` with executable
//!   domain/apartness checkers, synthesized symmetry and transitivity
//!   functionals, and premorphisms;
//! - [`assemblies`] — finite assemblies over the term model, the predicate
//!   pre-Heyting algebra with reindexing and both adjoints, and the
//!   independence-of-premise / axiom-of-choice witness terms;
//! - [`ce`] — converse-extensionality witness extraction at types 0 and 1,
//!   natively and as generated object-language terms, with brute-force
//!   oracles in the test suite;
//! - [`fixtures`] — the JSON fixture formats consumed by the CLI;
//! - [`sampling`] — seeded generation of sample pools and random well-typed
//!   terms.
//!
//! Everything is pure and immutable; the only mutable state anywhere is a
//! per-call memo table inside normalization.

pub mod apartness;
pub mod assemblies;
pub mod ce;
pub mod fixtures;
pub mod kernel;
pub mod sampling;
pub mod tca;

pub use kernel::{Comb, Term, TypeExpr, Verdict};
