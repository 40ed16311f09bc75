//! Syntax, type checking and normalization for the typed combinator language.
//!
//! The language has types `N | Unit | Empty | σ*τ | σ+τ | σ->τ` and the
//! thirteen constants `K S pair fst snd inl inr case zero succ rec exf unit`.
//! Closed terms modulo convertibility form the model everything else in this
//! crate computes in: values are immutable, every operation is pure, and the
//! only caching is per-call.

mod infer;
mod normalize;
mod parse;
mod term;
mod types;

pub use infer::{elaborate, infer_type, TypeError};
pub(crate) use normalize::normalize_unchecked;
pub use normalize::{normalize, normalize_budgeted, terms_equal, KernelError};
pub use parse::{parse_term, parse_type, ParseError};
pub use term::{Comb, Term, TermRef};
pub use types::TypeExpr;

use std::fmt;

/// Three-valued result of a semi-decidable check.
///
/// `Fails` always carries a concrete counterexample; `Unknown` marks checks
/// whose universal part was only sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Counterexample),
    Unknown(String),
}

/// The witnessing data of a failed check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// The terms that witness the failure.
    pub terms: Vec<Term>,
    /// What the terms mean, for reports.
    pub context: String,
}

impl Verdict {
    pub fn fails(context: impl Into<String>, terms: Vec<Term>) -> Verdict {
        Verdict::Fails(Counterexample {
            terms,
            context: context.into(),
        })
    }

    /// Did the check find a counterexample?
    pub fn failed(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    /// Did the check succeed on everything it could decide or sample?
    pub fn passed(&self) -> bool {
        !self.failed()
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Unknown(why) => write!(f, "unknown ({why})"),
            Verdict::Fails(ce) => {
                write!(f, "fails: {}", ce.context)?;
                for t in &ce.terms {
                    write!(f, " `{t}`")?;
                }
                Ok(())
            }
        }
    }
}
