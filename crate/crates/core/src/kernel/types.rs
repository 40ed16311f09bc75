//! The finite-type grammar: `N | Unit | Empty | σ×τ | σ+τ | σ→τ`.

use std::fmt;

/// A type expression of the combinator language.
///
/// Types are finite trees; structural equality is the only equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    /// The natural numbers type `N`.
    Nat,
    /// The unit (terminal) type.
    Unit,
    /// The empty (initial) type.
    Empty,
    /// Product `σ * τ`.
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    /// Sum `σ + τ`.
    Sum(Box<TypeExpr>, Box<TypeExpr>),
    /// Function space `σ -> τ`.
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn prod(l: TypeExpr, r: TypeExpr) -> TypeExpr {
        TypeExpr::Prod(Box::new(l), Box::new(r))
    }

    pub fn sum(l: TypeExpr, r: TypeExpr) -> TypeExpr {
        TypeExpr::Sum(Box::new(l), Box::new(r))
    }

    pub fn arrow(dom: TypeExpr, cod: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Box::new(dom), Box::new(cod))
    }

    /// The pure finite type of level `n`: `0 := N` and `n+1 := n -> N`.
    pub fn finite(n: u32) -> TypeExpr {
        let mut ty = TypeExpr::Nat;
        for _ in 0..n {
            ty = TypeExpr::arrow(ty, TypeExpr::Nat);
        }
        ty
    }

    /// Tree depth, counting leaves as depth 1.
    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::Nat | TypeExpr::Unit | TypeExpr::Empty => 1,
            TypeExpr::Prod(l, r) | TypeExpr::Sum(l, r) | TypeExpr::Arrow(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            TypeExpr::Arrow(..) => 1,
            TypeExpr::Sum(..) => 2,
            TypeExpr::Prod(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            TypeExpr::Nat => write!(f, "N")?,
            TypeExpr::Unit => write!(f, "Unit")?,
            TypeExpr::Empty => write!(f, "Empty")?,
            // -> is right-associative: the left child needs strictly higher precedence.
            TypeExpr::Arrow(l, r) => {
                l.fmt_prec(f, prec + 1)?;
                write!(f, " -> ")?;
                r.fmt_prec(f, prec)?;
            }
            // * and + are left-associative.
            TypeExpr::Sum(l, r) => {
                l.fmt_prec(f, prec)?;
                write!(f, " + ")?;
                r.fmt_prec(f, prec + 1)?;
            }
            TypeExpr::Prod(l, r) => {
                l.fmt_prec(f, prec)?;
                write!(f, " * ")?;
                r.fmt_prec(f, prec + 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
