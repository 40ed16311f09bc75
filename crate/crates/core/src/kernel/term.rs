//! Applicative combinator terms over the thirteen-constant basis.

use std::fmt;
use std::sync::Arc;

use super::types::TypeExpr;

/// Shared term reference. Terms are immutable; sharing keeps reduction cheap.
pub type TermRef = Arc<Term>;

/// The distinguished combinator constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comb {
    K,
    S,
    Pair,
    Fst,
    Snd,
    Inl,
    Inr,
    Case,
    Zero,
    Succ,
    Rec,
    Exf,
    UnitVal,
}

impl Comb {
    /// Surface name in the term grammar.
    pub fn name(self) -> &'static str {
        match self {
            Comb::K => "K",
            Comb::S => "S",
            Comb::Pair => "pair",
            Comb::Fst => "fst",
            Comb::Snd => "snd",
            Comb::Inl => "inl",
            Comb::Inr => "inr",
            Comb::Case => "case",
            Comb::Zero => "zero",
            Comb::Succ => "succ",
            Comb::Rec => "rec",
            Comb::Exf => "exf",
            Comb::UnitVal => "unit",
        }
    }

    /// Number of type parameters of the constant's type scheme.
    pub fn type_arity(self) -> usize {
        match self {
            Comb::K => 2,
            Comb::S => 3,
            Comb::Pair | Comb::Fst | Comb::Snd | Comb::Inl | Comb::Inr => 2,
            Comb::Case => 3,
            Comb::Zero | Comb::Succ | Comb::UnitVal => 0,
            Comb::Rec | Comb::Exf => 1,
        }
    }

    /// The type scheme instantiated at concrete parameters.
    ///
    /// Panics if `args` does not have length `type_arity`; constants with
    /// filled instantiations are only built through checked constructors.
    pub fn scheme(self, args: &[TypeExpr]) -> TypeExpr {
        use TypeExpr as T;
        assert_eq!(
            args.len(),
            self.type_arity(),
            "bad instantiation for {self:?}"
        );
        let a = |i: usize| args[i].clone();
        match self {
            Comb::K => T::arrow(a(0), T::arrow(a(1), a(0))),
            Comb::S => T::arrow(
                T::arrow(a(0), T::arrow(a(1), a(2))),
                T::arrow(T::arrow(a(0), a(1)), T::arrow(a(0), a(2))),
            ),
            Comb::Pair => T::arrow(a(0), T::arrow(a(1), T::prod(a(0), a(1)))),
            Comb::Fst => T::arrow(T::prod(a(0), a(1)), a(0)),
            Comb::Snd => T::arrow(T::prod(a(0), a(1)), a(1)),
            Comb::Inl => T::arrow(a(0), T::sum(a(0), a(1))),
            Comb::Inr => T::arrow(a(1), T::sum(a(0), a(1))),
            Comb::Case => T::arrow(
                T::arrow(a(0), a(2)),
                T::arrow(T::arrow(a(1), a(2)), T::arrow(T::sum(a(0), a(1)), a(2))),
            ),
            Comb::Zero => T::Nat,
            Comb::Succ => T::arrow(T::Nat, T::Nat),
            Comb::Rec => T::arrow(
                a(0),
                T::arrow(
                    T::arrow(T::Nat, T::arrow(a(0), a(0))),
                    T::arrow(T::Nat, a(0)),
                ),
            ),
            Comb::Exf => T::arrow(T::Empty, a(0)),
            Comb::UnitVal => T::Unit,
        }
    }
}

/// A term of the combinator language.
///
/// `Var` and `Lam` only appear in surface terms before bracket abstraction;
/// every evaluated term is closed and built from `Const` and `App`.
/// A `Const` carries its type instantiation; the parser leaves it empty and
/// elaboration fills it in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Comb, Vec<TypeExpr>),
    App(TermRef, TermRef),
    Var(String, TypeExpr),
    Lam(String, TypeExpr, TermRef),
}

impl Term {
    pub fn constant(c: Comb) -> Term {
        Term::Const(c, Vec::new())
    }

    pub fn constant_at(c: Comb, inst: Vec<TypeExpr>) -> Term {
        debug_assert_eq!(inst.len(), c.type_arity());
        Term::Const(c, inst)
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// Left-nested application `f a₁ … aₙ`.
    pub fn apps<I: IntoIterator<Item = Term>>(f: Term, args: I) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn var(name: &str, ty: TypeExpr) -> Term {
        Term::Var(name.to_string(), ty)
    }

    pub fn lam(name: &str, ty: TypeExpr, body: Term) -> Term {
        Term::Lam(name.to_string(), ty, Arc::new(body))
    }

    /// `pair a b` with the instantiation taken from the given component types.
    pub fn pair_at(lt: TypeExpr, rt: TypeExpr, a: Term, b: Term) -> Term {
        Term::apps(Term::constant_at(Comb::Pair, vec![lt, rt]), [a, b])
    }

    /// The numeral `succⁿ zero`.
    pub fn numeral(n: u64) -> Term {
        let mut t = Term::constant(Comb::Zero);
        for _ in 0..n {
            t = Term::app(Term::constant(Comb::Succ), t);
        }
        t
    }

    pub fn is_closed(&self) -> bool {
        fn go(t: &Term, bound: &mut Vec<String>) -> bool {
            match t {
                Term::Const(..) => true,
                Term::App(f, a) => go(f, bound) && go(a, bound),
                Term::Var(x, _) => bound.iter().any(|b| b == x),
                Term::Lam(x, _, b) => {
                    bound.push(x.clone());
                    let r = go(b, bound);
                    bound.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Is `name` free in this term?
    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Term::Const(..) => false,
            Term::App(f, a) => f.has_free(name) || a.has_free(name),
            Term::Var(x, _) => x == name,
            Term::Lam(x, _, b) => x != name && b.has_free(name),
        }
    }

    /// If the term is a numeral `succⁿ zero`, return `n`.
    ///
    /// This is a purely syntactic check; see `nat_value` for the semantic one.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut t = self;
        loop {
            match t {
                Term::Const(Comb::Zero, _) => return Some(n),
                Term::App(f, a) => match &**f {
                    Term::Const(Comb::Succ, _) => {
                        n += 1;
                        t = a;
                    }
                    _ => return None,
                },
                _ => return None,
            }
        }
    }

    fn fmt_term(&self, f: &mut fmt::Formatter<'_>, in_arg: bool) -> fmt::Result {
        if let Some(n) = self.as_numeral() {
            return write!(f, "{n}");
        }
        match self {
            Term::Const(c, _) => write!(f, "{}", c.name()),
            Term::Var(x, _) => write!(f, "{x}"),
            Term::App(g, a) => {
                if in_arg {
                    write!(f, "(")?;
                }
                g.fmt_term(f, false)?;
                write!(f, " ")?;
                a.fmt_term(f, true)?;
                if in_arg {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::Lam(x, ty, b) => {
                if in_arg {
                    write!(f, "(")?;
                }
                write!(f, "fn {x}:{ty}. ")?;
                b.fmt_term(f, false)?;
                if in_arg {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_term(f, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals_are_iterated_succ() {
        assert_eq!(Term::numeral(0), Term::constant(Comb::Zero));
        assert_eq!(
            Term::numeral(2),
            Term::app(
                Term::constant(Comb::Succ),
                Term::app(Term::constant(Comb::Succ), Term::constant(Comb::Zero)),
            )
        );
    }

    #[test]
    fn display_prints_numerals_and_applications() {
        let t = Term::apps(
            Term::constant(Comb::Pair),
            [Term::numeral(2), Term::constant(Comb::UnitVal)],
        );
        assert_eq!(t.to_string(), "pair 2 unit");
        let u = Term::app(
            Term::constant(Comb::Fst),
            Term::app(Term::constant(Comb::Succ), Term::constant(Comb::UnitVal)),
        );
        assert_eq!(u.to_string(), "fst (succ unit)");
    }

    #[test]
    fn closedness_and_free_variables() {
        let x = Term::var("x", TypeExpr::Nat);
        assert!(!x.is_closed());
        let lam = Term::lam("x", TypeExpr::Nat, x.clone());
        assert!(lam.is_closed());
        assert!(!lam.has_free("x"));
        let open = Term::lam("y", TypeExpr::Nat, x);
        assert!(open.has_free("x"));
    }
}
