//! Type inference and elaboration.
//!
//! Combinator constants are schematic: `K` stands for `K_{S,T} : S -> T -> S`
//! and every occurrence picks its own instantiation. The surface grammar has
//! no type arguments on constants, so inference unifies fresh parameters per
//! occurrence against the application context, then writes the resolved
//! instantiations back into the term. Terms built programmatically carry
//! their instantiations already and are only checked.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::term::{Comb, Term};
use super::types::TypeExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct TypeError {
    pub message: String,
    /// Display form of the subterm the error is anchored at.
    pub subterm: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type error: {} in `{}`", self.message, self.subterm)
    }
}

/// Inference-time types: `TypeExpr` plus metavariables.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Meta(u32),
    Nat,
    Unit,
    Empty,
    Prod(Box<Ty>, Box<Ty>),
    Sum(Box<Ty>, Box<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn of(t: &TypeExpr) -> Ty {
        match t {
            TypeExpr::Nat => Ty::Nat,
            TypeExpr::Unit => Ty::Unit,
            TypeExpr::Empty => Ty::Empty,
            TypeExpr::Prod(l, r) => Ty::Prod(Box::new(Ty::of(l)), Box::new(Ty::of(r))),
            TypeExpr::Sum(l, r) => Ty::Sum(Box::new(Ty::of(l)), Box::new(Ty::of(r))),
            TypeExpr::Arrow(l, r) => Ty::Arrow(Box::new(Ty::of(l)), Box::new(Ty::of(r))),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Meta(m) => write!(f, "?{m}"),
            Ty::Nat => write!(f, "N"),
            Ty::Unit => write!(f, "Unit"),
            Ty::Empty => write!(f, "Empty"),
            Ty::Prod(l, r) => write!(f, "({l} * {r})"),
            Ty::Sum(l, r) => write!(f, "({l} + {r})"),
            Ty::Arrow(l, r) => write!(f, "({l} -> {r})"),
        }
    }
}

#[derive(Default)]
struct Unifier {
    subst: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.subst.push(None);
        Ty::Meta(self.subst.len() as u32 - 1)
    }

    /// Follow the substitution at the root only.
    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(m) = t {
            match &self.subst[m as usize] {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    /// Apply the substitution everywhere.
    fn zonk(&self, t: &Ty) -> Ty {
        match self.shallow(t) {
            Ty::Prod(l, r) => Ty::Prod(Box::new(self.zonk(&l)), Box::new(self.zonk(&r))),
            Ty::Sum(l, r) => Ty::Sum(Box::new(self.zonk(&l)), Box::new(self.zonk(&r))),
            Ty::Arrow(l, r) => Ty::Arrow(Box::new(self.zonk(&l)), Box::new(self.zonk(&r))),
            leaf => leaf,
        }
    }

    fn occurs(&self, m: u32, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Meta(n) => n == m,
            Ty::Prod(l, r) | Ty::Sum(l, r) | Ty::Arrow(l, r) => {
                self.occurs(m, &l) || self.occurs(m, &r)
            }
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), (Ty, Ty)> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => Ok(()),
            (Ty::Meta(m), t) | (t, Ty::Meta(m)) => {
                if self.occurs(*m, t) {
                    return Err((a.clone(), b.clone()));
                }
                self.subst[*m as usize] = Some(t.clone());
                Ok(())
            }
            (Ty::Nat, Ty::Nat) | (Ty::Unit, Ty::Unit) | (Ty::Empty, Ty::Empty) => Ok(()),
            (Ty::Prod(l1, r1), Ty::Prod(l2, r2))
            | (Ty::Sum(l1, r1), Ty::Sum(l2, r2))
            | (Ty::Arrow(l1, r1), Ty::Arrow(l2, r2)) => {
                self.unify(l1, l2)
                    .map_err(|_| (self.zonk(&a), self.zonk(&b)))?;
                self.unify(r1, r2)
                    .map_err(|_| (self.zonk(&a), self.zonk(&b)))?;
                Ok(())
            }
            _ => Err((a, b)),
        }
    }

    /// Read a fully resolved type back; `None` if metas remain.
    fn extract(&self, t: &Ty) -> Option<TypeExpr> {
        match self.shallow(t) {
            Ty::Meta(_) => None,
            Ty::Nat => Some(TypeExpr::Nat),
            Ty::Unit => Some(TypeExpr::Unit),
            Ty::Empty => Some(TypeExpr::Empty),
            Ty::Prod(l, r) => Some(TypeExpr::prod(self.extract(&l)?, self.extract(&r)?)),
            Ty::Sum(l, r) => Some(TypeExpr::sum(self.extract(&l)?, self.extract(&r)?)),
            Ty::Arrow(l, r) => Some(TypeExpr::arrow(self.extract(&l)?, self.extract(&r)?)),
        }
    }

    /// Like `extract` but defaults leftover metas to `Unit`. Instantiation
    /// parameters that stay free after the whole term resolved (the middle
    /// type of `S K K` is the classic case) are semantically irrelevant;
    /// pinning them keeps elaboration total and deterministic.
    fn extract_default(&self, t: &Ty) -> TypeExpr {
        match self.shallow(t) {
            Ty::Meta(_) => TypeExpr::Unit,
            Ty::Nat => TypeExpr::Nat,
            Ty::Unit => TypeExpr::Unit,
            Ty::Empty => TypeExpr::Empty,
            Ty::Prod(l, r) => TypeExpr::prod(self.extract_default(&l), self.extract_default(&r)),
            Ty::Sum(l, r) => TypeExpr::sum(self.extract_default(&l), self.extract_default(&r)),
            Ty::Arrow(l, r) => TypeExpr::arrow(self.extract_default(&l), self.extract_default(&r)),
        }
    }
}

/// Scheme of a constant with the given (possibly fresh) parameters.
fn scheme_ty(c: Comb, params: &[Ty]) -> Ty {
    use Ty as T;
    let a = |i: usize| params[i].clone();
    let ar = |l: Ty, r: Ty| T::Arrow(Box::new(l), Box::new(r));
    let pr = |l: Ty, r: Ty| T::Prod(Box::new(l), Box::new(r));
    let su = |l: Ty, r: Ty| T::Sum(Box::new(l), Box::new(r));
    match c {
        Comb::K => ar(a(0), ar(a(1), a(0))),
        Comb::S => ar(ar(a(0), ar(a(1), a(2))), ar(ar(a(0), a(1)), ar(a(0), a(2)))),
        Comb::Pair => ar(a(0), ar(a(1), pr(a(0), a(1)))),
        Comb::Fst => ar(pr(a(0), a(1)), a(0)),
        Comb::Snd => ar(pr(a(0), a(1)), a(1)),
        Comb::Inl => ar(a(0), su(a(0), a(1))),
        Comb::Inr => ar(a(1), su(a(0), a(1))),
        Comb::Case => ar(ar(a(0), a(2)), ar(ar(a(1), a(2)), ar(su(a(0), a(1)), a(2)))),
        Comb::Zero => T::Nat,
        Comb::Succ => ar(T::Nat, T::Nat),
        Comb::Rec => ar(a(0), ar(ar(T::Nat, ar(a(0), a(0))), ar(T::Nat, a(0)))),
        Comb::Exf => ar(T::Empty, a(0)),
        Comb::UnitVal => T::Unit,
    }
}

struct Elab {
    uni: Unifier,
    /// Per-constant-occurrence parameter metas, keyed by traversal id.
    insts: Vec<(usize, Vec<Ty>)>,
}

impl Elab {
    fn infer(
        &mut self,
        t: &Term,
        node_id: &mut usize,
        env: &mut Vec<(String, Ty)>,
    ) -> Result<Ty, TypeError> {
        let my_id = *node_id;
        *node_id += 1;
        match t {
            Term::Const(c, inst) => {
                let params: Vec<Ty> = if inst.is_empty() {
                    (0..c.type_arity()).map(|_| self.uni.fresh()).collect()
                } else {
                    if inst.len() != c.type_arity() {
                        return Err(TypeError {
                            message: format!(
                                "constant {} expects {} type parameters, found {}",
                                c.name(),
                                c.type_arity(),
                                inst.len()
                            ),
                            subterm: t.to_string(),
                        });
                    }
                    inst.iter().map(Ty::of).collect()
                };
                let ty = scheme_ty(*c, &params);
                self.insts.push((my_id, params));
                Ok(ty)
            }
            Term::App(f, a) => {
                let tf = self.infer(f, node_id, env)?;
                let ta = self.infer(a, node_id, env)?;
                let res = self.uni.fresh();
                let want = Ty::Arrow(Box::new(ta.clone()), Box::new(res.clone()));
                if self.uni.unify(&tf, &want).is_err() {
                    let message = match self.uni.shallow(&tf) {
                        Ty::Arrow(..) => format!(
                            "cannot apply `{f}` : {} to `{a}` : {}",
                            self.uni.zonk(&tf),
                            self.uni.zonk(&ta)
                        ),
                        got => format!("`{f}` : {got} is not a function (applied to `{a}`)"),
                    };
                    return Err(TypeError {
                        message,
                        subterm: t.to_string(),
                    });
                }
                Ok(res)
            }
            Term::Var(x, ty) => {
                let carried = Ty::of(ty);
                if let Some((_, bound)) = env.iter().rev().find(|(n, _)| n == x) {
                    let bound = bound.clone();
                    self.uni.unify(&carried, &bound).map_err(|_| TypeError {
                        message: format!(
                            "variable {x} annotated as {ty} but bound at {}",
                            self.uni.zonk(&bound)
                        ),
                        subterm: t.to_string(),
                    })?;
                }
                Ok(carried)
            }
            Term::Lam(x, ty, body) => {
                env.push((x.clone(), Ty::of(ty)));
                let tb = self.infer(body, node_id, env);
                env.pop();
                Ok(Ty::Arrow(Box::new(Ty::of(ty)), Box::new(tb?)))
            }
        }
    }

    /// Rebuild the term with every constant's instantiation filled in.
    fn rebuild(&self, t: &Term, node_id: &mut usize, by_id: &HashMap<usize, &Vec<Ty>>) -> Term {
        let my_id = *node_id;
        *node_id += 1;
        match t {
            Term::Const(c, _) => {
                let params = by_id[&my_id];
                let inst = params.iter().map(|p| self.uni.extract_default(p)).collect();
                Term::Const(*c, inst)
            }
            Term::App(f, a) => {
                let rf = self.rebuild(f, node_id, by_id);
                let ra = self.rebuild(a, node_id, by_id);
                Term::app(rf, ra)
            }
            Term::Var(..) => t.clone(),
            Term::Lam(x, ty, b) => {
                let rb = self.rebuild(b, node_id, by_id);
                Term::lam(x, ty.clone(), rb)
            }
        }
    }
}

/// Elaborate a term: infer its unique type and fill in every combinator
/// instantiation. Works on open terms as long as variables are annotated.
pub fn elaborate(t: &Term) -> Result<(Term, TypeExpr), TypeError> {
    let mut elab = Elab {
        uni: Unifier::default(),
        insts: Vec::new(),
    };
    let mut id = 0usize;
    let ty = elab.infer(t, &mut id, &mut Vec::new())?;
    let resolved = elab.uni.extract(&ty).ok_or_else(|| TypeError {
        message: "the term's type is ambiguous; annotate or apply it".into(),
        subterm: t.to_string(),
    })?;
    let by_id: HashMap<usize, &Vec<Ty>> = elab.insts.iter().map(|(i, v)| (*i, v)).collect();
    let mut id = 0usize;
    let term = elab.rebuild(t, &mut id, &by_id);
    Ok((term, resolved))
}

/// The unique type of a term (see `elaborate`).
pub fn infer_type(t: &Term) -> Result<TypeExpr, TypeError> {
    elaborate(t).map(|(_, ty)| ty)
}
