//! Sample pools and seeded generation of well-typed terms.
//!
//! The apartness checkers sample their genuinely universal clauses; the pool
//! supplies the candidates: numerals 0..8 at `N`, canonical functions at
//! arrow types, componentwise combinations elsewhere, plus whatever the
//! caller adds. Random well-typed closed terms (for the law suites) are
//! generated here too, always from an explicit seed.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::kernel::{normalize, Comb, Term, TypeExpr};
use crate::tca::{self, TcaError};

/// Default numeral range in auto-generated pools (inclusive).
const MAX_NUMERAL: u64 = 8;
/// Cap on the number of samples returned per type.
const PER_TYPE_CAP: usize = 12;

/// A per-type supply of closed normal terms.
#[derive(Debug, Default, Clone)]
pub struct SamplePool {
    user: HashMap<TypeExpr, Vec<Term>>,
    cap: Option<usize>,
}

impl SamplePool {
    pub fn new() -> SamplePool {
        SamplePool::default()
    }

    /// A pool answering at most `cap` samples per type; checks at deeply
    /// nested types get expensive fast, and a small cap keeps them usable.
    pub fn with_cap(cap: usize) -> SamplePool {
        SamplePool {
            user: HashMap::new(),
            cap: Some(cap),
        }
    }

    /// Add a caller-supplied sample; it is normalized and indexed under its
    /// inferred type.
    pub fn add(&mut self, t: &Term) -> Result<(), TcaError> {
        let compiled = tca::compile(t)?;
        let ty = crate::kernel::infer_type(&compiled)?;
        let n = normalize(&compiled)?;
        let entry = self.user.entry(ty).or_default();
        if !entry.contains(&n) {
            entry.push(n);
        }
        Ok(())
    }

    /// Samples of the given type: caller-supplied first, then the canonical
    /// pool, deduplicated and capped.
    pub fn samples(&self, ty: &TypeExpr) -> Vec<Term> {
        let cap = self.cap.unwrap_or(PER_TYPE_CAP).min(PER_TYPE_CAP);
        let mut out: Vec<Term> = self.user.get(ty).cloned().unwrap_or_default();
        out.truncate(PER_TYPE_CAP);
        for t in canonical_terms(ty) {
            if out.len() >= cap {
                break;
            }
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }
}

/// Canonical closed inhabitants of a type, in normal form. Empty types have
/// none; arrow types get constant functions, the identity where it exists,
/// and the successor on `N -> N`.
pub fn canonical_terms(ty: &TypeExpr) -> Vec<Term> {
    let mut out = Vec::new();
    match ty {
        TypeExpr::Nat => {
            for n in 0..=MAX_NUMERAL {
                out.push(Term::numeral(n));
            }
        }
        TypeExpr::Unit => out.push(Term::constant(Comb::UnitVal)),
        TypeExpr::Empty => {}
        TypeExpr::Prod(l, r) => {
            let ls = canonical_terms(l);
            let rs = canonical_terms(r);
            // Walk the grid by anti-diagonals so small combinations come first.
            for d in 0..(ls.len() + rs.len()) {
                for (i, lt) in ls.iter().enumerate() {
                    if d < i {
                        break;
                    }
                    let j = d - i;
                    if let Some(rt) = rs.get(j) {
                        out.push(Term::pair_at(
                            (**l).clone(),
                            (**r).clone(),
                            lt.clone(),
                            rt.clone(),
                        ));
                        if out.len() >= PER_TYPE_CAP {
                            return out;
                        }
                    }
                }
            }
        }
        TypeExpr::Sum(l, r) => {
            let ls = canonical_terms(l);
            let rs = canonical_terms(r);
            let mut li = ls.into_iter();
            let mut ri = rs.into_iter();
            loop {
                let mut progressed = false;
                if let Some(lt) = li.next() {
                    out.push(Term::app(
                        Term::constant_at(Comb::Inl, vec![(**l).clone(), (**r).clone()]),
                        lt,
                    ));
                    progressed = true;
                }
                if let Some(rt) = ri.next() {
                    out.push(Term::app(
                        Term::constant_at(Comb::Inr, vec![(**l).clone(), (**r).clone()]),
                        rt,
                    ));
                    progressed = true;
                }
                if !progressed || out.len() >= PER_TYPE_CAP {
                    break;
                }
            }
        }
        TypeExpr::Arrow(dom, cod) => {
            if **dom == TypeExpr::Nat && **cod == TypeExpr::Nat {
                out.push(Term::constant(Comb::Succ));
            }
            if dom == cod {
                out.push(tca::identity(dom));
            }
            for c in canonical_terms(cod) {
                out.push(Term::app(
                    Term::constant_at(Comb::K, vec![(**cod).clone(), (**dom).clone()]),
                    c,
                ));
                if out.len() >= PER_TYPE_CAP {
                    break;
                }
            }
        }
    }
    out.truncate(PER_TYPE_CAP);
    out
}

/// A random type over `N`, `Unit`, products, sums and arrows.
pub fn random_type(rng: &mut StdRng, depth: usize) -> TypeExpr {
    if depth == 0 || rng.random_bool(0.4) {
        if rng.random_bool(0.8) {
            TypeExpr::Nat
        } else {
            TypeExpr::Unit
        }
    } else {
        let l = random_type(rng, depth - 1);
        let r = random_type(rng, depth - 1);
        match rng.random_range(0..3) {
            0 => TypeExpr::prod(l, r),
            1 => TypeExpr::sum(l, r),
            _ => TypeExpr::arrow(l, r),
        }
    }
}

/// A random closed well-typed combinator term of the given type, generated
/// from surface syntax (with lambdas) and compiled. Redexes are produced on
/// purpose; normal forms are not guaranteed.
pub fn random_term(ty: &TypeExpr, rng: &mut StdRng, fuel: usize) -> Term {
    let mut env: Vec<(String, TypeExpr)> = Vec::new();
    let surface = gen(ty, &mut env, rng, fuel);
    tca::compile(&surface).expect("generated terms are well-typed")
}

fn gen(ty: &TypeExpr, env: &mut Vec<(String, TypeExpr)>, rng: &mut StdRng, fuel: usize) -> Term {
    // Prefer a bound variable of the right type now and then.
    let vars: Vec<(String, TypeExpr)> = env.iter().filter(|(_, t)| t == ty).cloned().collect();
    if !vars.is_empty() && rng.random_bool(0.5) {
        let (name, t) = &vars[rng.random_range(0..vars.len())];
        return Term::var(name, t.clone());
    }
    if fuel > 0 && rng.random_bool(0.35) {
        // Wrap in a redex that evaluates back to the requested type.
        match rng.random_range(0..3) {
            0 => {
                // fst (pair wanted junk)
                let junk_ty = TypeExpr::Nat;
                let a = gen(ty, env, rng, fuel - 1);
                let b = gen(&junk_ty, env, rng, fuel - 1);
                return Term::app(
                    Term::constant_at(Comb::Fst, vec![ty.clone(), junk_ty]),
                    Term::pair_at(ty.clone(), TypeExpr::Nat, a, b),
                );
            }
            1 => {
                // K wanted junk
                let a = gen(ty, env, rng, fuel - 1);
                let b = gen(&TypeExpr::Unit, env, rng, fuel - 1);
                return Term::apps(
                    Term::constant_at(Comb::K, vec![ty.clone(), TypeExpr::Unit]),
                    [a, b],
                );
            }
            _ => {
                // case (fn _. wanted-left) (fn _. wanted-right) (inl/inr …)
                let a = gen(ty, env, rng, fuel - 1);
                let b = gen(ty, env, rng, fuel - 1);
                let scrut_l = gen(&TypeExpr::Nat, env, rng, fuel - 1);
                let lx = tca::fresh_name("cl");
                let rx = tca::fresh_name("cr");
                let scrut = if rng.random_bool(0.5) {
                    Term::app(
                        Term::constant_at(Comb::Inl, vec![TypeExpr::Nat, TypeExpr::Unit]),
                        scrut_l,
                    )
                } else {
                    Term::app(
                        Term::constant_at(Comb::Inr, vec![TypeExpr::Nat, TypeExpr::Unit]),
                        Term::constant(Comb::UnitVal),
                    )
                };
                return Term::apps(
                    Term::constant_at(Comb::Case, vec![TypeExpr::Nat, TypeExpr::Unit, ty.clone()]),
                    [
                        Term::lam(&lx, TypeExpr::Nat, a),
                        Term::lam(&rx, TypeExpr::Unit, b),
                        scrut,
                    ],
                );
            }
        }
    }
    match ty {
        TypeExpr::Nat => {
            if fuel > 0 && rng.random_bool(0.3) {
                Term::app(Term::constant(Comb::Succ), gen(ty, env, rng, fuel - 1))
            } else {
                Term::numeral(rng.random_range(0..=MAX_NUMERAL))
            }
        }
        TypeExpr::Unit => Term::constant(Comb::UnitVal),
        // No closed inhabitants; reachable only through caller error.
        TypeExpr::Empty => panic!("cannot generate a closed term of the empty type"),
        TypeExpr::Prod(l, r) => {
            let a = gen(l, env, rng, fuel.saturating_sub(1));
            let b = gen(r, env, rng, fuel.saturating_sub(1));
            Term::pair_at((**l).clone(), (**r).clone(), a, b)
        }
        TypeExpr::Sum(l, r) => {
            let go_left = match (has_inhabitant(l), has_inhabitant(r)) {
                (true, false) => true,
                (false, true) => false,
                _ => rng.random_bool(0.5),
            };
            if go_left {
                Term::app(
                    Term::constant_at(Comb::Inl, vec![(**l).clone(), (**r).clone()]),
                    gen(l, env, rng, fuel.saturating_sub(1)),
                )
            } else {
                Term::app(
                    Term::constant_at(Comb::Inr, vec![(**l).clone(), (**r).clone()]),
                    gen(r, env, rng, fuel.saturating_sub(1)),
                )
            }
        }
        TypeExpr::Arrow(dom, cod) => {
            let x = tca::fresh_name("x");
            env.push((x.clone(), (**dom).clone()));
            let body = gen(cod, env, rng, fuel.saturating_sub(1));
            env.pop();
            Term::lam(&x, (**dom).clone(), body)
        }
    }
}

/// Does the type have a closed inhabitant?
pub fn has_inhabitant(ty: &TypeExpr) -> bool {
    match ty {
        TypeExpr::Nat | TypeExpr::Unit => true,
        TypeExpr::Empty => false,
        TypeExpr::Prod(l, r) => has_inhabitant(l) && has_inhabitant(r),
        TypeExpr::Sum(l, r) => has_inhabitant(l) || has_inhabitant(r),
        // exf gives an inhabitant whenever the domain is empty.
        TypeExpr::Arrow(dom, cod) => !has_inhabitant(dom) || has_inhabitant(cod),
    }
}

/// A seeded generator.
pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::infer_type;

    #[test]
    fn canonical_nat_samples_are_the_small_numerals() {
        let s = canonical_terms(&TypeExpr::Nat);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], Term::numeral(0));
        assert_eq!(s[8], Term::numeral(8));
    }

    #[test]
    fn canonical_arrow_samples_include_succ_and_identity() {
        let nn = TypeExpr::arrow(TypeExpr::Nat, TypeExpr::Nat);
        let s = canonical_terms(&nn);
        assert!(s.contains(&Term::constant(Comb::Succ)));
        assert!(s.iter().all(|t| infer_type(t).unwrap() == nn));
    }

    #[test]
    fn empty_type_has_no_samples() {
        assert!(canonical_terms(&TypeExpr::Empty).is_empty());
        assert!(!has_inhabitant(&TypeExpr::arrow(
            TypeExpr::Nat,
            TypeExpr::Empty
        )));
        assert!(has_inhabitant(&TypeExpr::arrow(
            TypeExpr::Empty,
            TypeExpr::Empty
        )));
    }

    #[test]
    fn random_terms_are_well_typed_at_the_requested_type() {
        let mut rng = rng_from_seed(7);
        for _ in 0..50 {
            let ty = random_type(&mut rng, 2);
            if !has_inhabitant(&ty) {
                continue;
            }
            let t = random_term(&ty, &mut rng, 3);
            assert!(t.is_closed());
            assert_eq!(infer_type(&t).unwrap(), ty, "term {t}");
        }
    }

    #[test]
    fn user_samples_come_first() {
        let mut pool = SamplePool::new();
        pool.add(&Term::numeral(42)).unwrap();
        let s = pool.samples(&TypeExpr::Nat);
        assert_eq!(s[0], Term::numeral(42));
        assert!(s.contains(&Term::numeral(3)));
    }
}
