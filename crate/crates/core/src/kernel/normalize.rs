//! Normal-order normalization of closed combinator terms.
//!
//! The rewrite rules are exactly the defining equations of the basis, read
//! left to right:
//!
//! ```text
//! K a b           ~> a
//! S a b c         ~> a c (b c)
//! fst (pair a b)  ~> a
//! snd (pair a b)  ~> b
//! case a b (inl x) ~> a x
//! case a b (inr x) ~> b x
//! rec a b zero     ~> a
//! rec a b (succ n) ~> b n (rec a b n)
//! ```
//!
//! `exf` has no rule: the empty type has no closed inhabitants in this model,
//! so `exf` can never meet an argument and stays a stuck constant. Surface
//! lambdas that reach the normalizer are handled by capture-avoiding β so
//! that terms like `rec 0 (fn n:N. fn r:N. succ r) 3` evaluate without being
//! bracket-abstracted first; the result agrees with the abstracted form.
//! Well-typed closed terms are strongly normalizing; normalization is not
//! re-proved here, just relied on.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::infer::{elaborate, TypeError};
use super::parse::ParseError;
use super::term::{Comb, Term, TermRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("term is not closed: `{0}`")]
    OpenTerm(String),
    #[error("reduction budget exhausted")]
    BudgetExhausted,
}

/// One normalization run. The memo table is per call, so the kernel stays
/// free of shared mutable state; hits are keyed by node identity, with the
/// keyed `Arc` retained so addresses cannot be reused while the run lives.
struct Normalizer {
    whnf_memo: HashMap<usize, (TermRef, TermRef)>,
    nf_memo: HashMap<usize, (TermRef, TermRef)>,
    budget: Option<u64>,
    steps: u64,
}

fn key(t: &TermRef) -> usize {
    Arc::as_ptr(t) as usize
}

impl Normalizer {
    fn new(budget: Option<u64>) -> Self {
        Normalizer {
            whnf_memo: HashMap::new(),
            nf_memo: HashMap::new(),
            budget,
            steps: 0,
        }
    }

    fn tick(&mut self) -> Result<(), KernelError> {
        self.steps += 1;
        match self.budget {
            Some(b) if self.steps > b => Err(KernelError::BudgetExhausted),
            _ => Ok(()),
        }
    }

    /// Reduce to weak head normal form: no rule applies at the root.
    fn whnf(&mut self, t: &TermRef) -> Result<TermRef, KernelError> {
        if let Some((_, r)) = self.whnf_memo.get(&key(t)) {
            return Ok(r.clone());
        }
        // Unwind the application spine; `args` holds arguments innermost-last.
        let mut head = t.clone();
        let mut args: Vec<TermRef> = Vec::new();
        let result = loop {
            match &*head {
                Term::App(f, a) => {
                    args.push(a.clone());
                    head = f.clone();
                }
                Term::Const(c, _) => match self.contract(*c, &head, &mut args)? {
                    Some(next) => head = next,
                    None => break self.rebuild(head, args),
                },
                Term::Lam(x, _, body) => match args.pop() {
                    Some(a) => {
                        self.tick()?;
                        head = subst(body, x, &a);
                    }
                    None => break self.rebuild(head, args),
                },
                // A free variable head is stuck.
                _ => break self.rebuild(head, args),
            }
        };
        self.whnf_memo.insert(key(t), (t.clone(), result.clone()));
        Ok(result)
    }

    fn rebuild(&self, head: TermRef, mut args: Vec<TermRef>) -> TermRef {
        let mut t = head;
        while let Some(a) = args.pop() {
            t = Arc::new(Term::App(t, a));
        }
        t
    }

    /// Try to fire the rule for `c` given the argument stack (innermost-last).
    /// Returns the contractum to continue reducing, or `None` if no rule fires.
    fn contract(
        &mut self,
        c: Comb,
        head: &TermRef,
        args: &mut Vec<TermRef>,
    ) -> Result<Option<TermRef>, KernelError> {
        let n = args.len();
        let arg = |args: &[TermRef], i: usize| args[args.len() - 1 - i].clone();
        match c {
            Comb::K if n >= 2 => {
                self.tick()?;
                let a = arg(args, 0);
                args.truncate(n - 2);
                Ok(Some(a))
            }
            Comb::S if n >= 3 => {
                self.tick()?;
                let a = arg(args, 0);
                let b = arg(args, 1);
                let cc = arg(args, 2);
                args.truncate(n - 3);
                let left = Arc::new(Term::App(a, cc.clone()));
                let right = Arc::new(Term::App(b, cc));
                Ok(Some(Arc::new(Term::App(left, right))))
            }
            Comb::Fst | Comb::Snd if n >= 1 => {
                let p = self.whnf(&arg(args, 0))?;
                if let Some((a, b)) = applied2(&p, Comb::Pair) {
                    self.tick()?;
                    args.truncate(n - 1);
                    Ok(Some(if c == Comb::Fst { a } else { b }))
                } else {
                    Ok(None)
                }
            }
            Comb::Case if n >= 3 => {
                let scrut = self.whnf(&arg(args, 2))?;
                if let Some(x) = applied1(&scrut, Comb::Inl) {
                    self.tick()?;
                    let f = arg(args, 0);
                    args.truncate(n - 3);
                    Ok(Some(Arc::new(Term::App(f, x))))
                } else if let Some(x) = applied1(&scrut, Comb::Inr) {
                    self.tick()?;
                    let g = arg(args, 1);
                    args.truncate(n - 3);
                    Ok(Some(Arc::new(Term::App(g, x))))
                } else {
                    Ok(None)
                }
            }
            Comb::Rec if n >= 3 => {
                let scrut = self.whnf(&arg(args, 2))?;
                if matches!(&*scrut, Term::Const(Comb::Zero, _)) {
                    self.tick()?;
                    let a = arg(args, 0);
                    args.truncate(n - 3);
                    Ok(Some(a))
                } else if let Some(m) = applied1(&scrut, Comb::Succ) {
                    self.tick()?;
                    let a = arg(args, 0);
                    let b = arg(args, 1);
                    args.truncate(n - 3);
                    let again = Arc::new(Term::App(
                        Arc::new(Term::App(Arc::new(Term::App(head.clone(), a)), b.clone())),
                        m.clone(),
                    ));
                    Ok(Some(Arc::new(Term::App(Arc::new(Term::App(b, m)), again))))
                } else {
                    Ok(None)
                }
            }
            _ => Ok(None),
        }
    }

    /// Full normal form.
    fn nf(&mut self, t: &TermRef) -> Result<TermRef, KernelError> {
        if let Some((_, r)) = self.nf_memo.get(&key(t)) {
            return Ok(r.clone());
        }
        let w = self.whnf(t)?;
        // Straighten succ spines iteratively: deep numerals would otherwise
        // cost one stack frame per digit.
        if applied1(&w, Comb::Succ).is_some() {
            let mut count: u64 = 0;
            let mut cur = w;
            while let Some(inner) = applied1(&cur, Comb::Succ) {
                count += 1;
                cur = self.whnf(&inner)?;
            }
            let mut result = self.nf(&cur)?;
            let succ: TermRef = Arc::new(Term::Const(Comb::Succ, Vec::new()));
            for _ in 0..count {
                result = Arc::new(Term::App(succ.clone(), result));
            }
            self.nf_memo.insert(key(t), (t.clone(), result.clone()));
            return Ok(result);
        }
        let result = match &*w {
            Term::App(f, a) => {
                // The root cannot fire any more; in a well-typed closed term
                // normalizing below the head cannot create a new root redex.
                let nf_f = self.nf(f)?;
                let nf_a = self.nf(a)?;
                Arc::new(Term::App(nf_f, nf_a))
            }
            Term::Lam(x, ty, b) => {
                let nb = self.nf(b)?;
                Arc::new(Term::Lam(x.clone(), ty.clone(), nb))
            }
            _ => w,
        };
        self.nf_memo.insert(key(t), (t.clone(), result.clone()));
        Ok(result)
    }
}

/// Capture-avoiding substitution of `v` for the free variable `name`.
fn subst(t: &TermRef, name: &str, v: &TermRef) -> TermRef {
    if !t.has_free(name) {
        return t.clone();
    }
    match &**t {
        Term::Var(x, _) if x == name => v.clone(),
        Term::Var(..) | Term::Const(..) => t.clone(),
        Term::App(f, a) => Arc::new(Term::App(subst(f, name, v), subst(a, name, v))),
        Term::Lam(x, ty, b) => {
            if x == name {
                t.clone()
            } else if v.has_free(x) {
                let mut fresh = format!("{x}'");
                while v.has_free(&fresh) || b.has_free(&fresh) || fresh == name {
                    fresh.push('\'');
                }
                let renamed = subst(b, x, &Arc::new(Term::Var(fresh.clone(), ty.clone())));
                Arc::new(Term::Lam(fresh, ty.clone(), subst(&renamed, name, v)))
            } else {
                Arc::new(Term::Lam(x.clone(), ty.clone(), subst(b, name, v)))
            }
        }
    }
}

fn applied1(t: &TermRef, c: Comb) -> Option<TermRef> {
    match &**t {
        Term::App(f, a) => match &**f {
            Term::Const(k, _) if *k == c => Some(a.clone()),
            _ => None,
        },
        _ => None,
    }
}

fn applied2(t: &TermRef, c: Comb) -> Option<(TermRef, TermRef)> {
    match &**t {
        Term::App(fa, b) => match &**fa {
            Term::App(f, a) => match &**f {
                Term::Const(k, _) if *k == c => Some((a.clone(), b.clone())),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// Normalize a closed well-typed term. Ill-typed or open input is rejected
/// before any reduction happens.
pub fn normalize(t: &Term) -> Result<Term, KernelError> {
    if !t.is_closed() {
        return Err(KernelError::OpenTerm(t.to_string()));
    }
    let (elabed, _) = elaborate(t)?;
    let r = Normalizer::new(None).nf(&Arc::new(elabed))?;
    Ok((*r).clone())
}

/// Normalize without the closedness/typing checks. Callers must have
/// elaborated the term; used on internally constructed redexes where the
/// checks would dominate the running time.
pub(crate) fn normalize_unchecked(t: &TermRef) -> TermRef {
    Normalizer::new(None)
        .nf(t)
        .expect("unbudgeted normalization cannot fail")
}

/// Normalize with a step budget; returns `BudgetExhausted` when exceeded.
/// Intended for harnesses feeding untrusted input.
pub fn normalize_budgeted(t: &Term, max_steps: u64) -> Result<Term, KernelError> {
    if !t.is_closed() {
        return Err(KernelError::OpenTerm(t.to_string()));
    }
    let (elabed, _) = elaborate(t)?;
    let r = Normalizer::new(Some(max_steps)).nf(&Arc::new(elabed))?;
    Ok((*r).clone())
}

/// Convertibility: both terms normalize to the same normal form.
///
/// This is the realizer equality of the term model. The terms must be closed
/// and of the same type; comparing across types is an error.
pub fn terms_equal(a: &Term, b: &Term) -> Result<bool, KernelError> {
    if !a.is_closed() {
        return Err(KernelError::OpenTerm(a.to_string()));
    }
    if !b.is_closed() {
        return Err(KernelError::OpenTerm(b.to_string()));
    }
    let (ea, ta) = elaborate(a)?;
    let (eb, tb) = elaborate(b)?;
    if ta != tb {
        return Err(KernelError::Type(TypeError {
            message: format!("compared terms have different types: {ta} vs {tb}"),
            subterm: format!("{a} vs {b}"),
        }));
    }
    let mut norm = Normalizer::new(None);
    let na = norm.nf(&Arc::new(ea))?;
    let nb = norm.nf(&Arc::new(eb))?;
    Ok(na == nb)
}
