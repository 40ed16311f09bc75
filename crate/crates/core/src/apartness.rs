//! The apartness translation and its executable checkers.
//!
//! Every type `σ` built from `N`, `Unit`, products, sums and arrows is sent
//! to a pair of types `(σ⁺, σ⁻)`: `σ⁺` carries the enriched elements and
//! `σ⁻` the evidence that two of them are apart. The tables are
//!
//! ```text
//! N⁺ = N            N⁻ = N
//! (σ*τ)⁺ = σ⁺*τ⁺    (σ*τ)⁻ = σ⁻+τ⁻
//! (σ+τ)⁺ = σ⁺+τ⁺    (σ+τ)⁻ = σ⁻*τ⁻
//! (σ->τ)⁺ = (σ⁺->τ⁺) * (σ⁺->σ⁺->τ⁻->σ⁻)
//! (σ->τ)⁻ = σ⁺*τ⁻
//! ```
//!
//! with `Unit` translated as the terminal structure (unit carrier, unit
//! witness type, empty apartness). The formulas `dom_σ` (membership of the
//! enriched carrier) and `app_σ(x,y,z)` (`z` witnesses `x # y`) are decided
//! exactly at base, product and sum structure; their arrow-type clauses are
//! genuine universal quantifiers and are checked on sample pools, with a
//! three-valued verdict instead of a pretended decision.

use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{
    elaborate, normalize_unchecked, Comb, KernelError, Term, TermRef, TypeExpr, Verdict,
};
use crate::sampling::SamplePool;
use crate::tca::{
    self, case_at, compile, fst_at, identity, if_nat, inl_at, inr_at, lam, pair2, snd_at, v,
    TcaError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApartnessError {
    #[error("no apartness translation for `{0}` (contains the empty type)")]
    Untranslatable(TypeExpr),
    #[error("expected a term of type `{expected}`, found `{found}` : `{found_ty}`")]
    TypeMismatch {
        expected: TypeExpr,
        found: String,
        found_ty: TypeExpr,
    },
    #[error("non-canonical normal form `{0}` (is the input closed and well-typed?)")]
    NonCanonical(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Tca(#[from] TcaError),
}

impl From<crate::kernel::TypeError> for ApartnessError {
    fn from(e: crate::kernel::TypeError) -> Self {
        ApartnessError::Kernel(KernelError::Type(e))
    }
}

/// A type together with its translated carrier and witness types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslatedType {
    pub source: TypeExpr,
    pub plus: TypeExpr,
    pub minus: TypeExpr,
}

/// Structurally recursive application of the translation tables.
pub fn translate_type(source: &TypeExpr) -> Result<TranslatedType, ApartnessError> {
    let (plus, minus) = tables(source)?;
    Ok(TranslatedType {
        source: source.clone(),
        plus,
        minus,
    })
}

fn tables(ty: &TypeExpr) -> Result<(TypeExpr, TypeExpr), ApartnessError> {
    match ty {
        TypeExpr::Nat => Ok((TypeExpr::Nat, TypeExpr::Nat)),
        TypeExpr::Unit => Ok((TypeExpr::Unit, TypeExpr::Unit)),
        TypeExpr::Empty => Err(ApartnessError::Untranslatable(ty.clone())),
        TypeExpr::Prod(l, r) => {
            let (lp, lm) = tables(l)?;
            let (rp, rm) = tables(r)?;
            Ok((TypeExpr::prod(lp, rp), TypeExpr::sum(lm, rm)))
        }
        TypeExpr::Sum(l, r) => {
            let (lp, lm) = tables(l)?;
            let (rp, rm) = tables(r)?;
            Ok((TypeExpr::sum(lp, rp), TypeExpr::prod(lm, rm)))
        }
        TypeExpr::Arrow(dom, cod) => {
            let (dp, dm) = tables(dom)?;
            let (cp, cm) = tables(cod)?;
            let fwd = TypeExpr::arrow(dp.clone(), cp.clone());
            let reflect = TypeExpr::arrow(
                dp.clone(),
                TypeExpr::arrow(dp.clone(), TypeExpr::arrow(cm.clone(), dm)),
            );
            Ok((TypeExpr::prod(fwd, reflect), TypeExpr::prod(dp, cm)))
        }
    }
}

/// Destructure a closed normal term of product type.
fn un_pair(t: &TermRef) -> Result<(TermRef, TermRef), ApartnessError> {
    match &**t {
        Term::App(fa, b) => match &**fa {
            Term::App(f, a) => match &**f {
                Term::Const(Comb::Pair, _) => Ok((a.clone(), b.clone())),
                _ => Err(ApartnessError::NonCanonical(t.to_string())),
            },
            _ => Err(ApartnessError::NonCanonical(t.to_string())),
        },
        _ => Err(ApartnessError::NonCanonical(t.to_string())),
    }
}

/// Destructure a closed normal term of sum type: `Ok(true, payload)` for
/// `inl`, `Ok(false, payload)` for `inr`.
fn un_sum(t: &TermRef) -> Result<(bool, TermRef), ApartnessError> {
    match &**t {
        Term::App(f, a) => match &**f {
            Term::Const(Comb::Inl, _) => Ok((true, a.clone())),
            Term::Const(Comb::Inr, _) => Ok((false, a.clone())),
            _ => Err(ApartnessError::NonCanonical(t.to_string())),
        },
        _ => Err(ApartnessError::NonCanonical(t.to_string())),
    }
}

fn numeral_of(t: &TermRef) -> Result<u64, ApartnessError> {
    t.as_numeral()
        .ok_or_else(|| ApartnessError::NonCanonical(t.to_string()))
}

struct Checker<'a> {
    pool: &'a SamplePool,
    /// Set when a genuinely universal clause was only sampled.
    sampled: bool,
    /// Dom verdicts with their sampling flag; membership checks repeat a
    /// lot inside app spines and axiom batteries.
    dom_cache: std::collections::HashMap<(TypeExpr, Term), (Verdict, bool)>,
}

impl<'a> Checker<'a> {
    fn new(pool: &'a SamplePool) -> Checker<'a> {
        Checker {
            pool,
            sampled: false,
            dom_cache: std::collections::HashMap::new(),
        }
    }

    fn apply_nf(&self, f: &TermRef, a: &TermRef) -> TermRef {
        normalize_unchecked(&Arc::new(Term::App(f.clone(), a.clone())))
    }

    fn apply3_nf(&self, f: &TermRef, a: &TermRef, b: &TermRef, c: &TermRef) -> TermRef {
        let t = Term::App(
            Arc::new(Term::App(
                Arc::new(Term::App(f.clone(), a.clone())),
                b.clone(),
            )),
            c.clone(),
        );
        normalize_unchecked(&Arc::new(t))
    }

    fn sample_terms(&self, ty: &TypeExpr) -> Vec<TermRef> {
        self.pool
            .samples(ty)
            .into_iter()
            .map(|t| normalize_unchecked(&Arc::new(t)))
            .collect()
    }

    /// `dom_σ(x)` for normal `x : σ⁺`; exact except at arrow types.
    fn dom(&mut self, ty: &TypeExpr, x: &TermRef) -> Result<Verdict, ApartnessError> {
        let key = (ty.clone(), (**x).clone());
        if let Some((verdict, was_sampled)) = self.dom_cache.get(&key) {
            self.sampled |= *was_sampled;
            return Ok(verdict.clone());
        }
        let before = self.sampled;
        self.sampled = false;
        let verdict = self.dom_uncached(ty, x)?;
        let was_sampled = self.sampled;
        self.sampled = before || was_sampled;
        self.dom_cache.insert(key, (verdict.clone(), was_sampled));
        Ok(verdict)
    }

    fn dom_uncached(&mut self, ty: &TypeExpr, x: &TermRef) -> Result<Verdict, ApartnessError> {
        match ty {
            TypeExpr::Nat | TypeExpr::Unit => Ok(Verdict::Holds),
            TypeExpr::Empty => Err(ApartnessError::Untranslatable(ty.clone())),
            TypeExpr::Prod(l, r) => {
                let (a, b) = un_pair(x)?;
                let va = self.dom(l, &a)?;
                if va.failed() {
                    return Ok(va);
                }
                self.dom(r, &b)
            }
            TypeExpr::Sum(l, r) => {
                let (is_left, payload) = un_sum(x)?;
                if is_left {
                    self.dom(l, &payload)
                } else {
                    self.dom(r, &payload)
                }
            }
            TypeExpr::Arrow(dom_ty, cod_ty) => {
                self.sampled = true;
                let dp = tables(dom_ty)?.0;
                let cm = tables(cod_ty)?.1;
                let (fun, reflect) = un_pair(x)?;
                let args = self.sample_terms(&dp);
                // Values land in the codomain's carrier.
                for u in &args {
                    if self.dom(dom_ty, u)?.failed() {
                        continue;
                    }
                    let val = self.apply_nf(&fun, u);
                    let vv = self.dom(cod_ty, &val)?;
                    if vv.failed() {
                        return Ok(Verdict::fails(
                            format!("value at a sampled point leaves the carrier of {cod_ty}"),
                            vec![(**u).clone(), (*val).clone()],
                        ));
                    }
                }
                // Apartness of values is reflected to apartness of arguments.
                let witnesses = self.sample_terms(&cm);
                for u in &args {
                    if self.dom(dom_ty, u)?.failed() {
                        continue;
                    }
                    for w in &args {
                        if self.dom(dom_ty, w)?.failed() {
                            continue;
                        }
                        let fu = self.apply_nf(&fun, u);
                        let fw = self.apply_nf(&fun, w);
                        for n in &witnesses {
                            let premise = self.app(cod_ty, &fu, &fw, n)?;
                            if !premise.holds() {
                                continue;
                            }
                            let back = self.apply3_nf(&reflect, u, w, n);
                            let concl = self.app(dom_ty, u, w, &back)?;
                            if concl.failed() {
                                return Ok(Verdict::fails(
                                    "reflected witness does not separate the sampled arguments",
                                    vec![
                                        (**u).clone(),
                                        (**w).clone(),
                                        (**n).clone(),
                                        (*back).clone(),
                                    ],
                                ));
                            }
                        }
                    }
                }
                Ok(Verdict::Holds)
            }
        }
    }

    /// `app_σ(x, y, z)` for normal arguments; the spine is exact, the dom
    /// side conditions are screened (a failure refutes, a sampled pass does
    /// not downgrade the verdict).
    fn app(
        &mut self,
        ty: &TypeExpr,
        x: &TermRef,
        y: &TermRef,
        z: &TermRef,
    ) -> Result<Verdict, ApartnessError> {
        match ty {
            TypeExpr::Nat => {
                let a = numeral_of(x)?;
                let b = numeral_of(y)?;
                if a != b {
                    Ok(Verdict::Holds)
                } else {
                    Ok(Verdict::fails(
                        format!("{a} is not apart from itself"),
                        vec![(**x).clone(), (**y).clone(), (**z).clone()],
                    ))
                }
            }
            TypeExpr::Unit => Ok(Verdict::fails(
                "the terminal type has an empty apartness relation",
                vec![(**x).clone(), (**y).clone()],
            )),
            TypeExpr::Empty => Err(ApartnessError::Untranslatable(ty.clone())),
            TypeExpr::Prod(l, r) => {
                for (side, t) in [("left", x), ("right", y)] {
                    let d = self.dom(ty, t)?;
                    if d.failed() {
                        return Ok(Verdict::fails(
                            format!("{side} element is outside the carrier"),
                            vec![(**t).clone()],
                        ));
                    }
                }
                let (xa, xb) = un_pair(x)?;
                let (ya, yb) = un_pair(y)?;
                let (is_left, w) = un_sum(z)?;
                if is_left {
                    self.app(l, &xa, &ya, &w)
                } else {
                    self.app(r, &xb, &yb, &w)
                }
            }
            TypeExpr::Sum(l, r) => {
                for (side, t) in [("left", x), ("right", y)] {
                    let d = self.dom(ty, t)?;
                    if d.failed() {
                        return Ok(Verdict::fails(
                            format!("{side} element is outside the carrier"),
                            vec![(**t).clone()],
                        ));
                    }
                }
                let (xl, xp) = un_sum(x)?;
                let (yl, yp) = un_sum(y)?;
                let (w1, w2) = un_pair(z)?;
                match (xl, yl) {
                    // Different injections are apart whatever the witness.
                    (true, false) | (false, true) => Ok(Verdict::Holds),
                    (true, true) => self.app(l, &xp, &yp, &w1),
                    (false, false) => self.app(r, &xp, &yp, &w2),
                }
            }
            TypeExpr::Arrow(dom_ty, cod_ty) => {
                for (side, t) in [("left", x), ("right", y)] {
                    let d = self.dom(ty, t)?;
                    if d.failed() {
                        return Ok(Verdict::fails(
                            format!("{side} element is outside the carrier"),
                            vec![(**t).clone()],
                        ));
                    }
                }
                let (point, w) = un_pair(z)?;
                let dpoint = self.dom(dom_ty, &point)?;
                if dpoint.failed() {
                    return Ok(Verdict::fails(
                        "the witness point is outside the carrier",
                        vec![(*point).clone()],
                    ));
                }
                let (fx, _) = un_pair(x)?;
                let (fy, _) = un_pair(y)?;
                let vx = self.apply_nf(&fx, &point);
                let vy = self.apply_nf(&fy, &point);
                self.app(cod_ty, &vx, &vy, &w)
            }
        }
    }
}

fn check_input(expected: &TypeExpr, t: &Term) -> Result<TermRef, ApartnessError> {
    let (elab, ty) = elaborate(t)?;
    if &ty != expected {
        return Err(ApartnessError::TypeMismatch {
            expected: expected.clone(),
            found: t.to_string(),
            found_ty: ty,
        });
    }
    Ok(normalize_unchecked(&Arc::new(elab)))
}

/// Evaluate `dom_σ(x)` on `x : σ⁺`. Exact at base/product/sum structure;
/// arrow-type clauses are sampled from the pool: all samples passing yields
/// `Unknown("sampled")`, a failing sample yields `Fails` with the
/// counterexample.
pub fn dom_check(ty: &TypeExpr, x: &Term, pool: &SamplePool) -> Result<Verdict, ApartnessError> {
    let tr = translate_type(ty)?;
    let xn = check_input(&tr.plus, x)?;
    let mut ck = Checker::new(pool);
    let verdict = ck.dom(ty, &xn)?;
    Ok(match verdict {
        Verdict::Holds if ck.sampled => Verdict::Unknown("sampled".into()),
        other => other,
    })
}

/// Evaluate `app_σ(x, y, z)`: does `z` witness `x # y`? The positive spine
/// bottoms out at base types and is decided exactly; dom side conditions are
/// sampled and only refute.
pub fn app_check(
    ty: &TypeExpr,
    x: &Term,
    y: &Term,
    z: &Term,
    pool: &SamplePool,
) -> Result<Verdict, ApartnessError> {
    let tr = translate_type(ty)?;
    let xn = check_input(&tr.plus, x)?;
    let yn = check_input(&tr.plus, y)?;
    let zn = check_input(&tr.minus, z)?;
    let mut ck = Checker::new(pool);
    ck.app(ty, &xn, &yn, &zn)
}

/// The symmetry functional `s : σ⁺ -> σ⁺ -> σ⁻ -> σ⁻`: whenever `z`
/// witnesses `x # y`, `s x y z` witnesses `y # x`. Built by structural
/// recursion and returned as a closed combinator term.
pub fn symmetry_term(ty: &TypeExpr) -> Result<Term, ApartnessError> {
    let surface = sym_surface(ty)?;
    Ok(compile(&surface)?)
}

fn sym_surface(ty: &TypeExpr) -> Result<Term, ApartnessError> {
    let tr = translate_type(ty)?;
    let (plus, minus) = (tr.plus.clone(), tr.minus.clone());
    let x = tca::fresh_name("sx");
    let y = tca::fresh_name("sy");
    let z = tca::fresh_name("sz");
    let vx = v(&x, plus.clone());
    let vy = v(&y, plus.clone());
    let vz = v(&z, minus.clone());
    let body = match ty {
        // At base types the witness carries no direction.
        TypeExpr::Nat | TypeExpr::Unit => vz,
        TypeExpr::Empty => return Err(ApartnessError::Untranslatable(ty.clone())),
        TypeExpr::Prod(l, r) => {
            let (lp, lm) = tables(l)?;
            let (rp, rm) = tables(r)?;
            let sl = sym_surface(l)?;
            let sr = sym_surface(r)?;
            let wl = tca::fresh_name("w");
            let wr = tca::fresh_name("w");
            let left = lam(
                &wl,
                lm.clone(),
                inl_at(
                    &lm,
                    &rm,
                    Term::apps(
                        sl,
                        [
                            fst_at(&lp, &rp, vx.clone()),
                            fst_at(&lp, &rp, vy.clone()),
                            v(&wl, lm.clone()),
                        ],
                    ),
                ),
            );
            let right = lam(
                &wr,
                rm.clone(),
                inr_at(
                    &lm,
                    &rm,
                    Term::apps(
                        sr,
                        [
                            snd_at(&lp, &rp, vx.clone()),
                            snd_at(&lp, &rp, vy.clone()),
                            v(&wr, rm.clone()),
                        ],
                    ),
                ),
            );
            case_at(&lm, &rm, &minus, left, right, vz)
        }
        TypeExpr::Sum(l, r) => {
            let (lp, lm) = tables(l)?;
            let (rp, rm) = tables(r)?;
            let sl = sym_surface(l)?;
            let sr = sym_surface(r)?;
            let u0 = tca::fresh_name("u");
            let u1 = tca::fresh_name("u");
            let v0 = tca::fresh_name("v");
            let v1 = tca::fresh_name("v");
            // Both left: flip the first witness component; both right: the
            // second; mixed injections stay apart with the witness unchanged.
            let both_left = pair2(
                &lm,
                &rm,
                Term::apps(
                    sl,
                    [
                        v(&u0, lp.clone()),
                        v(&u1, lp.clone()),
                        fst_at(&lm, &rm, vz.clone()),
                    ],
                ),
                snd_at(&lm, &rm, vz.clone()),
            );
            let both_right = pair2(
                &lm,
                &rm,
                fst_at(&lm, &rm, vz.clone()),
                Term::apps(
                    sr,
                    [
                        v(&v0, rp.clone()),
                        v(&v1, rp.clone()),
                        snd_at(&lm, &rm, vz.clone()),
                    ],
                ),
            );
            let on_left = lam(
                &u0,
                lp.clone(),
                case_at(
                    &lp,
                    &rp,
                    &minus,
                    lam(&u1, lp.clone(), both_left),
                    lam(&v1, rp.clone(), vz.clone()),
                    vy.clone(),
                ),
            );
            let on_right = lam(
                &v0,
                rp.clone(),
                case_at(
                    &lp,
                    &rp,
                    &minus,
                    lam(&u1, lp.clone(), vz.clone()),
                    lam(&v1, rp.clone(), both_right),
                    vy.clone(),
                ),
            );
            case_at(&lp, &rp, &minus, on_left, on_right, vx.clone())
        }
        TypeExpr::Arrow(dom_ty, cod_ty) => {
            let (dp, _) = tables(dom_ty)?;
            let (cp, cm) = tables(cod_ty)?;
            let sc = sym_surface(cod_ty)?;
            let refl_ty = TypeExpr::arrow(
                dp.clone(),
                TypeExpr::arrow(dp.clone(), TypeExpr::arrow(cm.clone(), tables(dom_ty)?.1)),
            );
            let fwd_ty = TypeExpr::arrow(dp.clone(), cp.clone());
            let point = fst_at(&dp, &cm, vz.clone());
            let fx = fst_at(&fwd_ty, &refl_ty, vx.clone());
            let fy = fst_at(&fwd_ty, &refl_ty, vy.clone());
            // Keep the point, flip the witness between the two values there.
            pair2(
                &dp,
                &cm,
                point.clone(),
                Term::apps(
                    sc,
                    [
                        Term::app(fx, point.clone()),
                        Term::app(fy, point),
                        snd_at(&dp, &cm, vz.clone()),
                    ],
                ),
            )
        }
    };
    Ok(lam(&x, plus.clone(), lam(&y, plus, lam(&z, minus, body))))
}

/// The transitivity functional
/// `t : σ⁺ -> σ⁺ -> σ⁺ -> σ⁻ -> (σ⁻ + σ⁻)`: whenever `u` witnesses `x # y`
/// and `z` is in the carrier, the result is `inl v` with `v : x # z` or
/// `inr w` with `w : y # z`. At base type the branch is decided with the
/// equality element `d` (ties go left); higher structure recurses on the
/// carried point.
pub fn transitivity_term(ty: &TypeExpr) -> Result<Term, ApartnessError> {
    let surface = trans_surface(ty)?;
    Ok(compile(&surface)?)
}

fn trans_surface(ty: &TypeExpr) -> Result<Term, ApartnessError> {
    let tr = translate_type(ty)?;
    let (plus, minus) = (tr.plus.clone(), tr.minus.clone());
    let out = TypeExpr::sum(minus.clone(), minus.clone());
    let x = tca::fresh_name("tx");
    let y = tca::fresh_name("ty");
    let z = tca::fresh_name("tz");
    let u = tca::fresh_name("tu");
    let vx = v(&x, plus.clone());
    let vy = v(&y, plus.clone());
    let vz = v(&z, plus.clone());
    let vu = v(&u, minus.clone());
    let body = match ty {
        TypeExpr::Nat => {
            // d x z = 1 iff x = z; then y # z must hold, otherwise x # z does.
            let d = tca::build_d();
            if_nat(
                &out,
                Term::apps(d, [vx.clone(), vz.clone()]),
                inr_at(&minus, &minus, vu.clone()),
                inl_at(&minus, &minus, vu.clone()),
            )
        }
        // Vacuous: nothing is apart at the terminal type.
        TypeExpr::Unit => inl_at(&minus, &minus, vu.clone()),
        TypeExpr::Empty => return Err(ApartnessError::Untranslatable(ty.clone())),
        TypeExpr::Prod(l, r) => {
            let (lp, lm) = tables(l)?;
            let (rp, rm) = tables(r)?;
            let tl = trans_surface(l)?;
            let tr_ = trans_surface(r)?;
            let m = tca::fresh_name("m");
            let vv = tca::fresh_name("v");
            let ww = tca::fresh_name("w");
            let left_rec = case_at(
                &lm,
                &lm,
                &out,
                lam(
                    &vv,
                    lm.clone(),
                    inl_at(&minus, &minus, inl_at(&lm, &rm, v(&vv, lm.clone()))),
                ),
                lam(
                    &ww,
                    lm.clone(),
                    inr_at(&minus, &minus, inl_at(&lm, &rm, v(&ww, lm.clone()))),
                ),
                Term::apps(
                    tl,
                    [
                        fst_at(&lp, &rp, vx.clone()),
                        fst_at(&lp, &rp, vy.clone()),
                        fst_at(&lp, &rp, vz.clone()),
                        v(&m, lm.clone()),
                    ],
                ),
            );
            let right_rec = case_at(
                &rm,
                &rm,
                &out,
                lam(
                    &vv,
                    rm.clone(),
                    inl_at(&minus, &minus, inr_at(&lm, &rm, v(&vv, rm.clone()))),
                ),
                lam(
                    &ww,
                    rm.clone(),
                    inr_at(&minus, &minus, inr_at(&lm, &rm, v(&ww, rm.clone()))),
                ),
                Term::apps(
                    tr_,
                    [
                        snd_at(&lp, &rp, vx.clone()),
                        snd_at(&lp, &rp, vy.clone()),
                        snd_at(&lp, &rp, vz.clone()),
                        v(&m, rm.clone()),
                    ],
                ),
            );
            case_at(
                &lm,
                &rm,
                &out,
                lam(&m, lm.clone(), left_rec),
                lam(&m, rm.clone(), right_rec),
                vu.clone(),
            )
        }
        TypeExpr::Sum(l, r) => {
            let (lp, lm) = tables(l)?;
            let (rp, rm) = tables(r)?;
            let tl = trans_surface(l)?;
            let tr_ = trans_surface(r)?;
            let xa = tca::fresh_name("xa");
            let xb = tca::fresh_name("xb");
            let ya = tca::fresh_name("ya");
            let yb = tca::fresh_name("yb");
            let za = tca::fresh_name("za");
            let zb = tca::fresh_name("zb");
            let vv = tca::fresh_name("v");
            let ww = tca::fresh_name("w");
            // x, y in the left component, z also left: recurse; z right:
            // x and z sit in different injections, any witness works.
            let lll = case_at(
                &lm,
                &lm,
                &out,
                lam(
                    &vv,
                    lm.clone(),
                    inl_at(
                        &minus,
                        &minus,
                        pair2(&lm, &rm, v(&vv, lm.clone()), snd_at(&lm, &rm, vu.clone())),
                    ),
                ),
                lam(
                    &ww,
                    lm.clone(),
                    inr_at(
                        &minus,
                        &minus,
                        pair2(&lm, &rm, v(&ww, lm.clone()), snd_at(&lm, &rm, vu.clone())),
                    ),
                ),
                Term::apps(
                    tl,
                    [
                        v(&xa, lp.clone()),
                        v(&ya, lp.clone()),
                        v(&za, lp.clone()),
                        fst_at(&lm, &rm, vu.clone()),
                    ],
                ),
            );
            let rrr = case_at(
                &rm,
                &rm,
                &out,
                lam(
                    &vv,
                    rm.clone(),
                    inl_at(
                        &minus,
                        &minus,
                        pair2(&lm, &rm, fst_at(&lm, &rm, vu.clone()), v(&vv, rm.clone())),
                    ),
                ),
                lam(
                    &ww,
                    rm.clone(),
                    inr_at(
                        &minus,
                        &minus,
                        pair2(&lm, &rm, fst_at(&lm, &rm, vu.clone()), v(&ww, rm.clone())),
                    ),
                ),
                Term::apps(
                    tr_,
                    [
                        v(&xb, rp.clone()),
                        v(&yb, rp.clone()),
                        v(&zb, rp.clone()),
                        snd_at(&lm, &rm, vu.clone()),
                    ],
                ),
            );
            let inl_u = inl_at(&minus, &minus, vu.clone());
            let inr_u = inr_at(&minus, &minus, vu.clone());
            // The eight injection patterns of (x, y, z).
            let x_left = lam(
                &xa,
                lp.clone(),
                case_at(
                    &lp,
                    &rp,
                    &out,
                    lam(
                        &ya,
                        lp.clone(),
                        case_at(
                            &lp,
                            &rp,
                            &out,
                            lam(&za, lp.clone(), lll),
                            lam(&zb, rp.clone(), inl_u.clone()),
                            vz.clone(),
                        ),
                    ),
                    lam(
                        &yb,
                        rp.clone(),
                        case_at(
                            &lp,
                            &rp,
                            &out,
                            lam(&za, lp.clone(), inr_u.clone()),
                            lam(&zb, rp.clone(), inl_u.clone()),
                            vz.clone(),
                        ),
                    ),
                    vy.clone(),
                ),
            );
            let x_right = lam(
                &xb,
                rp.clone(),
                case_at(
                    &lp,
                    &rp,
                    &out,
                    lam(
                        &ya,
                        lp.clone(),
                        case_at(
                            &lp,
                            &rp,
                            &out,
                            lam(&za, lp.clone(), inl_u.clone()),
                            lam(&zb, rp.clone(), inr_u.clone()),
                            vz.clone(),
                        ),
                    ),
                    lam(
                        &yb,
                        rp.clone(),
                        case_at(
                            &lp,
                            &rp,
                            &out,
                            lam(&za, lp.clone(), inl_u.clone()),
                            lam(&zb, rp.clone(), rrr),
                            vz.clone(),
                        ),
                    ),
                    vy.clone(),
                ),
            );
            case_at(&lp, &rp, &out, x_left, x_right, vx.clone())
        }
        TypeExpr::Arrow(dom_ty, cod_ty) => {
            let (dp, dm) = tables(dom_ty)?;
            let (cp, cm) = tables(cod_ty)?;
            let tc = trans_surface(cod_ty)?;
            let fwd_ty = TypeExpr::arrow(dp.clone(), cp.clone());
            let refl_ty = TypeExpr::arrow(
                dp.clone(),
                TypeExpr::arrow(dp.clone(), TypeExpr::arrow(cm.clone(), dm)),
            );
            let point = fst_at(&dp, &cm, vu.clone());
            let at = |t: &Term| Term::app(fst_at(&fwd_ty, &refl_ty, t.clone()), point.clone());
            let vv = tca::fresh_name("v");
            let ww = tca::fresh_name("w");
            case_at(
                &cm,
                &cm,
                &out,
                lam(
                    &vv,
                    cm.clone(),
                    inl_at(
                        &minus,
                        &minus,
                        pair2(&dp, &cm, point.clone(), v(&vv, cm.clone())),
                    ),
                ),
                lam(
                    &ww,
                    cm.clone(),
                    inr_at(
                        &minus,
                        &minus,
                        pair2(&dp, &cm, point.clone(), v(&ww, cm.clone())),
                    ),
                ),
                Term::apps(
                    tc,
                    [at(&vx), at(&vy), at(&vz), snd_at(&dp, &cm, vu.clone())],
                ),
            )
        }
    };
    Ok(lam(
        &x,
        plus.clone(),
        lam(&y, plus.clone(), lam(&z, plus, lam(&u, minus, body))),
    ))
}

/// A type's full apartness data: translated carrier and witness types, the
/// dom/app semi-checkers, the synthesized symmetry and transitivity
/// functionals, and sampled equivalence.
#[derive(Debug, Clone)]
pub struct ApartnessStructure {
    pub source: TypeExpr,
    pub carrier_type: TypeExpr,
    pub witness_type: TypeExpr,
    pub sym: Term,
    pub trans: Term,
}

/// Assemble the apartness structure of a type.
pub fn build_apartness_structure(ty: &TypeExpr) -> Result<ApartnessStructure, ApartnessError> {
    let tr = translate_type(ty)?;
    Ok(ApartnessStructure {
        source: ty.clone(),
        carrier_type: tr.plus,
        witness_type: tr.minus,
        sym: symmetry_term(ty)?,
        trans: transitivity_term(ty)?,
    })
}

impl ApartnessStructure {
    pub fn dom(&self, x: &Term, pool: &SamplePool) -> Result<Verdict, ApartnessError> {
        dom_check(&self.source, x, pool)
    }

    pub fn app(
        &self,
        x: &Term,
        y: &Term,
        z: &Term,
        pool: &SamplePool,
    ) -> Result<Verdict, ApartnessError> {
        app_check(&self.source, x, y, z, pool)
    }

    /// Sampled equivalence: no witness among the pool's candidates makes the
    /// two elements apart.
    pub fn equivalent(
        &self,
        x: &Term,
        y: &Term,
        pool: &SamplePool,
    ) -> Result<Verdict, ApartnessError> {
        for z in pool.samples(&self.witness_type) {
            if self.app(x, y, &z, pool)?.holds() {
                return Ok(Verdict::fails(
                    "a sampled witness separates the elements",
                    vec![x.clone(), y.clone(), z],
                ));
            }
        }
        Ok(Verdict::Holds)
    }
}

/// Run the axiom battery of an apartness structure over a sample pool:
/// reflexivity (no sampled witness separates an element from itself),
/// symmetry and transitivity of the synthesized functionals on every
/// sampled configuration, and the guarantee that a holding apartness keeps
/// both sides inside the carrier. Returns one named verdict per axiom.
pub fn check_axioms(
    s: &ApartnessStructure,
    pool: &SamplePool,
) -> Result<Vec<(String, Verdict)>, ApartnessError> {
    let ty = &s.source;
    let mut ck = Checker::new(pool);
    let mut carriers: Vec<TermRef> = Vec::new();
    for t in pool.samples(&s.carrier_type) {
        let n = check_input(&s.carrier_type, &t)?;
        if ck.dom(ty, &n)?.passed() {
            carriers.push(n);
        }
    }
    let witnesses: Vec<TermRef> = pool
        .samples(&s.witness_type)
        .iter()
        .map(|t| check_input(&s.witness_type, t))
        .collect::<Result<_, _>>()?;
    let sym = normalize_unchecked(&Arc::new(crate::kernel::elaborate(&s.sym)?.0));
    let trans = normalize_unchecked(&Arc::new(crate::kernel::elaborate(&s.trans)?.0));
    let mut out = Vec::new();

    let mut reflexivity = Verdict::Holds;
    'refl: for x in &carriers {
        for z in &witnesses {
            if ck.app(ty, x, x, z)?.holds() {
                reflexivity = Verdict::fails(
                    "an element is apart from itself",
                    vec![(**x).clone(), (**z).clone()],
                );
                break 'refl;
            }
        }
    }
    out.push(("reflexivity".to_string(), reflexivity));

    // The holding (x, y, z) triples drive both remaining axioms.
    let mut holding: Vec<(TermRef, TermRef, TermRef)> = Vec::new();
    for x in &carriers {
        for y in &carriers {
            for z in &witnesses {
                if ck.app(ty, x, y, z)?.holds() {
                    holding.push((x.clone(), y.clone(), z.clone()));
                }
            }
        }
    }

    let mut symmetry = Verdict::Holds;
    for (x, y, z) in &holding {
        let flipped = ck.apply3_nf(&sym, x, y, z);
        if !ck.app(ty, y, x, &flipped)?.holds() {
            symmetry = Verdict::fails(
                "flipped witness does not separate in reverse order",
                vec![
                    (**x).clone(),
                    (**y).clone(),
                    (**z).clone(),
                    (*flipped).clone(),
                ],
            );
            break;
        }
    }
    out.push(("symmetry".to_string(), symmetry));

    let mut transitivity = Verdict::Holds;
    'trans: for (x, y, u) in &holding {
        for z in &carriers {
            let t = Term::App(
                Arc::new(Term::App(
                    Arc::new(Term::App(
                        Arc::new(Term::App(trans.clone(), x.clone())),
                        y.clone(),
                    )),
                    z.clone(),
                )),
                u.clone(),
            );
            let routed = normalize_unchecked(&Arc::new(t));
            let ok = match &*routed {
                Term::App(head, w) => match &**head {
                    Term::Const(Comb::Inl, _) => ck.app(ty, x, z, w)?.holds(),
                    Term::Const(Comb::Inr, _) => ck.app(ty, y, z, w)?.holds(),
                    _ => false,
                },
                _ => false,
            };
            if !ok {
                transitivity = Verdict::fails(
                    "routed witness separates neither side",
                    vec![
                        (**x).clone(),
                        (**y).clone(),
                        (**z).clone(),
                        (**u).clone(),
                        (*routed).clone(),
                    ],
                );
                break 'trans;
            }
        }
    }
    out.push(("transitivity".to_string(), transitivity));

    let mut support = Verdict::Holds;
    for (x, y, z) in &holding {
        if ck.dom(ty, x)?.failed() || ck.dom(ty, y)?.failed() {
            support = Verdict::fails(
                "a holding apartness has a side outside the carrier",
                vec![(**x).clone(), (**y).clone(), (**z).clone()],
            );
            break;
        }
    }
    out.push(("apartness-implies-membership".to_string(), support));
    Ok(out)
}

/// A premorphism between apartness structures: a forward map on carriers
/// together with a reflection map sending output apartness witnesses back to
/// input witnesses.
#[derive(Debug, Clone)]
pub struct Premorphism {
    pub forward: Term,
    pub reflect: Term,
}

/// A type-1 element as an enriched carrier member: the function itself
/// paired with a reflector. At `N -> N` witnesses carry no content, so the
/// constant-zero reflector is valid for every function.
pub fn enriched_fn1(f: Term) -> Result<Term, ApartnessError> {
    let x = tca::fresh_name("ex");
    let y = tca::fresh_name("ey");
    let w = tca::fresh_name("ew");
    let refl = compile(&lam(
        &x,
        TypeExpr::Nat,
        lam(&y, TypeExpr::Nat, lam(&w, TypeExpr::Nat, Term::numeral(0))),
    ))?;
    let one_plus = translate_type(&TypeExpr::finite(1))?;
    let (fwd_ty, refl_ty) = match &one_plus.plus {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    Ok(pair2(&fwd_ty, &refl_ty, f, refl))
}

impl Premorphism {
    /// The identity premorphism on a translated type.
    pub fn identity(ty: &TypeExpr) -> Result<Premorphism, ApartnessError> {
        let tr = translate_type(ty)?;
        let x = tca::fresh_name("ix");
        let y = tca::fresh_name("iy");
        let n = tca::fresh_name("in");
        let reflect = compile(&lam(
            &x,
            tr.plus.clone(),
            lam(
                &y,
                tr.plus.clone(),
                lam(&n, tr.minus.clone(), v(&n, tr.minus.clone())),
            ),
        ))?;
        Ok(Premorphism {
            forward: identity(&tr.plus),
            reflect,
        })
    }

    /// Sampled validation of both premorphism conditions from `a` to `b`:
    /// carrier members map to carrier members, and any sampled apartness of
    /// outputs reflects to an apartness of inputs. `Unknown("sampled")` when
    /// everything passes.
    pub fn check(
        &self,
        a: &ApartnessStructure,
        b: &ApartnessStructure,
        pool: &SamplePool,
    ) -> Result<Verdict, ApartnessError> {
        let mut ck = Checker::new(pool);
        let forward = normalize_unchecked(&Arc::new(crate::kernel::elaborate(&self.forward)?.0));
        let reflect = normalize_unchecked(&Arc::new(crate::kernel::elaborate(&self.reflect)?.0));
        let mut elems: Vec<TermRef> = Vec::new();
        for t in pool.samples(&a.carrier_type) {
            let n = check_input(&a.carrier_type, &t)?;
            if ck.dom(&a.source, &n)?.passed() {
                elems.push(n);
            }
        }
        let witnesses: Vec<TermRef> = pool
            .samples(&b.witness_type)
            .iter()
            .map(|t| check_input(&b.witness_type, t))
            .collect::<Result<_, _>>()?;
        let images: Vec<TermRef> = elems.iter().map(|t| ck.apply_nf(&forward, t)).collect();
        for (t, image) in elems.iter().zip(&images) {
            if ck.dom(&b.source, image)?.failed() {
                return Ok(Verdict::fails(
                    "image of a carrier member leaves the target carrier",
                    vec![(**t).clone(), (**image).clone()],
                ));
            }
        }
        for (x0, i0) in elems.iter().zip(&images) {
            for (x1, i1) in elems.iter().zip(&images) {
                for n in &witnesses {
                    if !ck.app(&b.source, i0, i1, n)?.holds() {
                        continue;
                    }
                    let back = ck.apply3_nf(&reflect, x0, x1, n);
                    if !ck.app(&a.source, x0, x1, &back)?.holds() {
                        return Ok(Verdict::fails(
                            "output apartness is not reflected",
                            vec![
                                (**x0).clone(),
                                (**x1).clone(),
                                (**n).clone(),
                                (*back).clone(),
                            ],
                        ));
                    }
                }
            }
        }
        Ok(Verdict::Unknown("sampled".into()))
    }
}
