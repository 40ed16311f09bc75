//! Finite assemblies over the term model and their predicate logic.
//!
//! An assembly is a finite set of named points, each carrying a non-empty
//! set of closed normal realizers of a fixed type. Morphisms are point maps
//! tracked by a term. Predicates over an assembly assign each point a
//! (possibly empty) realizer set of their own type, supported by a witness
//! term into the assembly's realizer type; they form a pre-Heyting algebra
//! with reindexing along morphisms and both adjoints.
//!
//! Realizer sets of predicates come in two flavours: explicit finite sets,
//! and intensional membership checkers for the constructions that genuinely
//! quantify over function spaces (implication, the right adjoint, and the
//! computed premise/conclusion predicates of the choice and
//! independence-of-premise witnesses). Everything stays decidable at this
//! scale because underlying sets are finite and checkers only ever evaluate
//! terms on finitely many realizers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{elaborate, normalize_unchecked, Comb, KernelError, Term, TypeExpr, Verdict};
use crate::tca::{
    self, case_at, compile, fst_at, identity, inl_at, inr_at, lam, pair2, snd_at, v, TcaError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("point `{0}` has no realizers (realizer sets must be inhabited)")]
    EmptyRealizers(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("realizer `{term}` has type `{found}`, expected `{expected}`")]
    RealizerType {
        term: String,
        found: TypeExpr,
        expected: TypeExpr,
    },
    #[error("samples `{0}` and `{1}` are convertible; points must have distinct realizers")]
    ConvertibleDuplicates(String, String),
    #[error("`{tracker}` does not track the map: point `{point}`, realizer `{realizer}`")]
    NotTracked {
        tracker: String,
        point: String,
        realizer: String,
    },
    #[error("the operation needs predicates over the same assembly")]
    AssemblyMismatch,
    #[error("{0} must have explicit realizer sets")]
    NeedsExplicit(&'static str),
    #[error("support witness sends `{realizer}` outside the assembly sets at `{point}`")]
    BadSupport { point: String, realizer: String },
    #[error("missing support witness on {0}")]
    MissingSupport(&'static str),
    #[error("target assembly is not exhaustive: no point carries `{0}`")]
    NotExhaustive(String),
    #[error("assembly is not strongly modest at point `{0}`")]
    NotStronglyModest(String),
    #[error("assembly is not modest: `{0}` realizes two points")]
    NotModest(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Tca(#[from] TcaError),
}

impl From<crate::kernel::TypeError> for AssemblyError {
    fn from(e: crate::kernel::TypeError) -> Self {
        AssemblyError::Kernel(KernelError::Type(e))
    }
}

/// Compile, type-check against `expected`, and normalize.
fn prepare(term: &Term, expected: &TypeExpr) -> Result<Term, AssemblyError> {
    let compiled = compile(term)?;
    let (elab, ty) = elaborate(&compiled)?;
    if &ty != expected {
        return Err(AssemblyError::RealizerType {
            term: term.to_string(),
            found: ty,
            expected: expected.clone(),
        });
    }
    Ok((*normalize_unchecked(&Arc::new(elab))).clone())
}

/// Normalize an already elaborated term.
fn nf(t: Term) -> Term {
    (*normalize_unchecked(&Arc::new(t))).clone()
}

/// A set with realizers: named points, a realizer type, and a non-empty set
/// of closed normal realizers per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    carrier: Vec<String>,
    realizer_type: TypeExpr,
    realizes: BTreeMap<String, Vec<Term>>,
}

impl Assembly {
    /// Build and validate an assembly. Realizers are compiled, type-checked
    /// and normalized.
    pub fn new(
        realizer_type: TypeExpr,
        points: Vec<(String, Vec<Term>)>,
    ) -> Result<Assembly, AssemblyError> {
        let mut carrier = Vec::new();
        let mut realizes = BTreeMap::new();
        for (name, terms) in points {
            if terms.is_empty() {
                return Err(AssemblyError::EmptyRealizers(name));
            }
            let mut set = Vec::new();
            for t in &terms {
                let n = prepare(t, &realizer_type)?;
                if !set.contains(&n) {
                    set.push(n);
                }
            }
            carrier.push(name.clone());
            realizes.insert(name, set);
        }
        Ok(Assembly {
            carrier,
            realizer_type,
            realizes,
        })
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn realizer_type(&self) -> &TypeExpr {
        &self.realizer_type
    }

    /// The normal-form realizers of a point.
    pub fn realizers(&self, point: &str) -> Result<&[Term], AssemblyError> {
        self.realizes
            .get(point)
            .map(|v| v.as_slice())
            .ok_or_else(|| AssemblyError::UnknownPoint(point.to_string()))
    }

    /// Which point carries this (normal) realizer, if any.
    pub fn point_of(&self, realizer: &Term) -> Option<&str> {
        self.carrier
            .iter()
            .find(|p| self.realizes[*p].contains(realizer))
            .map(|s| s.as_str())
    }

    /// Distinct points have disjoint realizer sets.
    pub fn is_modest(&self) -> bool {
        for (i, p) in self.carrier.iter().enumerate() {
            for q in &self.carrier[i + 1..] {
                if self.realizes[p]
                    .iter()
                    .any(|a| self.realizes[q].contains(a))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Modest, and each point has exactly one realizer up to convertibility.
    pub fn is_strongly_modest(&self) -> bool {
        self.is_modest() && self.carrier.iter().all(|p| self.realizes[p].len() == 1)
    }

    /// Every term in `sample` is carried by some point. Samples are
    /// compiled and normalized first; ill-typed samples simply miss.
    pub fn is_exhaustive_for(&self, sample: &[Term]) -> bool {
        sample.iter().all(|t| {
            prepare(t, &self.realizer_type)
                .map(|n| self.point_of(&n).is_some())
                .unwrap_or(false)
        })
    }

    /// Strongly modest and exhaustive for the sample.
    pub fn is_basic_for(&self, sample: &[Term]) -> bool {
        self.is_strongly_modest() && self.is_exhaustive_for(sample)
    }

    /// The one-point assembly over `Unit`.
    pub fn terminal() -> Assembly {
        Assembly::new(
            TypeExpr::Unit,
            vec![("*".to_string(), vec![Term::constant(Comb::UnitVal)])],
        )
        .expect("terminal assembly")
    }

    /// The point name used by `product`.
    pub fn product_point(x: &str, y: &str) -> String {
        format!("({x},{y})")
    }

    /// Binary product: points are pairs, realizers are pairs of realizers.
    pub fn product(&self, other: &Assembly) -> Assembly {
        let ty = TypeExpr::prod(self.realizer_type.clone(), other.realizer_type.clone());
        let mut carrier = Vec::new();
        let mut realizes = BTreeMap::new();
        for p in &self.carrier {
            for q in &other.carrier {
                let mut set = Vec::new();
                for a in &self.realizes[p] {
                    for b in &other.realizes[q] {
                        set.push(pair2(
                            &self.realizer_type,
                            &other.realizer_type,
                            a.clone(),
                            b.clone(),
                        ));
                    }
                }
                let name = Assembly::product_point(p, q);
                carrier.push(name.clone());
                realizes.insert(name, set);
            }
        }
        Assembly {
            carrier,
            realizer_type: ty,
            realizes,
        }
    }

    /// The pullback of `f` and `g` (with common codomain): the part of the
    /// product where both maps agree, with its two projections.
    pub fn pullback(
        f: &AsmMorphism,
        g: &AsmMorphism,
    ) -> Result<(Assembly, AsmMorphism, AsmMorphism), AssemblyError> {
        if f.to != g.to {
            return Err(AssemblyError::AssemblyMismatch);
        }
        let prod = f.from.product(&g.from);
        let mut carrier = Vec::new();
        let mut realizes = BTreeMap::new();
        let mut to_x = BTreeMap::new();
        let mut to_y = BTreeMap::new();
        for p in &f.from.carrier {
            for q in &g.from.carrier {
                if f.map[p] == g.map[q] {
                    let name = Assembly::product_point(p, q);
                    carrier.push(name.clone());
                    realizes.insert(name.clone(), prod.realizes[&name].clone());
                    to_x.insert(name.clone(), p.clone());
                    to_y.insert(name, q.clone());
                }
            }
        }
        let pb = Assembly {
            carrier,
            realizer_type: prod.realizer_type.clone(),
            realizes,
        };
        let k = tca::fresh_name("k");
        let fst_tr = compile(&lam(
            &k,
            pb.realizer_type.clone(),
            fst_at(
                &f.from.realizer_type,
                &g.from.realizer_type,
                v(&k, pb.realizer_type.clone()),
            ),
        ))?;
        let k = tca::fresh_name("k");
        let snd_tr = compile(&lam(
            &k,
            pb.realizer_type.clone(),
            snd_at(
                &f.from.realizer_type,
                &g.from.realizer_type,
                v(&k, pb.realizer_type.clone()),
            ),
        ))?;
        let px = AsmMorphism::new(&pb, &f.from, to_x, &fst_tr)?;
        let py = AsmMorphism::new(&pb, &g.from, to_y, &snd_tr)?;
        Ok((pb, px, py))
    }

    /// The exponential `target^self` relative to a pool of candidate
    /// trackers: the carrier holds every point map tracked by some pool
    /// element, realized by exactly the pool elements that track it.
    pub fn exponential(
        &self,
        target: &Assembly,
        tracker_pool: &[Term],
    ) -> Result<Assembly, AssemblyError> {
        let ty = TypeExpr::arrow(self.realizer_type.clone(), target.realizer_type.clone());
        let mut pool = Vec::new();
        for t in tracker_pool {
            let n = prepare(t, &ty)?;
            if !pool.contains(&n) {
                pool.push(n);
            }
        }
        let mut carrier = Vec::new();
        let mut realizes = BTreeMap::new();
        for m in all_maps(&self.carrier, &target.carrier) {
            let trackers: Vec<Term> = pool
                .iter()
                .filter(|e| tracks(e, self, target, &m))
                .cloned()
                .collect();
            if trackers.is_empty() {
                continue;
            }
            let name = format!(
                "[{}]",
                self.carrier
                    .iter()
                    .map(|p| format!("{p}>{}", m[p]))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            carrier.push(name.clone());
            realizes.insert(name, trackers);
        }
        Ok(Assembly {
            carrier,
            realizer_type: ty,
            realizes,
        })
    }
}

fn all_maps(from: &[String], to: &[String]) -> Vec<BTreeMap<String, String>> {
    let mut out: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
    for p in from {
        let mut next = Vec::new();
        for m in &out {
            for q in to {
                let mut m2 = m.clone();
                m2.insert(p.clone(), q.clone());
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

fn tracks(e: &Term, from: &Assembly, to: &Assembly, map: &BTreeMap<String, String>) -> bool {
    from.carrier.iter().all(|p| {
        from.realizes[p].iter().all(|a| {
            let val = nf(Term::app(e.clone(), a.clone()));
            to.realizes[&map[p]].contains(&val)
        })
    })
}

/// A morphism of assemblies: a point map together with a tracking term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsmMorphism {
    from: Assembly,
    to: Assembly,
    map: BTreeMap<String, String>,
    tracker: Term,
}

impl AsmMorphism {
    /// Build and validate: the map must be total on the carrier, and the
    /// tracker must send every realizer of `x` into the realizers of `f(x)`.
    pub fn new(
        from: &Assembly,
        to: &Assembly,
        map: BTreeMap<String, String>,
        tracker: &Term,
    ) -> Result<AsmMorphism, AssemblyError> {
        let ty = TypeExpr::arrow(from.realizer_type.clone(), to.realizer_type.clone());
        let tracker = prepare(tracker, &ty)?;
        for p in &from.carrier {
            let q = map
                .get(p)
                .ok_or_else(|| AssemblyError::UnknownPoint(p.clone()))?;
            if !to.realizes.contains_key(q) {
                return Err(AssemblyError::UnknownPoint(q.clone()));
            }
            for a in &from.realizes[p] {
                let val = nf(Term::app(tracker.clone(), a.clone()));
                if !to.realizes[q].contains(&val) {
                    return Err(AssemblyError::NotTracked {
                        tracker: tracker.to_string(),
                        point: p.clone(),
                        realizer: a.to_string(),
                    });
                }
            }
        }
        Ok(AsmMorphism {
            from: from.clone(),
            to: to.clone(),
            map,
            tracker,
        })
    }

    pub fn identity(a: &Assembly) -> AsmMorphism {
        let map = a.carrier.iter().map(|p| (p.clone(), p.clone())).collect();
        AsmMorphism::new(a, a, map, &identity(&a.realizer_type)).expect("identity morphism")
    }

    pub fn from_assembly(&self) -> &Assembly {
        &self.from
    }

    pub fn to_assembly(&self) -> &Assembly {
        &self.to
    }

    pub fn apply(&self, point: &str) -> Result<&str, AssemblyError> {
        self.map
            .get(point)
            .map(|s| s.as_str())
            .ok_or_else(|| AssemblyError::UnknownPoint(point.to_string()))
    }

    pub fn tracker(&self) -> &Term {
        &self.tracker
    }

    /// The points mapped onto `target`.
    pub fn fiber(&self, target: &str) -> Vec<String> {
        self.from
            .carrier
            .iter()
            .filter(|p| self.map[*p] == target)
            .cloned()
            .collect()
    }
}

/// Embed a type as an assembly over its own closed normal terms: each
/// sample becomes a point realized by exactly itself. The result is basic
/// (strongly modest and exhaustive) relative to the sample; convertible
/// duplicates in the sample are rejected.
pub fn embed_type(ty: &TypeExpr, carrier_sample: &[Term]) -> Result<Assembly, AssemblyError> {
    let mut points: Vec<(String, Vec<Term>)> = Vec::new();
    for t in carrier_sample {
        let n = prepare(t, ty)?;
        if let Some((prev, _)) = points.iter().find(|(_, set)| set.contains(&n)) {
            return Err(AssemblyError::ConvertibleDuplicates(
                prev.clone(),
                t.to_string(),
            ));
        }
        points.push((n.to_string(), vec![n]));
    }
    Assembly::new(ty.clone(), points)
}

type Checker = Arc<dyn Fn(&str, &Term) -> bool + Send + Sync>;

#[derive(Clone)]
enum PredSets {
    Explicit(BTreeMap<String, Vec<Term>>),
    Intensional(Checker),
}

impl fmt::Debug for PredSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredSets::Explicit(m) => write!(f, "Explicit({m:?})"),
            PredSets::Intensional(_) => write!(f, "Intensional(..)"),
        }
    }
}

/// A predicate over an assembly: a realizer type, per-point realizer sets
/// (explicit or intensional), and a support witness into the assembly's
/// realizer type.
#[derive(Debug, Clone)]
pub struct Predicate {
    over: Assembly,
    pred_type: TypeExpr,
    sets: PredSets,
    support: Option<Term>,
}

impl Predicate {
    /// An explicit predicate; realizers are compiled, checked and
    /// normalized, and the support condition is verified on all of them.
    pub fn explicit(
        over: &Assembly,
        pred_type: TypeExpr,
        holds: BTreeMap<String, Vec<Term>>,
        support: Option<Term>,
    ) -> Result<Predicate, AssemblyError> {
        for name in holds.keys() {
            if !over.realizes.contains_key(name) {
                return Err(AssemblyError::UnknownPoint(name.clone()));
            }
        }
        let mut sets = BTreeMap::new();
        for p in &over.carrier {
            let terms = holds.get(p).cloned().unwrap_or_default();
            let mut set = Vec::new();
            for t in &terms {
                let n = prepare(t, &pred_type)?;
                if !set.contains(&n) {
                    set.push(n);
                }
            }
            sets.insert(p.clone(), set);
        }
        let support = match support {
            Some(s) => Some(prepare(
                &s,
                &TypeExpr::arrow(pred_type.clone(), over.realizer_type.clone()),
            )?),
            None => None,
        };
        let pred = Predicate {
            over: over.clone(),
            pred_type,
            sets: PredSets::Explicit(sets),
            support,
        };
        pred.validate_support()?;
        Ok(pred)
    }

    /// An intensional predicate: membership is the given checker, which
    /// receives the point name and a normalized candidate realizer.
    pub fn intensional(
        over: &Assembly,
        pred_type: TypeExpr,
        checker: Checker,
        support: Option<Term>,
    ) -> Predicate {
        Predicate {
            over: over.clone(),
            pred_type,
            sets: PredSets::Intensional(checker),
            support,
        }
    }

    /// The top predicate `(A, α)`.
    pub fn top(over: &Assembly) -> Predicate {
        Predicate {
            over: over.clone(),
            pred_type: over.realizer_type.clone(),
            sets: PredSets::Explicit(over.realizes.clone()),
            support: Some(identity(&over.realizer_type)),
        }
    }

    /// The bottom predicate `(Empty, ∅)`.
    pub fn bottom(over: &Assembly) -> Predicate {
        let sets = over
            .carrier
            .iter()
            .map(|p| (p.clone(), Vec::new()))
            .collect();
        Predicate {
            over: over.clone(),
            pred_type: TypeExpr::Empty,
            sets: PredSets::Explicit(sets),
            support: Some(Term::constant_at(
                Comb::Exf,
                vec![over.realizer_type.clone()],
            )),
        }
    }

    pub fn over(&self) -> &Assembly {
        &self.over
    }

    pub fn pred_type(&self) -> &TypeExpr {
        &self.pred_type
    }

    pub fn support(&self) -> Option<&Term> {
        self.support.as_ref()
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.sets, PredSets::Explicit(_))
    }

    /// Membership of an elaborated candidate; the candidate is normalized
    /// before the set is consulted.
    pub fn contains(&self, point: &str, candidate: &Term) -> bool {
        let n = nf(candidate.clone());
        match &self.sets {
            PredSets::Explicit(m) => m.get(point).is_some_and(|set| set.contains(&n)),
            PredSets::Intensional(ck) => ck(point, &n),
        }
    }

    /// The explicit realizers at a point, when the predicate has them.
    pub fn enumerated(&self, point: &str) -> Option<&[Term]> {
        match &self.sets {
            PredSets::Explicit(m) => m.get(point).map(|v| v.as_slice()),
            PredSets::Intensional(_) => None,
        }
    }

    fn validate_support(&self) -> Result<(), AssemblyError> {
        let (Some(s), PredSets::Explicit(sets)) = (&self.support, &self.sets) else {
            return Ok(());
        };
        for p in &self.over.carrier {
            for b in &sets[p] {
                let val = nf(Term::app(s.clone(), b.clone()));
                if !self.over.realizes[p].contains(&val) {
                    return Err(AssemblyError::BadSupport {
                        point: p.clone(),
                        realizer: b.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Restrict to an explicit predicate by filtering candidate realizers
    /// through the membership check, point by point.
    pub fn materialize_with(
        &self,
        candidates: impl Fn(&str) -> Vec<Term>,
    ) -> Result<Predicate, AssemblyError> {
        let mut sets = BTreeMap::new();
        for p in &self.over.carrier {
            let mut set = Vec::new();
            for c in candidates(p) {
                let n = prepare(&c, &self.pred_type)?;
                if self.contains(p, &n) && !set.contains(&n) {
                    set.push(n);
                }
            }
            sets.insert(p.clone(), set);
        }
        Ok(Predicate {
            over: self.over.clone(),
            pred_type: self.pred_type.clone(),
            sets: PredSets::Explicit(sets),
            support: self.support.clone(),
        })
    }

    /// Total number of explicit realizers across all points.
    pub fn explicit_size(&self) -> usize {
        match &self.sets {
            PredSets::Explicit(m) => m.values().map(Vec::len).sum(),
            PredSets::Intensional(_) => 0,
        }
    }
}

/// The three binary pre-Heyting operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeytingOp {
    And,
    Or,
    Implies,
}

/// Conjunction `(B×C, β×γ)`, disjunction `(B+C, inl β ∪ inr γ)` and
/// implication `(A×(B→C), …)`, computed pointwise. For `Implies` the result
/// is intensional: a member is a pair of a realizer of the point and a
/// function mapping every antecedent realizer into the consequent's set, so
/// the antecedent must be explicit.
pub fn heyting_op(op: HeytingOp, p: &Predicate, q: &Predicate) -> Result<Predicate, AssemblyError> {
    if p.over != q.over {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let over = p.over.clone();
    let (pt, qt) = (p.pred_type.clone(), q.pred_type.clone());
    match op {
        HeytingOp::And => {
            let ty = TypeExpr::prod(pt.clone(), qt.clone());
            match (&p.sets, &q.sets) {
                (PredSets::Explicit(ps), PredSets::Explicit(qs)) => {
                    let mut sets = BTreeMap::new();
                    for x in &over.carrier {
                        let mut set = Vec::new();
                        for b in &ps[x] {
                            for c in &qs[x] {
                                set.push(pair2(&pt, &qt, b.clone(), c.clone()));
                            }
                        }
                        sets.insert(x.clone(), set);
                    }
                    let support = match &p.support {
                        Some(sp) => {
                            let k = tca::fresh_name("k");
                            Some(compile(&lam(
                                &k,
                                ty.clone(),
                                Term::app(sp.clone(), fst_at(&pt, &qt, v(&k, ty.clone()))),
                            ))?)
                        }
                        None => None,
                    };
                    Ok(Predicate {
                        over,
                        pred_type: ty,
                        sets: PredSets::Explicit(sets),
                        support,
                    })
                }
                _ => {
                    let (pc, qc) = (p.clone(), q.clone());
                    let checker: Checker = Arc::new(move |x, t| match split_pair(t) {
                        Some((a, b)) => pc.contains(x, &a) && qc.contains(x, &b),
                        None => false,
                    });
                    Ok(Predicate::intensional(&over, ty, checker, None))
                }
            }
        }
        HeytingOp::Or => {
            let ty = TypeExpr::sum(pt.clone(), qt.clone());
            match (&p.sets, &q.sets) {
                (PredSets::Explicit(ps), PredSets::Explicit(qs)) => {
                    let mut sets = BTreeMap::new();
                    for x in &over.carrier {
                        let mut set = Vec::new();
                        for b in &ps[x] {
                            set.push(inl_at(&pt, &qt, b.clone()));
                        }
                        for c in &qs[x] {
                            set.push(inr_at(&pt, &qt, c.clone()));
                        }
                        sets.insert(x.clone(), set);
                    }
                    let support = match (&p.support, &q.support) {
                        (Some(sp), Some(sq)) => {
                            let k = tca::fresh_name("k");
                            Some(compile(&lam(
                                &k,
                                ty.clone(),
                                case_at(
                                    &pt,
                                    &qt,
                                    &over.realizer_type,
                                    sp.clone(),
                                    sq.clone(),
                                    v(&k, ty.clone()),
                                ),
                            ))?)
                        }
                        _ => None,
                    };
                    Ok(Predicate {
                        over,
                        pred_type: ty,
                        sets: PredSets::Explicit(sets),
                        support,
                    })
                }
                _ => {
                    let (pc, qc) = (p.clone(), q.clone());
                    let checker: Checker = Arc::new(move |x, t| match split_sum(t) {
                        Some((true, a)) => pc.contains(x, &a),
                        Some((false, b)) => qc.contains(x, &b),
                        None => false,
                    });
                    Ok(Predicate::intensional(&over, ty, checker, None))
                }
            }
        }
        HeytingOp::Implies => {
            if !p.is_explicit() {
                return Err(AssemblyError::NeedsExplicit("the implication antecedent"));
            }
            let arrow = TypeExpr::arrow(pt.clone(), qt.clone());
            let ty = TypeExpr::prod(over.realizer_type.clone(), arrow.clone());
            let (over_c, pc, qc) = (over.clone(), p.clone(), q.clone());
            let checker: Checker = Arc::new(move |x, t| {
                let Some((a, h)) = split_pair(t) else {
                    return false;
                };
                let Ok(rs) = over_c.realizers(x) else {
                    return false;
                };
                if !rs.contains(&nf(a)) {
                    return false;
                }
                pc.enumerated(x).is_some_and(|bs| {
                    bs.iter()
                        .all(|b| qc.contains(x, &Term::app(h.clone(), b.clone())))
                })
            });
            let k = tca::fresh_name("k");
            let support = compile(&lam(
                &k,
                ty.clone(),
                fst_at(&over.realizer_type, &arrow, v(&k, ty.clone())),
            ))?;
            Ok(Predicate::intensional(&over, ty, checker, Some(support)))
        }
    }
}

fn split_pair(t: &Term) -> Option<(Term, Term)> {
    match t {
        Term::App(fa, b) => match &**fa {
            Term::App(f, a) => match &**f {
                Term::Const(Comb::Pair, _) => Some(((**a).clone(), (**b).clone())),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn split_sum(t: &Term) -> Option<(bool, Term)> {
    match t {
        Term::App(f, a) => match &**f {
            Term::Const(Comb::Inl, _) => Some((true, (**a).clone())),
            Term::Const(Comb::Inr, _) => Some((false, (**a).clone())),
            _ => None,
        },
        _ => None,
    }
}

/// Negation computed directly: full realizers where the predicate is empty,
/// nothing elsewhere. (The implication into bottom coincides with this only
/// in models whose potential-falsity type is inhabited; the term model's is
/// not, so the direct formula is the definition here.)
pub fn pred_neg(p: &Predicate) -> Result<Predicate, AssemblyError> {
    let PredSets::Explicit(ps) = &p.sets else {
        return Err(AssemblyError::NeedsExplicit("negation"));
    };
    let mut sets = BTreeMap::new();
    for x in &p.over.carrier {
        let set = if ps[x].is_empty() {
            p.over.realizes[x].clone()
        } else {
            Vec::new()
        };
        sets.insert(x.clone(), set);
    }
    Ok(Predicate {
        over: p.over.clone(),
        pred_type: p.over.realizer_type.clone(),
        sets: PredSets::Explicit(sets),
        support: Some(identity(&p.over.realizer_type)),
    })
}

/// Reindexing along `f : Y -> X`: the set at `y` pairs the realizers of the
/// predicate at `f(y)` with the realizers of `y`.
pub fn reindex(f: &AsmMorphism, p: &Predicate) -> Result<Predicate, AssemblyError> {
    if p.over != f.to {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let y_asm = f.from.clone();
    let ty = TypeExpr::prod(p.pred_type.clone(), y_asm.realizer_type.clone());
    let (ct, bt) = (p.pred_type.clone(), y_asm.realizer_type.clone());
    let k = tca::fresh_name("k");
    let support = Some(compile(&lam(
        &k,
        ty.clone(),
        snd_at(&ct, &bt, v(&k, ty.clone())),
    ))?);
    match &p.sets {
        PredSets::Explicit(ps) => {
            let mut sets = BTreeMap::new();
            for y in &y_asm.carrier {
                let x = f.apply(y)?;
                let mut set = Vec::new();
                for m in &ps[x] {
                    for n in &y_asm.realizes[y] {
                        set.push(pair2(&ct, &bt, m.clone(), n.clone()));
                    }
                }
                sets.insert(y.clone(), set);
            }
            Ok(Predicate {
                over: y_asm,
                pred_type: ty,
                sets: PredSets::Explicit(sets),
                support,
            })
        }
        PredSets::Intensional(_) => {
            let pc = p.clone();
            let fc = f.clone();
            let checker: Checker = Arc::new(move |y, t| {
                let Some((m, n)) = split_pair(t) else {
                    return false;
                };
                let Ok(x) = fc.apply(y) else { return false };
                let Ok(rs) = fc.from.realizers(y) else {
                    return false;
                };
                rs.contains(&nf(n)) && pc.contains(x, &m)
            });
            Ok(Predicate::intensional(&y_asm, ty, checker, support))
        }
    }
}

/// The left adjoint `∃_f`: at `x`, the union of the sets over the fiber.
pub fn exists_along(f: &AsmMorphism, p: &Predicate) -> Result<Predicate, AssemblyError> {
    if p.over != f.from {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let support = match &p.support {
        Some(s) => {
            let k = tca::fresh_name("k");
            Some(compile(&lam(
                &k,
                p.pred_type.clone(),
                Term::app(
                    f.tracker.clone(),
                    Term::app(s.clone(), v(&k, p.pred_type.clone())),
                ),
            ))?)
        }
        None => None,
    };
    match &p.sets {
        PredSets::Explicit(ps) => {
            let mut sets = BTreeMap::new();
            for x in &f.to.carrier {
                let mut set = Vec::new();
                for y in f.fiber(x) {
                    for t in &ps[&y] {
                        if !set.contains(t) {
                            set.push(t.clone());
                        }
                    }
                }
                sets.insert(x.clone(), set);
            }
            Ok(Predicate {
                over: f.to.clone(),
                pred_type: p.pred_type.clone(),
                sets: PredSets::Explicit(sets),
                support,
            })
        }
        PredSets::Intensional(_) => {
            let pc = p.clone();
            let fc = f.clone();
            let checker: Checker =
                Arc::new(move |x, t| fc.fiber(x).iter().any(|y| pc.contains(y, t)));
            Ok(Predicate::intensional(
                &f.to,
                p.pred_type.clone(),
                checker,
                support,
            ))
        }
    }
}

/// The right adjoint `∀_f`: a member at `x` is a pair of a realizer of `x`
/// and a function sending every realizer of every fiber point into that
/// point's set. Intensional by nature; exact here because fibers and their
/// realizer sets are finite.
pub fn forall_along(f: &AsmMorphism, p: &Predicate) -> Result<Predicate, AssemblyError> {
    if p.over != f.from {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let a_ty = f.to.realizer_type.clone();
    let arrow = TypeExpr::arrow(f.from.realizer_type.clone(), p.pred_type.clone());
    let ty = TypeExpr::prod(a_ty.clone(), arrow.clone());
    let (pc, fc) = (p.clone(), f.clone());
    let checker: Checker = Arc::new(move |x, t| {
        let Some((n, m)) = split_pair(t) else {
            return false;
        };
        let Ok(rs) = fc.to.realizers(x) else {
            return false;
        };
        if !rs.contains(&nf(n)) {
            return false;
        }
        fc.fiber(x).iter().all(|y| {
            fc.from.realizes[y]
                .iter()
                .all(|k| pc.contains(y, &Term::app(m.clone(), k.clone())))
        })
    });
    let k = tca::fresh_name("k");
    let support = Some(compile(&lam(
        &k,
        ty.clone(),
        fst_at(&a_ty, &arrow, v(&k, ty.clone())),
    ))?);
    Ok(Predicate::intensional(&f.to, ty, checker, support))
}

/// Is `P ≤ Q` witnessed by the given term? Exact on explicit sources: every
/// realizer at every point must be sent into the target's set. Intensional
/// sources cannot be enumerated and yield `Unknown`.
pub fn leq_check(p: &Predicate, q: &Predicate, witness: &Term) -> Result<Verdict, AssemblyError> {
    if p.over != q.over {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let w = prepare(
        witness,
        &TypeExpr::arrow(p.pred_type.clone(), q.pred_type.clone()),
    )?;
    let PredSets::Explicit(ps) = &p.sets else {
        return Ok(Verdict::Unknown("source predicate is intensional".into()));
    };
    for x in &p.over.carrier {
        for b in &ps[x] {
            let image = nf(Term::app(w.clone(), b.clone()));
            if !q.contains(x, &image) {
                return Ok(Verdict::fails(
                    format!("witness image at `{x}` is not a realizer of the target"),
                    vec![b.clone(), image],
                ));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Lift a term-level function to the unique assembly morphism it tracks:
/// the source must be strongly modest, the target modest, and every image
/// realizer must be carried by some target point (exhaustiveness relative
/// to the data; a miss is reported, not patched).
pub fn lift_morphism(f: &Term, x: &Assembly, y: &Assembly) -> Result<AsmMorphism, AssemblyError> {
    if let Some(p) = x
        .carrier
        .iter()
        .find(|p| x.realizes[*p].len() != 1)
        .or_else(|| (!x.is_modest()).then(|| &x.carrier[0]))
    {
        return Err(AssemblyError::NotStronglyModest(p.clone()));
    }
    if !y.is_modest() {
        let dup = y
            .carrier
            .iter()
            .flat_map(|p| y.realizes[p].iter())
            .find(|a| {
                y.carrier
                    .iter()
                    .filter(|p| y.realizes[*p].contains(a))
                    .count()
                    > 1
            })
            .map(|t| t.to_string())
            .unwrap_or_default();
        return Err(AssemblyError::NotModest(dup));
    }
    let ty = TypeExpr::arrow(x.realizer_type.clone(), y.realizer_type.clone());
    let f = prepare(f, &ty)?;
    let mut map = BTreeMap::new();
    for p in &x.carrier {
        let a = &x.realizes[p][0];
        let val = nf(Term::app(f.clone(), a.clone()));
        match y.point_of(&val) {
            Some(q) => {
                map.insert(p.clone(), q.to_string());
            }
            None => return Err(AssemblyError::NotExhaustive(val.to_string())),
        }
    }
    AsmMorphism::new(x, y, map, &f)
}

// ---------------------------------------------------------------------------
// Adjunction witnesses
//
// The two adjunction equivalences transform subpredicate witnesses, and both
// transformations are given by explicit terms; these builders produce exactly
// those terms so the equivalences can be checked as term-level facts.
// ---------------------------------------------------------------------------

/// From `g` witnessing `∃_f P ≤ Q`, the witness `λm. pair (g m) (e m)` for
/// `P ≤ (Pf) Q`, where `e` is `P`'s support.
pub fn exists_transpose(g: &Term, p: &Predicate, q: &Predicate) -> Result<Term, AssemblyError> {
    let e = p
        .support
        .clone()
        .ok_or(AssemblyError::MissingSupport("the source predicate"))?;
    let c = p.pred_type.clone();
    let m = tca::fresh_name("m");
    let body = pair2(
        &q.pred_type,
        &p.over.realizer_type,
        Term::app(g.clone(), v(&m, c.clone())),
        Term::app(e, v(&m, c.clone())),
    );
    Ok(compile(&lam(&m, c, body))?)
}

/// From `h` witnessing `P ≤ (Pf) Q`, the witness `λn. fst (h n)` for
/// `∃_f P ≤ Q`.
pub fn exists_untranspose(h: &Term, p: &Predicate, q: &Predicate) -> Result<Term, AssemblyError> {
    let c = p.pred_type.clone();
    let n = tca::fresh_name("n");
    let body = fst_at(
        &q.pred_type,
        &p.over.realizer_type,
        Term::app(h.clone(), v(&n, c.clone())),
    );
    Ok(compile(&lam(&n, c, body))?)
}

/// From `g` witnessing `P ≤ ∀_f D`, the witness
/// `λm. (snd (g (fst m))) (snd m)` for `(Pf) P ≤ D`.
pub fn forall_transpose(
    g: &Term,
    f: &AsmMorphism,
    p: &Predicate,
    d: &Predicate,
) -> Result<Term, AssemblyError> {
    let c = p.pred_type.clone();
    let b = f.from.realizer_type.clone();
    let a = f.to.realizer_type.clone();
    let arrow = TypeExpr::arrow(b.clone(), d.pred_type.clone());
    let src = TypeExpr::prod(c.clone(), b.clone());
    let m = tca::fresh_name("m");
    let body = Term::app(
        snd_at(
            &a,
            &arrow,
            Term::app(g.clone(), fst_at(&c, &b, v(&m, src.clone()))),
        ),
        snd_at(&c, &b, v(&m, src.clone())),
    );
    Ok(compile(&lam(&m, src, body))?)
}

/// From `g` witnessing `(Pf) P ≤ D`, the witness
/// `λk. pair (e k) (λl. g (pair k l))` for `P ≤ ∀_f D`, where `e` is `P`'s
/// support.
pub fn forall_untranspose(
    g: &Term,
    f: &AsmMorphism,
    p: &Predicate,
    d: &Predicate,
) -> Result<Term, AssemblyError> {
    let e = p
        .support
        .clone()
        .ok_or(AssemblyError::MissingSupport("the source predicate"))?;
    let c = p.pred_type.clone();
    let b = f.from.realizer_type.clone();
    let k = tca::fresh_name("k");
    let l = tca::fresh_name("l");
    let inner = lam(
        &l,
        b.clone(),
        Term::app(g.clone(), pair2(&c, &b, v(&k, c.clone()), v(&l, b.clone()))),
    );
    let body = pair2(
        &f.to.realizer_type,
        &TypeExpr::arrow(b, d.pred_type.clone()),
        Term::app(e, v(&k, c.clone())),
        inner,
    );
    Ok(compile(&lam(&k, c, body))?)
}

/// Check the Beck–Chevalley square for the cospan `h : Y -> W`, `k : Z -> W`
/// and a predicate `Q` over `Z`: pulling back along the pullback projections
/// and sweeping along either leg yields mutually smaller predicates, with
/// the two explicit pairing witnesses. Returns the two verdicts
/// (left-to-right, right-to-left).
pub fn beck_chevalley_check(
    h: &AsmMorphism,
    k: &AsmMorphism,
    q: &Predicate,
) -> Result<(Verdict, Verdict), AssemblyError> {
    if q.over != k.from {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let e_q = q.support.clone().ok_or(AssemblyError::MissingSupport(
        "the Beck–Chevalley predicate",
    ))?;
    let (_, to_y, to_z) = Assembly::pullback(h, k)?;
    let lhs = exists_along(&to_y, &reindex(&to_z, q)?)?;
    let rhs = reindex(h, &exists_along(k, q)?)?;
    let d = q.pred_type.clone();
    let b = h.from.realizer_type.clone();
    let c = k.from.realizer_type.clone();
    let bc = TypeExpr::prod(b.clone(), c.clone());
    // D×(B×C) -> D×B.
    let u = tca::fresh_name("u");
    let src = TypeExpr::prod(d.clone(), bc.clone());
    let to_rhs = compile(&lam(
        &u,
        src.clone(),
        pair2(
            &d,
            &b,
            fst_at(&d, &bc, v(&u, src.clone())),
            fst_at(&b, &c, snd_at(&d, &bc, v(&u, src.clone()))),
        ),
    ))?;
    // D×B -> D×(B×C), filling the Z-realizer with the support witness.
    let u2 = tca::fresh_name("u");
    let src2 = TypeExpr::prod(d.clone(), b.clone());
    let to_lhs = compile(&lam(
        &u2,
        src2.clone(),
        pair2(
            &d,
            &bc,
            fst_at(&d, &b, v(&u2, src2.clone())),
            pair2(
                &b,
                &c,
                snd_at(&d, &b, v(&u2, src2.clone())),
                Term::app(e_q, fst_at(&d, &b, v(&u2, src2.clone()))),
            ),
        ),
    ))?;
    Ok((
        leq_check(&lhs, &rhs, &to_rhs)?,
        leq_check(&rhs, &lhs, &to_lhs)?,
    ))
}

// ---------------------------------------------------------------------------
// Predicates vs subobjects
// ---------------------------------------------------------------------------

/// The subobject carved out by an explicit predicate: the points with
/// non-empty sets, realized by those sets, included by the support witness.
pub fn predicate_to_subobject(p: &Predicate) -> Result<(Assembly, AsmMorphism), AssemblyError> {
    let PredSets::Explicit(ps) = &p.sets else {
        return Err(AssemblyError::NeedsExplicit(
            "the predicate-to-subobject direction",
        ));
    };
    let support = p
        .support
        .clone()
        .ok_or(AssemblyError::MissingSupport("the predicate"))?;
    let mut carrier = Vec::new();
    let mut realizes = BTreeMap::new();
    let mut map = BTreeMap::new();
    for x in &p.over.carrier {
        if !ps[x].is_empty() {
            carrier.push(x.clone());
            realizes.insert(x.clone(), ps[x].clone());
            map.insert(x.clone(), x.clone());
        }
    }
    let sub = Assembly {
        carrier,
        realizer_type: p.pred_type.clone(),
        realizes,
    };
    let incl = AsmMorphism::new(&sub, &p.over, map, &support)?;
    Ok((sub, incl))
}

/// The predicate induced by a (mono) morphism: at `x`, the union of the
/// realizer sets over the fiber, supported by the tracker.
pub fn subobject_to_predicate(m: &AsmMorphism) -> Predicate {
    let mut sets = BTreeMap::new();
    for x in &m.to.carrier {
        let mut set = Vec::new();
        for y in m.fiber(x) {
            for t in &m.from.realizes[&y] {
                if !set.contains(t) {
                    set.push(t.clone());
                }
            }
        }
        sets.insert(x.clone(), set);
    }
    Predicate {
        over: m.to.clone(),
        pred_type: m.from.realizer_type.clone(),
        sets: PredSets::Explicit(sets),
        support: Some(m.tracker.clone()),
    }
}

// ---------------------------------------------------------------------------
// Independence of premise and choice
// ---------------------------------------------------------------------------

/// The computed premise of the independence-of-premise statement over `X`:
/// realizer type `(A -> D) × A`; a member at `x` is a pair `(m, n)` with
/// `n` realizing `x` and `m` sending every realizer of the (negated)
/// antecedent at `x` to a realizer of `ψ` at `(x, y)` for some `y`.
pub fn ip_premise(
    not_phi: &Predicate,
    psi: &Predicate,
    y: &Assembly,
) -> Result<Predicate, AssemblyError> {
    if !not_phi.is_explicit() {
        return Err(AssemblyError::NeedsExplicit("the negated antecedent"));
    }
    if psi.over != not_phi.over.product(y) {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let x_asm = not_phi.over.clone();
    let a = x_asm.realizer_type.clone();
    let d = psi.pred_type.clone();
    let ty = TypeExpr::prod(TypeExpr::arrow(a.clone(), d.clone()), a.clone());
    let (np, ps, ya) = (not_phi.clone(), psi.clone(), y.clone());
    let checker: Checker = Arc::new(move |x, t| {
        let Some((m, n)) = split_pair(t) else {
            return false;
        };
        let Ok(rs) = np.over.realizers(x) else {
            return false;
        };
        if !rs.contains(&nf(n)) {
            return false;
        }
        let Some(mu) = np.enumerated(x) else {
            return false;
        };
        mu.iter().all(|i| {
            let val = Term::app(m.clone(), i.clone());
            ya.carrier
                .iter()
                .any(|yp| ps.contains(&Assembly::product_point(x, yp), &val))
        })
    });
    let arrow = TypeExpr::arrow(a.clone(), d);
    let k = tca::fresh_name("k");
    let support = compile(&lam(&k, ty.clone(), snd_at(&arrow, &a, v(&k, ty.clone()))))?;
    Ok(Predicate::intensional(&x_asm, ty, checker, Some(support)))
}

/// The computed conclusion of independence of premise over `X`: realizer
/// type `((A×B) -> D) × (A×B)`; a member at `x` is a pair `(k, l)` such
/// that for some point `y`, `l` realizes `(x, y)` and `k` maps every pair
/// of an antecedent realizer and a realizer of `y` into `ψ` at `(x, y)`.
pub fn ip_conclusion(
    not_phi: &Predicate,
    psi: &Predicate,
    y: &Assembly,
) -> Result<Predicate, AssemblyError> {
    if !not_phi.is_explicit() {
        return Err(AssemblyError::NeedsExplicit("the negated antecedent"));
    }
    if psi.over != not_phi.over.product(y) {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let x_asm = not_phi.over.clone();
    let a = x_asm.realizer_type.clone();
    let b = y.realizer_type.clone();
    let d = psi.pred_type.clone();
    let ab = TypeExpr::prod(a.clone(), b.clone());
    let arrow = TypeExpr::arrow(ab.clone(), d.clone());
    let ty = TypeExpr::prod(arrow.clone(), ab.clone());
    let (np, ps, ya, xa) = (not_phi.clone(), psi.clone(), y.clone(), x_asm.clone());
    let (a_c, b_c) = (a.clone(), b.clone());
    let checker: Checker = Arc::new(move |x, t| {
        let Some((k, l)) = split_pair(t) else {
            return false;
        };
        let Some((la, lb)) = split_pair(&nf(l)) else {
            return false;
        };
        let Ok(ax) = xa.realizers(x) else {
            return false;
        };
        if !ax.contains(&nf(la.clone())) {
            return false;
        }
        let Some(mu) = np.enumerated(x) else {
            return false;
        };
        ya.carrier.iter().any(|yp| {
            let Ok(by) = ya.realizers(yp) else {
                return false;
            };
            if !by.contains(&nf(lb.clone())) {
                return false;
            }
            mu.iter().all(|i| {
                by.iter().all(|bb| {
                    let j = pair2(&a_c, &b_c, i.clone(), bb.clone());
                    ps.contains(&Assembly::product_point(x, yp), &Term::app(k.clone(), j))
                })
            })
        })
    });
    let k = tca::fresh_name("k");
    let support = compile(&lam(
        &k,
        ty.clone(),
        fst_at(&a, &b, snd_at(&arrow, &ab, v(&k, ty.clone()))),
    ))?;
    Ok(Predicate::intensional(&x_asm, ty, checker, Some(support)))
}

/// The independence-of-premise witness term
/// `λp. pair (λi. (fst p)(snd p)) (pair (snd p) (snd (g ((fst p)(snd p)))))`
/// where `g` is `ψ`'s support. Together with `ip_premise`/`ip_conclusion`
/// this is the transformation the statement asks for; `leq_check` validates
/// it on finite data.
pub fn ip_witness(
    not_phi: &Predicate,
    psi: &Predicate,
    y: &Assembly,
) -> Result<Term, AssemblyError> {
    let g = psi
        .support
        .clone()
        .ok_or(AssemblyError::MissingSupport("ψ"))?;
    let a = not_phi.over.realizer_type.clone();
    let b = y.realizer_type.clone();
    let d = psi.pred_type.clone();
    let ab = TypeExpr::prod(a.clone(), b.clone());
    let src = TypeExpr::prod(TypeExpr::arrow(a.clone(), d.clone()), a.clone());
    let p = tca::fresh_name("p");
    let i = tca::fresh_name("i");
    let m = fst_at(
        &TypeExpr::arrow(a.clone(), d.clone()),
        &a,
        v(&p, src.clone()),
    );
    let n = snd_at(
        &TypeExpr::arrow(a.clone(), d.clone()),
        &a,
        v(&p, src.clone()),
    );
    let mn = Term::app(m, n.clone());
    let body = pair2(
        &TypeExpr::arrow(ab.clone(), d.clone()),
        &ab,
        lam(&i, ab.clone(), mn.clone()),
        pair2(&a, &b, n, snd_at(&a, &b, Term::app(g, mn))),
    );
    Ok(compile(&lam(&p, src, body))?)
}

/// The computed premise of the choice statement over `Z`: realizer type
/// `C × ((A×C) -> D)`; a member at `z` is `(n, m)` with `n` realizing `z`
/// and `m` sending every pair of a realizer of some `x` and a realizer of
/// `z` to a realizer of `φ` at `(x, (y, z))` for some `y`.
pub fn ac_premise(
    phi: &Predicate,
    x: &Assembly,
    y: &Assembly,
    z: &Assembly,
) -> Result<Predicate, AssemblyError> {
    if phi.over != x.product(&y.product(z)) {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let a = x.realizer_type.clone();
    let c = z.realizer_type.clone();
    let d = phi.pred_type.clone();
    let ac = TypeExpr::prod(a.clone(), c.clone());
    let arrow = TypeExpr::arrow(ac, d.clone());
    let ty = TypeExpr::prod(c.clone(), arrow.clone());
    let (ph, xa, ya, za) = (phi.clone(), x.clone(), y.clone(), z.clone());
    let (a_c, c_c) = (a, c.clone());
    let checker: Checker = Arc::new(move |zp, t| {
        let Some((n, m)) = split_pair(t) else {
            return false;
        };
        let Ok(gz) = za.realizers(zp) else {
            return false;
        };
        if !gz.contains(&nf(n)) {
            return false;
        }
        xa.carrier.iter().all(|xp| {
            let Ok(ax) = xa.realizers(xp) else {
                return false;
            };
            ax.iter().all(|aa| {
                gz.iter().all(|cc| {
                    let kk = pair2(&a_c, &c_c, aa.clone(), cc.clone());
                    let val = Term::app(m.clone(), kk);
                    ya.carrier.iter().any(|yp| {
                        ph.contains(
                            &Assembly::product_point(xp, &Assembly::product_point(yp, zp)),
                            &val,
                        )
                    })
                })
            })
        })
    });
    let k = tca::fresh_name("k");
    let support = compile(&lam(&k, ty.clone(), fst_at(&c, &arrow, v(&k, ty.clone()))))?;
    Ok(Predicate::intensional(z, ty, checker, Some(support)))
}

/// The tuple realizer type of the choice conclusion:
/// `T = A × ((A -> B) × C)`.
fn ac_tuple_type(a: &TypeExpr, b: &TypeExpr, c: &TypeExpr) -> TypeExpr {
    TypeExpr::prod(
        a.clone(),
        TypeExpr::prod(TypeExpr::arrow(a.clone(), b.clone()), c.clone()),
    )
}

/// The computed conclusion of the choice statement over `Z`: realizer type
/// `((A -> B) × C) × (T -> D × T)` with `T = A × ((A -> B) × C)`. A member
/// at `z` is `(n, m)` where `n = (e, c)` for a tracker `e` of some point
/// function `f : X -> Y`, `c` realizes `z`, and `m` sends every tuple for
/// `(x, f, z)` to a pair of a realizer of `φ` at `(x, f(x), z)` and another
/// such tuple. Tuples quantify trackers over `{e} ∪ tracker_pool`.
pub fn ac_conclusion(
    phi: &Predicate,
    x: &Assembly,
    y: &Assembly,
    z: &Assembly,
    tracker_pool: &[Term],
) -> Result<Predicate, AssemblyError> {
    if phi.over != x.product(&y.product(z)) {
        return Err(AssemblyError::AssemblyMismatch);
    }
    let a = x.realizer_type.clone();
    let b = y.realizer_type.clone();
    let c = z.realizer_type.clone();
    let d = phi.pred_type.clone();
    let fn_ty = TypeExpr::arrow(a.clone(), b.clone());
    let tuple = ac_tuple_type(&a, &b, &c);
    let n_ty = TypeExpr::prod(fn_ty.clone(), c.clone());
    let m_ty = TypeExpr::arrow(tuple.clone(), TypeExpr::prod(d.clone(), tuple.clone()));
    let ty = TypeExpr::prod(n_ty.clone(), m_ty);
    let mut pool = Vec::new();
    for t in tracker_pool {
        let nt = prepare(t, &fn_ty)?;
        if !pool.contains(&nt) {
            pool.push(nt);
        }
    }
    let (ph, xa, ya, za) = (phi.clone(), x.clone(), y.clone(), z.clone());
    let (a_c, b_c, c_c) = (a.clone(), b.clone(), c.clone());
    let checker: Checker = Arc::new(move |zp, t| {
        let Some((n, m)) = split_pair(t) else {
            return false;
        };
        let Some((e, cc)) = split_pair(&nf(n)) else {
            return false;
        };
        let Ok(gz) = za.realizers(zp) else {
            return false;
        };
        if !gz.contains(&nf(cc)) {
            return false;
        }
        // Determine the point function this tracker induces, then check it.
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for xp in &xa.carrier {
            let Ok(ax) = xa.realizers(xp) else {
                return false;
            };
            let mut target: Option<&str> = None;
            for aa in ax {
                let val = nf(Term::app(e.clone(), aa.clone()));
                match ya.point_of(&val) {
                    Some(ypt) if target.is_none() || target == Some(ypt) => {
                        target = Some(ypt);
                    }
                    _ => return false,
                }
            }
            match target {
                Some(t) => {
                    map.insert(xp.clone(), t.to_string());
                }
                None => return false,
            }
        }
        let mut trackers: Vec<Term> = vec![nf(e.clone())];
        for p in &pool {
            let ok = xa.carrier.iter().all(|xp| {
                xa.realizers(xp).is_ok_and(|ax| {
                    ax.iter().all(|aa| {
                        let val = nf(Term::app(p.clone(), aa.clone()));
                        ya.point_of(&val) == map.get(xp).map(|s| s.as_str())
                    })
                })
            });
            if ok && !trackers.contains(p) {
                trackers.push(p.clone());
            }
        }
        // Every tuple for (x, f, z) must be sent to a φ-realizer at
        // (x, f x, z) paired with another such tuple.
        xa.carrier.iter().all(|xp| {
            let Ok(ax) = xa.realizers(xp) else {
                return false;
            };
            let fx = &map[xp];
            ax.iter().all(|aa| {
                trackers.iter().all(|ee| {
                    gz.iter().all(|zz| {
                        let k = pair2(
                            &a_c,
                            &TypeExpr::prod(TypeExpr::arrow(a_c.clone(), b_c.clone()), c_c.clone()),
                            aa.clone(),
                            pair2(
                                &TypeExpr::arrow(a_c.clone(), b_c.clone()),
                                &c_c,
                                ee.clone(),
                                zz.clone(),
                            ),
                        );
                        let out = nf(Term::app(m.clone(), k));
                        let Some((dd, k2)) = split_pair(&out) else {
                            return false;
                        };
                        if !ph.contains(
                            &Assembly::product_point(xp, &Assembly::product_point(fx, zp)),
                            &dd,
                        ) {
                            return false;
                        }
                        let Some((a2, rest)) = split_pair(&nf(k2)) else {
                            return false;
                        };
                        let Some((e2, c2)) = split_pair(&nf(rest)) else {
                            return false;
                        };
                        if !ax.contains(&nf(a2)) || !gz.contains(&nf(c2)) {
                            return false;
                        }
                        let e2n = nf(e2);
                        xa.carrier.iter().all(|xq| {
                            xa.realizers(xq).is_ok_and(|axq| {
                                axq.iter().all(|aq| {
                                    let val = nf(Term::app(e2n.clone(), aq.clone()));
                                    ya.point_of(&val) == map.get(xq).map(|s| s.as_str())
                                })
                            })
                        })
                    })
                })
            })
        })
    });
    // The support would have to extract a z-realizer from the n-component;
    // nothing downstream needs it, so it is left out.
    Ok(Predicate::intensional(z, ty, checker, None))
}

/// The choice witness term
/// `λp. pair (pair f̌ (fst p)) (λk. pair ((snd p) (pair (fst k) (fst p))) k)`
/// with `f̌ = λj. π_Y (ι (m (pair j n)))`, where `ι` is `φ`'s support,
/// `n = fst p` and `m = snd p`.
pub fn ac_witness(
    phi: &Predicate,
    x: &Assembly,
    y: &Assembly,
    z: &Assembly,
) -> Result<Term, AssemblyError> {
    let iota = phi
        .support
        .clone()
        .ok_or(AssemblyError::MissingSupport("φ"))?;
    let a = x.realizer_type.clone();
    let b = y.realizer_type.clone();
    let c = z.realizer_type.clone();
    let d = phi.pred_type.clone();
    let bc = TypeExpr::prod(b.clone(), c.clone());
    let ac = TypeExpr::prod(a.clone(), c.clone());
    let m_ty = TypeExpr::arrow(ac.clone(), d.clone());
    let src = TypeExpr::prod(c.clone(), m_ty.clone());
    let tuple = ac_tuple_type(&a, &b, &c);
    let fn_ty = TypeExpr::arrow(a.clone(), b.clone());

    let p = tca::fresh_name("p");
    let j = tca::fresh_name("j");
    let k = tca::fresh_name("k");
    let n = fst_at(&c, &m_ty, v(&p, src.clone()));
    let m = snd_at(&c, &m_ty, v(&p, src.clone()));
    // f̌ = λj. fst (snd (ι (m (pair j n)))).
    let choice_fn = lam(
        &j,
        a.clone(),
        fst_at(
            &b,
            &c,
            snd_at(
                &a,
                &bc,
                Term::app(
                    iota,
                    Term::app(m.clone(), pair2(&a, &c, v(&j, a.clone()), n.clone())),
                ),
            ),
        ),
    );
    // λk. pair (m (pair (fst k) n)) k.
    let second = lam(
        &k,
        tuple.clone(),
        pair2(
            &d,
            &tuple,
            Term::app(
                m,
                pair2(
                    &a,
                    &c,
                    fst_at(
                        &a,
                        &TypeExpr::prod(fn_ty.clone(), c.clone()),
                        v(&k, tuple.clone()),
                    ),
                    n.clone(),
                ),
            ),
            v(&k, tuple.clone()),
        ),
    );
    let body = pair2(
        &TypeExpr::prod(fn_ty.clone(), c.clone()),
        &TypeExpr::arrow(tuple.clone(), TypeExpr::prod(d, tuple.clone())),
        pair2(&fn_ty, &c, choice_fn, n),
        second,
    );
    Ok(compile(&lam(&p, src, body))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_term;
    use crate::tca::numeral;

    fn nat_points(ns: &[u64]) -> Assembly {
        let sample: Vec<Term> = ns.iter().map(|&n| numeral(n)).collect();
        embed_type(&TypeExpr::Nat, &sample).unwrap()
    }

    fn term(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn pred_on(asm: &Assembly, ty: &str, entries: &[(&str, &[&str])], support: &str) -> Predicate {
        let holds = entries
            .iter()
            .map(|(p, ts)| (p.to_string(), ts.iter().map(|t| term(t)).collect()))
            .collect();
        Predicate::explicit(
            asm,
            crate::kernel::parse_type(ty).unwrap(),
            holds,
            Some(term(support)),
        )
        .unwrap()
    }

    #[test]
    fn embedding_gives_singleton_realizers() {
        let a = nat_points(&[0, 1, 2]);
        assert_eq!(a.carrier().len(), 3);
        for p in a.carrier() {
            assert_eq!(a.realizers(p).unwrap().len(), 1);
        }
        assert!(a.is_basic_for(&[numeral(0), numeral(1), numeral(2)]));
        assert!(!a.is_exhaustive_for(&[numeral(7)]));
    }

    #[test]
    fn embedding_rejects_convertible_duplicates() {
        let e = embed_type(&TypeExpr::Nat, &[numeral(0), term("S K K 0")]);
        assert!(matches!(e, Err(AssemblyError::ConvertibleDuplicates(..))));
    }

    #[test]
    fn terminal_assembly_is_one_point_over_unit() {
        let t = Assembly::terminal();
        assert_eq!(t.carrier(), ["*".to_string()]);
        assert_eq!(*t.realizer_type(), TypeExpr::Unit);
    }

    #[test]
    fn conjunction_pairs_realizers_pointwise() {
        let a = nat_points(&[0]);
        let p = pred_on(&a, "N", &[("0", &["1"])], "fn b:N. 0");
        let q = pred_on(&a, "N", &[("0", &["2"])], "fn b:N. 0");
        let n = TypeExpr::Nat;
        let and = heyting_op(HeytingOp::And, &p, &q).unwrap();
        assert_eq!(
            and.enumerated("0").unwrap(),
            &[pair2(&n, &n, numeral(1), numeral(2))]
        );
        let or = heyting_op(HeytingOp::Or, &p, &q).unwrap();
        assert_eq!(
            or.enumerated("0").unwrap(),
            &[inl_at(&n, &n, numeral(1)), inr_at(&n, &n, numeral(2))]
        );
    }

    #[test]
    fn implication_members_map_antecedent_into_consequent() {
        let a = nat_points(&[0]);
        let p = pred_on(&a, "N", &[("0", &["1", "2"])], "fn b:N. 0");
        let q = pred_on(&a, "N", &[("0", &["3"])], "fn b:N. 0");
        let imp = heyting_op(HeytingOp::Implies, &p, &q).unwrap();
        // K 3 maps both antecedent realizers to 3.
        let good = term("pair 0 (fn b:N. 3)");
        let bad = term("pair 0 (fn b:N. b)");
        let good = crate::tca::compile(&good).unwrap();
        let bad = crate::tca::compile(&bad).unwrap();
        assert!(imp.contains("0", &good));
        assert!(!imp.contains("0", &bad));
    }

    #[test]
    fn negation_flips_empty_and_inhabited_fibers() {
        let a = nat_points(&[0, 1]);
        let p = pred_on(&a, "N", &[("0", &["5"])], "fn b:N. 0");
        let n = pred_neg(&p).unwrap();
        assert!(n.enumerated("0").unwrap().is_empty());
        assert_eq!(n.enumerated("1").unwrap(), a.realizers("1").unwrap());
        // Double negation of an everywhere-realized predicate has full support.
        let top = Predicate::top(&a);
        let nn = pred_neg(&pred_neg(&top).unwrap()).unwrap();
        for p in a.carrier() {
            assert_eq!(nn.enumerated(p).unwrap(), a.realizers(p).unwrap());
        }
    }

    #[test]
    fn negation_agrees_with_implication_into_bottom_where_both_exist() {
        // With an uninhabited antecedent type the implication members are
        // pairs (a, id); both comparison witnesses exist and go through.
        let a = nat_points(&[0, 1]);
        let bot = Predicate::bottom(&a);
        let neg = pred_neg(&bot).unwrap();
        let imp = heyting_op(HeytingOp::Implies, &bot, &bot).unwrap();
        // imp ≤ neg via fst.
        let w1 = term("fn k:N * (Empty -> Empty). fst k");
        assert!(leq_check(
            &imp.materialize_with(|p| {
                a.realizers(p)
                    .unwrap()
                    .iter()
                    .map(|r| {
                        pair2(
                            &TypeExpr::Nat,
                            &TypeExpr::arrow(TypeExpr::Empty, TypeExpr::Empty),
                            r.clone(),
                            crate::tca::identity(&TypeExpr::Empty),
                        )
                    })
                    .collect()
            })
            .unwrap(),
            &neg,
            &w1
        )
        .unwrap()
        .holds());
        // neg ≤ imp via λx. pair x id.
        let w2 = term("fn x:N. pair x (fn e:Empty. e)");
        assert!(leq_check(&neg, &imp, &w2).unwrap().holds());
    }

    #[test]
    fn reindexing_along_identity_is_mutually_bounded_with_the_original() {
        let a = nat_points(&[0, 1]);
        let p = pred_on(&a, "N", &[("0", &["7"]), ("1", &[])], "fn b:N. 0");
        let id = AsmMorphism::identity(&a);
        let r = reindex(&id, &p).unwrap();
        // r's set at x is γ(x) × α(x).
        let n = TypeExpr::Nat;
        assert_eq!(
            r.enumerated("0").unwrap(),
            &[pair2(&n, &n, numeral(7), numeral(0))]
        );
        assert!(r.enumerated("1").unwrap().is_empty());
        let fwd = exists_transpose(&crate::tca::identity(&TypeExpr::Nat), &p, &p).unwrap();
        assert!(leq_check(&p, &r, &fwd).unwrap().holds());
        let back = term("fn k:N * N. fst k");
        assert!(leq_check(&r, &p, &back).unwrap().holds());
    }

    #[test]
    fn exists_takes_fiberwise_unions() {
        let y = nat_points(&[0, 1]);
        let x = nat_points(&[9]);
        let map = [("0", "9"), ("1", "9")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let f = AsmMorphism::new(&y, &x, map, &term("fn n:N. 9")).unwrap();
        let p = pred_on(&y, "N", &[("0", &["0"]), ("1", &["1"])], "fn b:N. b");
        let e = exists_along(&f, &p).unwrap();
        assert_eq!(e.enumerated("9").unwrap(), &[numeral(0), numeral(1)]);
        // Identity reindexing: singleton fibers give back the same sets.
        let idp = exists_along(&AsmMorphism::identity(&y), &p).unwrap();
        for pt in y.carrier() {
            assert_eq!(idp.enumerated(pt).unwrap(), p.enumerated(pt).unwrap());
        }
    }

    #[test]
    fn forall_members_act_on_every_fiber_realizer() {
        let y = nat_points(&[0, 1]);
        let x = Assembly::new(TypeExpr::Nat, vec![("w".into(), vec![numeral(9)])]).unwrap();
        let map = [("0", "w"), ("1", "w")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let f = AsmMorphism::new(&y, &x, map, &term("fn n:N. 9")).unwrap();
        let p = Predicate::top(&y);
        let all = forall_along(&f, &p).unwrap();
        let id_member = crate::tca::compile(&term("pair 9 (fn n:N. n)")).unwrap();
        let bad_member = crate::tca::compile(&term("pair 9 (fn n:N. 5)")).unwrap();
        assert!(all.contains("w", &id_member));
        assert!(!all.contains("w", &bad_member));

        // Empty fiber: anything of the right shape is a member.
        let x2 = nat_points(&[3, 4]);
        let map2 = [("0", "3"), ("1", "3")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let f2 = AsmMorphism::new(&y, &x2, map2, &term("fn n:N. 3")).unwrap();
        let all2 = forall_along(&f2, &p).unwrap();
        let anything = crate::tca::compile(&term("pair 4 (fn n:N. 8)")).unwrap();
        assert!(all2.contains("4", &anything));

        // An empty set on a populated fiber point kills membership.
        let p_empty = pred_on(&y, "N", &[("0", &[]), ("1", &["1"])], "fn b:N. b");
        let all3 = forall_along(&f, &p_empty).unwrap();
        assert!(!all3.contains("w", &id_member));
    }

    #[test]
    fn leq_check_examples() {
        let a = nat_points(&[0, 1]);
        let p = pred_on(&a, "N", &[("0", &["0"]), ("1", &["1"])], "fn b:N. b");
        // Reflexivity via the identity witness.
        assert!(leq_check(&p, &p, &term("fn b:N. b")).unwrap().holds());
        // And(P,Q) ≤ P via fst.
        let q = pred_on(&a, "N", &[("0", &["0"]), ("1", &["1"])], "fn b:N. b");
        let and = heyting_op(HeytingOp::And, &p, &q).unwrap();
        assert!(leq_check(&and, &p, &term("fn k:N * N. fst k"))
            .unwrap()
            .holds());
        // An inhabited source cannot be mapped into an empty target.
        let empty = pred_on(&a, "N", &[], "fn b:N. b");
        let v = leq_check(&p, &empty, &term("fn b:N. b")).unwrap();
        assert!(v.failed());
    }

    #[test]
    fn lifting_follows_the_tracked_function() {
        let x = nat_points(&[0, 1, 2, 3, 4]);
        let y = nat_points(&[0, 1, 2, 3, 4, 5]);
        let f = lift_morphism(&Term::constant(Comb::Succ), &x, &y).unwrap();
        for n in 0..5u64 {
            assert_eq!(f.apply(&n.to_string()).unwrap(), (n + 1).to_string());
        }
        let idm = lift_morphism(&crate::tca::identity(&TypeExpr::Nat), &x, &x).unwrap();
        assert_eq!(idm.apply("3").unwrap(), "3");
        // succ 4 = 5 is outside [0..4]: reported, not patched.
        let e = lift_morphism(&Term::constant(Comb::Succ), &x, &x);
        assert!(matches!(e, Err(AssemblyError::NotExhaustive(_))));
    }

    #[test]
    fn products_and_exponentials_preserve_modesty() {
        let x = nat_points(&[0, 1]);
        let y = nat_points(&[0, 1, 2]);
        assert!(x.is_strongly_modest() && y.is_strongly_modest());
        let xy = x.product(&y);
        assert!(xy.is_modest());
        assert!(xy.is_strongly_modest());
        // Exhaustive relative to the pairs of the component samples.
        let mut pair_samples = Vec::new();
        for a in 0..2u64 {
            for b in 0..3u64 {
                pair_samples.push(pair2(
                    &TypeExpr::Nat,
                    &TypeExpr::Nat,
                    numeral(a),
                    numeral(b),
                ));
            }
        }
        assert!(xy.is_exhaustive_for(&pair_samples));

        // The exponential relative to a tracker pool: every tracked map is
        // a point, realized by exactly the pool elements tracking it.
        let two = nat_points(&[0, 1]);
        let pool = [
            crate::tca::identity(&TypeExpr::Nat),
            term("fn n:N. rec 1 (fn a:N. fn b:N. 0) n"),
            term("fn n:N. 0"),
            term("fn n:N. 1"),
        ];
        let exp = two.exponential(&two, &pool).unwrap();
        assert_eq!(exp.carrier().len(), 4);
        assert!(exp.is_modest());
        assert!(exp.is_strongly_modest());
        assert!(exp.is_basic_for(&pool));
        // Convertible trackers collapse into one realizer; an extensionally
        // equal but non-convertible tracker stays distinct, so the point
        // keeps two realizers: modest, no longer strongly modest.
        let pool2 = [
            crate::tca::identity(&TypeExpr::Nat),
            term("fn n:N. n"),
            term("fn n:N. fst (pair n 9)"),
        ];
        let exp2 = two.exponential(&two, &pool2).unwrap();
        assert_eq!(exp2.carrier().len(), 1);
        assert_eq!(exp2.realizers(&exp2.carrier()[0]).unwrap().len(), 2);
        assert!(exp2.is_modest());
        assert!(!exp2.is_strongly_modest());
    }

    #[test]
    fn pullback_square_and_beck_chevalley() {
        // Y = {0,1} -> W = {0}, Z = {0,1,2} -> W = {0}: the pullback is the
        // full product and both sweeps agree.
        let w = nat_points(&[0]);
        let y = nat_points(&[0, 1]);
        let z = nat_points(&[0, 1, 2]);
        let const0 = term("fn n:N. 0");
        let h = AsmMorphism::new(
            &y,
            &w,
            y.carrier()
                .iter()
                .map(|p| (p.clone(), "0".into()))
                .collect(),
            &const0,
        )
        .unwrap();
        let k = AsmMorphism::new(
            &z,
            &w,
            z.carrier()
                .iter()
                .map(|p| (p.clone(), "0".into()))
                .collect(),
            &const0,
        )
        .unwrap();
        let q = pred_on(&z, "N", &[("0", &["0"]), ("2", &["2"])], "fn b:N. b");
        let (lhs_to_rhs, rhs_to_lhs) = beck_chevalley_check(&h, &k, &q).unwrap();
        assert!(lhs_to_rhs.holds(), "{lhs_to_rhs}");
        assert!(rhs_to_lhs.holds(), "{rhs_to_lhs}");
    }

    #[test]
    fn subobject_round_trip_is_the_identity_on_predicates() {
        let a = nat_points(&[0, 1, 2]);
        let p = pred_on(&a, "N", &[("0", &["0"]), ("2", &["2"])], "fn b:N. b");
        let (sub, incl) = predicate_to_subobject(&p).unwrap();
        assert_eq!(sub.carrier(), ["0".to_string(), "2".to_string()]);
        let back = subobject_to_predicate(&incl);
        for pt in a.carrier() {
            assert_eq!(back.enumerated(pt).unwrap(), p.enumerated(pt).unwrap());
        }
        let idw = term("fn b:N. b");
        assert!(leq_check(&p, &back, &idw).unwrap().holds());
        assert!(leq_check(&back, &p, &idw).unwrap().holds());
    }

    #[test]
    fn exists_adjunction_transposes_round_trip() {
        let y = nat_points(&[0, 1]);
        let x = nat_points(&[9]);
        let map = [("0", "9"), ("1", "9")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let f = AsmMorphism::new(&y, &x, map, &term("fn n:N. 9")).unwrap();
        let p = pred_on(&y, "N", &[("0", &["0"]), ("1", &["1"])], "fn b:N. b");
        let ex = exists_along(&f, &p).unwrap();
        // ∃_f P ≤ ∃_f P via the identity…
        let g0 = crate::tca::identity(&TypeExpr::Nat);
        assert!(leq_check(&ex, &ex, &g0).unwrap().holds());
        // …transposes to P ≤ (Pf)(∃_f P)…
        let h = exists_transpose(&g0, &p, &ex).unwrap();
        let rx = reindex(&f, &ex).unwrap();
        assert!(leq_check(&p, &rx, &h).unwrap().holds());
        // …and back to ∃_f P ≤ ∃_f P.
        let g1 = exists_untranspose(&h, &p, &ex).unwrap();
        assert!(leq_check(&ex, &ex, &g1).unwrap().holds());
    }

    #[test]
    fn forall_adjunction_transposes_round_trip() {
        let y = nat_points(&[0, 1]);
        let x = Assembly::new(TypeExpr::Nat, vec![("w".into(), vec![numeral(9)])]).unwrap();
        let map = [("0", "w"), ("1", "w")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let f = AsmMorphism::new(&y, &x, map, &term("fn n:N. 9")).unwrap();
        let dpred = Predicate::top(&y);
        let all = forall_along(&f, &dpred).unwrap();
        // Materialize ∀_f D on the identity-style candidates.
        let arrow = TypeExpr::arrow(TypeExpr::Nat, TypeExpr::Nat);
        let all_x = all
            .materialize_with(|pt| {
                let mut out = Vec::new();
                for r in x.realizers(pt).unwrap() {
                    out.push(pair2(
                        &TypeExpr::Nat,
                        &arrow,
                        r.clone(),
                        crate::tca::identity(&TypeExpr::Nat),
                    ));
                }
                out
            })
            .unwrap();
        assert_eq!(all_x.explicit_size(), 1);
        // ∀_f D ≤ ∀_f D on the materialized source, via the identity.
        let g0 = crate::tca::identity(all_x.pred_type());
        assert!(leq_check(&all_x, &all, &g0).unwrap().holds());
        // Transpose: (Pf)(∀_f D) ≤ D.
        let h = forall_transpose(&g0, &f, &all_x, &dpred).unwrap();
        let rx = reindex(&f, &all_x).unwrap();
        assert!(leq_check(&rx, &dpred, &h).unwrap().holds());
        // Untranspose: ∀_f D again.
        let g1 = forall_untranspose(&h, &f, &all_x, &dpred).unwrap();
        assert!(leq_check(&all_x, &all, &g1).unwrap().holds());
    }

    #[test]
    fn ip_witness_passes_leq_on_a_small_fixture() {
        let x = nat_points(&[0]);
        let y = nat_points(&[0, 1]);
        let xy = x.product(&y);
        let phi = pred_on(&x, "N", &[], "fn b:N. b");
        let not_phi = pred_neg(&phi).unwrap();
        let psi = Predicate::top(&xy);
        let w = ip_witness(&not_phi, &psi, &y).unwrap();
        let premise = ip_premise(&not_phi, &psi, &y).unwrap();
        let conclusion = ip_conclusion(&not_phi, &psi, &y).unwrap();
        let arrow = TypeExpr::arrow(TypeExpr::Nat, psi.pred_type().clone());
        let premise_x = premise
            .materialize_with(|_| {
                let mut out = Vec::new();
                for b in 0..2u64 {
                    let m = crate::tca::compile(&term(&format!("fn i:N. pair 0 {b}"))).unwrap();
                    out.push(pair2(&arrow, &TypeExpr::Nat, m, numeral(0)));
                }
                out
            })
            .unwrap();
        assert_eq!(premise_x.explicit_size(), 2);
        assert!(leq_check(&premise_x, &conclusion, &w).unwrap().holds());
    }

    #[test]
    fn ip_premise_is_vacuous_when_the_antecedent_is_everywhere_realized() {
        let x = nat_points(&[0]);
        let y = nat_points(&[0]);
        let xy = x.product(&y);
        // φ everywhere realized means ¬φ is empty and the premise condition
        // is vacuous: any (m, n) with n realizing x belongs.
        let phi = Predicate::top(&x);
        let not_phi = pred_neg(&phi).unwrap();
        let psi = Predicate::top(&xy);
        let premise = ip_premise(&not_phi, &psi, &y).unwrap();
        let junk = crate::tca::compile(&term("pair (fn i:N. pair 5 5) 0")).unwrap();
        assert!(premise.contains("0", &junk));
        let w = ip_witness(&not_phi, &psi, &y).unwrap();
        let conclusion = ip_conclusion(&not_phi, &psi, &y).unwrap();
        let arrow = TypeExpr::arrow(TypeExpr::Nat, psi.pred_type().clone());
        let premise_x = premise
            .materialize_with(|_| {
                vec![pair2(
                    &arrow,
                    &TypeExpr::Nat,
                    crate::tca::compile(&term("fn i:N. pair 0 0")).unwrap(),
                    numeral(0),
                )]
            })
            .unwrap();
        assert_eq!(premise_x.explicit_size(), 1);
        assert!(leq_check(&premise_x, &conclusion, &w).unwrap().holds());
    }

    #[test]
    fn ac_witness_computes_the_identity_choice_function() {
        let x = nat_points(&[0, 1]);
        let y = nat_points(&[0, 1]);
        let z = Assembly::terminal();
        let xyz = x.product(&y.product(&z));
        // φ: "y = x", realized by the full tuple exactly on the diagonal.
        let mut holds = BTreeMap::new();
        for n in 0..2u64 {
            let pt = Assembly::product_point(
                &n.to_string(),
                &Assembly::product_point(&n.to_string(), "*"),
            );
            holds.insert(pt, vec![term(&format!("pair {n} (pair {n} unit)"))]);
        }
        let phi = Predicate::explicit(
            &xyz,
            crate::kernel::parse_type("N * (N * Unit)").unwrap(),
            holds,
            Some(term("fn k:N * (N * Unit). k")),
        )
        .unwrap();
        let w = ac_witness(&phi, &x, &y, &z).unwrap();
        let premise = ac_premise(&phi, &x, &y, &z).unwrap();
        let conclusion = ac_conclusion(&phi, &x, &y, &z, &[]).unwrap();
        // The only valid premise m maps (a, unit) to the diagonal tuple.
        let m =
            crate::tca::compile(&term("fn k:N * Unit. pair (fst k) (pair (fst k) unit)")).unwrap();
        let m_ty = TypeExpr::arrow(
            crate::kernel::parse_type("N * Unit").unwrap(),
            phi.pred_type().clone(),
        );
        let premise_x = premise
            .materialize_with(|_| {
                vec![pair2(
                    &TypeExpr::Unit,
                    &m_ty,
                    Term::constant(Comb::UnitVal),
                    m.clone(),
                )]
            })
            .unwrap();
        assert_eq!(premise_x.explicit_size(), 1);
        assert!(leq_check(&premise_x, &conclusion, &w).unwrap().holds());

        // Extract the choice function and check it is the identity on 0, 1.
        let applied = nf(Term::app(
            w.clone(),
            pair2(&TypeExpr::Unit, &m_ty, Term::constant(Comb::UnitVal), m),
        ));
        let (first, _) = split_pair(&applied).unwrap();
        let (choice, _) = split_pair(&nf(first)).unwrap();
        for n in 0..2u64 {
            assert_eq!(nf(Term::app(choice.clone(), numeral(n))), numeral(n));
        }
    }

    #[test]
    fn ac_witness_with_constant_phi_gives_the_constant_choice_function() {
        let x = nat_points(&[0, 1]);
        let y = nat_points(&[0, 1]);
        let z = Assembly::terminal();
        let xyz = x.product(&y.product(&z));
        // φ: "y = 0".
        let mut holds = BTreeMap::new();
        for n in 0..2u64 {
            let pt = Assembly::product_point(&n.to_string(), &Assembly::product_point("0", "*"));
            holds.insert(pt, vec![term(&format!("pair {n} (pair 0 unit)"))]);
        }
        let phi = Predicate::explicit(
            &xyz,
            crate::kernel::parse_type("N * (N * Unit)").unwrap(),
            holds,
            Some(term("fn k:N * (N * Unit). k")),
        )
        .unwrap();
        let w = ac_witness(&phi, &x, &y, &z).unwrap();
        let m = crate::tca::compile(&term("fn k:N * Unit. pair (fst k) (pair 0 unit)")).unwrap();
        let m_ty = TypeExpr::arrow(
            crate::kernel::parse_type("N * Unit").unwrap(),
            phi.pred_type().clone(),
        );
        let applied = nf(Term::app(
            w,
            pair2(&TypeExpr::Unit, &m_ty, Term::constant(Comb::UnitVal), m),
        ));
        let (first, _) = split_pair(&applied).unwrap();
        let (choice, _) = split_pair(&nf(first)).unwrap();
        for n in 0..2u64 {
            assert_eq!(nf(Term::app(choice.clone(), numeral(n))), numeral(0));
        }
    }
}
