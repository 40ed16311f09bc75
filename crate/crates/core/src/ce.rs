//! Converse-extensionality witness extraction.
//!
//! At type 0 the task is: given a type-2 functional `Φ` enriched with a
//! reflection map `Φ⁻`, and type-1 arguments `f`, `g` with `Φf ≠ Φg`,
//! produce a point where `f` and `g` differ. The enrichment makes this a
//! bounded search: `Φ⁻(f, g, 0)` names some differing point `y`, and the
//! least differing point `x ≤ y` depends on `f` and `g` only, not on the
//! reflector. The algorithm exists twice here: natively over fixtures
//! ([`ce0_witness`]) and as a closed object-language term ([`ce0_term`]);
//! the two are checked for bit-identical output over the fixture corpus.
//!
//! At type 1 ([`ce1_witness`]) the witness is itself a function, so the
//! search must be reflector-independent by construction: all finite
//! sequences are enumerated in the order of a fixed bijection `h` between
//! naturals and sequences, and the first padded sequence separating the two
//! type-2 arguments is returned. The reflector and the supplied modulus of
//! continuity only certify that the search terminates.
//!
//! Fixtures are finite by construction: type-1 elements are lookup tables
//! with a default, type-2 elements read finitely many probe points, and the
//! type-3 functional evaluates its argument at one fixed type-1 point.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::apartness::{translate_type, ApartnessError, Premorphism};
use crate::kernel::{Term, TypeExpr};
use crate::tca::{
    self, add, bounded_min_term, build_d, case_at, compile, fst_at, identity, if_nat, inl_at,
    inr_at, iszero, lam, min_nat, monus, pair2, snd_at, v, TcaError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CeError {
    #[error("the functional carries no reflection map")]
    MissingReflector,
    #[error("invalid reflector: it answered {point}, but both functions give {value} there")]
    InvalidReflector { point: u64, value: u64 },
    #[error("invalid reflector: the returned function does not separate the arguments")]
    InvalidReflectorFn,
    #[error("invalid modulus {bound} for {side}: truncating at it changes the value")]
    InvalidModulus { side: &'static str, bound: u64 },
    #[error("search passed the termination certificate {certificate}; the declared modulus or reflector is wrong")]
    CertificateExceeded { certificate: u64 },
    #[error("the termination certificate does not fit the word size; the declared moduli or the reflected point are out of range")]
    CertificateOverflow,
    #[error(transparent)]
    Tca(#[from] TcaError),
    #[error(transparent)]
    Apartness(#[from] ApartnessError),
}

/// A type-1 element: a finite table plus a default value beyond it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fn1 {
    pub table: BTreeMap<u64, u64>,
    pub default: u64,
}

impl Fn1 {
    pub fn new(table: BTreeMap<u64, u64>, default: u64) -> Fn1 {
        Fn1 { table, default }
    }

    pub fn constant(v: u64) -> Fn1 {
        Fn1 {
            table: BTreeMap::new(),
            default: v,
        }
    }

    pub fn eval(&self, n: u64) -> u64 {
        self.table.get(&n).copied().unwrap_or(self.default)
    }

    /// Truncate to the first `len` values and pad with zeros.
    pub fn truncated(&self, len: u64) -> Fn1 {
        pad_sequence(&(0..len).map(|i| self.eval(i)).collect::<Vec<_>>())
    }
}

/// How a type-2 fixture combines the values it reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fn2Program {
    /// The value at the i-th probe.
    ValueAt(usize),
    /// The sum of the values at all probes.
    Sum,
    /// The maximum of the values at all probes.
    Max,
}

/// Reflection maps a type-2 fixture can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reflect2 {
    /// The first probe (in probe order) where the arguments differ.
    FirstDifferingProbe,
    /// The last probe where the arguments differ.
    LastDifferingProbe,
    /// A fixed point, valid only when the fixture guarantees a difference
    /// there whenever the values differ.
    Const(u64),
}

/// A type-2 element: a finite program over probe points, an optional
/// reflection map, and an optional declared modulus of continuity for the
/// roles where this fixture is itself an argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fn2 {
    pub probes: Vec<u64>,
    pub program: Fn2Program,
    pub reflect: Option<Reflect2>,
    pub modulus: Option<u64>,
}

impl Fn2 {
    /// Evaluate at one probe point.
    pub fn eval_at(probe: u64) -> Fn2 {
        Fn2 {
            probes: vec![probe],
            program: Fn2Program::ValueAt(0),
            reflect: Some(Reflect2::FirstDifferingProbe),
            modulus: Some(probe + 1),
        }
    }

    /// The value on a type-1 argument; reads only the probe points.
    pub fn apply(&self, f: &Fn1) -> u64 {
        let vals: Vec<u64> = self.probes.iter().map(|&p| f.eval(p)).collect();
        match self.program {
            Fn2Program::ValueAt(i) => vals.get(i).copied().unwrap_or(0),
            Fn2Program::Sum => vals.iter().sum(),
            Fn2Program::Max => vals.iter().copied().max().unwrap_or(0),
        }
    }

    /// The reflection map: a point where `f` and `g` differ, given that the
    /// values differ. The witness argument is carried for shape only.
    pub fn reflect_point(&self, f: &Fn1, g: &Fn1, _witness: u64) -> Result<u64, CeError> {
        let r = self.reflect.ok_or(CeError::MissingReflector)?;
        Ok(match r {
            Reflect2::FirstDifferingProbe => self
                .probes
                .iter()
                .copied()
                .find(|&p| f.eval(p) != g.eval(p))
                .unwrap_or(0),
            Reflect2::LastDifferingProbe => self
                .probes
                .iter()
                .copied()
                .rfind(|&p| f.eval(p) != g.eval(p))
                .unwrap_or(0),
            Reflect2::Const(n) => n,
        })
    }

    /// The loosest valid uniform modulus for a probe program.
    pub fn natural_modulus(&self) -> u64 {
        self.probes.iter().map(|&p| p + 1).max().unwrap_or(0)
    }
}

/// How a type-3 fixture reflects apartness of its type-2 arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reflect3 {
    /// Answer with the evaluation point itself.
    Probe1,
    /// Answer with the evaluation point extended by extra values from
    /// `from` upward — extensionally different data, equal behaviour as
    /// long as `from` is at least the arguments' moduli.
    Probe1Padded { from: u64, values: Vec<u64> },
}

/// A type-3 element: evaluates its type-2 argument at one fixed type-1
/// point, with a reflection map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fn3 {
    pub probe1: Fn1,
    pub reflect: Reflect3,
}

impl Fn3 {
    pub fn apply(&self, f: &Fn2) -> u64 {
        f.apply(&self.probe1)
    }

    /// A type-1 point separating `f` and `g`, given that the values differ.
    pub fn reflect_fn1(&self, _f: &Fn2, _g: &Fn2, _witness: u64) -> Fn1 {
        match &self.reflect {
            Reflect3::Probe1 => self.probe1.clone(),
            Reflect3::Probe1Padded { from, values } => {
                let mut table = self.probe1.table.clone();
                for (i, &val) in values.iter().enumerate() {
                    table.insert(from + i as u64, val);
                }
                Fn1 {
                    table,
                    default: self.probe1.default,
                }
            }
        }
    }
}

/// The type-0 witness: `0` when the values agree, otherwise the least point
/// where `f` and `g` differ, bounded by the reflector's answer. The result
/// depends only on `f` and `g`: any valid reflector yields the same output.
pub fn ce0_witness(phi: &Fn2, f: &Fn1, g: &Fn1) -> Result<u64, CeError> {
    if phi.apply(f) == phi.apply(g) {
        return Ok(0);
    }
    let y = phi.reflect_point(f, g, 0)?;
    if f.eval(y) == g.eval(y) {
        return Err(CeError::InvalidReflector {
            point: y,
            value: f.eval(y),
        });
    }
    // Beyond both tables only the defaults remain, so the least difference
    // sits at or below one past the largest key; the scan never has to walk
    // all the way to a distant reflector point.
    let beyond_tables = f
        .table
        .keys()
        .chain(g.table.keys())
        .copied()
        .max()
        .map_or(0, |k| k + 1);
    let hi = y.min(beyond_tables);
    Ok((0..=hi)
        .find(|&x| f.eval(x) != g.eval(x))
        .expect("y differs"))
}

// ---------------------------------------------------------------------------
// Object-language encodings and the generated witness term
// ---------------------------------------------------------------------------

/// `σ⁺` for `σ = N -> N`: the function paired with a reflection map.
pub fn one_plus_type() -> TypeExpr {
    translate_type(&TypeExpr::finite(1))
        .expect("finite type translates")
        .plus
}

/// `σ⁺` for `σ = (N -> N) -> N`.
pub fn two_plus_type() -> TypeExpr {
    translate_type(&TypeExpr::finite(2))
        .expect("finite type translates")
        .plus
}

/// The input type of [`ce0_term`]: `2⁺ × (1⁺ × 1⁺)`.
pub fn ce0_input_type() -> TypeExpr {
    TypeExpr::prod(
        two_plus_type(),
        TypeExpr::prod(one_plus_type(), one_plus_type()),
    )
}

/// Encode a type-1 fixture as a closed term of type `1⁺`: the graph
/// compiled to nested equality guards with an explicit default, paired with
/// the constant-zero reflection map (witnesses at `N` carry no content).
pub fn encode_fn1(f: &Fn1) -> Term {
    let d = build_d();
    let x = tca::fresh_name("x");
    let mut body = Term::numeral(f.default);
    // Later guards are tested first, so iterate high-to-low for readability.
    for (&k, &val) in f.table.iter().rev() {
        body = if_nat(
            &TypeExpr::Nat,
            Term::apps(d.clone(), [v(&x, TypeExpr::Nat), Term::numeral(k)]),
            Term::numeral(val),
            body,
        );
    }
    let graph = lam(&x, TypeExpr::Nat, body);
    let a = tca::fresh_name("a");
    let b = tca::fresh_name("b");
    let w = tca::fresh_name("w");
    let reflect = lam(
        &a,
        TypeExpr::Nat,
        lam(&b, TypeExpr::Nat, lam(&w, TypeExpr::Nat, Term::numeral(0))),
    );
    let one = one_plus_type();
    let (fwd, refl) = match &one {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    compile(&pair2(&fwd, &refl, graph, reflect)).expect("fn1 encoding compiles")
}

/// Encode a type-2 fixture as a closed term of type `2⁺`: the probe program
/// over the graph component of its argument, paired with the guard-compiled
/// reflection map.
pub fn encode_fn2(phi: &Fn2) -> Result<Term, CeError> {
    let reflect_spec = phi.reflect.ok_or(CeError::MissingReflector)?;
    let one = one_plus_type();
    let (fwd1, refl1) = match &one {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let d = build_d();
    let h = tca::fresh_name("h");
    let graph_of = |t: Term| fst_at(&fwd1, &refl1, t);
    let probe_vals: Vec<Term> = phi
        .probes
        .iter()
        .map(|&p| Term::app(graph_of(v(&h, one.clone())), Term::numeral(p)))
        .collect();
    let value = match phi.program {
        Fn2Program::ValueAt(i) => probe_vals
            .get(i)
            .cloned()
            .unwrap_or_else(|| Term::numeral(0)),
        Fn2Program::Sum => probe_vals
            .clone()
            .into_iter()
            .reduce(add)
            .unwrap_or_else(|| Term::numeral(0)),
        Fn2Program::Max => probe_vals
            .clone()
            .into_iter()
            .reduce(monus_max)
            .unwrap_or_else(|| Term::numeral(0)),
    };
    let apply_term = lam(&h, one.clone(), value);

    let fa = tca::fresh_name("f");
    let ga = tca::fresh_name("g");
    let w = tca::fresh_name("w");
    let point = match reflect_spec {
        Reflect2::Const(n) => Term::numeral(n),
        Reflect2::FirstDifferingProbe => {
            let mut acc = Term::numeral(0);
            for &p in phi.probes.iter().rev() {
                let fp = Term::app(graph_of(v(&fa, one.clone())), Term::numeral(p));
                let gp = Term::app(graph_of(v(&ga, one.clone())), Term::numeral(p));
                acc = if_nat(
                    &TypeExpr::Nat,
                    Term::apps(d.clone(), [fp, gp]),
                    acc,
                    Term::numeral(p),
                );
            }
            acc
        }
        Reflect2::LastDifferingProbe => {
            let mut acc = Term::numeral(0);
            for &p in &phi.probes {
                let fp = Term::app(graph_of(v(&fa, one.clone())), Term::numeral(p));
                let gp = Term::app(graph_of(v(&ga, one.clone())), Term::numeral(p));
                acc = if_nat(
                    &TypeExpr::Nat,
                    Term::apps(d.clone(), [fp, gp]),
                    acc,
                    Term::numeral(p),
                );
            }
            acc
        }
    };
    let reflect_term = lam(
        &fa,
        one.clone(),
        lam(
            &ga,
            one.clone(),
            lam(
                &w,
                TypeExpr::Nat,
                pair2(&TypeExpr::Nat, &TypeExpr::Nat, point, Term::numeral(0)),
            ),
        ),
    );
    let two = two_plus_type();
    let (fwd2, refl2) = match &two {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    Ok(compile(&pair2(&fwd2, &refl2, apply_term, reflect_term))?)
}

/// `max a b = a + (b ∸ a)`.
fn monus_max(a: Term, b: Term) -> Term {
    add(a.clone(), monus(b, a))
}

/// The witness-extraction body `V(Φ, f, g)` over open subterms of type
/// `2⁺`, `1⁺`, `1⁺`: equal values give `0`, otherwise the bounded least
/// difference below the reflector's point.
fn value_body(phi: Term, f: Term, g: Term) -> Term {
    let d = build_d();
    let one = one_plus_type();
    let two = two_plus_type();
    let (fwd2, refl2) = match &two {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let (fwd1, refl1) = match &one {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let phi_val = |t: Term| Term::app(fst_at(&fwd2, &refl2, phi.clone()), t);
    let x = tca::fresh_name("x");
    let differs = lam(
        &x,
        TypeExpr::Nat,
        iszero(Term::apps(
            d.clone(),
            [
                Term::app(fst_at(&fwd1, &refl1, f.clone()), v(&x, TypeExpr::Nat)),
                Term::app(fst_at(&fwd1, &refl1, g.clone()), v(&x, TypeExpr::Nat)),
            ],
        )),
    );
    let bound = fst_at(
        &TypeExpr::Nat,
        &TypeExpr::Nat,
        Term::apps(
            snd_at(&fwd2, &refl2, phi.clone()),
            [f.clone(), g.clone(), Term::numeral(0)],
        ),
    );
    if_nat(
        &TypeExpr::Nat,
        Term::apps(d, [phi_val(f), phi_val(g)]),
        Term::numeral(0),
        bounded_min_term(&differs, &bound),
    )
}

/// The closed object-language witness extractor of type
/// `2⁺ × (1⁺ × 1⁺) -> N`. Applied to encoded fixtures it normalizes to the
/// numeral [`ce0_witness`] computes.
pub fn ce0_term() -> Term {
    let input = ce0_input_type();
    let one = one_plus_type();
    let two = two_plus_type();
    let pair1 = TypeExpr::prod(one.clone(), one.clone());
    let w = tca::fresh_name("w");
    let phi = fst_at(&two, &pair1, v(&w, input.clone()));
    let f = fst_at(&one, &one, snd_at(&two, &pair1, v(&w, input.clone())));
    let g = snd_at(&one, &one, snd_at(&two, &pair1, v(&w, input.clone())));
    let body = value_body(phi, f, g);
    compile(&lam(&w, input, body)).expect("ce0 term compiles")
}

/// Apply [`ce0_term`]-style extraction to encoded fixtures and read back
/// the numeral. The extractor and the encodings are already elaborated
/// closed terms, so reduction runs directly.
pub fn ce0_term_run(term: &Term, phi: &Fn2, f: &Fn1, g: &Fn1) -> Result<u64, CeError> {
    let one = one_plus_type();
    let two = two_plus_type();
    let pair1 = TypeExpr::prod(one.clone(), one.clone());
    let arg = pair2(
        &two,
        &pair1,
        encode_fn2(phi)?,
        pair2(&one, &one, encode_fn1(f), encode_fn1(g)),
    );
    let applied =
        crate::kernel::normalize_unchecked(&std::sync::Arc::new(Term::app(term.clone(), arg)));
    applied
        .as_numeral()
        .ok_or_else(|| CeError::Tca(TcaError::NonNumeral(applied.to_string())))
}

// ---------------------------------------------------------------------------
// The premorphism packaging the type-0 extraction
// ---------------------------------------------------------------------------

/// `σ = 2 -> 1 -> 1 -> 0`, the type of the extractor inside the model.
pub fn sigma_type() -> TypeExpr {
    TypeExpr::arrow(
        TypeExpr::finite(2),
        TypeExpr::arrow(
            TypeExpr::finite(1),
            TypeExpr::arrow(TypeExpr::finite(1), TypeExpr::Nat),
        ),
    )
}

/// The input apartness type of the extraction premorphism: `2 × (1 × 1)`.
pub fn ce0_domain_type() -> TypeExpr {
    TypeExpr::prod(
        TypeExpr::finite(2),
        TypeExpr::prod(TypeExpr::finite(1), TypeExpr::finite(1)),
    )
}

/// The tuple type `2 × (1 × (1 × σ))` the premorphism lands its second
/// component in.
pub fn ce0_tuple_type() -> TypeExpr {
    TypeExpr::prod(
        TypeExpr::finite(2),
        TypeExpr::prod(
            TypeExpr::finite(1),
            TypeExpr::prod(TypeExpr::finite(1), sigma_type()),
        ),
    )
}

/// The output apartness type: premorphism pairs on the tuple type times the
/// tuple type itself, `(q -> q) × q`.
pub fn ce0_codomain_type() -> TypeExpr {
    let q = ce0_tuple_type();
    TypeExpr::prod(TypeExpr::arrow(q.clone(), q.clone()), q)
}

/// The extraction algorithm as an element of `σ⁺`: the value map is
/// `V(Φ,f,g)` and every reflection component is genuine — differences of
/// extraction values are traced back to differing points of the arguments,
/// using the argument functional's own reflection map where the values of
/// `Φ` differ and the minimum of the two extraction values where they
/// agree.
pub fn extraction_element() -> Term {
    let one = one_plus_type();
    let two = two_plus_type();
    let (fwd2, refl2) = match &two {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let d = build_d();
    let phi = tca::fresh_name("phi");
    let f = tca::fresh_name("f");
    let g = tca::fresh_name("g");
    let vphi = || v(&phi, two.clone());
    let vf = || v(&f, one.clone());
    let vg = || v(&g, one.clone());
    let phi_val = |t: Term| Term::app(fst_at(&fwd2, &refl2, vphi()), t);
    let phi_reflect =
        |a: Term, b: Term| Term::apps(snd_at(&fwd2, &refl2, vphi()), [a, b, Term::numeral(0)]);
    let one_minus = TypeExpr::prod(TypeExpr::Nat, TypeExpr::Nat);

    // r3 : 1⁺ -> 1⁺ -> 0⁻ -> 1⁻, in scope of Φ and f.
    let g0 = tca::fresh_name("g0");
    let g1 = tca::fresh_name("g1");
    let w = tca::fresh_name("w");
    let r3 = lam(
        &g0,
        one.clone(),
        lam(
            &g1,
            one.clone(),
            lam(&w, TypeExpr::Nat, {
                let min_branch = pair2(
                    &TypeExpr::Nat,
                    &TypeExpr::Nat,
                    min_nat(
                        value_body(vphi(), vf(), v(&g0, one.clone())),
                        value_body(vphi(), vf(), v(&g1, one.clone())),
                    ),
                    Term::numeral(0),
                );
                if_nat(
                    &one_minus,
                    Term::apps(
                        d.clone(),
                        [phi_val(v(&g0, one.clone())), phi_val(v(&g1, one.clone()))],
                    ),
                    min_branch,
                    phi_reflect(v(&g0, one.clone()), v(&g1, one.clone())),
                )
            }),
        ),
    );

    // r2 : 1⁺ -> 1⁺ -> (1 -> 0)⁻ -> 1⁻, in scope of Φ.
    let f0 = tca::fresh_name("f0");
    let f1 = tca::fresh_name("f1");
    let w2 = tca::fresh_name("w");
    let one_to_zero_minus = TypeExpr::prod(one.clone(), TypeExpr::Nat);
    let r2 = lam(
        &f0,
        one.clone(),
        lam(
            &f1,
            one.clone(),
            lam(&w2, one_to_zero_minus.clone(), {
                let ghat = fst_at(&one, &TypeExpr::Nat, v(&w2, one_to_zero_minus.clone()));
                let min_branch = pair2(
                    &TypeExpr::Nat,
                    &TypeExpr::Nat,
                    min_nat(
                        value_body(vphi(), v(&f0, one.clone()), ghat.clone()),
                        value_body(vphi(), v(&f1, one.clone()), ghat),
                    ),
                    Term::numeral(0),
                );
                if_nat(
                    &one_minus,
                    Term::apps(
                        d.clone(),
                        [phi_val(v(&f0, one.clone())), phi_val(v(&f1, one.clone()))],
                    ),
                    min_branch,
                    phi_reflect(v(&f0, one.clone()), v(&f1, one.clone())),
                )
            }),
        ),
    );

    // r1 : 2⁺ -> 2⁺ -> (1 -> 1 -> 0)⁻ -> 2⁻.
    let p0 = tca::fresh_name("p0");
    let p1 = tca::fresh_name("p1");
    let w1 = tca::fresh_name("w");
    let inner_minus = TypeExpr::prod(one.clone(), one_to_zero_minus.clone());
    let two_minus = TypeExpr::prod(one.clone(), TypeExpr::Nat);
    let r1 = lam(
        &p0,
        two.clone(),
        lam(
            &p1,
            two.clone(),
            lam(&w1, inner_minus.clone(), {
                let fhat = fst_at(&one, &one_to_zero_minus, v(&w1, inner_minus.clone()));
                let ghat = fst_at(
                    &one,
                    &TypeExpr::Nat,
                    snd_at(&one, &one_to_zero_minus, v(&w1, inner_minus.clone())),
                );
                let val = |p: &str, t: Term| Term::app(fst_at(&fwd2, &refl2, v(p, two.clone())), t);
                if_nat(
                    &two_minus,
                    Term::apps(d.clone(), [val(&p0, fhat.clone()), val(&p1, fhat.clone())]),
                    pair2(&one, &TypeExpr::Nat, ghat, Term::numeral(0)),
                    pair2(&one, &TypeExpr::Nat, fhat, Term::numeral(0)),
                )
            }),
        ),
    );

    // Assemble σ⁺ = pair (λΦ. pair (λf. pair (λg. V) r3) r2) r1, reading
    // the component types off the translation.
    let sigma_plus = translate_type(&sigma_type()).expect("σ translates").plus;
    let (lvl1_fwd, lvl1_refl) = match &sigma_plus {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let lvl2 = match &lvl1_fwd {
        TypeExpr::Arrow(_, cod) => (**cod).clone(),
        _ => unreachable!(),
    };
    let (lvl2_fwd, lvl2_refl) = match &lvl2 {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let lvl3 = match &lvl2_fwd {
        TypeExpr::Arrow(_, cod) => (**cod).clone(),
        _ => unreachable!(),
    };
    let (lvl3_fwd, lvl3_refl) = match &lvl3 {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let inner = lam(&g, one.clone(), value_body(vphi(), vf(), vg()));
    let level3 = pair2(&lvl3_fwd, &lvl3_refl, inner, r3);
    let level2 = pair2(&lvl2_fwd, &lvl2_refl, lam(&f, one.clone(), level3), r2);
    let level1 = pair2(&lvl1_fwd, &lvl1_refl, lam(&phi, two.clone(), level2), r1);
    compile(&level1).expect("extraction element compiles")
}

/// A junk value of the input witness type `(2 × (1 × 1))⁻`, used in the
/// vacuous branches of the reflection map (identical components can never
/// be apart, so those branches are never exercised by a genuine witness).
fn junk_input_witness() -> Term {
    let one = one_plus_type();
    let one_minus = TypeExpr::prod(TypeExpr::Nat, TypeExpr::Nat);
    let two_minus = TypeExpr::prod(one.clone(), TypeExpr::Nat);
    let const_fn = {
        let x = tca::fresh_name("x");
        lam(&x, TypeExpr::Nat, Term::numeral(0))
    };
    let trivial_reflect = {
        let a = tca::fresh_name("a");
        let b = tca::fresh_name("b");
        let w = tca::fresh_name("w");
        lam(
            &a,
            TypeExpr::Nat,
            lam(&b, TypeExpr::Nat, lam(&w, TypeExpr::Nat, Term::numeral(0))),
        )
    };
    let (fwd1, refl1) = match &one {
        TypeExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let enriched = pair2(&fwd1, &refl1, const_fn, trivial_reflect);
    let two_w = pair2(&one, &TypeExpr::Nat, enriched, Term::numeral(0));
    let pair_minus = TypeExpr::sum(one_minus.clone(), one_minus.clone());
    inl_at(&two_minus, &pair_minus, two_w)
}

/// The premorphism packaging the extraction: the forward map sends an
/// enriched triple `(Φ,f,g)` to the identity premorphism on the tuple type
/// paired with the tuple `(Φ,f,g,X)` where `X` is the constant
/// [`extraction_element`]; the reflection map sends witnesses on the first
/// three tuple components straight back and fills the vacuous branches
/// (identity-vs-identity and X-vs-X) with junk.
pub fn ce0_premorphism() -> Result<Premorphism, CeError> {
    let dom_src = ce0_domain_type();
    let tuple_src = ce0_tuple_type();
    let dom_tr = translate_type(&dom_src)?;
    let tuple_tr = translate_type(&tuple_src)?;
    let q_plus = tuple_tr.plus.clone();
    let q_minus = tuple_tr.minus.clone();
    let one = one_plus_type();
    let two = two_plus_type();
    let pair1 = TypeExpr::prod(one.clone(), one.clone());

    // Forward: λi. pair (pair id (λx y n. n)) (Φ, f, g, X).
    let i = tca::fresh_name("i");
    let id_reflect = {
        let x = tca::fresh_name("x");
        let y = tca::fresh_name("y");
        let n = tca::fresh_name("n");
        lam(
            &x,
            q_plus.clone(),
            lam(
                &y,
                q_plus.clone(),
                lam(&n, q_minus.clone(), v(&n, q_minus.clone())),
            ),
        )
    };
    let id_premorphism = pair2(
        &TypeExpr::arrow(q_plus.clone(), q_plus.clone()),
        &TypeExpr::arrow(
            q_plus.clone(),
            TypeExpr::arrow(
                q_plus.clone(),
                TypeExpr::arrow(q_minus.clone(), q_minus.clone()),
            ),
        ),
        identity(&q_plus),
        id_reflect,
    );
    let sigma_plus = translate_type(&sigma_type())?.plus;
    let phi_part = fst_at(&two, &pair1, v(&i, dom_tr.plus.clone()));
    let f_part = fst_at(&one, &one, snd_at(&two, &pair1, v(&i, dom_tr.plus.clone())));
    let g_part = snd_at(&one, &one, snd_at(&two, &pair1, v(&i, dom_tr.plus.clone())));
    let inner2 = TypeExpr::prod(one.clone(), sigma_plus.clone());
    let inner1 = TypeExpr::prod(one.clone(), inner2.clone());
    let tuple = pair2(
        &two,
        &inner1,
        phi_part,
        pair2(
            &one,
            &inner2,
            f_part,
            pair2(&one, &sigma_plus, g_part, extraction_element()),
        ),
    );
    let e_plus = match &translate_type(&ce0_codomain_type())?.plus {
        TypeExpr::Prod(l, _) => (**l).clone(),
        _ => unreachable!(),
    };
    let forward = compile(&lam(
        &i,
        dom_tr.plus.clone(),
        pair2(&e_plus, &q_plus, id_premorphism, tuple),
    ))?;

    // Reflection: case on the output witness.
    let i0 = tca::fresh_name("i0");
    let i1 = tca::fresh_name("i1");
    let m = tca::fresh_name("m");
    let out_minus = translate_type(&ce0_codomain_type())?.minus;
    let (e_minus, q_minus2) = match &out_minus {
        TypeExpr::Sum(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    debug_assert_eq!(q_minus, q_minus2);
    // q⁻ = 2⁻ + (1⁻ + (1⁻ + σ⁻)).
    let (two_m, rest1) = match &q_minus {
        TypeExpr::Sum(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let (one_m_a, rest2) = match &rest1 {
        TypeExpr::Sum(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let (one_m_b, sigma_m) = match &rest2 {
        TypeExpr::Sum(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let in_minus = dom_tr.minus.clone();
    let (in_two_m, in_rest) = match &in_minus {
        TypeExpr::Sum(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    // Witnesses on the tuple part dispatch on the component they speak
    // about: Φ, f and g witnesses go straight back, extractor witnesses are
    // vacuous (the same closed element can never be apart from itself).
    let tuple_dispatch = |scrut: Term| -> Term {
        let w2 = tca::fresh_name("w");
        let wa = tca::fresh_name("w");
        let wb = tca::fresh_name("w");
        let ws = tca::fresh_name("w");
        let n1 = tca::fresh_name("n");
        let n2 = tca::fresh_name("n");
        case_at(
            &two_m,
            &rest1,
            &in_minus,
            lam(
                &w2,
                two_m.clone(),
                inl_at(&in_two_m, &in_rest, v(&w2, two_m.clone())),
            ),
            lam(
                &n1,
                rest1.clone(),
                case_at(
                    &one_m_a,
                    &rest2,
                    &in_minus,
                    lam(
                        &wa,
                        one_m_a.clone(),
                        inr_at(
                            &in_two_m,
                            &in_rest,
                            inl_at(&one_m_a, &one_m_b, v(&wa, one_m_a.clone())),
                        ),
                    ),
                    lam(
                        &n2,
                        rest2.clone(),
                        case_at(
                            &one_m_b,
                            &sigma_m,
                            &in_minus,
                            lam(
                                &wb,
                                one_m_b.clone(),
                                inr_at(
                                    &in_two_m,
                                    &in_rest,
                                    inr_at(&one_m_a, &one_m_b, v(&wb, one_m_b.clone())),
                                ),
                            ),
                            lam(&ws, sigma_m.clone(), junk_input_witness()),
                            v(&n2, rest2.clone()),
                        ),
                    ),
                    v(&n1, rest1.clone()),
                ),
            ),
            scrut,
        )
    };
    let we = tca::fresh_name("w");
    let n0 = tca::fresh_name("n");
    let reflect_body = case_at(
        &e_minus,
        &q_minus,
        &in_minus,
        // Identity-premorphism witnesses are never genuine.
        lam(&we, e_minus.clone(), junk_input_witness()),
        lam(
            &n0,
            q_minus.clone(),
            tuple_dispatch(v(&n0, q_minus.clone())),
        ),
        v(&m, out_minus.clone()),
    );
    let reflect = compile(&lam(
        &i0,
        dom_tr.plus.clone(),
        lam(
            &i1,
            dom_tr.plus.clone(),
            lam(&m, out_minus.clone(), reflect_body),
        ),
    ))?;
    Ok(Premorphism { forward, reflect })
}

// ---------------------------------------------------------------------------
// Sequence coding and the type-1 witness
// ---------------------------------------------------------------------------

/// Cantor pairing `π(a, b) = (a+b)(a+b+1)/2 + b`; `None` when the result
/// does not fit the word size (the encoding grows fast with sequence
/// length, so callers must not assume totality).
pub fn cantor_pair(a: u64, b: u64) -> Option<u64> {
    let s = a as u128 + b as u128;
    let n = s * (s + 1) / 2 + b as u128;
    u64::try_from(n).ok()
}

/// The inverse of [`cantor_pair`]; total on the word size.
pub fn cantor_unpair(n: u64) -> (u64, u64) {
    let n = n as u128;
    // Largest s with s(s+1)/2 <= n, found from a float guess and adjusted.
    let mut s = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u128;
    while (s + 1) * (s + 2) / 2 <= n {
        s += 1;
    }
    while s * (s + 1) / 2 > n {
        s -= 1;
    }
    let b = n - s * (s + 1) / 2;
    ((s - b) as u64, b as u64)
}

/// The fixed bijection between naturals and finite sequences:
/// `0` is the empty sequence and `n + 1` is `cons(a, decode(b))` where
/// `(a, b)` is the Cantor unpairing of `n`.
pub fn h_decode(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = n;
    while n > 0 {
        let (a, b) = cantor_unpair(n - 1);
        out.push(a);
        n = b;
    }
    out
}

/// Inverse of [`h_decode`]; `None` when the index does not fit the word
/// size.
pub fn h_encode(s: &[u64]) -> Option<u64> {
    let mut n = 0u64;
    for &a in s.iter().rev() {
        n = cantor_pair(a, n)?.checked_add(1)?;
    }
    Some(n)
}

/// Pad a finite sequence into a total type-1 element: the sequence values
/// in place, `0` beyond.
pub fn pad_sequence(s: &[u64]) -> Fn1 {
    let table = s.iter().enumerate().map(|(i, &v)| (i as u64, v)).collect();
    Fn1 { table, default: 0 }
}

/// The type-1 witness: the constant zero function when the type-3 values
/// agree, otherwise the first padded sequence (in `h` order) on which the
/// two type-2 arguments differ. The reflector and the supplied modulus only
/// certify termination: a sequence of length `max(M f b, M g b)` matching
/// the reflector's point `b` must separate the arguments, so the search
/// never passes its index.
pub fn ce1_witness(
    phi: &Fn3,
    f: &Fn2,
    g: &Fn2,
    modulus: &dyn Fn(&Fn2, &Fn1) -> u64,
) -> Result<Fn1, CeError> {
    if phi.apply(f) == phi.apply(g) {
        return Ok(Fn1::constant(0));
    }
    let b = phi.reflect_fn1(f, g, 0);
    if f.apply(&b) == g.apply(&b) {
        return Err(CeError::InvalidReflectorFn);
    }
    let mf = modulus(f, &b);
    let mg = modulus(g, &b);
    if f.apply(&b.truncated(mf)) != f.apply(&b) {
        return Err(CeError::InvalidModulus {
            side: "f",
            bound: mf,
        });
    }
    if g.apply(&b.truncated(mg)) != g.apply(&b) {
        return Err(CeError::InvalidModulus {
            side: "g",
            bound: mg,
        });
    }
    let len = mf.max(mg);
    let prefix: Vec<u64> = (0..len).map(|i| b.eval(i)).collect();
    let certificate = h_encode(&prefix).ok_or(CeError::CertificateOverflow)?;
    for n in 0..=certificate {
        let s = h_decode(n);
        let padded = pad_sequence(&s);
        if f.apply(&padded) != g.apply(&padded) {
            return Ok(padded);
        }
    }
    Err(CeError::CertificateExceeded { certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::infer_type;

    fn fn1(entries: &[(u64, u64)], default: u64) -> Fn1 {
        Fn1::new(entries.iter().copied().collect(), default)
    }

    #[test]
    fn ce0_examples() {
        // Φ evaluates at 2 and reflects with the probe itself; the identity
        // and successor tables differ already at 0.
        let phi = Fn2::eval_at(2);
        let f = fn1(&[(0, 0), (1, 1), (2, 2)], 0);
        let g = fn1(&[(0, 1), (1, 2), (2, 3)], 1);
        assert_eq!(ce0_witness(&phi, &f, &g).unwrap(), 0);
        // Equal arguments give zero without consulting the reflector.
        assert_eq!(ce0_witness(&phi, &f, &f).unwrap(), 0);
        // A different (still valid) constant reflector leaves the output
        // unchanged: the least differing index is reflector-independent.
        let mut phi7 = phi.clone();
        phi7.reflect = Some(Reflect2::Const(7));
        assert_eq!(ce0_witness(&phi7, &f, &g).unwrap(), 0);
    }

    #[test]
    fn ce0_reports_invalid_reflectors() {
        let mut phi = Fn2::eval_at(2);
        phi.reflect = Some(Reflect2::Const(5));
        // f and g agree at 5 but differ at 2, so Φf ≠ Φg with a bad bound.
        let f = fn1(&[(2, 1)], 0);
        let g = fn1(&[(2, 2)], 0);
        assert!(matches!(
            ce0_witness(&phi, &f, &g),
            Err(CeError::InvalidReflector { point: 5, .. })
        ));
    }

    #[test]
    fn ce0_term_has_the_translated_type() {
        let t = ce0_term();
        let ty = infer_type(&t).unwrap();
        assert_eq!(ty, TypeExpr::arrow(ce0_input_type(), TypeExpr::Nat));
    }

    #[test]
    fn ce0_term_agrees_with_the_native_witness() {
        let t = ce0_term();
        let phi = Fn2::eval_at(2);
        let f = fn1(&[(0, 0), (1, 1), (2, 2)], 0);
        let g = fn1(&[(0, 1), (1, 2), (2, 3)], 1);
        assert_eq!(ce0_term_run(&t, &phi, &f, &g).unwrap(), 0);
        assert_eq!(ce0_term_run(&t, &phi, &f, &f).unwrap(), 0);
        // Reflector bound 5 with the first difference at 3.
        let mut phi5 = phi.clone();
        phi5.reflect = Some(Reflect2::Const(5));
        let f2 = fn1(&[(3, 1), (5, 7)], 0);
        let g2 = fn1(&[(3, 2), (5, 9)], 0);
        // Φ values: f2(2)=0, g2(2)=0 — make them differ at the probe.
        let f2 = Fn1 {
            table: f2
                .table
                .iter()
                .map(|(&k, &v)| (k, v))
                .chain([(2, 1)])
                .collect(),
            default: 0,
        };
        let g2 = Fn1 {
            table: g2
                .table
                .iter()
                .map(|(&k, &v)| (k, v))
                .chain([(2, 4)])
                .collect(),
            default: 0,
        };
        assert_eq!(ce0_witness(&phi5, &f2, &g2).unwrap(), 2);
        assert_eq!(ce0_term_run(&t, &phi5, &f2, &g2).unwrap(), 2);
        // With the difference strictly after the probe, but a valid const
        // reflector at 5: least difference is 3.
        let f3 = fn1(&[(3, 1), (5, 7), (2, 2)], 0);
        let g3 = fn1(&[(3, 2), (5, 9), (2, 2)], 0);
        let phi_sum = Fn2 {
            probes: vec![2, 3, 5],
            program: Fn2Program::Sum,
            reflect: Some(Reflect2::Const(5)),
            modulus: Some(6),
        };
        assert_eq!(ce0_witness(&phi_sum, &f3, &g3).unwrap(), 3);
        assert_eq!(ce0_term_run(&t, &phi_sum, &f3, &g3).unwrap(), 3);
    }

    #[test]
    fn extraction_element_has_type_sigma_plus() {
        let x = extraction_element();
        let ty = infer_type(&x).unwrap();
        assert_eq!(ty, translate_type(&sigma_type()).unwrap().plus);
    }

    #[test]
    fn sequence_bijection_round_trips() {
        assert_eq!(h_decode(0), Vec::<u64>::new());
        assert_eq!(h_decode(1), vec![0]);
        for n in 0..10_000u64 {
            assert_eq!(h_encode(&h_decode(n)), Some(n));
        }
    }

    #[test]
    fn first_sequences_in_h_order() {
        let want: Vec<Vec<u64>> = vec![
            vec![],
            vec![0],
            vec![1],
            vec![0, 0],
            vec![2],
            vec![1, 0],
            vec![0, 1],
            vec![3],
            vec![2, 0],
            vec![1, 1],
            vec![0, 0, 0],
        ];
        for (n, s) in want.iter().enumerate() {
            assert_eq!(&h_decode(n as u64), s, "index {n}");
        }
    }

    #[test]
    fn padding_examples() {
        let s = pad_sequence(&[5, 7]);
        assert_eq!(s.eval(0), 5);
        assert_eq!(s.eval(1), 7);
        assert_eq!(s.eval(9), 0);
        let empty = pad_sequence(&[]);
        assert_eq!(empty.eval(3), 0);
        // Padding with explicit zeros is extensionally the same.
        let z = pad_sequence(&[0, 0]);
        for i in 0..5 {
            assert_eq!(z.eval(i), empty.eval(i));
        }
    }

    #[test]
    fn ce1_finds_the_first_separating_sequence() {
        // Φ(F) = F(identity); f(x) = x(0), g(x) = x(1); moduli 1 and 2.
        let phi = Fn3 {
            probe1: fn1(&[(0, 0), (1, 1), (2, 2), (3, 3)], 0),
            reflect: Reflect3::Probe1,
        };
        let f = Fn2 {
            probes: vec![0],
            program: Fn2Program::ValueAt(0),
            reflect: None,
            modulus: Some(1),
        };
        let g = Fn2 {
            probes: vec![1],
            program: Fn2Program::ValueAt(0),
            reflect: None,
            modulus: Some(2),
        };
        let modulus = |h: &Fn2, _: &Fn1| h.modulus.unwrap();
        let w = ce1_witness(&phi, &f, &g, &modulus).unwrap();
        // The first separating sequence in h order is ⟨1⟩.
        assert_eq!(w.eval(0), 1);
        for i in 1..6 {
            assert_eq!(w.eval(i), 0);
        }
        // Equal arguments: the constant zero function.
        let w0 = ce1_witness(&phi, &f, &f, &modulus).unwrap();
        for i in 0..6 {
            assert_eq!(w0.eval(i), 0);
        }
        // A different valid reflector (padded beyond both moduli) leaves
        // the output unchanged.
        let phi_alt = Fn3 {
            probe1: phi.probe1.clone(),
            reflect: Reflect3::Probe1Padded {
                from: 2,
                values: vec![9, 9],
            },
        };
        let w_alt = ce1_witness(&phi_alt, &f, &g, &modulus).unwrap();
        assert_eq!(w_alt, w);
    }

    #[test]
    fn ce1_reports_invalid_moduli() {
        let phi = Fn3 {
            probe1: fn1(&[(0, 0), (1, 1), (2, 2)], 0),
            reflect: Reflect3::Probe1,
        };
        let f = Fn2 {
            probes: vec![2],
            program: Fn2Program::ValueAt(0),
            reflect: None,
            modulus: None,
        };
        let g = Fn2 {
            probes: vec![0],
            program: Fn2Program::ValueAt(0),
            reflect: None,
            modulus: None,
        };
        // Declaring modulus 1 for f is wrong: it reads point 2.
        let modulus = |h: &Fn2, _: &Fn1| if h == &f { 1 } else { 1 };
        assert!(matches!(
            ce1_witness(&phi, &f, &g, &modulus),
            Err(CeError::InvalidModulus { side: "f", .. })
        ));
    }
}
