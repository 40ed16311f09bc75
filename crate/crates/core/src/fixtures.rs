//! JSON fixture formats.
//!
//! Two file shapes are consumed by the CLI and checked by the fuzz targets:
//!
//! Witness-extraction fixtures (`ce0`, `ce1`):
//!
//! ```json
//! {
//!   "phi": {"probe": 2},
//!   "reflect": "first-differing-probe",
//!   "f": {"table": {"0": 0, "1": 1}, "default": 0},
//!   "g": {"table": {"0": 1}, "default": 1}
//! }
//! ```
//!
//! For `ce1`, `phi` carries `probe1` (a value list padded with zeros), `f`
//! and `g` are probe programs, and `modulus_f` / `modulus_g` declare the
//! moduli:
//!
//! ```json
//! {
//!   "phi": {"probe1": [0, 1, 2, 3]},
//!   "reflect": "probe1",
//!   "f": {"probe": 0},
//!   "g": {"probe": 1},
//!   "modulus_f": 1,
//!   "modulus_g": 2
//! }
//! ```
//!
//! Hyperdoctrine fixtures: named assemblies (`carrier`, `type`,
//! `realizers`), morphisms (`from`, `to`, `map`, `tracker`) and predicates
//! (`over`, `type`, `holds`, optional `support_witness`), with terms and
//! types in the surface grammar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assemblies::{
    beck_chevalley_check, exists_along, exists_transpose, exists_untranspose, forall_along,
    forall_transpose, forall_untranspose, leq_check, predicate_to_subobject, reindex,
    subobject_to_predicate, AsmMorphism, Assembly, AssemblyError, Predicate,
};
use crate::ce::{CeError, Fn1, Fn2, Fn2Program, Fn3, Reflect2, Reflect3};
use crate::kernel::{parse_term, parse_type, ParseError, Term, TypeExpr, Verdict};
use crate::tca::{identity, pair2, TcaError};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing field {0}")]
    Missing(&'static str),
    #[error("field {field}: {detail}")]
    Invalid { field: &'static str, detail: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Tca(#[from] TcaError),
    #[error(transparent)]
    Ce(#[from] CeError),
}

// ---------------------------------------------------------------------------
// Witness-extraction fixtures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CeFixtureFile {
    pub phi: PhiSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflect: Option<ReflectSpec>,
    pub f: FnSpec,
    pub g: FnSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus_f: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus_g: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<ProgramSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe1: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProgramSpec {
    Sum,
    Max,
    ValueAt(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ReflectSpec {
    Named(ReflectName),
    Const {
        #[serde(rename = "const")]
        value: u64,
    },
    Padded {
        padded_from: u64,
        padded_values: Vec<u64>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub enum ReflectName {
    #[serde(rename = "first-differing-probe")]
    FirstDifferingProbe,
    #[serde(rename = "last-differing-probe")]
    LastDifferingProbe,
    #[serde(rename = "probe1")]
    Probe1,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FnSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<ProgramSpec>,
}

pub fn parse_ce_fixture(text: &str) -> Result<CeFixtureFile, FixtureError> {
    Ok(serde_json::from_str(text)?)
}

fn fn1_of(spec: &FnSpec, field: &'static str) -> Result<Fn1, FixtureError> {
    let Some(table) = &spec.table else {
        return Err(FixtureError::Invalid {
            field,
            detail: "a type-1 element needs a `table` (and `default`)".into(),
        });
    };
    let mut out = BTreeMap::new();
    for (k, &v) in table {
        let key: u64 = k.parse().map_err(|_| FixtureError::Invalid {
            field,
            detail: format!("table key {k:?} is not a natural number"),
        })?;
        out.insert(key, v);
    }
    Ok(Fn1::new(out, spec.default.unwrap_or(0)))
}

fn fn2_of(
    spec: &FnSpec,
    reflect: Option<&ReflectSpec>,
    modulus: Option<u64>,
    field: &'static str,
) -> Result<Fn2, FixtureError> {
    let probes = match (&spec.probe, &spec.probes) {
        (Some(p), None) => vec![*p],
        (None, Some(ps)) => ps.clone(),
        _ => {
            return Err(FixtureError::Invalid {
                field,
                detail: "a type-2 element needs `probe` or `probes`".into(),
            })
        }
    };
    let program = match spec.program {
        Some(ProgramSpec::Sum) => Fn2Program::Sum,
        Some(ProgramSpec::Max) => Fn2Program::Max,
        Some(ProgramSpec::ValueAt(i)) => Fn2Program::ValueAt(i),
        None => Fn2Program::ValueAt(0),
    };
    let reflect = match reflect {
        None => None,
        Some(ReflectSpec::Named(ReflectName::FirstDifferingProbe)) => {
            Some(Reflect2::FirstDifferingProbe)
        }
        Some(ReflectSpec::Named(ReflectName::LastDifferingProbe)) => {
            Some(Reflect2::LastDifferingProbe)
        }
        Some(ReflectSpec::Const { value }) => Some(Reflect2::Const(*value)),
        Some(other) => {
            return Err(FixtureError::Invalid {
                field,
                detail: format!("{other:?} is not a type-2 reflection map"),
            })
        }
    };
    Ok(Fn2 {
        probes,
        program,
        reflect,
        modulus,
    })
}

fn phi2_of(file: &CeFixtureFile) -> Result<Fn2, FixtureError> {
    let spec = FnSpec {
        table: None,
        default: None,
        probe: file.phi.probe,
        probes: file.phi.probes.clone(),
        program: file.phi.program,
    };
    let reflect = file
        .reflect
        .clone()
        .unwrap_or(ReflectSpec::Named(ReflectName::FirstDifferingProbe));
    fn2_of(&spec, Some(&reflect), None, "phi")
}

/// Interpret a fixture file as a `ce0` instance: a type-2 `phi` (with its
/// reflection map) and two type-1 tables.
pub fn to_ce0(file: &CeFixtureFile) -> Result<(Fn2, Fn1, Fn1), FixtureError> {
    let phi = phi2_of(file)?;
    if phi.reflect.is_none() {
        return Err(FixtureError::Missing("reflect"));
    }
    let f = fn1_of(&file.f, "f")?;
    let g = fn1_of(&file.g, "g")?;
    Ok((phi, f, g))
}

/// Interpret a fixture file as a `ce1` instance: a type-3 `phi`, two
/// type-2 probe programs and their declared moduli.
pub fn to_ce1(file: &CeFixtureFile) -> Result<(Fn3, Fn2, Fn2, u64, u64), FixtureError> {
    let Some(probe1) = &file.phi.probe1 else {
        return Err(FixtureError::Missing("phi.probe1"));
    };
    let reflect = match &file.reflect {
        None | Some(ReflectSpec::Named(ReflectName::Probe1)) => Reflect3::Probe1,
        Some(ReflectSpec::Padded {
            padded_from,
            padded_values,
        }) => Reflect3::Probe1Padded {
            from: *padded_from,
            values: padded_values.clone(),
        },
        Some(other) => {
            return Err(FixtureError::Invalid {
                field: "reflect",
                detail: format!("{other:?} is not a type-3 reflection map"),
            })
        }
    };
    let phi = Fn3 {
        probe1: crate::ce::pad_sequence(probe1),
        reflect,
    };
    let mf = file.modulus_f.ok_or(FixtureError::Missing("modulus_f"))?;
    let mg = file.modulus_g.ok_or(FixtureError::Missing("modulus_g"))?;
    // The search materializes prefixes of this length; keep it sane.
    const MAX_MODULUS: u64 = 4096;
    for (name, m) in [("modulus_f", mf), ("modulus_g", mg)] {
        if m > MAX_MODULUS {
            return Err(FixtureError::Invalid {
                field: "modulus",
                detail: format!("{name} = {m} exceeds the supported bound {MAX_MODULUS}"),
            });
        }
    }
    let f = fn2_of(&file.f, None, Some(mf), "f")?;
    let g = fn2_of(&file.g, None, Some(mg), "g")?;
    for (side, h, m) in [("f", &f, mf), ("g", &g, mg)] {
        if h.natural_modulus() > m {
            return Err(FixtureError::Invalid {
                field: "modulus",
                detail: format!(
                    "{side} reads probe {} but declares modulus {m}",
                    h.natural_modulus() - 1
                ),
            });
        }
    }
    Ok((phi, f, g, mf, mg))
}

// ---------------------------------------------------------------------------
// Hyperdoctrine fixtures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperdoctrineFile {
    pub assemblies: BTreeMap<String, AssemblySpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub predicates: BTreeMap<String, PredicateSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblySpec {
    pub carrier: Vec<String>,
    #[serde(rename = "type")]
    pub realizer_type: String,
    pub realizers: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, String>,
    pub tracker: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateSpec {
    pub over: String,
    #[serde(rename = "type")]
    pub pred_type: String,
    #[serde(default)]
    pub holds: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_witness: Option<String>,
}

/// A fully resolved hyperdoctrine fixture.
#[derive(Debug, Clone)]
pub struct HyperdoctrineFixture {
    pub assemblies: BTreeMap<String, Assembly>,
    pub morphisms: BTreeMap<String, AsmMorphism>,
    pub predicates: BTreeMap<String, (String, Predicate)>,
}

pub fn parse_hyperdoctrine_fixture(text: &str) -> Result<HyperdoctrineFile, FixtureError> {
    Ok(serde_json::from_str(text)?)
}

/// Resolve the parsed file: parse all types and terms, build and validate
/// assemblies, morphisms and predicates.
pub fn resolve_hyperdoctrine(
    file: &HyperdoctrineFile,
) -> Result<HyperdoctrineFixture, FixtureError> {
    let mut assemblies = BTreeMap::new();
    for (name, spec) in &file.assemblies {
        let ty = parse_type(&spec.realizer_type)?;
        let mut points = Vec::new();
        for p in &spec.carrier {
            let terms = spec
                .realizers
                .get(p)
                .ok_or_else(|| FixtureError::UnknownName(p.clone()))?;
            let mut parsed = Vec::new();
            for t in terms {
                parsed.push(parse_term(t)?);
            }
            points.push((p.clone(), parsed));
        }
        assemblies.insert(name.clone(), Assembly::new(ty, points)?);
    }
    let mut morphisms = BTreeMap::new();
    for (name, spec) in &file.morphisms {
        let from = assemblies
            .get(&spec.from)
            .ok_or_else(|| FixtureError::UnknownName(spec.from.clone()))?;
        let to = assemblies
            .get(&spec.to)
            .ok_or_else(|| FixtureError::UnknownName(spec.to.clone()))?;
        let tracker = parse_term(&spec.tracker)?;
        morphisms.insert(
            name.clone(),
            AsmMorphism::new(from, to, spec.map.clone(), &tracker)?,
        );
    }
    let mut predicates = BTreeMap::new();
    for (name, spec) in &file.predicates {
        let over = assemblies
            .get(&spec.over)
            .ok_or_else(|| FixtureError::UnknownName(spec.over.clone()))?;
        let ty = parse_type(&spec.pred_type)?;
        let mut holds = BTreeMap::new();
        for (p, terms) in &spec.holds {
            let mut parsed = Vec::new();
            for t in terms {
                parsed.push(parse_term(t)?);
            }
            holds.insert(p.clone(), parsed);
        }
        let support = match &spec.support_witness {
            Some(s) => Some(parse_term(s)?),
            None => None,
        };
        predicates.insert(
            name.clone(),
            (
                spec.over.clone(),
                Predicate::explicit(over, ty, holds, support)?,
            ),
        );
    }
    Ok(HyperdoctrineFixture {
        assemblies,
        morphisms,
        predicates,
    })
}

/// Plain-text samples: one surface term per line; blank lines and `#`
/// comments are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<Term>, ParseError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_term(line)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The hyperdoctrine battery
// ---------------------------------------------------------------------------

/// Run the adjunction round trips, the Beck–Chevalley squares and the
/// predicate/subobject round trip over everything the fixture provides.
/// Returns one named verdict per executed check.
pub fn hyperdoctrine_battery(
    fx: &HyperdoctrineFixture,
) -> Result<Vec<(String, Verdict)>, FixtureError> {
    let mut out = Vec::new();
    for (mname, f) in &fx.morphisms {
        for (pname, (over, p)) in &fx.predicates {
            if fx.assemblies.get(over.as_str()) != Some(f.from_assembly()) {
                continue;
            }
            out.push((
                format!("exists-adjunction {mname}/{pname}"),
                exists_round_trip(f, p)?,
            ));
            out.push((
                format!("forall-adjunction {mname}/{pname}"),
                forall_round_trip(f, p)?,
            ));
        }
    }
    let morphs: Vec<(&String, &AsmMorphism)> = fx.morphisms.iter().collect();
    for (i, (hname, h)) in morphs.iter().enumerate() {
        for (kname, k) in morphs.iter().skip(i) {
            if h.to_assembly() != k.to_assembly() {
                continue;
            }
            for (qname, (over, q)) in &fx.predicates {
                if fx.assemblies.get(over.as_str()) != Some(k.from_assembly()) {
                    continue;
                }
                let (lr, rl) = beck_chevalley_check(h, k, q)?;
                let verdict = if lr.failed() {
                    lr
                } else if rl.failed() {
                    rl
                } else if lr.holds() && rl.holds() {
                    Verdict::Holds
                } else {
                    Verdict::Unknown("sampled".into())
                };
                out.push((format!("beck-chevalley {hname},{kname}/{qname}"), verdict));
            }
        }
    }
    for (pname, (_, p)) in &fx.predicates {
        out.push((
            format!("predicate-subobject round trip {pname}"),
            subobject_round_trip(p)?,
        ));
    }
    Ok(out)
}

/// Both directions of the `∃` adjunction, starting from the identity
/// witness on `∃_f P` and transforming it with the explicit terms.
pub fn exists_round_trip(f: &AsmMorphism, p: &Predicate) -> Result<Verdict, FixtureError> {
    let ex = exists_along(f, p)?;
    let g0 = identity(ex.pred_type());
    let first = leq_check(&ex, &ex, &g0)?;
    if first.failed() {
        return Ok(first);
    }
    let h = exists_transpose(&g0, p, &ex)?;
    let rx = reindex(f, &ex)?;
    let second = leq_check(p, &rx, &h)?;
    if second.failed() {
        return Ok(second);
    }
    let g1 = exists_untranspose(&h, p, &ex)?;
    Ok(leq_check(&ex, &ex, &g1)?)
}

/// Both directions of the `∀` adjunction: materialize `∀_f P` on canonical
/// candidates (point realizer paired with a constant function on a realizer
/// that works across the fiber, or the identity where the types allow it),
/// then round-trip the identity witness through the two explicit
/// transformations.
pub fn forall_round_trip(f: &AsmMorphism, p: &Predicate) -> Result<Verdict, FixtureError> {
    let all = forall_along(f, p)?;
    let b_ty = f.from_assembly().realizer_type().clone();
    let d_ty = p.pred_type().clone();
    let arrow = TypeExpr::arrow(b_ty.clone(), d_ty.clone());
    let mut consts: Vec<Term> = Vec::new();
    if b_ty == d_ty {
        consts.push(identity(&b_ty));
    }
    for pt in p.over().carrier() {
        if let Some(set) = p.enumerated(pt) {
            for t in set {
                let k = crate::tca::fresh_name("c");
                let constant = crate::tca::lam(&k, b_ty.clone(), t.clone());
                if !consts.contains(&constant) {
                    consts.push(constant);
                }
            }
        }
    }
    let to_assembly = f.to_assembly().clone();
    let all_x = all.materialize_with(|pt| {
        let mut out = Vec::new();
        if let Ok(rs) = to_assembly.realizers(pt) {
            for r in rs {
                for c in &consts {
                    out.push(pair2(
                        &to_assembly.realizer_type().clone(),
                        &arrow,
                        r.clone(),
                        c.clone(),
                    ));
                }
            }
        }
        out
    })?;
    let g0 = identity(all_x.pred_type());
    let first = leq_check(&all_x, &all, &g0)?;
    if first.failed() {
        return Ok(first);
    }
    let h = forall_transpose(&g0, f, &all_x, p)?;
    let rx = reindex(f, &all_x)?;
    let second = leq_check(&rx, p, &h)?;
    if second.failed() {
        return Ok(second);
    }
    let g1 = forall_untranspose(&h, f, &all_x, p)?;
    Ok(leq_check(&all_x, &all, &g1)?)
}

/// The two translations between explicit predicates and subobjects compose
/// to the identity up to mutual `≤`.
pub fn subobject_round_trip(p: &Predicate) -> Result<Verdict, FixtureError> {
    let (_, incl) = predicate_to_subobject(p)?;
    let back = subobject_to_predicate(&incl);
    let idw = identity(p.pred_type());
    let fwd = leq_check(p, &back, &idw)?;
    if fwd.failed() {
        return Ok(fwd);
    }
    Ok(leq_check(&back, p, &idw)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ce0_fixture_round_trips_through_json() {
        let text = r#"{
            "phi": {"probe": 2},
            "reflect": "first-differing-probe",
            "f": {"table": {"0": 0, "1": 1, "2": 2}, "default": 0},
            "g": {"table": {"0": 1, "1": 2, "2": 3}, "default": 1}
        }"#;
        let file = parse_ce_fixture(text).unwrap();
        let again: CeFixtureFile =
            serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(file, again);
        let (phi, f, g) = to_ce0(&file).unwrap();
        assert_eq!(crate::ce::ce0_witness(&phi, &f, &g).unwrap(), 0);
    }

    #[test]
    fn ce1_fixture_parses_with_moduli() {
        let text = r#"{
            "phi": {"probe1": [0, 1, 2, 3]},
            "reflect": "probe1",
            "f": {"probe": 0},
            "g": {"probe": 1},
            "modulus_f": 1,
            "modulus_g": 2
        }"#;
        let file = parse_ce_fixture(text).unwrap();
        let (phi, f, g, mf, mg) = to_ce1(&file).unwrap();
        let modulus = move |h: &Fn2, _: &Fn1| if h.probes == [0] { mf } else { mg };
        let w = crate::ce::ce1_witness(&phi, &f, &g, &modulus).unwrap();
        assert_eq!(w.eval(0), 1);
        assert_eq!(w.eval(1), 0);
    }

    #[test]
    fn ce1_rejects_an_undersized_declared_modulus() {
        let text = r#"{
            "phi": {"probe1": [0, 1]},
            "f": {"probe": 3},
            "g": {"probe": 0},
            "modulus_f": 1,
            "modulus_g": 1
        }"#;
        let file = parse_ce_fixture(text).unwrap();
        assert!(to_ce1(&file).is_err());
    }

    #[test]
    fn malformed_fixtures_are_rejected_not_crashing() {
        for bad in [
            "",
            "{}",
            r#"{"phi": {}, "f": {}, "g": {}}"#,
            r#"{"phi": {"probe": 1}, "f": {"probe": 1}, "g": {"table": {"x": 1}}}"#,
        ] {
            assert!(
                parse_ce_fixture(bad).map(|f| to_ce0(&f)).is_err() || {
                    let f = parse_ce_fixture(bad).unwrap();
                    to_ce0(&f).is_err()
                }
            );
        }
    }

    #[test]
    fn hyperdoctrine_fixture_resolves_and_passes_the_battery() {
        let text = r#"{
            "assemblies": {
                "X": {"carrier": ["a"], "type": "N", "realizers": {"a": ["9"]}},
                "Y": {"carrier": ["y0", "y1"], "type": "N",
                      "realizers": {"y0": ["0"], "y1": ["1"]}}
            },
            "morphisms": {
                "f": {"from": "Y", "to": "X",
                      "map": {"y0": "a", "y1": "a"}, "tracker": "fn n:N. 9"}
            },
            "predicates": {
                "P": {"over": "Y", "type": "N",
                      "holds": {"y0": ["0"], "y1": ["1"]},
                      "support_witness": "fn b:N. b"}
            }
        }"#;
        let file = parse_hyperdoctrine_fixture(text).unwrap();
        let fx = resolve_hyperdoctrine(&file).unwrap();
        let report = hyperdoctrine_battery(&fx).unwrap();
        assert!(!report.is_empty());
        for (name, verdict) in &report {
            assert!(verdict.passed(), "{name}: {verdict}");
        }
    }

    #[test]
    fn samples_files_skip_comments() {
        let terms = parse_samples("# comment\n\nsucc 0\npair 1 2\n").unwrap();
        assert_eq!(terms.len(), 2);
        assert!(parse_samples("not! a term").is_err());
    }
}
