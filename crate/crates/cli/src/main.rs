//! Command-line front end: evaluate and type terms, translate types,
//! extract converse-extensionality witnesses from fixtures, and run the
//! apartness / hyperdoctrine check batteries.
//!
//! Exit codes: 0 on success (all checks hold), 1 when a verification check
//! fails (reports carry the counterexamples verbatim), 2 on unreadable
//! files, malformed fixtures and parse or type errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use apart_core::apartness::{build_apartness_structure, check_axioms};
use apart_core::ce::{ce0_witness, ce1_witness, Fn1};
use apart_core::fixtures::{
    hyperdoctrine_battery, parse_ce_fixture, parse_hyperdoctrine_fixture, parse_samples,
    resolve_hyperdoctrine, to_ce0, to_ce1,
};
use apart_core::kernel::{infer_type, normalize, parse_term, parse_type};
use apart_core::sampling::{random_term, rng_from_seed, SamplePool};
use apart_core::tca::compile;
use apart_core::Verdict;

/// Fixed default seed so runs are reproducible without flags.
const DEFAULT_SEED: u64 = 0xA11CE;

#[derive(Parser)]
#[command(name = "apart", version, about = "typed combinatory algebras, apartness and witness extraction", long_about = None)]
struct Cli {
    /// Emit structured JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize a closed term and print its normal form.
    Eval { term: String },
    /// Infer and print the type of a term.
    Type { term: String },
    /// Print the enriched carrier type and the witness type of a type.
    Translate {
        #[arg(value_name = "TYPE")]
        ty: String,
    },
    /// Extract the type-0 witness from a fixture file.
    Ce0 {
        #[arg(long)]
        fixtures: PathBuf,
    },
    /// Extract the type-1 witness from a fixture file.
    Ce1 {
        #[arg(long)]
        fixtures: PathBuf,
    },
    /// Check the apartness axioms of a type on sampled data.
    CheckApartness {
        #[arg(value_name = "TYPE")]
        ty: String,
        /// Extra sample terms, one per line.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the adjunction/Beck–Chevalley/round-trip battery on a fixture.
    CheckHyperdoctrine {
        #[arg(long)]
        fixtures: PathBuf,
    },
}

/// Input problems exit with 2; failed verifications with 1.
enum Outcome {
    Ok(String),
    CheckFailed(String),
    BadInput(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Deep recursion over terms wants headroom; run the work on a thread
    // with a large stack.
    let out = std::thread::Builder::new()
        .stack_size(256 * 1024 * 1024)
        .spawn(move || run(cli))
        .expect("spawn worker")
        .join()
        .expect("worker panicked");
    match out {
        Outcome::Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Outcome::CheckFailed(report) => {
            println!("{report}");
            ExitCode::from(1)
        }
        Outcome::BadInput(report) => {
            eprintln!("{report}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match &cli.cmd {
        Cmd::Eval { term } => eval_cmd(term, cli.json),
        Cmd::Type { term } => type_cmd(term, cli.json),
        Cmd::Translate { ty } => translate_cmd(ty, cli.json),
        Cmd::Ce0 { fixtures } => ce0_cmd(fixtures, cli.json),
        Cmd::Ce1 { fixtures } => ce1_cmd(fixtures, cli.json),
        Cmd::CheckApartness { ty, samples, seed } => {
            check_apartness_cmd(ty, samples.as_deref(), *seed, cli.json)
        }
        Cmd::CheckHyperdoctrine { fixtures } => check_hyperdoctrine_cmd(fixtures, cli.json),
    }
}

fn eval_cmd(term: &str, as_json: bool) -> Outcome {
    let parsed = match parse_term(term) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let compiled = match compile(&parsed) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    match normalize(&compiled) {
        Ok(n) => {
            if as_json {
                Outcome::Ok(
                    json!({"verb": "eval", "input": term, "result": n.to_string()}).to_string(),
                )
            } else {
                Outcome::Ok(n.to_string())
            }
        }
        Err(e) => Outcome::BadInput(e.to_string()),
    }
}

fn type_cmd(term: &str, as_json: bool) -> Outcome {
    let parsed = match parse_term(term) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    match infer_type(&parsed) {
        Ok(ty) => {
            if as_json {
                Outcome::Ok(
                    json!({"verb": "type", "input": term, "result": ty.to_string()}).to_string(),
                )
            } else {
                Outcome::Ok(ty.to_string())
            }
        }
        Err(e) => Outcome::BadInput(e.to_string()),
    }
}

fn translate_cmd(ty: &str, as_json: bool) -> Outcome {
    let parsed = match parse_type(ty) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    match apart_core::apartness::translate_type(&parsed) {
        Ok(tr) => {
            if as_json {
                Outcome::Ok(
                    json!({
                        "verb": "translate",
                        "input": ty,
                        "plus": tr.plus.to_string(),
                        "minus": tr.minus.to_string(),
                    })
                    .to_string(),
                )
            } else {
                Outcome::Ok(format!("{}\n{}", tr.plus, tr.minus))
            }
        }
        Err(e) => Outcome::BadInput(e.to_string()),
    }
}

fn fn1_json(f: &Fn1) -> serde_json::Value {
    let table: BTreeMap<String, u64> = f.table.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    json!({"table": table, "default": f.default})
}

fn ce0_cmd(path: &PathBuf, as_json: bool) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(format!("cannot read {}: {e}", path.display())),
    };
    let file = match parse_ce_fixture(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let (phi, f, g) = match to_ce0(&file) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    match ce0_witness(&phi, &f, &g) {
        Ok(x) => {
            if as_json {
                Outcome::Ok(json!({"verb": "ce0", "fixture": file, "witness": x}).to_string())
            } else {
                Outcome::Ok(x.to_string())
            }
        }
        Err(e) => Outcome::CheckFailed(format!("verification failed: {e}")),
    }
}

fn ce1_cmd(path: &PathBuf, as_json: bool) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(format!("cannot read {}: {e}", path.display())),
    };
    let file = match parse_ce_fixture(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let (phi, f, g, mf, mg) = match to_ce1(&file) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let f_probes = f.probes.clone();
    let modulus = move |h: &apart_core::ce::Fn2, _: &Fn1| {
        if h.probes == f_probes {
            mf
        } else {
            mg
        }
    };
    match ce1_witness(&phi, &f, &g, &modulus) {
        Ok(w) => {
            if as_json {
                Outcome::Ok(
                    json!({"verb": "ce1", "fixture": file, "witness": fn1_json(&w)}).to_string(),
                )
            } else {
                Outcome::Ok(fn1_json(&w).to_string())
            }
        }
        Err(e) => Outcome::CheckFailed(format!("verification failed: {e}")),
    }
}

fn report_lines(verb: &str, results: &[(String, Verdict)], as_json: bool) -> Outcome {
    let failed = results.iter().any(|(_, v)| v.failed());
    let text = if as_json {
        json!({
            "verb": verb,
            "ok": !failed,
            "checks": results
                .iter()
                .map(|(name, v)| json!({"check": name, "verdict": v.to_string()}))
                .collect::<Vec<_>>(),
        })
        .to_string()
    } else {
        results
            .iter()
            .map(|(name, v)| format!("[{}] {name}: {v}", if v.failed() { "FAIL" } else { "pass" }))
            .collect::<Vec<_>>()
            .join("\n")
    };
    if failed {
        Outcome::CheckFailed(text)
    } else {
        Outcome::Ok(text)
    }
}

fn check_apartness_cmd(
    ty: &str,
    samples: Option<&std::path::Path>,
    seed: u64,
    as_json: bool,
) -> Outcome {
    let parsed = match parse_type(ty) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let structure = match build_apartness_structure(&parsed) {
        Ok(s) => s,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let mut pool = SamplePool::new();
    if let Some(path) = samples {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return Outcome::BadInput(format!("cannot read {}: {e}", path.display())),
        };
        let terms = match parse_samples(&text) {
            Ok(t) => t,
            Err(e) => return Outcome::BadInput(e.to_string()),
        };
        for t in terms {
            if let Err(e) = pool.add(&t) {
                return Outcome::BadInput(e.to_string());
            }
        }
    }
    // Seeded random additions to the pool, for the carrier and witnesses.
    let mut rng = rng_from_seed(seed);
    for target in [&structure.carrier_type, &structure.witness_type] {
        if apart_core::sampling::has_inhabitant(target) {
            for _ in 0..2 {
                let t = random_term(target, &mut rng, 2);
                let _ = pool.add(&t);
            }
        }
    }
    match check_axioms(&structure, &pool) {
        Ok(results) => report_lines("check-apartness", &results, as_json),
        Err(e) => Outcome::BadInput(e.to_string()),
    }
}

fn check_hyperdoctrine_cmd(path: &PathBuf, as_json: bool) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::BadInput(format!("cannot read {}: {e}", path.display())),
    };
    let file = match parse_hyperdoctrine_fixture(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    let fx = match resolve_hyperdoctrine(&file) {
        Ok(f) => f,
        Err(e) => return Outcome::BadInput(e.to_string()),
    };
    match hyperdoctrine_battery(&fx) {
        Ok(results) => report_lines("check-hyperdoctrine", &results, as_json),
        Err(e) => Outcome::BadInput(e.to_string()),
    }
}
