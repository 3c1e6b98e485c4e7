//! `gsos`: batch front end for positive GSOS specifications.
//!
//! Reports go to stdout as JSON, errors to stderr as JSON lines. Exit code 0
//! on success, 1 on a domain violation, 2 on a usage error.

mod verify;

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use gsos_core::bisim::{
    congruence_test, contexts_up_to, parse_closed, parse_context, reachable_fragment_with, refine, BisimError,
    Mutation,
};
use gsos_core::cellularity::{cell_certificate, certificate_report, preserve_bisim_lift};
use gsos_core::familial::{decompose, decomposition_report, is_generic, strip, unit};
use gsos_core::lts::{from_json_with_labels, to_dot, to_json_value, Morphism, Presheaf};
use gsos_core::spec::{parse_spec, GsosSpec};
use gsos_core::term::{parse_element, parse_proof, parse_term, show_proof, Element};

use verify::{Settings, Suite};

#[derive(Parser)]
#[command(name = "gsos", version, about = "Positive GSOS specifications: transition systems, decompositions, certificates and property suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a specification.
    Check { spec: PathBuf },
    /// Reachable transition system of closed terms, explored to a fuel bound.
    Lts {
        spec: PathBuf,
        #[arg(long = "term", required = true)]
        terms: Vec<String>,
        #[arg(long, default_value_t = 3)]
        fuel: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Run the transition engine with the premise-dropping mutation.
        #[arg(long)]
        mutate: bool,
    },
    /// Decide `k`-step bisimilarity of two closed terms.
    Bisim {
        spec: PathBuf,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
        #[arg(short, default_value_t = 3)]
        k: usize,
        /// Defaults to `k`.
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long)]
        mutate: bool,
    },
    /// Split a term or transition into shape and filler.
    Decompose {
        spec: PathBuf,
        #[arg(long)]
        proof: String,
        /// Transition system the leaves refer to (JSON); closed terms need none.
        #[arg(long)]
        lts: Option<PathBuf>,
    },
    /// Cell certificate of a transition shape's source arity map.
    Certify {
        spec: PathBuf,
        /// A shape such as `rsync(ax(a_bar), ax(a))`, or a transition over `--lts`.
        #[arg(long)]
        proof: String,
        #[arg(long)]
        lts: Option<PathBuf>,
    },
    /// Lift a transition along a functional bisimulation.
    Lift {
        spec: PathBuf,
        /// JSON with `domain`, `codomain`, `states` and `edges`.
        #[arg(long)]
        map: PathBuf,
        /// Term over the domain.
        #[arg(long)]
        term: String,
        /// Transition over the codomain whose source is the image of the term.
        #[arg(long)]
        proof: String,
        #[arg(short, default_value_t = 2)]
        d: usize,
    },
    /// Run a seeded property suite.
    Verify {
        spec: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Overridden by GSOS_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: u64,
        #[arg(short, default_value_t = 2)]
        d: usize,
        #[arg(short, default_value_t = 3)]
        k: usize,
        /// Congruence suite only: use the premise-dropping mutation.
        #[arg(long)]
        mutate: bool,
    },
    /// Check that contexts preserve `k`-bisimilarity of the given pairs.
    Congruence {
        spec: PathBuf,
        /// One pair per line, `left ~ right`.
        #[arg(long)]
        pairs: PathBuf,
        /// One context per line, holes written `var(hole)`; defaults to every
        /// context of height at most `--height`.
        #[arg(long)]
        contexts: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        height: usize,
        #[arg(short, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long)]
        mutate: bool,
    },
}

enum Fail {
    Usage(String),
    Domain(Value),
}

fn domain(kind: &str, message: impl ToString) -> Fail {
    Fail::Domain(json!({ "error": kind, "message": message.to_string() }))
}

type Outcome = Result<ExitCode, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<GsosSpec, Fail> {
    parse_spec(&read(path)?).map_err(|errs| {
        let list: Vec<Value> = errs.0.iter().map(spec_error_json).collect();
        Fail::Domain(json!({ "error": "InvalidSpec", "violations": list }))
    })
}

fn spec_error_json(e: &gsos_core::spec::SpecError) -> Value {
    json!({ "kind": e.kind.as_str(), "line": e.line, "col": e.col, "rule": e.rule, "message": e.message })
}

fn presheaf_from_value(spec: &GsosSpec, v: &Value) -> Result<Presheaf, Fail> {
    from_json_with_labels(spec.labels.clone(), &v.to_string()).map_err(|e| domain("Lts", e))
}

fn load_lts(spec: &GsosSpec, path: Option<&Path>) -> Result<Arc<Presheaf>, Fail> {
    Ok(Arc::new(match path {
        None => Presheaf::empty(spec.labels.clone()),
        Some(p) => {
            from_json_with_labels(spec.labels.clone(), &read(p)?).map_err(|e| domain("Lts", e))?
        }
    }))
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(v: &impl serde::Serialize) {
    out(&(serde_json::to_string_pretty(v).expect("report serializes") + "\n"));
}

fn mutation(on: bool) -> Option<Mutation> {
    on.then_some(Mutation::SyncDepthCut)
}

fn bisim_error(e: BisimError) -> Fail {
    match e {
        BisimError::FuelTooSmall { .. } => Fail::Usage(e.to_string()),
        other => domain("Bisim", other),
    }
}

fn check(path: &Path) -> Outcome {
    let text = read(path)?;
    match parse_spec(&text) {
        Ok(spec) => {
            let ops: Vec<Value> =
                spec.signature.decls().iter().map(|d| json!({ "name": d.name, "arity": d.arity })).collect();
            emit(&json!({ "valid": true, "labels": spec.labels.names(), "ops": ops, "rules": spec.rules.len() }));
            Ok(ExitCode::SUCCESS)
        }
        Err(errs) => {
            for e in &errs.0 {
                eprintln!("{}", spec_error_json(e));
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn lts(path: &Path, terms: &[String], fuel: usize, format: Format, mutate: bool) -> Outcome {
    let spec = load_spec(path)?;
    let seeds = terms
        .iter()
        .map(|t| parse_closed(&spec, t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| domain("Term", e))?;
    let frag = reachable_fragment_with(&spec, &seeds, fuel, mutation(mutate)).map_err(bisim_error)?;
    match format {
        Format::Dot => out(&to_dot(&frag.carrier)),
        Format::Json => {
            let x = &frag.carrier;
            let seeds: Vec<&str> = seeds.iter().map(|t| x.state_name(frag.state_of(t).expect("seed present"))).collect();
            let frontier: Vec<&str> = frag.frontier.iter().map(|s| x.state_name(*s)).collect();
            emit(&json!({ "fuel": fuel, "seeds": seeds, "frontier": frontier, "lts": to_json_value(x) }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bisim(path: &Path, t1: &str, t2: &str, k: usize, fuel: Option<usize>, mutate: bool) -> Outcome {
    let spec = load_spec(path)?;
    let fuel = fuel.unwrap_or(k);
    if fuel < k {
        return Err(bisim_error(BisimError::FuelTooSmall { fuel, k }));
    }
    let u = parse_closed(&spec, t1).map_err(|e| domain("Term", e))?;
    let v = parse_closed(&spec, t2).map_err(|e| domain("Term", e))?;
    let frag = reachable_fragment_with(&spec, &[u.clone(), v.clone()], fuel, mutation(mutate)).map_err(bisim_error)?;
    let block = refine(&frag.carrier, k);
    let (su, sv) = (frag.state_of(&u).expect("seed present"), frag.state_of(&v).expect("seed present"));
    emit(&json!({
        "t1": frag.carrier.state_name(su),
        "t2": frag.carrier.state_name(sv),
        "k": k,
        "fuel": fuel,
        "bisimilar": block[su.0] == block[sv.0],
        "states": frag.carrier.num_states(),
        "definitive": frag.frontier.is_empty(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn decompose_cmd(path: &Path, text: &str, lts: Option<&Path>) -> Outcome {
    let spec = load_spec(path)?;
    let x = load_lts(&spec, lts)?;
    let z = parse_element(&spec, x.as_ref(), text).map_err(|e| domain("Term", e))?;
    let d = decompose(&spec, &x, &z).map_err(|e| domain("Familial", e))?;
    let generic = is_generic(&spec, &x, &z).map_err(|e| domain("Familial", e))?;
    let mut report = serde_json::to_value(decomposition_report(&spec, &d)).expect("report serializes");
    report["generic"] = json!(generic);
    emit(&report);
    Ok(ExitCode::SUCCESS)
}

fn certify(path: &Path, text: &str, lts: Option<&Path>) -> Outcome {
    let spec = load_spec(path)?;
    let one = unit(&spec);
    let shape = match lts {
        None => parse_proof(&spec, &one, text).map_err(|e| domain("Term", e))?,
        Some(p) => {
            let x = load_lts(&spec, Some(p))?;
            let r = parse_proof(&spec, x.as_ref(), text).map_err(|e| domain("Term", e))?;
            match strip(&spec, x.as_ref(), &Element::Edge(r)) {
                Element::Edge(s) => s,
                Element::State(_) => unreachable!("transitions strip to transition shapes"),
            }
        }
    };
    let cert = cell_certificate(&spec, &shape).map_err(|e| domain("Cell", e))?;
    let report = certificate_report(&cert);
    let ok = report.verified;
    let mut v = serde_json::to_value(&report).expect("report serializes");
    v.as_object_mut().expect("object").insert("shape".into(), json!(show_proof(&spec, &one, &shape)));
    emit(&v);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Deserialize)]
struct MapFile {
    domain: Value,
    codomain: Value,
    states: BTreeMap<String, String>,
    #[serde(default)]
    edges: BTreeMap<String, String>,
}

fn lift(path: &Path, map: &Path, term: &str, proof: &str, d: usize) -> Outcome {
    let spec = load_spec(path)?;
    let file: MapFile = serde_json::from_str(&read(map)?).map_err(|e| domain("Format", e))?;
    let x = Arc::new(presheaf_from_value(&spec, &file.domain)?);
    let y = Arc::new(presheaf_from_value(&spec, &file.codomain)?);
    let f = Morphism::from_names(
        x.clone(),
        y.clone(),
        file.states.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        file.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
    .map_err(|e| domain("Lts", e))?;
    let m = parse_term(&spec, x.as_ref(), term).map_err(|e| domain("Term", e))?;
    let r = parse_proof(&spec, y.as_ref(), proof).map_err(|e| domain("Term", e))?;
    let r0 = preserve_bisim_lift(&spec, &f, &m, &r, d).map_err(|e| domain("Cell", e))?;
    emit(&json!({ "term": term, "proof": show_proof(&spec, y.as_ref(), &r), "lift": show_proof(&spec, x.as_ref(), &r0) }));
    Ok(ExitCode::SUCCESS)
}

fn seed_from_env(seed: u64) -> Result<u64, Fail> {
    match std::env::var("GSOS_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Fail::Usage(format!("GSOS_SEED is not an unsigned integer: {s:?}"))),
        Err(_) => Ok(seed),
    }
}

fn verify_cmd(path: &Path, suite: Suite, settings: Settings) -> Outcome {
    if settings.mutation.is_some() && suite != Suite::Congruence {
        return Err(Fail::Usage("--mutate only applies to the congruence suite".into()));
    }
    let spec = load_spec(path)?;
    let report = verify::run(&spec, suite, &settings);
    emit(&report);
    Ok(if report.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn congruence(
    path: &Path,
    pairs: &Path,
    contexts: Option<&Path>,
    height: usize,
    k: usize,
    fuel: Option<usize>,
    mutate: bool,
) -> Outcome {
    let spec = load_spec(path)?;
    let mut list = Vec::new();
    for line in lines(&read(pairs)?) {
        let (u, v) = line.split_once('~').ok_or_else(|| domain("Format", format!("expected `left ~ right`: {line}")))?;
        let u = parse_closed(&spec, u.trim()).map_err(|e| domain("Term", e))?;
        let v = parse_closed(&spec, v.trim()).map_err(|e| domain("Term", e))?;
        list.push((u, v));
    }
    let ctx = match contexts {
        Some(p) => lines(&read(p)?)
            .map(|l| parse_context(&spec, l))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| domain("Term", e))?,
        None => {
            let ops: Vec<&str> = spec.signature.decls().iter().map(|d| d.name.as_str()).collect();
            contexts_up_to(&spec, &ops, height)
        }
    };
    let report = congruence_test(&spec, &list, &ctx, k, fuel.unwrap_or(k), mutation(mutate)).map_err(bisim_error)?;
    emit(&report);
    Ok(if report.violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { spec } => check(&spec),
        Command::Lts { spec, terms, fuel, format, mutate } => lts(&spec, &terms, fuel, format, mutate),
        Command::Bisim { spec, t1, t2, k, fuel, mutate } => bisim(&spec, &t1, &t2, k, fuel, mutate),
        Command::Decompose { spec, proof, lts } => decompose_cmd(&spec, &proof, lts.as_deref()),
        Command::Certify { spec, proof, lts } => certify(&spec, &proof, lts.as_deref()),
        Command::Lift { spec, map, term, proof, d } => lift(&spec, &map, &term, &proof, d),
        Command::Verify { spec, suite, seed, cases, d, k, mutate } => {
            let settings = Settings { seed: seed_from_env(seed)?, cases, d, k, mutation: mutation(mutate) };
            verify_cmd(&spec, suite, settings)
        }
        Command::Congruence { spec, pairs, contexts, height, k, fuel, mutate } => {
            congruence(&spec, &pairs, contexts.as_deref(), height, k, fuel, mutate)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Fail::Usage(message)) => {
            eprintln!("{}", json!({ "error": "Usage", "message": message }));
            ExitCode::from(2)
        }
        Err(Fail::Domain(v)) => {
            eprintln!("{v}");
            ExitCode::from(1)
        }
    }
}
