//! Seeded property suites behind `gsos verify`.

use std::sync::Arc;

use clap::ValueEnum;
use rand::seq::IndexedRandom;
use serde::Serialize;
use serde_json::{json, Value};

use gsos_core::bisim::{congruence_test, contexts_up_to, parse_closed, Mutation, CCS_CONTEXT_OPS, CCS_PAIRS};
use gsos_core::cellularity::{
    brute_force_preimages, cell_certificate, check_eta_cartesian, check_mu_cartesian, verify_certificate,
    BisimLifter, CartesianReport,
};
use gsos_core::familial::{arity_label, check_naturality_in_c, check_naturality_in_x, decompose, recompose, unit};
use gsos_core::lts::{all_morphisms, Morphism, StateIx};
use gsos_core::random::{
    case_rng, case_seed, random_element, random_functional_bisimulation, random_presheaf, random_proof, random_term,
};
use gsos_core::spec::GsosSpec;
use gsos_core::term::{check_monad_laws, show_element, terms_up_to, transitions, Element};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Laws,
    Cartesian,
    Familial,
    Cellular,
    Preserve,
    Congruence,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Laws => "laws",
            Suite::Cartesian => "cartesian",
            Suite::Familial => "familial",
            Suite::Cellular => "cellular",
            Suite::Preserve => "preserve",
            Suite::Congruence => "congruence",
        }
    }
}

pub struct Settings {
    pub seed: u64,
    pub cases: u64,
    pub d: usize,
    pub k: usize,
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Serialize)]
pub struct Failure {
    pub case: u64,
    /// Seed of the case's own generator.
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub seed: u64,
    pub cases: u64,
    pub depth: usize,
    pub checked: u64,
    pub skipped: u64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Report {
    fn new(suite: Suite, s: &Settings) -> Self {
        Report {
            suite: suite.name(),
            seed: s.seed,
            cases: s.cases,
            depth: s.d,
            checked: 0,
            skipped: 0,
            failures: Vec::new(),
            detail: None,
        }
    }

    fn record(&mut self, seed: u64, case: u64, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => self.checked += 1,
            Err(reason) => self.failures.push(Failure { case, seed: case_seed(seed, case), reason }),
        }
    }
}

pub fn run(spec: &GsosSpec, suite: Suite, s: &Settings) -> Report {
    match suite {
        Suite::Laws => laws(spec, s),
        Suite::Cartesian => cartesian(spec, s),
        Suite::Familial => familial(spec, s),
        Suite::Cellular => cellular(spec, s),
        Suite::Preserve => preserve(spec, s),
        Suite::Congruence => congruence(spec, s),
    }
}

fn laws(spec: &GsosSpec, s: &Settings) -> Report {
    let rep = check_monad_laws(spec, s.seed, s.cases, s.d);
    let mut out = Report::new(Suite::Laws, s);
    out.checked = rep.checked;
    out.skipped = rep.skipped;
    out.failures = rep
        .failures
        .into_iter()
        .map(|f| Failure { case: f.case, seed: f.seed, reason: format!("{}: {}", f.law, f.element) })
        .collect();
    out
}

fn familial(spec: &GsosSpec, s: &Settings) -> Report {
    let mut out = Report::new(Suite::Familial, s);
    let one = Arc::new(unit(spec));
    for case in 0..s.cases {
        let mut rng = case_rng(s.seed, case);
        let x = Arc::new(random_presheaf(&mut rng, &spec.labels, 5, 0.3));
        let Some(z) = random_element(&mut rng, spec, &x, s.d) else {
            out.skipped += 1;
            continue;
        };
        let outcome = (|| {
            let dz = decompose(spec, &x, &z).map_err(|e| e.to_string())?;
            if recompose(&dz).map_err(|e| e.to_string())? != z {
                return Err(format!("round trip changes {}", show_element(spec, x.as_ref(), &z)));
            }
            let bang = Morphism::to_terminal(x.clone(), one.clone()).map_err(|e| e.to_string())?;
            check_naturality_in_x(spec, &x, &z, &bang)?;
            let y = Arc::new(random_presheaf(&mut rng, &spec.labels, 4, 0.5));
            if let Some(f) = all_morphisms(&x, &y, 32).choose(&mut rng) {
                check_naturality_in_x(spec, &x, &z, f)?;
            }
            if let Element::Edge(r) = &z {
                check_naturality_in_c(spec, &x, r)?;
            }
            Ok(())
        })();
        out.record(s.seed, case, outcome);
    }
    out
}

fn cellular(spec: &GsosSpec, s: &Settings) -> Report {
    let mut out = Report::new(Suite::Cellular, s);
    let one = unit(spec);
    let vars = [StateIx(0)];
    for case in 0..s.cases {
        let mut rng = case_rng(s.seed, case);
        let Some(r) = random_proof(&mut rng, spec, &one, &vars, s.d) else {
            out.skipped += 1;
            continue;
        };
        let outcome = (|| {
            let c = cell_certificate(spec, &r).map_err(|e| e.to_string())?;
            verify_certificate(&c).map_err(|e| e.to_string())?;
            let src = arity_label(spec, &r).map_err(|e| e.to_string())?.src;
            if !c.composite.same_under_names(&src) {
                return Err(String::from("certified composite differs from the source arity map"));
            }
            Ok(())
        })()
        .map_err(|e| format!("{}: {e}", show_element(spec, &one, &Element::Edge(r.clone()))));
        out.record(s.seed, case, outcome);
    }
    out
}

fn square_failures(rep: &CartesianReport) -> Result<(), String> {
    match rep.objects.iter().find(|o| !o.failures.is_empty()) {
        None => Ok(()),
        Some(o) => Err(format!("{} square at depth {} over {}: {}", rep.square, rep.depth, o.object, o.failures[0])),
    }
}

fn cartesian(spec: &GsosSpec, s: &Settings) -> Report {
    let mut out = Report::new(Suite::Cartesian, s);
    for case in 0..s.cases {
        let x = Arc::new(random_presheaf(&mut case_rng(s.seed, case), &spec.labels, 3, 0.3));
        let outcome = (|| {
            square_failures(&check_eta_cartesian(spec, &x, s.d).map_err(|e| e.to_string())?)?;
            square_failures(&check_mu_cartesian(spec, &x, s.d).map_err(|e| e.to_string())?)
        })();
        out.record(s.seed, case, outcome);
    }
    out
}

/// Cases whose lifts are also checked against exhaustive preimage search.
const ORACLE_CASES: u64 = 20;

fn preserve(spec: &GsosSpec, s: &Settings) -> Report {
    let mut out = Report::new(Suite::Preserve, s);
    let (mut problems, mut oracle) = (0u64, 0u64);
    for case in 0..s.cases {
        let f = random_functional_bisimulation(&mut case_rng(s.seed, case), &spec.labels, 3, 0.3);
        let outcome = (|| {
            let (x, y) = (f.domain().clone(), f.codomain().clone());
            let vars: Vec<_> = x.state_ids().collect();
            let mut lifter = BisimLifter::new(spec, &f).map_err(|e| e.to_string())?;
            for m in terms_up_to(spec, &vars, s.d) {
                let fm = m.map(&mut |v| f.state(*v));
                for r in transitions(spec, y.as_ref(), &fm, None) {
                    let shown = || show_element(spec, y.as_ref(), &Element::Edge(r.clone()));
                    let r0 = lifter.lift(&m, &r, s.d).map_err(|e| format!("{}: {e}", shown()))?;
                    if case < ORACLE_CASES {
                        if !brute_force_preimages(spec, &f, &m, &r).contains(&r0) {
                            return Err(format!("{}: lift is not among the preimages", shown()));
                        }
                        oracle += 1;
                    }
                    problems += 1;
                }
            }
            Ok(())
        })();
        out.record(s.seed, case, outcome);
    }
    out.detail = Some(json!({ "lifting_problems": problems, "oracle_checked": oracle }));
    out
}

fn congruence(spec: &GsosSpec, s: &Settings) -> Report {
    let mut out = Report::new(Suite::Congruence, s);
    let mut pairs: Vec<_> = CCS_PAIRS
        .iter()
        .filter_map(|(u, v)| Some((parse_closed(spec, u).ok()?, parse_closed(spec, v).ok()?)))
        .collect();
    let curated = pairs.len();
    for case in 0..s.cases {
        let mut rng = case_rng(s.seed, case);
        let no_vars: [StateIx; 0] = [];
        match (random_term(&mut rng, spec, &no_vars, s.d), random_term(&mut rng, spec, &no_vars, s.d)) {
            (Some(u), Some(v)) if u != v => pairs.push((u, v)),
            _ => out.skipped += 1,
        }
    }
    let mut ops: Vec<&str> = CCS_CONTEXT_OPS.iter().copied().filter(|o| spec.op(o).is_some()).collect();
    if ops.is_empty() {
        ops = spec.signature.decls().iter().map(|d| d.name.as_str()).collect();
    }
    let contexts = contexts_up_to(spec, &ops, s.d);
    match congruence_test(spec, &pairs, &contexts, s.k, s.k, s.mutation) {
        Ok(rep) => {
            out.checked = rep.checked as u64;
            out.failures = rep
                .violations
                .iter()
                .map(|v| Failure {
                    case: 0,
                    seed: s.seed,
                    reason: format!("{} separates {} from {}", v.context, v.left, v.right),
                })
                .collect();
            out.detail = Some(json!({
                "k": s.k,
                "mutation": rep.mutation,
                "curated_pairs": curated,
                "pairs": rep.pairs,
                "unrelated_pairs": rep.unrelated_pairs.len(),
                "contexts": rep.contexts,
                "definitive": rep.definitive,
            }));
        }
        Err(e) => out.failures.push(Failure { case: 0, seed: s.seed, reason: e.to_string() }),
    }
    out
}
