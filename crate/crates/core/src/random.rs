//! Seeded sampling of presheaves, terms and proofs for property checks.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lts::{LabelSet, Presheaf, StateIx};
use crate::spec::GsosSpec;
use crate::term::{transitions, Ambient, Element, Proof, Term};

pub type Rng64 = ChaCha8Rng;

/// Deterministic generator for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(case_seed(seed, case))
}

/// The seed that replays case `case` on its own.
pub fn case_seed(seed: u64, case: u64) -> u64 {
    seed ^ case.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// A presheaf with `1..=max_states` states `s0, s1, ...` and each possible
/// labelled edge present with probability `density` (at most two parallel).
pub fn random_presheaf(rng: &mut impl Rng, labels: &Arc<LabelSet>, max_states: usize, density: f64) -> Presheaf {
    let n = rng.random_range(1..=max_states.max(1));
    let mut b = Presheaf::builder(labels.clone());
    for i in 0..n {
        b.add_state(format!("s{i}"));
    }
    let mut k = 0;
    for l in labels.iter() {
        for i in 0..n {
            for j in 0..n {
                let copies = if rng.random_bool(density) { 1 + usize::from(rng.random_bool(0.15)) } else { 0 };
                for _ in 0..copies {
                    b.add_edge(labels.name(l), format!("e{k}"), format!("s{i}"), format!("s{j}"));
                    k += 1;
                }
            }
        }
    }
    b.build().expect("generated presheaf is valid")
}

/// A random term of height at most `h` over `vars`; `None` when no term exists.
pub fn random_term<V: Clone>(rng: &mut impl Rng, spec: &GsosSpec, vars: &[V], h: usize) -> Option<Term<V>> {
    let ops: Vec<_> = spec.signature.ops().filter(|op| h > 0 && (spec.signature.arity(*op) == 0 || h > 1 || !vars.is_empty())).collect();
    let leaf = !vars.is_empty() && (ops.is_empty() || rng.random_bool(0.25));
    if leaf {
        return Some(Term::Var(vars.choose(rng)?.clone()));
    }
    for _ in 0..8 {
        let op = *ops.choose(rng)?;
        let n = spec.signature.arity(op);
        let ch: Option<Vec<_>> = (0..n).map(|_| random_term(rng, spec, vars, h - 1)).collect();
        if let Some(ch) = ch {
            return Some(Term::App(op, ch));
        }
    }
    vars.choose(rng).cloned().map(Term::Var)
}

/// A random proof with source of height at most `d` (so depth at most `d`),
/// found by sampling terms and picking one of their transitions.
pub fn random_proof<A: Ambient>(
    rng: &mut impl Rng,
    spec: &GsosSpec,
    amb: &A,
    vars: &[A::S],
    d: usize,
) -> Option<Proof<A::S, A::E>> {
    for _ in 0..64 {
        let m = random_term(rng, spec, vars, d)?;
        let ts = transitions(spec, amb, &m, None);
        if let Some(p) = ts.choose(rng) {
            return Some(p.clone());
        }
    }
    None
}

/// A state or an edge of `T(X)` at size bound `d`, each with probability 1/2.
pub fn random_element(
    rng: &mut impl Rng,
    spec: &GsosSpec,
    x: &Presheaf,
    d: usize,
) -> Option<Element<StateIx, crate::lts::EdgeIx>> {
    let vars: Vec<StateIx> = x.state_ids().collect();
    if rng.random_bool(0.5) {
        if let Some(p) = random_proof(rng, spec, x, &vars, d) {
            return Some(Element::Edge(p));
        }
    }
    random_term(rng, spec, &vars, d).map(Element::State)
}

/// A functional bisimulation `X -> Y` with `Y` random on at most
/// `max_states` states: `X` has one or two copies of each state of `Y`, and
/// every copy of a state gets at least one lift of each of its edges.
pub fn random_functional_bisimulation(
    rng: &mut impl Rng,
    labels: &Arc<LabelSet>,
    max_states: usize,
    density: f64,
) -> crate::lts::Morphism {
    let y = Arc::new(random_presheaf(rng, labels, max_states, density));
    let copies: Vec<usize> = y.state_ids().map(|_| 1 + usize::from(rng.random_bool(0.5))).collect();
    let name = |s: StateIx, c: usize| format!("{}.{c}", y.state_name(s));
    let mut b = Presheaf::builder(labels.clone());
    let mut states = Vec::new();
    for s in y.state_ids() {
        for c in 0..copies[s.0] {
            b.add_state(name(s, c));
            states.push(s);
        }
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for e in y.edge_ids() {
        let d = y.edge(e);
        for c in 0..copies[d.src.0] {
            let first = rng.random_range(0..copies[d.tgt.0]);
            let extra = copies[d.tgt.0] > 1 && rng.random_bool(0.3);
            for t in std::iter::once(first).chain(extra.then_some(1 - first)) {
                b.add_edge(labels.name(d.label), format!("d{k}"), name(d.src, c), name(d.tgt, t));
                edges.push((format!("d{k}"), d.id.clone()));
                k += 1;
            }
        }
    }
    let x = Arc::new(b.build().expect("copies form a presheaf"));
    let state_map: Vec<(String, String)> = x
        .state_names()
        .iter()
        .zip(&states)
        .map(|(n, s)| (n.clone(), y.state_name(*s).to_string()))
        .collect();
    crate::lts::Morphism::from_names(
        x,
        y,
        state_map.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
    .expect("projection is a morphism")
}
