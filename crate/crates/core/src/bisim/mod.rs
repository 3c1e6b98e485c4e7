//! Finite fragments of the closed-term system, stratified bisimilarity and
//! the congruence check.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lts::{is_functional_bisimulation, EdgeIx, Label, LtsError, Morphism, Presheaf, StateIx};
use crate::spec::GsosSpec;
use crate::term::{
    check_term, parse_term, show_proof, show_term, transitions_with, ClosedTerm, Proof, Term, TermError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("fuel {fuel} cannot decide stratum {k}")]
    FuelTooSmall { fuel: usize, k: usize },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

/// Deliberate breakages of the transition engine, used to check that the
/// congruence test can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// Drops every proof of a rule with two or more premises in which some
    /// premise has depth greater than one.
    SyncDepthCut,
}

impl Mutation {
    fn keeps(self, p: &Proof<StateIx, EdgeIx>) -> bool {
        match self {
            Mutation::SyncDepthCut => match p {
                Proof::Node(_, args) => {
                    let prems: Vec<&Proof<StateIx, EdgeIx>> = args
                        .iter()
                        .flat_map(|a| match a {
                            crate::term::ProofArg::Premises(ps) => ps.iter().collect(),
                            crate::term::ProofArg::Term(_) => vec![],
                        })
                        .collect();
                    prems.len() < 2 || prems.iter().all(|q| q.depth() <= 1)
                }
                Proof::Axiom(_) => true,
            },
        }
    }
}

/// Transitions of a closed term, optionally under a mutation.
pub fn step(spec: &GsosSpec, m: &ClosedTerm, mutation: Option<Mutation>) -> Vec<Proof<StateIx, EdgeIx>> {
    let empty = Presheaf::empty(spec.labels.clone());
    match mutation {
        None => transitions_with(spec, &empty, m, None, &|_: &Proof<StateIx, EdgeIx>| true),
        Some(mu) => transitions_with(spec, &empty, m, None, &|p: &Proof<StateIx, EdgeIx>| mu.keeps(p)),
    }
}

#[derive(Debug, Clone)]
pub struct Fragment {
    pub carrier: Arc<Presheaf>,
    pub terms: Vec<ClosedTerm>,
    /// Unexpanded states that do have transitions.
    pub frontier: Vec<StateIx>,
}

impl Fragment {
    pub fn state_of(&self, t: &ClosedTerm) -> Option<StateIx> {
        self.terms.iter().position(|u| u == t).map(StateIx)
    }
}

/// Breadth-first closure of `seeds` under one step, expanding states found
/// within `fuel` steps. Edge ids are the printed proofs.
pub fn reachable_fragment(spec: &GsosSpec, seeds: &[ClosedTerm], fuel: usize) -> Result<Fragment, BisimError> {
    reachable_fragment_with(spec, seeds, fuel, None)
}

pub fn reachable_fragment_with(
    spec: &GsosSpec,
    seeds: &[ClosedTerm],
    fuel: usize,
    mutation: Option<Mutation>,
) -> Result<Fragment, BisimError> {
    let empty = Presheaf::empty(spec.labels.clone());
    let mut index: HashMap<ClosedTerm, usize> = HashMap::new();
    let mut terms: Vec<ClosedTerm> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        check_term(spec, s)?;
        if !s.is_closed() {
            return Err(TermError::MalformedTerm("seed has variables".into()).into());
        }
        if !index.contains_key(s) {
            index.insert(s.clone(), terms.len());
            queue.push_back(terms.len());
            terms.push(s.clone());
            depth.push(0);
        }
    }
    let mut edges: Vec<(String, Label, usize, usize)> = Vec::new();
    let mut frontier = Vec::new();
    while let Some(i) = queue.pop_front() {
        let out = step(spec, &terms[i], mutation);
        if depth[i] >= fuel {
            if !out.is_empty() {
                frontier.push(StateIx(i));
            }
            continue;
        }
        for p in out {
            let target = crate::term::tgt(spec, &empty, &p);
            let j = match index.get(&target) {
                Some(&j) => j,
                None => {
                    index.insert(target.clone(), terms.len());
                    queue.push_back(terms.len());
                    terms.push(target);
                    depth.push(depth[i] + 1);
                    terms.len() - 1
                }
            };
            edges.push((show_proof(spec, &empty, &p), crate::term::label(spec, &empty, &p), i, j));
        }
    }
    frontier.sort();
    let mut b = Presheaf::builder(spec.labels.clone());
    for t in &terms {
        b.add_state(show_term(spec, &empty, t));
    }
    for (id, l, i, j) in &edges {
        b.add_edge(spec.labels.name(*l), id.clone(), show_term(spec, &empty, &terms[*i]), show_term(spec, &empty, &terms[*j]));
    }
    Ok(Fragment { carrier: Arc::new(b.build()?), terms, frontier })
}

/// Numbers distinct keys in order of first appearance.
fn canonical<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    keys.iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k.clone()).or_insert(n)
        })
        .collect()
}

/// Block index of every state under `~_k`.
pub fn refine(x: &Presheaf, k: usize) -> Vec<usize> {
    let mut block = vec![0; x.num_states()];
    for _ in 0..k {
        let next = refine_once(x, &block);
        if next == block {
            break;
        }
        block = next;
    }
    block
}

fn refine_once(x: &Presheaf, block: &[usize]) -> Vec<usize> {
    let keys: Vec<(usize, BTreeSet<(Label, usize)>)> = x
        .state_ids()
        .map(|s| {
            let succ = x.outgoing(s).iter().map(|&e| (x.edge(e).label, block[x.edge(e).tgt.0])).collect();
            (block[s.0], succ)
        })
        .collect();
    canonical(&keys)
}

/// The greatest fixpoint of refinement: bisimilarity on a finite system.
pub fn bisimilarity(x: &Presheaf) -> Vec<usize> {
    refine(x, x.num_states() + 1)
}

pub fn k_bisimilar(x: &Presheaf, a: &str, b: &str, k: usize) -> Result<bool, BisimError> {
    let find = |n: &str| x.state_by_name(n).ok_or_else(|| BisimError::UnknownState(n.to_string()));
    let (sa, sb) = (find(a)?, find(b)?);
    let block = refine(x, k);
    Ok(block[sa.0] == block[sb.0])
}

/// States grouped by block, in block order.
pub fn blocks(x: &Presheaf, block: &[usize]) -> Vec<Vec<String>> {
    let n = block.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); n];
    for s in x.state_ids() {
        out[block[s.0]].push(x.state_name(s).to_string());
    }
    out
}

/// The relation as a system of pairs: an `a`-edge from `(p, q)` for every
/// pair of `a`-edges from `p` and `q` whose targets are related.
pub fn relation_presheaf(x: &Arc<Presheaf>, pairs: &[(StateIx, StateIx)]) -> Result<(Morphism, Morphism), BisimError> {
    let pairs: Vec<(StateIx, StateIx)> = pairs.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for &(p, q) in &pairs {
        if p.0 >= x.num_states() || q.0 >= x.num_states() {
            return Err(BisimError::UnknownState(format!("#{}", p.0.max(q.0))));
        }
    }
    let name = |p: StateIx, q: StateIx| format!("({},{})", x.state_name(p), x.state_name(q));
    let related: BTreeSet<(StateIx, StateIx)> = pairs.iter().copied().collect();
    let mut b = Presheaf::builder(x.labels().clone());
    let mut left_e = Vec::new();
    let mut right_e = Vec::new();
    for &(p, q) in &pairs {
        b.add_state(name(p, q));
    }
    for &(p, q) in &pairs {
        for &e1 in x.outgoing(p) {
            for &e2 in x.outgoing(q) {
                let (d1, d2) = (x.edge(e1), x.edge(e2));
                if d1.label == d2.label && related.contains(&(d1.tgt, d2.tgt)) {
                    b.add_edge(
                        x.labels().name(d1.label),
                        format!("({},{})", d1.id, d2.id),
                        name(p, q),
                        name(d1.tgt, d2.tgt),
                    );
                    left_e.push((format!("({},{})", d1.id, d2.id), d1.id.clone()));
                    right_e.push((format!("({},{})", d1.id, d2.id), d2.id.clone()));
                }
            }
        }
    }
    let r = Arc::new(b.build()?);
    let ls: Vec<(String, String)> = pairs.iter().map(|&(p, q)| (name(p, q), x.state_name(p).to_string())).collect();
    let rs: Vec<(String, String)> = pairs.iter().map(|&(p, q)| (name(p, q), x.state_name(q).to_string())).collect();
    let pi1 = Morphism::from_names(
        r.clone(),
        x.clone(),
        ls.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        left_e.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )?;
    let pi2 = Morphism::from_names(
        r,
        x.clone(),
        rs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        right_e.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )?;
    Ok((pi1, pi2))
}

/// Whether both projections of the relation are functional bisimulations.
pub fn check_bisimulation_relation(x: &Arc<Presheaf>, pairs: &[(StateIx, StateIx)]) -> Result<bool, BisimError> {
    let (pi1, pi2) = relation_presheaf(x, pairs)?;
    Ok(is_functional_bisimulation(&pi1).is_ok() && is_functional_bisimulation(&pi2).is_ok())
}

/// All related pairs of a block assignment.
pub fn block_relation(block: &[usize]) -> Vec<(StateIx, StateIx)> {
    let mut out = Vec::new();
    for i in 0..block.len() {
        for j in 0..block.len() {
            if block[i] == block[j] {
                out.push((StateIx(i), StateIx(j)));
            }
        }
    }
    out
}

/// A term with holes: every variable is the hole.
pub type Context = Term<StateIx>;

fn hole_system(spec: &GsosSpec) -> Presheaf {
    Presheaf::builder(spec.labels.clone()).state("hole").build().expect("one state")
}

/// Parses a context written with `var(hole)` for the hole.
pub fn parse_context(spec: &GsosSpec, text: &str) -> Result<Context, TermError> {
    parse_term(spec, &hole_system(spec), text)
}

pub fn show_context(spec: &GsosSpec, c: &Context) -> String {
    show_term(spec, &hole_system(spec), c)
}

pub fn plug(c: &Context, t: &ClosedTerm) -> ClosedTerm {
    c.bind(&mut |_| t.clone())
}

/// Every context of height at most `h` over the given operations.
pub fn contexts_up_to(spec: &GsosSpec, ops: &[&str], h: usize) -> Vec<Context> {
    let ops: Vec<_> = ops.iter().filter_map(|o| spec.op(o)).collect();
    let mut by_height: Vec<Vec<Context>> = vec![vec![Term::Var(StateIx(0))]];
    for level in 1..=h {
        let smaller: Vec<Context> = by_height.iter().flatten().cloned().collect();
        let mut fresh = Vec::new();
        for &op in &ops {
            let n = spec.signature.arity(op);
            let lists = vec![smaller.clone(); n];
            for ch in crate::term::engine::product(&lists) {
                let t = Term::App(op, ch);
                if t.height() == level {
                    fresh.push(t);
                }
            }
        }
        by_height.push(fresh);
    }
    by_height.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceViolation {
    pub context: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceReport {
    pub k: usize,
    pub fuel: usize,
    pub mutation: Option<Mutation>,
    pub pairs: usize,
    pub contexts: usize,
    pub checked: usize,
    /// Cases decided on a fragment with no frontier.
    pub definitive: usize,
    /// Input pairs that are not `k`-bisimilar and were skipped.
    pub unrelated_pairs: Vec<(String, String)>,
    pub violations: Vec<CongruenceViolation>,
}

fn related(spec: &GsosSpec, u: &ClosedTerm, v: &ClosedTerm, k: usize, fuel: usize, mutation: Option<Mutation>) -> Result<(bool, bool), BisimError> {
    let frag = reachable_fragment_with(spec, &[u.clone(), v.clone()], fuel, mutation)?;
    let block = refine(&frag.carrier, k);
    let su = frag.state_of(u).expect("seed present");
    let sv = frag.state_of(v).expect("seed present");
    Ok((block[su.0] == block[sv.0], frag.frontier.is_empty()))
}

/// Checks `C[u] ~_k C[v]` for every context and every `k`-bisimilar pair.
pub fn congruence_test(
    spec: &GsosSpec,
    pairs: &[(ClosedTerm, ClosedTerm)],
    contexts: &[Context],
    k: usize,
    fuel: usize,
    mutation: Option<Mutation>,
) -> Result<CongruenceReport, BisimError> {
    if fuel < k {
        return Err(BisimError::FuelTooSmall { fuel, k });
    }
    let empty = Presheaf::empty(spec.labels.clone());
    let mut report = CongruenceReport {
        k,
        fuel,
        mutation,
        pairs: pairs.len(),
        contexts: contexts.len(),
        checked: 0,
        definitive: 0,
        unrelated_pairs: vec![],
        violations: vec![],
    };
    for (u, v) in pairs {
        if !related(spec, u, v, k, fuel, mutation)?.0 {
            report.unrelated_pairs.push((show_term(spec, &empty, u), show_term(spec, &empty, v)));
            continue;
        }
        for c in contexts {
            let (cu, cv) = (plug(c, u), plug(c, v));
            let (ok, closed) = related(spec, &cu, &cv, k, fuel, mutation)?;
            report.checked += 1;
            report.definitive += usize::from(closed);
            if !ok {
                report.violations.push(CongruenceViolation {
                    context: show_context(spec, c),
                    left: show_term(spec, &empty, &cu),
                    right: show_term(spec, &empty, &cv),
                });
            }
        }
    }
    Ok(report)
}

pub fn parse_closed(spec: &GsosSpec, text: &str) -> Result<ClosedTerm, TermError> {
    parse_term(spec, &Presheaf::empty(spec.labels.clone()), text)
}

/// Hand-picked pairs of closed CCS terms that are bisimilar.
pub const CCS_PAIRS: [(&str, &str); 10] = [
    ("sum(pref_a(nil), pref_a(nil))", "pref_a(nil)"),
    ("sum(pref_a(nil), nil)", "pref_a(nil)"),
    ("par(pref_a(nil), nil)", "pref_a(nil)"),
    ("sum(nil, pref_tau(nil))", "pref_tau(nil)"),
    ("par(nil, nil)", "nil"),
    ("sum(pref_a(pref_a_bar(nil)), pref_a(pref_a_bar(nil)))", "pref_a(pref_a_bar(nil))"),
    ("par(pref_a(nil), pref_tau(nil))", "sum(pref_a(pref_tau(nil)), pref_tau(pref_a(nil)))"),
    ("sum(pref_a(nil), pref_a_bar(nil))", "sum(pref_a_bar(nil), pref_a(nil))"),
    ("bang(nil)", "nil"),
    ("par(pref_a(nil), pref_a(nil))", "pref_a(pref_a(nil))"),
];

/// Operations used to build contexts for the CCS congruence check.
pub const CCS_CONTEXT_OPS: [&str; 7] = ["nil", "pref_a", "pref_a_bar", "pref_tau", "sum", "par", "bang"];
