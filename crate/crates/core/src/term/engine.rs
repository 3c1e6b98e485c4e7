use std::collections::HashMap;

use super::{check_term, Ambient, ClosedTerm, Proof, ProofArg, Term, TermError};
use crate::lts::{EdgeIx, Label, Presheaf, StateIx};
use crate::spec::GsosSpec;

/// Lexicographic Cartesian product.
pub(crate) fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![]];
    for l in lists {
        if l.is_empty() {
            return vec![];
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                l.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// All proofs with source `m` (and label `label`, if given): rules in
/// declaration order, then premise proofs lexicographically.
pub fn transitions<A: Ambient>(
    spec: &GsosSpec,
    amb: &A,
    m: &Term<A::S>,
    label: Option<Label>,
) -> Vec<Proof<A::S, A::E>> {
    transitions_with(spec, amb, m, label, &|_: &Proof<A::S, A::E>| true)
}

/// Like [`transitions`], discarding every proof (at any nesting level)
/// rejected by `keep`.
pub fn transitions_with<A: Ambient>(
    spec: &GsosSpec,
    amb: &A,
    m: &Term<A::S>,
    label: Option<Label>,
    keep: &impl Fn(&Proof<A::S, A::E>) -> bool,
) -> Vec<Proof<A::S, A::E>> {
    match m {
        Term::Var(x) => {
            let labels: Vec<Label> = match label {
                Some(l) => vec![l],
                None => amb.labels().iter().collect(),
            };
            labels
                .into_iter()
                .flat_map(|l| amb.edges_from(x, l))
                .map(Proof::Axiom)
                .filter(|p| keep(p))
                .collect()
        }
        Term::App(f, ms) => {
            let mut memo: Vec<HashMap<Label, Vec<Proof<A::S, A::E>>>> = vec![HashMap::new(); ms.len()];
            let mut out = Vec::new();
            for r in spec.rules_for(*f) {
                let rule = spec.rule(r);
                if label.is_some_and(|l| l != rule.label) {
                    continue;
                }
                let mut per_arg: Vec<Vec<ProofArg<A::S, A::E>>> = Vec::with_capacity(ms.len());
                for (i, labels) in rule.premises.iter().enumerate() {
                    if labels.is_empty() {
                        per_arg.push(vec![ProofArg::Term(ms[i].clone())]);
                        continue;
                    }
                    let lists: Vec<Vec<Proof<A::S, A::E>>> = labels
                        .iter()
                        .map(|a| {
                            memo[i]
                                .entry(*a)
                                .or_insert_with(|| transitions_with(spec, amb, &ms[i], Some(*a), keep))
                                .clone()
                        })
                        .collect();
                    per_arg.push(product(&lists).into_iter().map(ProofArg::Premises).collect());
                }
                for args in product(&per_arg) {
                    let p = Proof::Node(r, args);
                    if keep(&p) {
                        out.push(p);
                    }
                }
            }
            out
        }
    }
}

/// Transitions of a closed term.
pub fn one_step(spec: &GsosSpec, m: &ClosedTerm) -> Result<Vec<Proof<StateIx, EdgeIx>>, TermError> {
    check_term(spec, m)?;
    if !m.is_closed() {
        return Err(TermError::MalformedTerm("term has variables".into()));
    }
    let empty = Presheaf::empty(spec.labels.clone());
    Ok(transitions(spec, &empty, m, None))
}
