use rand::Rng;

use super::engine::product;
use super::{src, Ambient, Proof, ProofArg, Term};
use crate::spec::GsosSpec;

/// Every two-layer term that flattens to `m`.
pub fn layerings_term<V: Clone>(m: &Term<V>) -> Vec<Term<Term<V>>> {
    let mut out = vec![Term::Var(m.clone())];
    if let Term::App(op, ch) = m {
        let lists: Vec<_> = ch.iter().map(layerings_term).collect();
        out.extend(product(&lists).into_iter().map(|c| Term::App(*op, c)));
    }
    out
}

/// A random two-layer term flattening to `m`; each node is cut with
/// probability `p_cut`.
pub fn random_layering_term<V: Clone>(rng: &mut impl Rng, m: &Term<V>, p_cut: f64) -> Term<Term<V>> {
    match m {
        Term::App(op, ch) if !rng.random_bool(p_cut) => {
            Term::App(*op, ch.iter().map(|c| random_layering_term(rng, c, p_cut)).collect())
        }
        _ => Term::Var(m.clone()),
    }
}

/// The unique two-layer proof flattening to `r` whose source is the
/// layering `sigma` of `src r`.
pub fn layer_proof<V: Clone, E: Clone>(r: &Proof<V, E>, sigma: &Term<Term<V>>) -> Proof<Term<V>, Proof<V, E>> {
    match (sigma, r) {
        (Term::App(_, sig), Proof::Node(rule, args)) => Proof::Node(
            *rule,
            args.iter()
                .zip(sig)
                .map(|(a, s)| match a {
                    ProofArg::Term(_) => ProofArg::Term(s.clone()),
                    ProofArg::Premises(ps) => ProofArg::Premises(ps.iter().map(|p| layer_proof(p, s)).collect()),
                })
                .collect(),
        ),
        _ => Proof::Axiom(r.clone()),
    }
}

/// Every two-layer proof that flattens to `r`, one per layering of its source.
pub fn layerings_proof<A: Ambient>(
    spec: &GsosSpec,
    amb: &A,
    r: &Proof<A::S, A::E>,
) -> Vec<Proof<Term<A::S>, Proof<A::S, A::E>>> {
    layerings_term(&src(spec, amb, r)).iter().map(|s| layer_proof(r, s)).collect()
}
