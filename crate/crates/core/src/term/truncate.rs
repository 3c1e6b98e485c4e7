use std::collections::HashMap;
use std::sync::Arc;

use super::engine::product;
use super::{show_proof, show_term, tgt, transitions, Proof, Term};
use crate::lts::{EdgeData, EdgeIx, LtsError, Morphism, Presheaf, StateIx};
use crate::spec::GsosSpec;

type P = Proof<StateIx, EdgeIx>;

/// The finite part of `T(X)` on terms of height at most `d`: every proof
/// whose source and target both have height at most `d`. Cells are named
/// by their concrete syntax.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub base: Arc<Presheaf>,
    pub depth: usize,
    pub presheaf: Arc<Presheaf>,
    pub terms: Vec<Term<StateIx>>,
    pub proofs: Vec<P>,
    term_index: HashMap<Term<StateIx>, StateIx>,
    proof_index: HashMap<P, EdgeIx>,
}

impl Truncation {
    pub fn state_of(&self, t: &Term<StateIx>) -> Option<StateIx> {
        self.term_index.get(t).copied()
    }

    pub fn edge_of(&self, p: &P) -> Option<EdgeIx> {
        self.proof_index.get(p).copied()
    }

    pub fn term(&self, s: StateIx) -> &Term<StateIx> {
        &self.terms[s.0]
    }

    pub fn proof(&self, e: EdgeIx) -> &P {
        &self.proofs[e.0]
    }
}

/// All terms over `vars` of height at most `d`, ordered by height.
pub fn terms_up_to<V: Clone>(spec: &GsosSpec, vars: &[V], d: usize) -> Vec<Term<V>> {
    let mut level: Vec<Term<V>> = vars.iter().cloned().map(Term::Var).collect();
    for _ in 0..d {
        let mut next: Vec<Term<V>> = vars.iter().cloned().map(Term::Var).collect();
        for op in spec.signature.ops() {
            let n = spec.signature.arity(op);
            let lists = vec![level.clone(); n];
            next.extend(product(&lists).into_iter().map(|ch| Term::App(op, ch)));
        }
        level = next;
    }
    level.sort_by_key(Term::height);
    level
}

pub fn t_of(spec: &GsosSpec, x: &Arc<Presheaf>, d: usize) -> Result<Truncation, LtsError> {
    let vars: Vec<StateIx> = x.state_ids().collect();
    let terms = terms_up_to(spec, &vars, d);
    let term_index: HashMap<Term<StateIx>, StateIx> =
        terms.iter().enumerate().map(|(i, t)| (t.clone(), StateIx(i))).collect();
    let mut raw = Vec::new();
    for (i, m) in terms.iter().enumerate() {
        for p in transitions(spec, x.as_ref(), m, None) {
            let t = tgt(spec, x.as_ref(), &p);
            if let Some(&ti) = term_index.get(&t) {
                raw.push((p, StateIx(i), ti));
            }
        }
    }
    let names: Vec<String> = terms.iter().map(|t| show_term(spec, x.as_ref(), t)).collect();
    let edges: Vec<EdgeData> = raw
        .iter()
        .map(|(p, s, t)| EdgeData {
            id: show_proof(spec, x.as_ref(), p),
            label: super::label(spec, x.as_ref(), p),
            src: *s,
            tgt: *t,
        })
        .collect();
    let presheaf = Arc::new(Presheaf::from_indexed(x.labels().clone(), names, edges)?);
    let mut proofs = vec![None; raw.len()];
    let mut proof_index = HashMap::with_capacity(raw.len());
    for (p, _, _) in raw {
        let e = presheaf.edge_by_name(&show_proof(spec, x.as_ref(), &p)).expect("edge was inserted");
        proof_index.insert(p.clone(), e);
        proofs[e.0] = Some(p);
    }
    let proofs = proofs.into_iter().map(|p| p.expect("every edge has a proof")).collect();
    Ok(Truncation { base: x.clone(), depth: d, presheaf, terms, proofs, term_index, proof_index })
}

/// `T(f)` between truncations at the same depth: renames leaves.
pub fn t_on_morphism(f: &Morphism, tx: &Truncation, ty: &Truncation) -> Result<Morphism, LtsError> {
    let states = tx
        .terms
        .iter()
        .map(|t| {
            ty.state_of(&t.map(&mut |s| f.state(*s)))
                .ok_or_else(|| LtsError::NotNatural("renamed term outside the codomain truncation".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let edges = tx
        .proofs
        .iter()
        .map(|p| {
            ty.edge_of(&p.map(&mut |s| f.state(*s), &mut |e| f.edge(*e)))
                .ok_or_else(|| LtsError::NotNatural("renamed proof outside the codomain truncation".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Morphism::new(tx.presheaf.clone(), ty.presheaf.clone(), states, edges)
}

/// The unit `X -> T(X)` into a truncation.
pub fn eta_morphism(tx: &Truncation) -> Result<Morphism, LtsError> {
    let x = &tx.base;
    let states = x.state_ids().map(|s| tx.state_of(&Term::Var(s)).expect("variables have height 0")).collect();
    let edges = x.edge_ids().map(|e| tx.edge_of(&Proof::Axiom(e)).expect("axioms have depth 0")).collect();
    Morphism::new(x.clone(), tx.presheaf.clone(), states, edges)
}
