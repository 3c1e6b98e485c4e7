use serde::Serialize;

use super::layers::{layer_proof, random_layering_term};
use super::{
    check_element, mu_element, mu_term, show_element, src, Ambient, Element, Free, Proof, Term, TermError,
};
use crate::lts::{EdgeIx, Presheaf, StateIx};
use crate::random::{case_rng, case_seed, random_element, random_presheaf};
use crate::spec::GsosSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawFailure {
    pub case: u64,
    pub seed: u64,
    pub law: String,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawsReport {
    pub seed: u64,
    pub cases: u64,
    pub depth: usize,
    pub checked: u64,
    pub skipped: u64,
    pub failures: Vec<LawFailure>,
}

/// The `μ`-preimage of `r` along the layering `mm` of its source: a proof
/// in `T(T(X))` with source `mm` that flattens to `r`.
pub fn lift_mu<A: Ambient>(
    spec: &GsosSpec,
    amb: &A,
    mm: &Term<Term<A::S>>,
    r: &Proof<A::S, A::E>,
) -> Result<Proof<Term<A::S>, Proof<A::S, A::E>>, TermError> {
    if src(spec, amb, r) != mu_term(mm) {
        return Err(TermError::MalformedProof("source of the transition is not the flattened term".into()));
    }
    let lifted = layer_proof(r, mm);
    let free = Free::new(spec, amb);
    if src(spec, &free, &lifted) != *mm || super::mu_proof(&lifted) != *r {
        return Err(TermError::MalformedProof("lifted proof does not verify".into()));
    }
    Ok(lifted)
}

type El = Element<StateIx, EdgeIx>;
type El2 = Element<Term<StateIx>, Proof<StateIx, EdgeIx>>;
type El3 = Element<Term<Term<StateIx>>, Proof<Term<StateIx>, Proof<StateIx, EdgeIx>>>;

fn eta_inside(z: &El) -> El2 {
    z.map(&mut |s| Term::Var(*s), &mut |e| Proof::Axiom(*e))
}

fn eta_outside(z: &El) -> El2 {
    match z {
        Element::State(t) => Element::State(Term::Var(t.clone())),
        Element::Edge(p) => Element::Edge(Proof::Axiom(p.clone())),
    }
}

/// A random element of `T(T(T(X)))` flattening to `z`.
fn random_triple(rng: &mut impl rand::Rng, spec: &GsosSpec, x: &Presheaf, z: &El) -> El3 {
    match z {
        Element::State(t) => {
            let two = random_layering_term(rng, t, 0.3);
            Element::State(random_layering_term(rng, &two, 0.3))
        }
        Element::Edge(p) => {
            let sigma = random_layering_term(rng, &src(spec, x, p), 0.3);
            let pp = layer_proof(p, &sigma);
            let tau = random_layering_term(rng, &sigma, 0.3);
            Element::Edge(layer_proof(&pp, &tau))
        }
    }
}

/// Checks `μ∘Tη = id`, `μ∘ηT = id`, `μ∘Tμ = μ∘μT` and naturality of `μ`
/// along `X -> 1` on seeded random elements of size at most `d` over random
/// presheaves with at most five states.
pub fn check_monad_laws(spec: &GsosSpec, seed: u64, cases: u64, d: usize) -> LawsReport {
    let terminal = Presheaf::terminal(spec.labels.clone());
    let mut report = LawsReport { seed, cases, depth: d, checked: 0, skipped: 0, failures: vec![] };
    for case in 0..cases {
        let mut rng = case_rng(seed, case);
        let x = random_presheaf(&mut rng, &spec.labels, 5, 0.3);
        let Some(z) = random_element(&mut rng, spec, &x, d) else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        let mut fail = |law: &str| {
            report.failures.push(LawFailure {
                case,
                seed: case_seed(seed, case),
                law: law.to_string(),
                element: show_element(spec, &x, &z),
            })
        };
        if check_element(spec, &x, &z).is_err() {
            fail("generated element is well formed");
            continue;
        }
        if mu_element(&eta_inside(&z)) != z {
            fail("mu . T(eta) = id");
        }
        if mu_element(&eta_outside(&z)) != z {
            fail("mu . eta T = id");
        }
        let zzz = random_triple(&mut rng, spec, &x, &z);
        let free = Free::new(spec, &x);
        let free2 = Free::new(spec, &free);
        if check_element(spec, &free2, &zzz).is_err() {
            fail("three-layer element is well formed");
            continue;
        }
        let inner = zzz.map(&mut mu_term, &mut super::mu_proof);
        let lhs = mu_element(&inner);
        let rhs = mu_element(&mu_element(&zzz));
        if lhs != rhs || lhs != z {
            fail("mu . T(mu) = mu . mu T");
        }
        // naturality along the unique map to 1
        let edge_to_one = |e: &EdgeIx| terminal.edges_with_label(x.edge(*e).label)[0];
        let z2 = mu_element(&zzz);
        let lhs = mu_element(&z2).map(&mut |_| StateIx(0), &mut { edge_to_one });
        let rhs = mu_element(&z2.map(
            &mut |t: &Term<StateIx>| t.map(&mut |_| StateIx(0)),
            &mut |p: &Proof<StateIx, EdgeIx>| p.map(&mut |_| StateIx(0), &mut { edge_to_one }),
        ));
        if lhs != rhs {
            fail("T(!) . mu = mu . TT(!)");
        }
    }
    report
}
