use std::sync::Arc;

use gsos_core::bisim::{
    bisimilarity, block_relation, check_bisimulation_relation, congruence_test, contexts_up_to, k_bisimilar,
    parse_closed, parse_context, reachable_fragment, refine, BisimError, Mutation, CCS_CONTEXT_OPS, CCS_PAIRS,
};
use gsos_core::lts::{Presheaf, StateIx};
use gsos_core::random::{case_rng, random_presheaf};
use gsos_core::spec::{ccs, GsosSpec};
use proptest::prelude::*;

fn closed(spec: &GsosSpec, t: &str) -> gsos_core::term::ClosedTerm {
    parse_closed(spec, t).unwrap()
}

#[test]
fn nil_fragment() {
    let spec = ccs();
    for fuel in 0..3 {
        let f = reachable_fragment(&spec, &[closed(&spec, "nil")], fuel).unwrap();
        assert_eq!((f.carrier.num_states(), f.carrier.num_edges()), (1, 0));
        assert!(f.frontier.is_empty());
    }
}

#[test]
fn par_fragment() {
    let spec = ccs();
    let seed = closed(&spec, "par(pref_a_bar(nil), pref_a(nil))");
    let f1 = reachable_fragment(&spec, std::slice::from_ref(&seed), 1).unwrap();
    assert_eq!(f1.carrier.num_states(), 4);
    assert_eq!(f1.carrier.outgoing(StateIx(0)).len(), 3);
    assert_eq!(f1.frontier.len(), 2);
    let f2 = reachable_fragment(&spec, &[seed], 2).unwrap();
    assert_eq!((f2.carrier.num_states(), f2.carrier.num_edges()), (4, 5));
    assert!(f2.frontier.is_empty());
    let labels: Vec<&str> =
        f2.carrier.outgoing(StateIx(0)).iter().map(|&e| spec.labels.name(f2.carrier.edge(e).label)).collect();
    assert_eq!(labels, ["a", "a_bar", "tau"]);
    for s in f1.carrier.state_names() {
        assert!(f2.carrier.state_by_name(s).is_some());
    }
}

#[test]
fn fragments_grow_with_fuel() {
    let spec = ccs();
    let seed = closed(&spec, "bang(sum(pref_a(nil), pref_a_bar(nil)))");
    let mut previous = reachable_fragment(&spec, std::slice::from_ref(&seed), 0).unwrap();
    for fuel in 1..4 {
        let next = reachable_fragment(&spec, std::slice::from_ref(&seed), fuel).unwrap();
        for s in previous.carrier.state_names() {
            assert!(next.carrier.state_by_name(s).is_some());
        }
        for e in previous.carrier.edges() {
            assert!(next.carrier.edge_by_name(&e.id).is_some());
        }
        previous = next;
    }
    assert!(!previous.frontier.is_empty());
}

#[test]
fn small_bisimilarity_facts() {
    let spec = ccs();
    let u = closed(&spec, "sum(pref_a(nil), pref_a(nil))");
    let v = closed(&spec, "pref_a(nil)");
    let w = closed(&spec, "pref_tau(nil)");
    let f = reachable_fragment(&spec, &[u, v, w], 5).unwrap();
    let x = &f.carrier;
    for k in 0..5 {
        assert!(k_bisimilar(x, "sum(pref_a(nil), pref_a(nil))", "pref_a(nil)", k).unwrap());
        assert!(k_bisimilar(x, "pref_tau(nil)", "pref_tau(nil)", k).unwrap());
    }
    assert!(k_bisimilar(x, "pref_a(nil)", "pref_tau(nil)", 0).unwrap());
    assert!(!k_bisimilar(x, "pref_a(nil)", "pref_tau(nil)", 1).unwrap());
    assert!(matches!(k_bisimilar(x, "pref_a(nil)", "zzz", 1), Err(BisimError::UnknownState(_))));
}

#[test]
fn relation_checks() {
    let spec = ccs();
    let x = Arc::new(
        Presheaf::builder(spec.labels.clone())
            .state("p")
            .state("q")
            .state("r")
            .edge("a", "e", "p", "q")
            .build()
            .unwrap(),
    );
    let diag: Vec<_> = x.state_ids().map(|s| (s, s)).collect();
    assert!(check_bisimulation_relation(&x, &diag).unwrap());
    let total: Vec<_> = x.state_ids().flat_map(|s| x.state_ids().map(move |t| (s, t))).collect();
    assert!(!check_bisimulation_relation(&x, &total).unwrap());

    let seed = closed(&spec, "par(sum(pref_a(nil), pref_a(nil)), pref_a_bar(nil))");
    let other = closed(&spec, "par(pref_a(nil), pref_a_bar(nil))");
    let f = reachable_fragment(&spec, &[seed, other], 10).unwrap();
    assert!(f.frontier.is_empty());
    let block = bisimilarity(&f.carrier);
    assert_eq!(block[0], block[1]);
    assert!(check_bisimulation_relation(&f.carrier, &block_relation(&block)).unwrap());
}

#[test]
fn congruence_on_a_sum_pair() {
    let spec = ccs();
    let pairs = vec![(closed(&spec, "sum(pref_a(nil), pref_a(nil))"), closed(&spec, "pref_a(nil)"))];
    let contexts = vec![
        parse_context(&spec, "var(hole)").unwrap(),
        parse_context(&spec, "par(var(hole), pref_a_bar(nil))").unwrap(),
    ];
    let report = congruence_test(&spec, &pairs, &contexts, 3, 3, None).unwrap();
    assert_eq!(report.checked, 2);
    assert!(report.violations.is_empty());
    assert!(matches!(congruence_test(&spec, &pairs, &contexts, 3, 2, None), Err(BisimError::FuelTooSmall { .. })));
}

#[test]
fn mutation_breaks_congruence() {
    let spec = ccs();
    let pairs = vec![(closed(&spec, "sum(pref_a(nil), nil)"), closed(&spec, "pref_a(nil)"))];
    let contexts = vec![parse_context(&spec, "par(pref_a_bar(nil), var(hole))").unwrap()];
    let sound = congruence_test(&spec, &pairs, &contexts, 3, 3, None).unwrap();
    assert!(sound.violations.is_empty());
    let broken = congruence_test(&spec, &pairs, &contexts, 3, 3, Some(Mutation::SyncDepthCut)).unwrap();
    assert_eq!(broken.violations.len(), 1);
}

#[test]
fn curated_pairs_are_bisimilar() {
    let spec = ccs();
    for (u, v) in CCS_PAIRS {
        let (u, v) = (closed(&spec, u), closed(&spec, v));
        let f = reachable_fragment(&spec, &[u.clone(), v.clone()], 3).unwrap();
        let block = refine(&f.carrier, 3);
        assert_eq!(block[f.state_of(&u).unwrap().0], block[f.state_of(&v).unwrap().0]);
    }
    let ctx = contexts_up_to(&spec, &CCS_CONTEXT_OPS, 1);
    assert_eq!(ctx.len(), 8);
}

fn with_duplicated_edge(x: &Presheaf, which: usize) -> Presheaf {
    let mut b = Presheaf::builder(x.labels().clone());
    for s in x.state_names() {
        b.add_state(s.clone());
    }
    for (i, e) in x.edges().iter().enumerate() {
        let (src, tgt) = (x.state_name(e.src).to_string(), x.state_name(e.tgt).to_string());
        let label = x.labels().name(e.label).to_string();
        b.add_edge(label.clone(), e.id.clone(), src.clone(), tgt.clone());
        if i == which {
            b.add_edge(label, format!("{}'", e.id), src, tgt);
        }
    }
    b.build().unwrap()
}

proptest! {
    #[test]
    fn strata_are_equivalences_and_shrink(seed in any::<u64>(), k in 0usize..5) {
        let spec = ccs();
        let x = random_presheaf(&mut case_rng(seed, 0), &spec.labels, 6, 0.2);
        let now = refine(&x, k);
        let next = refine(&x, k + 1);
        let n = x.num_states();
        for i in 0..n {
            for j in 0..n {
                // ~_{k+1} refines ~_k
                if next[i] == next[j] {
                    prop_assert_eq!(now[i], now[j]);
                }
            }
        }
        let rel = block_relation(&now);
        for &(a, b) in &rel {
            prop_assert!(rel.contains(&(b, a)));
        }
    }

    #[test]
    fn duplicate_edges_change_nothing(seed in any::<u64>(), k in 0usize..5, which in any::<prop::sample::Index>()) {
        let spec = ccs();
        let x = random_presheaf(&mut case_rng(seed, 1), &spec.labels, 6, 0.2);
        prop_assume!(x.num_edges() > 0);
        let y = with_duplicated_edge(&x, which.index(x.num_edges()));
        prop_assert_eq!(refine(&x, k), refine(&y, k));
    }

    #[test]
    fn fixpoint_is_a_bisimulation(seed in any::<u64>()) {
        let spec = ccs();
        let x = Arc::new(random_presheaf(&mut case_rng(seed, 2), &spec.labels, 5, 0.25));
        let block = bisimilarity(&x);
        prop_assert!(check_bisimulation_relation(&x, &block_relation(&block)).unwrap());
    }
}
