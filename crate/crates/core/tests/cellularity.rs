use std::sync::Arc;

use gsos_core::cellularity::{
    brute_force_preimages, cell_certificate, check_eta_cartesian, check_mu_cartesian, fiber_t2, lift_against,
    preserve_bisim_lift, unique_r0, verify_certificate, CellError, Step,
};
use gsos_core::familial::{arity_label, unit};
use gsos_core::lts::{Morphism, Object, Presheaf, StateIx};
use gsos_core::random::{case_rng, random_presheaf, random_proof};
use gsos_core::spec::{ccs, toy, GsosSpec};
use gsos_core::term::{parse_element, parse_proof, parse_term, transitions, Free, Proof};

fn step(label: &str, at: &str, name: &str) -> Step {
    Step { label: label.into(), at: at.into(), name: name.into() }
}

fn shape(spec: &GsosSpec, text: &str) -> Proof<StateIx, gsos_core::lts::EdgeIx> {
    parse_proof(spec, &unit(spec), text).unwrap()
}

#[test]
fn axiom_certificate() {
    let spec = ccs();
    let c = cell_certificate(&spec, &shape(&spec, "ax(a)")).unwrap();
    assert_eq!(c.base.num_states(), 1);
    assert_eq!(c.steps, vec![step("a", "s", "")]);
    verify_certificate(&c).unwrap();
}

#[test]
fn rsync_attaches_twice_at_one_vertex() {
    let spec = ccs();
    let c = cell_certificate(&spec, &shape(&spec, "rsync(ax(a_bar), ax(a))")).unwrap();
    assert_eq!(c.base_names, vec!["arg1/occ0"]);
    assert_eq!(c.steps, vec![step("a_bar", "arg1/occ0", "arg1/prem1"), step("a", "arg1/occ0", "arg1/prem2")]);
    verify_certificate(&c).unwrap();
}

#[test]
fn sync_certificate_leaves_middle_cell() {
    let spec = ccs();
    let c = cell_certificate(&spec, &shape(&spec, "sync(lpar(ax(a_bar), term(var(*))), ax(a))")).unwrap();
    assert_eq!(c.base_names, vec!["arg1/occ0", "arg1/occ1", "arg2/occ0"]);
    assert_eq!(
        c.steps,
        vec![step("a_bar", "arg1/occ0", "arg1/prem1/arg1/prem1"), step("a", "arg2/occ0", "arg2/prem1")]
    );
    verify_certificate(&c).unwrap();
}

#[test]
fn tampered_certificates() {
    let spec = ccs();
    let c = cell_certificate(&spec, &shape(&spec, "sync(lpar(ax(a_bar), term(var(*))), ax(a))")).unwrap();
    let mut dropped = c.clone();
    dropped.steps.pop();
    assert!(matches!(verify_certificate(&dropped), Err(CellError::ReplayMismatch { step: 1, .. })));
    let mut swapped = c.clone();
    swapped.steps.swap(0, 1);
    verify_certificate(&swapped).unwrap();
    let mut moved = c;
    moved.steps[1].at = "arg1/occ1".into();
    assert!(matches!(verify_certificate(&moved), Err(CellError::ReplayMismatch { step: 1, .. })));
}

#[test]
fn certificates_replay_on_random_shapes() {
    for spec in [ccs(), toy()] {
        let one = Arc::new(unit(&spec));
        let vars = vec![StateIx(0)];
        let mut seen = 0;
        for case in 0..80 {
            let mut rng = case_rng(3, case);
            let Some(r) = random_proof(&mut rng, &spec, one.as_ref(), &vars, 3) else { continue };
            let c = cell_certificate(&spec, &r).unwrap();
            verify_certificate(&c).unwrap();
            assert!(c.composite.same_under_names(&arity_label(&spec, &r).unwrap().src));
            seen += 1;
        }
        assert!(seen > 0);
    }
}

fn collapse(spec: &GsosSpec) -> Morphism {
    let x = Presheaf::builder(spec.labels.clone())
        .state("u")
        .state("u1")
        .state("v")
        .state("v1")
        .state("v2")
        .edge("a_bar", "eu", "u", "u1")
        .edge("a", "ev1", "v", "v1")
        .edge("a", "ev2", "v", "v2")
        .edge("a_bar", "ev", "v", "u1")
        .build()
        .unwrap();
    let y = Presheaf::builder(spec.labels.clone())
        .state("u")
        .state("u1")
        .state("v")
        .state("w")
        .edge("a_bar", "eu", "u", "u1")
        .edge("a", "ew", "v", "w")
        .edge("a_bar", "ev", "v", "u1")
        .build()
        .unwrap();
    Morphism::from_names(
        Arc::new(x),
        Arc::new(y),
        [("u", "u"), ("u1", "u1"), ("v", "v"), ("v1", "w"), ("v2", "w")],
        [("eu", "eu"), ("ev1", "ew"), ("ev2", "ew"), ("ev", "ev")],
    )
    .unwrap()
}

#[test]
fn lift_against_trivial_cases() {
    let spec = ccs();
    let f = collapse(&spec);
    let x = f.domain().clone();
    let star = Arc::new(Presheaf::representable(spec.labels.clone(), Object::Star).unwrap());
    let top = Morphism::pick_state(x.clone(), x.state_by_name("v").unwrap());
    let id_cert = gsos_core::cellularity::CellCertificate {
        base: star.clone(),
        base_names: vec!["*".into()],
        steps: vec![],
        composite: Morphism::identity(star),
    };
    let k = lift_against(&id_cert, &f, &top, &f.after(&top).unwrap()).unwrap();
    assert_eq!(k, top);

    let c = cell_certificate(&spec, &shape(&spec, "ax(a)")).unwrap();
    let b = c.composite.codomain().clone();
    let top = Morphism::new(c.base.clone(), x.clone(), vec![x.state_by_name("v").unwrap()], vec![]).unwrap();
    let y = f.codomain();
    let bottom = Morphism::from_names(b, y.clone(), [("s", "v"), ("t", "w")], [("e", "ew")]).unwrap();
    let k = lift_against(&c, &f, &top, &bottom).unwrap();
    assert_eq!(k.edge_by_name("e"), Some("ev1"));
}

#[test]
fn lift_against_rejects_bad_inputs() {
    let spec = ccs();
    let f = collapse(&spec);
    let c = cell_certificate(&spec, &shape(&spec, "ax(a)")).unwrap();
    let x = f.domain().clone();
    let y = f.codomain().clone();
    let top = Morphism::new(c.base.clone(), x.clone(), vec![x.state_by_name("u").unwrap()], vec![]).unwrap();
    let bottom = Morphism::from_names(c.composite.codomain().clone(), y.clone(), [("s", "v"), ("t", "w")], [("e", "ew")])
        .unwrap();
    assert!(matches!(lift_against(&c, &f, &top, &bottom), Err(CellError::NonCommutingSquare(_))));

    // dropping an edge from the domain breaks the lifting property
    let smaller = Arc::new(
        Presheaf::builder(spec.labels.clone()).state("v").state("w").build().unwrap(),
    );
    let g = Morphism::from_names(smaller, y, [("v", "v"), ("w", "w")], []).unwrap();
    let top = Morphism::new(c.base.clone(), g.domain().clone(), vec![StateIx(0)], vec![]).unwrap();
    assert!(matches!(lift_against(&c, &g, &top, &bottom), Err(CellError::NotAFunctionalBisim(_))));
}

#[test]
fn rsync_lifts_against_a_collapse() {
    let spec = ccs();
    let f = collapse(&spec);
    let x = f.domain().clone();
    let m = parse_term(&spec, x.as_ref(), "bang(var(v))").unwrap();
    let y = f.codomain();
    let r = parse_proof(&spec, y.as_ref(), "rsync(ax(ev), ax(ew))").unwrap();
    let r0 = preserve_bisim_lift(&spec, &f, &m, &r, 2).unwrap();
    assert_eq!(gsos_core::term::show_proof(&spec, x.as_ref(), &r0), "rsync(ax(ev), ax(ev1))");
    assert!(brute_force_preimages(&spec, &f, &m, &r).contains(&r0));
}

#[test]
fn preserve_with_identity_returns_input() {
    let spec = ccs();
    let f = collapse(&spec);
    let x = f.domain().clone();
    let id = Morphism::identity(x.clone());
    let m = parse_term(&spec, x.as_ref(), "par(var(u), var(v))").unwrap();
    for r in transitions(&spec, x.as_ref(), &m, None) {
        assert_eq!(preserve_bisim_lift(&spec, &id, &m, &r, 2).unwrap(), r);
    }
}

#[test]
fn preserve_through_a_collapse_of_sync() {
    let spec = ccs();
    let f = collapse(&spec);
    let x = f.domain().clone();
    let y = f.codomain().clone();
    let m = parse_term(&spec, x.as_ref(), "par(var(u), var(v))").unwrap();
    let fm = m.map(&mut |s| f.state(*s));
    let rs = transitions(&spec, y.as_ref(), &fm, None);
    assert!(!rs.is_empty());
    for r in rs {
        let r0 = preserve_bisim_lift(&spec, &f, &m, &r, 2).unwrap();
        assert!(brute_force_preimages(&spec, &f, &m, &r).contains(&r0));
    }
    let r = parse_proof(&spec, y.as_ref(), "sync(ax(eu), ax(ew))").unwrap();
    let r0 = preserve_bisim_lift(&spec, &f, &m, &r, 2).unwrap();
    assert_eq!(gsos_core::term::show_proof(&spec, x.as_ref(), &r0), "sync(ax(eu), ax(ev1))");
    let wrong = parse_term(&spec, x.as_ref(), "par(var(v), var(u))").unwrap();
    assert!(matches!(preserve_bisim_lift(&spec, &f, &wrong, &r, 2), Err(CellError::IncompatiblePair(_))));
}

#[test]
fn preserve_matches_brute_force_on_toy() {
    let spec = toy();
    let x = Arc::new(
        Presheaf::builder(spec.labels.clone())
            .state("p")
            .state("q")
            .state("r")
            .edge("a", "e1", "p", "q")
            .edge("a", "e2", "p", "r")
            .edge("b", "e3", "q", "q")
            .edge("b", "e4", "r", "r")
            .build()
            .unwrap(),
    );
    let y = Arc::new(
        Presheaf::builder(spec.labels.clone())
            .state("p")
            .state("q")
            .edge("a", "e", "p", "q")
            .edge("b", "l", "q", "q")
            .build()
            .unwrap(),
    );
    let f = Morphism::from_names(
        x.clone(),
        y.clone(),
        [("p", "p"), ("q", "q"), ("r", "q")],
        [("e1", "e"), ("e2", "e"), ("e3", "l"), ("e4", "l")],
    )
    .unwrap();
    for text in ["var(p)", "f(var(p))", "f(f(var(p)))"] {
        let m = parse_term(&spec, x.as_ref(), text).unwrap();
        let fm = m.map(&mut |s| f.state(*s));
        for r in transitions(&spec, y.as_ref(), &fm, None) {
            let r0 = preserve_bisim_lift(&spec, &f, &m, &r, 2).unwrap();
            let all = brute_force_preimages(&spec, &f, &m, &r);
            assert_eq!(all[0], r0);
        }
    }
}

#[test]
fn eta_square_is_cartesian() {
    for spec in [ccs(), toy()] {
        for case in 0..4 {
            let x = Arc::new(random_presheaf(&mut case_rng(5, case), &spec.labels, 3, 0.3));
            assert!(check_eta_cartesian(&spec, &x, 2).unwrap().is_pullback());
        }
    }
}

#[test]
fn mu_square_is_cartesian_on_small_inputs() {
    let spec = toy();
    let x = Arc::new(random_presheaf(&mut case_rng(9, 1), &spec.labels, 3, 0.4));
    let rep = check_mu_cartesian(&spec, &x, 2).unwrap();
    assert!(rep.is_pullback(), "{rep:?}");
    let spec = ccs();
    let ya = Arc::new(Presheaf::representable_named(spec.labels.clone(), "a").unwrap());
    let rep = check_mu_cartesian(&spec, &ya, 1).unwrap();
    assert!(rep.is_pullback());
    assert!(rep.objects.iter().all(|o| o.checked > 0));
}

#[test]
fn unique_r0_examples() {
    let spec = ccs();
    let x = Arc::new(
        Presheaf::builder(spec.labels.clone())
            .state("x")
            .state("y")
            .edge("a_bar", "e", "x", "y")
            .edge("a", "f", "x", "y")
            .build()
            .unwrap(),
    );
    let one = unit(&spec);
    let free1 = Free::new(&spec, &one);
    let rr = parse_element(&spec, &free1, "ax(ax(a))").unwrap();
    let r = parse_element(&spec, x.as_ref(), "ax(f)").unwrap();
    let free_x = Free::new(&spec, x.as_ref());
    let r0 = unique_r0(&spec, &x, &rr, &r).unwrap();
    assert_eq!(r0, parse_element(&spec, &free_x, "ax(ax(f))").unwrap());

    let rr = parse_element(&spec, &free1, "lpar(ax(ax(a_bar)), term(var(var(*))))").unwrap();
    let r = parse_element(&spec, x.as_ref(), "lpar(ax(e), term(var(x)))").unwrap();
    let r0 = unique_r0(&spec, &x, &rr, &r).unwrap();
    assert_eq!(r0, parse_element(&spec, &free_x, "lpar(ax(ax(e)), term(var(var(x))))").unwrap());
    assert_eq!(fiber_t2(&spec, &x, &rr).unwrap().iter().filter(|z| gsos_core::term::mu_element(z) == r).count(), 1);

    let bad = parse_element(&spec, x.as_ref(), "ax(e)").unwrap();
    assert!(matches!(unique_r0(&spec, &x, &rr, &bad), Err(CellError::IncompatiblePair(_))));
}
