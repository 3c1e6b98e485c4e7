use std::sync::Arc;

use gsos_core::cellularity::{cell_certificate, verify_certificate};
use gsos_core::familial::{decompose, recompose, strip, unit};
use gsos_core::lts::all_morphisms;
use gsos_core::random::{case_rng, random_element, random_presheaf, random_proof};
use gsos_core::spec::{ccs, pretty_print, parse_spec, toy};
use gsos_core::term::{parse_element, show_element, Element};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_elements_parse_back(seed in any::<u64>(), d in 0usize..4) {
        let spec = ccs();
        let mut rng = case_rng(seed, 0);
        let x = random_presheaf(&mut rng, &spec.labels, 4, 0.3);
        if let Some(z) = random_element(&mut rng, &spec, &x, d) {
            let text = show_element(&spec, &x, &z);
            prop_assert_eq!(parse_element(&spec, &x, &text).unwrap(), z);
        }
    }

    #[test]
    fn t_preserves_composition(seed in any::<u64>(), d in 0usize..4) {
        let spec = ccs();
        let mut rng = case_rng(seed, 1);
        let x = Arc::new(random_presheaf(&mut rng, &spec.labels, 3, 0.3));
        let y = Arc::new(random_presheaf(&mut rng, &spec.labels, 3, 0.5));
        let z = Arc::new(random_presheaf(&mut rng, &spec.labels, 3, 0.7));
        let fs = all_morphisms(&x, &y, 4);
        let gs = all_morphisms(&y, &z, 4);
        prop_assume!(!fs.is_empty() && !gs.is_empty());
        let Some(e) = random_element(&mut rng, &spec, &x, d) else { return Ok(()) };
        let (f, g) = (&fs[0], &gs[gs.len() - 1]);
        let gf = g.after(f).unwrap();
        let apply = |h: &gsos_core::lts::Morphism, e: &Element<_, _>| e.map(&mut |s| h.state(*s), &mut |a| h.edge(*a));
        prop_assert_eq!(apply(&gf, &e), apply(g, &apply(f, &e)));
        let id = gsos_core::lts::Morphism::identity(x.clone());
        prop_assert_eq!(apply(&id, &e), e);
    }

    #[test]
    fn decomposition_round_trips(seed in any::<u64>(), d in 0usize..5) {
        let spec = if seed % 2 == 0 { ccs() } else { toy() };
        let mut rng = case_rng(seed, 2);
        let x = Arc::new(random_presheaf(&mut rng, &spec.labels, 5, 0.3));
        let Some(z) = random_element(&mut rng, &spec, &x, d) else { return Ok(()) };
        let dz = decompose(&spec, &x, &z).unwrap();
        prop_assert_eq!(&dz.shape, &strip(&spec, x.as_ref(), &z));
        prop_assert_eq!(recompose(&dz).unwrap(), z);
    }

    #[test]
    fn certificates_verify(seed in any::<u64>(), d in 1usize..4) {
        let spec = ccs();
        let one = unit(&spec);
        let vars = [gsos_core::lts::StateIx(0)];
        if let Some(r) = random_proof(&mut case_rng(seed, 3), &spec, &one, &vars, d) {
            let c = cell_certificate(&spec, &r).unwrap();
            prop_assert!(verify_certificate(&c).is_ok());
        }
    }
}

#[test]
fn bundled_specs_pretty_print_stably() {
    for spec in [ccs(), toy()] {
        let text = pretty_print(&spec);
        let again = parse_spec(&text).unwrap();
        assert_eq!(again.rules.len(), spec.rules.len());
        assert_eq!(pretty_print(&again), text);
    }
}
