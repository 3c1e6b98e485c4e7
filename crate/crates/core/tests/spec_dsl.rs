use gsos_core::spec::{
    ccs, expand_templates, parse_spec, pretty_print, toy, validate, ErrorKind, GsosSpec, RuleTerm, RuleVar,
};

fn kinds(text: &str) -> Vec<ErrorKind> {
    parse_spec(text).unwrap_err().kinds()
}

const HEAD: &str = "labels a, a_bar, tau ;\nclass Act = { a, a_bar, tau } ;\nop nil : 0 ;\nop f : 1 ;\nop g : 1 ;\nop par : 2 ;\nop bang : 1 ;\n";

fn with_head(rules: &str) -> String {
    format!("{HEAD}{rules}")
}

#[test]
fn worked_example_system_parses_cleanly() {
    let spec = ccs();
    assert!(validate(&spec).is_empty());
    assert_eq!(spec.labels.names(), ["a", "a_bar", "tau"]);
    assert_eq!(spec.signature.len(), 7);
}

#[test]
fn left_parallel_expands_once_per_label() {
    let spec = ccs();
    let lpar: Vec<_> = spec.rules_with_base("lpar").collect();
    assert_eq!(lpar.len(), 3);
    for (r, l) in lpar.iter().zip(["a", "a_bar", "tau"]) {
        let rule = spec.rule(*r);
        assert_eq!(rule.name, format!("lpar@{l}"));
        assert_eq!(rule.label, spec.label(l).unwrap());
        assert_eq!(rule.premises, vec![vec![spec.label(l).unwrap()], vec![]]);
        assert_eq!(
            rule.target,
            RuleTerm::App(spec.op("par").unwrap(), vec![RuleTerm::Var(RuleVar::Prem(0, 0)), RuleTerm::Var(RuleVar::Arg(1))])
        );
    }
}

#[test]
fn replicated_sync_has_two_premises_on_one_argument() {
    let spec = ccs();
    let r = spec.rule(spec.rule_by_name("rsync@a").unwrap());
    assert_eq!(r.premise_counts(), vec![2]);
    assert_eq!(r.premises[0], vec![spec.label("a_bar").unwrap(), spec.label("a").unwrap()]);
    assert_eq!(r.label, spec.label("tau").unwrap());
}

#[test]
fn turnstile_form_is_accepted() {
    let text = with_head(
        "rule lpar [forall L in Act] : x1 -[L]-> y1_1 |- par(x1, x2) -[L]-> par(y1_1, x2) ;\n\
         rule rsync : x1 -[a_bar]-> y1_1 ; x1 -[a]-> y1_2 |- bang(x1) -[tau]-> par(bang(x1), par(y1_1, y1_2)) ;",
    );
    let spec = parse_spec(&text).unwrap();
    assert_eq!(spec.rules.len(), 4);
    assert_eq!(spec.rule(spec.rule_by_name("rsync").unwrap()).premise_counts(), vec![2]);
}

#[test]
fn non_compositional_source_is_rejected() {
    let text = with_head("rule rho : premises x1 -[a]-> y1_1 ; conclusion f(g(x1)) -[a]-> f(g(y1_1)) ;");
    assert_eq!(kinds(&text), vec![ErrorKind::NonGsosSource]);
}

#[test]
fn source_mutations_are_all_rejected() {
    for src in ["par(x1, x1)", "par(x2, x1)", "par(x1, nil)", "par(x1, y)", "par(x1, f(x2))", "x1"] {
        let text = with_head(&format!("rule r : conclusion {src} -[a]-> nil ;"));
        assert_eq!(kinds(&text), vec![ErrorKind::NonGsosSource], "source {src}");
    }
}

#[test]
fn premise_subject_out_of_range() {
    let text = with_head("rule r : premises x3 -[a]-> y ; conclusion par(x1, x2) -[a]-> y ;");
    assert_eq!(kinds(&text), vec![ErrorKind::ArityMismatch]);
}

#[test]
fn target_with_missing_premise_variable() {
    let text = with_head("rule r : premises x1 -[a]-> y1_1 ; conclusion f(x1) -[a]-> par(y1_1, y1_2) ;");
    assert_eq!(kinds(&text), vec![ErrorKind::UnboundTargetVariable]);
}

#[test]
fn duplicate_binders_and_unknown_labels() {
    let dup = with_head("rule r : premises x1 -[a]-> x1 ; conclusion f(x1) -[a]-> x1 ;");
    assert_eq!(kinds(&dup), vec![ErrorKind::DuplicateBoundVariable]);
    let dup2 = with_head("rule r : premises x1 -[a]-> y ; x2 -[a]-> y ; conclusion par(x1, x2) -[a]-> y ;");
    assert_eq!(kinds(&dup2), vec![ErrorKind::DuplicateBoundVariable]);
    let unk = with_head("rule r : premises x1 -[b]-> y ; conclusion f(x1) -[a]-> y ;");
    assert_eq!(kinds(&unk), vec![ErrorKind::UnknownLabel]);
}

#[test]
fn arity_mismatch_in_target_and_conclusion() {
    assert_eq!(kinds(&with_head("rule r : conclusion f(x1) -[a]-> par(x1) ;")), vec![ErrorKind::ArityMismatch]);
    assert_eq!(kinds(&with_head("rule r : conclusion f(x1, x2) -[a]-> x1 ;")), vec![ErrorKind::ArityMismatch]);
}

#[test]
fn syntax_errors_carry_positions() {
    let e = parse_spec("labels a ;\nop f 1 ;").unwrap_err();
    assert_eq!(e.kinds(), vec![ErrorKind::SyntaxError]);
    assert_eq!((e.0[0].line, e.0[0].col), (2, 6));
    assert_eq!(kinds(""), vec![ErrorKind::SyntaxError]);
    assert_eq!(kinds("# only a comment\n"), vec![ErrorKind::SyntaxError]);
}

#[test]
fn expansion_counts() {
    let one = with_head("rule r [forall L in Act] : conclusion f(x1) -[L]-> x1 ;");
    assert_eq!(expand_templates(&parse_spec(&one).unwrap()).unwrap().len(), 3);
    let none = with_head("rule r : conclusion f(x1) -[a]-> x1 ;");
    assert_eq!(parse_spec(&none).unwrap().rules.len(), 1);
    let two = "labels a, b ;\nclass C = { a, b } ;\nop f : 2 ;\n\
               rule r [forall L in C, forall M in C] : premises x1 -[L]-> y ; x2 -[M]-> z ; conclusion f(x1, x2) -[L]-> f(y, z) ;";
    let spec = parse_spec(two).unwrap();
    let names: Vec<&str> = spec.rules.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["r@a@a", "r@a@b", "r@b@a", "r@b@b"]);
}

#[test]
fn expansion_is_deduplicated() {
    // the label variable does not occur, so all instances coincide
    let text = with_head("rule r [forall L in Act] : conclusion f(x1) -[a]-> x1 ;");
    assert_eq!(parse_spec(&text).unwrap().rules.len(), 1);
}

#[test]
fn empty_class_is_reported() {
    let text = "labels a ;\nclass E = { } ;\nop f : 1 ;\nrule r [forall L in E] : conclusion f(x1) -[L]-> x1 ;";
    assert_eq!(kinds(text), vec![ErrorKind::EmptyLabelClass]);
}

#[test]
fn validate_flags_hand_built_rules() {
    let mut spec = ccs();
    let par = spec.op("par").unwrap();
    let r = spec.rules.iter_mut().find(|r| r.op == par).unwrap();
    r.premises.push(vec![]);
    let v = validate(&spec);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ErrorKind::ArityMismatch);

    let mut spec = ccs();
    let id = spec.rule_by_name("lpar@a").unwrap();
    spec.rules[id.0].target = RuleTerm::Var(RuleVar::Prem(0, 1));
    let v = validate(&spec);
    assert_eq!((v[0].rule.as_str(), v[0].kind), ("lpar@a", ErrorKind::UnboundTargetVariable));
}

fn round_trip(spec: &GsosSpec) {
    let text = pretty_print(spec);
    let back = parse_spec(&text).unwrap();
    assert_eq!(&back, spec, "{text}");
}

#[test]
fn pretty_print_round_trips() {
    round_trip(&ccs());
    round_trip(&toy());
    round_trip(&parse_spec(&with_head("rule k : conclusion nil -[tau]-> nil() ;")).unwrap());
}

#[test]
fn template_names_resolve_from_premise_labels() {
    let spec = ccs();
    let a = spec.label("a").unwrap();
    let r = spec.resolve_rule("lpar", Some(&[vec![a], vec![]])).unwrap();
    assert_eq!(spec.rule(r).name, "lpar@a");
    assert_eq!(spec.display_name(r), "lpar");
    let pref = spec.rule_by_name("pref@a").unwrap();
    assert_eq!(spec.display_name(pref), "pref@a");
}
