use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::parser::{Decl, Pos, RawRule, RawTerm};
use super::{
    ErrorKind, GsosSpec, ParseErrors, Pattern, Rule, RuleTerm, RuleVar, Signature, SpecError, Template,
    TemplatePremise, TemplateTerm, Violation,
};
use crate::lts::{Label, LabelSet};

fn err(kind: ErrorKind, pos: &Pos, msg: impl Into<String>) -> SpecError {
    SpecError::at(kind, pos.line, pos.col, msg)
}

/// Index of `x{k}` as a 0-based argument position.
fn arg_index(name: &str) -> Option<usize> {
    let k: usize = name.strip_prefix('x')?.parse().ok()?;
    (k >= 1 && name == format!("x{k}")).then(|| k - 1)
}

pub(crate) fn build(decls: Vec<Decl>) -> Result<GsosSpec, ParseErrors> {
    let mut errors = Vec::new();
    let mut label_names: Vec<String> = Vec::new();
    let mut first_pos = None;
    for d in &decls {
        if let Decl::Labels(ls) = d {
            for (l, p) in ls {
                first_pos.get_or_insert(p.clone());
                if label_names.contains(l) {
                    errors.push(err(ErrorKind::DuplicateDeclaration, p, format!("label `{l}` declared twice")));
                } else {
                    label_names.push(l.clone());
                }
            }
        }
    }
    if label_names.is_empty() {
        return Err(ParseErrors(vec![SpecError::at(ErrorKind::SyntaxError, 1, 1, "no labels declared")]));
    }
    let labels = Arc::new(LabelSet::new(label_names).expect("non-empty and distinct"));

    let mut classes: Vec<(String, Vec<String>)> = Vec::new();
    let mut signature = Signature::new();
    let mut templates = Vec::new();
    for d in decls {
        match d {
            Decl::Labels(_) => {}
            Decl::Class { name, members, pos } => {
                if classes.iter().any(|(c, _)| *c == name) {
                    errors.push(err(ErrorKind::DuplicateDeclaration, &pos, format!("class `{name}` declared twice")));
                    continue;
                }
                for m in &members {
                    if labels.lookup(m).is_none() {
                        errors.push(err(ErrorKind::UnknownLabel, &pos, format!("class `{name}` lists `{m}`")));
                    }
                }
                classes.push((name, members));
            }
            Decl::Op { name, arity, pos } => {
                if signature.add(name.clone(), arity).is_none() {
                    errors.push(err(ErrorKind::DuplicateDeclaration, &pos, format!("operation `{name}` declared twice")));
                }
            }
            Decl::Rule(r) => {
                if templates.iter().any(|t: &Template| t.name == r.name) {
                    errors.push(
                        err(ErrorKind::DuplicateDeclaration, &r.pos, "rule name used twice").in_rule(&r.name),
                    );
                    continue;
                }
                match template(&r, &classes) {
                    Ok(t) => templates.push(t),
                    Err(es) => errors.extend(es.into_iter().map(|e| e.in_rule(&r.name))),
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(ParseErrors(errors));
    }
    let spec = GsosSpec::from_parts(labels, classes, signature, templates, vec![]);
    let rules = expand_templates(&spec)?;
    let spec = GsosSpec::from_parts(spec.labels, spec.classes, spec.signature, spec.templates, rules);
    let violations = validate(&spec);
    if let Some(v) = violations.first() {
        return Err(ParseErrors(vec![SpecError::at(v.kind, 1, 1, v.message.clone()).in_rule(&v.rule)]));
    }
    Ok(spec)
}

fn template(r: &RawRule, classes: &[(String, Vec<String>)]) -> Result<Template, Vec<SpecError>> {
    let mut errors = Vec::new();
    let mut binders = Vec::new();
    for (v, c, p) in &r.binders {
        if !classes.iter().any(|(n, _)| n == c) {
            errors.push(err(ErrorKind::UnknownClass, p, format!("no class `{c}`")));
        }
        if binders.iter().any(|(b, _)| b == v) {
            errors.push(err(ErrorKind::DuplicateBoundVariable, p, format!("label variable `{v}` bound twice")));
        }
        binders.push((v.clone(), c.clone()));
    }

    let src = &r.source;
    let args: Vec<String> = match &src.args {
        None => vec![],
        Some(children) => {
            let ok = children
                .iter()
                .enumerate()
                .all(|(k, c)| c.args.is_none() && arg_index(&c.name) == Some(k));
            if !ok {
                let shape = show_raw(src);
                return Err(vec![err(
                    ErrorKind::NonGsosSource,
                    &src.pos,
                    format!("conclusion source `{shape}` is not an operation applied to x1, ..., xn"),
                )]);
            }
            children.iter().map(|c| c.name.clone()).collect()
        }
    };
    if src.args.is_none() && (arg_index(&src.name).is_some()) {
        return Err(vec![err(ErrorKind::NonGsosSource, &src.pos, "conclusion source is a bare variable")]);
    }
    let n = args.len();

    let mut bound: HashSet<String> = args.iter().cloned().collect();
    let mut premises = Vec::new();
    for p in &r.premises {
        let subj = &p.subject;
        let arg = match (&subj.args, arg_index(&subj.name)) {
            (None, Some(k)) if k < n => k,
            (None, Some(k)) => {
                errors.push(err(
                    ErrorKind::ArityMismatch,
                    &subj.pos,
                    format!("premise subject x{} on an operation of arity {n}", k + 1),
                ));
                continue;
            }
            _ => {
                errors.push(err(
                    ErrorKind::NonGsosPremise,
                    &subj.pos,
                    format!("premise subject `{}` is not a source variable", show_raw(subj)),
                ));
                continue;
            }
        };
        let tgt = &p.target;
        if tgt.args.is_some() {
            errors.push(err(ErrorKind::NonGsosPremise, &tgt.pos, "premise target must be a variable"));
            continue;
        }
        if !bound.insert(tgt.name.clone()) {
            errors.push(err(
                ErrorKind::DuplicateBoundVariable,
                &tgt.pos,
                format!("variable `{}` bound twice", tgt.name),
            ));
            continue;
        }
        premises.push(TemplatePremise { arg, label: Pattern(p.label.clone()), target: tgt.name.clone() });
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    premises.sort_by_key(|p| p.arg);
    Ok(Template {
        name: r.name.clone(),
        binders,
        op: Pattern(src.name.clone()),
        args,
        label: Pattern(r.label.clone()),
        premises,
        target: template_term(&r.target),
        line: r.pos.line,
    })
}

fn show_raw(t: &RawTerm) -> String {
    match &t.args {
        None => t.name.clone(),
        Some(a) => format!("{}({})", t.name, a.iter().map(show_raw).collect::<Vec<_>>().join(", ")),
    }
}

fn template_term(t: &RawTerm) -> TemplateTerm {
    match &t.args {
        None => TemplateTerm::Name(t.name.clone()),
        Some(a) => TemplateTerm::App(Pattern(t.name.clone()), a.iter().map(template_term).collect()),
    }
}

fn assignments(t: &Template, spec: &GsosSpec) -> Result<Vec<Vec<(String, String)>>, SpecError> {
    let mut out: Vec<Vec<(String, String)>> = vec![vec![]];
    for (v, c) in &t.binders {
        let members = &spec
            .classes
            .iter()
            .find(|(n, _)| n == c)
            .ok_or_else(|| SpecError::at(ErrorKind::UnknownClass, t.line, 1, format!("no class `{c}`")))?
            .1;
        if members.is_empty() {
            return Err(SpecError::at(ErrorKind::EmptyLabelClass, t.line, 1, format!("class `{c}` is empty")));
        }
        out = out
            .into_iter()
            .flat_map(|env| {
                members.iter().map(move |m| {
                    let mut e = env.clone();
                    e.push((v.clone(), m.clone()));
                    e
                })
            })
            .collect();
    }
    Ok(out)
}

/// Expands every template over its label classes, in declaration order
/// then class order; identical rules are kept once.
pub fn expand_templates(spec: &GsosSpec) -> Result<Vec<Rule>, ParseErrors> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut errors = Vec::new();
    for t in &spec.templates {
        let envs = match assignments(t, spec) {
            Ok(e) => e,
            Err(e) => {
                errors.push(e.in_rule(&t.name));
                continue;
            }
        };
        for env in envs {
            match instantiate(t, &env, spec) {
                Ok(r) => {
                    if rules.iter().any(|o| o.op == r.op && o.label == r.label && o.premises == r.premises && o.target == r.target)
                    {
                        continue;
                    }
                    rules.push(r);
                }
                Err(e) => errors.push(e.in_rule(&t.name)),
            }
        }
    }
    if errors.is_empty() {
        Ok(rules)
    } else {
        Err(ParseErrors(errors))
    }
}

fn instantiate(t: &Template, env: &[(String, String)], spec: &GsosSpec) -> Result<Rule, SpecError> {
    let at = |kind, msg: String| SpecError::at(kind, t.line, 1, msg);
    let label = |p: &Pattern| -> Result<Label, SpecError> {
        let s = p.instantiate(env);
        spec.labels.lookup(&s).ok_or_else(|| at(ErrorKind::UnknownLabel, format!("label `{s}` is not declared")))
    };
    let op_name = t.op.instantiate(env);
    let op = spec.signature.lookup(&op_name).ok_or_else(|| {
        at(ErrorKind::UnknownOperation, format!("operation `{op_name}` is not declared"))
    })?;
    let n = spec.signature.arity(op);
    if n != t.args.len() {
        return Err(at(
            ErrorKind::ArityMismatch,
            format!("`{op_name}` has arity {n} but is applied to {} arguments", t.args.len()),
        ));
    }
    let mut premises = vec![Vec::new(); n];
    let mut vars: HashMap<&str, RuleVar> = HashMap::new();
    for (i, x) in t.args.iter().enumerate() {
        vars.insert(x, RuleVar::Arg(i));
    }
    for p in &t.premises {
        let j = premises[p.arg].len();
        premises[p.arg].push(label(&p.label)?);
        vars.insert(&p.target, RuleVar::Prem(p.arg, j));
    }
    let target = rule_term(&t.target, env, &vars, spec, t.line)?;
    let name = if env.is_empty() {
        t.name.clone()
    } else {
        let vals: Vec<&str> = env.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}@{}", t.name, vals.join("@"))
    };
    Ok(Rule { name, base: t.name.clone(), op, label: label(&t.label)?, premises, target })
}

fn rule_term(
    t: &TemplateTerm,
    env: &[(String, String)],
    vars: &HashMap<&str, RuleVar>,
    spec: &GsosSpec,
    line: usize,
) -> Result<RuleTerm, SpecError> {
    let at = |kind, msg: String| SpecError::at(kind, line, 1, msg);
    match t {
        TemplateTerm::Name(n) => {
            if let Some(v) = vars.get(n.as_str()) {
                return Ok(RuleTerm::Var(*v));
            }
            let name = Pattern(n.clone()).instantiate(env);
            match spec.signature.lookup(&name) {
                Some(op) if spec.signature.arity(op) == 0 => Ok(RuleTerm::App(op, vec![])),
                Some(op) => Err(at(
                    ErrorKind::ArityMismatch,
                    format!("`{name}` has arity {} but is used as a constant", spec.signature.arity(op)),
                )),
                None => Err(at(ErrorKind::UnboundTargetVariable, format!("`{n}` is not bound in the target"))),
            }
        }
        TemplateTerm::App(p, ch) => {
            let name = p.instantiate(env);
            let op = spec
                .signature
                .lookup(&name)
                .ok_or_else(|| at(ErrorKind::UnknownOperation, format!("operation `{name}` is not declared")))?;
            if spec.signature.arity(op) != ch.len() {
                return Err(at(
                    ErrorKind::ArityMismatch,
                    format!("`{name}` has arity {} but is applied to {} arguments", spec.signature.arity(op), ch.len()),
                ));
            }
            let ch = ch.iter().map(|c| rule_term(c, env, vars, spec, line)).collect::<Result<_, _>>()?;
            Ok(RuleTerm::App(op, ch))
        }
    }
}

/// Checks every rule clause; an empty result means the rules are valid.
pub fn validate(spec: &GsosSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for r in &spec.rules {
        let mut v = |kind, message: String| out.push(Violation { rule: r.name.clone(), kind, message });
        if !names.insert(r.name.as_str()) {
            v(ErrorKind::DuplicateDeclaration, "rule name used twice".into());
        }
        if r.op.0 >= spec.signature.len() {
            v(ErrorKind::UnknownOperation, "operation is not declared".into());
            continue;
        }
        let n = spec.signature.arity(r.op);
        if r.premises.len() != n {
            v(
                ErrorKind::ArityMismatch,
                format!("premises given for {} arguments, operation has arity {n}", r.premises.len()),
            );
        }
        let nl = spec.labels.len();
        if r.label.0 >= nl || r.premises.iter().flatten().any(|l| l.0 >= nl) {
            v(ErrorKind::UnknownLabel, "label outside the declared set".into());
        }
        let mut vars = Vec::new();
        r.target.vars(&mut vars);
        for var in vars {
            let bound = match var {
                RuleVar::Arg(i) => i < n,
                RuleVar::Prem(i, j) => r.premises.get(i).is_some_and(|p| j < p.len()),
            };
            if !bound {
                let shown = match var {
                    RuleVar::Arg(i) => format!("x{}", i + 1),
                    RuleVar::Prem(i, j) => format!("y{}_{}", i + 1, j + 1),
                };
                v(ErrorKind::UnboundTargetVariable, format!("target uses unbound `{shown}`"));
            }
        }
        check_arities(&r.target, spec, &mut |m| v(ErrorKind::ArityMismatch, m));
    }
    out
}

fn check_arities(t: &RuleTerm, spec: &GsosSpec, report: &mut impl FnMut(String)) {
    if let RuleTerm::App(op, ch) = t {
        if op.0 >= spec.signature.len() {
            report("target uses an undeclared operation".into());
            return;
        }
        if spec.signature.arity(*op) != ch.len() {
            report(format!("`{}` applied to {} arguments in the target", spec.signature.name(*op), ch.len()));
        }
        ch.iter().for_each(|c| check_arities(c, spec, report));
    }
}
