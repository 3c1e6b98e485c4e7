use std::fmt::Write as _;

use super::{GsosSpec, Template, TemplateTerm};

fn term(t: &TemplateTerm, out: &mut String) {
    match t {
        TemplateTerm::Name(n) => out.push_str(n),
        TemplateTerm::App(p, ch) => {
            out.push_str(&p.0);
            out.push('(');
            for (i, c) in ch.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                term(c, out);
            }
            out.push(')');
        }
    }
}

fn rule(t: &Template, out: &mut String) {
    let _ = write!(out, "rule {}", t.name);
    if !t.binders.is_empty() {
        let bs: Vec<String> = t.binders.iter().map(|(v, c)| format!("forall {v} in {c}")).collect();
        let _ = write!(out, " [{}]", bs.join(", "));
    }
    out.push_str(" :");
    if !t.premises.is_empty() {
        out.push_str(" premises");
        for (k, p) in t.premises.iter().enumerate() {
            let sep = if k == 0 { "" } else { " ;" };
            let _ = write!(out, "{sep} {} -[{}]-> {}", t.args[p.arg], p.label, p.target);
        }
        out.push_str(" ;");
    }
    let _ = write!(out, " conclusion {}", t.op);
    if !t.args.is_empty() {
        let _ = write!(out, "({})", t.args.join(", "));
    }
    let _ = write!(out, " -[{}]-> ", t.label);
    term(&t.target, out);
    out.push_str(" ;\n");
}

/// Renders a spec in the `.gsos` syntax; parsing the output gives back an equal spec.
pub fn pretty_print(spec: &GsosSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "labels {} ;", spec.labels.names().join(", "));
    for (c, ms) in &spec.classes {
        let _ = writeln!(out, "class {c} = {{ {} }} ;", ms.join(", "));
    }
    for d in spec.signature.decls() {
        let _ = writeln!(out, "op {} : {} ;", d.name, d.arity);
    }
    for t in &spec.templates {
        rule(t, &mut out);
    }
    out
}
