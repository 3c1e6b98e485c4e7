use super::{check_proof, check_term, label, Ambient, Element, Proof, ProofArg, Term, TermError};
use crate::lts::Label;
use crate::spec::GsosSpec;

pub(crate) fn write_term<A: Ambient>(spec: &GsosSpec, amb: &A, t: &Term<A::S>, out: &mut String) {
    match t {
        Term::Var(v) => {
            out.push_str("var(");
            amb.write_state(v, out);
            out.push(')');
        }
        Term::App(op, ch) => {
            out.push_str(spec.signature.name(*op));
            if !ch.is_empty() {
                out.push('(');
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(spec, amb, c, out);
                }
                out.push(')');
            }
        }
    }
}

pub(crate) fn write_proof<A: Ambient>(spec: &GsosSpec, amb: &A, p: &Proof<A::S, A::E>, out: &mut String) {
    match p {
        Proof::Axiom(e) => {
            out.push_str("ax(");
            amb.write_edge(e, out);
            out.push(')');
        }
        Proof::Node(r, args) => {
            out.push_str(spec.display_name(*r));
            let mut first = true;
            let mut sep = |out: &mut String| {
                out.push_str(if std::mem::take(&mut first) { "(" } else { ", " });
            };
            for a in args {
                match a {
                    ProofArg::Term(t) => {
                        sep(out);
                        out.push_str("term(");
                        write_term(spec, amb, t, out);
                        out.push(')');
                    }
                    ProofArg::Premises(ps) => {
                        for q in ps {
                            sep(out);
                            write_proof(spec, amb, q, out);
                        }
                    }
                }
            }
            if !first {
                out.push(')');
            }
        }
    }
}

/// Concrete syntax of a term, e.g. `par(pref_a(nil), var(x))`.
pub fn show_term<A: Ambient>(spec: &GsosSpec, amb: &A, t: &Term<A::S>) -> String {
    let mut s = String::new();
    write_term(spec, amb, t, &mut s);
    s
}

/// Concrete syntax of a proof, e.g. `sync(lpar(ax(e1), term(var(x2))), ax(e2))`.
pub fn show_proof<A: Ambient>(spec: &GsosSpec, amb: &A, p: &Proof<A::S, A::E>) -> String {
    let mut s = String::new();
    write_proof(spec, amb, p, &mut s);
    s
}

pub fn show_element<A: Ambient>(spec: &GsosSpec, amb: &A, z: &Element<A::S, A::E>) -> String {
    match z {
        Element::State(t) => show_term(spec, amb, t),
        Element::Edge(p) => show_proof(spec, amb, p),
    }
}

struct Cursor<'t> {
    s: &'t str,
    i: usize,
}

impl<'t> Cursor<'t> {
    fn ws(&mut self) {
        while let Some(c) = self.s[self.i..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.i += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.s[self.i..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn error(&self, msg: &str) -> TermError {
        TermError::Syntax(format!("{msg} at offset {} in `{}`", self.i, self.s))
    }

    fn ident(&mut self) -> Result<&'t str, TermError> {
        self.ws();
        let start = self.i;
        while let Some(c) = self.s[self.i..].chars().next() {
            if c.is_whitespace() || "(),".contains(c) {
                break;
            }
            self.i += c.len_utf8();
        }
        if self.i == start {
            return Err(self.error("expected a name"));
        }
        Ok(&self.s[start..self.i])
    }

    /// Text up to the parenthesis closing an already consumed `(`.
    fn balanced(&mut self) -> Result<&'t str, TermError> {
        let start = self.i;
        let mut depth = 0usize;
        for (k, c) in self.s[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    self.i = start + k + 1;
                    return Ok(self.s[start..start + k].trim());
                }
                ')' => depth -= 1,
                _ => {}
            }
        }
        Err(self.error("unbalanced parentheses"))
    }

    fn finish(&mut self) -> Result<(), TermError> {
        if self.peek().is_some() {
            return Err(self.error("trailing input"));
        }
        Ok(())
    }
}

fn term<A: Ambient>(spec: &GsosSpec, amb: &A, cur: &mut Cursor<'_>) -> Result<Term<A::S>, TermError> {
    let name = cur.ident()?;
    if name == "var" {
        cur.expect('(')?;
        let inner = cur.balanced()?;
        return Ok(Term::Var(amb.read_state(inner)?));
    }
    let op = spec.op(name).ok_or_else(|| TermError::UnknownOperation(name.to_string()))?;
    let mut ch = Vec::new();
    if cur.eat('(') {
        loop {
            ch.push(term(spec, amb, cur)?);
            if !cur.eat(',') {
                break;
            }
        }
        cur.expect(')')?;
    }
    let t = Term::App(op, ch);
    check_term(spec, &t)?;
    Ok(t)
}

enum Item<S, E> {
    Term(Term<S>),
    Proof(Proof<S, E>),
}

fn proof<A: Ambient>(spec: &GsosSpec, amb: &A, cur: &mut Cursor<'_>) -> Result<Proof<A::S, A::E>, TermError> {
    let name = cur.ident()?;
    if name == "ax" {
        cur.expect('(')?;
        let inner = cur.balanced()?;
        return Ok(Proof::Axiom(amb.read_edge(inner)?));
    }
    let mut items = Vec::new();
    if cur.eat('(') {
        loop {
            let save = cur.i;
            let head = cur.ident()?;
            if head == "term" {
                cur.expect('(')?;
                items.push(Item::Term(term(spec, amb, cur)?));
                cur.expect(')')?;
            } else {
                cur.i = save;
                items.push(Item::Proof(proof(spec, amb, cur)?));
            }
            if !cur.eat(',') {
                break;
            }
        }
        cur.expect(')')?;
    }
    let candidates: Vec<_> = match spec.rule_by_name(name) {
        Some(r) => vec![r],
        None => spec.rules_with_base(name).collect(),
    };
    if candidates.is_empty() {
        return Err(TermError::UnknownRule(name.to_string()));
    }
    let mut hits = Vec::new();
    for r in candidates {
        if let Some(args) = group(spec, amb, &spec.rule(r).premises, &items) {
            hits.push(Proof::Node(r, args));
        }
    }
    match hits.len() {
        1 => Ok(hits.pop().expect("one hit")),
        0 => Err(TermError::MalformedProof(format!("arguments of `{name}` match no rule instance"))),
        _ => Err(TermError::AmbiguousRule(name.to_string())),
    }
}

fn group<A: Ambient>(
    spec: &GsosSpec,
    amb: &A,
    premises: &[Vec<Label>],
    items: &[Item<A::S, A::E>],
) -> Option<Vec<ProofArg<A::S, A::E>>> {
    let mut k = 0;
    let mut args = Vec::new();
    for labels in premises {
        if labels.is_empty() {
            match items.get(k)? {
                Item::Term(t) => args.push(ProofArg::Term(t.clone())),
                Item::Proof(_) => return None,
            }
            k += 1;
        } else {
            let mut ps = Vec::new();
            for l in labels {
                match items.get(k)? {
                    Item::Proof(p) if label(spec, amb, p) == *l => ps.push(p.clone()),
                    _ => return None,
                }
                k += 1;
            }
            args.push(ProofArg::Premises(ps));
        }
    }
    (k == items.len()).then_some(args)
}

pub fn parse_term<A: Ambient>(spec: &GsosSpec, amb: &A, text: &str) -> Result<Term<A::S>, TermError> {
    let mut cur = Cursor { s: text, i: 0 };
    let t = term(spec, amb, &mut cur)?;
    cur.finish()?;
    Ok(t)
}

pub fn parse_proof<A: Ambient>(spec: &GsosSpec, amb: &A, text: &str) -> Result<Proof<A::S, A::E>, TermError> {
    let mut cur = Cursor { s: text, i: 0 };
    let p = proof(spec, amb, &mut cur)?;
    cur.finish()?;
    check_proof(spec, amb, &p)?;
    Ok(p)
}

/// Reads a term if possible, otherwise a proof.
pub fn parse_element<A: Ambient>(spec: &GsosSpec, amb: &A, text: &str) -> Result<Element<A::S, A::E>, TermError> {
    match parse_term(spec, amb, text) {
        Ok(t) => Ok(Element::State(t)),
        Err(term_err) => parse_proof(spec, amb, text).map(Element::Edge).map_err(|proof_err| match proof_err {
            TermError::UnknownRule(_) => term_err,
            e => e,
        }),
    }
}
