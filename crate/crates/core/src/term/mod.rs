//! The free monad `T` of a specification: terms and transition proofs over
//! an ambient transition system, substitution, unit and multiplication.

mod ambient;
pub(crate) mod engine;
mod laws;
mod layers;
mod syntax;
mod truncate;

use thiserror::Error;

use crate::lts::Label;
use crate::spec::{GsosSpec, OpId, RuleId, RuleTerm, RuleVar};

pub use ambient::{Ambient, Free};
pub use engine::{one_step, transitions, transitions_with};
pub use laws::{check_monad_laws, lift_mu, LawFailure, LawsReport};
pub use layers::{layerings_proof, layerings_term};
pub use syntax::{parse_element, parse_proof, parse_term, show_element, show_proof, show_term};
pub use truncate::{eta_morphism, t_of, t_on_morphism, terms_up_to, Truncation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule name `{0}` is ambiguous here")]
    AmbiguousRule(String),
    #[error("malformed proof: {0}")]
    MalformedProof(String),
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("syntax error: {0}")]
    Syntax(String),
}

/// `M ::= var(v) | f(M, ..., M)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term<V> {
    Var(V),
    App(OpId, Vec<Term<V>>),
}

/// A transition proof: an axiom `ax(e)` or a rule applied to one argument
/// entry per operand of the conclusion source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proof<V, E> {
    Axiom(E),
    Node(RuleId, Vec<ProofArg<V, E>>),
}

/// Argument `i` of a rule application: the operand itself when the rule has
/// no premises on it, otherwise its premise proofs in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProofArg<V, E> {
    Term(Term<V>),
    Premises(Vec<Proof<V, E>>),
}

/// A cell of `T(X)`: a state (term) or an edge (proof).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element<V, E> {
    State(Term<V>),
    Edge(Proof<V, E>),
}

/// A leaf of a term or proof, in left-to-right order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leaf<'a, V, E> {
    State(&'a V),
    Edge(&'a E),
}

impl<V> Term<V> {
    /// Constructor nesting: variables have height 0, constants height 1.
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, ch) => 1 + ch.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, ch) => 1 + ch.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> Vec<&V> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a V>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::App(_, ch) => ch.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Number of variable occurrences.
    pub fn occurrences(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, ch) => ch.iter().map(Term::occurrences).sum(),
        }
    }

    pub fn map<W>(&self, f: &mut impl FnMut(&V) -> W) -> Term<W> {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(op, ch) => Term::App(*op, ch.iter().map(|c| c.map(f)).collect()),
        }
    }

    /// Replaces each variable by a term.
    pub fn bind<W>(&self, f: &mut impl FnMut(&V) -> Term<W>) -> Term<W> {
        match self {
            Term::Var(v) => f(v),
            Term::App(op, ch) => Term::App(*op, ch.iter().map(|c| c.bind(f)).collect()),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.occurrences() == 0
    }
}

impl<V, E> Proof<V, E> {
    /// Nesting of rule applications; axioms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Proof::Axiom(_) => 0,
            Proof::Node(_, args) => {
                1 + args
                    .iter()
                    .filter_map(|a| match a {
                        ProofArg::Term(_) => None,
                        ProofArg::Premises(ps) => ps.iter().map(Proof::depth).max(),
                    })
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    pub fn leaves(&self) -> Vec<Leaf<'_, V, E>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<Leaf<'a, V, E>>) {
        match self {
            Proof::Axiom(e) => out.push(Leaf::Edge(e)),
            Proof::Node(_, args) => {
                for a in args {
                    match a {
                        ProofArg::Term(t) => out.extend(t.vars().into_iter().map(Leaf::State)),
                        ProofArg::Premises(ps) => ps.iter().for_each(|p| p.collect_leaves(out)),
                    }
                }
            }
        }
    }

    pub fn map<W, F>(&self, fs: &mut impl FnMut(&V) -> W, fe: &mut impl FnMut(&E) -> F) -> Proof<W, F> {
        match self {
            Proof::Axiom(e) => Proof::Axiom(fe(e)),
            Proof::Node(r, args) => Proof::Node(
                *r,
                args.iter()
                    .map(|a| match a {
                        ProofArg::Term(t) => ProofArg::Term(t.map(fs)),
                        ProofArg::Premises(ps) => ProofArg::Premises(ps.iter().map(|p| p.map(fs, fe)).collect()),
                    })
                    .collect(),
            ),
        }
    }

    /// Replaces leaves by terms and proofs (the Kleisli extension).
    pub fn bind<W, F>(
        &self,
        fs: &mut impl FnMut(&V) -> Term<W>,
        fe: &mut impl FnMut(&E) -> Proof<W, F>,
    ) -> Proof<W, F> {
        match self {
            Proof::Axiom(e) => fe(e),
            Proof::Node(r, args) => Proof::Node(
                *r,
                args.iter()
                    .map(|a| match a {
                        ProofArg::Term(t) => ProofArg::Term(t.bind(fs)),
                        ProofArg::Premises(ps) => ProofArg::Premises(ps.iter().map(|p| p.bind(fs, fe)).collect()),
                    })
                    .collect(),
            ),
        }
    }
}

impl<V, E> Element<V, E> {
    pub fn is_state(&self) -> bool {
        matches!(self, Element::State(_))
    }

    pub fn as_term(&self) -> Option<&Term<V>> {
        match self {
            Element::State(t) => Some(t),
            Element::Edge(_) => None,
        }
    }

    pub fn as_proof(&self) -> Option<&Proof<V, E>> {
        match self {
            Element::Edge(p) => Some(p),
            Element::State(_) => None,
        }
    }

    pub fn map<W, F>(&self, fs: &mut impl FnMut(&V) -> W, fe: &mut impl FnMut(&E) -> F) -> Element<W, F> {
        match self {
            Element::State(t) => Element::State(t.map(fs)),
            Element::Edge(p) => Element::Edge(p.map(fs, fe)),
        }
    }

    /// Height of the term, or depth of the proof.
    pub fn size_bound(&self) -> usize {
        match self {
            Element::State(t) => t.height(),
            Element::Edge(p) => p.depth(),
        }
    }
}

/// Conclusion label of a proof.
pub fn label<A: Ambient>(spec: &GsosSpec, amb: &A, r: &Proof<A::S, A::E>) -> Label {
    match r {
        Proof::Axiom(e) => amb.edge_label(e),
        Proof::Node(rule, _) => spec.rule(*rule).label,
    }
}

fn arg_source<A: Ambient>(spec: &GsosSpec, amb: &A, a: &ProofArg<A::S, A::E>) -> Term<A::S> {
    match a {
        ProofArg::Term(t) => t.clone(),
        ProofArg::Premises(ps) => src(spec, amb, &ps[0]),
    }
}

/// Source of a proof. Assumes the proof is well formed.
pub fn src<A: Ambient>(spec: &GsosSpec, amb: &A, r: &Proof<A::S, A::E>) -> Term<A::S> {
    match r {
        Proof::Axiom(e) => Term::Var(amb.edge_src(e)),
        Proof::Node(rule, args) => {
            Term::App(spec.rule(*rule).op, args.iter().map(|a| arg_source(spec, amb, a)).collect())
        }
    }
}

/// Target of a proof: the rule target with `x_i` and `y_ij` substituted.
pub fn tgt<A: Ambient>(spec: &GsosSpec, amb: &A, r: &Proof<A::S, A::E>) -> Term<A::S> {
    match r {
        Proof::Axiom(e) => Term::Var(amb.edge_tgt(e)),
        Proof::Node(rule, args) => substitute(&spec.rule(*rule).target, &mut |v| match v {
            RuleVar::Arg(i) => arg_source(spec, amb, &args[i]),
            RuleVar::Prem(i, j) => match &args[i] {
                ProofArg::Premises(ps) => tgt(spec, amb, &ps[j]),
                ProofArg::Term(_) => unreachable!("validated rule targets only use bound premises"),
            },
        }),
    }
}

pub(crate) fn substitute<V>(t: &RuleTerm, f: &mut impl FnMut(RuleVar) -> Term<V>) -> Term<V> {
    match t {
        RuleTerm::Var(v) => f(*v),
        RuleTerm::App(op, ch) => Term::App(*op, ch.iter().map(|c| substitute(c, f)).collect()),
    }
}

pub fn check_term<V>(spec: &GsosSpec, t: &Term<V>) -> Result<(), TermError> {
    match t {
        Term::Var(_) => Ok(()),
        Term::App(op, ch) => {
            if op.0 >= spec.signature.len() {
                return Err(TermError::UnknownOperation(format!("#{}", op.0)));
            }
            let n = spec.signature.arity(*op);
            if n != ch.len() {
                return Err(TermError::MalformedTerm(format!(
                    "`{}` has arity {n}, applied to {}",
                    spec.signature.name(*op),
                    ch.len()
                )));
            }
            ch.iter().try_for_each(|c| check_term(spec, c))
        }
    }
}

/// Checks the shape of every rule application: argument entries match the
/// premise counts, premise labels match, and premises on one argument
/// share their source.
pub fn check_proof<A: Ambient>(spec: &GsosSpec, amb: &A, r: &Proof<A::S, A::E>) -> Result<(), TermError> {
    let Proof::Node(rule_id, args) = r else { return Ok(()) };
    if rule_id.0 >= spec.rules.len() {
        return Err(TermError::UnknownRule(format!("#{}", rule_id.0)));
    }
    let rule = spec.rule(*rule_id);
    let bad = |m: String| Err(TermError::MalformedProof(format!("{}: {m}", rule.name)));
    if args.len() != rule.arity() {
        return bad(format!("{} argument entries for arity {}", args.len(), rule.arity()));
    }
    for (i, (a, labels)) in args.iter().zip(&rule.premises).enumerate() {
        match a {
            ProofArg::Term(t) if labels.is_empty() => check_term(spec, t)?,
            ProofArg::Premises(ps) if ps.len() == labels.len() && !ps.is_empty() => {
                let s0 = src(spec, amb, &ps[0]);
                for (j, (p, l)) in ps.iter().zip(labels).enumerate() {
                    check_proof(spec, amb, p)?;
                    if label(spec, amb, p) != *l {
                        return bad(format!("premise ({}, {}) has the wrong label", i + 1, j + 1));
                    }
                    if j > 0 && src(spec, amb, p) != s0 {
                        return bad(format!("premises on argument {} have different sources", i + 1));
                    }
                }
            }
            _ => return bad(format!("argument {} does not match the premise count {}", i + 1, labels.len())),
        }
    }
    Ok(())
}

pub fn check_element<A: Ambient>(spec: &GsosSpec, amb: &A, z: &Element<A::S, A::E>) -> Result<(), TermError> {
    match z {
        Element::State(t) => check_term(spec, t),
        Element::Edge(p) => check_proof(spec, amb, p),
    }
}

pub fn eta_term<V>(v: V) -> Term<V> {
    Term::Var(v)
}

pub fn eta_proof<V, E>(e: E) -> Proof<V, E> {
    Proof::Axiom(e)
}

/// `μ` on terms: removes the inner `var(-)` layer.
pub fn mu_term<V: Clone>(t: &Term<Term<V>>) -> Term<V> {
    t.bind(&mut |m: &Term<V>| m.clone())
}

/// `μ` on proofs: inner terms and proofs replace their wrappers.
pub fn mu_proof<V: Clone, E: Clone>(r: &Proof<Term<V>, Proof<V, E>>) -> Proof<V, E> {
    r.bind(&mut |m: &Term<V>| m.clone(), &mut |p: &Proof<V, E>| p.clone())
}

pub fn mu_element<V: Clone, E: Clone>(z: &Element<Term<V>, Proof<V, E>>) -> Element<V, E> {
    match z {
        Element::State(t) => Element::State(mu_term(t)),
        Element::Edge(p) => Element::Edge(mu_proof(p)),
    }
}

/// `T(f)` on a single element: renames leaves.
pub fn rename<V, E, W, F>(
    z: &Element<V, E>,
    fs: &mut impl FnMut(&V) -> W,
    fe: &mut impl FnMut(&E) -> F,
) -> Element<W, F> {
    z.map(fs, fe)
}

/// Label of an element viewed as a cell: `None` for states.
pub fn element_label<A: Ambient>(spec: &GsosSpec, amb: &A, z: &Element<A::S, A::E>) -> Option<Label> {
    z.as_proof().map(|p| label(spec, amb, p))
}

/// Shorthand for the ambient of closed terms.
pub type ClosedTerm = Term<crate::lts::StateIx>;
