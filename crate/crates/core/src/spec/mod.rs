//! Positive GSOS specifications: signature, rules, label-class templates,
//! and the `.gsos` text format.

mod build;
mod lexer;
mod parser;
mod pretty;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::lts::{Label, LabelSet};

pub use build::{expand_templates, validate};
pub use pretty::pretty_print;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<OpDecl>,
    index: HashMap<String, OpId>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an operation; `None` if the name is taken.
    pub fn add(&mut self, name: impl Into<String>, arity: usize) -> Option<OpId> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return None;
        }
        let id = OpId(self.ops.len());
        self.index.insert(name.clone(), id);
        self.ops.push(OpDecl { name, arity });
        Some(id)
    }

    pub fn lookup(&self, name: &str) -> Option<OpId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, op: OpId) -> &str {
        &self.ops[op.0].name
    }

    pub fn arity(&self, op: OpId) -> usize {
        self.ops[op.0].arity
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = OpId> + '_ {
        (0..self.ops.len()).map(OpId)
    }

    pub fn decls(&self) -> &[OpDecl] {
        &self.ops
    }
}

/// Variables of a rule target: `Arg(i)` is `x_{i+1}`, `Prem(i, j)` is `y_{i+1,j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleVar {
    Arg(usize),
    Prem(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleTerm {
    Var(RuleVar),
    App(OpId, Vec<RuleTerm>),
}

impl RuleTerm {
    pub fn vars(&self, out: &mut Vec<RuleVar>) {
        match self {
            RuleTerm::Var(v) => out.push(*v),
            RuleTerm::App(_, ch) => ch.iter().for_each(|c| c.vars(out)),
        }
    }
}

/// A concrete rule: `premises[i][j]` is the label `a_{i,j}`; `premises[i].len()` is `m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: String,
    /// Name of the template the rule was expanded from.
    pub base: String,
    pub op: OpId,
    pub label: Label,
    pub premises: Vec<Vec<Label>>,
    pub target: RuleTerm,
}

impl Rule {
    pub fn arity(&self) -> usize {
        self.premises.len()
    }

    pub fn premise_counts(&self) -> Vec<usize> {
        self.premises.iter().map(Vec::len).collect()
    }

    pub fn num_premises(&self) -> usize {
        self.premises.iter().map(Vec::len).sum()
    }
}

/// Text that may contain `<V>` placeholders for label variables. A pattern
/// that is exactly a bound variable name also stands for its value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern(pub String);

impl Pattern {
    pub fn instantiate(&self, env: &[(String, String)]) -> String {
        if let Some((_, v)) = env.iter().find(|(k, _)| *k == self.0) {
            return v.clone();
        }
        let mut s = self.0.clone();
        for (k, v) in env {
            s = s.replace(&format!("<{k}>"), v);
        }
        s
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateTerm {
    /// A bound variable (`x1`, `y1_1`, ...) or a bare constant name.
    Name(String),
    App(Pattern, Vec<TemplateTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplatePremise {
    /// 0-based argument position of the premise subject.
    pub arg: usize,
    pub label: Pattern,
    pub target: String,
}

/// A rule as written, possibly with label variables.
#[derive(Debug, Clone)]
pub struct Template {
    pub name: String,
    pub binders: Vec<(String, String)>,
    pub op: Pattern,
    pub args: Vec<String>,
    pub label: Pattern,
    pub premises: Vec<TemplatePremise>,
    pub target: TemplateTerm,
    pub line: usize,
}

impl PartialEq for Template {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.binders == o.binders
            && self.op == o.op
            && self.args == o.args
            && self.label == o.label
            && self.premises == o.premises
            && self.target == o.target
    }
}

impl Eq for Template {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsosSpec {
    pub labels: Arc<LabelSet>,
    pub classes: Vec<(String, Vec<String>)>,
    pub signature: Signature,
    pub templates: Vec<Template>,
    pub rules: Vec<Rule>,
    rule_index: HashMap<String, RuleId>,
}

impl GsosSpec {
    /// Assembles a spec from already-expanded parts. No validation.
    pub fn from_parts(
        labels: Arc<LabelSet>,
        classes: Vec<(String, Vec<String>)>,
        signature: Signature,
        templates: Vec<Template>,
        rules: Vec<Rule>,
    ) -> Self {
        let rule_index = rules.iter().enumerate().map(|(i, r)| (r.name.clone(), RuleId(i))).collect();
        GsosSpec { labels, classes, signature, templates, rules, rule_index }
    }

    pub fn parse(text: &str) -> Result<Self, ParseErrors> {
        parse_spec(text)
    }

    pub fn rule(&self, r: RuleId) -> &Rule {
        &self.rules[r.0]
    }

    pub fn rule_by_name(&self, name: &str) -> Option<RuleId> {
        self.rule_index.get(name).copied()
    }

    pub fn rule_ids(&self) -> impl Iterator<Item = RuleId> + '_ {
        (0..self.rules.len()).map(RuleId)
    }

    pub fn rules_for(&self, op: OpId) -> impl Iterator<Item = RuleId> + '_ {
        self.rule_ids().filter(move |r| self.rules[r.0].op == op)
    }

    /// Rules expanded from template `base`.
    pub fn rules_with_base<'a>(&'a self, base: &'a str) -> impl Iterator<Item = RuleId> + 'a {
        self.rule_ids().filter(move |r| self.rules[r.0].base == base)
    }

    /// Short display name: the template name when the premise labels alone
    /// pick the rule out of its template, otherwise the full name.
    pub fn display_name(&self, r: RuleId) -> &str {
        let rule = &self.rules[r.0];
        let clash = self.rules_with_base(&rule.base).any(|o| o != r && self.rules[o.0].premises == rule.premises);
        if clash {
            &rule.name
        } else {
            &rule.base
        }
    }

    /// Resolves a rule written by full or template name, given the
    /// premise labels of its children when known.
    pub fn resolve_rule(&self, name: &str, premise_labels: Option<&[Vec<Label>]>) -> Option<RuleId> {
        if let Some(r) = self.rule_by_name(name) {
            return Some(r);
        }
        let mut hits = self
            .rules_with_base(name)
            .filter(|r| premise_labels.is_none_or(|p| self.rules[r.0].premises == p));
        let first = hits.next()?;
        hits.next().is_none().then_some(first)
    }

    pub fn label(&self, name: &str) -> Option<Label> {
        self.labels.lookup(name)
    }

    pub fn op(&self, name: &str) -> Option<OpId> {
        self.signature.lookup(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    SyntaxError,
    UnknownLabel,
    UnknownClass,
    UnknownOperation,
    ArityMismatch,
    NonGsosSource,
    NonGsosPremise,
    UnboundTargetVariable,
    DuplicateBoundVariable,
    DuplicateDeclaration,
    EmptyLabelClass,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::SyntaxError => "SyntaxError",
            ErrorKind::UnknownLabel => "UnknownLabel",
            ErrorKind::UnknownClass => "UnknownClass",
            ErrorKind::UnknownOperation => "UnknownOperation",
            ErrorKind::ArityMismatch => "ArityMismatch",
            ErrorKind::NonGsosSource => "NonGsosSource",
            ErrorKind::NonGsosPremise => "NonGsosPremise",
            ErrorKind::UnboundTargetVariable => "UnboundTargetVariable",
            ErrorKind::DuplicateBoundVariable => "DuplicateBoundVariable",
            ErrorKind::DuplicateDeclaration => "DuplicateDeclaration",
            ErrorKind::EmptyLabelClass => "EmptyLabelClass",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub kind: ErrorKind,
    pub line: usize,
    pub col: usize,
    pub rule: Option<String>,
    pub message: String,
}

impl SpecError {
    pub(crate) fn at(kind: ErrorKind, line: usize, col: usize, message: impl Into<String>) -> Self {
        SpecError { kind, line, col, rule: None, message: message.into() }
    }

    pub(crate) fn in_rule(mut self, rule: &str) -> Self {
        self.rule = Some(rule.to_string());
        self
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.kind)?;
        if let Some(r) = &self.rule {
            write!(f, " in rule `{r}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<SpecError>);

impl ParseErrors {
    pub fn kinds(&self) -> Vec<ErrorKind> {
        self.0.iter().map(|e| e.kind).collect()
    }

    pub fn has(&self, kind: ErrorKind) -> bool {
        self.0.iter().any(|e| e.kind == kind)
    }
}

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

/// A failed rule clause found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub kind: ErrorKind,
    pub message: String,
}

/// Parses, expands and validates a `.gsos` text.
pub fn parse_spec(text: &str) -> Result<GsosSpec, ParseErrors> {
    let decls = parser::parse(text)?;
    build::build(decls)
}

pub const CCS_SPEC: &str = include_str!("../../specs/ccs.gsos");
pub const TOY_SPEC: &str = include_str!("../../specs/toy.gsos");

pub fn ccs() -> GsosSpec {
    parse_spec(CCS_SPEC).expect("bundled CCS spec parses")
}

pub fn toy() -> GsosSpec {
    parse_spec(TOY_SPEC).expect("bundled toy spec parses")
}
