use super::lexer::{lex, Tok, Token};
use super::{ErrorKind, ParseErrors, SpecError};

#[derive(Debug, Clone)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct RawTerm {
    pub name: String,
    /// `None` for a bare identifier, `Some` when written with parentheses.
    pub args: Option<Vec<RawTerm>>,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub(crate) struct RawPremise {
    pub subject: RawTerm,
    pub label: String,
    pub target: RawTerm,
}

#[derive(Debug, Clone)]
pub(crate) struct RawRule {
    pub name: String,
    pub binders: Vec<(String, String, Pos)>,
    pub premises: Vec<RawPremise>,
    pub source: RawTerm,
    pub label: String,
    pub target: RawTerm,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub(crate) enum Decl {
    Labels(Vec<(String, Pos)>),
    Class { name: String, members: Vec<String>, pos: Pos },
    Op { name: String, arity: usize, pos: Pos },
    Rule(RawRule),
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: Pos,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Eq => "`=`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::ArrowOpen => "`-[`".into(),
        Tok::ArrowClose => "`]->`".into(),
        Tok::Turnstile => "`|-`".into(),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|t| Pos { line: t.line, col: t.col }).unwrap_or(self.end.clone())
    }

    fn error(&self, expected: &str) -> SpecError {
        let p = self.pos();
        let found = self.peek().map(describe).unwrap_or_else(|| "end of input".into());
        SpecError::at(ErrorKind::SyntaxError, p.line, p.col, format!("expected {expected}, found {found}"))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), SpecError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(&describe(t)))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), SpecError> {
        let p = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok((s, p))
            }
            _ => Err(self.error(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SpecError> {
        if self.is_keyword(kw) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn decl(&mut self) -> Result<Decl, SpecError> {
        let pos = self.pos();
        let (kw, _) = self.ident("a declaration (`labels`, `class`, `op` or `rule`)")?;
        match kw.as_str() {
            "labels" => {
                let mut ls = vec![self.ident("a label")?];
                while self.eat(&Tok::Comma) {
                    ls.push(self.ident("a label")?);
                }
                self.expect(&Tok::Semi)?;
                Ok(Decl::Labels(ls))
            }
            "class" => {
                let (name, _) = self.ident("a class name")?;
                self.expect(&Tok::Eq)?;
                self.expect(&Tok::LBrace)?;
                let mut members = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    members.push(self.ident("a label")?.0);
                    while self.eat(&Tok::Comma) {
                        members.push(self.ident("a label")?.0);
                    }
                    self.expect(&Tok::RBrace)?;
                }
                self.expect(&Tok::Semi)?;
                Ok(Decl::Class { name, members, pos })
            }
            "op" => {
                let (name, _) = self.ident("an operation name")?;
                self.expect(&Tok::Colon)?;
                let arity = match self.peek() {
                    Some(Tok::Num(n)) => *n,
                    _ => return Err(self.error("an arity")),
                };
                self.i += 1;
                self.expect(&Tok::Semi)?;
                Ok(Decl::Op { name, arity, pos })
            }
            "rule" => self.rule(pos).map(Decl::Rule),
            _ => {
                self.i -= 1;
                Err(self.error("a declaration (`labels`, `class`, `op` or `rule`)"))
            }
        }
    }

    fn rule(&mut self, pos: Pos) -> Result<RawRule, SpecError> {
        let (name, _) = self.ident("a rule name")?;
        let mut binders = Vec::new();
        if self.eat(&Tok::LBracket) {
            loop {
                if self.is_keyword("forall") {
                    self.i += 1;
                }
                let (v, p) = self.ident("a label variable")?;
                self.keyword("in")?;
                let (c, _) = self.ident("a class name")?;
                binders.push((v, c, p));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RBracket)?;
        }
        self.expect(&Tok::Colon)?;
        let mut premises = Vec::new();
        if self.is_keyword("premises") {
            self.i += 1;
            while !self.is_keyword("conclusion") {
                premises.push(self.premise()?);
                if !self.is_keyword("conclusion") {
                    self.expect(&Tok::Semi)?;
                }
            }
            self.i += 1;
        } else if self.is_keyword("conclusion") {
            self.i += 1;
        } else {
            while !self.eat(&Tok::Turnstile) {
                premises.push(self.premise()?);
                if self.peek() != Some(&Tok::Turnstile) {
                    self.expect(&Tok::Semi)?;
                }
            }
        }
        let source = self.term()?;
        self.expect(&Tok::ArrowOpen)?;
        let (label, _) = self.ident("a label")?;
        self.expect(&Tok::ArrowClose)?;
        let target = self.term()?;
        self.expect(&Tok::Semi)?;
        Ok(RawRule { name, binders, premises, source, label, target, pos })
    }

    fn premise(&mut self) -> Result<RawPremise, SpecError> {
        let subject = self.term()?;
        self.expect(&Tok::ArrowOpen)?;
        let (label, _) = self.ident("a label")?;
        self.expect(&Tok::ArrowClose)?;
        let target = self.term()?;
        Ok(RawPremise { subject, label, target })
    }

    fn term(&mut self) -> Result<RawTerm, SpecError> {
        let (name, pos) = self.ident("a term")?;
        if !self.eat(&Tok::LParen) {
            return Ok(RawTerm { name, args: None, pos });
        }
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            args.push(self.term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(RawTerm { name, args: Some(args), pos })
    }
}

pub(crate) fn parse(text: &str) -> Result<Vec<Decl>, ParseErrors> {
    let toks = lex(text).map_err(|e| ParseErrors(vec![e]))?;
    let lines = text.lines().count().max(1);
    let end = Pos { line: lines, col: text.lines().last().map_or(1, |l| l.chars().count() + 1) };
    if toks.is_empty() {
        return Err(ParseErrors(vec![SpecError::at(ErrorKind::SyntaxError, 1, 1, "empty specification")]));
    }
    let mut p = Parser { toks, i: 0, end };
    let mut decls = Vec::new();
    while p.i < p.toks.len() {
        decls.push(p.decl().map_err(|e| ParseErrors(vec![e]))?);
    }
    Ok(decls)
}
