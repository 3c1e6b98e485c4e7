use super::{ErrorKind, SpecError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Identifier, possibly containing `<V>` label-variable placeholders.
    Ident(String),
    Num(usize),
    Semi,
    Comma,
    Colon,
    Eq,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    /// `-[`
    ArrowOpen,
    /// `]->`
    ArrowClose,
    /// `|-`
    Turnstile,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '*'
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, SpecError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, col: tc });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            ';' => push(&mut out, Tok::Semi),
            ',' => push(&mut out, Tok::Comma),
            ':' => push(&mut out, Tok::Colon),
            '=' => push(&mut out, Tok::Eq),
            '{' => push(&mut out, Tok::LBrace),
            '}' => push(&mut out, Tok::RBrace),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '[' => push(&mut out, Tok::LBracket),
            '-' if chars.get(i + 1) == Some(&'[') => {
                push(&mut out, Tok::ArrowOpen);
                i += 2;
                col += 2;
                continue;
            }
            ']' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(&mut out, Tok::ArrowClose);
                i += 3;
                col += 3;
                continue;
            }
            ']' => push(&mut out, Tok::RBracket),
            '|' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::Turnstile);
                i += 2;
                col += 2;
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| {
                    SpecError::at(ErrorKind::SyntaxError, tl, tc, format!("number `{s}` out of range"))
                })?;
                // a number immediately followed by identifier characters is an identifier
                if i < chars.len() && (ident_char(chars[i]) || chars[i] == '<') {
                    i = start;
                } else {
                    col += i - start;
                    push(&mut out, Tok::Num(n));
                    continue;
                }
                let (s, len) = read_ident(&chars, i, tl, tc)?;
                i += len;
                col += len;
                push(&mut out, Tok::Ident(s));
                continue;
            }
            c if ident_char(c) || c == '<' => {
                let (s, len) = read_ident(&chars, i, tl, tc)?;
                i += len;
                col += len;
                push(&mut out, Tok::Ident(s));
                continue;
            }
            other => {
                return Err(SpecError::at(ErrorKind::SyntaxError, tl, tc, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

fn read_ident(chars: &[char], start: usize, line: usize, col: usize) -> Result<(String, usize), SpecError> {
    let mut i = start;
    let mut s = String::new();
    while i < chars.len() {
        let c = chars[i];
        if ident_char(c) {
            s.push(c);
            i += 1;
        } else if c == '<' {
            // placeholder `<V>`
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            if j == i + 1 || chars.get(j) != Some(&'>') {
                return Err(SpecError::at(ErrorKind::SyntaxError, line, col, "malformed `<V>` placeholder"));
            }
            s.extend(&chars[i..=j]);
            i = j + 1;
        } else {
            break;
        }
    }
    Ok((s, i - start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_arrows_and_placeholders() {
        let toks = lex("x1 -[<N>_bar]-> y1_1 |- pref_<L>(x1) # c\n;").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("x1".into()),
                Tok::ArrowOpen,
                Tok::Ident("<N>_bar".into()),
                Tok::ArrowClose,
                Tok::Ident("y1_1".into()),
                Tok::Turnstile,
                Tok::Ident("pref_<L>".into()),
                Tok::LParen,
                Tok::Ident("x1".into()),
                Tok::RParen,
                Tok::Semi,
            ]
        );
    }

    #[test]
    fn reports_position() {
        let err = lex("labels a ;\n  op ? : 1 ;").unwrap_err();
        assert_eq!((err.line, err.col), (2, 6));
    }
}
