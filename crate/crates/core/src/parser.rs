//! Concrete syntax for policies.
//!
//! ```text
//! # comment
//! A.r <- D.                 simple member
//! A.r <- B.s.               simple inclusion
//! A.r <- A.s.t.             linking inclusion
//! A.r <- B.s & C.t.         intersection
//! A.r <- B.s - C.t.         exclusion
//! ```
//!
//! A `.` directly followed by an identifier character separates the parts of
//! a role; any other `.` terminates the statement.

use std::fmt;

use thiserror::Error;

use crate::policy::{is_ident_continue, validate, Body, Credential, Diagnostic, Entity, Policy, Role, RoleName};

/// 1-based position of a token in the source text. `length` is in characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Error)]
#[error("policy is not well-formed ({} diagnostic(s)); first: {}", .0.len(), .0[0])]
pub struct SerializeError(pub Vec<Diagnostic>);

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,
    Amp,
    Minus,
    /// `.` glued to a following identifier
    Sep,
    /// statement-ending `.`
    End,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Arrow => "`<-`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Sep => "`.` (role separator)".into(),
            Tok::End => "`.` (end of statement)".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    /// Position of the last character consumed; used for end-of-input errors.
    last: SourceSpan,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self { chars: text.chars().peekable(), line: 1, column: 1, last: SourceSpan { line: 1, column: 1, length: 1 } }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.last = SourceSpan { line: self.line, column: self.column, length: 1 };
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self, length: usize) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column, length }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            let start = self.here(1);
            if c.is_ascii_alphabetic() {
                let mut ident = String::new();
                while let Some(&c) = self.chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    ident.push(c);
                    self.bump();
                }
                let span = SourceSpan { length: ident.chars().count(), ..start };
                out.push((Tok::Ident(ident), span));
                continue;
            }
            self.bump();
            let tok = match c {
                '.' => match self.chars.peek() {
                    Some(&n) if n.is_ascii_alphabetic() => Tok::Sep,
                    _ => Tok::End,
                },
                '&' => Tok::Amp,
                '-' => Tok::Minus,
                '<' => {
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        out.push((Tok::Arrow, SourceSpan { length: 2, ..start }));
                        continue;
                    }
                    return Err(ParseError {
                        span: start,
                        message: "expected `<-`".into(),
                        expected: vec!["`<-`".into()],
                    });
                }
                other => {
                    return Err(ParseError {
                        span: start,
                        message: format!("unexpected character `{other}`"),
                        expected: vec![],
                    })
                }
            };
            out.push((tok, start));
        }
        out.push((Tok::Eof, self.last));
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().describe();
        ParseError {
            span: self.span(),
            message: format!("expected {}, found {found}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, desc: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&[desc]))
        }
    }

    fn entity(&mut self) -> Result<(Entity, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.span();
                if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    return Err(ParseError {
                        span,
                        message: format!("entity name `{name}` must start with an uppercase letter"),
                        expected: vec!["entity".into()],
                    });
                }
                self.next();
                Ok((Entity::new(name), span))
            }
            _ => Err(self.unexpected(&["entity"])),
        }
    }

    fn role_name(&mut self) -> Result<RoleName, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
                    return Err(ParseError {
                        span: self.span(),
                        message: format!("role name `{name}` must start with a lowercase letter"),
                        expected: vec!["role name".into()],
                    });
                }
                self.next();
                Ok(RoleName::new(name))
            }
            _ => Err(self.unexpected(&["role name"])),
        }
    }

    fn role(&mut self) -> Result<(Role, SourceSpan), ParseError> {
        let (owner, span) = self.entity()?;
        self.expect(Tok::Sep, "`.`")?;
        let name = self.role_name()?;
        Ok((Role { owner, name }, span))
    }

    fn statement(&mut self) -> Result<Credential, ParseError> {
        let (head, _) = self.role()?;
        self.expect(Tok::Arrow, "`<-`")?;
        let (first_owner, owner_span) = self.entity()?;
        let body = match self.peek() {
            Tok::End => {
                self.next();
                return Ok(Credential::new(head, Body::SimpleMember { member: first_owner }));
            }
            Tok::Sep => {
                self.next();
                let name = self.role_name()?;
                Role { owner: first_owner, name }
            }
            _ => return Err(self.unexpected(&["`.`"])),
        };
        let body = match self.peek() {
            Tok::End => Body::SimpleInclusion { source: body },
            Tok::Sep => {
                self.next();
                let second = self.role_name()?;
                if *self.peek() == Tok::Sep {
                    return Err(ParseError {
                        span: self.span(),
                        message: "linked roles have exactly two role names".into(),
                        expected: vec!["`.` (end of statement)".into()],
                    });
                }
                if body.owner != head.owner {
                    return Err(ParseError {
                        span: owner_span,
                        message: format!(
                            "linked role must be owned by the head owner `{}`, found `{}`",
                            head.owner, body.owner
                        ),
                        expected: vec![format!("`{}`", head.owner)],
                    });
                }
                Body::LinkingInclusion { first: body, second }
            }
            Tok::Amp | Tok::Minus => {
                let (op, _) = self.next();
                let (right, _) = self.role()?;
                if matches!(self.peek(), Tok::Amp | Tok::Minus) {
                    return Err(ParseError {
                        span: self.span(),
                        message: "a statement may use only one `&` or `-` operator".into(),
                        expected: vec!["`.` (end of statement)".into()],
                    });
                }
                if op == Tok::Amp {
                    Body::IntersectionInclusion { left: body, right }
                } else {
                    Body::Exclusion { include: body, exclude: right }
                }
            }
            _ => return Err(self.unexpected(&["`.`", "`&`", "`-`"])),
        };
        self.expect(Tok::End, "`.` (end of statement)")?;
        Ok(Credential::new(head, body))
    }
}

/// Parses policy text. Duplicate statements collapse into one credential.
pub fn parse_policy(text: &str) -> Result<Policy, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut parser = Parser { toks, pos: 0 };
    let mut creds = Vec::new();
    while *parser.peek() != Tok::Eof {
        creds.push(parser.statement()?);
    }
    Ok(Policy::new(creds))
}

/// Canonical text: one statement per line, sorted by head then body text.
pub fn serialize_policy(policy: &Policy) -> Result<String, SerializeError> {
    let diags = validate(policy);
    if !diags.is_empty() {
        return Err(SerializeError(diags));
    }
    let mut lines: Vec<(String, String)> =
        policy.credentials().iter().map(|c| (c.head.to_string(), c.body.to_string())).collect();
    lines.sort();
    let mut out = String::new();
    for (head, body) in lines {
        out.push_str(&head);
        out.push_str(" <- ");
        out.push_str(&body);
        out.push_str(".\n");
    }
    Ok(out)
}
