//! Concrete syntax: the `.kb` document language, the rule language, and the
//! SPARQL-subset query language (`.rq`). This module is the sole owner of
//! parsing and rendering; everything else works on model values.
//!
//! The grammar is deliberately unable to express negation, disjunction or
//! built-in atoms. The tokens `not`, `or`, `!` and `|` are reserved and
//! produce pointed errors instead of a generic syntax failure.

mod document;
mod query;
mod render;

pub use document::{parse_document, parse_fact, parse_rule, DocumentFragment, KbLoader};
pub use query::{parse_query, Query};
pub use render::{display_atom, display_fact, render_document, render_expression};

use std::fmt;

use thiserror::Error;

use crate::model::{ModelError, RuleSafetyViolation};

/// Position of a token inside a source file, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// Why a parse failed.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Message(String),
    #[error("negation is not supported: the language is monotone, facts can only be added")]
    NegationUnsupported,
    #[error("disjunction is not supported in rule bodies or heads")]
    DisjunctionUnsupported,
    #[error("unknown prefix '{0}:'")]
    UnknownPrefix(String),
    #[error("projected variable ?{0} does not occur in any pattern")]
    UnprojectableVariable(String),
    #[error("{0}")]
    UnsafeRule(RuleSafetyViolation),
    #[error("{0}")]
    Model(ModelError),
}

/// A parse error with the span of the offending token.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(span: SourceSpan, kind: ParseErrorKind) -> Self {
        ParseError { span, kind }
    }

    fn message(span: SourceSpan, msg: impl Into<String>) -> Self {
        ParseError { span, kind: ParseErrorKind::Message(msg.into()) }
    }
}

// ---------------------------------------------------------------------------
// Document-language lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Less,
    Equals,
    Caret,
    Arrow,
    /// Reserved `not` / `!`.
    Negation,
    /// Reserved `or` / `|`.
    Disjunction,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Var(s) => write!(f, "'?{s}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Colon => f.write_str("':'"),
            Tok::Less => f.write_str("'<'"),
            Tok::Equals => f.write_str("'='"),
            Tok::Caret => f.write_str("'^'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Negation => f.write_str("'not'"),
            Tok::Disjunction => f.write_str("'or'"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Tokenize one logical line of a `.kb` document or a standalone rule/fact.
/// A `#` starts a comment running to the end of the line.
pub(crate) fn lex_line(text: &str, file: &str, line_no: u32) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let span_at = |col: usize| SourceSpan {
        file: file.to_string(),
        line: line_no,
        column: (col + 1) as u32,
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Spanned { tok: Tok::LParen, span: span_at(i) });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, span: span_at(i) });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, span: span_at(i) });
                i += 1;
            }
            ':' => {
                out.push(Spanned { tok: Tok::Colon, span: span_at(i) });
                i += 1;
            }
            '<' => {
                out.push(Spanned { tok: Tok::Less, span: span_at(i) });
                i += 1;
            }
            '=' => {
                out.push(Spanned { tok: Tok::Equals, span: span_at(i) });
                i += 1;
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, span: span_at(i) });
                i += 1;
            }
            '!' => {
                out.push(Spanned { tok: Tok::Negation, span: span_at(i) });
                i += 1;
            }
            '|' => {
                out.push(Spanned { tok: Tok::Disjunction, span: span_at(i) });
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::Arrow, span: span_at(i) });
                i += 2;
            }
            '?' => {
                let start = i;
                i += 1;
                let name_start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                if i == name_start {
                    return Err(ParseError::message(span_at(start), "expected a variable name after '?'"));
                }
                let name: String = chars[name_start..i].iter().collect();
                out.push(Spanned { tok: Tok::Var(name), span: span_at(start) });
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "not" => Tok::Negation,
                    "or" => Tok::Disjunction,
                    _ => Tok::Ident(word),
                };
                out.push(Spanned { tok, span: span_at(start) });
            }
            other => {
                return Err(ParseError::message(
                    span_at(i),
                    format!("unexpected character '{other}'"),
                ));
            }
        }
    }
    Ok(out)
}

/// Cursor over the tokens of one statement.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end: SourceSpan,
}

impl Cursor {
    pub fn new(toks: Vec<Spanned>, end: SourceSpan) -> Self {
        Cursor { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    pub fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn here(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|t| t.span.clone()).unwrap_or_else(|| self.end.clone())
    }

    /// Consume an identifier; reserved words and anything else produce the
    /// appropriate pointed error.
    pub fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.next() {
            Some(Spanned { tok: Tok::Ident(s), span }) => Ok((s, span)),
            Some(Spanned { tok: Tok::Negation, span }) => {
                Err(ParseError::new(span, ParseErrorKind::NegationUnsupported))
            }
            Some(Spanned { tok: Tok::Disjunction, span }) => {
                Err(ParseError::new(span, ParseErrorKind::DisjunctionUnsupported))
            }
            Some(Spanned { tok, span }) => {
                Err(ParseError::message(span, format!("expected {what}, found {tok}")))
            }
            None => Err(ParseError::message(self.end.clone(), format!("expected {what}"))),
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        match self.next() {
            Some(Spanned { tok: t, span }) if t == tok => Ok(span),
            Some(Spanned { tok: Tok::Negation, span }) => {
                Err(ParseError::new(span, ParseErrorKind::NegationUnsupported))
            }
            Some(Spanned { tok: Tok::Disjunction, span }) => {
                Err(ParseError::new(span, ParseErrorKind::DisjunctionUnsupported))
            }
            Some(Spanned { tok: t, span }) => {
                Err(ParseError::message(span, format!("expected {tok}, found {t}")))
            }
            None => Err(ParseError::message(self.end.clone(), format!("expected {tok}"))),
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(Spanned { tok: Tok::Negation, span }) => {
                Err(ParseError::new(span.clone(), ParseErrorKind::NegationUnsupported))
            }
            Some(Spanned { tok: Tok::Disjunction, span }) => {
                Err(ParseError::new(span.clone(), ParseErrorKind::DisjunctionUnsupported))
            }
            Some(t) => Err(ParseError::message(
                t.span.clone(),
                format!("unexpected trailing {}", t.tok),
            )),
        }
    }
}
