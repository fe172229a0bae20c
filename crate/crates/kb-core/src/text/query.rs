//! Parser for the SPARQL-subset query language: `PREFIX` declarations, a
//! single `SELECT` projection, and one `WHERE` block of triple patterns with
//! `.` separators and `;` predicate-object lists. `a` and `rdf:type` are
//! normalized to class patterns. Results are always distinct, so there is no
//! `DISTINCT` keyword; `OPTIONAL`, `FILTER`, `UNION` and negation are
//! rejected with pointed errors.

use std::collections::HashMap;

use crate::model::{Atom, Term};
use crate::symbol::{SymbolId, SymbolKind, SymbolTable};
use crate::text::{ParseError, ParseErrorKind, SourceSpan};

/// A parsed conjunctive query.
#[derive(Debug, Clone)]
pub struct Query {
    /// Prefix declarations in source order, `(name, expansion)`.
    pub prefixes: Vec<(String, String)>,
    /// Projected variables, in `SELECT` order.
    pub projected: Vec<SymbolId>,
    /// Projected variable names without the `?`, parallel to `projected`.
    pub projected_names: Vec<String>,
    /// Triple patterns after `;`-expansion and `rdf:type` normalization.
    pub patterns: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum QTok {
    Keyword(&'static str),
    A,
    Var(String),
    Prefixed(String, String),
    Iri(String),
    LBrace,
    RBrace,
    Dot,
    Semicolon,
    Word(String),
}

#[derive(Debug, Clone)]
struct QSpanned {
    tok: QTok,
    span: SourceSpan,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn lex_query(text: &str, file: &str) -> Result<Vec<QSpanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    macro_rules! span {
        () => {
            SourceSpan { file: file.to_string(), line, column: col }
        };
    }
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_whitespace() => {
                col += 1;
                i += 1;
            }
            '{' => {
                out.push(QSpanned { tok: QTok::LBrace, span: span!() });
                col += 1;
                i += 1;
            }
            '}' => {
                out.push(QSpanned { tok: QTok::RBrace, span: span!() });
                col += 1;
                i += 1;
            }
            '.' => {
                out.push(QSpanned { tok: QTok::Dot, span: span!() });
                col += 1;
                i += 1;
            }
            ';' => {
                out.push(QSpanned { tok: QTok::Semicolon, span: span!() });
                col += 1;
                i += 1;
            }
            '<' => {
                let start_span = span!();
                i += 1;
                col += 1;
                let mut iri = String::new();
                while i < chars.len() && chars[i] != '>' {
                    if chars[i] == '\n' {
                        return Err(ParseError::message(start_span, "unterminated IRI"));
                    }
                    iri.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                if i == chars.len() {
                    return Err(ParseError::message(start_span, "unterminated IRI"));
                }
                i += 1;
                col += 1;
                out.push(QSpanned { tok: QTok::Iri(iri), span: start_span });
            }
            '?' => {
                let start_span = span!();
                i += 1;
                col += 1;
                let mut name = String::new();
                while i < chars.len() && is_name_char(chars[i]) {
                    name.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                if name.is_empty() {
                    return Err(ParseError::message(start_span, "expected a variable name after '?'"));
                }
                out.push(QSpanned { tok: QTok::Var(name), span: start_span });
            }
            '!' => {
                return Err(ParseError::new(span!(), ParseErrorKind::NegationUnsupported));
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == ':' => {
                let start_span = span!();
                let mut word = String::new();
                while i < chars.len() && is_name_char(chars[i]) {
                    word.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                if i < chars.len() && chars[i] == ':' {
                    i += 1;
                    col += 1;
                    let mut local = String::new();
                    while i < chars.len() && is_name_char(chars[i]) {
                        local.push(chars[i]);
                        i += 1;
                        col += 1;
                    }
                    out.push(QSpanned { tok: QTok::Prefixed(word, local), span: start_span });
                } else {
                    let upper = word.to_ascii_uppercase();
                    let tok = match upper.as_str() {
                        "PREFIX" => QTok::Keyword("PREFIX"),
                        "SELECT" => QTok::Keyword("SELECT"),
                        "WHERE" => QTok::Keyword("WHERE"),
                        _ if word == "a" => QTok::A,
                        "NOT" | "MINUS" => {
                            return Err(ParseError::new(
                                start_span,
                                ParseErrorKind::NegationUnsupported,
                            ));
                        }
                        "UNION" => {
                            return Err(ParseError::new(
                                start_span,
                                ParseErrorKind::DisjunctionUnsupported,
                            ));
                        }
                        "OPTIONAL" | "FILTER" | "DISTINCT" | "ORDER" | "GROUP" | "LIMIT" => {
                            return Err(ParseError::message(
                                start_span,
                                format!("'{word}' is not part of the query subset"),
                            ));
                        }
                        _ => QTok::Word(word),
                    };
                    out.push(QSpanned { tok, span: start_span });
                }
            }
            other => {
                return Err(ParseError::message(span!(), format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(out)
}

struct QCursor {
    toks: Vec<QSpanned>,
    pos: usize,
    end: SourceSpan,
}

impl QCursor {
    fn peek(&self) -> Option<&QSpanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<QSpanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|t| t.span.clone()).unwrap_or_else(|| self.end.clone())
    }
}

#[derive(Debug, Clone)]
enum QueryTerm {
    Var(String, SourceSpan),
    Name(String, SourceSpan),
}

/// Parse a query against an existing symbol space (typically a clone of a
/// knowledge base's table). Constants resolve through prefix expansion to
/// flat identifiers; unknown constants are interned undeclared and rejected
/// later by evaluation.
pub fn parse_query(text: &str, file: &str, symbols: &mut SymbolTable) -> Result<Query, ParseError> {
    let toks = lex_query(text, file)?;
    let end = SourceSpan {
        file: file.to_string(),
        line: text.lines().count().max(1) as u32,
        column: text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1) as u32,
    };
    let mut cur = QCursor { toks, pos: 0, end };

    let mut prefixes: Vec<(String, String)> = Vec::new();
    let mut prefix_map: HashMap<String, String> = HashMap::new();

    while let Some(QSpanned { tok: QTok::Keyword("PREFIX"), .. }) = cur.peek() {
        cur.next();
        let (name, span) = match cur.next() {
            Some(QSpanned { tok: QTok::Prefixed(name, local), span }) => {
                if !local.is_empty() {
                    return Err(ParseError::message(span, "prefix declaration must end with ':'"));
                }
                (name, span)
            }
            Some(QSpanned { span, .. }) => {
                return Err(ParseError::message(span, "expected a prefix name ending in ':'"));
            }
            None => return Err(ParseError::message(cur.here(), "expected a prefix name")),
        };
        let expansion = match cur.next() {
            Some(QSpanned { tok: QTok::Iri(iri), .. }) => iri,
            Some(QSpanned { span, .. }) => {
                return Err(ParseError::message(span, "expected an IRI in angle brackets"));
            }
            None => return Err(ParseError::message(span, "expected an IRI in angle brackets")),
        };
        prefix_map.insert(name.clone(), expansion.clone());
        prefixes.push((name, expansion));
    }

    match cur.next() {
        Some(QSpanned { tok: QTok::Keyword("SELECT"), .. }) => {}
        Some(QSpanned { span, .. }) => return Err(ParseError::message(span, "expected SELECT")),
        None => return Err(ParseError::message(cur.here(), "expected SELECT")),
    }

    let mut projected_names: Vec<String> = Vec::new();
    while let Some(QSpanned { tok: QTok::Var(_), .. }) = cur.peek() {
        if let Some(QSpanned { tok: QTok::Var(name), span }) = cur.next() {
            if projected_names.contains(&name) {
                return Err(ParseError::message(span, format!("duplicate projected variable ?{name}")));
            }
            projected_names.push(name);
        }
    }
    if projected_names.is_empty() {
        return Err(ParseError::message(cur.here(), "SELECT needs at least one variable"));
    }

    match cur.next() {
        Some(QSpanned { tok: QTok::Keyword("WHERE"), .. }) => {}
        Some(QSpanned { span, .. }) => return Err(ParseError::message(span, "expected WHERE")),
        None => return Err(ParseError::message(cur.here(), "expected WHERE")),
    }
    match cur.next() {
        Some(QSpanned { tok: QTok::LBrace, .. }) => {}
        Some(QSpanned { span, .. }) => return Err(ParseError::message(span, "expected '{'")),
        None => return Err(ParseError::message(cur.here(), "expected '{'")),
    }

    let mut patterns: Vec<Atom> = Vec::new();
    loop {
        match cur.peek() {
            Some(QSpanned { tok: QTok::RBrace, .. }) => {
                cur.next();
                break;
            }
            None => return Err(ParseError::message(cur.here(), "expected '}'")),
            _ => {}
        }
        let subject = parse_query_term(&mut cur)?;
        loop {
            let (verb, verb_span) = match cur.next() {
                Some(QSpanned { tok: QTok::A, span }) => (None, span),
                Some(QSpanned { tok: QTok::Prefixed(p, l), span }) => {
                    if p == "rdf" && l == "type" {
                        if !prefix_map.contains_key("rdf") {
                            return Err(ParseError::new(
                                span,
                                ParseErrorKind::UnknownPrefix("rdf".to_string()),
                            ));
                        }
                        (None, span)
                    } else {
                        (Some((p, l)), span)
                    }
                }
                Some(QSpanned { tok: QTok::Var(name), span }) => {
                    return Err(ParseError::message(
                        span,
                        format!("variable predicate ?{name} is not supported"),
                    ));
                }
                Some(QSpanned { span, .. }) => {
                    return Err(ParseError::message(span, "expected a predicate"));
                }
                None => return Err(ParseError::message(cur.here(), "expected a predicate")),
            };
            let object = parse_query_term(&mut cur)?;
            let atom = match verb {
                None => {
                    // Type pattern: the object must be a named class.
                    let (class_name, class_span) = match object {
                        QueryTerm::Name(n, s) => (n, s),
                        QueryTerm::Var(v, s) => {
                            return Err(ParseError::message(
                                s,
                                format!("the class position of a type pattern must be a named class, not ?{v}"),
                            ));
                        }
                    };
                    let class = resolve(&class_name, &class_span, &prefix_map, symbols, SymbolKind::Class)?;
                    Atom::Class { class, arg: term_of(&subject, &prefix_map, symbols)? }
                }
                Some((p, l)) => {
                    let property = resolve(
                        &format!("{p}:{l}"),
                        &verb_span,
                        &prefix_map,
                        symbols,
                        SymbolKind::Property,
                    )?;
                    Atom::Property {
                        property,
                        subject: term_of(&subject, &prefix_map, symbols)?,
                        object: term_of(&object, &prefix_map, symbols)?,
                    }
                }
            };
            patterns.push(atom);
            match cur.peek() {
                Some(QSpanned { tok: QTok::Semicolon, .. }) => {
                    cur.next();
                }
                _ => break,
            }
        }
        // '.' terminates the predicate-object list; it is optional before '}'.
        if let Some(QSpanned { tok: QTok::Dot, .. }) = cur.peek() {
            cur.next();
        }
    }

    if let Some(t) = cur.peek() {
        return Err(ParseError::message(t.span.clone(), "unexpected content after '}'"));
    }
    if patterns.is_empty() {
        return Err(ParseError::message(cur.here(), "WHERE block has no patterns"));
    }

    let mut pattern_vars: Vec<SymbolId> = Vec::new();
    for p in &patterns {
        pattern_vars.extend(p.variables());
    }
    let mut projected = Vec::with_capacity(projected_names.len());
    for name in &projected_names {
        let id = symbols
            .reference(name, SymbolKind::Variable)
            .expect("variable interning cannot conflict");
        if !pattern_vars.contains(&id) {
            return Err(ParseError::new(
                cur.end.clone(),
                ParseErrorKind::UnprojectableVariable(name.clone()),
            ));
        }
        projected.push(id);
    }

    Ok(Query { prefixes, projected, projected_names, patterns })
}

fn parse_query_term(cur: &mut QCursor) -> Result<QueryTerm, ParseError> {
    match cur.next() {
        Some(QSpanned { tok: QTok::Var(name), span }) => Ok(QueryTerm::Var(name, span)),
        Some(QSpanned { tok: QTok::Prefixed(p, l), span }) => {
            Ok(QueryTerm::Name(format!("{p}:{l}"), span))
        }
        Some(QSpanned { tok: QTok::Word(w), span }) => Err(ParseError::message(
            span,
            format!("bare name '{w}' — terms must be variables or prefixed names"),
        )),
        Some(QSpanned { span, .. }) => Err(ParseError::message(span, "expected a term")),
        None => Err(ParseError::message(cur.here(), "expected a term")),
    }
}

fn term_of(
    term: &QueryTerm,
    prefix_map: &HashMap<String, String>,
    symbols: &mut SymbolTable,
) -> Result<Term, ParseError> {
    match term {
        QueryTerm::Var(name, span) => {
            let id = symbols
                .reference(name, SymbolKind::Variable)
                .map_err(|e| ParseError::new(span.clone(), ParseErrorKind::Model(e)))?;
            Ok(Term::Var(id))
        }
        QueryTerm::Name(name, span) => {
            let id = resolve(name, span, prefix_map, symbols, SymbolKind::Individual)?;
            Ok(Term::Const(id))
        }
    }
}

fn resolve(
    prefixed: &str,
    span: &SourceSpan,
    prefix_map: &HashMap<String, String>,
    symbols: &mut SymbolTable,
    kind: SymbolKind,
) -> Result<SymbolId, ParseError> {
    let (prefix, local) = prefixed.split_once(':').expect("prefixed name contains ':'");
    let expansion = prefix_map.get(prefix).ok_or_else(|| {
        ParseError::new(span.clone(), ParseErrorKind::UnknownPrefix(prefix.to_string()))
    })?;
    let flat = format!("{expansion}{local}");
    symbols
        .reference(&flat, kind)
        .map_err(|e| ParseError::new(span.clone(), ParseErrorKind::Model(e)))
}
