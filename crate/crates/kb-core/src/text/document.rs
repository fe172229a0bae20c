//! Parser for `.kb` documents, standalone rules and ground fact strings.
//!
//! Statements are line-oriented; whitespace within a line is free-form and
//! `#` starts a comment. Statement forms:
//!
//! ```text
//! class Name [subclassOf CE]
//! property Name
//! individual Name
//! type Individual : Class
//! fact property(Individual, Individual)
//! sub CE < CE
//! equiv Name = CE
//! disjoint Name Name [Name ...]          # n-ary, expanded pairwise
//! rule name: Atom ^ ... -> Atom ^ ...
//! CE := Name | and(CE, CE, ...) | some(property, CE)
//! ```

use crate::model::{
    check_rule_safety, Atom, Axiom, AxiomId, AxiomKind, ClassExpression, Fact, KnowledgeBase,
    ModelError, Rule, Term,
};
use crate::symbol::{SymbolId, SymbolKind, SymbolTable};
use crate::text::{lex_line, Cursor, ParseError, ParseErrorKind, SourceSpan, Tok};

/// Everything one document contributed, with the span of each statement.
#[derive(Debug, Default)]
pub struct DocumentFragment {
    pub axioms: Vec<Axiom>,
    pub facts: Vec<Fact>,
    pub rules: Vec<Rule>,
    pub declarations: Vec<(SymbolId, SourceSpan)>,
    pub axiom_spans: Vec<SourceSpan>,
    pub fact_spans: Vec<SourceSpan>,
    pub rule_spans: Vec<SourceSpan>,
}

/// Parse one document. Axiom ids are assigned sequentially starting at
/// `first_axiom_id`, so multiple documents can share one id space.
pub fn parse_document(
    text: &str,
    file: &str,
    symbols: &mut SymbolTable,
    first_axiom_id: u32,
) -> Result<DocumentFragment, ParseError> {
    let mut fragment = DocumentFragment::default();
    let mut next_axiom = first_axiom_id;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = (idx + 1) as u32;
        let toks = lex_line(raw_line, file, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let end = SourceSpan {
            file: file.to_string(),
            line: line_no,
            column: (raw_line.chars().count() + 1) as u32,
        };
        let mut cur = Cursor::new(toks, end);
        parse_statement(&mut cur, symbols, &mut fragment, &mut next_axiom)?;
    }
    Ok(fragment)
}

fn wrap_model(err: ModelError, span: SourceSpan) -> ParseError {
    ParseError { span, kind: ParseErrorKind::Model(err) }
}

fn parse_statement(
    cur: &mut Cursor,
    symbols: &mut SymbolTable,
    fragment: &mut DocumentFragment,
    next_axiom: &mut u32,
) -> Result<(), ParseError> {
    let (keyword, stmt_span) = cur.expect_ident("a statement keyword")?;
    match keyword.as_str() {
        "class" => {
            let (name, span) = cur.expect_ident("a class name")?;
            let id = symbols
                .intern_punned(&name, SymbolKind::Class)
                .map_err(|e| wrap_model(e, span.clone()))?;
            fragment.declarations.push((id, span.clone()));
            // Optional `subclassOf CE` sugar for a subclass axiom.
            if cur.peek().is_some() {
                let (word, kw_span) = cur.expect_ident("'subclassOf'")?;
                if word != "subclassOf" {
                    return Err(ParseError::message(
                        kw_span,
                        format!("expected 'subclassOf', found '{word}'"),
                    ));
                }
                let sup = parse_expression(cur, symbols)?;
                cur.finish()?;
                push_axiom(
                    fragment,
                    next_axiom,
                    AxiomKind::SubClassOf { sub: ClassExpression::Named(id), sup },
                    stmt_span,
                );
            }
            Ok(())
        }
        "property" => {
            let (name, span) = cur.expect_ident("a property name")?;
            let id = symbols
                .intern_punned(&name, SymbolKind::Property)
                .map_err(|e| wrap_model(e, span.clone()))?;
            fragment.declarations.push((id, span));
            cur.finish()
        }
        "individual" => {
            let (name, span) = cur.expect_ident("an individual name")?;
            let id = symbols
                .intern_punned(&name, SymbolKind::Individual)
                .map_err(|e| wrap_model(e, span.clone()))?;
            fragment.declarations.push((id, span));
            cur.finish()
        }
        "type" => {
            let (ind, ind_span) = cur.expect_ident("an individual name")?;
            cur.expect(Tok::Colon)?;
            let (class, class_span) = cur.expect_ident("a class name")?;
            cur.finish()?;
            let individual = symbols
                .reference(&ind, SymbolKind::Individual)
                .map_err(|e| wrap_model(e, ind_span))?;
            let class = symbols
                .reference(&class, SymbolKind::Class)
                .map_err(|e| wrap_model(e, class_span))?;
            fragment.facts.push(Fact::Type { individual, class });
            fragment.fact_spans.push(stmt_span);
            Ok(())
        }
        "fact" => {
            let (prop, prop_span) = cur.expect_ident("a property name")?;
            cur.expect(Tok::LParen)?;
            let (subj, subj_span) = cur.expect_ident("an individual name")?;
            cur.expect(Tok::Comma)?;
            let (obj, obj_span) = cur.expect_ident("an individual name")?;
            cur.expect(Tok::RParen)?;
            cur.finish()?;
            let property = symbols
                .reference(&prop, SymbolKind::Property)
                .map_err(|e| wrap_model(e, prop_span))?;
            let subject = symbols
                .reference(&subj, SymbolKind::Individual)
                .map_err(|e| wrap_model(e, subj_span))?;
            let object = symbols
                .reference(&obj, SymbolKind::Individual)
                .map_err(|e| wrap_model(e, obj_span))?;
            fragment.facts.push(Fact::Rel { property, subject, object });
            fragment.fact_spans.push(stmt_span);
            Ok(())
        }
        "sub" => {
            let sub = parse_expression(cur, symbols)?;
            cur.expect(Tok::Less)?;
            let sup = parse_expression(cur, symbols)?;
            cur.finish()?;
            push_axiom(fragment, next_axiom, AxiomKind::SubClassOf { sub, sup }, stmt_span);
            Ok(())
        }
        "equiv" => {
            let (name, span) = cur.expect_ident("a class name")?;
            let named = symbols
                .reference(&name, SymbolKind::Class)
                .map_err(|e| wrap_model(e, span))?;
            cur.expect(Tok::Equals)?;
            let definition = parse_expression(cur, symbols)?;
            cur.finish()?;
            push_axiom(
                fragment,
                next_axiom,
                AxiomKind::EquivalentClasses { name: named, definition },
                stmt_span,
            );
            Ok(())
        }
        "disjoint" => {
            let mut classes = Vec::new();
            let (first, first_span) = cur.expect_ident("a class name")?;
            classes.push(
                symbols
                    .reference(&first, SymbolKind::Class)
                    .map_err(|e| wrap_model(e, first_span))?,
            );
            while cur.peek().is_some() {
                let (name, span) = cur.expect_ident("a class name")?;
                classes.push(
                    symbols.reference(&name, SymbolKind::Class).map_err(|e| wrap_model(e, span))?,
                );
            }
            if classes.len() < 2 {
                return Err(ParseError::message(
                    cur.here(),
                    "disjoint needs at least two class names",
                ));
            }
            for i in 0..classes.len() {
                for j in (i + 1)..classes.len() {
                    push_axiom(
                        fragment,
                        next_axiom,
                        AxiomKind::DisjointClasses { a: classes[i], b: classes[j] },
                        stmt_span.clone(),
                    );
                }
            }
            Ok(())
        }
        "rule" => {
            let (name, _) = cur.expect_ident("a rule name")?;
            cur.expect(Tok::Colon)?;
            let rule = parse_rule_tail(cur, symbols, name, &stmt_span)?;
            fragment.rules.push(rule);
            fragment.rule_spans.push(stmt_span);
            Ok(())
        }
        other => Err(ParseError::message(
            stmt_span,
            format!(
                "unknown statement '{other}' (expected class, property, individual, type, fact, sub, equiv, disjoint or rule)"
            ),
        )),
    }
}

fn push_axiom(
    fragment: &mut DocumentFragment,
    next_axiom: &mut u32,
    kind: AxiomKind,
    span: SourceSpan,
) {
    *next_axiom += 1;
    fragment.axioms.push(Axiom { id: AxiomId(*next_axiom), kind });
    fragment.axiom_spans.push(span);
}

fn parse_expression(cur: &mut Cursor, symbols: &mut SymbolTable) -> Result<ClassExpression, ParseError> {
    let (head, span) = cur.expect_ident("a class expression")?;
    match head.as_str() {
        "and" => {
            cur.expect(Tok::LParen)?;
            let mut members = vec![parse_expression(cur, symbols)?];
            while cur.eat(&Tok::Comma) {
                members.push(parse_expression(cur, symbols)?);
            }
            cur.expect(Tok::RParen)?;
            if members.len() < 2 {
                return Err(ParseError::message(span, "and(...) needs at least two members"));
            }
            Ok(ClassExpression::and(members))
        }
        "some" => {
            cur.expect(Tok::LParen)?;
            let (prop, prop_span) = cur.expect_ident("a property name")?;
            let property = symbols
                .reference(&prop, SymbolKind::Property)
                .map_err(|e| wrap_model(e, prop_span))?;
            cur.expect(Tok::Comma)?;
            let filler = parse_expression(cur, symbols)?;
            cur.expect(Tok::RParen)?;
            Ok(ClassExpression::exists(property, filler))
        }
        name => {
            let id = symbols
                .reference(name, SymbolKind::Class)
                .map_err(|e| wrap_model(e, span))?;
            Ok(ClassExpression::Named(id))
        }
    }
}

fn parse_atom(cur: &mut Cursor, symbols: &mut SymbolTable) -> Result<Atom, ParseError> {
    let (pred, pred_span) = cur.expect_ident("an atom")?;
    cur.expect(Tok::LParen)?;
    let first = parse_term(cur, symbols)?;
    let atom = if cur.eat(&Tok::Comma) {
        let second = parse_term(cur, symbols)?;
        let property = symbols
            .reference(&pred, SymbolKind::Property)
            .map_err(|e| wrap_model(e, pred_span))?;
        Atom::Property { property, subject: first, object: second }
    } else {
        let class = symbols
            .reference(&pred, SymbolKind::Class)
            .map_err(|e| wrap_model(e, pred_span))?;
        Atom::Class { class, arg: first }
    };
    cur.expect(Tok::RParen)?;
    Ok(atom)
}

fn parse_term(cur: &mut Cursor, symbols: &mut SymbolTable) -> Result<Term, ParseError> {
    match cur.next() {
        Some(crate::text::Spanned { tok: Tok::Var(name), span }) => {
            let id =
                symbols.reference(&name, SymbolKind::Variable).map_err(|e| wrap_model(e, span))?;
            Ok(Term::Var(id))
        }
        Some(crate::text::Spanned { tok: Tok::Ident(name), span }) => {
            let id = symbols
                .reference(&name, SymbolKind::Individual)
                .map_err(|e| wrap_model(e, span))?;
            Ok(Term::Const(id))
        }
        Some(crate::text::Spanned { tok: Tok::Negation, span }) => {
            Err(ParseError::new(span, ParseErrorKind::NegationUnsupported))
        }
        Some(crate::text::Spanned { tok: Tok::Disjunction, span }) => {
            Err(ParseError::new(span, ParseErrorKind::DisjunctionUnsupported))
        }
        Some(crate::text::Spanned { tok, span }) => {
            Err(ParseError::message(span, format!("expected a term, found {tok}")))
        }
        None => Err(ParseError::message(cur.here(), "expected a term")),
    }
}

fn parse_atoms(cur: &mut Cursor, symbols: &mut SymbolTable) -> Result<Vec<Atom>, ParseError> {
    let mut atoms = vec![parse_atom(cur, symbols)?];
    while cur.eat(&Tok::Caret) {
        atoms.push(parse_atom(cur, symbols)?);
    }
    Ok(atoms)
}

fn parse_rule_tail(
    cur: &mut Cursor,
    symbols: &mut SymbolTable,
    id: String,
    span: &SourceSpan,
) -> Result<Rule, ParseError> {
    let body = parse_atoms(cur, symbols)?;
    cur.expect(Tok::Arrow)?;
    let head = parse_atoms(cur, symbols)?;
    cur.finish()?;
    let rule = Rule { id, body, head };
    check_rule_safety(&rule)
        .map_err(|v| ParseError::new(span.clone(), ParseErrorKind::UnsafeRule(v)))?;
    Ok(rule)
}

/// Parse a single rule. Accepts `name: body -> head` as well as the bare
/// `body -> head` form, in which case the rule takes the name of its first
/// head predicate.
pub fn parse_rule(text: &str, symbols: &mut SymbolTable) -> Result<Rule, ParseError> {
    let toks = lex_line(text, "<rule>", 1)?;
    let end = SourceSpan {
        file: "<rule>".to_string(),
        line: 1,
        column: (text.chars().count() + 1) as u32,
    };
    let span = toks
        .first()
        .map(|t| t.span.clone())
        .unwrap_or_else(|| end.clone());
    let mut cur = Cursor::new(toks, end);

    // `name:` prefix is present when the second token is a colon.
    let named = matches!(
        (cur.peek().map(|t| &t.tok), cur.peek_at(1)),
        (Some(Tok::Ident(_)), Some(Tok::Colon))
    );
    if named {
        let (name, _) = cur.expect_ident("a rule name")?;
        cur.expect(Tok::Colon)?;
        return parse_rule_tail(&mut cur, symbols, name, &span);
    }
    let body = parse_atoms(&mut cur, symbols)?;
    cur.expect(Tok::Arrow)?;
    let head = parse_atoms(&mut cur, symbols)?;
    cur.finish()?;
    let id = symbols.lexical(head[0].predicate()).to_string();
    let rule = Rule { id, body, head };
    check_rule_safety(&rule).map_err(|v| ParseError::new(span, ParseErrorKind::UnsafeRule(v)))?;
    Ok(rule)
}

/// Parse a ground fact string, `Class(ind)` or `property(a, b)`, resolving
/// against already-declared symbols only.
pub fn parse_fact(text: &str, symbols: &SymbolTable) -> Result<Fact, ParseError> {
    let toks = lex_line(text, "<fact>", 1)?;
    let end = SourceSpan {
        file: "<fact>".to_string(),
        line: 1,
        column: (text.chars().count() + 1) as u32,
    };
    let mut cur = Cursor::new(toks, end);
    let (pred, pred_span) = cur.expect_ident("a class or property name")?;
    cur.expect(Tok::LParen)?;
    let (first, first_span) = cur.expect_ident("an individual name")?;
    let lookup_ind = |name: &str, span: &SourceSpan| {
        symbols.lookup(name, SymbolKind::Individual).ok_or_else(|| {
            ParseError::message(span.clone(), format!("unknown individual '{name}'"))
        })
    };
    let fact = if cur.eat(&Tok::Comma) {
        let (second, second_span) = cur.expect_ident("an individual name")?;
        let property = symbols.lookup(&pred, SymbolKind::Property).ok_or_else(|| {
            ParseError::message(pred_span.clone(), format!("unknown property '{pred}'"))
        })?;
        Fact::Rel {
            property,
            subject: lookup_ind(&first, &first_span)?,
            object: lookup_ind(&second, &second_span)?,
        }
    } else {
        let class = symbols.lookup(&pred, SymbolKind::Class).ok_or_else(|| {
            ParseError::message(pred_span.clone(), format!("unknown class '{pred}'"))
        })?;
        Fact::Type { individual: lookup_ind(&first, &first_span)?, class }
    };
    cur.expect(Tok::RParen)?;
    cur.finish()?;
    Ok(fact)
}

/// Multi-document loader: parses any number of `.kb` sources into one symbol
/// space and one axiom id space, then validates and freezes the result.
#[derive(Default)]
pub struct KbLoader {
    symbols: SymbolTable,
    tbox: Vec<Axiom>,
    abox: Vec<Fact>,
    rules: Vec<Rule>,
    axiom_count: u32,
}

impl KbLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document(&mut self, text: &str, file: &str) -> Result<(), ParseError> {
        let fragment = parse_document(text, file, &mut self.symbols, self.axiom_count)?;
        self.axiom_count += fragment.axioms.len() as u32;
        self.tbox.extend(fragment.axioms);
        self.abox.extend(fragment.facts);
        self.rules.extend(fragment.rules);
        Ok(())
    }

    pub fn finish(self) -> Result<KnowledgeBase, ModelError> {
        KnowledgeBase::build(self.symbols, self.tbox, self.abox, self.rules)
    }
}
