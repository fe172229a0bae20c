//! Deterministic rendering of a knowledge base back into the document
//! grammar, plus display helpers for atoms and facts shared by the CLI.
//!
//! Rendering is the inverse of parsing: re-parsing a rendered document gives
//! a structurally equal knowledge base, and rendering that parse again gives
//! byte-identical text.

use std::fmt::Write as _;

use crate::model::{Atom, AxiomKind, ClassExpression, Fact, KnowledgeBase, Rule, Term};
use crate::symbol::{SymbolKind, SymbolTable};

pub fn render_document(kb: &KnowledgeBase) -> String {
    let symbols = kb.symbols();
    let mut out = String::from("# knowledge base\n");

    let mut declared: Vec<_> = symbols
        .ids()
        .filter(|&id| symbols.is_declared(id) && symbols.kind(id) != SymbolKind::Variable)
        .collect();
    declared.sort();
    for id in declared {
        let keyword = match symbols.kind(id) {
            SymbolKind::Class => "class",
            SymbolKind::Property => "property",
            SymbolKind::Individual => "individual",
            SymbolKind::Variable => unreachable!(),
        };
        let _ = writeln!(out, "{keyword} {}", symbols.lexical(id));
    }

    for axiom in kb.tbox() {
        match &axiom.kind {
            AxiomKind::SubClassOf { sub, sup } => {
                let _ = writeln!(
                    out,
                    "sub {} < {}",
                    render_expression(sub, symbols),
                    render_expression(sup, symbols)
                );
            }
            AxiomKind::EquivalentClasses { name, definition } => {
                let _ = writeln!(
                    out,
                    "equiv {} = {}",
                    symbols.lexical(*name),
                    render_expression(definition, symbols)
                );
            }
            AxiomKind::DisjointClasses { a, b } => {
                let _ = writeln!(out, "disjoint {} {}", symbols.lexical(*a), symbols.lexical(*b));
            }
        }
    }

    for fact in kb.abox() {
        match *fact {
            Fact::Type { individual, class } => {
                let _ = writeln!(out, "type {} : {}", symbols.lexical(individual), symbols.lexical(class));
            }
            Fact::Rel { property, subject, object } => {
                let _ = writeln!(
                    out,
                    "fact {}({}, {})",
                    symbols.lexical(property),
                    symbols.lexical(subject),
                    symbols.lexical(object)
                );
            }
        }
    }

    for rule in kb.rules() {
        let _ = writeln!(out, "{}", render_rule(rule, symbols));
    }

    out
}

pub fn render_expression(expr: &ClassExpression, symbols: &SymbolTable) -> String {
    match expr {
        // Top and Bottom have no surface form in the grammar; they only show
        // up in diagnostics for programmatically built expressions.
        ClassExpression::Top => "⊤".to_string(),
        ClassExpression::Bottom => "⊥".to_string(),
        ClassExpression::Named(c) => symbols.lexical(*c).to_string(),
        ClassExpression::Intersection(members) => {
            let inner: Vec<String> = members.iter().map(|m| render_expression(m, symbols)).collect();
            format!("and({})", inner.join(", "))
        }
        ClassExpression::Exists(p, filler) => {
            format!("some({}, {})", symbols.lexical(*p), render_expression(filler, symbols))
        }
    }
}

fn render_term(term: Term, symbols: &SymbolTable) -> String {
    match term {
        Term::Var(v) => format!("?{}", symbols.lexical(v)),
        Term::Const(c) => symbols.lexical(c).to_string(),
    }
}

pub fn display_atom(atom: &Atom, symbols: &SymbolTable) -> String {
    match atom {
        Atom::Class { class, arg } => {
            format!("{}({})", symbols.lexical(*class), render_term(*arg, symbols))
        }
        Atom::Property { property, subject, object } => {
            format!(
                "{}({}, {})",
                symbols.lexical(*property),
                render_term(*subject, symbols),
                render_term(*object, symbols)
            )
        }
    }
}

/// `Class(ind)` / `property(a,b)` — the form accepted back by `parse_fact`.
pub fn display_fact(fact: &Fact, symbols: &SymbolTable) -> String {
    match *fact {
        Fact::Type { individual, class } => {
            format!("{}({})", symbols.lexical(class), symbols.lexical(individual))
        }
        Fact::Rel { property, subject, object } => {
            format!(
                "{}({},{})",
                symbols.lexical(property),
                symbols.lexical(subject),
                symbols.lexical(object)
            )
        }
    }
}

fn render_rule(rule: &Rule, symbols: &SymbolTable) -> String {
    let body: Vec<String> = rule.body.iter().map(|a| display_atom(a, symbols)).collect();
    let head: Vec<String> = rule.head.iter().map(|a| display_atom(a, symbols)).collect();
    format!("rule {}: {} -> {}", rule.id, body.join(" ^ "), head.join(" ^ "))
}
