//! Core data model: class expressions, axioms, rules, facts and the
//! immutable [`KnowledgeBase`] container shared by every other module.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::symbol::{SymbolId, SymbolKind, SymbolTable};

/// Errors raised while building model values or a knowledge base.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("symbol name {name:?} is empty or contains whitespace")]
    InvalidName { name: String },
    #[error("name '{name}' is already a {existing}, cannot reuse it as a {requested}")]
    KindConflict { name: String, existing: SymbolKind, requested: SymbolKind },
    #[error("undeclared {kind} '{name}'")]
    UndeclaredSymbol { name: String, kind: SymbolKind },
    #[error("duplicate axiom id {0}")]
    DuplicateAxiomId(AxiomId),
    #[error("duplicate rule id '{0}'")]
    DuplicateRuleId(String),
    #[error("{0}")]
    UnsafeRule(RuleSafetyViolation),
    #[error("rule '{rule}' has an empty {part}")]
    EmptyRulePart { rule: String, part: &'static str },
    #[error("atom uses '{name}' as a {requested}, but it is a {actual}")]
    WrongSymbolKind { name: String, requested: SymbolKind, actual: SymbolKind },
}

/// A class expression: a named class, ⊤, ⊥, an intersection, or an
/// existential restriction over a property.
///
/// Intersections are kept canonical — flattened, sorted, deduplicated —
/// so derived structural equality is decidable equality of meaning up to
/// commutativity and idempotence of ⊓.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassExpression {
    Top,
    Bottom,
    Named(SymbolId),
    Intersection(Vec<ClassExpression>),
    Exists(SymbolId, Box<ClassExpression>),
}

impl ClassExpression {
    /// Canonicalizing intersection constructor. Nested intersections are
    /// flattened, members sorted and deduplicated; a single surviving member
    /// collapses to itself.
    pub fn and(members: Vec<ClassExpression>) -> ClassExpression {
        let mut flat = Vec::with_capacity(members.len());
        for m in members {
            match m {
                ClassExpression::Intersection(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => ClassExpression::Top,
            1 => flat.pop().unwrap(),
            _ => ClassExpression::Intersection(flat),
        }
    }

    pub fn exists(property: SymbolId, filler: ClassExpression) -> ClassExpression {
        ClassExpression::Exists(property, Box::new(filler))
    }

    /// Every class symbol mentioned, in syntactic order.
    pub fn class_symbols(&self, out: &mut Vec<SymbolId>) {
        match self {
            ClassExpression::Top | ClassExpression::Bottom => {}
            ClassExpression::Named(c) => out.push(*c),
            ClassExpression::Intersection(ms) => {
                for m in ms {
                    m.class_symbols(out);
                }
            }
            ClassExpression::Exists(_, filler) => filler.class_symbols(out),
        }
    }

    /// Every property symbol mentioned.
    pub fn property_symbols(&self, out: &mut Vec<SymbolId>) {
        match self {
            ClassExpression::Exists(p, filler) => {
                out.push(*p);
                filler.property_symbols(out);
            }
            ClassExpression::Intersection(ms) => {
                for m in ms {
                    m.property_symbols(out);
                }
            }
            _ => {}
        }
    }
}

/// Stable identifier for a TBox axiom, used by provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxiomId(pub u32);

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ax{}", self.0)
    }
}

/// TBox statement forms. Equivalence is restricted to a named class on the
/// left; disjointness is binary over named classes (the parser expands n-ary
/// disjointness pairwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomKind {
    SubClassOf { sub: ClassExpression, sup: ClassExpression },
    EquivalentClasses { name: SymbolId, definition: ClassExpression },
    DisjointClasses { a: SymbolId, b: SymbolId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub id: AxiomId,
    pub kind: AxiomKind,
}

/// A rule term: variable or individual constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(SymbolId),
    Const(SymbolId),
}

impl Term {
    pub fn as_var(self) -> Option<SymbolId> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

/// A rule or query atom over named classes and properties only; complex
/// expressions cannot appear here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Class { class: SymbolId, arg: Term },
    Property { property: SymbolId, subject: Term, object: Term },
}

impl Atom {
    pub fn terms(&self) -> Vec<Term> {
        match self {
            Atom::Class { arg, .. } => vec![*arg],
            Atom::Property { subject, object, .. } => vec![*subject, *object],
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = SymbolId> {
        self.terms().into_iter().filter_map(Term::as_var)
    }

    pub fn predicate(&self) -> SymbolId {
        match self {
            Atom::Class { class, .. } => *class,
            Atom::Property { property, .. } => *property,
        }
    }
}

/// A positive Horn rule. The representation has no negated atom form, so
/// rules are monotone by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
}

/// Safety violation: head variables that never occur in the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSafetyViolation {
    pub rule_id: String,
    pub unbound: Vec<SymbolId>,
}

impl fmt::Display for RuleSafetyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule '{}' is unsafe: {} head variable(s) not bound by the body",
            self.rule_id,
            self.unbound.len()
        )
    }
}

/// A rule is safe iff every variable in the head occurs in some body atom.
/// Violations are reported as a value listing the offending variables.
pub fn check_rule_safety(rule: &Rule) -> Result<(), RuleSafetyViolation> {
    let bound: HashSet<SymbolId> = rule.body.iter().flat_map(Atom::variables).collect();
    let mut unbound: Vec<SymbolId> = rule
        .head
        .iter()
        .flat_map(Atom::variables)
        .filter(|v| !bound.contains(v))
        .collect();
    unbound.sort();
    unbound.dedup();
    if unbound.is_empty() {
        Ok(())
    } else {
        Err(RuleSafetyViolation { rule_id: rule.id.clone(), unbound })
    }
}

/// A ground assertion: class membership or a property link between
/// individuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fact {
    Type { individual: SymbolId, class: SymbolId },
    Rel { property: SymbolId, subject: SymbolId, object: SymbolId },
}

/// Parsed or programmatically constructed input, validated and frozen.
/// A finalized knowledge base is immutable and safe to share across threads.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    symbols: SymbolTable,
    tbox: Vec<Axiom>,
    abox: Vec<Fact>,
    rules: Vec<Rule>,
}

impl KnowledgeBase {
    /// Validate and freeze a knowledge base. Rejects undeclared symbol
    /// references, duplicate axiom or rule ids, wrongly kinded symbols and
    /// unsafe rules.
    pub fn build(
        symbols: SymbolTable,
        tbox: Vec<Axiom>,
        abox: Vec<Fact>,
        rules: Vec<Rule>,
    ) -> Result<KnowledgeBase, ModelError> {
        let kb = KnowledgeBase { symbols, tbox, abox, rules };
        kb.validate()?;
        Ok(kb)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let mut axiom_ids = HashSet::new();
        for axiom in &self.tbox {
            if !axiom_ids.insert(axiom.id) {
                return Err(ModelError::DuplicateAxiomId(axiom.id));
            }
            match &axiom.kind {
                AxiomKind::SubClassOf { sub, sup } => {
                    self.check_expression(sub)?;
                    self.check_expression(sup)?;
                }
                AxiomKind::EquivalentClasses { name, definition } => {
                    self.check_symbol(*name, SymbolKind::Class)?;
                    self.check_expression(definition)?;
                }
                AxiomKind::DisjointClasses { a, b } => {
                    self.check_symbol(*a, SymbolKind::Class)?;
                    self.check_symbol(*b, SymbolKind::Class)?;
                }
            }
        }
        for fact in &self.abox {
            match *fact {
                Fact::Type { individual, class } => {
                    self.check_symbol(individual, SymbolKind::Individual)?;
                    self.check_symbol(class, SymbolKind::Class)?;
                }
                Fact::Rel { property, subject, object } => {
                    self.check_symbol(property, SymbolKind::Property)?;
                    self.check_symbol(subject, SymbolKind::Individual)?;
                    self.check_symbol(object, SymbolKind::Individual)?;
                }
            }
        }
        let mut rule_ids = HashSet::new();
        for rule in &self.rules {
            if !rule_ids.insert(rule.id.clone()) {
                return Err(ModelError::DuplicateRuleId(rule.id.clone()));
            }
            if rule.body.is_empty() {
                return Err(ModelError::EmptyRulePart { rule: rule.id.clone(), part: "body" });
            }
            if rule.head.is_empty() {
                return Err(ModelError::EmptyRulePart { rule: rule.id.clone(), part: "head" });
            }
            for atom in rule.body.iter().chain(&rule.head) {
                self.check_atom(atom)?;
            }
            check_rule_safety(rule).map_err(ModelError::UnsafeRule)?;
        }
        Ok(())
    }

    fn check_atom(&self, atom: &Atom) -> Result<(), ModelError> {
        match atom {
            Atom::Class { class, arg } => {
                self.check_symbol(*class, SymbolKind::Class)?;
                self.check_term(*arg)
            }
            Atom::Property { property, subject, object } => {
                self.check_symbol(*property, SymbolKind::Property)?;
                self.check_term(*subject)?;
                self.check_term(*object)
            }
        }
    }

    fn check_term(&self, term: Term) -> Result<(), ModelError> {
        match term {
            Term::Var(_) => Ok(()),
            Term::Const(i) => self.check_symbol(i, SymbolKind::Individual),
        }
    }

    fn check_expression(&self, expr: &ClassExpression) -> Result<(), ModelError> {
        let mut classes = Vec::new();
        expr.class_symbols(&mut classes);
        for c in classes {
            self.check_symbol(c, SymbolKind::Class)?;
        }
        let mut props = Vec::new();
        expr.property_symbols(&mut props);
        for p in props {
            self.check_symbol(p, SymbolKind::Property)?;
        }
        Ok(())
    }

    fn check_symbol(&self, id: SymbolId, kind: SymbolKind) -> Result<(), ModelError> {
        let actual = self.symbols.kind(id);
        if actual != kind {
            return Err(ModelError::WrongSymbolKind {
                name: self.symbols.lexical(id).to_string(),
                requested: kind,
                actual,
            });
        }
        if !self.symbols.is_declared(id) {
            return Err(ModelError::UndeclaredSymbol {
                name: self.symbols.lexical(id).to_string(),
                kind,
            });
        }
        Ok(())
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn tbox(&self) -> &[Axiom] {
        &self.tbox
    }

    pub fn abox(&self) -> &[Fact] {
        &self.abox
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Declared class ids, ascending.
    pub fn declared_classes(&self) -> Vec<SymbolId> {
        self.symbols.declared_of_kind(SymbolKind::Class)
    }

    /// Tear a knowledge base back into its parts (symbols, tbox, abox, rules).
    pub fn into_parts(self) -> (SymbolTable, Vec<Axiom>, Vec<Fact>, Vec<Rule>) {
        (self.symbols, self.tbox, self.abox, self.rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::new()
    }

    #[test]
    fn intersection_canonicalization_ignores_order_and_duplicates() {
        let mut t = table();
        let a = t.intern("A", SymbolKind::Class).unwrap();
        let b = t.intern("B", SymbolKind::Class).unwrap();
        let c = t.intern("C", SymbolKind::Class).unwrap();
        let x = ClassExpression::and(vec![
            ClassExpression::Named(c),
            ClassExpression::Named(a),
            ClassExpression::Named(b),
            ClassExpression::Named(a),
        ]);
        let y = ClassExpression::and(vec![
            ClassExpression::Named(a),
            ClassExpression::and(vec![ClassExpression::Named(b), ClassExpression::Named(c)]),
        ]);
        assert_eq!(x, y);
    }

    #[test]
    fn singleton_intersection_collapses() {
        let mut t = table();
        let a = t.intern("A", SymbolKind::Class).unwrap();
        let x = ClassExpression::and(vec![ClassExpression::Named(a), ClassExpression::Named(a)]);
        assert_eq!(x, ClassExpression::Named(a));
    }

    #[test]
    fn empty_build_is_ok() {
        let kb = KnowledgeBase::build(table(), vec![], vec![], vec![]).unwrap();
        assert!(kb.tbox().is_empty());
        assert!(kb.abox().is_empty());
        assert!(kb.rules().is_empty());
    }

    #[test]
    fn undeclared_fact_symbol_rejected() {
        let mut t = table();
        let c = t.intern("Patient", SymbolKind::Class).unwrap();
        let i = t.reference("tim", SymbolKind::Individual).unwrap();
        let err = KnowledgeBase::build(t, vec![], vec![Fact::Type { individual: i, class: c }], vec![])
            .unwrap_err();
        assert!(matches!(err, ModelError::UndeclaredSymbol { .. }));
    }

    #[test]
    fn duplicate_axiom_id_rejected() {
        let mut t = table();
        let a = t.intern("A", SymbolKind::Class).unwrap();
        let b = t.intern("B", SymbolKind::Class).unwrap();
        let ax = |id| Axiom {
            id: AxiomId(id),
            kind: AxiomKind::SubClassOf {
                sub: ClassExpression::Named(a),
                sup: ClassExpression::Named(b),
            },
        };
        let err = KnowledgeBase::build(t, vec![ax(1), ax(1)], vec![], vec![]).unwrap_err();
        assert_eq!(err, ModelError::DuplicateAxiomId(AxiomId(1)));
    }

    #[test]
    fn safety_reports_unbound_head_variables() {
        let mut t = table();
        let patient = t.intern("Patient", SymbolKind::Class).unwrap();
        let at_risk = t.intern("atRiskOf", SymbolKind::Property).unwrap();
        let x = t.intern("x", SymbolKind::Variable).unwrap();
        let z = t.intern("z", SymbolKind::Variable).unwrap();
        let rule = Rule {
            id: "r".into(),
            body: vec![Atom::Class { class: patient, arg: Term::Var(x) }],
            head: vec![Atom::Property { property: at_risk, subject: Term::Var(x), object: Term::Var(z) }],
        };
        let violation = check_rule_safety(&rule).unwrap_err();
        assert_eq!(violation.unbound, vec![z]);
    }

    #[test]
    fn constant_head_argument_is_safe() {
        let mut t = table();
        let patient = t.intern("Patient", SymbolKind::Class).unwrap();
        let req = t.intern("requiresPreventiveMeasure", SymbolKind::Property).unwrap();
        let proph = t.intern("AntibioticProphylaxis", SymbolKind::Individual).unwrap();
        let x = t.intern("x", SymbolKind::Variable).unwrap();
        let rule = Rule {
            id: "r".into(),
            body: vec![Atom::Class { class: patient, arg: Term::Var(x) }],
            head: vec![Atom::Property { property: req, subject: Term::Var(x), object: Term::Const(proph) }],
        };
        assert!(check_rule_safety(&rule).is_ok());
    }

    #[test]
    fn rebuilding_from_parts_is_idempotent() {
        let mut t = table();
        let a = t.intern("A", SymbolKind::Class).unwrap();
        let b = t.intern("B", SymbolKind::Class).unwrap();
        let i = t.intern("i", SymbolKind::Individual).unwrap();
        let kb = KnowledgeBase::build(
            t,
            vec![Axiom {
                id: AxiomId(1),
                kind: AxiomKind::SubClassOf {
                    sub: ClassExpression::Named(a),
                    sup: ClassExpression::Named(b),
                },
            }],
            vec![Fact::Type { individual: i, class: a }],
            vec![],
        )
        .unwrap();
        let snapshot = (kb.tbox().to_vec(), kb.abox().to_vec(), kb.rules().to_vec());
        let (symbols, tbox, abox, rules) = kb.into_parts();
        let kb2 = KnowledgeBase::build(symbols, tbox, abox, rules).unwrap();
        assert_eq!(snapshot, (kb2.tbox().to_vec(), kb2.abox().to_vec(), kb2.rules().to_vec()));
    }
}
