//! Ground inference: compiles the normalized TBox and the user rules into
//! one rule program, materializes the ABox to a fixpoint with provenance,
//! and reports disjointness clashes.
//!
//! Ontology axioms become type-propagation rules; `A ⊑ ∃r.B` is never
//! compiled to an ABox rule (no anonymous individuals are invented — it
//! participates in classification only). To keep instance types complete
//! with respect to the classified hierarchy, the pipeline also compiles one
//! propagation rule per derived subsumption pair, so a type fact reaches
//! every subsumer even when the path runs through an existential.
//!
//! Disjointness pairs compile to rules whose head is the internal ⊥ class;
//! a derived ⊥ membership marks an inconsistency, is collected as a clash
//! and never aborts saturation.

mod justify;
mod naive;
pub(crate) mod saturate;

pub use justify::{
    enumerate_justifications, justify, proof_rule_origins, render_proof, ProofNode, ProofSource,
};
pub use naive::naive_saturate;
pub use saturate::saturate;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::model::{Atom, AxiomId, Fact, KnowledgeBase, Rule, Term};
use crate::reasoner::{classify, normalize, NormalAxiom, NormalForm, Normalized, Taxonomy};
use crate::symbol::{SymbolId, SymbolKind, SymbolTable};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("fact is not entailed by the knowledge base")]
    NotEntailed(Fact),
}

/// Where a compiled rule came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleOrigin {
    /// One or more TBox axioms (shared normalization names can fold several).
    Axioms(BTreeSet<AxiomId>),
    /// A user rule, by id.
    User(String),
}

impl fmt::Display for RuleOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleOrigin::Axioms(ids) => {
                let parts: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
                f.write_str(&parts.join("+"))
            }
            RuleOrigin::User(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Ontology,
    User,
}

/// One single-headed ground-inference rule. Multi-headed user rules are
/// split into one compiled rule per head atom over the shared body.
#[derive(Debug, Clone)]
pub struct CompiledRule {
    pub origin: RuleOrigin,
    pub kind: RuleKind,
    pub body: Vec<Atom>,
    pub head: Atom,
}

/// Compile normal axioms and user rules into a program:
///
/// ```text
/// A ⊑ B            A(x) ⇒ B(x)
/// A1 ⊓ A2 ⊑ B      A1(x) ∧ A2(x) ⇒ B(x)
/// ∃r.A ⊑ B         r(x, y) ∧ A(y) ⇒ B(x)
/// A1 ⊓ A2 ⊑ ⊥      A1(x) ∧ A2(x) ⇒ ⊥(x)     (clash marker)
/// A ⊑ ∃r.B         (not compiled)
/// ```
pub fn compile(
    normals: &[NormalAxiom],
    rules: &[Rule],
    symbols: &mut SymbolTable,
    bottom: SymbolId,
) -> Vec<CompiledRule> {
    let x = symbols.intern_internal("x", SymbolKind::Variable);
    let y = symbols.intern_internal("y", SymbolKind::Variable);
    let vx = Term::Var(x);
    let vy = Term::Var(y);
    let mut program = Vec::new();
    for n in normals {
        let origin = RuleOrigin::Axioms(n.origin.clone());
        match n.form {
            NormalForm::Sub(a, b) => program.push(CompiledRule {
                origin,
                kind: RuleKind::Ontology,
                body: vec![Atom::Class { class: a, arg: vx }],
                head: Atom::Class { class: b, arg: vx },
            }),
            NormalForm::SubConj(a1, a2, b) => program.push(CompiledRule {
                origin,
                kind: RuleKind::Ontology,
                body: vec![
                    Atom::Class { class: a1, arg: vx },
                    Atom::Class { class: a2, arg: vx },
                ],
                head: Atom::Class { class: b, arg: vx },
            }),
            NormalForm::ExistsSub(r, a, b) => program.push(CompiledRule {
                origin,
                kind: RuleKind::Ontology,
                body: vec![
                    Atom::Property { property: r, subject: vx, object: vy },
                    Atom::Class { class: a, arg: vy },
                ],
                head: Atom::Class { class: b, arg: vx },
            }),
            NormalForm::SubBottom(a1, a2) => program.push(CompiledRule {
                origin,
                kind: RuleKind::Ontology,
                body: vec![
                    Atom::Class { class: a1, arg: vx },
                    Atom::Class { class: a2, arg: vx },
                ],
                head: Atom::Class { class: bottom, arg: vx },
            }),
            NormalForm::SubExists(..) => {}
        }
    }
    for rule in rules {
        for head in &rule.head {
            program.push(CompiledRule {
                origin: RuleOrigin::User(rule.id.clone()),
                kind: RuleKind::User,
                body: rule.body.clone(),
                head: *head,
            });
        }
    }
    program
}

/// Whether user rules take part in materialization. Ontology-derived rules
/// always remain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleMode {
    OntologyOnly,
    WithRules,
}

/// Everything derived from a knowledge base before saturation: the extended
/// symbol space (fresh names, ⊤/⊥, rule variables), normal forms, the
/// classified taxonomy and the compiled program.
#[derive(Debug)]
pub struct InferenceSetup {
    pub symbols: SymbolTable,
    pub normalized: Normalized,
    pub taxonomy: Taxonomy,
    pub program: Vec<CompiledRule>,
}

impl InferenceSetup {
    /// Classes that must not appear in user-visible output: fresh
    /// normalization names, ⊤ and ⊥.
    pub fn is_internal_class(&self, id: SymbolId) -> bool {
        id == self.normalized.top
            || id == self.normalized.bottom
            || self.normalized.fresh_names.contains_key(&id)
    }
}

/// Normalize, classify and compile a knowledge base.
pub fn prepare(kb: &KnowledgeBase, mode: RuleMode) -> InferenceSetup {
    let mut symbols = kb.symbols().clone();
    let normalized = normalize(kb.tbox(), &mut symbols);
    let taxonomy = classify(&normalized, &kb.declared_classes());

    // Extend the normal set with every classified subsumption pair, so the
    // compiled program realizes instances completely even when a subsumption
    // was derived through an existential. Pairs already present as plain
    // subclass normals are skipped.
    let mut extended = normalized.normals.clone();
    let existing: HashSet<(SymbolId, SymbolId)> = extended
        .iter()
        .filter_map(|n| match n.form {
            NormalForm::Sub(a, b) => Some((a, b)),
            _ => None,
        })
        .collect();
    let (top, bottom) = (normalized.top, normalized.bottom);
    for (a, b, origin) in taxonomy.all_subsumption_pairs() {
        if a == b || a == top || a == bottom || b == top || b == bottom {
            continue;
        }
        if existing.contains(&(a, b)) {
            continue;
        }
        extended.push(NormalAxiom { form: NormalForm::Sub(a, b), origin: origin.clone() });
    }

    let rules: &[Rule] = match mode {
        RuleMode::WithRules => kb.rules(),
        RuleMode::OntologyOnly => &[],
    };
    let program = compile(&extended, rules, &mut symbols, normalized.bottom);
    InferenceSetup { symbols, normalized, taxonomy, program }
}

// ---------------------------------------------------------------------------
// Fact storage
// ---------------------------------------------------------------------------

/// Predicate of an atom or fact, for sizing and delta grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Pred {
    Class(SymbolId),
    Prop(SymbolId),
}

impl Atom {
    pub(crate) fn pred(&self) -> Pred {
        match self {
            Atom::Class { class, .. } => Pred::Class(*class),
            Atom::Property { property, .. } => Pred::Prop(*property),
        }
    }
}

impl Fact {
    pub(crate) fn pred(&self) -> Pred {
        match self {
            Fact::Type { class, .. } => Pred::Class(*class),
            Fact::Rel { property, .. } => Pred::Prop(*property),
        }
    }
}

/// Indexed fact set. Facts keep their insertion order and the round they
/// first appeared in, which drives both semi-naive deltas and deterministic
/// output.
#[derive(Debug, Default, Clone)]
pub struct FactStore {
    order: Vec<Fact>,
    depth: HashMap<Fact, u32>,
    by_class: HashMap<SymbolId, Vec<(SymbolId, u32)>>,
    by_prop: HashMap<SymbolId, Vec<(SymbolId, SymbolId, u32)>>,
    by_prop_subj: HashMap<(SymbolId, SymbolId), Vec<(SymbolId, u32)>>,
    by_prop_obj: HashMap<(SymbolId, SymbolId), Vec<(SymbolId, u32)>>,
}

impl FactStore {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.depth.contains_key(fact)
    }

    /// Round the fact was first derived in; 0 for asserted facts.
    pub fn depth_of(&self, fact: &Fact) -> Option<u32> {
        self.depth.get(fact).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.order.iter()
    }

    pub(crate) fn insert(&mut self, fact: Fact, depth: u32) -> bool {
        if self.depth.contains_key(&fact) {
            return false;
        }
        self.depth.insert(fact, depth);
        self.order.push(fact);
        match fact {
            Fact::Type { individual, class } => {
                self.by_class.entry(class).or_default().push((individual, depth));
            }
            Fact::Rel { property, subject, object } => {
                self.by_prop.entry(property).or_default().push((subject, object, depth));
                self.by_prop_subj.entry((property, subject)).or_default().push((object, depth));
                self.by_prop_obj.entry((property, object)).or_default().push((subject, depth));
            }
        }
        true
    }

    pub(crate) fn relation_size(&self, pred: Pred) -> usize {
        match pred {
            Pred::Class(c) => self.by_class.get(&c).map_or(0, Vec::len),
            Pred::Prop(p) => self.by_prop.get(&p).map_or(0, Vec::len),
        }
    }

    pub(crate) fn class_members(&self, class: SymbolId) -> &[(SymbolId, u32)] {
        self.by_class.get(&class).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn prop_pairs(&self, property: SymbolId) -> &[(SymbolId, SymbolId, u32)] {
        self.by_prop.get(&property).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn objects_of(&self, property: SymbolId, subject: SymbolId) -> &[(SymbolId, u32)] {
        self.by_prop_subj.get(&(property, subject)).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn subjects_of(&self, property: SymbolId, object: SymbolId) -> &[(SymbolId, u32)] {
        self.by_prop_obj.get(&(property, object)).map_or(&[], Vec::as_slice)
    }
}

// ---------------------------------------------------------------------------
// Materialization
// ---------------------------------------------------------------------------

/// How many alternative derivations are retained per fact.
pub const MAX_DERIVATIONS_PER_FACT: usize = 8;

/// One recorded application of a compiled rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    /// Index into the program.
    pub rule: usize,
    /// Ground body facts, in body-atom order.
    pub supports: Vec<Fact>,
    /// Variable binding, sorted by variable id.
    pub binding: Vec<(SymbolId, SymbolId)>,
    /// Round this derivation fired in.
    pub depth: u32,
}

/// A disjointness violation on one individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clash {
    pub individual: SymbolId,
    pub axiom: AxiomId,
    pub facts: (Fact, Fact),
}

/// The saturated fact set with provenance. Asserted facts are a subset of
/// `facts`; inconsistency is a reported state, never an abort.
#[derive(Debug, Clone)]
pub struct Materialization {
    pub program: Vec<CompiledRule>,
    pub facts: FactStore,
    pub(crate) provenance: HashMap<Fact, Vec<Derivation>>,
    pub consistent: bool,
    pub clashes: Vec<Clash>,
    pub rounds: u32,
}

impl Materialization {
    pub fn is_asserted(&self, fact: &Fact) -> bool {
        self.facts.depth_of(fact) == Some(0)
    }

    /// Recorded derivations, in first-found order (empty for facts that were
    /// only asserted).
    pub fn derivations(&self, fact: &Fact) -> &[Derivation] {
        self.provenance.get(fact).map_or(&[], Vec::as_slice)
    }
}

/// Derive the clash list from ⊥ memberships. Each recorded derivation of a
/// ⊥ fact names the violated disjointness axiom and the two class facts.
pub(crate) fn collect_clashes(
    facts: &FactStore,
    provenance: &HashMap<Fact, Vec<Derivation>>,
    program: &[CompiledRule],
    bottom: SymbolId,
) -> Vec<Clash> {
    let mut clashes = Vec::new();
    for fact in facts.iter() {
        let Fact::Type { individual, class } = *fact else { continue };
        if class != bottom {
            continue;
        }
        for deriv in provenance.get(fact).map_or(&[][..], Vec::as_slice) {
            let RuleOrigin::Axioms(ids) = &program[deriv.rule].origin else { continue };
            let Some(&axiom) = ids.first() else { continue };
            if deriv.supports.len() == 2 {
                clashes.push(Clash {
                    individual,
                    axiom,
                    facts: (deriv.supports[0], deriv.supports[1]),
                });
            }
        }
    }
    clashes
}

/// A clash expanded with the proof of both sides.
#[derive(Debug, Clone)]
pub struct ClashReport {
    pub clash: Clash,
    pub justifications: (ProofNode, ProofNode),
}

/// Consistency verdict over a finished materialization.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub clashes: Vec<ClashReport>,
}

pub fn check_consistency(m: &Materialization) -> ConsistencyReport {
    let clashes = m
        .clashes
        .iter()
        .map(|clash| ClashReport {
            clash: clash.clone(),
            justifications: (
                justify(&clash.facts.0, m).expect("clash support is entailed"),
                justify(&clash.facts.1, m).expect("clash support is entailed"),
            ),
        })
        .collect();
    ConsistencyReport { consistent: m.consistent, clashes }
}

/// Render the materialized facts as sorted TSV, one fact per line:
/// `type<TAB>individual<TAB>class` or `rel<TAB>property<TAB>subject<TAB>object`.
/// Facts over internal classes (fresh names, ⊥) are not listed.
pub fn render_materialization_tsv(
    m: &Materialization,
    setup: &InferenceSetup,
    symbols: &SymbolTable,
) -> String {
    let mut lines: BTreeSet<String> = BTreeSet::new();
    for fact in m.facts.iter() {
        match *fact {
            Fact::Type { individual, class } => {
                if setup.is_internal_class(class) {
                    continue;
                }
                lines.insert(format!(
                    "type\t{}\t{}",
                    symbols.lexical(individual),
                    symbols.lexical(class)
                ));
            }
            Fact::Rel { property, subject, object } => {
                lines.insert(format!(
                    "rel\t{}\t{}\t{}",
                    symbols.lexical(property),
                    symbols.lexical(subject),
                    symbols.lexical(object)
                ));
            }
        }
    }
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Ground a head atom under a binding. Head variables are guaranteed bound
/// for safe rules.
pub(crate) fn ground_head(head: &Atom, env: &HashMap<SymbolId, SymbolId>) -> Fact {
    let value = |term: &Term| -> SymbolId {
        match term {
            Term::Const(c) => *c,
            Term::Var(v) => *env.get(v).expect("safe rule: head variable bound"),
        }
    };
    match head {
        Atom::Class { class, arg } => Fact::Type { individual: value(arg), class: *class },
        Atom::Property { property, subject, object } => Fact::Rel {
            property: *property,
            subject: value(subject),
            object: value(object),
        },
    }
}

pub(crate) fn binding_of(env: &HashMap<SymbolId, SymbolId>) -> Vec<(SymbolId, SymbolId)> {
    let mut binding: Vec<(SymbolId, SymbolId)> = env.iter().map(|(&v, &c)| (v, c)).collect();
    binding.sort();
    binding
}
