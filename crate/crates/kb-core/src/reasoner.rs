//! TBox services: normalization to EL normal forms and saturation-based
//! classification of the class hierarchy.
//!
//! The fragment is ⊓, ∃, ⊤, ⊥ over named classes. Complex nestings are
//! replaced by fresh class names with defining axioms in both directions, so
//! subsumptions over the original vocabulary are preserved. Classification
//! saturates per-class subsumer sets under the completion rules
//!
//! ```text
//! CR1: B ∈ S(A), B ⊑ C             ⇒ C ∈ S(A)
//! CR2: B1, B2 ∈ S(A), B1 ⊓ B2 ⊑ C  ⇒ C ∈ S(A)
//! CR3: B ∈ S(A), B ⊑ ∃r.C          ⇒ (A, C) ∈ R(r)
//! CR4: (A, B) ∈ R(r), C ∈ S(B), ∃r.C ⊑ D ⇒ D ∈ S(A)
//! CR5: (A, B) ∈ R(r), ⊥ ∈ S(B)     ⇒ ⊥ ∈ S(A)
//! ```
//!
//! plus ⊥-introduction from disjointness pairs (A1 ⊓ A2 ⊑ ⊥). The worklist
//! is FIFO and seeded in declaration order, so runs are reproducible; the
//! fixpoint itself is order-independent.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::model::{Axiom, AxiomId, AxiomKind, ClassExpression};
use crate::symbol::{SymbolId, SymbolKind, SymbolTable};

pub const TOP_LEXICAL: &str = "⊤";
pub const BOTTOM_LEXICAL: &str = "⊥";

/// EL normal forms. All slots are class or property symbols; `origin` is the
/// set of source axioms a normal axiom encodes (shared fresh definitions can
/// serve several).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalAxiom {
    pub form: NormalForm,
    pub origin: BTreeSet<AxiomId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalForm {
    /// A ⊑ B
    Sub(SymbolId, SymbolId),
    /// A1 ⊓ A2 ⊑ B
    SubConj(SymbolId, SymbolId, SymbolId),
    /// A ⊑ ∃r.B
    SubExists(SymbolId, SymbolId, SymbolId),
    /// ∃r.A ⊑ B
    ExistsSub(SymbolId, SymbolId, SymbolId),
    /// A1 ⊓ A2 ⊑ ⊥
    SubBottom(SymbolId, SymbolId),
}

/// Output of [`normalize`].
#[derive(Debug)]
pub struct Normalized {
    pub normals: Vec<NormalAxiom>,
    /// Fresh class names introduced for complex subexpressions.
    pub fresh_names: BTreeMap<SymbolId, ClassExpression>,
    pub top: SymbolId,
    pub bottom: SymbolId,
}

struct Encoder<'a> {
    symbols: &'a mut SymbolTable,
    normals: Vec<NormalAxiom>,
    fresh_names: BTreeMap<SymbolId, ClassExpression>,
    /// expression → (encoding, indices of every normal that defines it).
    memo: HashMap<ClassExpression, (SymbolId, Vec<usize>)>,
    fresh_counter: u32,
    top: SymbolId,
    bottom: SymbolId,
}

impl<'a> Encoder<'a> {
    fn fresh(&mut self, expr: &ClassExpression) -> SymbolId {
        self.fresh_counter += 1;
        let id = self
            .symbols
            .intern_internal(&format!("@{}", self.fresh_counter), SymbolKind::Class);
        self.fresh_names.insert(id, expr.clone());
        id
    }

    fn push(&mut self, form: NormalForm, axiom: AxiomId, defining: &mut Vec<usize>) {
        defining.push(self.normals.len());
        self.normals.push(NormalAxiom { form, origin: BTreeSet::from([axiom]) });
    }

    /// Encode an expression as a class symbol, emitting defining normal
    /// axioms in both directions for complex shapes. Returns the symbol and
    /// the indices of every normal axiom the encoding rests on.
    fn encode(&mut self, expr: &ClassExpression, axiom: AxiomId) -> (SymbolId, Vec<usize>) {
        if let Some((id, defs)) = self.memo.get(expr) {
            let (id, defs) = (*id, defs.clone());
            for &idx in &defs {
                self.normals[idx].origin.insert(axiom);
            }
            return (id, defs);
        }
        let (id, defs) = match expr {
            ClassExpression::Top => (self.top, Vec::new()),
            ClassExpression::Bottom => (self.bottom, Vec::new()),
            ClassExpression::Named(c) => (*c, Vec::new()),
            ClassExpression::Exists(r, filler) => {
                let (filler_id, mut defs) = self.encode(filler, axiom);
                let name = self.fresh(expr);
                self.push(NormalForm::SubExists(name, *r, filler_id), axiom, &mut defs);
                self.push(NormalForm::ExistsSub(*r, filler_id, name), axiom, &mut defs);
                (name, defs)
            }
            ClassExpression::Intersection(members) => {
                let mut defs = Vec::new();
                let mut encoded = Vec::with_capacity(members.len());
                for m in members {
                    let (id, sub_defs) = self.encode(m, axiom);
                    defs.extend(sub_defs);
                    encoded.push(id);
                }
                let name = self.fresh(expr);
                // Conjunction chain up to the fresh name, binarized.
                let mut acc = encoded[0];
                for (i, &next) in encoded.iter().enumerate().skip(1) {
                    let target = if i + 1 == encoded.len() {
                        name
                    } else {
                        let partial = ClassExpression::Intersection(members[..=i].to_vec());
                        self.fresh(&partial)
                    };
                    self.push(NormalForm::SubConj(acc, next, target), axiom, &mut defs);
                    acc = target;
                }
                // Reverse direction: the fresh name is under every member.
                for &m in &encoded {
                    self.push(NormalForm::Sub(name, m), axiom, &mut defs);
                }
                (name, defs)
            }
        };
        self.memo.insert(expr.clone(), (id, defs.clone()));
        (id, defs)
    }
}

/// Normalize a TBox. Equivalences split into two subclass axioms;
/// disjointness becomes a ⊥-pair; complex nestings get fresh names.
pub fn normalize(tbox: &[Axiom], symbols: &mut SymbolTable) -> Normalized {
    let top = symbols.intern_internal(TOP_LEXICAL, SymbolKind::Class);
    let bottom = symbols.intern_internal(BOTTOM_LEXICAL, SymbolKind::Class);
    let mut enc = Encoder {
        symbols,
        normals: Vec::new(),
        fresh_names: BTreeMap::new(),
        memo: HashMap::new(),
        fresh_counter: 0,
        top,
        bottom,
    };
    for axiom in tbox {
        match &axiom.kind {
            AxiomKind::SubClassOf { sub, sup } => {
                let (lhs, _) = enc.encode(sub, axiom.id);
                let (rhs, _) = enc.encode(sup, axiom.id);
                enc.normals
                    .push(NormalAxiom { form: NormalForm::Sub(lhs, rhs), origin: BTreeSet::from([axiom.id]) });
            }
            AxiomKind::EquivalentClasses { name, definition } => {
                let (def, _) = enc.encode(definition, axiom.id);
                enc.normals
                    .push(NormalAxiom { form: NormalForm::Sub(*name, def), origin: BTreeSet::from([axiom.id]) });
                enc.normals
                    .push(NormalAxiom { form: NormalForm::Sub(def, *name), origin: BTreeSet::from([axiom.id]) });
            }
            AxiomKind::DisjointClasses { a, b } => {
                enc.normals
                    .push(NormalAxiom { form: NormalForm::SubBottom(*a, *b), origin: BTreeSet::from([axiom.id]) });
            }
        }
    }
    Normalized { normals: enc.normals, fresh_names: enc.fresh_names, top, bottom }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReasonerError {
    #[error("class is not declared in this taxonomy")]
    UndeclaredClass(SymbolId),
}

/// Insertion-ordered set: hash membership plus a stable iteration order, so
/// saturation and recorded origins are reproducible run to run.
#[derive(Debug, Default, Clone)]
struct OrderedSet {
    seen: HashSet<SymbolId>,
    order: Vec<SymbolId>,
}

impl OrderedSet {
    fn insert(&mut self, id: SymbolId) -> bool {
        if self.seen.insert(id) {
            self.order.push(id);
            true
        } else {
            false
        }
    }

    fn contains(&self, id: SymbolId) -> bool {
        self.seen.contains(&id)
    }
}

/// The classified hierarchy: full subsumer sets (including fresh names, for
/// the inference engine), the user-visible relation, equivalence partitions
/// and the unsatisfiable set.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    /// S(A) per class, in derivation order, over the whole vocabulary.
    all_supers: HashMap<SymbolId, Vec<SymbolId>>,
    /// Source axioms per derived subsumption (first derivation wins).
    origins: HashMap<(SymbolId, SymbolId), BTreeSet<AxiomId>>,
    declared: Vec<SymbolId>,
    declared_set: HashSet<SymbolId>,
    /// Declared classes subsumed by ⊥.
    pub unsatisfiable: BTreeSet<SymbolId>,
    /// Equivalence classes of declared classes under mutual subsumption.
    pub partitions: Vec<Vec<SymbolId>>,
    top: SymbolId,
    bottom: SymbolId,
}

impl Taxonomy {
    pub fn top(&self) -> SymbolId {
        self.top
    }

    pub fn bottom(&self) -> SymbolId {
        self.bottom
    }

    pub fn declared_classes(&self) -> &[SymbolId] {
        &self.declared
    }

    fn known(&self, id: SymbolId) -> bool {
        self.declared_set.contains(&id) || id == self.top || id == self.bottom
    }

    fn unsat_internal(&self, a: SymbolId) -> bool {
        a == self.bottom
            || self.all_supers.get(&a).is_some_and(|s| s.contains(&self.bottom))
    }

    /// A ⊑ B over declared classes (⊤ and ⊥ are always known). An
    /// unsatisfiable class is subsumed by everything.
    pub fn is_subsumed(&self, a: SymbolId, b: SymbolId) -> Result<bool, ReasonerError> {
        if !self.known(a) {
            return Err(ReasonerError::UndeclaredClass(a));
        }
        if !self.known(b) {
            return Err(ReasonerError::UndeclaredClass(b));
        }
        Ok(self.subsumed_unchecked(a, b))
    }

    fn subsumed_unchecked(&self, a: SymbolId, b: SymbolId) -> bool {
        if a == b || b == self.top || self.unsat_internal(a) {
            return true;
        }
        self.all_supers.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn satisfiable(&self, a: SymbolId) -> Result<bool, ReasonerError> {
        if !self.known(a) {
            return Err(ReasonerError::UndeclaredClass(a));
        }
        Ok(!self.unsat_internal(a))
    }

    /// Every (sub, super) pair over the full vocabulary, including fresh
    /// names, in deterministic order. Used to compile realization rules.
    pub fn all_subsumption_pairs(&self) -> Vec<(SymbolId, SymbolId, &BTreeSet<AxiomId>)> {
        static EMPTY: std::sync::OnceLock<BTreeSet<AxiomId>> = std::sync::OnceLock::new();
        let empty = EMPTY.get_or_init(BTreeSet::new);
        let mut classes: Vec<_> = self.all_supers.keys().copied().collect();
        classes.sort();
        let mut out = Vec::new();
        for a in classes {
            for &b in &self.all_supers[&a] {
                let origin = self.origins.get(&(a, b)).unwrap_or(empty);
                out.push((a, b, origin));
            }
        }
        out
    }

    /// User-visible subsumers of a declared class, ascending, without fresh
    /// names, ⊤, ⊥ or the class itself.
    pub fn proper_supers(&self, a: SymbolId) -> Vec<SymbolId> {
        let mut out: Vec<SymbolId> = self
            .declared
            .iter()
            .copied()
            .filter(|&b| b != a && self.subsumed_unchecked(a, b))
            .collect();
        out.sort();
        out
    }
}

/// Saturate the completion rules over a normalized TBox. `declared` lists
/// the user-declared classes to seed and report on.
pub fn classify(norm: &Normalized, declared: &[SymbolId]) -> Taxonomy {
    let normals = &norm.normals;
    let (top, bottom) = (norm.top, norm.bottom);

    // Rule indexes.
    let mut subs_by_lhs: HashMap<SymbolId, Vec<usize>> = HashMap::new();
    let mut conj_by_operand: HashMap<SymbolId, Vec<usize>> = HashMap::new();
    let mut subexists_by_lhs: HashMap<SymbolId, Vec<usize>> = HashMap::new();
    let mut existssub_by_role_filler: HashMap<(SymbolId, SymbolId), Vec<usize>> = HashMap::new();
    let mut bottom_by_operand: HashMap<SymbolId, Vec<usize>> = HashMap::new();
    let mut universe = OrderedSet::default();
    universe.insert(top);
    universe.insert(bottom);
    for &c in declared {
        universe.insert(c);
    }
    for (i, n) in normals.iter().enumerate() {
        match n.form {
            NormalForm::Sub(a, b) => {
                subs_by_lhs.entry(a).or_default().push(i);
                universe.insert(a);
                universe.insert(b);
            }
            NormalForm::SubConj(a1, a2, b) => {
                conj_by_operand.entry(a1).or_default().push(i);
                if a2 != a1 {
                    conj_by_operand.entry(a2).or_default().push(i);
                }
                universe.insert(a1);
                universe.insert(a2);
                universe.insert(b);
            }
            NormalForm::SubExists(a, _, b) => {
                subexists_by_lhs.entry(a).or_default().push(i);
                universe.insert(a);
                universe.insert(b);
            }
            NormalForm::ExistsSub(r, a, b) => {
                existssub_by_role_filler.entry((r, a)).or_default().push(i);
                universe.insert(a);
                universe.insert(b);
            }
            NormalForm::SubBottom(a1, a2) => {
                bottom_by_operand.entry(a1).or_default().push(i);
                if a2 != a1 {
                    bottom_by_operand.entry(a2).or_default().push(i);
                }
                universe.insert(a1);
                universe.insert(a2);
            }
        }
    }

    // Completion state.
    let mut s: HashMap<SymbolId, OrderedSet> = HashMap::new();
    let mut origins: HashMap<(SymbolId, SymbolId), BTreeSet<AxiomId>> = HashMap::new();
    let mut edges: HashSet<(SymbolId, SymbolId, SymbolId)> = HashSet::new();
    let mut edge_origins: HashMap<(SymbolId, SymbolId, SymbolId), BTreeSet<AxiomId>> = HashMap::new();
    let mut in_edges: HashMap<SymbolId, Vec<(SymbolId, SymbolId)>> = HashMap::new();

    enum Work {
        Sub(SymbolId, SymbolId),
        Edge(SymbolId, SymbolId, SymbolId),
    }
    let mut queue: VecDeque<Work> = VecDeque::new();

    macro_rules! add_sub {
        ($a:expr, $b:expr, $origin:expr) => {{
            let (a, b) = ($a, $b);
            if s.entry(a).or_default().insert(b) {
                origins.insert((a, b), $origin);
                queue.push_back(Work::Sub(a, b));
            }
        }};
    }
    macro_rules! add_edge {
        ($r:expr, $a:expr, $b:expr, $origin:expr) => {{
            let (r, a, b) = ($r, $a, $b);
            if edges.insert((r, a, b)) {
                edge_origins.insert((r, a, b), $origin);
                in_edges.entry(b).or_default().push((r, a));
                queue.push_back(Work::Edge(r, a, b));
            }
        }};
    }

    for &c in &universe.order {
        add_sub!(c, c, BTreeSet::new());
        add_sub!(c, top, BTreeSet::new());
    }

    let origin_of = |origins: &HashMap<(SymbolId, SymbolId), BTreeSet<AxiomId>>, a, b| -> BTreeSet<AxiomId> {
        origins.get(&(a, b)).cloned().unwrap_or_default()
    };

    while let Some(work) = queue.pop_front() {
        match work {
            Work::Sub(a, b) => {
                let base = origin_of(&origins, a, b);
                if let Some(idxs) = subs_by_lhs.get(&b) {
                    for &i in idxs {
                        if let NormalForm::Sub(_, c) = normals[i].form {
                            let mut o = base.clone();
                            o.extend(&normals[i].origin);
                            add_sub!(a, c, o);
                        }
                    }
                }
                if let Some(idxs) = conj_by_operand.get(&b) {
                    for &i in idxs.iter() {
                        if let NormalForm::SubConj(b1, b2, c) = normals[i].form {
                            let other = if b1 == b { b2 } else { b1 };
                            if s.get(&a).is_some_and(|set| set.contains(other)) {
                                let mut o = base.clone();
                                o.extend(origin_of(&origins, a, other));
                                o.extend(&normals[i].origin);
                                add_sub!(a, c, o);
                            }
                        }
                    }
                }
                if let Some(idxs) = subexists_by_lhs.get(&b) {
                    for &i in idxs.iter() {
                        if let NormalForm::SubExists(_, r, c) = normals[i].form {
                            let mut o = base.clone();
                            o.extend(&normals[i].origin);
                            add_edge!(r, a, c, o);
                        }
                    }
                }
                if let Some(idxs) = bottom_by_operand.get(&b) {
                    for &i in idxs.iter() {
                        if let NormalForm::SubBottom(b1, b2) = normals[i].form {
                            let other = if b1 == b { b2 } else { b1 };
                            if s.get(&a).is_some_and(|set| set.contains(other)) {
                                let mut o = base.clone();
                                o.extend(origin_of(&origins, a, other));
                                o.extend(&normals[i].origin);
                                add_sub!(a, bottom, o);
                            }
                        }
                    }
                }
                // CR4 with `a` as the edge target: new subsumer of a target
                // propagates across incoming links.
                let incoming = in_edges.get(&a).cloned().unwrap_or_default();
                for (r, x) in incoming {
                    if let Some(idxs) = existssub_by_role_filler.get(&(r, b)) {
                        for &i in idxs.iter() {
                            if let NormalForm::ExistsSub(_, _, d) = normals[i].form {
                                let mut o = base.clone();
                                o.extend(edge_origins.get(&(r, x, a)).cloned().unwrap_or_default());
                                o.extend(&normals[i].origin);
                                add_sub!(x, d, o);
                            }
                        }
                    }
                    if b == bottom {
                        let mut o = base.clone();
                        o.extend(edge_origins.get(&(r, x, a)).cloned().unwrap_or_default());
                        add_sub!(x, bottom, o);
                    }
                }
            }
            Work::Edge(r, a, b) => {
                let edge_base = edge_origins.get(&(r, a, b)).cloned().unwrap_or_default();
                let supers_of_b = s.get(&b).map(|set| set.order.clone()).unwrap_or_default();
                for c in supers_of_b {
                    if let Some(idxs) = existssub_by_role_filler.get(&(r, c)) {
                        for &i in idxs.iter() {
                            if let NormalForm::ExistsSub(_, _, d) = normals[i].form {
                                let mut o = edge_base.clone();
                                o.extend(origin_of(&origins, b, c));
                                o.extend(&normals[i].origin);
                                add_sub!(a, d, o);
                            }
                        }
                    }
                    if c == bottom {
                        let mut o = edge_base.clone();
                        o.extend(origin_of(&origins, b, bottom));
                        add_sub!(a, bottom, o);
                    }
                }
            }
        }
    }

    let all_supers: HashMap<SymbolId, Vec<SymbolId>> =
        s.into_iter().map(|(k, v)| (k, v.order)).collect();

    let mut declared_sorted: Vec<SymbolId> = declared.to_vec();
    declared_sorted.sort();
    declared_sorted.dedup();
    let declared_set: HashSet<SymbolId> = declared_sorted.iter().copied().collect();

    let mut tax = Taxonomy {
        all_supers,
        origins,
        declared: declared_sorted.clone(),
        declared_set,
        unsatisfiable: BTreeSet::new(),
        partitions: Vec::new(),
        top,
        bottom,
    };
    tax.unsatisfiable = declared_sorted
        .iter()
        .copied()
        .filter(|&c| tax.unsat_internal(c))
        .collect();

    // Partitions under mutual subsumption, deterministic by smallest member.
    let mut assigned: HashSet<SymbolId> = HashSet::new();
    for &a in &declared_sorted {
        if assigned.contains(&a) {
            continue;
        }
        let mut group = vec![a];
        for &b in &declared_sorted {
            if b != a
                && !assigned.contains(&b)
                && tax.subsumed_unchecked(a, b)
                && tax.subsumed_unchecked(b, a)
            {
                group.push(b);
            }
        }
        for &m in &group {
            assigned.insert(m);
        }
        group.sort();
        tax.partitions.push(group);
    }

    tax
}

// ---------------------------------------------------------------------------
// CLI renderings
// ---------------------------------------------------------------------------

/// Direct (transitively reduced) subsumption edges as `sub<TAB>super` lines,
/// sorted. Unsatisfiable classes appear as `C<TAB>⊥`; hierarchy roots point
/// at ⊤. Mutually equivalent classes list each other in both directions.
pub fn render_taxonomy_tsv(tax: &Taxonomy, symbols: &SymbolTable) -> String {
    let mut lines: BTreeSet<String> = BTreeSet::new();
    let sat_partitions: Vec<&Vec<SymbolId>> = tax
        .partitions
        .iter()
        .filter(|p| !tax.unsatisfiable.contains(&p[0]))
        .collect();
    for part in &sat_partitions {
        let rep = part[0];
        let direct = direct_super_partitions(tax, rep, &sat_partitions);
        for &c in part.iter() {
            for &d in part.iter() {
                if c != d {
                    lines.insert(format!("{}\t{}", symbols.lexical(c), symbols.lexical(d)));
                }
            }
            if direct.is_empty() {
                lines.insert(format!("{}\t{}", symbols.lexical(c), TOP_LEXICAL));
            }
            for sup_part in &direct {
                for &d in sup_part.iter() {
                    lines.insert(format!("{}\t{}", symbols.lexical(c), symbols.lexical(d)));
                }
            }
        }
    }
    for &c in &tax.unsatisfiable {
        lines.insert(format!("{}\t{}", symbols.lexical(c), BOTTOM_LEXICAL));
    }
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Partitions directly above `rep`, with no satisfiable partition strictly
/// between.
fn direct_super_partitions<'a>(
    tax: &Taxonomy,
    rep: SymbolId,
    sat_partitions: &[&'a Vec<SymbolId>],
) -> Vec<&'a Vec<SymbolId>> {
    let supers: Vec<&'a Vec<SymbolId>> = sat_partitions
        .iter()
        .copied()
        .filter(|p| {
            p[0] != rep && tax.subsumed_unchecked(rep, p[0]) && !tax.subsumed_unchecked(p[0], rep)
        })
        .collect();
    supers
        .iter()
        .copied()
        .filter(|p| {
            !supers.iter().any(|q| {
                q[0] != p[0]
                    && tax.subsumed_unchecked(q[0], p[0])
                    && !tax.subsumed_unchecked(p[0], q[0])
            })
        })
        .collect()
}

/// Indented hierarchy rooted at ⊤, two spaces per level. Classes with
/// several direct superclasses appear once under each; equivalent classes
/// share a node joined by ` = `.
pub fn render_taxonomy_tree(tax: &Taxonomy, symbols: &SymbolTable) -> String {
    let sat_partitions: Vec<&Vec<SymbolId>> = tax
        .partitions
        .iter()
        .filter(|p| !tax.unsatisfiable.contains(&p[0]))
        .collect();
    let mut out = String::new();
    out.push_str(TOP_LEXICAL);
    out.push('\n');
    let roots: Vec<&Vec<SymbolId>> = sat_partitions
        .iter()
        .filter(|p| direct_super_partitions(tax, p[0], &sat_partitions).is_empty())
        .copied()
        .collect();
    for root in roots {
        render_tree_node(tax, symbols, root, &sat_partitions, 1, &mut out);
    }
    if !tax.unsatisfiable.is_empty() {
        out.push_str("  ");
        out.push_str(BOTTOM_LEXICAL);
        out.push('\n');
        for &c in &tax.unsatisfiable {
            out.push_str("    ");
            out.push_str(symbols.lexical(c));
            out.push('\n');
        }
    }
    out
}

fn render_tree_node(
    tax: &Taxonomy,
    symbols: &SymbolTable,
    part: &[SymbolId],
    sat_partitions: &[&Vec<SymbolId>],
    depth: usize,
    out: &mut String,
) {
    let label: Vec<&str> = part.iter().map(|&c| symbols.lexical(c)).collect();
    out.push_str(&"  ".repeat(depth));
    out.push_str(&label.join(" = "));
    out.push('\n');
    let mut children: Vec<&Vec<SymbolId>> = sat_partitions
        .iter()
        .filter(|child| {
            child[0] != part[0]
                && direct_super_partitions(tax, child[0], sat_partitions)
                    .iter()
                    .any(|p| p[0] == part[0])
        })
        .copied()
        .collect();
    children.sort_by_key(|p| symbols.lexical(p[0]).to_string());
    for child in children {
        render_tree_node(tax, symbols, child, sat_partitions, depth + 1, out);
    }
}
