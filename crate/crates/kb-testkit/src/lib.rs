//! Test-only support: seeded random knowledge-base generators and
//! brute-force oracles, kept deliberately independent of the engine's
//! indexed algorithms. Nothing here ships in a release artifact; the crate
//! exists so the randomized suites in several crates share one vocabulary.

use std::collections::{HashMap, HashSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kb_core::engine::Materialization;
use kb_core::model::{
    Atom, Axiom, AxiomId, AxiomKind, ClassExpression, Fact, KnowledgeBase, Rule, Term,
};
use kb_core::reasoner::{NormalForm, Normalized};
use kb_core::symbol::{SymbolId, SymbolKind, SymbolTable};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Random TBoxes and knowledge bases
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct TboxBounds {
    pub classes: usize,
    pub properties: usize,
    pub axioms: usize,
    pub allow_disjoint: bool,
}

impl Default for TboxBounds {
    fn default() -> Self {
        TboxBounds { classes: 8, properties: 3, axioms: 10, allow_disjoint: true }
    }
}

pub struct RandomTbox {
    pub symbols: SymbolTable,
    pub axioms: Vec<Axiom>,
    pub classes: Vec<SymbolId>,
    pub properties: Vec<SymbolId>,
}

fn random_expression(
    rng: &mut StdRng,
    classes: &[SymbolId],
    properties: &[SymbolId],
    depth: usize,
) -> ClassExpression {
    let named = ClassExpression::Named(classes[rng.random_range(0..classes.len())]);
    if depth == 0 || properties.is_empty() {
        return named;
    }
    match rng.random_range(0..4u32) {
        0 | 1 => named,
        2 => {
            let n = rng.random_range(2..=3usize);
            let members = (0..n)
                .map(|_| random_expression(rng, classes, properties, depth - 1))
                .collect();
            ClassExpression::and(members)
        }
        _ => {
            let p = properties[rng.random_range(0..properties.len())];
            ClassExpression::exists(p, random_expression(rng, classes, properties, depth - 1))
        }
    }
}

pub fn random_tbox(rng: &mut StdRng, bounds: TboxBounds) -> RandomTbox {
    let mut symbols = SymbolTable::new();
    let n_classes = rng.random_range(2..=bounds.classes.max(2));
    let classes: Vec<SymbolId> = (0..n_classes)
        .map(|i| symbols.intern(&format!("C{i}"), SymbolKind::Class).unwrap())
        .collect();
    let n_props = rng.random_range(0..=bounds.properties);
    let properties: Vec<SymbolId> = (0..n_props)
        .map(|i| symbols.intern(&format!("p{i}"), SymbolKind::Property).unwrap())
        .collect();
    let n_axioms = rng.random_range(0..=bounds.axioms);
    let mut axioms = Vec::with_capacity(n_axioms);
    for i in 0..n_axioms {
        let id = AxiomId(i as u32 + 1);
        let kind = match rng.random_range(0..6u32) {
            0 if bounds.allow_disjoint => AxiomKind::DisjointClasses {
                a: classes[rng.random_range(0..classes.len())],
                b: classes[rng.random_range(0..classes.len())],
            },
            1 => AxiomKind::EquivalentClasses {
                name: classes[rng.random_range(0..classes.len())],
                definition: random_expression(rng, &classes, &properties, 2),
            },
            _ => AxiomKind::SubClassOf {
                sub: random_expression(rng, &classes, &properties, 2),
                sup: random_expression(rng, &classes, &properties, 2),
            },
        };
        axioms.push(Axiom { id, kind });
    }
    RandomTbox { symbols, axioms, classes, properties }
}

#[derive(Debug, Clone, Copy)]
pub struct KbBounds {
    pub tbox: TboxBounds,
    pub individuals: usize,
    pub facts: usize,
    pub rules: usize,
    pub max_body_atoms: usize,
}

impl Default for KbBounds {
    fn default() -> Self {
        KbBounds {
            tbox: TboxBounds { classes: 8, properties: 4, axioms: 6, allow_disjoint: false },
            individuals: 6,
            facts: 12,
            rules: 5,
            max_body_atoms: 4,
        }
    }
}

fn random_term(rng: &mut StdRng, vars: &[SymbolId], individuals: &[SymbolId]) -> Term {
    if rng.random_range(0..4u32) == 0 {
        Term::Const(individuals[rng.random_range(0..individuals.len())])
    } else {
        Term::Var(vars[rng.random_range(0..vars.len())])
    }
}

fn random_atom(
    rng: &mut StdRng,
    classes: &[SymbolId],
    properties: &[SymbolId],
    vars: &[SymbolId],
    individuals: &[SymbolId],
) -> Atom {
    if properties.is_empty() || rng.random_range(0..2u32) == 0 {
        Atom::Class {
            class: classes[rng.random_range(0..classes.len())],
            arg: random_term(rng, vars, individuals),
        }
    } else {
        Atom::Property {
            property: properties[rng.random_range(0..properties.len())],
            subject: random_term(rng, vars, individuals),
            object: random_term(rng, vars, individuals),
        }
    }
}

/// A random valid knowledge base: declared vocabulary, ground facts and safe
/// rules.
pub fn random_kb(rng: &mut StdRng, bounds: KbBounds) -> KnowledgeBase {
    let RandomTbox { mut symbols, axioms, classes, properties } = random_tbox(rng, bounds.tbox);
    let n_inds = rng.random_range(1..=bounds.individuals.max(1));
    let individuals: Vec<SymbolId> = (0..n_inds)
        .map(|i| symbols.intern(&format!("i{i}"), SymbolKind::Individual).unwrap())
        .collect();
    let vars: Vec<SymbolId> = (0..4)
        .map(|i| symbols.intern(&format!("v{i}"), SymbolKind::Variable).unwrap())
        .collect();

    let n_facts = rng.random_range(0..=bounds.facts);
    let mut facts = Vec::with_capacity(n_facts);
    for _ in 0..n_facts {
        if properties.is_empty() || rng.random_range(0..2u32) == 0 {
            facts.push(Fact::Type {
                individual: individuals[rng.random_range(0..individuals.len())],
                class: classes[rng.random_range(0..classes.len())],
            });
        } else {
            facts.push(Fact::Rel {
                property: properties[rng.random_range(0..properties.len())],
                subject: individuals[rng.random_range(0..individuals.len())],
                object: individuals[rng.random_range(0..individuals.len())],
            });
        }
    }

    let n_rules = rng.random_range(0..=bounds.rules);
    let mut rules = Vec::with_capacity(n_rules);
    for r in 0..n_rules {
        let body_len = rng.random_range(1..=bounds.max_body_atoms.max(1));
        let body: Vec<Atom> = (0..body_len)
            .map(|_| random_atom(rng, &classes, &properties, &vars, &individuals))
            .collect();
        let bound: Vec<SymbolId> = {
            let mut seen = HashSet::new();
            body.iter()
                .flat_map(Atom::variables)
                .filter(|v| seen.insert(*v))
                .collect()
        };
        let head_term = |rng: &mut StdRng| -> Term {
            if bound.is_empty() || rng.random_range(0..4u32) == 0 {
                Term::Const(individuals[rng.random_range(0..individuals.len())])
            } else {
                Term::Var(bound[rng.random_range(0..bound.len())])
            }
        };
        let n_heads = rng.random_range(1..=2usize);
        let head: Vec<Atom> = (0..n_heads)
            .map(|_| {
                if properties.is_empty() || rng.random_range(0..2u32) == 0 {
                    Atom::Class {
                        class: classes[rng.random_range(0..classes.len())],
                        arg: head_term(rng),
                    }
                } else {
                    Atom::Property {
                        property: properties[rng.random_range(0..properties.len())],
                        subject: head_term(rng),
                        object: head_term(rng),
                    }
                }
            })
            .collect();
        rules.push(Rule { id: format!("r{r}"), body, head });
    }

    KnowledgeBase::build(symbols, axioms, facts, rules).expect("generated KB is valid")
}

// ---------------------------------------------------------------------------
// Brute-force subsumption oracle
// ---------------------------------------------------------------------------

/// Naive fixpoint of the completion rules: loop over every rule and every
/// pair until nothing changes. No worklist, no indexes — shaped differently
/// from the classifier on purpose.
pub fn oracle_subsumption_matrix(
    norm: &Normalized,
    declared: &[SymbolId],
) -> HashMap<(SymbolId, SymbolId), bool> {
    let mut universe: HashSet<SymbolId> = declared.iter().copied().collect();
    universe.insert(norm.top);
    universe.insert(norm.bottom);
    for n in &norm.normals {
        match n.form {
            NormalForm::Sub(a, b) => {
                universe.insert(a);
                universe.insert(b);
            }
            NormalForm::SubConj(a1, a2, b) => {
                universe.extend([a1, a2, b]);
            }
            NormalForm::SubExists(a, _, b) | NormalForm::ExistsSub(_, a, b) => {
                universe.extend([a, b]);
            }
            NormalForm::SubBottom(a1, a2) => {
                universe.extend([a1, a2]);
            }
        }
    }
    let all: Vec<SymbolId> = universe.iter().copied().collect();
    let mut s: HashMap<SymbolId, HashSet<SymbolId>> =
        all.iter().map(|&c| (c, HashSet::from([c, norm.top]))).collect();
    let mut edges: HashSet<(SymbolId, SymbolId, SymbolId)> = HashSet::new();

    loop {
        let mut changed = false;
        for &a in &all {
            for n in &norm.normals {
                match n.form {
                    NormalForm::Sub(x, y) => {
                        if s[&a].contains(&x) && s.get_mut(&a).unwrap().insert(y) {
                            changed = true;
                        }
                    }
                    NormalForm::SubConj(x1, x2, y) => {
                        if s[&a].contains(&x1)
                            && s[&a].contains(&x2)
                            && s.get_mut(&a).unwrap().insert(y)
                        {
                            changed = true;
                        }
                    }
                    NormalForm::SubExists(x, r, y) => {
                        if s[&a].contains(&x) && edges.insert((r, a, y)) {
                            changed = true;
                        }
                    }
                    NormalForm::SubBottom(x1, x2) => {
                        if s[&a].contains(&x1)
                            && s[&a].contains(&x2)
                            && s.get_mut(&a).unwrap().insert(norm.bottom)
                        {
                            changed = true;
                        }
                    }
                    NormalForm::ExistsSub(..) => {}
                }
            }
        }
        let edge_list: Vec<(SymbolId, SymbolId, SymbolId)> = edges.iter().copied().collect();
        for (r, a, b) in edge_list {
            let supers_b: Vec<SymbolId> = s[&b].iter().copied().collect();
            for c in supers_b {
                for n in &norm.normals {
                    if let NormalForm::ExistsSub(nr, na, nb) = n.form {
                        if nr == r && na == c && s.get_mut(&a).unwrap().insert(nb) {
                            changed = true;
                        }
                    }
                }
                if c == norm.bottom && s.get_mut(&a).unwrap().insert(norm.bottom) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut matrix = HashMap::new();
    for &a in declared {
        let unsat = s[&a].contains(&norm.bottom);
        for &b in declared {
            let value = a == b || unsat || s[&a].contains(&b);
            matrix.insert((a, b), value);
        }
    }
    matrix
}

// ---------------------------------------------------------------------------
// Brute-force query oracle
// ---------------------------------------------------------------------------

fn atom_holds(atom: &Atom, env: &HashMap<SymbolId, SymbolId>, m: &Materialization) -> bool {
    let value = |t: &Term| -> SymbolId {
        match t {
            Term::Const(c) => *c,
            Term::Var(v) => env[v],
        }
    };
    let fact = match atom {
        Atom::Class { class, arg } => Fact::Type { individual: value(arg), class: *class },
        Atom::Property { property, subject, object } => {
            Fact::Rel { property: *property, subject: value(subject), object: value(object) }
        }
    };
    m.facts.contains(&fact)
}

/// Enumerate every assignment of pattern variables to individuals and keep
/// the projections of those satisfying all patterns.
pub fn oracle_query_rows(
    patterns: &[Atom],
    projected: &[SymbolId],
    individuals: &[SymbolId],
    m: &Materialization,
) -> HashSet<Vec<SymbolId>> {
    let mut vars: Vec<SymbolId> = Vec::new();
    for p in patterns {
        for v in p.variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    let mut rows = HashSet::new();
    if individuals.is_empty() {
        return rows;
    }
    let mut assignment = vec![0usize; vars.len()];
    loop {
        let env: HashMap<SymbolId, SymbolId> =
            vars.iter().zip(&assignment).map(|(&v, &i)| (v, individuals[i])).collect();
        if patterns.iter().all(|p| atom_holds(p, &env, m)) {
            rows.insert(projected.iter().map(|v| env[v]).collect());
        }
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return rows;
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < individuals.len() {
                break;
            }
            assignment[pos] = 0;
        }
    }
}
