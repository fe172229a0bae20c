//! Conjunctive query evaluation over a materialization: greedy join
//! planning, set-semantics evaluation, and deterministic TSV rendering with
//! prefix compaction.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::engine::saturate::{match_atoms, Role};
use crate::engine::Materialization;
use crate::model::{Atom, Fact, Term};
use crate::symbol::{SymbolId, SymbolTable};
use crate::text::Query;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("query constant '{name}' is not declared in the knowledge base")]
    UnknownSymbol { name: String },
}

/// A join order over the query's patterns (a permutation of their indices).
/// `cartesian_steps` lists plan positions that had to start a new connected
/// component — a cross product the caller may want to warn about.
#[derive(Debug, Clone)]
pub struct QueryPlan {
    pub order: Vec<usize>,
    pub cartesian_steps: Vec<usize>,
}

fn pattern_cardinality(pattern: &Atom, m: &Materialization) -> usize {
    match pattern {
        Atom::Class { class, arg } => match arg {
            Term::Const(individual) => {
                usize::from(m.facts.contains(&Fact::Type { individual: *individual, class: *class }))
            }
            Term::Var(_) => m.facts.class_members(*class).len(),
        },
        Atom::Property { property, subject, object } => match (subject, object) {
            (Term::Const(s), Term::Const(o)) => usize::from(m.facts.contains(&Fact::Rel {
                property: *property,
                subject: *s,
                object: *o,
            })),
            (Term::Const(s), Term::Var(_)) => m.facts.objects_of(*property, *s).len(),
            (Term::Var(_), Term::Const(o)) => m.facts.subjects_of(*property, *o).len(),
            (Term::Var(_), Term::Var(_)) => m.facts.prop_pairs(*property).len(),
        },
    }
}

/// Greedy ordering: start with the smallest pattern, then repeatedly take
/// the connected pattern binding the most already-bound variables, breaking
/// ties by cardinality and then source order. Disconnected remainders start
/// a new component (cartesian product), which is allowed but reported.
pub fn plan(query: &Query, m: &Materialization) -> QueryPlan {
    let n = query.patterns.len();
    let cardinalities: Vec<usize> =
        query.patterns.iter().map(|p| pattern_cardinality(p, m)).collect();
    let pattern_vars: Vec<HashSet<SymbolId>> =
        query.patterns.iter().map(|p| p.variables().collect()).collect();

    let mut order = Vec::with_capacity(n);
    let mut chosen = vec![false; n];
    let mut bound: HashSet<SymbolId> = HashSet::new();
    let mut cartesian_steps = Vec::new();

    while order.len() < n {
        let mut pick: Option<usize> = None;
        if order.is_empty() {
            for i in 0..n {
                if pick.is_none_or(|p| cardinalities[i] < cardinalities[p]) {
                    pick = Some(i);
                }
            }
        } else {
            // Connected candidates first. A variable-free pattern is a pure
            // filter and rows only multiply once variables are bound, so
            // both cases qualify without being a cross product.
            let mut best: Option<(usize, usize, usize)> = None; // (-shared, card, idx) minimized
            for i in 0..n {
                if chosen[i] {
                    continue;
                }
                let shared = pattern_vars[i].intersection(&bound).count();
                if shared == 0 && !pattern_vars[i].is_empty() && !bound.is_empty() {
                    continue;
                }
                let key = (usize::MAX - shared, cardinalities[i], i);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
            if let Some((_, _, idx)) = best {
                pick = Some(idx);
            } else {
                // Disconnected: fall back to smallest remaining pattern.
                for i in 0..n {
                    if !chosen[i]
                        && pick.is_none_or(|p| (cardinalities[i], i) < (cardinalities[p], p))
                    {
                        pick = Some(i);
                    }
                }
                cartesian_steps.push(order.len());
            }
        }
        let idx = pick.expect("plan always finds a pattern");
        chosen[idx] = true;
        bound.extend(&pattern_vars[idx]);
        order.push(idx);
    }
    QueryPlan { order, cartesian_steps }
}

/// Query results: the projected header (`?`-prefixed), the bound individual
/// ids per row, and the prefix-compacted rendering — rows distinct and
/// sorted lexicographically on the rendered values left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingTable {
    pub header: Vec<String>,
    pub id_rows: Vec<Vec<SymbolId>>,
    pub rows: Vec<Vec<String>>,
}

/// Evaluate a query against a materialization. `symbols` must be the table
/// the query was parsed against (a superset of the knowledge base's table);
/// constants the knowledge base never declared are an error.
pub fn evaluate(
    query: &Query,
    symbols: &SymbolTable,
    m: &Materialization,
) -> Result<BindingTable, QueryError> {
    for pattern in &query.patterns {
        let mut constants = vec![pattern.predicate()];
        for term in pattern.terms() {
            if let Term::Const(c) = term {
                constants.push(c);
            }
        }
        for id in constants {
            if !symbols.is_declared(id) {
                return Err(QueryError::UnknownSymbol { name: symbols.lexical(id).to_string() });
            }
        }
    }

    let plan = plan(query, m);
    let ordered: Vec<Atom> = plan.order.iter().map(|&i| query.patterns[i]).collect();
    let roles = vec![Role::Full; ordered.len()];
    let join_order: Vec<usize> = (0..ordered.len()).collect();

    let mut env: HashMap<SymbolId, SymbolId> = HashMap::new();
    let mut supports: Vec<Option<Fact>> = vec![None; ordered.len()];
    let mut seen: HashSet<Vec<SymbolId>> = HashSet::new();
    let mut id_rows: Vec<Vec<SymbolId>> = Vec::new();
    match_atoms(
        &ordered,
        &join_order,
        &roles,
        0,
        &m.facts,
        u32::MAX,
        &mut env,
        &mut supports,
        &mut |env, _supports| {
            let row: Vec<SymbolId> = query
                .projected
                .iter()
                .map(|v| *env.get(v).expect("projected variables occur in patterns"))
                .collect();
            if seen.insert(row.clone()) {
                id_rows.push(row);
            }
        },
    );

    let compactor = PrefixCompactor::new(&query.prefixes);
    let mut keyed: Vec<(Vec<String>, Vec<SymbolId>)> = id_rows
        .into_iter()
        .map(|row| {
            let rendered: Vec<String> =
                row.iter().map(|&id| compactor.compact(symbols.lexical(id))).collect();
            (rendered, row)
        })
        .collect();
    keyed.sort();
    let header: Vec<String> = query.projected_names.iter().map(|n| format!("?{n}")).collect();
    let (rows, id_rows) = keyed.into_iter().unzip();
    Ok(BindingTable { header, id_rows, rows })
}

/// Longest-expansion prefix compaction for rendering names.
pub struct PrefixCompactor {
    /// (expansion, prefix), longest expansion first, ties by prefix name.
    ordered: Vec<(String, String)>,
}

impl PrefixCompactor {
    pub fn new(prefixes: &[(String, String)]) -> Self {
        // Later declarations of the same prefix win.
        let mut last: HashMap<&str, &str> = HashMap::new();
        for (name, expansion) in prefixes {
            last.insert(name, expansion);
        }
        let mut ordered: Vec<(String, String)> =
            last.into_iter().map(|(n, e)| (e.to_string(), n.to_string())).collect();
        ordered.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        PrefixCompactor { ordered }
    }

    pub fn compact(&self, name: &str) -> String {
        for (expansion, prefix) in &self.ordered {
            if let Some(rest) = name.strip_prefix(expansion.as_str()) {
                return format!("{prefix}:{rest}");
            }
        }
        name.to_string()
    }
}

/// First line is the tab-joined header; rows follow in table order. LF line
/// endings and a trailing newline.
pub fn render_tsv(table: &BindingTable) -> String {
    let mut out = table.header.join("\t");
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}
