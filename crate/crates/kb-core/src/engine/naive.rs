//! Naive full-join evaluation, used only as an oracle against the semi-naive
//! engine. Every round re-derives from the complete fact set with plain
//! nested-loop unification over the fact list — no indexes, no deltas — so
//! the two engines share nothing but the data types.

use std::collections::HashMap;

use crate::model::{Atom, Fact, Term};
use crate::symbol::SymbolId;

use super::saturate::record_derivation;
use super::{binding_of, collect_clashes, ground_head, CompiledRule, Derivation, FactStore, Materialization};

fn unify(atom: &Atom, fact: &Fact, env: &mut HashMap<SymbolId, SymbolId>) -> Option<Vec<SymbolId>> {
    let mut inserted = Vec::new();
    let mut bind = |term: &Term, value: SymbolId, env: &mut HashMap<SymbolId, SymbolId>| -> bool {
        match term {
            Term::Const(c) => *c == value,
            Term::Var(v) => match env.get(v) {
                Some(&bound) => bound == value,
                None => {
                    env.insert(*v, value);
                    inserted.push(*v);
                    true
                }
            },
        }
    };
    let ok = match (atom, fact) {
        (Atom::Class { class, arg }, Fact::Type { individual, class: fc }) => {
            class == fc && bind(arg, *individual, env)
        }
        (
            Atom::Property { property, subject, object },
            Fact::Rel { property: fp, subject: fs, object: fo },
        ) => property == fp && bind(subject, *fs, env) && bind(object, *fo, env),
        _ => false,
    };
    if ok {
        Some(inserted)
    } else {
        for v in inserted {
            env.remove(&v);
        }
        None
    }
}

type OnGroundMatch<'a> = dyn FnMut(&HashMap<SymbolId, SymbolId>, &[Fact]) + 'a;

fn all_matches(
    body: &[Atom],
    k: usize,
    facts: &[Fact],
    env: &mut HashMap<SymbolId, SymbolId>,
    supports: &mut Vec<Fact>,
    on_match: &mut OnGroundMatch,
) {
    if k == body.len() {
        on_match(env, supports);
        return;
    }
    for fact in facts {
        if let Some(inserted) = unify(&body[k], fact, env) {
            supports.push(*fact);
            all_matches(body, k + 1, facts, env, supports, on_match);
            supports.pop();
            for v in inserted {
                env.remove(&v);
            }
        }
    }
}

/// Same fixpoint as [`super::saturate`], computed the slow way.
pub fn naive_saturate(program: &[CompiledRule], abox: &[Fact], bottom: SymbolId) -> Materialization {
    let mut store = FactStore::default();
    let mut provenance: HashMap<Fact, Vec<Derivation>> = HashMap::new();
    for &fact in abox {
        store.insert(fact, 0);
    }

    let mut round = 0u32;
    let mut last_productive = 0u32;
    loop {
        round += 1;
        let snapshot: Vec<Fact> = store.iter().copied().collect();
        let mut pending_order: Vec<Fact> = Vec::new();
        let mut pending: HashMap<Fact, Vec<Derivation>> = HashMap::new();
        for (rule_idx, rule) in program.iter().enumerate() {
            let mut env = HashMap::new();
            let mut supports = Vec::new();
            all_matches(&rule.body, 0, &snapshot, &mut env, &mut supports, &mut |env, supports| {
                let fact = ground_head(&rule.head, env);
                let deriv = Derivation {
                    rule: rule_idx,
                    supports: supports.to_vec(),
                    binding: binding_of(env),
                    depth: round,
                };
                if store.contains(&fact) {
                    record_derivation(provenance.entry(fact).or_default(), deriv);
                } else if let Some(derivs) = pending.get_mut(&fact) {
                    record_derivation(derivs, deriv);
                } else {
                    pending_order.push(fact);
                    pending.insert(fact, vec![deriv]);
                }
            });
        }
        if pending_order.is_empty() {
            break;
        }
        last_productive = round;
        for &fact in &pending_order {
            store.insert(fact, round);
            provenance.insert(fact, pending.remove(&fact).unwrap_or_default());
        }
    }

    let clashes = collect_clashes(&store, &provenance, program, bottom);
    Materialization {
        program: program.to_vec(),
        facts: store,
        provenance,
        consistent: clashes.is_empty(),
        clashes,
        rounds: last_productive,
    }
}
