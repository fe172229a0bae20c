//! Semi-naive fixpoint evaluation.
//!
//! Each round joins the previous round's delta against the accumulated
//! store: for a rule body `b1 ∧ … ∧ bn` and each delta position `i`, atoms
//! before `i` range over facts older than the delta, atom `i` over the delta
//! itself, and atoms after `i` over everything — so every derivation that
//! uses at least one delta fact is found exactly once. Join order inside a
//! body puts the delta atom first and the rest in ascending relation size,
//! re-sorted at each round start; candidate enumeration walks insertion
//! -ordered indexes, which keeps recorded provenance deterministic.

use std::collections::{HashMap, HashSet};

use crate::model::{Atom, Fact, Term};
use crate::symbol::SymbolId;

use super::{
    binding_of, collect_clashes, ground_head, CompiledRule, Derivation, FactStore, Materialization,
    Pred, MAX_DERIVATIONS_PER_FACT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Role {
    /// Facts strictly older than the delta (depth ≤ round − 2).
    Old,
    /// Exactly the previous round's facts (depth = round − 1).
    Delta,
    /// Everything in the store (depth ≤ round − 1).
    Full,
}

impl Role {
    fn admits(self, depth: u32, round: u32) -> bool {
        match self {
            Role::Full => true,
            Role::Delta => depth + 1 == round,
            Role::Old => depth + 2 <= round,
        }
    }
}

/// Try to bind `term` to `value`; returns the variable to roll back, if any,
/// or `None` for an already-consistent match. `Err(())` means mismatch.
fn try_bind(
    term: &Term,
    value: SymbolId,
    env: &mut HashMap<SymbolId, SymbolId>,
) -> Result<Option<SymbolId>, ()> {
    match term {
        Term::Const(c) => {
            if *c == value {
                Ok(None)
            } else {
                Err(())
            }
        }
        Term::Var(v) => match env.get(v) {
            Some(&bound) => {
                if bound == value {
                    Ok(None)
                } else {
                    Err(())
                }
            }
            None => {
                env.insert(*v, value);
                Ok(Some(*v))
            }
        },
    }
}

fn resolve(term: &Term, env: &HashMap<SymbolId, SymbolId>) -> Option<SymbolId> {
    match term {
        Term::Const(c) => Some(*c),
        Term::Var(v) => env.get(v).copied(),
    }
}

/// Called once per full body match with the binding and the per-position
/// ground supports.
pub(crate) type OnMatch<'a> = dyn FnMut(&HashMap<SymbolId, SymbolId>, &[Option<Fact>]) + 'a;

/// Enumerate all matches of the body atoms in `order`, honoring per-atom
/// roles, and call `on_match` with the binding and per-position supports.
#[allow(clippy::too_many_arguments)]
pub(crate) fn match_atoms(
    body: &[Atom],
    order: &[usize],
    roles: &[Role],
    k: usize,
    store: &FactStore,
    round: u32,
    env: &mut HashMap<SymbolId, SymbolId>,
    supports: &mut Vec<Option<Fact>>,
    on_match: &mut OnMatch,
) {
    if k == order.len() {
        on_match(env, supports);
        return;
    }
    let idx = order[k];
    let atom = &body[idx];
    let role = roles[idx];
    match atom {
        Atom::Class { class, arg } => match resolve(arg, env) {
            Some(individual) => {
                let fact = Fact::Type { individual, class: *class };
                if store.depth_of(&fact).is_some_and(|d| role.admits(d, round)) {
                    supports[idx] = Some(fact);
                    match_atoms(body, order, roles, k + 1, store, round, env, supports, on_match);
                    supports[idx] = None;
                }
            }
            None => {
                for &(individual, depth) in store.class_members(*class) {
                    if !role.admits(depth, round) {
                        continue;
                    }
                    if let Ok(undo) = try_bind(arg, individual, env) {
                        supports[idx] = Some(Fact::Type { individual, class: *class });
                        match_atoms(body, order, roles, k + 1, store, round, env, supports, on_match);
                        supports[idx] = None;
                        if let Some(v) = undo {
                            env.remove(&v);
                        }
                    }
                }
            }
        },
        Atom::Property { property, subject, object } => {
            let s = resolve(subject, env);
            let o = resolve(object, env);
            match (s, o) {
                (Some(s), Some(o)) => {
                    let fact = Fact::Rel { property: *property, subject: s, object: o };
                    if store.depth_of(&fact).is_some_and(|d| role.admits(d, round)) {
                        supports[idx] = Some(fact);
                        match_atoms(body, order, roles, k + 1, store, round, env, supports, on_match);
                        supports[idx] = None;
                    }
                }
                (Some(s), None) => {
                    for &(obj, depth) in store.objects_of(*property, s) {
                        if !role.admits(depth, round) {
                            continue;
                        }
                        if let Ok(undo) = try_bind(object, obj, env) {
                            supports[idx] =
                                Some(Fact::Rel { property: *property, subject: s, object: obj });
                            match_atoms(body, order, roles, k + 1, store, round, env, supports, on_match);
                            supports[idx] = None;
                            if let Some(v) = undo {
                                env.remove(&v);
                            }
                        }
                    }
                }
                (None, Some(o)) => {
                    for &(subj, depth) in store.subjects_of(*property, o) {
                        if !role.admits(depth, round) {
                            continue;
                        }
                        if let Ok(undo) = try_bind(subject, subj, env) {
                            supports[idx] =
                                Some(Fact::Rel { property: *property, subject: subj, object: o });
                            match_atoms(body, order, roles, k + 1, store, round, env, supports, on_match);
                            supports[idx] = None;
                            if let Some(v) = undo {
                                env.remove(&v);
                            }
                        }
                    }
                }
                (None, None) => {
                    for &(subj, obj, depth) in store.prop_pairs(*property) {
                        if !role.admits(depth, round) {
                            continue;
                        }
                        if let Ok(undo_s) = try_bind(subject, subj, env) {
                            if let Ok(undo_o) = try_bind(object, obj, env) {
                                supports[idx] = Some(Fact::Rel {
                                    property: *property,
                                    subject: subj,
                                    object: obj,
                                });
                                match_atoms(
                                    body, order, roles, k + 1, store, round, env, supports, on_match,
                                );
                                supports[idx] = None;
                                if let Some(v) = undo_o {
                                    env.remove(&v);
                                }
                            }
                            if let Some(v) = undo_s {
                                env.remove(&v);
                            }
                        }
                    }
                }
            }
        }
    }
}

pub(crate) fn record_derivation(derivs: &mut Vec<Derivation>, deriv: Derivation) {
    if derivs.len() >= MAX_DERIVATIONS_PER_FACT {
        return;
    }
    if derivs.iter().any(|d| d.rule == deriv.rule && d.supports == deriv.supports) {
        return;
    }
    derivs.push(deriv);
}

/// Materialize the least fixpoint of `program` over `abox`. Inconsistency
/// (a derived ⊥ membership) is collected, not thrown, and saturation runs to
/// completion regardless.
pub fn saturate(program: &[CompiledRule], abox: &[Fact], bottom: SymbolId) -> Materialization {
    let mut store = FactStore::default();
    let mut provenance: HashMap<Fact, Vec<Derivation>> = HashMap::new();
    let mut delta: Vec<Fact> = Vec::new();
    for &fact in abox {
        if store.insert(fact, 0) {
            delta.push(fact);
        }
    }

    let mut round = 0u32;
    let mut last_productive = 0u32;
    while !delta.is_empty() {
        round += 1;
        let delta_preds: HashSet<Pred> = delta.iter().map(Fact::pred).collect();
        let mut pending_order: Vec<Fact> = Vec::new();
        let mut pending: HashMap<Fact, Vec<Derivation>> = HashMap::new();

        for (rule_idx, rule) in program.iter().enumerate() {
            for pos in 0..rule.body.len() {
                if !delta_preds.contains(&rule.body[pos].pred()) {
                    continue;
                }
                let roles: Vec<Role> = (0..rule.body.len())
                    .map(|j| {
                        if j < pos {
                            Role::Old
                        } else if j == pos {
                            Role::Delta
                        } else {
                            Role::Full
                        }
                    })
                    .collect();
                let mut rest: Vec<usize> = (0..rule.body.len()).filter(|&j| j != pos).collect();
                rest.sort_by_key(|&j| (store.relation_size(rule.body[j].pred()), j));
                let mut order = Vec::with_capacity(rule.body.len());
                order.push(pos);
                order.extend(rest);

                let mut env: HashMap<SymbolId, SymbolId> = HashMap::new();
                let mut supports: Vec<Option<Fact>> = vec![None; rule.body.len()];
                match_atoms(
                    &rule.body,
                    &order,
                    &roles,
                    0,
                    &store,
                    round,
                    &mut env,
                    &mut supports,
                    &mut |env, supports| {
                        let fact = ground_head(&rule.head, env);
                        let deriv = Derivation {
                            rule: rule_idx,
                            supports: supports.iter().map(|s| s.expect("full match")).collect(),
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
                    },
                );
            }
        }

        if !pending_order.is_empty() {
            last_productive = round;
        }
        for &fact in &pending_order {
            store.insert(fact, round);
            provenance.insert(fact, pending.remove(&fact).unwrap_or_default());
        }
        delta = pending_order;
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
