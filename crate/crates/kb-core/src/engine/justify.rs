//! Proof trees over recorded provenance.
//!
//! A proof tree's leaves are asserted facts; an internal node is one rule
//! application with the binding it fired under. `justify` follows the
//! first-recorded derivation at every node; `enumerate_justifications`
//! walks the alternatives in (depth, rule id, binding) order, combining only
//! derivations whose round strictly decreases toward the leaves, so trees
//! are finite and never cyclic.

use crate::model::Fact;
use crate::symbol::SymbolId;
use crate::text::{display_fact, render_expression};

use super::{Derivation, EngineError, InferenceSetup, Materialization};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub fact: Fact,
    pub source: ProofSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofSource {
    Asserted,
    Applied {
        /// Index into the materialization's program.
        rule: usize,
        binding: Vec<(SymbolId, SymbolId)>,
        children: Vec<ProofNode>,
    },
}

/// The proof tree of an entailed fact, following the first-recorded
/// derivation at each node.
pub fn justify(fact: &Fact, m: &Materialization) -> Result<ProofNode, EngineError> {
    if !m.facts.contains(fact) {
        return Err(EngineError::NotEntailed(*fact));
    }
    Ok(first_tree(fact, m))
}

fn first_tree(fact: &Fact, m: &Materialization) -> ProofNode {
    if m.is_asserted(fact) {
        return ProofNode { fact: *fact, source: ProofSource::Asserted };
    }
    let deriv = &m.derivations(fact)[0];
    ProofNode {
        fact: *fact,
        source: ProofSource::Applied {
            rule: deriv.rule,
            binding: deriv.binding.clone(),
            children: deriv.supports.iter().map(|s| first_tree(s, m)).collect(),
        },
    }
}

/// Up to `k` distinct proof trees for an entailed fact, exhaustive when
/// fewer than `k` exist among the recorded derivations.
pub fn enumerate_justifications(
    fact: &Fact,
    m: &Materialization,
    k: usize,
) -> Result<Vec<ProofNode>, EngineError> {
    if !m.facts.contains(fact) {
        return Err(EngineError::NotEntailed(*fact));
    }
    Ok(trees_for(fact, m, u32::MAX, k))
}

/// Derivations of a fact sorted by (depth, rule origin, binding), keeping
/// only those below the parent's round.
fn sorted_derivations<'m>(fact: &Fact, m: &'m Materialization, below: u32) -> Vec<&'m Derivation> {
    let mut derivs: Vec<&Derivation> =
        m.derivations(fact).iter().filter(|d| d.depth < below).collect();
    derivs.sort_by(|a, b| {
        (a.depth, m.program[a.rule].origin.to_string(), &a.binding).cmp(&(
            b.depth,
            m.program[b.rule].origin.to_string(),
            &b.binding,
        ))
    });
    derivs
}

fn trees_for(fact: &Fact, m: &Materialization, below: u32, k: usize) -> Vec<ProofNode> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    if m.is_asserted(fact) {
        out.push(ProofNode { fact: *fact, source: ProofSource::Asserted });
        if out.len() == k {
            return out;
        }
    }
    for deriv in sorted_derivations(fact, m, below) {
        let remaining = k - out.len();
        let child_alternatives: Vec<Vec<ProofNode>> = deriv
            .supports
            .iter()
            .map(|s| trees_for(s, m, deriv.depth, remaining))
            .collect();
        if child_alternatives.iter().any(Vec::is_empty) {
            continue;
        }
        // Odometer over child choices, leftmost slowest.
        let mut choice = vec![0usize; child_alternatives.len()];
        loop {
            let children: Vec<ProofNode> = choice
                .iter()
                .zip(&child_alternatives)
                .map(|(&i, alts)| alts[i].clone())
                .collect();
            out.push(ProofNode {
                fact: *fact,
                source: ProofSource::Applied {
                    rule: deriv.rule,
                    binding: deriv.binding.clone(),
                    children,
                },
            });
            if out.len() == k {
                return out;
            }
            let mut pos = choice.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < child_alternatives[pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    out
}

/// Rule origins cited anywhere in a proof tree.
pub fn proof_rule_origins(node: &ProofNode, m: &Materialization, out: &mut Vec<String>) {
    if let ProofSource::Applied { rule, children, .. } = &node.source {
        out.push(m.program[*rule].origin.to_string());
        for child in children {
            proof_rule_origins(child, m, out);
        }
    }
}

/// Indented textual proof: two spaces per level, each line
/// `fact  [rule <id>]` or `fact  [asserted]`. Memberships in fresh
/// normalization classes display as the expression the name stands for.
pub fn render_proof(node: &ProofNode, m: &Materialization, setup: &InferenceSetup) -> String {
    let mut out = String::new();
    render_node(node, m, setup, 0, &mut out);
    out
}

fn display_proof_fact(fact: &Fact, setup: &InferenceSetup) -> String {
    if let Fact::Type { individual, class } = fact {
        if let Some(expr) = setup.normalized.fresh_names.get(class) {
            return format!(
                "{}({})",
                render_expression(expr, &setup.symbols),
                setup.symbols.lexical(*individual)
            );
        }
    }
    display_fact(fact, &setup.symbols)
}

fn render_node(
    node: &ProofNode,
    m: &Materialization,
    setup: &InferenceSetup,
    level: usize,
    out: &mut String,
) {
    out.push_str(&"  ".repeat(level));
    out.push_str(&display_proof_fact(&node.fact, setup));
    match &node.source {
        ProofSource::Asserted => out.push_str("  [asserted]\n"),
        ProofSource::Applied { rule, children, .. } => {
            out.push_str(&format!("  [rule {}]\n", m.program[*rule].origin));
            for child in children {
                render_node(child, m, setup, level + 1, out);
            }
        }
    }
}
