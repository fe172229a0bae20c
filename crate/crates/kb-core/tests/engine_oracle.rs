//! Saturation against the naive oracle, plus the monotonicity, idempotence,
//! open-world, provenance and realization properties.

use std::collections::HashSet;

use kb_core::engine::{naive_saturate, prepare, saturate, RuleMode};
use kb_core::model::{Atom, Fact, KnowledgeBase, Term};
use kb_core::symbol::{SymbolId, SymbolKind};
use kb_testkit::{random_kb, rng, KbBounds};

fn fact_set(m: &kb_core::engine::Materialization) -> HashSet<Fact> {
    m.facts.iter().copied().collect()
}

fn materialize(kb: &KnowledgeBase) -> (kb_core::engine::InferenceSetup, kb_core::engine::Materialization) {
    let setup = prepare(kb, RuleMode::WithRules);
    let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
    (setup, m)
}

#[test]
fn semi_naive_agrees_with_naive_oracle() {
    let mut mismatches = 0;
    for seed in 0..500u64 {
        let mut r = rng(seed);
        let kb = random_kb(&mut r, KbBounds::default());
        let setup = prepare(&kb, RuleMode::WithRules);
        let fast = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
        let slow = naive_saturate(&setup.program, kb.abox(), setup.normalized.bottom);
        if fact_set(&fast) != fact_set(&slow) {
            mismatches += 1;
            eprintln!("seed {seed}: fact sets differ ({} vs {})", fast.facts.len(), slow.facts.len());
        }
        if fast.consistent != slow.consistent {
            mismatches += 1;
            eprintln!("seed {seed}: consistency verdicts differ");
        }
        // Ground saturation is bounded by the fact space over the compiled
        // vocabulary (fresh names included).
        let classes = setup.symbols.declared_of_kind(SymbolKind::Class).len();
        let props = setup.symbols.declared_of_kind(SymbolKind::Property).len();
        let inds = setup.symbols.declared_of_kind(SymbolKind::Individual).len();
        assert!(fast.facts.len() <= inds * classes + props * inds * inds, "seed {seed}");
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn adding_a_fact_never_removes_derivations() {
    let mut checked = 0;
    for seed in 0..100u64 {
        let mut r = rng(seed * 13 + 1);
        let kb = random_kb(&mut r, KbBounds::default());
        let (setup, base) = materialize(&kb);

        let classes = kb.symbols().declared_of_kind(SymbolKind::Class);
        let individuals = kb.symbols().declared_of_kind(SymbolKind::Individual);
        if classes.is_empty() || individuals.is_empty() {
            continue;
        }
        use rand::Rng as _;
        let extra = Fact::Type {
            individual: individuals[r.random_range(0..individuals.len())],
            class: classes[r.random_range(0..classes.len())],
        };
        let mut abox = kb.abox().to_vec();
        abox.push(extra);
        let extended = saturate(&setup.program, &abox, setup.normalized.bottom);
        assert!(
            fact_set(&base).is_subset(&fact_set(&extended)),
            "seed {seed}: addition retracted a fact"
        );
        checked += 1;
    }
    assert!(checked >= 90, "generator starved the monotonicity suite");
}

#[test]
fn deleting_a_fact_never_adds_derivations() {
    for seed in 0..100u64 {
        let mut r = rng(seed * 7 + 5);
        let kb = random_kb(&mut r, KbBounds::default());
        if kb.abox().is_empty() {
            continue;
        }
        let (setup, full) = materialize(&kb);
        use rand::Rng as _;
        let victim = r.random_range(0..kb.abox().len());
        let mut abox = kb.abox().to_vec();
        abox.remove(victim);
        let reduced = saturate(&setup.program, &abox, setup.normalized.bottom);
        assert!(
            fact_set(&reduced).is_subset(&fact_set(&full)),
            "seed {seed}: deletion added a fact"
        );
    }
}

#[test]
fn saturation_is_idempotent() {
    for seed in 0..100u64 {
        let mut r = rng(seed * 3 + 11);
        let kb = random_kb(&mut r, KbBounds::default());
        let (setup, m) = materialize(&kb);
        let fixpoint: Vec<Fact> = m.facts.iter().copied().collect();
        let again = saturate(&setup.program, &fixpoint, setup.normalized.bottom);
        assert_eq!(fact_set(&m), fact_set(&again), "seed {seed}");
        assert_eq!(again.rounds, 0, "seed {seed}: fixpoint input still derived new facts");
    }
}

#[test]
fn provenance_replays_and_depths_decrease() {
    for seed in 0..150u64 {
        let mut r = rng(seed * 29 + 2);
        let kb = random_kb(&mut r, KbBounds::default());
        let (_setup, m) = materialize(&kb);
        for fact in m.facts.iter() {
            for deriv in m.derivations(fact) {
                let rule = &m.program[deriv.rule];
                let env: std::collections::HashMap<SymbolId, SymbolId> =
                    deriv.binding.iter().copied().collect();
                let ground = |atom: &Atom| -> Fact {
                    let value = |t: &Term| match t {
                        Term::Const(c) => *c,
                        Term::Var(v) => env[v],
                    };
                    match atom {
                        Atom::Class { class, arg } => {
                            Fact::Type { individual: value(arg), class: *class }
                        }
                        Atom::Property { property, subject, object } => Fact::Rel {
                            property: *property,
                            subject: value(subject),
                            object: value(object),
                        },
                    }
                };
                assert_eq!(ground(&rule.head), *fact, "seed {seed}: head replay");
                assert_eq!(rule.body.len(), deriv.supports.len(), "seed {seed}");
                for (atom, support) in rule.body.iter().zip(&deriv.supports) {
                    assert_eq!(ground(atom), *support, "seed {seed}: body replay");
                    let support_depth = m.facts.depth_of(support).expect("support entailed");
                    assert!(
                        support_depth < deriv.depth,
                        "seed {seed}: support depth did not decrease"
                    );
                }
            }
        }
    }
}

#[test]
fn materialized_types_cover_the_taxonomy() {
    for seed in 0..150u64 {
        let mut r = rng(seed * 41 + 17);
        let kb = random_kb(&mut r, KbBounds::default());
        let (setup, m) = materialize(&kb);
        let declared = kb.declared_classes();
        for fact in m.facts.iter() {
            let Fact::Type { individual, class } = *fact else { continue };
            if setup.is_internal_class(class) || !declared.contains(&class) {
                continue;
            }
            if !setup.taxonomy.satisfiable(class).unwrap() {
                continue;
            }
            for &sup in &declared {
                if setup.taxonomy.is_subsumed(class, sup).unwrap() {
                    assert!(
                        m.facts.contains(&Fact::Type { individual, class: sup }),
                        "seed {seed}: missing realized type"
                    );
                }
            }
        }
    }
}

#[test]
fn empty_program_returns_the_abox() {
    let mut r = rng(99);
    let kb = random_kb(&mut r, KbBounds::default());
    let bottom_placeholder = {
        let mut symbols = kb.symbols().clone();
        symbols.intern("BottomProbe", SymbolKind::Class).unwrap()
    };
    let m = saturate(&[], kb.abox(), bottom_placeholder);
    let asserted: HashSet<Fact> = kb.abox().iter().copied().collect();
    assert_eq!(fact_set(&m), asserted);
    assert!(m.facts.iter().all(|f| m.facts.depth_of(f) == Some(0)));
    let oracle = naive_saturate(&[], kb.abox(), bottom_placeholder);
    assert_eq!(fact_set(&oracle), asserted);
}
