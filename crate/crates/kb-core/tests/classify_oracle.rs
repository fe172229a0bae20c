//! Classification against the brute-force completion oracle, plus the
//! preorder and partition properties.

use kb_core::reasoner::{classify, normalize};
use kb_testkit::{oracle_subsumption_matrix, random_tbox, rng, RandomTbox, TboxBounds};

#[test]
fn classify_matches_brute_force_oracle() {
    let mut mismatches = 0;
    for seed in 0..500u64 {
        let mut r = rng(seed);
        let RandomTbox { mut symbols, axioms, classes, .. } =
            random_tbox(&mut r, TboxBounds::default());
        let norm = normalize(&axioms, &mut symbols);
        let tax = classify(&norm, &classes);
        let matrix = oracle_subsumption_matrix(&norm, &classes);
        for &a in &classes {
            for &b in &classes {
                let engine = tax.is_subsumed(a, b).unwrap();
                let oracle = matrix[&(a, b)];
                if engine != oracle {
                    mismatches += 1;
                    eprintln!(
                        "seed {seed}: {} ⊑ {} engine={engine} oracle={oracle}",
                        symbols.lexical(a),
                        symbols.lexical(b)
                    );
                }
            }
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn subsumption_is_a_preorder() {
    for seed in 0..120u64 {
        let mut r = rng(seed * 31 + 7);
        let RandomTbox { mut symbols, axioms, classes, .. } = random_tbox(
            &mut r,
            TboxBounds { classes: 20, properties: 3, axioms: 18, allow_disjoint: true },
        );
        let norm = normalize(&axioms, &mut symbols);
        let tax = classify(&norm, &classes);
        for &a in &classes {
            assert!(tax.is_subsumed(a, a).unwrap(), "seed {seed}: reflexivity");
            assert!(tax.is_subsumed(a, tax.top()).unwrap(), "seed {seed}: top");
            for &b in &classes {
                if !tax.is_subsumed(a, b).unwrap() {
                    continue;
                }
                for &c in &classes {
                    if tax.is_subsumed(b, c).unwrap() {
                        assert!(
                            tax.is_subsumed(a, c).unwrap(),
                            "seed {seed}: transitivity broken"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn mutual_subsumption_matches_partitions() {
    for seed in 0..120u64 {
        let mut r = rng(seed * 17 + 3);
        let RandomTbox { mut symbols, axioms, classes, .. } =
            random_tbox(&mut r, TboxBounds::default());
        let norm = normalize(&axioms, &mut symbols);
        let tax = classify(&norm, &classes);
        let partition_of = |c| {
            tax.partitions
                .iter()
                .position(|p| p.contains(&c))
                .expect("every declared class is in a partition")
        };
        for &a in &classes {
            for &b in &classes {
                let mutual = tax.is_subsumed(a, b).unwrap() && tax.is_subsumed(b, a).unwrap();
                assert_eq!(mutual, partition_of(a) == partition_of(b), "seed {seed}");
            }
        }
    }
}

#[test]
fn undeclared_class_lookup_is_an_error() {
    let mut r = rng(1);
    let RandomTbox { mut symbols, axioms, classes, .. } =
        random_tbox(&mut r, TboxBounds::default());
    let ghost = symbols
        .intern("Ghost", kb_core::symbol::SymbolKind::Class)
        .unwrap();
    let norm = normalize(&axioms, &mut symbols);
    let tax = classify(&norm, &classes);
    assert!(tax.is_subsumed(ghost, classes[0]).is_err());
    assert!(tax.satisfiable(ghost).is_err());
}
