//! Corpus self-consistency: fixtures load and saturate, the reference
//! diabetes/periodontal query reproduces, goldens match fresh evaluations byte for byte, and the
//! with/without-rules harness behaves monotonically.
//!
//! Set `REGEN_GOLDENS=1` to rewrite the golden files from a fresh evaluation
//! instead of asserting against them.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use kb_core::engine::{
    enumerate_justifications, justify, prepare, proof_rule_origins, saturate, RuleMode,
};
use kb_core::query::{evaluate, render_tsv};
use kb_core::symbol::SymbolKind;
use kb_core::text::{parse_fact, parse_query, KbLoader};
use kb_corpus::{
    competency_suite, corpus_documents, load_corpus, render_report, run_suite, Complexity,
    CompetencyQuestion, Expectation, SuiteReport, Variant, NON_INTERDEPENDENT_PATIENT_KB,
};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn fs_assets(path: &str) -> Option<String> {
    std::fs::read_to_string(corpus_dir().join(path)).ok()
}

fn materialized(variant: Variant, mode: RuleMode) -> (kb_core::model::KnowledgeBase, kb_core::engine::InferenceSetup, kb_core::engine::Materialization) {
    let kb = load_corpus(variant).expect("corpus loads");
    let setup = prepare(&kb, mode);
    let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
    (kb, setup, m)
}

#[test]
fn both_variants_load_and_saturate_consistent() {
    for variant in [Variant::Rules, Variant::Broad] {
        let (_, _, m) = materialized(variant, RuleMode::WithRules);
        assert!(m.consistent, "{variant:?} must be consistent");
        assert!(m.clashes.is_empty());
    }
}

#[test]
fn table_rules_load_as_five_rules() {
    // Rule complexes 1 and 2 alone: two plus three rules.
    let kb = load_corpus(Variant::Rules).unwrap();
    let rc: Vec<_> = kb.rules().iter().filter(|r| r.id.starts_with("rc")).collect();
    assert_eq!(rc.len(), 5);
}

#[test]
fn tim_is_classified_for_collaborative_management() {
    let (kb, _setup, m) = materialized(Variant::Rules, RuleMode::WithRules);
    let fact = parse_fact("PatientRequiringMedicalOralManagement(Tim)", kb.symbols()).unwrap();
    assert!(m.facts.contains(&fact));
    // The interdependency link is derived first, then the classification.
    let interdep = parse_fact(
        "hasInterdependency(Type2Diabetes,LocalisedChronicPeriodontitis)",
        kb.symbols(),
    )
    .unwrap();
    assert!(m.facts.contains(&interdep));
    assert!(m.facts.depth_of(&interdep).unwrap() < m.facts.depth_of(&fact).unwrap());

    // The proof cites both rules of complex 1.
    let tree = justify(&fact, &m).unwrap();
    let mut origins = Vec::new();
    proof_rule_origins(&tree, &m, &mut origins);
    assert!(origins.contains(&"rc1-collaborative-management".to_string()));
    assert!(origins.contains(&"rc1-prognosis-interdependency".to_string()));
}

#[test]
fn sam_risk_chain_derives_at_depths_one_two_three() {
    let (kb, _, m) = materialized(Variant::Rules, RuleMode::WithRules);
    let chain = [
        ("atRiskOf(Sam,BacteraemiaDueToSurgicalDentalProcedure)", 1),
        ("atRiskOf(Sam,BacterialEndocarditis)", 2),
        ("requiresPreventiveMeasure(Sam,AntibioticProphylaxis)", 3),
    ];
    for (text, depth) in chain {
        let fact = parse_fact(text, kb.symbols()).unwrap();
        assert_eq!(m.facts.depth_of(&fact), Some(depth), "{text}");
    }
    // A three-level proof ending in Sam's asserted facts.
    let fact = parse_fact("requiresPreventiveMeasure(Sam,AntibioticProphylaxis)", kb.symbols())
        .unwrap();
    let trees = enumerate_justifications(&fact, &m, 8).unwrap();
    assert!(!trees.is_empty());
    let setup = prepare(&kb, RuleMode::WithRules);
    let rendered = kb_core::engine::render_proof(&trees[0], &m, &setup);
    let rule_lines: Vec<&str> =
        rendered.lines().filter(|l| l.contains("[rule rc2-")).collect();
    assert_eq!(rule_lines.len(), 3, "three chained rule applications:\n{rendered}");
    assert!(rendered.lines().last().unwrap().ends_with("[asserted]"));
}

#[test]
fn tim_is_not_at_risk_of_endocarditis() {
    let (kb, _, m) = materialized(Variant::Rules, RuleMode::WithRules);
    let fact = parse_fact("atRiskOf(Tim,BacterialEndocarditis)", kb.symbols()).unwrap();
    assert!(justify(&fact, &m).is_err());
}

#[test]
fn expressivity_contrast_on_the_synthetic_patient() {
    for (variant, expected) in [(Variant::Broad, true), (Variant::Rules, false)] {
        let mut loader = KbLoader::new();
        for (name, text) in corpus_documents(variant) {
            loader.add_document(text, name).unwrap();
        }
        loader.add_document(NON_INTERDEPENDENT_PATIENT_KB, "synthetic.kb").unwrap();
        let kb = loader.finish().unwrap();
        let setup = prepare(&kb, RuleMode::WithRules);
        let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
        let fact = parse_fact("PatientRequiringMedicalOralManagement(Nina)", kb.symbols()).unwrap();
        assert_eq!(m.facts.contains(&fact), expected, "{variant:?}");
    }
}

#[test]
fn broad_variant_proofs_show_expressions_not_fresh_names() {
    let mut loader = KbLoader::new();
    for (name, text) in corpus_documents(Variant::Broad) {
        loader.add_document(text, name).unwrap();
    }
    loader.add_document(NON_INTERDEPENDENT_PATIENT_KB, "synthetic.kb").unwrap();
    let kb = loader.finish().unwrap();
    let setup = prepare(&kb, RuleMode::WithRules);
    let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
    let fact = parse_fact("PatientRequiringMedicalOralManagement(Nina)", kb.symbols()).unwrap();
    let rendered = kb_core::engine::render_proof(&justify(&fact, &m).unwrap(), &m, &setup);
    assert!(!rendered.contains('@'), "fresh names leaked:\n{rendered}");
    assert!(rendered.contains("some(hasMedicalCondition, DiabetesMellitus)(Nina)"));
}

#[test]
fn corpus_taxonomy_subsumptions() {
    let (kb, setup, _) = materialized(Variant::Broad, RuleMode::WithRules);
    let class = |name: &str| kb.symbols().lookup(name, SymbolKind::Class).unwrap();
    let tax = &setup.taxonomy;
    assert!(tax.is_subsumed(class("Type2Diabetes"), class("DiabetesMellitus")).unwrap());
    assert!(tax.is_subsumed(class("OralInfection"), class("ClinicalCondition")).unwrap());
    assert!(!tax.is_subsumed(class("DiabetesMellitus"), class("Type2Diabetes")).unwrap());
    // No disjointness in the corpus: everything is satisfiable.
    assert!(tax.unsatisfiable.is_empty());
}

#[test]
fn specializing_the_definition_stays_subsumed_in_broad_variant() {
    // A test class using subtypes as fillers must land under the defined
    // collaborative-management class.
    let mut loader = KbLoader::new();
    for (name, text) in corpus_documents(Variant::Broad) {
        loader.add_document(text, name).unwrap();
    }
    loader
        .add_document(
            "class ProbeClass\nequiv ProbeClass = and(Patient, some(hasMedicalCondition, Type2Diabetes), some(hasOralCondition, LocalisedChronicPeriodontitis))",
            "probe.kb",
        )
        .unwrap();
    let kb = loader.finish().unwrap();
    let setup = prepare(&kb, RuleMode::WithRules);
    let probe = kb.symbols().lookup("ProbeClass", SymbolKind::Class).unwrap();
    let target = kb
        .symbols()
        .lookup("PatientRequiringMedicalOralManagement", SymbolKind::Class)
        .unwrap();
    assert!(setup.taxonomy.is_subsumed(probe, target).unwrap());
}

fn reference_rows() -> HashSet<Vec<&'static str>> {
    [
        vec!["oshco:Steve", "oshco:DrugInducedDiabetes", "oshco:AcuteNecrotisingUlcerativePeriodontitis"],
        vec!["oshco:Tim", "oshco:Type2Diabetes", "oshco:LocalisedChronicPeriodontitis"],
        vec!["oshco:Ken", "oshco:Type2Diabetes", "oshco:PeriodontalAbscess"],
        vec!["oshco:Sara", "oshco:MaturityOnsetDiabetesOfTheYoung", "oshco:MarginalPeriodontitis"],
        vec!["oshco:Martin", "oshco:PreDiabetes", "oshco:GeneralisedAggressivePeriodontitis"],
        vec!["oshco:Cathy", "oshco:GestationalDiabetesMellitus", "oshco:GeneralisedAggressivePeriodontitis"],
        vec!["oshco:Linda", "oshco:ImmuneMediatedDiabetes", "oshco:CombinedPeriodonticEndodonticLesion"],
    ]
    .into_iter()
    .collect()
}

#[test]
fn diabetes_periodontal_query_reproduces_the_seven_rows_in_both_variants() {
    let query_text = fs_assets("queries/UC3-Q2.rq").expect("query asset");
    for variant in [Variant::Rules, Variant::Broad] {
        let (kb, _, m) = materialized(variant, RuleMode::WithRules);
        let mut symbols = kb.symbols().clone();
        let query = parse_query(&query_text, "UC3-Q2.rq", &mut symbols).unwrap();
        let table = evaluate(&query, &symbols, &m).unwrap();
        let rows: HashSet<Vec<&str>> = table
            .rows
            .iter()
            .map(|r| r.iter().map(String::as_str).collect())
            .collect();
        let expected = reference_rows();
        assert_eq!(rows, expected, "{variant:?}");
        assert_eq!(table.rows.len(), 7, "{variant:?}");
    }
}

/// Every golden file equals a fresh with-rules evaluation on the rules
/// variant, byte for byte. With REGEN_GOLDENS=1 the files are rewritten.
#[test]
fn goldens_match_fresh_evaluation() {
    let regen = std::env::var("REGEN_GOLDENS").is_ok();
    let (kb, _, m) = materialized(Variant::Rules, RuleMode::WithRules);
    for question in competency_suite() {
        let Expectation::Golden(golden_path) = &question.expectation else {
            continue;
        };
        let query_text = fs_assets(&question.query_path).expect("query asset");
        let mut symbols = kb.symbols().clone();
        let query = parse_query(&query_text, &question.query_path, &mut symbols).unwrap();
        let table = evaluate(&query, &symbols, &m).unwrap();
        let rendered = render_tsv(&table);
        let path = corpus_dir().join(golden_path);
        if regen {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &rendered).unwrap();
        } else {
            let golden = std::fs::read_to_string(&path)
                .unwrap_or_else(|_| panic!("missing golden {golden_path}"));
            assert_eq!(rendered, golden, "{} drifted from its golden", question.id);
        }
    }
}

#[test]
fn naive_oracle_agrees_on_the_full_corpus() {
    for variant in [Variant::Rules, Variant::Broad] {
        let kb = load_corpus(variant).unwrap();
        let setup = prepare(&kb, RuleMode::WithRules);
        let fast = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
        let slow =
            kb_core::engine::naive_saturate(&setup.program, kb.abox(), setup.normalized.bottom);
        let fast_set: HashSet<kb_core::model::Fact> = fast.facts.iter().copied().collect();
        let slow_set: HashSet<kb_core::model::Fact> = slow.facts.iter().copied().collect();
        assert_eq!(fast_set, slow_set, "{variant:?}");
    }
}

#[test]
fn reference_query_plan_starts_with_a_type_constraint() {
    // Cardinalities on the corpus: six individuals typed DiabetesMellitus
    // and six typed PeriodontalDisease versus nine hasMedicalCondition and
    // twelve hasOralCondition links and eleven patients — the greedy plan
    // must open with the diabetes type constraint (first of the tied pair)
    // and stay connected throughout.
    let (kb, _, m) = materialized(Variant::Rules, RuleMode::WithRules);
    let query_text = fs_assets("queries/UC3-Q2.rq").unwrap();
    let mut symbols = kb.symbols().clone();
    let query = parse_query(&query_text, "UC3-Q2.rq", &mut symbols).unwrap();
    let plan = kb_core::query::plan(&query, &m);
    assert_eq!(plan.order[0], 3, "expected the DiabetesMellitus type pattern first");
    assert!(plan.cartesian_steps.is_empty());
}

#[test]
fn ground_patterns_do_not_count_as_cartesian() {
    // UC3-Q4 filters on a fully ground pattern (a named patient's class
    // membership); the plan must not flag a cross product for it.
    let (kb, _, m) = materialized(Variant::Rules, RuleMode::WithRules);
    let query_text = fs_assets("queries/UC3-Q4.rq").unwrap();
    let mut symbols = kb.symbols().clone();
    let query = parse_query(&query_text, "UC3-Q4.rq", &mut symbols).unwrap();
    let plan = kb_core::query::plan(&query, &m);
    assert!(plan.cartesian_steps.is_empty(), "{:?}", plan);
}

#[test]
fn suite_composition_is_as_documented() {
    let suite = competency_suite();
    assert!(suite.len() >= 25, "{} questions", suite.len());
    for uc in 1..=5u8 {
        let of_case: Vec<&CompetencyQuestion> =
            suite.iter().filter(|q| q.use_case == uc).collect();
        assert!(of_case.len() >= 5, "use case {uc} has {} questions", of_case.len());
        assert!(of_case.iter().any(|q| q.complexity == Complexity::Simple));
        assert!(of_case.iter().any(|q| q.complexity == Complexity::Complex));
    }
    // The printed questions from use cases 3 and 5 are present.
    for id in ["UC3-Q1", "UC3-Q2", "UC3-Q3", "UC3-Q4", "UC5-Q1", "UC5-Q2", "UC5-Q3"] {
        assert!(suite.iter().any(|q| q.id == id), "{id} missing");
    }
}

fn shipped_report() -> SuiteReport {
    let kb = load_corpus(Variant::Rules).unwrap();
    run_suite(&kb, &competency_suite(), &fs_assets).unwrap()
}

#[test]
fn with_rules_resolves_everything_and_strictly_more_than_ontology_alone() {
    let report = shipped_report();
    assert!(report.all_with_rules_resolved());
    let mut strict_cells = 0;
    for (cell, counts) in report.cells() {
        assert!(
            counts.resolved_with_rules >= counts.resolved_ontology_only,
            "cell {cell:?} lost resolutions with rules"
        );
        if counts.resolved_with_rules > counts.resolved_ontology_only {
            strict_cells += 1;
        }
    }
    assert!(strict_cells >= 3, "only {strict_cells} strict cells");

    // The printed use-case questions all resolve with rules; the antibiotic
    // prophylaxis question needs the user rules.
    let verdict = |id: &str| {
        report
            .verdicts
            .iter()
            .find(|v| v.id == id)
            .unwrap_or_else(|| panic!("{id} missing"))
    };
    for id in ["UC3-Q1", "UC3-Q2", "UC3-Q3", "UC3-Q4", "UC5-Q1", "UC5-Q2", "UC5-Q3"] {
        assert!(verdict(id).resolved_with_rules, "{id}");
    }
    assert!(!verdict("UC5-Q3").resolved_ontology_only);
    assert!(!verdict("UC3-Q3").resolved_ontology_only);
    assert!(verdict("UC3-Q2").resolved_ontology_only);
}

#[test]
fn random_suite_subsets_stay_cell_monotone() {
    use rand::seq::SliceRandom as _;
    let kb = load_corpus(Variant::Rules).unwrap();
    let full = competency_suite();
    let mut r = kb_testkit::rng(7);
    for _ in 0..10 {
        let mut shuffled = full.clone();
        shuffled.shuffle(&mut r);
        let take = 1 + (shuffled.len() / 3);
        let subset: Vec<CompetencyQuestion> = shuffled.into_iter().take(take).collect();
        let report = run_suite(&kb, &subset, &fs_assets).unwrap();
        for (cell, counts) in report.cells() {
            assert!(
                counts.resolved_with_rules >= counts.resolved_ontology_only,
                "cell {cell:?} broke monotonicity in a subset"
            );
        }
    }
}

#[test]
fn report_rendering_shapes() {
    let report = shipped_report();
    let rendered = render_report(&report);
    assert_eq!(rendered.lines().count(), 7, "header + five use-case rows:\n{rendered}");

    let empty = render_report(&SuiteReport { verdicts: vec![] });
    assert_eq!(empty.lines().count(), 2);

    let single = SuiteReport {
        verdicts: vec![kb_corpus::QuestionVerdict {
            id: "only".to_string(),
            use_case: 2,
            complexity: Complexity::Simple,
            resolved_ontology_only: false,
            resolved_with_rules: true,
        }],
    };
    let rendered = render_report(&single);
    let row = rendered.lines().nth(2).unwrap();
    assert!(row.starts_with('2'));
    let cells: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cells, vec!["2", "0", "1", "0", "0", "0", "0"]);
}

#[test]
fn clash_fixture_reports_direct_and_derived_clashes() {
    let mut loader = KbLoader::new();
    loader.add_document(kb_corpus::CLASH_KB, "clash.kb").unwrap();
    let kb = loader.finish().unwrap();
    let setup = prepare(&kb, RuleMode::WithRules);
    let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
    assert!(!m.consistent);
    let individuals: HashSet<&str> = m
        .clashes
        .iter()
        .map(|c| setup.symbols.lexical(c.individual))
        .collect();
    assert_eq!(individuals, HashSet::from(["caseA", "caseB"]));
    let report = kb_core::engine::check_consistency(&m);
    let mut origins = Vec::new();
    for clash in &report.clashes {
        proof_rule_origins(&clash.justifications.0, &m, &mut origins);
        proof_rule_origins(&clash.justifications.1, &m, &mut origins);
    }
    assert!(origins.contains(&"viral-by-cause".to_string()));
}
