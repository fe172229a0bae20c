//! End-to-end CLI behavior: exit codes, output bytes, determinism and the
//! rules/no-rules relationship.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_path(name: &str) -> String {
    corpus_dir().join(name).display().to_string()
}

fn kbctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kbctl"))
        .args(args)
        .env("KBCTL_COLOR", "never")
        .output()
        .expect("kbctl runs")
}

fn scratch_file(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kbctl-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn check_reports_consistent_corpus() {
    let out = kbctl(&["check", &corpus_path("oshco.kb"), &corpus_path("patients.kb")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "consistent\n");
}

#[test]
fn check_reports_clashes_with_exit_one() {
    let out = kbctl(&["check", &corpus_path("clash.kb")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("clash on caseA"));
    assert!(text.contains("clash on caseB"));
    assert!(text.contains("[rule viral-by-cause]"));
}

#[test]
fn malformed_document_exits_two_with_span() {
    let path = scratch_file("broken.kb", "class Ok\nclass class class");
    let out = kbctl(&["check", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("broken.kb:2:"), "{}", stderr_of(&out));
}

#[test]
fn unsafe_rule_exits_three() {
    let path = scratch_file(
        "unsafe.kb",
        "class A\nclass B\nproperty p\nrule bad: A(?x) -> p(?x, ?ghost)",
    );
    let out = kbctl(&["check", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("unsafe"));
}

#[test]
fn query_reproduces_the_reference_golden() {
    let out = kbctl(&[
        "query",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        &corpus_path("queries/UC3-Q2.rq"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(corpus_dir().join("golden/UC3-Q2.tsv")).unwrap();
    assert_eq!(stdout_of(&out), golden);
}

#[test]
fn query_without_rules_loses_the_rule_derived_answer() {
    let args = [
        "query",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        &corpus_path("queries/UC5-Q3.rq"),
    ];
    let with = kbctl(&args);
    assert_eq!(stdout_of(&with), "?Patient\noshco:Sam\n");
    let mut no_rules: Vec<&str> = args.to_vec();
    no_rules.push("--no-rules");
    let without = kbctl(&no_rules);
    assert_eq!(out_code(&without), 0);
    assert_eq!(stdout_of(&without), "?Patient\n");
}

fn out_code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn missing_query_file_exits_four() {
    let out = kbctl(&["query", &corpus_path("oshco.kb"), "/nonexistent/q.rq"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn explain_asserted_fact_is_a_single_line() {
    let out = kbctl(&[
        "explain",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--fact",
        "Patient(Tim)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "Patient(Tim)  [asserted]\n");
}

#[test]
fn explain_unentailed_fact_exits_five() {
    let out = kbctl(&[
        "explain",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--fact",
        "atRiskOf(Tim,BacterialEndocarditis)",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn explain_unknown_fact_symbol_exits_four() {
    let out = kbctl(&[
        "explain",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--fact",
        "Martian(Tim)",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn explain_all_lists_distinct_proofs() {
    let out = kbctl(&[
        "explain",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--fact",
        "ClinicalCondition(Type2Diabetes)",
        "--all",
        "--max-k",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let proofs: Vec<&str> = text.split("\n\n").collect();
    assert!(proofs.len() > 1, "expected several proofs:\n{text}");
}

#[test]
fn eval_passes_on_the_shipped_suite() {
    let out = kbctl(&[
        "eval",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--suite",
        &corpus_path("suite.tsv"),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("Use Case  Simple Questions"));
}

#[test]
fn eval_fails_with_six_on_an_unsatisfiable_golden() {
    let golden = scratch_file("wrong.tsv", "?Patient\noshco:Nobody\n");
    let suite = scratch_file(
        "suite-bad.tsv",
        &format!(
            "id\tuse_case\tcomplexity\tquery_path\texpectation\nBAD-Q1\t5\tsimple\t{}\tgolden:{}\n",
            corpus_path("queries/UC5-Q3.rq"),
            golden.display()
        ),
    );
    let out = kbctl(&[
        "eval",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--suite",
        &suite.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(6));
    assert!(stderr_of(&out).contains("BAD-Q1"));
}

#[test]
fn eval_of_empty_suite_is_header_only() {
    let suite = scratch_file("suite-empty.tsv", "id\tuse_case\tcomplexity\tquery_path\texpectation\n");
    let out = kbctl(&[
        "eval",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        "--suite",
        &suite.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).lines().count(), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let corpus = [corpus_path("oshco.kb"), corpus_path("patients.kb")];
    let cases: Vec<Vec<String>> = vec![
        vec!["check".into(), corpus[0].clone(), corpus[1].clone()],
        vec!["classify".into(), corpus[0].clone(), corpus[1].clone()],
        vec!["classify".into(), "--format".into(), "tree".into(), corpus[0].clone(), corpus[1].clone()],
        vec!["materialize".into(), corpus[0].clone(), corpus[1].clone()],
        vec![
            "query".into(),
            corpus[0].clone(),
            corpus[1].clone(),
            corpus_path("queries/UC3-Q1.rq"),
        ],
        vec![
            "explain".into(),
            corpus[0].clone(),
            corpus[1].clone(),
            "--fact".into(),
            "PatientRequiringMedicalOralManagement(Tim)".into(),
            "--all".into(),
        ],
        vec![
            "eval".into(),
            corpus[0].clone(),
            corpus[1].clone(),
            "--suite".into(),
            corpus_path("suite.tsv"),
        ],
    ];
    for args in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = kbctl(&argv);
        let second = kbctl(&argv);
        assert_eq!(first.stdout, second.stdout, "nondeterministic: {args:?}");
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn materialize_emits_sorted_fact_tsv() {
    let out = kbctl(&["materialize", &corpus_path("oshco.kb"), &corpus_path("patients.kb")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort_unstable();
    assert_eq!(lines, sorted, "lines must be lexicographically sorted");
    for line in &lines {
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "type" => assert_eq!(fields.len(), 3, "{line}"),
            "rel" => assert_eq!(fields.len(), 4, "{line}"),
            other => panic!("unexpected fact tag {other}"),
        }
    }
    assert!(lines.contains(&"type\tTim\tPatientRequiringMedicalOralManagement"));
    assert!(lines.contains(&"rel\trequiresPreventiveMeasure\tSam\tAntibioticProphylaxis"));
    // Internal classes never leak into the listing.
    assert!(!text.contains('@') && !text.contains('⊥'));
}

#[test]
fn classify_lists_direct_edges_sorted() {
    let out = kbctl(&["classify", &corpus_path("oshco.kb"), &corpus_path("patients.kb")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort_unstable();
    assert_eq!(lines, sorted);
    assert!(lines.contains(&"Type2Diabetes\tDiabetesMellitus"));
    // Transitively reduced: the indirect edge to MedicalCondition is absent.
    assert!(!lines.contains(&"Type2Diabetes\tMedicalCondition"));
    assert!(lines.contains(&"Patient\t⊤"));
}

#[test]
fn no_rules_output_is_a_subset_of_with_rules() {
    let corpus = [corpus_path("oshco.kb"), corpus_path("patients.kb")];
    let with = kbctl(&["materialize", &corpus[0], &corpus[1]]);
    let without = kbctl(&["materialize", "--no-rules", &corpus[0], &corpus[1]]);
    let with_text = stdout_of(&with);
    let with_lines: HashSet<&str> = with_text.lines().collect();
    let without_text = stdout_of(&without);
    for line in without_text.lines() {
        assert!(with_lines.contains(line), "fact lost under --no-rules: {line}");
    }
    assert!(without_text.lines().count() < with_text.lines().count());
}

#[test]
fn querying_an_inconsistent_kb_warns_but_answers() {
    let query = scratch_file(
        "clash-query.rq",
        "PREFIX o: <>\nSELECT ?x WHERE { ?x a o:BacterialInfection . }\n",
    );
    let out = kbctl(&["query", &corpus_path("clash.kb"), &query.display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr_of(&out).contains("inconsistent"));
    let text = stdout_of(&out);
    assert!(text.contains("o:caseA"));
    assert!(text.contains("o:caseB"));
}

#[test]
fn query_output_lands_in_the_requested_file() {
    let target = std::env::temp_dir()
        .join(format!("kbctl-tests-{}", std::process::id()))
        .join("out.tsv");
    std::fs::create_dir_all(target.parent().unwrap()).unwrap();
    let out = kbctl(&[
        "query",
        &corpus_path("oshco.kb"),
        &corpus_path("patients.kb"),
        &corpus_path("queries/UC5-Q3.rq"),
        "-o",
        &target.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), "?Patient\noshco:Sam\n");
}
