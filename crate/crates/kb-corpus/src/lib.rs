//! The reconstructed oral-systemic health corpus (OSHCO): knowledge-base
//! documents, the competency-question suite, and the with/without-rules
//! evaluation harness.
//!
//! Two corpus variants ship as `.kb` assets. The `rules` variant classifies
//! collaborative-management patients through rule complex 1 (conditions must
//! be interdependent); the `broad` variant uses a defined-class equivalence
//! instead, so any diabetes + periodontal-disease combination qualifies.
//! Rule complex 2 and the use-case rules are common to both.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use kb_core::engine::{prepare, saturate, RuleMode};
use kb_core::model::{KnowledgeBase, ModelError};
use kb_core::query::{evaluate, render_tsv};
use kb_core::text::{parse_query, KbLoader, ParseError};

pub const OSHCO_RULES_KB: &str = include_str!("../../../corpus/oshco.kb");
pub const OSHCO_BROAD_KB: &str = include_str!("../../../corpus/oshco-broad.kb");
pub const PATIENTS_KB: &str = include_str!("../../../corpus/patients.kb");
pub const CLASH_KB: &str = include_str!("../../../corpus/clash.kb");
pub const SUITE_TSV: &str = include_str!("../../../corpus/suite.tsv");

/// A synthetic patient with a diabetes condition and a periodontal condition
/// that carry no interdependency link. Classified as requiring collaborative
/// management by the broad variant but not by the rules variant; used by
/// tests, never part of the shipped fixtures.
pub const NON_INTERDEPENDENT_PATIENT_KB: &str = "\
individual Nina
type Nina : Patient
fact hasMedicalCondition(Nina, GestationalDiabetesMellitus)
fact hasOralCondition(Nina, PeriodontalAbscess)
";

macro_rules! query_assets {
    ($($name:literal),* $(,)?) => {
        &[$(
            (concat!("queries/", $name, ".rq"),
             include_str!(concat!("../../../corpus/queries/", $name, ".rq"))),
        )*]
    };
}

/// Embedded query texts, keyed by suite-relative path.
pub const QUERIES: &[(&str, &str)] = query_assets![
    "UC1-Q1", "UC1-Q2", "UC1-Q3", "UC1-Q4", "UC1-Q5",
    "UC2-Q1", "UC2-Q2", "UC2-Q3", "UC2-Q4", "UC2-Q5",
    "UC3-Q1", "UC3-Q2", "UC3-Q3", "UC3-Q4", "UC3-Q5", "UC3-Q6",
    "UC4-Q1", "UC4-Q2", "UC4-Q3", "UC4-Q4", "UC4-Q5",
    "UC5-Q1", "UC5-Q2", "UC5-Q3", "UC5-Q4", "UC5-Q5",
];

pub fn embedded_query(path: &str) -> Option<&'static str> {
    QUERIES.iter().find(|(p, _)| *p == path).map(|(_, text)| *text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Rules,
    Broad,
}

/// The corpus documents for a variant, in load order.
pub fn corpus_documents(variant: Variant) -> [(&'static str, &'static str); 2] {
    match variant {
        Variant::Rules => [("oshco.kb", OSHCO_RULES_KB), ("patients.kb", PATIENTS_KB)],
        Variant::Broad => [("oshco-broad.kb", OSHCO_BROAD_KB), ("patients.kb", PATIENTS_KB)],
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("suite line {line}: {message}")]
    Suite { line: usize, message: String },
    #[error("missing suite asset '{0}'")]
    MissingAsset(String),
}

/// Parse and freeze one corpus variant.
pub fn load_corpus(variant: Variant) -> Result<KnowledgeBase, CorpusError> {
    let mut loader = KbLoader::new();
    for (name, text) in corpus_documents(variant) {
        loader.add_document(text, name)?;
    }
    Ok(loader.finish()?)
}

// ---------------------------------------------------------------------------
// Competency questions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Complexity {
    Simple,
    Complex,
}

impl Complexity {
    pub fn label(self) -> &'static str {
        match self {
            Complexity::Simple => "simple",
            Complexity::Complex => "complex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    /// The query must return at least one row.
    Nonempty,
    /// The rendered TSV must equal this golden file byte for byte.
    Golden(String),
}

#[derive(Debug, Clone)]
pub struct CompetencyQuestion {
    pub id: String,
    pub use_case: u8,
    pub complexity: Complexity,
    pub query_path: String,
    pub expectation: Expectation,
}

/// Parse a `suite.tsv`: a header line, then
/// `id<TAB>use_case<TAB>complexity<TAB>query_path<TAB>expectation` rows,
/// where expectation is `nonempty` or `golden:<path>`.
pub fn parse_suite_tsv(text: &str) -> Result<Vec<CompetencyQuestion>, CorpusError> {
    let mut questions = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != "id\tuse_case\tcomplexity\tquery_path\texpectation" {
                return Err(CorpusError::Suite {
                    line: 1,
                    message: "unexpected header".to_string(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let err = |message: &str| CorpusError::Suite { line: idx + 1, message: message.to_string() };
        if fields.len() != 5 {
            return Err(err("expected 5 tab-separated fields"));
        }
        let use_case: u8 = fields[1].parse().map_err(|_| err("use_case must be 1..5"))?;
        if !(1..=5).contains(&use_case) {
            return Err(err("use_case must be 1..5"));
        }
        let complexity = match fields[2] {
            "simple" => Complexity::Simple,
            "complex" => Complexity::Complex,
            _ => return Err(err("complexity must be 'simple' or 'complex'")),
        };
        let expectation = if fields[4] == "nonempty" {
            Expectation::Nonempty
        } else if let Some(path) = fields[4].strip_prefix("golden:") {
            Expectation::Golden(path.to_string())
        } else {
            return Err(err("expectation must be 'nonempty' or 'golden:<path>'"));
        };
        questions.push(CompetencyQuestion {
            id: fields[0].to_string(),
            use_case,
            complexity,
            query_path: fields[3].to_string(),
            expectation,
        });
    }
    Ok(questions)
}

/// The shipped suite.
pub fn competency_suite() -> Vec<CompetencyQuestion> {
    parse_suite_tsv(SUITE_TSV).expect("shipped suite.tsv is well-formed")
}

// ---------------------------------------------------------------------------
// Suite execution
// ---------------------------------------------------------------------------

/// Source of suite-relative assets (query texts and golden files).
pub trait AssetSource {
    fn load(&self, path: &str) -> Option<String>;
}

impl<F: Fn(&str) -> Option<String>> AssetSource for F {
    fn load(&self, path: &str) -> Option<String> {
        self(path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionVerdict {
    pub id: String,
    pub use_case: u8,
    pub complexity: Complexity,
    pub resolved_ontology_only: bool,
    pub resolved_with_rules: bool,
}

/// Per (use case, complexity) resolution counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CellCounts {
    pub questions: usize,
    pub resolved_ontology_only: usize,
    pub resolved_with_rules: usize,
    pub unresolved: usize,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub verdicts: Vec<QuestionVerdict>,
}

impl SuiteReport {
    pub fn cells(&self) -> BTreeMap<(u8, Complexity), CellCounts> {
        let mut cells: BTreeMap<(u8, Complexity), CellCounts> = BTreeMap::new();
        for v in &self.verdicts {
            let cell = cells.entry((v.use_case, v.complexity)).or_default();
            cell.questions += 1;
            if v.resolved_ontology_only {
                cell.resolved_ontology_only += 1;
            }
            if v.resolved_with_rules {
                cell.resolved_with_rules += 1;
            }
            if !v.resolved_with_rules {
                cell.unresolved += 1;
            }
        }
        cells
    }

    pub fn all_with_rules_resolved(&self) -> bool {
        self.verdicts.iter().all(|v| v.resolved_with_rules)
    }
}

/// Evaluate every question once under one rule mode. Question failures are
/// verdicts, never errors; a malformed query or missing asset is an error.
pub fn run_suite_mode(
    kb: &KnowledgeBase,
    suite: &[CompetencyQuestion],
    mode: RuleMode,
    assets: &dyn AssetSource,
) -> Result<Vec<bool>, CorpusError> {
    let setup = prepare(kb, mode);
    let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
    let mut outcomes = Vec::with_capacity(suite.len());
    for question in suite {
        let query_text = assets
            .load(&question.query_path)
            .ok_or_else(|| CorpusError::MissingAsset(question.query_path.clone()))?;
        let mut symbols = kb.symbols().clone();
        let query = parse_query(&query_text, &question.query_path, &mut symbols)?;
        let resolved = match evaluate(&query, &symbols, &m) {
            Err(_) => false,
            Ok(table) => match &question.expectation {
                Expectation::Nonempty => !table.rows.is_empty(),
                Expectation::Golden(path) => {
                    let golden = assets
                        .load(path)
                        .ok_or_else(|| CorpusError::MissingAsset(path.clone()))?;
                    render_tsv(&table) == golden
                }
            },
        };
        outcomes.push(resolved);
    }
    Ok(outcomes)
}

/// Run the whole suite in both modes.
pub fn run_suite(
    kb: &KnowledgeBase,
    suite: &[CompetencyQuestion],
    assets: &dyn AssetSource,
) -> Result<SuiteReport, CorpusError> {
    let base = run_suite_mode(kb, suite, RuleMode::OntologyOnly, assets)?;
    let rules = run_suite_mode(kb, suite, RuleMode::WithRules, assets)?;
    let verdicts = suite
        .iter()
        .zip(base.iter().zip(&rules))
        .map(|(q, (&b, &r))| QuestionVerdict {
            id: q.id.clone(),
            use_case: q.use_case,
            complexity: q.complexity,
            resolved_ontology_only: b,
            resolved_with_rules: r,
        })
        .collect();
    Ok(SuiteReport { verdicts })
}

/// Fixed-width report: one row per use case, simple and complex column
/// groups, each with ontology-only resolved, ontology+rules resolved, and
/// still-unresolved counts.
pub fn render_report(report: &SuiteReport) -> String {
    let mut out = String::new();
    out.push_str("Use Case  Simple Questions        Complex Questions\n");
    out.push_str("          OSHCO  OSHCO+R  UR      OSHCO  OSHCO+R  UR\n");
    let cells = report.cells();
    let mut use_cases: Vec<u8> = cells.keys().map(|(uc, _)| *uc).collect();
    use_cases.sort_unstable();
    use_cases.dedup();
    for uc in use_cases {
        let simple = cells.get(&(uc, Complexity::Simple)).copied().unwrap_or_default();
        let complex = cells.get(&(uc, Complexity::Complex)).copied().unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<8}  {:>5}  {:>7}  {:>2}      {:>5}  {:>7}  {:>2}",
            uc,
            simple.resolved_ontology_only,
            simple.resolved_with_rules,
            simple.unresolved,
            complex.resolved_ontology_only,
            complex.resolved_with_rules,
            complex.unresolved,
        );
    }
    out
}
