//! `kbctl` — command-line front end for the knowledge-base engine.
//!
//! Results go to standard output (pipeable, byte-deterministic); diagnostics
//! go to standard error. Exit codes are stable:
//!
//! ```text
//! 0  success
//! 1  knowledge base inconsistent (check)
//! 2  knowledge-base file unreadable or malformed
//! 3  unsafe rule
//! 4  query, fact or suite input unreadable or malformed
//! 5  fact not entailed (explain)
//! 6  a with-rules suite expectation failed (eval)
//! ```

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kb_core::engine::{
    check_consistency, enumerate_justifications, justify, prepare, render_materialization_tsv,
    render_proof, saturate, EngineError, InferenceSetup, Materialization, RuleMode,
};
use kb_core::model::{KnowledgeBase, ModelError};
use kb_core::query::{evaluate, plan, render_tsv, QueryError};
use kb_core::reasoner::{render_taxonomy_tree, render_taxonomy_tsv};
use kb_core::text::{display_fact, parse_fact, parse_query, KbLoader, ParseError, ParseErrorKind};
use kb_corpus::{parse_suite_tsv, render_report, run_suite, CorpusError};

#[derive(Parser)]
#[command(name = "kbctl", version, about = "Parse, classify, materialize, query and explain knowledge bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifyFormat {
    Tsv,
    Tree,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, classify and saturate; report consistency.
    Check {
        /// Knowledge-base documents, concatenated in order.
        #[arg(required = true)]
        kb_paths: Vec<PathBuf>,
    },
    /// Print the classified hierarchy as direct edges or a tree.
    Classify {
        #[arg(required = true)]
        kb_paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "tsv")]
        format: ClassifyFormat,
    },
    /// Print every materialized fact as sorted TSV.
    Materialize {
        #[arg(required = true)]
        kb_paths: Vec<PathBuf>,
        /// Materialize from the ontology alone, without user rules.
        #[arg(long)]
        no_rules: bool,
    },
    /// Evaluate a query: knowledge-base documents first, the .rq file last.
    Query {
        /// One or more .kb files followed by the query file.
        #[arg(required = true, num_args = 2..)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        no_rules: bool,
        /// Write the result table here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print proof trees for an entailed fact.
    Explain {
        #[arg(required = true)]
        kb_paths: Vec<PathBuf>,
        /// The fact to explain: 'Class(individual)' or 'property(a,b)'.
        #[arg(long)]
        fact: String,
        /// Print every distinct proof (up to --max-k) instead of the first.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 8)]
        max_k: usize,
    },
    /// Run a competency-question suite in both rule modes and report.
    Eval {
        #[arg(required = true)]
        kb_paths: Vec<PathBuf>,
        /// Suite file; query and golden paths resolve relative to it.
        #[arg(long)]
        suite: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

fn parse_failure(code_ok: u8, err: &ParseError) -> Failure {
    let code = match err.kind {
        ParseErrorKind::UnsafeRule(_) => 3,
        _ => code_ok,
    };
    Failure::new(code, err.to_string())
}

fn model_failure(err: &ModelError) -> Failure {
    let code = match err {
        ModelError::UnsafeRule(_) => 3,
        _ => 2,
    };
    Failure::new(code, err.to_string())
}

fn load_kb(paths: &[PathBuf]) -> Result<KnowledgeBase, Failure> {
    let mut loader = KbLoader::new();
    for path in paths {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
        loader
            .add_document(&text, &path.display().to_string())
            .map_err(|e| parse_failure(2, &e))?;
    }
    loader.finish().map_err(|e| model_failure(&e))
}

fn materialize(kb: &KnowledgeBase, mode: RuleMode) -> (InferenceSetup, Materialization) {
    let setup = prepare(kb, mode);
    let m = saturate(&setup.program, kb.abox(), setup.normalized.bottom);
    (setup, m)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::new(2, format!("{}: {e}", path.display()))),
    }
}

fn render_clash_report(m: &Materialization, setup: &InferenceSetup) -> String {
    let report = check_consistency(m);
    let mut out = format!("inconsistent: {} clash(es)\n", report.clashes.len());
    for clash in &report.clashes {
        out.push_str(&format!(
            "clash on {} (axiom {})\n",
            setup.symbols.lexical(clash.clash.individual),
            clash.clash.axiom
        ));
        for side in [&clash.justifications.0, &clash.justifications.1] {
            for line in render_proof(side, m, setup).lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

fn cmd_check(kb_paths: &[PathBuf]) -> Result<u8, Failure> {
    let kb = load_kb(kb_paths)?;
    let (setup, m) = materialize(&kb, RuleMode::WithRules);
    if m.consistent {
        println!("consistent");
        Ok(0)
    } else {
        print!("{}", render_clash_report(&m, &setup));
        Ok(1)
    }
}

fn cmd_classify(kb_paths: &[PathBuf], format: ClassifyFormat) -> Result<u8, Failure> {
    let kb = load_kb(kb_paths)?;
    let setup = prepare(&kb, RuleMode::OntologyOnly);
    let text = match format {
        ClassifyFormat::Tsv => render_taxonomy_tsv(&setup.taxonomy, &setup.symbols),
        ClassifyFormat::Tree => render_taxonomy_tree(&setup.taxonomy, &setup.symbols),
    };
    print!("{text}");
    Ok(0)
}

fn cmd_materialize(kb_paths: &[PathBuf], no_rules: bool) -> Result<u8, Failure> {
    let kb = load_kb(kb_paths)?;
    let mode = if no_rules { RuleMode::OntologyOnly } else { RuleMode::WithRules };
    let (setup, m) = materialize(&kb, mode);
    if !m.consistent {
        diagnostic("warning", "knowledge base is inconsistent");
    }
    print!("{}", render_materialization_tsv(&m, &setup, &setup.symbols));
    Ok(0)
}

fn cmd_query(paths: &[PathBuf], no_rules: bool, output: Option<&Path>) -> Result<u8, Failure> {
    let (query_path, kb_paths) = paths.split_last().expect("clap enforces two paths");
    let query_text = std::fs::read_to_string(query_path)
        .map_err(|e| Failure::new(4, format!("{}: {e}", query_path.display())))?;
    let kb = load_kb(kb_paths)?;
    let mode = if no_rules { RuleMode::OntologyOnly } else { RuleMode::WithRules };
    let (_, m) = materialize(&kb, mode);
    if !m.consistent {
        diagnostic("warning", "knowledge base is inconsistent; evaluating anyway");
    }
    let mut symbols = kb.symbols().clone();
    let query = parse_query(&query_text, &query_path.display().to_string(), &mut symbols)
        .map_err(|e| parse_failure(4, &e))?;
    if !plan(&query, &m).cartesian_steps.is_empty() {
        diagnostic("warning", "query patterns are not fully connected; taking a cross product");
    }
    let table = match evaluate(&query, &symbols, &m) {
        Ok(table) => table,
        Err(QueryError::UnknownSymbol { name }) => {
            return Err(Failure::new(4, format!("query constant '{name}' is not declared")));
        }
    };
    emit(output, &render_tsv(&table))?;
    Ok(0)
}

fn cmd_explain(kb_paths: &[PathBuf], fact: &str, all: bool, max_k: usize) -> Result<u8, Failure> {
    let kb = load_kb(kb_paths)?;
    let (setup, m) = materialize(&kb, RuleMode::WithRules);
    let fact = parse_fact(fact, kb.symbols()).map_err(|e| parse_failure(4, &e))?;
    let trees = if all {
        enumerate_justifications(&fact, &m, max_k)
    } else {
        justify(&fact, &m).map(|t| vec![t])
    };
    let trees = trees.map_err(|e| match e {
        EngineError::NotEntailed(f) => {
            Failure::new(5, format!("fact {} is not entailed", display_fact(&f, &setup.symbols)))
        }
    })?;
    let mut out = String::new();
    for (i, tree) in trees.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&render_proof(tree, &m, &setup));
    }
    print!("{out}");
    Ok(0)
}

fn cmd_eval(kb_paths: &[PathBuf], suite_path: &Path, output: Option<&Path>) -> Result<u8, Failure> {
    let suite_text = std::fs::read_to_string(suite_path)
        .map_err(|e| Failure::new(4, format!("{}: {e}", suite_path.display())))?;
    let suite = parse_suite_tsv(&suite_text).map_err(|e| Failure::new(4, e.to_string()))?;
    let kb = load_kb(kb_paths)?;
    let base = suite_path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    let assets = move |path: &str| std::fs::read_to_string(base.join(path)).ok();
    let report = run_suite(&kb, &suite, &assets).map_err(|e| match e {
        CorpusError::Parse(ref p) => parse_failure(4, p),
        other => Failure::new(4, other.to_string()),
    })?;
    emit(output, &render_report(&report))?;
    if report.all_with_rules_resolved() {
        Ok(0)
    } else {
        let failed: Vec<&str> = report
            .verdicts
            .iter()
            .filter(|v| !v.resolved_with_rules)
            .map(|v| v.id.as_str())
            .collect();
        diagnostic("error", &format!("unmet with-rules expectations: {}", failed.join(", ")));
        Ok(6)
    }
}

/// Diagnostics go to standard error; KBCTL_COLOR={auto,never} controls the
/// severity coloring (auto colors only when stderr is a terminal).
fn diagnostic(severity: &str, message: &str) {
    let color = match std::env::var("KBCTL_COLOR").as_deref() {
        Ok("never") => false,
        _ => std::io::stderr().is_terminal(),
    };
    let mut stderr = std::io::stderr().lock();
    let _ = if color {
        let code = if severity == "error" { "31" } else { "33" };
        writeln!(stderr, "\x1b[{code}m{severity}:\x1b[0m {message}")
    } else {
        writeln!(stderr, "{severity}: {message}")
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { kb_paths } => cmd_check(kb_paths),
        Command::Classify { kb_paths, format } => cmd_classify(kb_paths, *format),
        Command::Materialize { kb_paths, no_rules } => cmd_materialize(kb_paths, *no_rules),
        Command::Query { paths, no_rules, output } => {
            cmd_query(paths, *no_rules, output.as_deref())
        }
        Command::Explain { kb_paths, fact, all, max_k } => {
            cmd_explain(kb_paths, fact, *all, *max_k)
        }
        Command::Eval { kb_paths, suite, output } => {
            cmd_eval(kb_paths, suite.as_path(), output.as_deref())
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            diagnostic("error", &failure.message);
            ExitCode::from(failure.code)
        }
    }
}
