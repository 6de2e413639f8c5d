//! `gpmetric`: reduce words, compute group distances, embed metric graphs and
//! run the seeded property suites.
//!
//! Exit codes: 0 pass, 1 property violation, 2 input or validation error,
//! 3 an edge oracle could not answer a query.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gpmetric::check::{run_suite, CheckConfig, SuiteReport};
use gpmetric::embed::MetricGraphInstance;
use gpmetric::graphspec::fixtures;
use gpmetric::oracle::oracle_equal;
use gpmetric::ultranorm::{distance, ultranorm};
use gpmetric::{canonical, equal, Error, GraphInstance, Order, UltraValue, VertexPath, Word};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "gpmetric", version, about = "Graph products of cyclic groups over Baire space")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the canonical normal form of a word.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Left-invariant distance d(w1, w2) = d(w1⁻¹ w2).
    Dist {
        #[arg(long)]
        graph: PathBuf,
        /// Exactly two word files.
        #[arg(long, num_args = 1, required = true)]
        word: Vec<PathBuf>,
    },
    /// Ultranorm of a word, with the depth at which it becomes visible.
    Norm {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Verify the construction on a metric instance and write the image graph.
    Embed {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        /// Run single-threaded; results are identical.
        #[arg(long)]
        sequential: bool,
    },
    /// Compare `equal` with the brute-force oracle, on two words or on the
    /// exhaustive small-word corpus when no words are given.
    OracleCompare {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        word: Vec<PathBuf>,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Write a fixture graph instance.
    Fixture {
        /// free, complete, half-graph or random-boxes.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        size: usize,
        /// Comma-separated orders, e.g. `2,3,inf`.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_oracle_resolution() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<GraphInstance, Failure> {
    GraphInstance::from_json(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// Reads a word file. Vertices are VertexPath objects; with a finite oracle
/// they may also be given by name.
fn load_word(path: &Path, g: &GraphInstance) -> Result<Word<VertexPath>, Failure> {
    let bad = |msg: String| input_error(format!("{}: {msg}", path.display()));
    let mut raw: Value = serde_json::from_str(&read(path)?).map_err(|e| bad(e.to_string()))?;
    if let Value::Array(syllables) = &mut raw {
        for s in syllables.iter_mut() {
            if let Some(Value::String(name)) = s.get(0) {
                let v = g
                    .vertex_named(name)
                    .ok_or_else(|| bad(format!("no vertex named {name}")))?;
                s[0] = serde_json::to_value(v).expect("vertex paths serialize");
            }
        }
    }
    Word::from_json(&raw.to_string(), g).map_err(|e| bad(e.to_string()))
}

fn render(w: &Word<VertexPath>, g: &GraphInstance) -> String {
    w.render(|v| g.name_of(v).map_or_else(|| v.to_string(), str::to_string))
}

fn value_json(v: &UltraValue) -> Value {
    serde_json::to_value(v).expect("ultra values serialize")
}

/// Prints one line: the human text, or the structured record.
fn emit(format: Format, human: &str, record: Value) {
    match format {
        Format::Human => println!("{human}"),
        Format::Structured => println!("{record}"),
    }
}

fn cmd_reduce(format: Format, graph: &Path, word: &Path) -> Result<u8, Failure> {
    let g = load_graph(graph)?;
    let w = load_word(word, &g)?;
    let c = canonical(&w, &g)?;
    emit(
        format,
        &render(c.word(), &g),
        json!({"command": "reduce", "word": c.word(), "rendered": render(c.word(), &g)}),
    );
    Ok(0)
}

fn cmd_dist(format: Format, graph: &Path, words: &[PathBuf]) -> Result<u8, Failure> {
    if words.len() != 2 {
        return Err(input_error(format!("dist needs exactly two --word files, got {}", words.len())));
    }
    let g = load_graph(graph)?;
    let (w1, w2) = (load_word(&words[0], &g)?, load_word(&words[1], &g)?);
    let d = distance(&w1, &w2, &g)?;
    emit(
        format,
        &format!("{d} = {}", d.decimal()),
        json!({"command": "dist", "value": value_json(&d), "decimal": d.decimal()}),
    );
    Ok(0)
}

fn cmd_norm(format: Format, graph: &Path, word: &Path) -> Result<u8, Failure> {
    let g = load_graph(graph)?;
    let w = load_word(word, &g)?;
    let r = ultranorm(&w, &g)?;
    let depth = r.depth.map_or_else(|| "none".to_string(), |n| n.to_string());
    emit(
        format,
        &format!(
            "{} = {} (depth {depth}, canonical {})",
            r.value,
            r.value.decimal(),
            render(r.canonical.word(), &g)
        ),
        json!({
            "command": "norm",
            "depth": r.depth,
            "value": value_json(&r.value),
            "decimal": r.value.decimal(),
            "canonical": r.canonical.word(),
            "certificate": r.certificate.as_ref().map(|c| c.word()),
        }),
    );
    Ok(0)
}

fn cmd_embed(format: Format, metric: &Path, out: &Path) -> Result<u8, Failure> {
    let inst = MetricGraphInstance::from_json(&read(metric)?)
        .map_err(|e| input_error(format!("{}: {e}", metric.display())))?;
    let report = inst.verify_lemma();
    for c in &report.clauses {
        let clause = serde_json::to_value(c.clause).expect("clauses serialize");
        let name = clause.as_str().unwrap_or_default().to_string();
        emit(
            format,
            &format!(
                "{} {name}{}",
                if c.passed { "PASS" } else { "FAIL" },
                if c.passed { String::new() } else { format!(": {}", c.failures.join("; ")) }
            ),
            json!({"command": "embed", "clause": name, "passed": c.passed, "failures": c.failures}),
        );
    }
    let g = inst.to_graph_instance()?;
    fs::write(out, g.to_json()).map_err(|e| input_error(format!("{}: {e}", out.display())))?;
    emit(
        format,
        &format!("wrote {} vertices to {}", g.named_vertices().len(), out.display()),
        json!({"command": "embed", "vertices": g.named_vertices().len(), "out": out.display().to_string()}),
    );
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn print_suite(format: Format, report: &SuiteReport) {
    #[derive(Serialize)]
    struct Line<'a> {
        command: &'static str,
        suite: &'a str,
        id: &'a str,
        passed: bool,
        checked: u64,
        violations: u64,
        counterexamples: &'a [String],
    }
    for c in &report.criteria {
        let line = Line {
            command: "check",
            suite: &report.suite,
            id: &c.id,
            passed: c.passed(),
            checked: c.checked,
            violations: c.violations,
            counterexamples: &c.counterexamples,
        };
        let mut human = format!(
            "{} {} ({}): {} checked, {} violations",
            if c.passed() { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.checked,
            c.violations
        );
        for ex in &c.counterexamples {
            human.push_str("\n    ");
            human.push_str(ex);
        }
        emit(format, &human, serde_json::to_value(&line).expect("report lines serialize"));
    }
}

fn cmd_check(format: Format, suite: &str, cfg: CheckConfig) -> Result<u8, Failure> {
    let report = run_suite(suite, &cfg)?;
    print_suite(format, &report);
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_oracle_compare(
    format: Format,
    graph: Option<&Path>,
    words: &[PathBuf],
    max_len: usize,
    seed: u64,
) -> Result<u8, Failure> {
    if words.is_empty() {
        let cfg = CheckConfig {
            seed,
            max_len,
            ..CheckConfig::default()
        };
        return cmd_check(format, "oracle-compare", cfg);
    }
    let (Some(graph), [w1, w2]) = (graph, words) else {
        return Err(input_error("oracle-compare needs --graph and exactly two --word files".into()));
    };
    let g = load_graph(graph)?;
    let (a, b) = (load_word(w1, &g)?, load_word(w2, &g)?);
    let by_words = equal(&a, &b, &g)?;
    let by_oracle = oracle_equal(&a, &b, &g, max_len)?;
    emit(
        format,
        &format!(
            "{} equal = {by_words}, oracle = {by_oracle}",
            if by_words == by_oracle { "AGREE" } else { "DISAGREE" }
        ),
        json!({"command": "oracle-compare", "equal": by_words, "oracle": by_oracle, "agree": by_words == by_oracle}),
    );
    Ok(if by_words == by_oracle { 0 } else { 1 })
}

fn cmd_fixture(kind: &str, size: usize, orders: &[String], seed: u64, out: Option<&Path>) -> Result<u8, Failure> {
    let orders = orders
        .iter()
        .map(|s| s.parse::<Order>())
        .collect::<Result<Vec<_>, _>>()?;
    let g = fixtures::fixture(kind, size, &orders, seed)?;
    match out {
        Some(path) => fs::write(path, g.to_json()).map_err(|e| input_error(format!("{}: {e}", path.display())))?,
        None => println!("{}", g.to_json()),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Reduce { graph, word } => cmd_reduce(format, &graph, &word),
        Command::Dist { graph, word } => cmd_dist(format, &graph, &word),
        Command::Norm { graph, word } => cmd_norm(format, &graph, &word),
        Command::Embed { metric, out } => cmd_embed(format, &metric, &out),
        Command::Check {
            suite,
            samples,
            seed,
            depth,
            max_len,
            sequential,
        } => {
            let cfg = CheckConfig {
                samples,
                seed,
                depth,
                max_len,
                exec: if sequential {
                    gpmetric::exec::Exec::Sequential
                } else {
                    gpmetric::exec::Exec::Parallel
                },
            };
            cmd_check(format, &suite, cfg)
        }
        Command::OracleCompare {
            graph,
            word,
            max_len,
            seed,
        } => cmd_oracle_compare(format, graph.as_deref(), &word, max_len, seed),
        Command::Fixture {
            kind,
            size,
            orders,
            seed,
            out,
        } => cmd_fixture(&kind, size, &orders, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
