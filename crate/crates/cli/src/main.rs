use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;
use tagderiv::chart::{parse_with, tokens, Chart, ParseError, ParseOptions};
use tagderiv::derivation::violations;
use tagderiv::grammar::GrammarError;
use tagderiv::oracle::{EnumBounds, Oracle};
use tagderiv::{canonicalize, compile, derive, DerivationMode, OrderedDerivationTree, TagGrammar};

const ACCEPT: u8 = 0;
const REJECT: u8 = 1;
const INPUT_ERROR: u8 = 2;
const VIOLATION: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Validate,
    Compile,
    Recognize,
    Parse,
    Derive,
    Enumerate,
    Canon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Standard,
    Extended,
}

impl From<Mode> for DerivationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Standard => DerivationMode::Standard,
            Mode::Extended => DerivationMode::Extended,
        }
    }
}

/// Tree-adjoining grammar toolkit with standard and extended derivations.
#[derive(Debug, Parser)]
#[command(name = "tagderiv", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Grammar file (JSON).
    #[arg(long, short)]
    grammar: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "extended")]
    mode: Mode,
    /// Whitespace-separated input tokens.
    #[arg(long, short)]
    input: Option<String>,
    /// Derivation file (JSON).
    #[arg(long, short)]
    derivation: Option<PathBuf>,
    /// Derivation node bound for `enumerate`, and for `parse` when given.
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long, default_value_t = 10)]
    max_len: usize,
    /// Structured (JSON) output.
    #[arg(long)]
    json: bool,
    /// `parse`: answer from the brute-force enumeration instead of the chart.
    #[arg(long)]
    oracle: bool,
    /// `recognize`/`parse`: also print the chart, one item per line.
    #[arg(long)]
    chart: bool,
}

const DEFAULT_MAX_NODES: usize = 6;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: INPUT_ERROR,
            message: message.into(),
        }
    }

    fn violation(message: impl Into<String>) -> Self {
        Failure {
            code: VIOLATION,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_grammar(cli: &Cli) -> Result<TagGrammar, Failure> {
    let path = cli
        .grammar
        .as_deref()
        .ok_or_else(|| Failure::input("--grammar is required"))?;
    TagGrammar::from_json(&read(path)?).map_err(|e| match e {
        GrammarError::Syntax {
            line,
            column,
            message,
        } => Failure::input(format!("{}:{line}:{column}: {message}", path.display())),
        other => Failure::input(format!("{}: {other}", path.display())),
    })
}

fn load_derivation(cli: &Cli) -> Result<OrderedDerivationTree, Failure> {
    let path = cli
        .derivation
        .as_deref()
        .ok_or_else(|| Failure::input("--derivation is required"))?;
    OrderedDerivationTree::from_json(&read(path)?).map_err(|e| {
        Failure::input(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn input_tokens(cli: &Cli) -> Result<Vec<String>, Failure> {
    cli.input
        .as_deref()
        .map(tokens)
        .ok_or_else(|| Failure::input("--input is required"))
}

fn lexical(e: ParseError) -> Failure {
    match e {
        ParseError::Lexical { position, token } => Failure::input(format!(
            "--input:token {position}: {token:?} is not a terminal of the grammar"
        )),
        other => Failure::input(other.to_string()),
    }
}

fn bounds(cli: &Cli) -> Result<EnumBounds, Failure> {
    let n = cli.max_nodes.unwrap_or(DEFAULT_MAX_NODES);
    if n == 0 || cli.max_len == 0 {
        return Err(Failure::input("bounds must be positive"));
    }
    Ok(EnumBounds::new(n, cli.max_len))
}

fn sentence(w: &[String]) -> String {
    if w.is_empty() {
        "<eps>".into()
    } else {
        w.join(" ")
    }
}

/// Renders derivation classes with their derived trees, sorted by the
/// canonical representative.
fn render_classes(
    g: &TagGrammar,
    ds: &[OrderedDerivationTree],
    as_json: bool,
) -> Result<String, Failure> {
    let classes: BTreeSet<OrderedDerivationTree> = ds.iter().map(canonicalize).collect();
    let mut rows = Vec::new();
    for d in &classes {
        let t = derive(d, g).map_err(|e| Failure::violation(e.to_string()))?;
        let frontier = t
            .frontier_string()
            .map_err(|e| Failure::violation(e.to_string()))?;
        rows.push((d, t.to_bracketed(), frontier));
    }
    let mut out = String::new();
    if as_json {
        let v: Vec<_> = rows
            .iter()
            .map(|(d, tree, w)| json!({"derivation": d, "derived": tree, "frontier": w.join(" ")}))
            .collect();
        out.push_str(&serde_json::to_string_pretty(&v).expect("serializable"));
        out.push('\n');
    } else {
        for (d, tree, w) in rows {
            writeln!(out, "{d}").unwrap();
            writeln!(out, "  derived: {tree}").unwrap();
            writeln!(out, "  frontier: {}", sentence(&w)).unwrap();
        }
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let mode: DerivationMode = cli.mode.into();
    match cli.command {
        Command::Validate => {
            let g = load_grammar(cli)?;
            let diags = g.validate();
            if cli.json {
                let v: Vec<String> = diags.iter().map(ToString::to_string).collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("serializable")
                );
            } else if diags.is_empty() {
                println!("ok");
            } else {
                for d in &diags {
                    println!("{d}");
                }
            }
            Ok(if diags.is_empty() { ACCEPT } else { VIOLATION })
        }
        Command::Compile => {
            let g = load_grammar(cli)?;
            let lig = compile(&g, mode).map_err(|e| Failure::violation(e.to_string()))?;
            print!("{}", lig.dump());
            Ok(ACCEPT)
        }
        Command::Recognize => {
            let g = load_grammar(cli)?;
            let w = input_tokens(cli)?;
            let lig = compile(&g, mode).map_err(|e| Failure::violation(e.to_string()))?;
            let chart = Chart::run(&lig, &w, ParseOptions::recognition()).map_err(lexical)?;
            let ok = chart.accepted();
            if cli.chart {
                eprint!("{}", chart.dump());
            }
            if cli.json {
                println!("{}", json!({"accepted": ok, "items": chart.len()}));
            } else {
                println!("{ok}");
            }
            Ok(if ok { ACCEPT } else { REJECT })
        }
        Command::Parse => {
            let g = load_grammar(cli)?;
            let w = input_tokens(cli)?;
            let lig = compile(&g, mode).map_err(|e| Failure::violation(e.to_string()))?;
            let ds = if cli.oracle {
                let oracle = Oracle::new(&g, mode, bounds(cli)?)
                    .map_err(|e| Failure::violation(e.to_string()))?;
                if let Some((position, token)) = w
                    .iter()
                    .enumerate()
                    .find(|(_, t)| !lig.terminals().contains(*t))
                {
                    return Err(lexical(ParseError::Lexical {
                        position,
                        token: token.clone(),
                    }));
                }
                oracle.derivations_for(&w)
            } else {
                let mut opts = ParseOptions::parsing();
                opts.max_derivation_nodes = cli.max_nodes;
                if cli.chart {
                    let chart = Chart::run(&lig, &w, opts).map_err(lexical)?;
                    eprint!("{}", chart.dump());
                }
                parse_with(&lig, &w, opts).map_err(lexical)?
            };
            print!("{}", render_classes(&g, &ds, cli.json)?);
            Ok(if ds.is_empty() { REJECT } else { ACCEPT })
        }
        Command::Derive => {
            let g = load_grammar(cli)?;
            let d = load_derivation(cli)?;
            let vs = violations(&d, &g, mode).map_err(|e| Failure::violation(e.to_string()))?;
            if !vs.is_empty() {
                let lines: Vec<String> = vs.iter().map(ToString::to_string).collect();
                return Err(Failure::violation(format!(
                    "not well formed in {mode} mode:\n{}",
                    lines.join("\n")
                )));
            }
            let t = derive(&d, &g).map_err(|e| Failure::violation(e.to_string()))?;
            let frontier = t
                .frontier_string()
                .map_err(|e| Failure::violation(e.to_string()))?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(
                        &json!({"derived": t.to_bracketed(), "frontier": frontier.join(" ")})
                    )
                    .expect("serializable")
                );
            } else {
                println!("{}", t.to_bracketed());
                println!("frontier: {}", sentence(&frontier));
            }
            Ok(ACCEPT)
        }
        Command::Enumerate => {
            let g = load_grammar(cli)?;
            let oracle = Oracle::new(&g, mode, bounds(cli)?)
                .map_err(|e| Failure::violation(e.to_string()))?;
            let lang = oracle.language();
            if cli.json {
                let v: Vec<String> = lang.iter().map(|w| w.join(" ")).collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("serializable")
                );
            } else {
                for w in &lang {
                    println!("{}", sentence(w));
                }
            }
            Ok(ACCEPT)
        }
        Command::Canon => {
            let d = load_derivation(cli)?;
            let c = canonicalize(&d);
            if cli.json {
                println!("{}", c.to_json());
            } else {
                println!("{c}");
            }
            Ok(ACCEPT)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
