//! The `autgram` command line.
//!
//! Exit codes: 0 success, 1 validation mismatch, 2 usage or input error,
//! 3 precondition violation. Failures print one line `<kind>: <reason>` on
//! stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::annotate::{count_annotations, AnnotateError};
use crate::decomp::{
    compute_path_decomposition, compute_tree_decomposition, make_permutation_yielding,
    parse_pace, DecompError, Strategy, TreeDecomposition, DEFAULT_EXACT_CAP,
};
use crate::grammar::{
    build_aut_grammar, build_embedded_group_grammar, build_regular_aut_grammar, EmbedOptions,
    Grammar, GrammarError, InvarianceCheck,
};
use crate::graph::Graph;
use crate::oracle::{brute_force_automorphisms, OracleError, DEFAULT_ORACLE_CAP};
use crate::perm::{Permutation, Word};
use crate::polytope::{build_extended_formulation, check_lp_point, LpModel, PolytopeError};

#[derive(Debug, Parser)]
#[command(name = "autgram", version, about = "Automorphism groups of bounded-treewidth graphs as grammars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    MinFill,
    ExactSmall,
}

#[derive(Debug, clap::Args)]
struct DecompArgs {
    /// Tree decomposition in PACE `.td` format.
    #[arg(long, conflicts_with = "strategy")]
    td: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Use a path decomposition and the regular construction.
    #[arg(long)]
    path: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grammar for the automorphism group of a graph.
    Build {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        decomp: DecompArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grammar for a coset `beta ∘ Aut(g, [keep])` of the embedded group.
    Embed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        keep: usize,
        /// One-line permutation of `[keep]`, e.g. "2 1 3 4".
        #[arg(long)]
        beta: Option<String>,
        #[command(flatten)]
        decomp: DecompArgs,
        /// Skip the oracle invariance check of `[keep]`.
        #[arg(long)]
        unchecked: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rule count, variable count, size and regularity.
    Stats { grammar: PathBuf },
    /// List the language, one word per line.
    Enum {
        grammar: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Number of accepting parse trees.
    Count { grammar: PathBuf },
    /// Test a word for membership.
    Member {
        grammar: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Write the extended formulation as an LP file.
    Lift {
        grammar: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add the assignment-matrix projection `z_i_j`.
        #[arg(long)]
        matrix: bool,
    },
    /// Decide whether a point lies in the projected polytope. The model is a
    /// grammar JSON file or an LP file written by `lift`.
    Check {
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Cross-check the grammar of a graph against the brute-force oracle.
    Validate {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        decomp: DecompArgs,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u32,
    },
}

#[derive(Debug)]
enum Failure {
    Mismatch(String),
    Usage(String),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }

    fn line(&self) -> String {
        match self {
            Failure::Mismatch(r) => format!("mismatch: {r}"),
            Failure::Usage(r) => format!("usage: {r}"),
            Failure::Precondition(r) => format!("precondition: {r}"),
        }
    }
}

impl From<GrammarError> for Failure {
    fn from(e: GrammarError) -> Self {
        match e {
            GrammarError::Decomp(d) => d.into(),
            GrammarError::Annotate(a) => a.into(),
            GrammarError::Oracle(o) => o.into(),
            GrammarError::Json(_) | GrammarError::Malformed(_) | GrammarError::UndefinedTerminal(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<DecompError> for Failure {
    fn from(e: DecompError) -> Self {
        match e {
            DecompError::Pace { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<AnnotateError> for Failure {
    fn from(e: AnnotateError) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<PolytopeError> for Failure {
    fn from(e: PolytopeError) -> Self {
        match e {
            PolytopeError::Dimension { .. } | PolytopeError::LpParse { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = out.flush();
            eprintln!("{}", f.line());
            f.code()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    Graph::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    Grammar::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_word(text: &str) -> Result<Word, Failure> {
    text.parse().map_err(|e| Failure::Usage(format!("word: {e}")))
}

fn parse_point(text: &str) -> Result<Vec<BigRational>, Failure> {
    text.split_whitespace()
        .map(|t| t.parse::<BigRational>().map_err(|_| Failure::Usage(format!("point: bad coordinate `{t}`"))))
        .collect()
}

fn emit(out: &mut impl Write, text: std::fmt::Arguments) -> Result<(), Failure> {
    out.write_fmt(text).map_err(|e| Failure::Usage(format!("stdout: {e}")))
}

/// The decomposition selected by the flags: a path decomposition with
/// `--path`, otherwise a tree decomposition (made permutation yielding by
/// the caller as needed).
fn decomposition(g: &Graph, args: &DecompArgs) -> Result<TreeDecomposition, Failure> {
    if !g.is_connected() {
        return Err(DecompError::Disconnected.into());
    }
    if let Some(path) = &args.td {
        let td = parse_pace(&read(path)?)?;
        return Ok(td);
    }
    if args.path {
        return Ok(compute_path_decomposition(g, DEFAULT_EXACT_CAP)?);
    }
    let strategy = match args.strategy.unwrap_or(StrategyArg::MinFill) {
        StrategyArg::MinFill => Strategy::MinFill,
        StrategyArg::ExactSmall => Strategy::ExactSmall { cap: DEFAULT_EXACT_CAP },
    };
    Ok(compute_tree_decomposition(g, strategy)?)
}

fn build(g: &Graph, args: &DecompArgs) -> Result<crate::grammar::AutGrammar, Failure> {
    let td = decomposition(g, args)?;
    if args.path {
        Ok(build_regular_aut_grammar(g, &td)?)
    } else {
        let (yielding, _) = make_permutation_yielding(g, &td)?;
        Ok(build_aut_grammar(g, &yielding)?)
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Build { graph, decomp, out: dest } => {
            let g = load_graph(&graph)?;
            let built = build(&g, &decomp)?;
            write(&dest, &built.grammar.to_json())?;
            emit(out, format_args!("{}\n", built.alpha))
        }
        Command::Embed { graph, keep, beta, decomp, unchecked, oracle_cap, out: dest } => {
            let g = load_graph(&graph)?;
            let beta = match beta {
                Some(b) => b.parse::<Permutation>().map_err(|e| Failure::Usage(format!("beta: {e}")))?,
                None => Permutation::identity(keep),
            };
            let td = decomposition(&g, &decomp)?;
            let check = if unchecked {
                InvarianceCheck::Unchecked
            } else {
                InvarianceCheck::Oracle { cap: oracle_cap }
            };
            let built = build_embedded_group_grammar(
                &g,
                keep,
                &beta,
                &td,
                EmbedOptions { check, regular: decomp.path },
            )?;
            write(&dest, &built.grammar.to_json())?;
            emit(out, format_args!("{}\n", built.alpha))
        }
        Command::Stats { grammar } => {
            let gr = load_grammar(&grammar)?;
            emit(
                out,
                format_args!(
                    "rules {}\nvariables {}\nrule_symbols {}\nlog_base {}\nsize {:.6}\nregular {}\naccepts_empty {}\n",
                    gr.rules().len(),
                    gr.variable_count(),
                    gr.rule_symbol_count(),
                    gr.sigma_max() as usize + gr.variable_count(),
                    gr.size(),
                    gr.is_regular(),
                    gr.accepts_empty()
                ),
            )
        }
        Command::Enum { grammar, cap } => {
            let gr = load_grammar(&grammar)?;
            let listing = gr.enumerate_language(cap)?;
            for w in &listing.words {
                emit(out, format_args!("{w}\n"))?;
            }
            if listing.truncated {
                eprintln!("note: truncated at {} words", listing.words.len());
            }
            Ok(())
        }
        Command::Count { grammar } => {
            let gr = load_grammar(&grammar)?;
            emit(out, format_args!("{}\n", gr.count_parse_trees()?))
        }
        Command::Member { grammar, word } => {
            let gr = load_grammar(&grammar)?;
            let w = parse_word(&word)?;
            emit(out, format_args!("{}\n", gr.membership(&w)?))
        }
        Command::Lift { grammar, out: dest, matrix } => {
            let gr = load_grammar(&grammar)?;
            let ef = build_extended_formulation(&gr)?;
            let (text, warnings) = ef.emit_lp(matrix);
            for w in warnings {
                eprintln!("warning: {w}");
            }
            write(&dest, &text)?;
            let s = ef.stats();
            emit(
                out,
                format_args!(
                    "flow_variables {}\nflow_rows {}\nbound_rows {}\nprojection_rows {}\n",
                    s.flow_variables, s.flow_rows, s.bound_rows, s.projection_rows
                ),
            )
        }
        Command::Check { model, point } => {
            let text = read(&model)?;
            let x = parse_point(&point)?;
            let lp = if text.trim_start().starts_with('{') {
                let gr = Grammar::from_json(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", model.display())))?;
                build_extended_formulation(&gr)?.to_lp_model(false)
            } else {
                LpModel::parse(&text)?
            };
            let verdict = if check_lp_point(&lp, &x)? { "feasible" } else { "infeasible" };
            emit(out, format_args!("{verdict}\n"))
        }
        Command::Validate { graph, decomp, oracle_cap } => {
            let g = load_graph(&graph)?;
            validate(&g, &decomp, oracle_cap, out)
        }
    }
}

fn validate(g: &Graph, args: &DecompArgs, cap: u32, out: &mut impl Write) -> Result<(), Failure> {
    let aut = brute_force_automorphisms(g, cap)?;
    let built = build(g, args)?;
    let listing = built.grammar.enumerate_language(None)?;
    let mut expected: Vec<Word> = aut
        .iter()
        .map(|s| s.to_word().permute(&built.alpha).expect("same size"))
        .collect();
    expected.sort();
    let trees = built.grammar.count_parse_trees()?;
    let mut failures = Vec::new();

    emit(out, format_args!("automorphisms {}\n", aut.len()))?;
    emit(out, format_args!("language {} == {}\n", listing.words.len(), aut.len()))?;
    if listing.words != expected {
        failures.push("language differs from the oracle group");
    }
    emit(out, format_args!("parse_trees {} == {}\n", trees, listing.words.len()))?;
    if trees != listing.words.len().into() {
        failures.push("grammar is ambiguous");
    }
    if !args.path {
        let td = decomposition(g, args)?;
        let (yielding, _) = make_permutation_yielding(g, &td)?;
        let annotations = count_annotations(g, &yielding)?;
        emit(out, format_args!("annotations {} == {}\n", annotations, aut.len()))?;
        if annotations != aut.len().into() {
            failures.push("annotation count differs from the group order");
        }
    }
    if failures.is_empty() {
        emit(out, format_args!("ok\n"))
    } else {
        Err(Failure::Mismatch(failures.join("; ")))
    }
}
