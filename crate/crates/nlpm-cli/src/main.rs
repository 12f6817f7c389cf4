use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nlpm::anpma::Pruning;
use nlpm::automaton::{Automaton, StateKind};
use nlpm::rename::{rename_all, ConsistencyPartition};
use nlpm::strategy::{self, Strategy, BUILTIN_NAMES};
use nlpm::textio::{export_dot, parse_pattern_file, parse_term, parse_terms, PatternFile};
use nlpm::universe::{enumerate, sample, DEFAULT_CAP};
use nlpm::{construct_anpma, construct_apma, construct_ca, remove_redundant, EvalTrace, Term};

mod bench;
mod check;

#[derive(Parser)]
#[command(
    name = "nlpm",
    version,
    about = "Build and run adaptive matching automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an automaton and print its size.
    Compile {
        #[command(flatten)]
        build: BuildArgs,
        /// Write the automaton as Graphviz DOT (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Evaluate an automaton on ground terms.
    Match {
        #[command(flatten)]
        build: BuildArgs,
        /// File with one ground term per line.
        terms: Option<PathBuf>,
        /// A ground term to match; may be repeated.
        #[arg(short = 't', long = "term", value_name = "TERM")]
        inline: Vec<String>,
        /// Print every evaluation step.
        #[arg(long)]
        trace: bool,
    },
    /// Compare automata against the brute-force matcher on a universe of
    /// ground terms.
    Check(check::CheckArgs),
    /// Compare the two-phase baseline with a pruned, interleaved automaton.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Apma,
    Ca,
    Anpma,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PruningArg {
    None,
    Basic,
    Aggressive,
}

impl From<PruningArg> for Pruning {
    fn from(p: PruningArg) -> Self {
        match p {
            PruningArg::None => Pruning::None,
            PruningArg::Basic => Pruning::Basic,
            PruningArg::Aggressive => Pruning::Aggressive,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    /// Pattern file.
    patterns: PathBuf,
    #[arg(long, value_enum, default_value = "anpma")]
    kind: KindArg,
    /// A builtin strategy name, or `scripted` for the file's script header.
    #[arg(long, default_value = "default")]
    strategy: String,
    /// For apma, anything but `none` skips variable-only positions; for
    /// ca, it removes redundant comparisons.
    #[arg(long, value_enum, default_value = "aggressive")]
    pruning: PruningArg,
}

/// Which ground terms to check or measure.
#[derive(Args)]
struct UniverseArgs {
    /// Largest term depth; constants have depth 0.
    #[arg(long, default_value_t = 3)]
    max_depth: u32,
    /// Comma-separated symbol names to build terms from (default: all).
    #[arg(long, value_delimiter = ',')]
    symbols: Vec<String>,
    /// Refuse exhaustive universes larger than this.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Sample random terms from this seed instead of enumerating.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled terms when `--seed` is given.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

fn load(path: &Path) -> Result<PatternFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pattern_file(&text).with_context(|| format!("parsing {}", path.display()))
}

fn strategy_for(name: &str, file: &PatternFile) -> Result<Box<dyn Strategy>> {
    if name == "scripted" {
        return match &file.script {
            Some(s) => Ok(Box::new(s.clone())),
            None => bail!("strategy `scripted` needs a `script:` line in the pattern file"),
        };
    }
    strategy::by_name(name).with_context(|| {
        format!(
            "unknown strategy `{name}`; expected scripted or one of {}",
            BUILTIN_NAMES.join(", ")
        )
    })
}

fn partitions(file: &PatternFile) -> Vec<(String, ConsistencyPartition)> {
    rename_all(&file.patterns)
        .into_iter()
        .map(|r| (r.label, r.partition))
        .collect()
}

fn build(
    file: &PatternFile,
    kind: KindArg,
    strategy: &dyn Strategy,
    pruning: Pruning,
) -> Result<Automaton> {
    Ok(match kind {
        KindArg::Apma => construct_apma(&file.patterns, strategy, pruning != Pruning::None)?,
        KindArg::Ca => {
            let m = construct_ca(&partitions(file), strategy)?;
            if pruning == Pruning::None {
                m
            } else {
                remove_redundant(&m)
            }
        }
        KindArg::Anpma => construct_anpma(&file.patterns, strategy, pruning)?,
    })
}

fn build_from_args(args: &BuildArgs) -> Result<(PatternFile, Automaton)> {
    let file = load(&args.patterns)?;
    let s = strategy_for(&args.strategy, &file)?;
    let m = build(&file, args.kind, s.as_ref(), args.pruning.into())?;
    Ok((file, m))
}

fn universe(file: &PatternFile, args: &UniverseArgs) -> Result<Vec<Term>> {
    let symbols = if args.symbols.is_empty() {
        file.signature.symbols().to_vec()
    } else {
        args.symbols
            .iter()
            .map(|n| {
                file.signature
                    .get(n)
                    .cloned()
                    .with_context(|| format!("symbol `{n}` is not declared"))
            })
            .collect::<Result<_>>()?
    };
    Ok(match args.seed {
        Some(seed) => sample(&symbols, args.max_depth, args.samples, seed)?,
        None => enumerate(&symbols, args.max_depth, args.cap)
            .map_err(|e| anyhow!("{e}; use --cap to raise the limit or --seed to sample"))?,
    })
}

fn label_list(m: &Automaton, set: &BTreeSet<usize>) -> String {
    if set.is_empty() {
        "(none)".into()
    } else {
        m.label_names(set).join(" ")
    }
}

fn print_trace(m: &Automaton, trace: &EvalTrace) {
    for (s, a) in &trace.steps {
        match m.state(*s) {
            StateKind::Match { pos, .. } => println!("  {s}: inspect {pos} -> {a}"),
            StateKind::Cons { pair, .. } => println!("  {s}: compare {pair} -> {a}"),
            StateKind::Final { .. } => {}
        }
    }
}

fn compile(args: &BuildArgs, dot: Option<&Path>) -> Result<()> {
    let (_, m) = build_from_args(args)?;
    if dot == Some(Path::new("-")) {
        print!("{}", export_dot(&m));
        return Ok(());
    }
    println!("states: {}", m.len());
    println!("breadth: {}", m.breadth());
    println!("max depth: {}", m.max_depth());
    if let Some(path) = dot {
        fs::write(path, export_dot(&m)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run_match(args: &BuildArgs, terms: Option<&Path>, inline: &[String], trace: bool) -> Result<()> {
    let (file, m) = build_from_args(args)?;
    let mut input = Vec::new();
    if let Some(path) = terms {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        input.extend(
            parse_terms(&file.signature, &text)
                .with_context(|| format!("parsing {}", path.display()))?,
        );
    }
    for t in inline {
        input.push(parse_term(&file.signature, t).with_context(|| format!("parsing `{t}`"))?);
    }
    if input.is_empty() {
        bail!("no terms given; pass a terms file or --term");
    }
    for t in &input {
        if !t.is_ground() {
            bail!("term `{t}` is not ground");
        }
    }
    for t in &input {
        let tr = m.eval(t).with_context(|| format!("evaluating `{t}`"))?;
        println!(
            "{t}: {} (steps {}, comparisons {}, inspections {})",
            label_list(&m, &tr.result),
            tr.len(),
            tr.comparisons(),
            tr.inspections()
        );
        if trace {
            print_trace(&m, &tr);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compile { build, dot } => compile(build, dot.as_deref()).map(|_| true),
        Command::Match {
            build,
            terms,
            inline,
            trace,
        } => run_match(build, terms.as_deref(), inline, *trace).map(|_| true),
        Command::Check(args) => check::run(args),
        Command::Bench(args) => bench::run(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
