use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cug_core::fragments::{fragment_corpus, fragment_names, load_fragment, parse_corpus};
use cug_core::parser::{lexical_edges, tokenize};
use cug_core::{
    load_grammar, parse_grammar, CorpusItem, ParseOptions, ParseResult, Program, Strategy,
};

mod judge;

#[derive(Parser)]
#[command(
    name = "cug",
    version,
    about = "Parse with categorial unification grammars"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one sentence and print its derivations and readings.
    Parse(ParseArgs),
    /// Run a judgment corpus and compare against its annotations.
    Judge(JudgeArgs),
    /// Print the constraint evaluation log of the first accepted parse.
    Explain(ExplainArgs),
    /// Time both strategies on a corpus.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GrammarArgs {
    /// Grammar file.
    #[arg(long, conflicts_with = "fragment")]
    grammar: Option<String>,
    /// Bundled fragment (english-agreement, dutch-core).
    #[arg(long)]
    fragment: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Sr,
    Forest,
    Both,
}

impl StrategyArg {
    fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategyArg::Sr => vec![Strategy::ShiftReduce],
            StrategyArg::Forest => vec![Strategy::Forest],
            StrategyArg::Both => vec![Strategy::ShiftReduce, Strategy::Forest],
        }
    }
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    #[arg(long, value_enum, default_value = "sr")]
    strategy: StrategyArg,
    /// One JSON document per strategy run.
    #[arg(long)]
    json: bool,
    /// Stop after this many derivations.
    #[arg(long)]
    max_solutions: Option<usize>,
    /// Add a lexical entry with a completely open category for this word.
    #[arg(long)]
    open_word: Vec<String>,
    sentence: String,
}

#[derive(Args)]
struct JudgeArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    /// Corpus file; defaults to the fragment's own corpus.
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long, value_enum, default_value = "sr")]
    strategy: StrategyArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    #[arg(long, value_enum, default_value = "sr")]
    strategy: StrategyArg,
    #[arg(long)]
    open_word: Vec<String>,
    sentence: String,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long, default_value_t = 10)]
    repeat: usize,
}

/// Failure reported on stderr with exit code 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Judge(a) => judge::cmd_judge(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("cug: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(g: &GrammarArgs) -> Result<Program, Fatal> {
    match (&g.grammar, &g.fragment) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Fatal(format!("{path}: {e}")))?;
            load_grammar(&text).map_err(|e| Fatal(format!("{path}: {e}")))
        }
        (None, Some(name)) => Ok(load_fragment(name)?),
        (None, None) => Err(Fatal(format!(
            "give --grammar <file> or --fragment <{}>",
            fragment_names().join("|")
        ))),
    }
}

fn corpus(g: &GrammarArgs, path: &Option<String>) -> Result<Vec<CorpusItem>, Fatal> {
    match (path, &g.fragment) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| Fatal(format!("{p}: {e}")))?;
            parse_corpus(&text).map_err(|e| Fatal(format!("{p}: {e}")))
        }
        (None, Some(name)) => Ok(fragment_corpus(name)?),
        (None, None) => Err(Fatal("give --corpus <file> for a grammar file".into())),
    }
}

fn add_open_words(program: &mut Program, words: &[String]) -> Result<(), Fatal> {
    for w in words {
        if w.contains(['\'', '\\']) {
            return Err(Fatal(format!(
                "--open-word {w:?}: quotes and backslashes are not allowed"
            )));
        }
        let src = format!(":- target S.\nlex(['{w}'], X).\n");
        program.lexicon.extend(parse_grammar(&src)?.lexicon);
    }
    Ok(())
}

fn options(strategy: Strategy) -> Result<ParseOptions, Fatal> {
    let mut o = ParseOptions {
        strategy,
        ..ParseOptions::default()
    };
    if let Ok(v) = std::env::var("CUG_DEPTH_LIMIT") {
        o.depth_limit = v
            .trim()
            .parse()
            .map_err(|_| Fatal(format!("CUG_DEPTH_LIMIT must be a number, got {v:?}")))?;
    }
    Ok(o)
}

/// Parse, turning unknown words into an error.
fn run(program: &Program, sentence: &str, opts: &ParseOptions) -> Result<ParseResult, Fatal> {
    let r = cug_core::parse(program, sentence, opts)?;
    if !r.unknown.is_empty() {
        let ws: Vec<String> = r
            .unknown
            .iter()
            .map(|(i, w)| format!("'{w}' at {i}"))
            .collect();
        return Err(Fatal(format!("unknown word: {}", ws.join(", "))));
    }
    Ok(r)
}

fn print_result(r: &ParseResult, out: &mut impl Write) -> std::io::Result<()> {
    let readings = r.readings().len();
    writeln!(
        out,
        "{}: {} derivation(s), {} reading(s) [{}, {:.2} ms]",
        r.sentence,
        r.derivations.len(),
        readings,
        r.strategy,
        r.elapsed_ms
    )?;
    for (i, d) in r.derivations.iter().enumerate() {
        writeln!(out, "\n# derivation {}", i + 1)?;
        write!(out, "{}", d.text())?;
    }
    Ok(())
}

fn cmd_parse(a: ParseArgs) -> Result<u8, Fatal> {
    let mut program = load(&a.grammar)?;
    add_open_words(&mut program, &a.open_word)?;
    let mut any = false;
    let mut out = std::io::stdout().lock();
    for s in a.strategy.strategies() {
        let mut opts = options(s)?;
        opts.max_derivations = a.max_solutions;
        let r = run(&program, &a.sentence, &opts)?;
        any |= r.grammatical();
        if a.json {
            writeln!(out, "{}", serde_json::to_string(&r.report())?)?;
        } else {
            print_result(&r, &mut out)?;
        }
    }
    Ok(if any { 0 } else { 1 })
}

fn cmd_explain(a: ExplainArgs) -> Result<u8, Fatal> {
    let mut program = load(&a.grammar)?;
    add_open_words(&mut program, &a.open_word)?;
    let strategy = match a.strategy {
        StrategyArg::Forest => Strategy::Forest,
        _ => Strategy::ShiftReduce,
    };
    let mut opts = options(strategy)?;
    opts.trace = true;
    opts.max_derivations = Some(1);
    let r = run(&program, &a.sentence, &opts)?;
    let mut out = std::io::stdout().lock();
    match r.derivations.first() {
        Some(d) => {
            for e in &d.events {
                writeln!(out, "{e}")?;
            }
            let wakes = d.events.iter().filter(|e| e.is_wake()).count();
            writeln!(out, "\n{wakes} wake event(s)")?;
            write!(out, "{}", d.text())?;
            Ok(0)
        }
        None => {
            // nothing accepted: show what lexical lookup produced
            let words = tokenize(&a.sentence)?;
            for e in lexical_edges(&program, &words)? {
                writeln!(
                    out,
                    "shift   [{},{}) {} {}",
                    e.from, e.to, e.words, e.category
                )?;
                for g in &e.suspended {
                    writeln!(out, "suspend {g}")?;
                }
            }
            writeln!(out, "no accepted parse")?;
            Ok(1)
        }
    }
}

fn cmd_bench(a: BenchArgs) -> Result<u8, Fatal> {
    if a.repeat == 0 {
        return Err(Fatal("--repeat must be at least 1".into()));
    }
    let program = load(&a.grammar)?;
    let items = corpus(&a.grammar, &a.corpus)?;
    let strategies = [Strategy::ShiftReduce, Strategy::Forest];
    let mut totals = [0.0f64; 2];
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "{:<50} {:>12} {:>12}",
        "sentence", "sr ms", "forest ms"
    )?;
    for item in &items {
        let mut row = [0.0f64; 2];
        for (k, s) in strategies.iter().enumerate() {
            let opts = options(*s)?;
            let start = Instant::now();
            for _ in 0..a.repeat {
                run(&program, &item.sentence, &opts)?;
            }
            row[k] = start.elapsed().as_secs_f64() * 1000.0;
            totals[k] += row[k];
        }
        writeln!(
            out,
            "{:<50} {:>12.3} {:>12.3}",
            item.sentence, row[0], row[1]
        )?;
    }
    writeln!(
        out,
        "{:<50} {:>12.3} {:>12.3}",
        format!("total ({} runs each)", a.repeat),
        totals[0],
        totals[1]
    )?;
    Ok(0)
}
