//! Parsing: tokenization, lexical lookup, the two parsing strategies, and
//! derivation snapshots.

mod forest;
mod replay;
mod sr;

pub use forest::{cf_parse, recover, ForestItem, ItemRule};
pub use replay::{eager_replay, EagerReplay};

use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineError, Event, Flow, Outcome, Program, Solver};
use crate::grammar::{expand_target, RuleSchema};
use crate::term::{render, render_compact, sym, Node, Path, Store, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    ShiftReduce,
    Forest,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::ShiftReduce => "sr",
            Strategy::Forest => "forest",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("the forest strategy needs a grammar with a cfg backbone")]
    NoBackbone,
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub strategy: Strategy,
    pub depth_limit: usize,
    /// Record the event log of each accepted derivation.
    pub trace: bool,
    /// Stop after this many derivations (before deduplication).
    pub max_derivations: Option<usize>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            strategy: Strategy::ShiftReduce,
            depth_limit: crate::engine::DEFAULT_DEPTH_LIMIT,
            trace: false,
            max_derivations: None,
        }
    }
}

/// Lowercase, split on whitespace, drop sentence-final punctuation.
pub fn tokenize(sentence: &str) -> Result<Vec<Sym>, ParseError> {
    let lowered = sentence.to_lowercase();
    let trimmed = lowered.trim().trim_end_matches(['.', '!', '?', ',', ';']);
    let toks: Vec<Sym> = trimmed
        .split_whitespace()
        .map(|w| sym(w.trim_end_matches(',')))
        .filter(|w| !w.is_empty())
        .collect();
    if toks.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    Ok(toks)
}

/// A lexical entry covering `[from, to)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexMatch {
    pub from: usize,
    pub to: usize,
    pub entry: usize,
}

pub fn lex_matches(program: &Program, words: &[Sym]) -> Vec<LexMatch> {
    let mut out = Vec::new();
    for from in 0..words.len() {
        for (entry, e) in program.lexicon.iter().enumerate() {
            let to = from + e.tokens.len();
            if to <= words.len() && words[from..to] == e.tokens[..] {
                out.push(LexMatch { from, to, entry });
            }
        }
    }
    out
}

/// Words not covered by any lexical entry, with their positions.
pub fn unknown_words(program: &Program, words: &[Sym]) -> Vec<(usize, Sym)> {
    let mut covered = vec![false; words.len()];
    for m in lex_matches(program, words) {
        covered[m.from..m.to].iter_mut().for_each(|c| *c = true);
    }
    covered
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(i, _)| (i, words[i].clone()))
        .collect()
}

/// Lexical edge as seen after instantiation, for diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct LexicalEdge {
    pub from: usize,
    pub to: usize,
    pub words: String,
    pub category: String,
    pub suspended: Vec<String>,
    /// Number of solutions of the entry's body.
    pub solutions: usize,
}

/// Instantiate every matching entry and report the category and the goals
/// left waiting after the first solution of its body.
pub fn lexical_edges(program: &Program, words: &[Sym]) -> Result<Vec<LexicalEdge>, EngineError> {
    let mut out = Vec::new();
    for m in lex_matches(program, words) {
        let mut solver = Solver::new(program, Store::new());
        let entry = &program.lexicon[m.entry];
        let (cat, body) = instantiate_entry(&mut solver, m.entry);
        let first = out.len();
        let mut solutions = 0;
        solver.solve(&body, &mut |s| {
            solutions += 1;
            if solutions > 1 {
                return Ok(Flow::Continue);
            }
            out.push(LexicalEdge {
                from: m.from,
                to: m.to,
                words: entry.surface(),
                category: render_compact(&cat, &s.store),
                suspended: s
                    .store
                    .residual()
                    .iter()
                    .map(|r| crate::term::render_goal(&r.goal, &s.store))
                    .collect(),
                solutions: 0,
            });
            Ok(Flow::Continue)
        })?;
        if let Some(e) = out.get_mut(first) {
            e.solutions = solutions;
        }
    }
    Ok(out)
}

/// Fresh copy of a lexical entry: its category and body goals.
pub fn instantiate_entry(
    solver: &mut Solver<'_>,
    entry: usize,
) -> (Node, Vec<crate::engine::Literal>) {
    let clause = &solver.program.lexicon[entry].clause;
    let mut map = vec![None; clause.nvars];
    let cat = solver.store.instantiate(&clause.head.args[0], &mut map);
    let body = clause
        .body
        .iter()
        .map(|l| crate::engine::Literal {
            pred: l.pred.clone(),
            args: l
                .args
                .iter()
                .map(|a| solver.store.instantiate(a, &mut map))
                .collect(),
        })
        .collect();
    (cat, body)
}

/// Derivation skeleton built during search; categories are live nodes.
#[derive(Debug)]
pub(crate) enum Skel {
    Leaf {
        m: LexMatch,
        cat: Node,
    },
    Node {
        rule: RuleSchema,
        from: usize,
        mid: usize,
        to: usize,
        cat: Node,
        left: Rc<Skel>,
        right: Rc<Skel>,
    },
}

impl Skel {
    pub(crate) fn cat(&self) -> &Node {
        match self {
            Skel::Leaf { cat, .. } | Skel::Node { cat, .. } => cat,
        }
    }

    pub(crate) fn span(&self) -> (usize, usize) {
        match self {
            Skel::Leaf { m, .. } => (m.from, m.to),
            Skel::Node { from, to, .. } => (*from, *to),
        }
    }
}

/// The bracketing of a derivation without categories.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Lex {
        from: usize,
        to: usize,
        entry: usize,
    },
    Rule {
        rule: RuleSchema,
        from: usize,
        mid: usize,
        to: usize,
        children: Vec<Shape>,
    },
}

impl Shape {
    pub fn span(&self) -> (usize, usize) {
        match self {
            Shape::Lex { from, to, .. } | Shape::Rule { from, to, .. } => (*from, *to),
        }
    }
}

/// Owned derivation tree with categories rendered in the accepted state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivNode {
    pub rule: String,
    pub from: usize,
    pub to: usize,
    pub category: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub words: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DerivNode>,
}

impl DerivNode {
    fn write(&self, depth: usize, out: &mut String) {
        use fmt::Write;
        let pad = "  ".repeat(depth);
        match &self.words {
            Some(w) => writeln!(
                out,
                "{pad}{} [{},{}) {}  \"{w}\"",
                self.rule, self.from, self.to, self.category
            ),
            None => writeln!(
                out,
                "{pad}{} [{},{}) {}",
                self.rule, self.from, self.to, self.category
            ),
        }
        .unwrap();
        for c in &self.children {
            c.write(depth + 1, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub tree: DerivNode,
    pub shape: Shape,
    /// Canonical render of the root's `sem` value.
    pub sem: String,
    pub residuals_forced: usize,
    /// Suspended goals still open after forcing; zero for every accepted parse.
    #[serde(skip)]
    pub residuals_left: usize,
    #[serde(skip)]
    pub events: Vec<Event>,
}

impl Derivation {
    /// `rule [from,to) category` lines, children indented, then `sem: ...`.
    pub fn text(&self) -> String {
        let mut out = String::new();
        self.tree.write(0, &mut out);
        out.push_str("sem: ");
        out.push_str(&self.sem);
        out.push('\n');
        out
    }

    pub fn key(&self) -> (String, String) {
        let mut t = String::new();
        self.tree.write(0, &mut t);
        (t, self.sem.clone())
    }
}

fn snapshot_node(skel: &Skel, program: &Program, store: &Store) -> DerivNode {
    match skel {
        Skel::Leaf { m, cat } => DerivNode {
            rule: "lex".into(),
            from: m.from,
            to: m.to,
            category: render_compact(cat, store),
            words: Some(program.lexicon[m.entry].surface()),
            children: Vec::new(),
        },
        Skel::Node {
            rule,
            from,
            to,
            cat,
            left,
            right,
            ..
        } => DerivNode {
            rule: rule.name().into(),
            from: *from,
            to: *to,
            category: render_compact(cat, store),
            words: None,
            children: vec![
                snapshot_node(left, program, store),
                snapshot_node(right, program, store),
            ],
        },
    }
}

pub(crate) fn shape_of(skel: &Skel) -> Shape {
    match skel {
        Skel::Leaf { m, .. } => Shape::Lex {
            from: m.from,
            to: m.to,
            entry: m.entry,
        },
        Skel::Node {
            rule,
            from,
            mid,
            to,
            left,
            right,
            ..
        } => Shape::Rule {
            rule: *rule,
            from: *from,
            mid: *mid,
            to: *to,
            children: vec![shape_of(left), shape_of(right)],
        },
    }
}

pub(crate) fn sem_of(root: &Node, store: &mut Store) -> String {
    match store.path_get(root, &Path::new(&["sem"])) {
        Some(s) => render(&s, store),
        None => "_".into(),
    }
}

/// Shared by both strategies: output collection and the acceptance step.
pub(crate) struct Collector<'w> {
    pub words: &'w [Sym],
    pub out: Vec<Derivation>,
    pub limit: Option<usize>,
}

impl Collector<'_> {
    /// Unify the root with the target, run pending wakes, force whatever is
    /// still suspended, and record the derivation.
    pub(crate) fn accept(&mut self, solver: &mut Solver<'_>, root: &Rc<Skel>) -> Outcome {
        let cp = solver.store.mark();
        let target = expand_target(solver.program, &mut solver.store);
        if !solver.store.unify(root.cat(), &target) {
            solver.store.restore(cp);
            return Ok(Flow::Continue);
        }
        let flow = solver.settle(&mut |s| {
            let pending = s.store.residual_count();
            s.force_residual(&mut |s| {
                if s.store.logging() {
                    s.store.log(Event::Accept);
                }
                let sem = sem_of(root.cat(), &mut s.store);
                let tree = snapshot_node(root, s.program, &s.store);
                self.out.push(Derivation {
                    tree,
                    shape: shape_of(root),
                    sem,
                    residuals_forced: pending,
                    residuals_left: s.store.residual_count(),
                    events: s.store.events().to_vec(),
                });
                match self.limit {
                    Some(n) if self.out.len() >= n => Ok(Flow::Stop),
                    _ => Ok(Flow::Continue),
                }
            })
        });
        solver.store.restore(cp);
        flow
    }
}

/// Drop derivations identical in tree and reading, keeping the first.
pub fn dedup(derivs: Vec<Derivation>) -> Vec<Derivation> {
    let mut seen = HashSet::new();
    derivs
        .into_iter()
        .filter(|d| seen.insert(d.key()))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ParseResult {
    pub sentence: String,
    pub words: Vec<Sym>,
    pub strategy: Strategy,
    pub derivations: Vec<Derivation>,
    pub unknown: Vec<(usize, Sym)>,
    pub elapsed_ms: f64,
}

impl ParseResult {
    pub fn grammatical(&self) -> bool {
        !self.derivations.is_empty()
    }

    /// Distinct readings in order of first derivation.
    pub fn readings(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.derivations
            .iter()
            .map(|d| d.sem.as_str())
            .filter(|s| seen.insert(*s))
            .collect()
    }

    pub fn residuals_forced(&self) -> usize {
        self.derivations.iter().map(|d| d.residuals_forced).sum()
    }

    /// Sorted (tree, reading) pairs, for comparing strategies.
    pub fn signature(&self) -> Vec<(String, String)> {
        let mut v: Vec<_> = self.derivations.iter().map(Derivation::key).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn report(&self) -> ParseReport {
        ParseReport {
            sentence: self.sentence.clone(),
            grammatical: self.grammatical(),
            derivation_count: self.derivations.len(),
            readings: self
                .derivations
                .iter()
                .map(|d| ReadingReport {
                    tree: d.tree.clone(),
                    sem: d.sem.clone(),
                })
                .collect(),
            residuals_forced: self.residuals_forced(),
            strategy: self.strategy,
            elapsed_ms: self.elapsed_ms,
        }
    }
}

/// JSON shape of one parse.
#[derive(Clone, Debug, Serialize)]
pub struct ParseReport {
    pub sentence: String,
    pub grammatical: bool,
    pub derivation_count: usize,
    pub readings: Vec<ReadingReport>,
    pub residuals_forced: usize,
    pub strategy: Strategy,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReadingReport {
    pub tree: DerivNode,
    pub sem: String,
}

/// Parse a sentence with the given options.
pub fn parse(
    program: &Program,
    sentence: &str,
    opts: &ParseOptions,
) -> Result<ParseResult, ParseError> {
    let words = tokenize(sentence)?;
    parse_words(program, &words, opts).map(|mut r| {
        r.sentence = sentence.trim().to_string();
        r
    })
}

pub fn parse_words(
    program: &Program,
    words: &[Sym],
    opts: &ParseOptions,
) -> Result<ParseResult, ParseError> {
    if words.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let start = Instant::now();
    let unknown = unknown_words(program, words);
    let derivations = if unknown.is_empty() {
        let store = if opts.trace {
            Store::with_event_log()
        } else {
            Store::new()
        };
        let mut solver = Solver::new(program, store).with_depth_limit(opts.depth_limit);
        let mut col = Collector {
            words,
            out: Vec::new(),
            limit: opts.max_derivations,
        };
        match opts.strategy {
            Strategy::ShiftReduce => sr::sr_parse(&mut solver, &mut col)?,
            Strategy::Forest => {
                let bb = program.backbone.as_ref().ok_or(ParseError::NoBackbone)?;
                let items = cf_parse(bb, words);
                forest::recover_into(&mut solver, bb, &items, &mut col)?;
            }
        }
        dedup(col.out)
    } else {
        Vec::new()
    };
    Ok(ParseResult {
        sentence: words.join(" "),
        words: words.to_vec(),
        strategy: opts.strategy,
        derivations,
        unknown,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

/// Every shift-reduce derivation's bracketing must be licensed by the
/// backbone forest. Returns the offending shapes.
pub fn validate_backbone(program: &Program, words: &[Sym], derivs: &[Derivation]) -> Vec<Shape> {
    let Some(bb) = &program.backbone else {
        return derivs.iter().map(|d| d.shape.clone()).collect();
    };
    let items = cf_parse(bb, words);
    derivs
        .iter()
        .filter(|d| !forest::licensed(&items, &d.shape))
        .map(|d| d.shape.clone())
        .collect()
}

#[cfg(test)]
mod tests;
