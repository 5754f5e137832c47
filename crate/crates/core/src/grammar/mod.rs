//! Grammar files: parsing, validation, printing, and the two application
//! schemas shared by every parser.

mod print;
mod syntax;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{BlockDecl, Clause, LexEntry, Literal, Program, Template};
use crate::term::{Node, Path, Store, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSchema {
    /// `X/Y  Y  =>  X`
    Fa,
    /// `Y  Y\X  =>  X`
    Ba,
}

impl RuleSchema {
    pub fn name(self) -> &'static str {
        match self {
            RuleSchema::Fa => "fa",
            RuleSchema::Ba => "ba",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "fa" => Some(RuleSchema::Fa),
            "ba" => Some(RuleSchema::Ba),
            _ => None,
        }
    }

    pub fn dir(self) -> &'static str {
        match self {
            RuleSchema::Fa => "/",
            RuleSchema::Ba => "\\",
        }
    }

    /// Index of the functor daughter in a binary local tree.
    pub fn head_daughter(self) -> usize {
        match self {
            RuleSchema::Fa => 0,
            RuleSchema::Ba => 1,
        }
    }
}

impl fmt::Display for RuleSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackboneRule {
    pub lhs: Sym,
    pub rhs: Vec<Sym>,
    pub rule: RuleSchema,
}

/// Context-free approximation used by the forest parser.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Backbone {
    pub rules: Vec<BackboneRule>,
    /// Preterminal and the word sequence it covers.
    pub lexical: Vec<(Sym, Vec<Sym>)>,
    pub start: Option<Sym>,
}

impl Backbone {
    pub fn preterminals_for<'a>(&'a self, words: &'a [Sym]) -> impl Iterator<Item = &'a Sym> + 'a {
        self.lexical
            .iter()
            .filter(move |(_, w)| w.as_slice() == words)
            .map(|(p, _)| p)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}: target declared twice")]
    DuplicateTarget { line: usize },
    #[error("no ':- target' declaration")]
    MissingTarget,
    #[error("line {line}: bad block declaration: {msg}")]
    BadBlock { line: usize, msg: String },
    #[error("line {line}: bad backbone line: {msg}")]
    BadBackbone { line: usize, msg: String },
    #[error("line {line}: call to undefined predicate {pred}/{arity}")]
    UndefinedPredicate {
        line: usize,
        pred: String,
        arity: usize,
    },
    #[error("block declaration for undefined predicate {pred}/{arity}")]
    BlockUndefined { pred: String, arity: usize },
    #[error("backbone: {0}")]
    Backbone(String),
}

/// A parsed grammar file, before validation.
#[derive(Clone, Debug, Default)]
pub struct GrammarSource {
    pub target: Option<Template>,
    pub rules: Vec<RuleSchema>,
    pub blocks: Vec<BlockDecl>,
    pub clauses: Vec<Clause>,
    pub lexicon: Vec<LexEntry>,
    pub backbone: Option<Backbone>,
    clause_lines: Vec<usize>,
    lex_lines: Vec<usize>,
}

pub fn parse_grammar(text: &str) -> Result<GrammarSource, GrammarError> {
    syntax::parse(text)
}

/// Parse and validate in one go.
pub fn load_grammar(text: &str) -> Result<Program, GrammarError> {
    parse_grammar(text)?.into_program()
}

impl GrammarSource {
    pub fn to_text(&self) -> String {
        print::grammar_text(self)
    }

    pub fn into_program(self) -> Result<Program, GrammarError> {
        let target = self.target.clone().ok_or(GrammarError::MissingTarget)?;
        let defined: BTreeSet<(String, usize)> = self
            .clauses
            .iter()
            .map(|c| (c.head.pred.to_string(), c.head.arity()))
            .collect();
        let check = |lit: &Literal, line: usize| -> Result<(), GrammarError> {
            let builtin = matches!((&*lit.pred, lit.arity()), ("=", 2) | ("true", 0));
            if builtin || defined.contains(&(lit.pred.to_string(), lit.arity())) {
                Ok(())
            } else {
                Err(GrammarError::UndefinedPredicate {
                    line,
                    pred: lit.pred.to_string(),
                    arity: lit.arity(),
                })
            }
        };
        for (c, &line) in self.clauses.iter().zip(&self.clause_lines) {
            c.body.iter().try_for_each(|l| check(l, line))?;
        }
        for (e, &line) in self.lexicon.iter().zip(&self.lex_lines) {
            e.clause.body.iter().try_for_each(|l| check(l, line))?;
        }
        for b in &self.blocks {
            if !defined.contains(&(b.pred.to_string(), b.arity)) {
                return Err(GrammarError::BlockUndefined {
                    pred: b.pred.to_string(),
                    arity: b.arity,
                });
            }
        }
        if let Some(bb) = &self.backbone {
            validate_backbone_decl(bb)?;
        }
        let mut p = Program::new(target);
        if !self.rules.is_empty() {
            p.rules = self.rules;
        }
        self.blocks.into_iter().for_each(|b| p.add_block(b));
        self.clauses.into_iter().for_each(|c| p.add_clause(c));
        p.lexicon = self.lexicon;
        p.backbone = self.backbone;
        Ok(p)
    }
}

fn validate_backbone_decl(bb: &Backbone) -> Result<(), GrammarError> {
    let Some(start) = &bb.start else {
        return Err(GrammarError::Backbone("no start symbol".into()));
    };
    let known: BTreeSet<&Sym> = bb
        .rules
        .iter()
        .map(|r| &r.lhs)
        .chain(bb.lexical.iter().map(|(p, _)| p))
        .collect();
    if !known.contains(start) {
        return Err(GrammarError::Backbone(format!(
            "start symbol {start} has no rules"
        )));
    }
    for r in &bb.rules {
        if let Some(d) = r.rhs.iter().find(|d| !known.contains(d)) {
            return Err(GrammarError::Backbone(format!(
                "symbol {d} in {} -> ... is never defined",
                r.lhs
            )));
        }
    }
    Ok(())
}

/// Instantiate the target category with fresh variables.
pub fn expand_target(program: &Program, store: &mut Store) -> Node {
    let mut map = vec![None; program.target.nvars];
    store.instantiate(&program.target.node, &mut map)
}

/// Combine a functor with its argument under `rule`: the functor must be
/// `[val:V, dir:d, arg:A]` with `A` unifying with the argument; the result `V`
/// inherits the argument's `vc` and the functor's `sem`. Returns the result
/// node, or `None` with the store untouched. Goals woken by the bindings stay
/// queued for the caller to run.
pub fn apply_rule(
    rule: RuleSchema,
    functor: &Node,
    argument: &Node,
    store: &mut Store,
) -> Option<Node> {
    let cp = store.mark();
    let val = store.fresh();
    let frame = store.functor(val.clone(), rule.dir(), argument.clone());
    let vc = Path::new(&["vc"]);
    let sem = Path::new(&["sem"]);
    let ok = store.unify(functor, &frame)
        && share(store, &val, argument, &vc)
        && share(store, &val, functor, &sem);
    if ok {
        Some(val)
    } else {
        store.restore(cp);
        None
    }
}

fn share(store: &mut Store, a: &Node, b: &Node, path: &Path) -> bool {
    match (store.path_get(a, path), store.path_get(b, path)) {
        (Some(x), Some(y)) => store.unify(&x, &y),
        _ => false,
    }
}

#[cfg(test)]
mod tests;
