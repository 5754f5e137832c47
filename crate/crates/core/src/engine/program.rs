use std::collections::HashMap;

use crate::grammar::{Backbone, RuleSchema};
use crate::term::{Node, Sym};

use super::Literal;

/// A definite clause over clause-local variables `0..nvars`.
#[derive(Clone, Debug)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub nvars: usize,
}

/// `:- block pred/N blocks [i, ...]`: the goal waits while every listed
/// (1-based) argument is an unbound variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecl {
    pub pred: Sym,
    pub arity: usize,
    pub watched: Vec<usize>,
}

/// A term over clause-local variables, instantiated afresh on every use.
#[derive(Clone, Debug)]
pub struct Template {
    pub node: Node,
    pub nvars: usize,
}

/// A lexical entry: the token sequence it covers and the clause
/// `lex(Category) :- Body` defining its category.
#[derive(Clone, Debug)]
pub struct LexEntry {
    pub tokens: Vec<Sym>,
    pub clause: Clause,
}

impl LexEntry {
    pub fn category(&self) -> &Node {
        &self.clause.head.args[0]
    }

    pub fn surface(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Loaded grammar: constraint clauses in source order, block declarations,
/// the lexicon, the target category, the enabled rule schemas and the
/// optional context-free backbone. Immutable once built.
#[derive(Clone, Debug)]
pub struct Program {
    clauses: HashMap<(Sym, usize), Vec<Clause>>,
    blocks: HashMap<(Sym, usize), BlockDecl>,
    pub lexicon: Vec<LexEntry>,
    pub target: Template,
    pub rules: Vec<RuleSchema>,
    pub backbone: Option<Backbone>,
}

impl Program {
    pub fn new(target: Template) -> Self {
        Program {
            clauses: HashMap::new(),
            blocks: HashMap::new(),
            lexicon: Vec::new(),
            target,
            rules: vec![RuleSchema::Ba, RuleSchema::Fa],
            backbone: None,
        }
    }

    pub fn add_clause(&mut self, clause: Clause) {
        let key = (clause.head.pred.clone(), clause.head.args.len());
        self.clauses.entry(key).or_default().push(clause);
    }

    pub fn add_block(&mut self, decl: BlockDecl) {
        self.blocks.insert((decl.pred.clone(), decl.arity), decl);
    }

    pub fn clauses(&self, pred: &str, arity: usize) -> &[Clause] {
        self.clauses
            .get(&(Sym::from(pred), arity))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn defines(&self, pred: &str, arity: usize) -> bool {
        self.clauses.contains_key(&(Sym::from(pred), arity))
    }

    pub fn block(&self, pred: &str, arity: usize) -> Option<&BlockDecl> {
        self.blocks.get(&(Sym::from(pred), arity))
    }

    pub fn blocks(&self) -> impl Iterator<Item = &BlockDecl> {
        self.blocks.values()
    }

    /// Predicates in a stable (sorted) order, with their clauses.
    pub fn predicates(&self) -> Vec<(&Sym, usize, &[Clause])> {
        let mut v: Vec<_> = self
            .clauses
            .iter()
            .map(|((p, n), cs)| (p, *n, cs.as_slice()))
            .collect();
        v.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        v
    }

    /// Remove every clause of a predicate. Used to build ablated grammars.
    pub fn retract_all(&mut self, pred: &str, arity: usize) -> Vec<Clause> {
        self.clauses
            .remove(&(Sym::from(pred), arity))
            .unwrap_or_default()
    }

    pub fn rule_enabled(&self, rule: RuleSchema) -> bool {
        self.rules.contains(&rule)
    }
}
