//! Categorial unification grammar engine.
//!
//! Categories are open feature records; lexical entries are definite clauses
//! whose bodies may delay on unbound variables. Syntax uses only forward and
//! backward application. Two parsers share the same constraint layer: a
//! shift-reduce parser and a forest parser that first builds a context-free
//! backbone and then recovers full categories head-first.

pub mod engine;
pub mod fragments;
pub mod grammar;
pub mod parser;
pub mod term;

pub use engine::{
    BlockDecl, Clause, EngineError, Event, Flow, LexEntry, Literal, Outcome, Program, Solver,
    Template,
};
pub use fragments::{load_fragment, CorpusItem};
pub use grammar::{
    apply_rule, expand_target, load_grammar, parse_grammar, Backbone, GrammarError, GrammarSource,
    RuleSchema,
};
pub use parser::{parse, Derivation, ParseOptions, ParseResult, Strategy};
pub use term::{render, render_compact, sym, Node, Path, Store, Sym, VarId};
