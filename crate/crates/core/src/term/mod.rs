//! Feature terms: variables, atoms, open records and compound terms.
//!
//! Terms are immutable once built. All instantiation happens through variable
//! bindings held in a [`Store`], so backtracking only has to pop bindings off
//! the trail. Records are open: every record carries a tail variable, and
//! adding features to a record binds its tail to a further record. Two record
//! nodes whose tail chains end in the same unbound variable denote the same
//! feature structure.

mod render;
mod store;

pub(crate) use render::atom_text;
pub use render::{render, render_compact, render_goal};
pub use store::{Checkpoint, Store, StoreError, SuspId, Suspension};

use std::fmt;
use std::sync::Arc;

/// Interned-by-value symbol used for atoms, functors, features and predicates.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// Store-scoped variable identifier. Ids are handed out monotonically and
/// never reused within a store.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub enum Node {
    Var(VarId),
    Atom(Sym),
    Record(Arc<Record>),
    Compound(Arc<Compound>),
}

/// An open attribute-value record. `features` is sorted by name and has no
/// duplicates; `tail` stands for the features not (yet) known.
#[derive(Clone, Debug)]
pub struct Record {
    pub features: Vec<(Sym, Node)>,
    pub tail: VarId,
}

#[derive(Clone, Debug)]
pub struct Compound {
    pub functor: Sym,
    pub args: Vec<Node>,
}

/// A sequence of feature names, e.g. `val arg agr`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path(pub Vec<Sym>);

impl Path {
    pub fn new(features: &[&str]) -> Self {
        Path(features.iter().map(|f| sym(f)).collect())
    }
}

/// Feature naming the category of an atomic (basic) category.
pub const CAT: &str = "cat";
/// Features making up a functor category.
pub const FUNCTOR_FEATURES: [&str; 3] = ["val", "dir", "arg"];

impl Node {
    pub fn atom(name: &str) -> Node {
        Node::Atom(sym(name))
    }

    pub fn compound(functor: &str, args: Vec<Node>) -> Node {
        Node::Compound(Arc::new(Compound {
            functor: sym(functor),
            args,
        }))
    }

    /// Build a record node. Features are sorted here; a later duplicate name
    /// replaces an earlier one.
    pub fn record(features: Vec<(Sym, Node)>, tail: VarId) -> Node {
        Node::Record(Arc::new(Record::new(features, tail)))
    }

    /// `^`, used for semantic abstraction and pairing.
    pub fn caret(left: Node, right: Node) -> Node {
        Node::compound("^", vec![left, right])
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self {
            Node::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Node::Var(_))
    }
}

impl Record {
    pub fn new(mut features: Vec<(Sym, Node)>, tail: VarId) -> Self {
        features.sort_by(|a, b| a.0.cmp(&b.0));
        let mut dedup: Vec<(Sym, Node)> = Vec::with_capacity(features.len());
        for (k, v) in features {
            match dedup.last_mut() {
                Some(last) if last.0 == k => last.1 = v,
                _ => dedup.push((k, v)),
            }
        }
        Record {
            features: dedup,
            tail,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Node> {
        self.features
            .binary_search_by(|(k, _)| (**k).cmp(name))
            .ok()
            .map(|i| &self.features[i].1)
    }
}

/// Basic categories carry `cat`; functor categories carry `val`/`dir`/`arg`.
/// A record may not be both.
pub(crate) fn sorts_compatible<'a>(names: impl IntoIterator<Item = &'a Sym>) -> bool {
    let mut basic = false;
    let mut functor = false;
    for n in names {
        if &**n == CAT {
            basic = true;
        } else if FUNCTOR_FEATURES.contains(&&**n) {
            functor = true;
        }
    }
    !(basic && functor)
}
