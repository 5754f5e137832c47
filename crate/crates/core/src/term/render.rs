//! Canonical text for terms.
//!
//! Features print in name order. A record or variable reached more than once
//! gets a tag (`#1=[...]` on first sight, `#1` afterwards) numbered in
//! left-to-right order of first occurrence, so alpha-equivalent terms print
//! identically. A feature whose value is an unbound variable occurring nowhere
//! else in the printed term says nothing in an open record and is left out
//! (except for the category-defining features `cat`, `val`, `dir`, `arg`).
//! Records made of `val`/`dir`/`arg` (plus optionally `sem` and `vc`) with a
//! slash direction print as `Arg\Val` or `Val/Arg`.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Node, Store, VarId, CAT, FUNCTOR_FEATURES};
use crate::engine::Literal;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Var(VarId),
    Rec(VarId),
}

struct Renderer<'s> {
    store: &'s Store,
    compact: bool,
    counts: HashMap<Key, usize>,
    tags: HashMap<Key, usize>,
}

pub fn render(n: &Node, s: &Store) -> String {
    let mut r = Renderer::new(s, false);
    r.count(n);
    let mut out = String::new();
    r.print(n, false, &mut out);
    out
}

/// Like [`render`] but atomic categories print as `np` / `np[case:nom]`.
pub fn render_compact(n: &Node, s: &Store) -> String {
    let mut r = Renderer::new(s, true);
    r.count(n);
    let mut out = String::new();
    r.print(n, false, &mut out);
    out
}

pub fn render_goal(goal: &Literal, s: &Store) -> String {
    let mut r = Renderer::new(s, true);
    for a in &goal.args {
        r.count(a);
    }
    let mut out = goal.pred.to_string();
    if !goal.args.is_empty() {
        out.push('(');
        for (i, a) in goal.args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            r.print(a, false, &mut out);
        }
        out.push(')');
    }
    out
}

pub(crate) fn atom_text(name: &str, quote: bool) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain || !quote {
        name.to_string()
    } else {
        format!("'{name}'")
    }
}

impl<'s> Renderer<'s> {
    fn new(store: &'s Store, compact: bool) -> Self {
        Renderer {
            store,
            compact,
            counts: HashMap::new(),
            tags: HashMap::new(),
        }
    }

    fn count(&mut self, n: &Node) {
        match self.store.deref(n) {
            Node::Var(v) => *self.counts.entry(Key::Var(v)).or_default() += 1,
            Node::Atom(_) => {}
            Node::Compound(c) => c.args.iter().for_each(|a| self.count(a)),
            Node::Record(r) => {
                let (feats, tail) = self.store.record_view(&r);
                let c = self.counts.entry(Key::Rec(tail)).or_default();
                *c += 1;
                if *c == 1 {
                    feats.iter().for_each(|(_, v)| self.count(v));
                }
            }
        }
    }

    fn shared(&self, k: Key) -> bool {
        self.counts.get(&k).copied().unwrap_or(0) > 1
    }

    /// Returns the tag and whether this is its first use.
    fn tag(&mut self, k: Key) -> (usize, bool) {
        let next = self.tags.len() + 1;
        match self.tags.get(&k) {
            Some(t) => (*t, false),
            None => {
                self.tags.insert(k, next);
                (next, true)
            }
        }
    }

    fn omitted(&self, name: &str, value: &Node) -> bool {
        if name == CAT || FUNCTOR_FEATURES.contains(&name) {
            return false;
        }
        match self.store.deref(value) {
            Node::Var(v) => !self.shared(Key::Var(v)),
            _ => false,
        }
    }

    fn print(&mut self, n: &Node, nested: bool, out: &mut String) {
        match self.store.deref(n) {
            Node::Var(v) => {
                if self.shared(Key::Var(v)) {
                    let (t, _) = self.tag(Key::Var(v));
                    write!(out, "#{t}").unwrap();
                } else {
                    out.push('_');
                }
            }
            Node::Atom(a) => out.push_str(&atom_text(&a, !self.compact)),
            Node::Compound(c) => {
                if &*c.functor == "^" && c.args.len() == 2 {
                    let left_caret = matches!(
                        self.store.deref(&c.args[0]),
                        Node::Compound(ref l) if &*l.functor == "^" && l.args.len() == 2
                    );
                    if left_caret {
                        out.push('(');
                    }
                    self.print(&c.args[0], false, out);
                    if left_caret {
                        out.push(')');
                    }
                    out.push('^');
                    self.print(&c.args[1], false, out);
                } else {
                    out.push_str(&atom_text(&c.functor, !self.compact));
                    out.push('(');
                    for (i, a) in c.args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.print(a, false, out);
                    }
                    out.push(')');
                }
            }
            Node::Record(r) => {
                let (feats, tail) = self.store.record_view(&r);
                let key = Key::Rec(tail);
                if self.shared(key) {
                    let (t, first) = self.tag(key);
                    write!(out, "#{t}").unwrap();
                    if !first {
                        return;
                    }
                    out.push('=');
                }
                let visible: Vec<_> = feats
                    .into_iter()
                    .filter(|(k, v)| !self.omitted(k, v))
                    .collect();
                self.print_record(&visible, nested, out);
            }
        }
    }

    fn print_record(&mut self, feats: &[(super::Sym, Node)], nested: bool, out: &mut String) {
        let get = |name: &str| feats.iter().find(|(k, _)| &**k == name).map(|(_, v)| v);
        let slash = match get("dir").map(|d| self.store.deref(d)) {
            Some(Node::Atom(d)) if &*d == "/" || &*d == "\\" => Some(d),
            _ => None,
        };
        let shorthand = slash.is_some()
            && get("val").is_some()
            && get("arg").is_some()
            && feats
                .iter()
                .all(|(k, _)| matches!(&**k, "val" | "dir" | "arg" | "sem" | "vc"));
        if shorthand {
            let extras: Vec<_> = feats
                .iter()
                .filter(|(k, _)| matches!(&**k, "sem" | "vc"))
                .cloned()
                .collect();
            let paren = nested || !extras.is_empty();
            if paren {
                out.push('(');
            }
            let (val, arg) = (get("val").unwrap().clone(), get("arg").unwrap().clone());
            if &*slash.unwrap() == "/" {
                self.print(&val, true, out);
                out.push('/');
                self.print(&arg, true, out);
            } else {
                self.print(&arg, true, out);
                out.push('\\');
                self.print(&val, true, out);
            }
            if paren {
                out.push(')');
            }
            if !extras.is_empty() {
                self.print_features(&extras, out);
            }
            return;
        }
        if self.compact {
            if let Some(Node::Atom(cat)) = get(CAT).map(|c| self.store.deref(c)) {
                out.push_str(&atom_text(&cat, false));
                let rest: Vec<_> = feats.iter().filter(|(k, _)| &**k != CAT).cloned().collect();
                if !rest.is_empty() {
                    self.print_features(&rest, out);
                }
                return;
            }
        }
        self.print_features(feats, out);
    }

    fn print_features(&mut self, feats: &[(super::Sym, Node)], out: &mut String) {
        out.push('[');
        for (i, (k, v)) in feats.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(k);
            out.push(':');
            self.print(v, false, out);
        }
        out.push(']');
    }
}
