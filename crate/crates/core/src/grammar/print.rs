//! Grammar source printer. Output parses back to an equivalent grammar.

use std::collections::HashMap;
use std::fmt::Write;

use super::GrammarSource;
use crate::engine::Literal;
use crate::term::{atom_text, Node};

/// Clause-local variable numbering in order of first appearance.
type Namer = HashMap<u32, usize>;

fn slash_parts(n: &Node) -> Option<(&Node, &str, &Node)> {
    let Node::Record(r) = n else { return None };
    if r.features.len() != 3 {
        return None;
    }
    match (r.get("val"), r.get("dir"), r.get("arg")) {
        (Some(v), Some(Node::Atom(d)), Some(a)) if &**d == "/" || &**d == "\\" => Some((v, d, a)),
        _ => None,
    }
}

fn primary(n: &Node, nm: &mut Namer, out: &mut String) {
    let simple = match n {
        Node::Compound(c) => &*c.functor != "^",
        Node::Record(_) => slash_parts(n).is_none(),
        _ => true,
    };
    if simple {
        term(n, nm, out);
    } else {
        out.push('(');
        term(n, nm, out);
        out.push(')');
    }
}

pub(super) fn term(n: &Node, nm: &mut Namer, out: &mut String) {
    match n {
        Node::Var(v) => {
            let next = nm.len();
            let k = *nm.entry(v.0).or_insert(next);
            write!(out, "V{k}").unwrap()
        }
        Node::Atom(a) => out.push_str(&atom_text(a, true)),
        Node::Compound(c) if &*c.functor == "^" && c.args.len() == 2 => {
            if matches!(&c.args[0], Node::Compound(l) if &*l.functor == "^") {
                out.push('(');
                term(&c.args[0], nm, out);
                out.push(')');
            } else {
                term(&c.args[0], nm, out);
            }
            out.push('^');
            term(&c.args[1], nm, out);
        }
        Node::Compound(c) => {
            out.push_str(&atom_text(&c.functor, true));
            out.push('(');
            for (i, a) in c.args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                term(a, nm, out);
            }
            out.push(')');
        }
        Node::Record(r) => {
            if let Some((val, dir, arg)) = slash_parts(n) {
                if dir == "/" {
                    primary(val, nm, out);
                    out.push('/');
                    primary(arg, nm, out);
                } else {
                    primary(arg, nm, out);
                    out.push('\\');
                    primary(val, nm, out);
                }
                return;
            }
            out.push('[');
            for (i, (k, v)) in r.features.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&atom_text(k, true));
                out.push(':');
                term(v, nm, out);
            }
            out.push(']');
        }
    }
}

fn literal(l: &Literal, nm: &mut Namer, out: &mut String) {
    if &*l.pred == "=" && l.args.len() == 2 {
        term(&l.args[0], nm, out);
        out.push_str(" = ");
        term(&l.args[1], nm, out);
        return;
    }
    out.push_str(&atom_text(&l.pred, true));
    if !l.args.is_empty() {
        out.push('(');
        for (i, a) in l.args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            term(a, nm, out);
        }
        out.push(')');
    }
}

fn body(b: &[Literal], nm: &mut Namer, out: &mut String) {
    if !b.is_empty() {
        out.push_str(" :- ");
        for (i, l) in b.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            literal(l, nm, out);
        }
    }
    out.push_str(".\n");
}

fn words(ws: &[crate::term::Sym]) -> String {
    let inner: Vec<_> = ws.iter().map(|w| atom_text(w, true)).collect();
    format!("[{}]", inner.join(", "))
}

pub(super) fn grammar_text(g: &GrammarSource) -> String {
    let mut out = String::new();
    if let Some(t) = &g.target {
        out.push_str(":- target ");
        term(&t.node, &mut Namer::new(), &mut out);
        out.push_str(".\n");
    }
    if !g.rules.is_empty() {
        let names: Vec<_> = g.rules.iter().map(|r| r.name()).collect();
        writeln!(out, ":- rules [{}].", names.join(", ")).unwrap();
    }
    for b in &g.blocks {
        let ws: Vec<_> = b.watched.iter().map(|w| w.to_string()).collect();
        writeln!(
            out,
            ":- block {}/{} blocks [{}].",
            atom_text(&b.pred, true),
            b.arity,
            ws.join(", ")
        )
        .unwrap();
    }
    for c in &g.clauses {
        let mut nm = Namer::new();
        literal(&c.head, &mut nm, &mut out);
        body(&c.body, &mut nm, &mut out);
    }
    for e in &g.lexicon {
        write!(out, "lex({}, ", words(&e.tokens)).unwrap();
        let mut nm = Namer::new();
        term(e.category(), &mut nm, &mut out);
        out.push(')');
        body(&e.clause.body, &mut nm, &mut out);
    }
    if let Some(bb) = &g.backbone {
        if let Some(s) = &bb.start {
            writeln!(out, "cfg start {s}.").unwrap();
        }
        for r in &bb.rules {
            let rhs: Vec<_> = r.rhs.iter().map(|s| s.to_string()).collect();
            writeln!(out, "cfg {} -> {} : {}.", r.lhs, rhs.join(" "), r.rule).unwrap();
        }
        for (p, ws) in &bb.lexical {
            writeln!(out, "cfg lex {p} : {}.", words(ws)).unwrap();
        }
    }
    out
}
