//! Generators and checks shared by the property tests and the acceptance
//! runner.

#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;

use cug_core::parser::{
    eager_replay, parse_words, tokenize, ParseOptions, Strategy as ParseStrategy,
};
use cug_core::{render, Node, Program, Store, VarId};

// ---- random terms ----------------------------------------------------

/// Number of ordinary variables in a generated template.
pub const NV: u32 = 5;
const ATOMS: [&str; 3] = ["a", "b", "c"];
const FUNCTORS: [&str; 2] = ["f", "g"];
const FEATURES: [&str; 5] = ["agr", "case", "cat", "sem", "vc"];

#[derive(Clone, Debug)]
pub enum Shape {
    Var(u32),
    Atom(usize),
    Comp(usize, Vec<Shape>),
    Rec(Vec<(usize, Shape)>),
}

pub fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![
        3 => (0..NV).prop_map(Shape::Var),
        2 => (0..ATOMS.len()).prop_map(Shape::Atom),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (
                0..FUNCTORS.len(),
                prop::collection::vec(inner.clone(), 1..3)
            )
                .prop_map(|(f, a)| Shape::Comp(f, a)),
            prop::collection::vec((0..FEATURES.len(), inner), 0..3).prop_map(Shape::Rec),
        ]
    })
}

/// Ground shapes: no variables anywhere.
pub fn ground_shape() -> impl Strategy<Value = Shape> {
    let leaf = (0..ATOMS.len()).prop_map(Shape::Atom);
    leaf.prop_recursive(2, 8, 2, |inner| {
        (0..FUNCTORS.len(), prop::collection::vec(inner, 1..3)).prop_map(|(f, a)| Shape::Comp(f, a))
    })
}

/// Template variables: `0..NV` are shared across all templates built with the
/// same map; record tails get fresh slots above that.
pub struct Builder {
    next_tail: u32,
}

impl Builder {
    pub fn new() -> Self {
        Builder { next_tail: NV }
    }

    pub fn node(&mut self, s: &Shape) -> Node {
        match s {
            Shape::Var(v) => Node::Var(VarId(*v)),
            Shape::Atom(a) => Node::atom(ATOMS[*a]),
            Shape::Comp(f, args) => {
                Node::compound(FUNCTORS[*f], args.iter().map(|a| self.node(a)).collect())
            }
            Shape::Rec(fs) => {
                let feats = fs
                    .iter()
                    .map(|(k, v)| (cug_core::sym(FEATURES[*k]), self.node(v)))
                    .collect();
                let tail = VarId(self.next_tail);
                self.next_tail += 1;
                Node::record(feats, tail)
            }
        }
    }

    pub fn slots(&self) -> usize {
        self.next_tail as usize
    }
}

/// Instantiate several shapes into one store, sharing the ordinary variables.
pub fn build(store: &mut Store, shapes: &[&Shape]) -> Vec<Node> {
    let mut b = Builder::new();
    let templates: Vec<Node> = shapes.iter().map(|s| b.node(s)).collect();
    let mut map = vec![None; b.slots()];
    templates
        .iter()
        .map(|t| store.instantiate(t, &mut map))
        .collect()
}

fn tuple(nodes: &[Node]) -> Node {
    Node::compound("t", nodes.to_vec())
}

fn show(nodes: &[Node], store: &Store) -> String {
    render(&tuple(nodes), store)
}

// ---- unification properties ------------------------------------------

/// Success makes both sides print the same; failure leaves no trace.
pub fn check_unify_sound_and_pure(a: &Shape, b: &Shape) -> Result<(), String> {
    let mut st = Store::new();
    let n = build(&mut st, &[a, b]);
    let before = show(&n, &st);
    if st.unify(&n[0], &n[1]) {
        let (ra, rb) = (render(&n[0], &st), render(&n[1], &st));
        if ra != rb {
            return Err(format!("unified terms differ: {ra} vs {rb}"));
        }
        if !st.unify(&n[0], &n[1]) {
            return Err("second unification failed".into());
        }
    } else if show(&n, &st) != before {
        return Err(format!("failed unification changed the store: {before}"));
    }
    Ok(())
}

/// A term unifies with any instance of itself, and the unifier leaves the
/// instance as it was: nothing beyond what is needed gets bound.
pub fn check_unify_most_general(a: &Shape, grounds: &[Shape]) -> Result<(), String> {
    let mut st = Store::new();
    let orig = build(&mut st, &[a]).remove(0);
    let mut b = Builder::new();
    let tmpl = b.node(a);
    let mut map = vec![None; b.slots()];
    let inst = st.instantiate(&tmpl, &mut map);
    for (i, g) in grounds.iter().enumerate().take(NV as usize) {
        let Some(v) = map[i] else { continue };
        let gn = Builder::new().node(g);
        let gn = st.instantiate(&gn, &mut []);
        if !st.unify(&Node::Var(v), &gn) {
            return Err("binding a fresh variable failed".into());
        }
    }
    let inst_before = render(&inst, &st);
    if !st.unify(&orig, &inst) {
        return Err(format!(
            "{} does not unify with its instance {inst_before}",
            render(&orig, &st)
        ));
    }
    let inst_after = render(&inst, &st);
    if inst_after != inst_before {
        return Err(format!("instance changed: {inst_before} -> {inst_after}"));
    }
    if render(&orig, &st) != inst_after {
        return Err("sides differ after unification".into());
    }
    Ok(())
}

/// Solving two equations in either order gives the same outcome.
pub fn check_unify_order(a: &Shape, b: &Shape, c: &Shape, d: &Shape) -> Result<(), String> {
    let run = |first_ab: bool| {
        let mut st = Store::new();
        let n = build(&mut st, &[a, b, c, d]);
        let order = if first_ab {
            [(0, 1), (2, 3)]
        } else {
            [(2, 3), (0, 1)]
        };
        let ok = order.iter().all(|&(i, j)| st.unify(&n[i], &n[j]));
        (ok, ok.then(|| show(&n, &st)))
    };
    let (x, y) = (run(true), run(false));
    if x != y {
        return Err(format!("order matters: {x:?} vs {y:?}"));
    }
    Ok(())
}

/// Undoing to a checkpoint restores every term.
pub fn check_undo(a: &Shape, b: &Shape, c: &Shape) -> Result<(), String> {
    let mut st = Store::new();
    let n = build(&mut st, &[a, b, c]);
    let before = show(&n, &st);
    let cp = st.mark();
    let _ = st.unify(&n[0], &n[1]) && st.unify(&n[1], &n[2]);
    st.undo_to(cp).map_err(|e| e.to_string())?;
    let after = show(&n, &st);
    if after != before {
        return Err(format!("undo left {after}, expected {before}"));
    }
    Ok(())
}

/// Renaming apart does not change the printed form.
pub fn check_render_alpha(a: &Shape) -> Result<(), String> {
    let mut st = Store::new();
    let n = build(&mut st, &[a]).remove(0);
    let copy = st.rename(&n);
    let (x, y) = (render(&n, &st), render(&copy, &st));
    if x != y {
        return Err(format!("{x} vs renamed {y}"));
    }
    Ok(())
}

// ---- logical forms ---------------------------------------------------

/// Parsed rendering of a logical form such as `lately(seem(avoid(frits,marie)))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lf {
    pub head: String,
    pub args: Vec<Lf>,
}

impl Lf {
    pub fn parse(text: &str) -> Option<Lf> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = Self::term(&chars, &mut pos)?;
        (pos == chars.len()).then_some(t)
    }

    fn term(cs: &[char], pos: &mut usize) -> Option<Lf> {
        let start = *pos;
        while *pos < cs.len() && !matches!(cs[*pos], '(' | ')' | ',') {
            *pos += 1;
        }
        let head: String = cs[start..*pos].iter().collect();
        if head.is_empty() {
            return None;
        }
        let mut args = Vec::new();
        if cs.get(*pos) == Some(&'(') {
            *pos += 1;
            loop {
                args.push(Self::term(cs, pos)?);
                match cs.get(*pos)? {
                    ',' => *pos += 1,
                    ')' => {
                        *pos += 1;
                        break;
                    }
                    _ => return None,
                }
            }
        }
        Some(Lf { head, args })
    }

    fn subterms<'a>(&'a self, out: &mut Vec<&'a Lf>) {
        out.push(self);
        for a in &self.args {
            a.subterms(out);
        }
    }

    pub fn find(&self, head: &str) -> Vec<&Lf> {
        let mut all = Vec::new();
        self.subterms(&mut all);
        all.into_iter().filter(|t| t.head == head).collect()
    }

    pub fn contains(&self, head: &str) -> bool {
        !self.find(head).is_empty()
    }

    /// Some `outer(..)` has `inner(..)` as an argument.
    pub fn immediately_dominates(&self, outer: &str, inner: &str) -> bool {
        self.find(outer)
            .iter()
            .any(|t| t.args.iter().any(|a| a.head == inner))
    }

    /// Every `outer(..)` properly contains an `inner(..)`.
    pub fn outscopes(&self, outer: &str, inner: &str) -> bool {
        let outs = self.find(outer);
        !outs.is_empty()
            && outs
                .iter()
                .all(|t| t.args.iter().any(|a| a.contains(inner)))
    }
}

// ---- sentences -------------------------------------------------------

/// Adjuncts of the Dutch fragment with their operators.
pub const ADJUNCTS: [(&str, &str); 3] = [
    ("opzettelijk", "deliberately"),
    ("volgens mij", "in_my_opinion"),
    ("de laatste tijd", "lately"),
];

/// Subject, then the adjuncts (in the given order) interleaved with the
/// object(s) at every position, then the verb.
pub fn stacked_adjunct_sentences() -> Vec<(String, Vec<&'static str>)> {
    let frames: [(&str, &[&str], &str); 3] = [
        ("johan", &["een ongeluk"], "veroorzaakt"),
        ("johan", &["marie", "geen cadeau"], "geeft"),
        ("an", &["bea"], "kussen"),
    ];
    let mut out = Vec::new();
    for order in adjunct_orders() {
        for (subj, objs, verb) in frames {
            // choose a slot among the objects for each adjunct, keeping order
            for slots in monotone_slots(order.len(), objs.len()) {
                let mut words = vec![subj.to_string()];
                let mut k = 0;
                for (i, obj) in objs.iter().enumerate() {
                    while k < order.len() && slots[k] == i {
                        words.push(ADJUNCTS[order[k]].0.to_string());
                        k += 1;
                    }
                    words.push(obj.to_string());
                }
                while k < order.len() {
                    words.push(ADJUNCTS[order[k]].0.to_string());
                    k += 1;
                }
                words.push(verb.to_string());
                let ops = order.iter().map(|i| ADJUNCTS[*i].1).collect();
                out.push((words.join(" "), ops));
            }
        }
    }
    out
}

/// Ordered selections of 2 or 3 distinct adjuncts.
fn adjunct_orders() -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            if b == a {
                continue;
            }
            out.push(vec![a, b]);
            for c in 0..3 {
                if c != a && c != b {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

/// Non-decreasing slot assignments in `0..=slots`.
fn monotone_slots(n: usize, slots: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for s in lo..=hi {
            cur.push(s);
            go(n, s, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 0, slots, &mut Vec::new(), &mut out);
    out
}

const NPS: [&str; 7] = ["johan", "marie", "an", "bea", "cor", "frits", "een ongeluk"];
const ADJ: [&str; 4] = ["", "opzettelijk", "volgens mij", "de laatste tijd"];

/// Sentence frames over the Dutch lexicon, filled from `picks`. Odd
/// selections give word orders the grammar rejects, which is fine.
pub fn dutch_sentence(frame: usize, picks: &[usize; 5], shuffle: Option<(usize, usize)>) -> String {
    let np = |i: usize| NPS[picks[i] % NPS.len()];
    let adj = ADJ[picks[4] % ADJ.len()];
    let s = match frame % 7 {
        0 => format!("{} {adj} {} veroorzaakt", np(0), np(1)),
        1 => format!("{} {} {adj} geen cadeau geeft", np(0), np(1)),
        2 => format!("{} {} {adj} wil kussen", np(0), np(1)),
        3 => format!("{} {} {} {adj} wil zien kussen", np(0), np(1), np(2)),
        4 => format!("{} {} {adj} lijkt te ontwijken", np(0), np(1)),
        5 => format!("{} zich {adj} voornam {} te kussen", np(0), np(1)),
        _ => format!("{} {adj} {} wil {} zien kussen", np(0), np(1), np(2)),
    };
    let mut words: Vec<&str> = s.split_whitespace().collect();
    if let Some((i, j)) = shuffle {
        let n = words.len();
        words.swap(i % n, j % n);
    }
    words.join(" ")
}

pub fn sentence_input() -> impl Strategy<Value = String> {
    (
        0usize..7,
        prop::array::uniform5(0usize..16),
        prop::option::weighted(0.2, (0usize..8, 0usize..8)),
    )
        .prop_map(|(f, p, s)| dutch_sentence(f, &p, s))
}

/// Every delayed derivation is an eager solution of its own tree, and the
/// eager solutions of that tree are exactly the delayed derivations with it.
pub fn check_eager_replay(program: &Program, sentence: &str) -> Result<usize, String> {
    let words = tokenize(sentence).map_err(|e| e.to_string())?;
    let opts = ParseOptions {
        strategy: ParseStrategy::ShiftReduce,
        ..ParseOptions::default()
    };
    let res = parse_words(program, &words, &opts).map_err(|e| format!("{sentence}: {e}"))?;
    for d in &res.derivations {
        let replay =
            eager_replay(program, d, opts.depth_limit).map_err(|e| format!("{sentence}: {e}"))?;
        if !replay.contains {
            return Err(format!(
                "{sentence}: delayed derivation not among eager solutions\n{}",
                d.text()
            ));
        }
        let eager: BTreeSet<_> = replay.solutions.into_iter().collect();
        let delayed: BTreeSet<_> = res
            .derivations
            .iter()
            .filter(|o| o.shape == d.shape)
            .map(|o| o.key())
            .collect();
        if eager != delayed {
            return Err(format!(
                "{sentence}: eager and delayed solution sets differ ({} vs {})",
                eager.len(),
                delayed.len()
            ));
        }
    }
    Ok(res.derivations.len())
}
