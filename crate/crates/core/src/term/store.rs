use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use super::{sorts_compatible, sym, Node, Path, Record, Sym, VarId};
use crate::engine::{Event, Literal};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StoreError {
    #[error("stale checkpoint: trail already undone past position {0}")]
    StaleCheckpoint(usize),
}

/// Undo point handed out by [`Store::mark`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    trail_len: usize,
}

pub type SuspId = usize;

/// A goal parked on an unbound variable.
#[derive(Clone, Debug)]
pub struct Suspension {
    pub id: SuspId,
    pub goal: Literal,
    pub watch: VarId,
    pub active: bool,
}

#[derive(Debug)]
enum TrailEntry {
    Bind(VarId),
    WatchAdd(VarId),
    SuspAdd,
    Deactivate(SuspId),
    WakePush,
    WakePop(SuspId),
    EventPush,
}

/// Bindings, suspended goals and the wake queue, all undoable through one
/// trail.
#[derive(Debug, Default)]
pub struct Store {
    bindings: Vec<Option<Node>>,
    trail: Vec<TrailEntry>,
    suspensions: Vec<Suspension>,
    watchers: HashMap<VarId, Vec<SuspId>>,
    wake_queue: VecDeque<SuspId>,
    events: Option<Vec<Event>>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    /// A store that records solver and parser events.
    pub fn with_event_log() -> Self {
        Store {
            events: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn fresh_var(&mut self) -> VarId {
        let id = VarId(self.bindings.len() as u32);
        self.bindings.push(None);
        id
    }

    pub fn fresh(&mut self) -> Node {
        Node::Var(self.fresh_var())
    }

    /// A new open record with the given features.
    pub fn record(&mut self, features: Vec<(&str, Node)>) -> Node {
        let tail = self.fresh_var();
        Node::record(
            features.into_iter().map(|(k, v)| (sym(k), v)).collect(),
            tail,
        )
    }

    /// `{cat: name}` with a fresh tail.
    pub fn basic(&mut self, cat: &str) -> Node {
        self.record(vec![("cat", Node::atom(cat))])
    }

    /// `[val: val, dir: dir, arg: arg]`.
    pub fn functor(&mut self, val: Node, dir: &str, arg: Node) -> Node {
        self.record(vec![("val", val), ("dir", Node::atom(dir)), ("arg", arg)])
    }

    pub fn var_count(&self) -> usize {
        self.bindings.len()
    }

    pub fn binding(&self, v: VarId) -> Option<&Node> {
        self.bindings[v.0 as usize].as_ref()
    }

    /// Follow variable bindings to an unbound variable or a non-variable.
    pub fn deref(&self, n: &Node) -> Node {
        let mut cur = n;
        loop {
            match cur {
                Node::Var(v) => match &self.bindings[v.0 as usize] {
                    Some(next) => cur = next,
                    None => return cur.clone(),
                },
                _ => return cur.clone(),
            }
        }
    }

    /// All features of a record including those reached through its tail,
    /// sorted by name, together with the final unbound tail.
    pub fn record_view(&self, r: &Record) -> (Vec<(Sym, Node)>, VarId) {
        let mut feats = r.features.clone();
        let mut tail = r.tail;
        loop {
            match self.deref(&Node::Var(tail)) {
                Node::Var(t) => {
                    feats.sort_by(|a, b| a.0.cmp(&b.0));
                    return (feats, t);
                }
                Node::Record(next) => {
                    feats.extend(next.features.iter().cloned());
                    tail = next.tail;
                }
                other => unreachable!("record tail bound to non-record {other:?}"),
            }
        }
    }

    /// Value of one feature of a dereferenced record, if present.
    pub fn feature(&self, n: &Node, name: &str) -> Option<Node> {
        match self.deref(n) {
            Node::Record(r) => {
                let (feats, _) = self.record_view(&r);
                feats
                    .into_iter()
                    .find(|(k, _)| &**k == name)
                    .map(|(_, v)| v)
            }
            _ => None,
        }
    }

    // ---- checkpoints -------------------------------------------------

    pub fn mark(&self) -> Checkpoint {
        Checkpoint {
            trail_len: self.trail.len(),
        }
    }

    pub fn undo_to(&mut self, cp: Checkpoint) -> Result<(), StoreError> {
        if cp.trail_len > self.trail.len() {
            return Err(StoreError::StaleCheckpoint(cp.trail_len));
        }
        self.undo_trail(cp.trail_len);
        Ok(())
    }

    /// Undo for checkpoints the caller knows to be live.
    pub(crate) fn restore(&mut self, cp: Checkpoint) {
        debug_assert!(cp.trail_len <= self.trail.len());
        self.undo_trail(cp.trail_len);
    }

    fn undo_trail(&mut self, len: usize) {
        while self.trail.len() > len {
            match self.trail.pop().unwrap() {
                TrailEntry::Bind(v) => self.bindings[v.0 as usize] = None,
                TrailEntry::WatchAdd(v) => {
                    let list = self.watchers.get_mut(&v).expect("watch list");
                    list.pop();
                    if list.is_empty() {
                        self.watchers.remove(&v);
                    }
                }
                TrailEntry::SuspAdd => {
                    self.suspensions.pop();
                }
                TrailEntry::Deactivate(id) => self.suspensions[id].active = true,
                TrailEntry::WakePush => {
                    self.wake_queue.pop_back();
                }
                TrailEntry::WakePop(id) => self.wake_queue.push_front(id),
                TrailEntry::EventPush => {
                    if let Some(ev) = self.events.as_mut() {
                        ev.pop();
                    }
                }
            }
        }
    }

    // ---- events ------------------------------------------------------

    pub fn logging(&self) -> bool {
        self.events.is_some()
    }

    pub fn log(&mut self, event: Event) {
        if let Some(ev) = self.events.as_mut() {
            ev.push(event);
            self.trail.push(TrailEntry::EventPush);
        }
    }

    pub fn events(&self) -> &[Event] {
        self.events.as_deref().unwrap_or(&[])
    }

    // ---- suspensions -------------------------------------------------

    /// Park `goal` until any of `watch` gets bound.
    pub fn suspend(&mut self, goal: Literal, watch: &[VarId]) -> SuspId {
        let id = self.suspensions.len();
        self.suspensions.push(Suspension {
            id,
            goal,
            watch: watch[0],
            active: true,
        });
        self.trail.push(TrailEntry::SuspAdd);
        for v in watch {
            self.add_watch(*v, id);
        }
        id
    }

    fn add_watch(&mut self, v: VarId, id: SuspId) {
        self.watchers.entry(v).or_default().push(id);
        self.trail.push(TrailEntry::WatchAdd(v));
    }

    pub fn suspension(&self, id: SuspId) -> &Suspension {
        &self.suspensions[id]
    }

    /// Still-suspended goals in creation order.
    pub fn residual(&self) -> Vec<Suspension> {
        self.suspensions
            .iter()
            .filter(|s| s.active)
            .cloned()
            .collect()
    }

    pub fn residual_count(&self) -> usize {
        self.suspensions.iter().filter(|s| s.active).count()
    }

    /// Take a suspension out of play without running it.
    pub(crate) fn deactivate(&mut self, id: SuspId) {
        if self.suspensions[id].active {
            self.suspensions[id].active = false;
            self.trail.push(TrailEntry::Deactivate(id));
        }
    }

    pub fn pop_wake(&mut self) -> Option<SuspId> {
        let id = self.wake_queue.pop_front()?;
        self.trail.push(TrailEntry::WakePop(id));
        Some(id)
    }

    pub fn wake_pending(&self) -> bool {
        !self.wake_queue.is_empty()
    }

    // ---- binding -----------------------------------------------------

    fn bind(&mut self, v: VarId, value: Node) {
        debug_assert!(self.bindings[v.0 as usize].is_none());
        self.bindings[v.0 as usize] = Some(value.clone());
        self.trail.push(TrailEntry::Bind(v));
        let Some(watching) = self.watchers.get(&v).cloned() else {
            return;
        };
        match value {
            // Still unbound: the goal keeps waiting, now on the other variable.
            Node::Var(target) => {
                for id in watching {
                    if self.suspensions[id].active {
                        self.add_watch(target, id);
                    }
                }
            }
            _ => {
                for id in watching {
                    if self.suspensions[id].active {
                        self.deactivate(id);
                        self.wake_queue.push_back(id);
                        self.trail.push(TrailEntry::WakePush);
                    }
                }
            }
        }
    }

    /// Does `v` occur in `n`? Records count as containing their own tail.
    fn occurs(&self, v: VarId, n: &Node) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![n.clone()];
        while let Some(cur) = stack.pop() {
            match self.deref(&cur) {
                Node::Var(w) => {
                    if w == v {
                        return true;
                    }
                }
                Node::Atom(_) => {}
                Node::Compound(c) => stack.extend(c.args.iter().cloned()),
                Node::Record(r) => {
                    let (feats, tail) = self.record_view(&r);
                    if tail == v {
                        return true;
                    }
                    if seen.insert(tail) {
                        stack.extend(feats.into_iter().map(|(_, n)| n));
                    }
                }
            }
        }
        false
    }

    /// Unify two terms. On failure the store is left exactly as before.
    pub fn unify(&mut self, a: &Node, b: &Node) -> bool {
        let cp = self.mark();
        if self.unify_inner(a, b) {
            true
        } else {
            self.restore(cp);
            false
        }
    }

    fn unify_inner(&mut self, a: &Node, b: &Node) -> bool {
        let mut work = vec![(a.clone(), b.clone())];
        while let Some((a, b)) = work.pop() {
            let a = self.deref(&a);
            let b = self.deref(&b);
            match (a, b) {
                (Node::Var(x), Node::Var(y)) => {
                    if x != y {
                        // Younger variables point at older ones.
                        let (from, to) = if x > y { (x, y) } else { (y, x) };
                        self.bind(from, Node::Var(to));
                    }
                }
                (Node::Var(x), t) | (t, Node::Var(x)) => {
                    if self.occurs(x, &t) {
                        return false;
                    }
                    self.bind(x, t);
                }
                (Node::Atom(p), Node::Atom(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Node::Compound(f), Node::Compound(g)) => {
                    if f.functor != g.functor || f.args.len() != g.args.len() {
                        return false;
                    }
                    work.extend(f.args.iter().cloned().zip(g.args.iter().cloned()));
                }
                (Node::Record(r), Node::Record(s)) => {
                    if !self.unify_records(&r, &s, &mut work) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    fn unify_records(&mut self, r: &Record, s: &Record, work: &mut Vec<(Node, Node)>) -> bool {
        let (fr, tr) = self.record_view(r);
        let (fs, ts) = self.record_view(s);
        if tr == ts {
            return true;
        }
        let mut only_r = Vec::new();
        let mut only_s = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < fr.len() || j < fs.len() {
            if j == fs.len() || (i < fr.len() && fr[i].0 < fs[j].0) {
                only_r.push(fr[i].clone());
                i += 1;
            } else if i == fr.len() || fs[j].0 < fr[i].0 {
                only_s.push(fs[j].clone());
                j += 1;
            } else {
                work.push((fr[i].1.clone(), fs[j].1.clone()));
                i += 1;
                j += 1;
            }
        }
        if !sorts_compatible(fr.iter().chain(fs.iter()).map(|(k, _)| k)) {
            return false;
        }
        match (only_r.is_empty(), only_s.is_empty()) {
            (true, true) => self.bind_tail(tr, Node::Var(ts)),
            (true, false) => self.bind_tail(tr, Node::record(only_s, ts)),
            (false, true) => self.bind_tail(ts, Node::record(only_r, tr)),
            (false, false) => {
                let t = self.fresh_var();
                self.bind_tail(tr, Node::record(only_s, t))
                    && self.bind_tail(ts, Node::record(only_r, t))
            }
        }
    }

    fn bind_tail(&mut self, tail: VarId, value: Node) -> bool {
        if !value.is_var() && self.occurs(tail, &value) {
            return false;
        }
        self.bind(tail, value);
        true
    }

    /// Walk `path` from `n`, extending open records (and turning unbound
    /// variables into records) as needed. Fails, leaving the store untouched,
    /// when the path runs into an atom or compound term.
    pub fn path_get(&mut self, n: &Node, path: &Path) -> Option<Node> {
        let cp = self.mark();
        let mut cur = n.clone();
        for f in &path.0 {
            let d = self.deref(&cur);
            let existing = match &d {
                Node::Record(_) => self.feature(&d, f),
                Node::Var(_) => None,
                _ => {
                    self.restore(cp);
                    return None;
                }
            };
            cur = match existing {
                Some(v) => v,
                None => {
                    let v = self.fresh();
                    let tail = self.fresh_var();
                    let ext = Node::record(vec![(f.clone(), v.clone())], tail);
                    if !self.unify(&d, &ext) {
                        self.restore(cp);
                        return None;
                    }
                    v
                }
            };
        }
        Some(cur)
    }

    /// Copy a live term with fresh variables, preserving sharing.
    pub fn rename(&mut self, n: &Node) -> Node {
        let mut map = HashMap::new();
        self.rename_with(n, &mut map)
    }

    pub fn rename_with(&mut self, n: &Node, map: &mut HashMap<VarId, VarId>) -> Node {
        match self.deref(n) {
            Node::Var(v) => Node::Var(*map.entry(v).or_insert_with(|| {
                let id = VarId(self.bindings.len() as u32);
                self.bindings.push(None);
                id
            })),
            a @ Node::Atom(_) => a,
            Node::Compound(c) => {
                let args = c.args.iter().map(|a| self.rename_with(a, map)).collect();
                Node::Compound(Arc::new(super::Compound {
                    functor: c.functor.clone(),
                    args,
                }))
            }
            Node::Record(r) => {
                let (feats, tail) = self.record_view(&r);
                let feats = feats
                    .into_iter()
                    .map(|(k, v)| (k, self.rename_with(&v, map)))
                    .collect();
                let Node::Var(t) = self.rename_with(&Node::Var(tail), map) else {
                    unreachable!()
                };
                Node::record(feats, t)
            }
        }
    }

    /// Instantiate a clause-local template whose variables are numbered
    /// `0..map.len()`; `map` records the fresh store variable for each.
    pub fn instantiate(&mut self, t: &Node, map: &mut [Option<VarId>]) -> Node {
        match t {
            Node::Var(v) => {
                let slot = &mut map[v.0 as usize];
                Node::Var(match slot {
                    Some(id) => *id,
                    None => {
                        let id = VarId(self.bindings.len() as u32);
                        self.bindings.push(None);
                        *slot = Some(id);
                        id
                    }
                })
            }
            Node::Atom(_) => t.clone(),
            Node::Compound(c) => Node::Compound(Arc::new(super::Compound {
                functor: c.functor.clone(),
                args: c.args.iter().map(|a| self.instantiate(a, map)).collect(),
            })),
            Node::Record(r) => {
                let feats = r
                    .features
                    .iter()
                    .map(|(k, v)| (k.clone(), self.instantiate(v, map)))
                    .collect();
                let Node::Var(tail) = self.instantiate(&Node::Var(r.tail), map) else {
                    unreachable!()
                };
                Node::Record(Arc::new(Record {
                    features: feats,
                    tail,
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deref_unbound_is_identity() {
        let mut s = Store::new();
        let v = s.fresh();
        assert!(matches!(s.deref(&v), Node::Var(x) if Some(x) == v.as_var()));
    }

    #[test]
    fn deref_follows_chains() {
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        let np = s.basic("np");
        assert!(s.unify(&x, &y));
        assert!(s.unify(&y, &np));
        let d = s.deref(&x);
        assert_eq!(
            s.feature(&d, "cat").map(|n| super::super::render(&n, &s)),
            Some("np".into())
        );
    }

    #[test]
    fn atoms_unify_by_name() {
        let mut s = Store::new();
        assert!(s.unify(&Node::atom("s"), &Node::atom("s")));
        assert!(!s.unify(&Node::atom("s"), &Node::atom("np")));
        let rec = s.basic("s");
        assert!(!s.unify(&Node::atom("s"), &rec));
    }

    #[test]
    fn open_records_take_the_union() {
        let mut s = Store::new();
        let a = s.basic("np");
        let b = s.record(vec![("cat", Node::atom("np")), ("case", Node::atom("nom"))]);
        assert!(s.unify(&a, &b));
        assert_eq!(super::super::render(&a, &s), "[case:nom,cat:np]");
        assert_eq!(super::super::render(&b, &s), "[case:nom,cat:np]");
    }

    #[test]
    fn basic_and_functor_sorts_clash() {
        let mut s = Store::new();
        let a = s.basic("s");
        let v = s.fresh();
        let f = s.record(vec![("arg", v)]);
        assert!(!s.unify(&a, &f));
    }

    #[test]
    fn occurs_check_rejects_cycles() {
        let mut s = Store::new();
        let x = s.fresh();
        let fx = Node::compound("f", vec![x.clone()]);
        assert!(!s.unify(&x, &fx));
        let rx = s.record(vec![("arg", x.clone())]);
        assert!(!s.unify(&x, &rx));
        assert!(s.deref(&x).is_var());
    }

    #[test]
    fn failed_unify_restores_store() {
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        let a = Node::compound("f", vec![x.clone(), Node::atom("a")]);
        let b = Node::compound("f", vec![y.clone(), Node::atom("b")]);
        let before = s.mark();
        assert!(!s.unify(&a, &b));
        assert_eq!(s.mark(), before);
        assert!(s.deref(&x).is_var());
        // nothing left to undo
        s.undo_to(before).unwrap();
    }

    #[test]
    fn undo_reverts_nested_bindings() {
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        let cp = s.mark();
        assert!(s.unify(&x, &Node::atom("a")));
        assert!(s.unify(&y, &Node::compound("g", vec![x.clone()])));
        s.undo_to(cp).unwrap();
        assert!(s.deref(&x).is_var());
        assert!(s.deref(&y).is_var());
    }

    #[test]
    fn stale_checkpoint_is_an_error() {
        let mut s = Store::new();
        let x = s.fresh();
        let early = s.mark();
        assert!(s.unify(&x, &Node::atom("a")));
        let late = s.mark();
        s.undo_to(early).unwrap();
        assert_eq!(s.undo_to(late), Err(StoreError::StaleCheckpoint(1)));
    }

    #[test]
    fn path_get_extends_open_records() {
        let mut s = Store::new();
        let np = s.basic("np");
        let case = s.path_get(&np, &Path::new(&["case"])).unwrap();
        assert!(s.deref(&case).is_var());
        let again = s.path_get(&np, &Path::new(&["case"])).unwrap();
        assert_eq!(s.deref(&case).as_var(), s.deref(&again).as_var());
    }

    #[test]
    fn path_get_fails_through_atoms() {
        let mut s = Store::new();
        assert!(s.path_get(&Node::atom("s"), &Path::new(&["arg"])).is_none());
    }

    #[test]
    fn path_get_turns_variables_into_records() {
        let mut s = Store::new();
        let x = s.fresh();
        let agr = s.path_get(&x, &Path::new(&["arg", "agr"])).unwrap();
        assert!(s.unify(&agr, &Node::atom("sg3")));
        let arg = s.feature(&x, "arg").unwrap();
        assert_eq!(super::super::render(&arg, &s), "[agr:sg3]");
    }

    #[test]
    fn rename_preserves_sharing() {
        let mut s = Store::new();
        let x = s.fresh();
        let t = Node::compound("f", vec![x.clone(), x.clone()]);
        let r = s.rename(&t);
        let Node::Compound(c) = &r else { panic!() };
        assert_eq!(c.args[0].as_var(), c.args[1].as_var());
        assert_ne!(c.args[0].as_var(), x.as_var());
        assert_eq!(s.rename(&Node::atom("s")).as_var(), None);
    }

    #[test]
    fn var_var_binding_moves_the_watch() {
        let mut s = Store::new();
        let x = s.fresh_var();
        let y = s.fresh_var();
        let goal = Literal::new("p", vec![Node::Var(x)]);
        s.suspend(goal, &[y]);
        assert!(s.unify(&Node::Var(y), &Node::Var(x)));
        assert!(!s.wake_pending());
        assert!(s.unify(&Node::Var(x), &Node::atom("a")));
        assert!(s.wake_pending());
        assert_eq!(s.residual_count(), 0);
    }

    #[test]
    fn undo_restores_suspensions_and_wake_queue() {
        let mut s = Store::new();
        let x = s.fresh_var();
        let cp = s.mark();
        s.suspend(Literal::new("p", vec![Node::Var(x)]), &[x]);
        let mid = s.mark();
        assert!(s.unify(&Node::Var(x), &Node::atom("a")));
        assert_eq!(s.residual_count(), 0);
        assert!(s.pop_wake().is_some());
        s.undo_to(mid).unwrap();
        assert_eq!(s.residual_count(), 1);
        assert!(!s.wake_pending());
        s.undo_to(cp).unwrap();
        assert!(s.residual().is_empty());
    }
}
