//! Two-phase parsing. Phase one runs CKY over the context-free backbone and
//! keeps the items that can be part of a complete parse. Phase two walks
//! that forest top-down and rebuilds full categories, solving each local
//! tree's head daughter before its non-head daughter.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use serde::Serialize;

use super::{instantiate_entry, Collector, LexMatch, Shape, Skel};
use crate::engine::{EngineError, Event, Flow, Outcome, Solver};
use crate::grammar::{apply_rule, Backbone, RuleSchema};
use crate::term::{render_compact, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ItemRule {
    Lex,
    Rule { index: usize, schema: RuleSchema },
}

/// Forest item: which rule built `label` over `[from, to)` and where its
/// daughters split (`mid == to` for lexical items).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ForestItem {
    pub rule: ItemRule,
    pub from: usize,
    pub mid: usize,
    pub to: usize,
    pub label: Sym,
}

/// All backbone items reachable from the start symbol over the whole input.
pub fn cf_parse(bb: &Backbone, words: &[Sym]) -> BTreeSet<ForestItem> {
    let n = words.len();
    let mut chart: HashSet<(Sym, usize, usize)> = HashSet::new();
    let mut items: HashSet<ForestItem> = HashSet::new();
    for (pre, ws) in &bb.lexical {
        for from in 0..n {
            let to = from + ws.len();
            if to <= n && words[from..to] == ws[..] {
                chart.insert((pre.clone(), from, to));
                items.insert(ForestItem {
                    rule: ItemRule::Lex,
                    from,
                    mid: to,
                    to,
                    label: pre.clone(),
                });
            }
        }
    }
    for len in 2..=n {
        for from in 0..=n - len {
            let to = from + len;
            for mid in from + 1..to {
                for (index, r) in bb.rules.iter().enumerate() {
                    if chart.contains(&(r.rhs[0].clone(), from, mid))
                        && chart.contains(&(r.rhs[1].clone(), mid, to))
                    {
                        chart.insert((r.lhs.clone(), from, to));
                        items.insert(ForestItem {
                            rule: ItemRule::Rule {
                                index,
                                schema: r.rule,
                            },
                            from,
                            mid,
                            to,
                            label: r.lhs.clone(),
                        });
                    }
                }
            }
        }
    }

    // keep only what the start symbol can reach
    let Some(start) = &bb.start else {
        return BTreeSet::new();
    };
    let mut by_span: HashMap<(Sym, usize, usize), Vec<&ForestItem>> = HashMap::new();
    for it in &items {
        by_span
            .entry((it.label.clone(), it.from, it.to))
            .or_default()
            .push(it);
    }
    let mut needed = vec![(start.clone(), 0, n)];
    let mut seen = HashSet::new();
    let mut keep = BTreeSet::new();
    while let Some(key) = needed.pop() {
        if !seen.insert(key.clone()) {
            continue;
        }
        for it in by_span.get(&key).into_iter().flatten() {
            if let ItemRule::Rule { index, .. } = it.rule {
                let r = &bb.rules[index];
                needed.push((r.rhs[0].clone(), it.from, it.mid));
                needed.push((r.rhs[1].clone(), it.mid, it.to));
            }
            keep.insert((*it).clone());
        }
    }
    keep
}

/// Is every local tree of `shape` backed by a forest item?
pub(crate) fn licensed(items: &BTreeSet<ForestItem>, shape: &Shape) -> bool {
    match shape {
        Shape::Lex { from, to, .. } => items
            .iter()
            .any(|i| i.rule == ItemRule::Lex && i.from == *from && i.to == *to),
        Shape::Rule {
            rule,
            from,
            mid,
            to,
            children,
        } => {
            items.iter().any(|i| {
                matches!(i.rule, ItemRule::Rule { schema, .. } if schema == *rule)
                    && (i.from, i.mid, i.to) == (*from, *mid, *to)
            }) && children.iter().all(|c| licensed(items, c))
        }
    }
}

struct Ctx<'a> {
    bb: &'a Backbone,
    words: &'a [Sym],
    index: HashMap<(Sym, usize, usize), Vec<&'a ForestItem>>,
}

type Cont<'k, 'p> = dyn FnMut(&mut Solver<'p>, Rc<Skel>) -> Outcome + 'k;

impl Ctx<'_> {
    fn build<'p>(
        &self,
        solver: &mut Solver<'p>,
        label: &Sym,
        from: usize,
        to: usize,
        k: &mut Cont<'_, 'p>,
    ) -> Outcome {
        let key = (label.clone(), from, to);
        let Some(alts) = self.index.get(&key) else {
            return Ok(Flow::Continue);
        };
        for it in alts {
            let flow = match it.rule {
                ItemRule::Lex => self.leaves(solver, from, to, k)?,
                ItemRule::Rule { index, schema } => {
                    self.local_tree(solver, index, schema, it, k)?
                }
            };
            if flow == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }

    fn leaves<'p>(
        &self,
        solver: &mut Solver<'p>,
        from: usize,
        to: usize,
        k: &mut Cont<'_, 'p>,
    ) -> Outcome {
        let program = solver.program;
        for (entry, e) in program.lexicon.iter().enumerate() {
            if e.tokens[..] != self.words[from..to] {
                continue;
            }
            let cp = solver.store.mark();
            if solver.store.logging() {
                solver.store.log(Event::Shift {
                    from,
                    to,
                    words: e.surface(),
                });
            }
            let (cat, body) = instantiate_entry(solver, entry);
            let leaf = Rc::new(Skel::Leaf {
                m: LexMatch { from, to, entry },
                cat,
            });
            let flow = solver.solve(&body, &mut |s| k(s, leaf.clone()));
            solver.store.restore(cp);
            if flow? == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }

    fn local_tree<'p>(
        &self,
        solver: &mut Solver<'p>,
        index: usize,
        schema: RuleSchema,
        it: &ForestItem,
        k: &mut Cont<'_, 'p>,
    ) -> Outcome {
        if !solver.program.rule_enabled(schema) {
            return Ok(Flow::Continue);
        }
        let r = &self.bb.rules[index];
        let spans = [(it.from, it.mid), (it.mid, it.to)];
        let h = schema.head_daughter();
        let o = 1 - h;
        self.build(solver, &r.rhs[h], spans[h].0, spans[h].1, &mut |s, head| {
            self.build(s, &r.rhs[o], spans[o].0, spans[o].1, &mut |s, other| {
                let cp = s.store.mark();
                let Some(result) = apply_rule(schema, head.cat(), other.cat(), &mut s.store) else {
                    return Ok(Flow::Continue);
                };
                let (left, right) = if h == 0 {
                    (head.clone(), other)
                } else {
                    (other, head.clone())
                };
                let node = Rc::new(Skel::Node {
                    rule: schema,
                    from: it.from,
                    mid: it.mid,
                    to: it.to,
                    cat: result,
                    left,
                    right,
                });
                if s.store.logging() {
                    let category = render_compact(node.cat(), &s.store);
                    s.store.log(Event::Reduce {
                        rule: schema.name().into(),
                        from: it.from,
                        to: it.to,
                        category,
                    });
                }
                let flow = s.settle(&mut |s| k(s, node.clone()));
                s.store.restore(cp);
                flow
            })
        })
    }
}

/// Rebuild full derivations from the forest. Duplicates are not removed.
pub fn recover(
    solver: &mut Solver<'_>,
    bb: &Backbone,
    items: &BTreeSet<ForestItem>,
    words: &[Sym],
) -> Result<Vec<super::Derivation>, EngineError> {
    let mut col = Collector {
        words,
        out: Vec::new(),
        limit: None,
    };
    recover_into(solver, bb, items, &mut col)?;
    Ok(col.out)
}

pub(crate) fn recover_into(
    solver: &mut Solver<'_>,
    bb: &Backbone,
    items: &BTreeSet<ForestItem>,
    col: &mut Collector<'_>,
) -> Result<(), EngineError> {
    let words = col.words;
    let Some(start) = &bb.start else {
        return Ok(());
    };
    let mut index: HashMap<(Sym, usize, usize), Vec<&ForestItem>> = HashMap::new();
    for it in items {
        index
            .entry((it.label.clone(), it.from, it.to))
            .or_default()
            .push(it);
    }
    let ctx = Ctx { bb, words, index };
    ctx.build(solver, start, 0, words.len(), &mut |s, root| {
        col.accept(s, &root)
    })
    .map(|_| ())
}
