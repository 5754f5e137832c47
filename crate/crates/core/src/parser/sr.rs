//! Shift-reduce parsing with backtracking. At each point the parser first
//! tries to reduce the top two stack items (backward application, then
//! forward), then to shift a lexical entry for the next words. A lexical
//! entry's body is solved when it is shifted; goals it leaves suspended ride
//! along in the store.

use std::rc::Rc;

use super::{instantiate_entry, lex_matches, Collector, LexMatch, Skel};
use crate::engine::{Event, Flow, Outcome, Solver};
use crate::grammar::{apply_rule, RuleSchema};
use crate::term::{render_compact, Sym};

struct Search<'a, 'w> {
    words: &'w [Sym],
    /// Lexical matches grouped by start position.
    by_start: Vec<Vec<LexMatch>>,
    col: &'a mut Collector<'w>,
}

pub(crate) fn sr_parse(
    solver: &mut Solver<'_>,
    col: &mut Collector<'_>,
) -> Result<(), crate::engine::EngineError> {
    let words = col.words;
    let mut by_start = vec![Vec::new(); words.len()];
    for m in lex_matches(solver.program, words) {
        by_start[m.from].push(m);
    }
    let mut search = Search {
        words,
        by_start,
        col,
    };
    search.step(solver, Vec::new(), 0).map(|_| ())
}

impl Search<'_, '_> {
    fn step(&mut self, solver: &mut Solver<'_>, stack: Vec<Rc<Skel>>, pos: usize) -> Outcome {
        let n = self.words.len();
        if pos == n && stack.len() == 1 && self.col.accept(solver, &stack[0])? == Flow::Stop {
            return Ok(Flow::Stop);
        }

        if stack.len() >= 2 {
            let (left, right) = (&stack[stack.len() - 2], &stack[stack.len() - 1]);
            for rule in [RuleSchema::Ba, RuleSchema::Fa] {
                if !solver.program.rule_enabled(rule) {
                    continue;
                }
                let (functor, argument) = match rule {
                    RuleSchema::Fa => (left, right),
                    RuleSchema::Ba => (right, left),
                };
                let cp = solver.store.mark();
                let Some(result) =
                    apply_rule(rule, functor.cat(), argument.cat(), &mut solver.store)
                else {
                    continue;
                };
                let (from, mid) = left.span();
                let (_, to) = right.span();
                let node = Rc::new(Skel::Node {
                    rule,
                    from,
                    mid,
                    to,
                    cat: result,
                    left: left.clone(),
                    right: right.clone(),
                });
                if solver.store.logging() {
                    let category = render_compact(node.cat(), &solver.store);
                    solver.store.log(Event::Reduce {
                        rule: rule.name().into(),
                        from,
                        to,
                        category,
                    });
                }
                let mut next = stack[..stack.len() - 2].to_vec();
                next.push(node);
                let flow = solver.settle(&mut |s| self.step(s, next.clone(), pos));
                solver.store.restore(cp);
                if flow? == Flow::Stop {
                    return Ok(Flow::Stop);
                }
            }
        }

        if pos < n {
            let matches = self.by_start[pos].clone();
            for m in matches {
                let cp = solver.store.mark();
                if solver.store.logging() {
                    let words = solver.program.lexicon[m.entry].surface();
                    solver.store.log(Event::Shift {
                        from: m.from,
                        to: m.to,
                        words,
                    });
                }
                let (cat, body) = instantiate_entry(solver, m.entry);
                let leaf = Rc::new(Skel::Leaf { m, cat });
                let flow = solver.solve(&body, &mut |s| {
                    let mut next = stack.clone();
                    next.push(leaf.clone());
                    self.step(s, next, m.to)
                });
                solver.store.restore(cp);
                if flow? == Flow::Stop {
                    return Ok(Flow::Stop);
                }
            }
        }
        Ok(Flow::Continue)
    }
}
