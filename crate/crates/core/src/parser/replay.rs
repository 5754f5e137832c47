//! Eager replay: rebuild a derivation with every lexical constraint solved
//! only after the whole tree is in place, ignoring block declarations. The
//! delayed parse of the same tree must be among the eager solutions.

use std::rc::Rc;

use super::{
    instantiate_entry, sem_of, shape_of, snapshot_node, Derivation, LexMatch, Shape, Skel,
};
use crate::engine::{EngineError, Flow, Literal, Program, Solver};
use crate::grammar::{apply_rule, expand_target};
use crate::term::Store;

#[derive(Clone, Debug)]
pub struct EagerReplay {
    /// (tree text, reading) of every eager solution.
    pub solutions: Vec<(String, String)>,
    /// Whether the delayed derivation is among them.
    pub contains: bool,
}

fn rebuild(solver: &mut Solver<'_>, shape: &Shape, goals: &mut Vec<Literal>) -> Option<Rc<Skel>> {
    match shape {
        Shape::Lex { from, to, entry } => {
            let (cat, body) = instantiate_entry(solver, *entry);
            goals.extend(body);
            Some(Rc::new(Skel::Leaf {
                m: LexMatch {
                    from: *from,
                    to: *to,
                    entry: *entry,
                },
                cat,
            }))
        }
        Shape::Rule {
            rule,
            from,
            mid,
            to,
            children,
        } => {
            let left = rebuild(solver, &children[0], goals)?;
            let right = rebuild(solver, &children[1], goals)?;
            let (functor, argument) = if rule.head_daughter() == 0 {
                (&left, &right)
            } else {
                (&right, &left)
            };
            let cat = apply_rule(*rule, functor.cat(), argument.cat(), &mut solver.store)?;
            Some(Rc::new(Skel::Node {
                rule: *rule,
                from: *from,
                mid: *mid,
                to: *to,
                cat,
                left,
                right,
            }))
        }
    }
}

pub fn eager_replay(
    program: &Program,
    deriv: &Derivation,
    depth_limit: usize,
) -> Result<EagerReplay, EngineError> {
    let mut solver = Solver::new(program, Store::new()).with_depth_limit(depth_limit);
    solver.set_eager(true);
    let mut goals = Vec::new();
    let mut solutions = Vec::new();
    if let Some(root) = rebuild(&mut solver, &deriv.shape, &mut goals) {
        let target = expand_target(program, &mut solver.store);
        if solver.store.unify(root.cat(), &target) {
            debug_assert_eq!(shape_of(&root), deriv.shape);
            solver.solve(&goals, &mut |s| {
                let sem = sem_of(root.cat(), &mut s.store);
                let tree = snapshot_node(&root, s.program, &s.store);
                let d = Derivation {
                    tree,
                    shape: deriv.shape.clone(),
                    sem,
                    residuals_forced: 0,
                    residuals_left: s.store.residual_count(),
                    events: Vec::new(),
                };
                solutions.push(d.key());
                Ok(Flow::Continue)
            })?;
        }
    }
    let contains = solutions.contains(&deriv.key());
    Ok(EagerReplay {
        solutions,
        contains,
    })
}
