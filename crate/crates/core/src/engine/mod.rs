//! Definite-clause resolution with coroutining.
//!
//! Goals are solved depth-first in clause source order. A goal whose
//! predicate carries a block declaration waits, parked on its watched
//! variables, while all of them are unbound. Binding any of them moves the
//! goal to a FIFO wake queue; queued goals run to quiescence before the
//! interrupted conjunction continues. Everything, including suspension
//! bookkeeping, is undone on backtracking through the store's trail.
//!
//! The solver is written in continuation-passing style: a caller hands in a
//! continuation that is invoked once per solution, with the store in the
//! solved state, and returns [`Flow::Stop`] to cut the enumeration short.

mod program;

pub use program::{BlockDecl, Clause, LexEntry, Program, Template};

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::term::{render, render_goal, sym, Node, Store, Sym, VarId};

/// Default bound on resolution steps between two solutions.
pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Literal {
    pub pred: Sym,
    pub args: Vec<Node>,
}

impl Literal {
    pub fn new(pred: &str, args: Vec<Node>) -> Self {
        Literal {
            pred: sym(pred),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

/// One entry of the structured trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Shift {
        from: usize,
        to: usize,
        words: String,
    },
    Reduce {
        rule: String,
        from: usize,
        to: usize,
        category: String,
    },
    Suspend {
        goal: String,
    },
    Wake {
        goal: String,
    },
    Resolve {
        goal: String,
        clause: usize,
    },
    Force {
        goal: String,
    },
    Accept,
}

impl Event {
    pub fn is_wake(&self) -> bool {
        matches!(self, Event::Wake { .. })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Shift { from, to, words } => write!(f, "shift   [{from},{to}) {words}"),
            Event::Reduce {
                rule,
                from,
                to,
                category,
            } => {
                write!(f, "reduce  {rule} [{from},{to}) {category}")
            }
            Event::Suspend { goal } => write!(f, "suspend {goal}"),
            Event::Wake { goal } => write!(f, "wake    {goal}"),
            Event::Resolve { goal, clause } => write!(f, "resolve {goal} #{clause}"),
            Event::Force { goal } => write!(f, "force   {goal}"),
            Event::Accept => write!(f, "accept"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("resolution depth limit of {0} steps exceeded")]
    DepthLimit(usize),
    #[error("residual goal {0} has no solution")]
    Flounder(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

pub type Outcome = Result<Flow, EngineError>;

/// Persistent list of pending goals.
#[derive(Clone, Default)]
pub struct Goals(Option<Rc<GoalCell>>);

struct GoalCell {
    lit: Literal,
    next: Goals,
}

impl Goals {
    pub fn new() -> Self {
        Goals(None)
    }

    pub fn from_slice(lits: &[Literal]) -> Self {
        lits.iter()
            .rev()
            .fold(Goals::new(), |acc, l| acc.push(l.clone()))
    }

    pub fn push(&self, lit: Literal) -> Self {
        Goals(Some(Rc::new(GoalCell {
            lit,
            next: self.clone(),
        })))
    }
}

/// Return the first watched variable if `goal` must wait under `program`'s
/// block declarations: a declaration exists and every watched argument is an
/// unbound variable.
pub fn should_suspend(goal: &Literal, program: &Program, store: &Store) -> Option<VarId> {
    blocking_vars(goal, program, store).map(|vs| vs[0])
}

fn blocking_vars(goal: &Literal, program: &Program, store: &Store) -> Option<Vec<VarId>> {
    let decl = program.block(&goal.pred, goal.arity())?;
    let mut vars = Vec::with_capacity(decl.watched.len());
    for &pos in &decl.watched {
        match store.deref(&goal.args[pos - 1]) {
            Node::Var(v) => vars.push(v),
            _ => return None,
        }
    }
    (!vars.is_empty()).then_some(vars)
}

/// Rendered view of one solution, for tests and reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionView {
    pub roots: Vec<String>,
    pub residual: Vec<String>,
}

pub struct Solver<'p> {
    pub program: &'p Program,
    pub store: Store,
    depth_limit: usize,
    steps: usize,
    unblocked: bool,
}

impl<'p> Solver<'p> {
    pub fn new(program: &'p Program, store: Store) -> Self {
        Solver {
            program,
            store,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            steps: 0,
            unblocked: false,
        }
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Self {
        self.depth_limit = limit;
        self
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    /// Ignore block declarations: every goal runs as soon as it is selected.
    pub fn set_eager(&mut self, eager: bool) {
        self.unblocked = eager;
    }

    /// Solve a conjunction, calling `k` once per solution.
    pub fn solve(
        &mut self,
        goals: &[Literal],
        k: &mut dyn FnMut(&mut Solver<'p>) -> Outcome,
    ) -> Outcome {
        self.run(Goals::from_slice(goals), k)
    }

    /// Run pending wakes (if any) and then continue with `k`.
    pub fn settle(&mut self, k: &mut dyn FnMut(&mut Solver<'p>) -> Outcome) -> Outcome {
        self.run(Goals::new(), k)
    }

    /// Enumerate all solutions, rendering `roots` and the residual goals for
    /// each, then restore the store.
    pub fn solve_collect(
        &mut self,
        goals: &[Literal],
        roots: &[Node],
    ) -> Result<Vec<SolutionView>, EngineError> {
        let mut out = Vec::new();
        let cp = self.store.mark();
        let res = self.solve(goals, &mut |s| {
            out.push(SolutionView {
                roots: roots.iter().map(|r| render(r, &s.store)).collect(),
                residual: s
                    .store
                    .residual()
                    .iter()
                    .map(|r| render_goal(&r.goal, &s.store))
                    .collect(),
            });
            Ok(Flow::Continue)
        });
        self.store.restore(cp);
        res.map(|_| out)
    }

    pub fn run(&mut self, goals: Goals, k: &mut dyn FnMut(&mut Solver<'p>) -> Outcome) -> Outcome {
        stacker::maybe_grow(256 * 1024, 8 * 1024 * 1024, || self.step(goals, k))
    }

    fn step(&mut self, goals: Goals, k: &mut dyn FnMut(&mut Solver<'p>) -> Outcome) -> Outcome {
        if let Some(id) = self.store.pop_wake() {
            let goal = self.store.suspension(id).goal.clone();
            if self.store.logging() {
                let text = render_goal(&goal, &self.store);
                self.store.log(Event::Wake { goal: text });
            }
            return self.run(goals.push(goal), k);
        }
        let Some(cell) = goals.0 else {
            self.steps = 0;
            return k(self);
        };
        let goal = &cell.lit;
        let rest = cell.next.clone();

        match (&*goal.pred, goal.arity()) {
            ("true", 0) => return self.run(rest, k),
            ("=", 2) => {
                let cp = self.store.mark();
                let flow = if self.store.unify(&goal.args[0], &goal.args[1]) {
                    self.run(rest, k)
                } else {
                    Ok(Flow::Continue)
                };
                self.store.restore(cp);
                return flow;
            }
            _ => {}
        }

        if !self.unblocked {
            if let Some(vars) = blocking_vars(goal, self.program, &self.store) {
                let cp = self.store.mark();
                if self.store.logging() {
                    let text = render_goal(goal, &self.store);
                    self.store.log(Event::Suspend { goal: text });
                }
                self.store.suspend(goal.clone(), &vars);
                let flow = self.run(rest, k);
                self.store.restore(cp);
                return flow;
            }
        }

        self.steps += 1;
        if self.steps > self.depth_limit {
            return Err(EngineError::DepthLimit(self.depth_limit));
        }
        let program = self.program;
        for (idx, clause) in program.clauses(&goal.pred, goal.arity()).iter().enumerate() {
            let cp = self.store.mark();
            let mut map = vec![None; clause.nvars];
            let mut ok = true;
            for (template, actual) in clause.head.args.iter().zip(&goal.args) {
                let head_arg = self.store.instantiate(template, &mut map);
                if !self.store.unify(&head_arg, actual) {
                    ok = false;
                    break;
                }
            }
            let flow = if ok {
                if self.store.logging() {
                    let text = render_goal(goal, &self.store);
                    self.store.log(Event::Resolve {
                        goal: text,
                        clause: idx + 1,
                    });
                }
                let mut next = rest.clone();
                for lit in clause.body.iter().rev() {
                    let args = lit
                        .args
                        .iter()
                        .map(|a| self.store.instantiate(a, &mut map))
                        .collect();
                    next = next.push(Literal {
                        pred: lit.pred.clone(),
                        args,
                    });
                }
                self.run(next, k)
            } else {
                Ok(Flow::Continue)
            };
            self.store.restore(cp);
            if flow? == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }

    /// Evaluate every residual goal with blocks lifted, committing to the
    /// first solution of each, then continue with `k`. A residual without
    /// solutions rejects the current state (no call to `k`).
    pub fn force_residual(&mut self, k: &mut dyn FnMut(&mut Solver<'p>) -> Outcome) -> Outcome {
        let Some(first) = self.store.residual().into_iter().next() else {
            return k(self);
        };
        let cp = self.store.mark();
        self.store.deactivate(first.id);
        if self.store.logging() {
            let text = render_goal(&first.goal, &self.store);
            self.store.log(Event::Force { goal: text });
        }
        let saved = self.unblocked;
        self.unblocked = true;
        let mut committed: Option<Outcome> = None;
        let res = self.run(Goals::new().push(first.goal.clone()), &mut |s| {
            s.unblocked = saved;
            committed = Some(s.force_residual(k));
            s.unblocked = true;
            Ok(Flow::Stop)
        });
        self.unblocked = saved;
        self.store.restore(cp);
        res?;
        committed.unwrap_or(Ok(Flow::Continue))
    }

    /// Force the residual goals and report whether that succeeds; the store
    /// is left unchanged. Floundering is reported as an error naming the
    /// first residual goal.
    pub fn check_residual(&mut self) -> Result<(), EngineError> {
        let first = self
            .store
            .residual()
            .first()
            .map(|s| render_goal(&s.goal, &self.store));
        let mut reached = false;
        self.force_residual(&mut |_| {
            reached = true;
            Ok(Flow::Stop)
        })?;
        match (reached, first) {
            (true, _) | (false, None) => Ok(()),
            (false, Some(goal)) => Err(EngineError::Flounder(goal)),
        }
    }
}
