use std::sync::Arc;

use super::state::State;
use super::universe::{GroundActionId, Objects, Universe};
use crate::error::{Error, Result};
use crate::model::{DomainModel, Location, Mode};
use crate::pddl::ProblemInstance;

/// Precondition and effect masks of every ground action under one concrete model.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pre_pos: Vec<State>,
    pre_neg: Vec<State>,
    add: Vec<State>,
    del: Vec<State>,
}

impl CompiledModel {
    pub fn new(model: &DomainModel, universe: &Universe) -> Result<Self> {
        model.ensure_concrete()?;
        model.vocab().ensure_same(universe.vocab())?;
        let vocab = universe.vocab();
        let n = universe.atom_count();
        let k = universe.action_count();
        let mut c = CompiledModel {
            pre_pos: vec![State::empty(n); k],
            pre_neg: vec![State::empty(n); k],
            add: vec![State::empty(n); k],
            del: vec![State::empty(n); k],
        };
        for (g, ga) in universe.actions().iter().enumerate() {
            let range = vocab.action_atoms(ga.action);
            for (pa, &atom) in range.zip(&ga.atoms) {
                let v = model.pa_value(pa);
                match v.pre {
                    Mode::Plus => c.pre_pos[g].insert(atom),
                    Mode::Minus => c.pre_neg[g].insert(atom),
                    _ => {}
                }
                match v.eff {
                    Mode::Plus => c.add[g].insert(atom),
                    Mode::Minus => c.del[g].insert(atom),
                    _ => {}
                }
            }
        }
        Ok(c)
    }

    #[inline]
    pub fn applicable(&self, g: GroundActionId, s: &State) -> bool {
        s.is_superset(&self.pre_pos[g]) && s.is_disjoint(&self.pre_neg[g])
    }

    /// Successor of `s` under `g`, or `None` when a precondition fails.
    /// Deletes are applied before adds.
    #[inline]
    pub fn apply(&self, g: GroundActionId, s: &State) -> Option<State> {
        self.applicable(g, s).then(|| s.successor(&self.del[g], &self.add[g]))
    }
}

/// Applies a ground action under a concrete model without compiling it.
pub fn apply(model: &DomainModel, universe: &Universe, g: GroundActionId, s: &State) -> Option<State> {
    let ga = universe.action(g);
    let range = model.vocab().action_atoms(ga.action);
    let mut next = s.clone();
    let mut adds = Vec::new();
    for (pa, &atom) in range.zip(&ga.atoms) {
        let v = model.pa_value(pa);
        let holds = s.contains(atom);
        if (v.pre == Mode::Plus && !holds) || (v.pre == Mode::Minus && holds) {
            return None;
        }
        match v.eff {
            Mode::Plus => adds.push(atom),
            Mode::Minus => next.remove(atom),
            _ => {}
        }
    }
    for a in adds {
        next.insert(a);
    }
    Some(next)
}

/// Lifted literals of the model at one location, grounded under `g`.
pub fn ground_literals(model: &DomainModel, universe: &Universe, g: GroundActionId, loc: Location) -> Vec<(usize, bool)> {
    let ga = universe.action(g);
    model
        .literals(ga.action, loc)
        .into_iter()
        .map(|(pa, m)| (universe.pa_atom(g, pa), m == Mode::Plus))
        .collect()
}

/// A grounded planning task under a concrete model.
#[derive(Debug, Clone)]
pub struct GroundTask {
    pub universe: Arc<Universe>,
    pub model: Arc<CompiledModel>,
    pub init: State,
    pub goal_pos: State,
    pub goal_neg: State,
}

impl GroundTask {
    pub fn new(universe: Arc<Universe>, model: Arc<CompiledModel>, init: State, goal: &[(usize, bool)]) -> Self {
        let n = universe.atom_count();
        let mut goal_pos = State::empty(n);
        let mut goal_neg = State::empty(n);
        for &(a, positive) in goal {
            if positive {
                goal_pos.insert(a);
            } else {
                goal_neg.insert(a);
            }
        }
        GroundTask { universe, model, init, goal_pos, goal_neg }
    }

    #[inline]
    pub fn is_goal(&self, s: &State) -> bool {
        s.is_superset(&self.goal_pos) && s.is_disjoint(&self.goal_neg)
    }
}

/// Grounds `problem` under a concrete `model`.
pub fn ground(model: &DomainModel, problem: &ProblemInstance) -> Result<GroundTask> {
    let universe = problem_universe(model, problem)?;
    let compiled = Arc::new(CompiledModel::new(model, &universe)?);
    let init = problem_init(&universe, problem)?;
    let goal = problem_goal(&universe, problem)?;
    Ok(GroundTask::new(universe, compiled, init, &goal))
}

pub fn problem_universe(model: &DomainModel, problem: &ProblemInstance) -> Result<Arc<Universe>> {
    let objects = Objects::new(model.vocab(), &problem.objects)?;
    Ok(Universe::new(model.vocab().clone(), objects))
}

pub fn problem_init(universe: &Universe, problem: &ProblemInstance) -> Result<State> {
    let mut s = State::empty(universe.atom_count());
    for a in &problem.init {
        s.insert(named_atom(universe, &a.predicate, &a.args)?);
    }
    Ok(s)
}

pub fn problem_goal(universe: &Universe, problem: &ProblemInstance) -> Result<Vec<(usize, bool)>> {
    problem
        .goal
        .iter()
        .map(|(positive, a)| Ok((named_atom(universe, &a.predicate, &a.args)?, *positive)))
        .collect()
}

fn named_atom(universe: &Universe, predicate: &str, args: &[String]) -> Result<usize> {
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    universe.find_atom(predicate, &args).map_err(|e| match e {
        Error::Vocabulary(m) => Error::Grounding(m),
        other => other,
    })
}
