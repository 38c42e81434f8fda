use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DomainModel;
use crate::pddl::ProblemInstance;
use crate::planner::exec::{problem_goal, problem_init};
use crate::planner::{optimal_plan, CompiledModel, GroundActionId, GroundTask, ObservationTrace, Plan, State, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanningMode {
    #[default]
    Optimal,
    Satisficing,
}

/// ⟨s_I, π⟩.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub start: State,
    pub plan: Vec<GroundActionId>,
}

impl Query {
    pub fn single(start: State, action: GroundActionId) -> Self {
        Query { start, plan: vec![action] }
    }
}

/// ⟨n_F, s_F⟩: length of the executed prefix and the state it reached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryResponse {
    pub executed: usize,
    pub state: State,
}

/// A black-box agent acting under a hidden concrete model.
#[derive(Debug, Clone)]
pub struct AgentSim {
    hidden: DomainModel,
    compiled: Arc<CompiledModel>,
    universe: Arc<Universe>,
    initial_states: Vec<State>,
    mode: PlanningMode,
    expansion_cap: Option<usize>,
}

impl AgentSim {
    /// `initial_states` seed the random walks of [`sample_random_states`].
    pub fn new(hidden: DomainModel, universe: Arc<Universe>, initial_states: Vec<State>) -> Result<Self> {
        let compiled = Arc::new(CompiledModel::new(&hidden, &universe)?);
        Ok(AgentSim {
            hidden,
            compiled,
            universe,
            initial_states,
            mode: PlanningMode::Optimal,
            expansion_cap: None,
        })
    }

    pub fn with_mode(mut self, mode: PlanningMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_expansion_cap(mut self, cap: Option<usize>) -> Self {
        self.expansion_cap = cap;
        self
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn mode(&self) -> PlanningMode {
        self.mode
    }

    pub fn initial_states(&self) -> &[State] {
        &self.initial_states
    }

    /// The ground truth, for scoring only; assessment code never calls this.
    pub fn hidden_model(&self) -> &DomainModel {
        &self.hidden
    }

    pub fn vocab(&self) -> &Arc<crate::model::Vocabulary> {
        self.hidden.vocab()
    }
}

pub fn answer_query(agent: &AgentSim, q: &Query) -> Result<QueryResponse> {
    let n = agent.universe.atom_count();
    if !q.start.fits(n) {
        return Err(Error::QueryFormat("start state is not over the agent's atoms".into()));
    }
    if let Some(g) = q.plan.iter().find(|g| **g >= agent.universe.action_count()) {
        return Err(Error::QueryFormat(format!("ground action #{g} is not over the agent's objects")));
    }
    let mut s = q.start.clone();
    let mut executed = 0;
    for &g in &q.plan {
        match agent.compiled.apply(g, &s) {
            Some(next) => {
                s = next;
                executed += 1;
            }
            None => break,
        }
    }
    Ok(QueryResponse { executed, state: s })
}

/// The agent's trace for `problem`: an optimal plan in optimal mode, a
/// greedy goal-count plan otherwise.
pub fn generate_trace(agent: &AgentSim, problem: &ProblemInstance) -> Result<ObservationTrace> {
    let universe = agent.universe.clone();
    let init = problem_init(&universe, problem)?;
    let goal = problem_goal(&universe, problem)?;
    let task = GroundTask::new(universe.clone(), agent.compiled.clone(), init.clone(), &goal);
    let plan = match agent.mode {
        PlanningMode::Optimal => optimal_plan(&task, agent.expansion_cap)?,
        PlanningMode::Satisficing => greedy_plan(&task, agent.expansion_cap)?,
    }
    .ok_or_else(|| Error::NoTrace(format!("problem `{}` is unsolvable for the agent", problem.name)))?;
    ObservationTrace::simulate(&agent.hidden, universe, init, &plan)
}

fn greedy_plan(task: &GroundTask, cap: Option<usize>) -> Result<Option<Plan>> {
    let h = |s: &State| {
        task.goal_pos.iter().filter(|a| !s.contains(*a)).count() + task.goal_neg.iter().filter(|a| s.contains(*a)).count()
    };
    let mut parent: HashMap<State, Option<(State, GroundActionId)>> = HashMap::new();
    let mut open = BinaryHeap::new();
    let mut tick = 0usize;
    parent.insert(task.init.clone(), None);
    open.push(Reverse((h(&task.init), tick, task.init.clone())));
    let mut expanded = 0;
    while let Some(Reverse((_, _, s))) = open.pop() {
        if task.is_goal(&s) {
            let mut plan = Vec::new();
            let mut cur = s;
            while let Some(Some((p, g))) = parent.get(&cur).cloned() {
                plan.push(g);
                cur = p;
            }
            plan.reverse();
            return Ok(Some(plan));
        }
        if cap.is_some_and(|c| expanded >= c) {
            return Err(Error::ResourceExhausted { expanded });
        }
        expanded += 1;
        for g in 0..task.universe.action_count() {
            if let Some(next) = task.model.apply(g, &s) {
                if !parent.contains_key(&next) {
                    tick += 1;
                    parent.insert(next.clone(), Some((s.clone(), g)));
                    open.push(Reverse((h(&next), tick, next)));
                }
            }
        }
    }
    Ok(None)
}

pub const DEFAULT_WALK_LENGTH: usize = 20;

/// 𝒮 with the default walk bound.
pub fn sample_random_states(agent: &AgentSim, n: usize, seed: u64) -> Vec<State> {
    sample_random_states_with(agent, n, seed, DEFAULT_WALK_LENGTH)
}

/// `n` distinct states: those visited by seeded random walks of at most
/// `max_walk` steps from the agent's initial states, in visiting order, then
/// uniformly random atom subsets if the walks do not yield enough.
pub fn sample_random_states_with(agent: &AgentSim, n: usize, seed: u64, max_walk: usize) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    let mut push = |s: State, out: &mut Vec<State>| {
        if out.len() < n && seen.insert(s.clone()) {
            out.push(s);
        }
    };
    let n_actions = agent.universe.action_count();
    let actions: Vec<GroundActionId> = (0..n_actions).collect();
    if !agent.initial_states.is_empty() {
        let walks = n.saturating_mul(4).max(4);
        for w in 0..walks {
            if out.len() >= n {
                break;
            }
            let mut s = agent.initial_states[w % agent.initial_states.len()].clone();
            push(s.clone(), &mut out);
            let len = rng.gen_range(0..=max_walk);
            for _ in 0..len {
                let applicable: Vec<GroundActionId> =
                    actions.iter().copied().filter(|g| agent.compiled.applicable(*g, &s)).collect();
                let Some(&g) = applicable.choose(&mut rng) else {
                    break;
                };
                s = agent.compiled.apply(g, &s).expect("applicable");
                push(s.clone(), &mut out);
            }
        }
    }
    let atoms = agent.universe.atom_count();
    let mut attempts = 0usize;
    while out.len() < n && attempts < n.saturating_mul(64) + 64 {
        attempts += 1;
        let s = State::from_atoms(atoms, (0..atoms).filter(|_| rng.gen_bool(0.5)));
        push(s, &mut out);
    }
    out
}
