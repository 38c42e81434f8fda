use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::exec::{CompiledModel, GroundTask};
use super::state::State;
use super::universe::{GroundActionId, Universe};
use crate::error::{Error, Result};

pub type Plan = Vec<GroundActionId>;

struct Node {
    state: State,
    parent: usize,
    action: GroundActionId,
    depth: usize,
}

struct Bfs<'a> {
    model: &'a CompiledModel,
    n_actions: usize,
    nodes: Vec<Node>,
    seen: HashMap<State, usize>,
    queue: VecDeque<usize>,
    expanded: usize,
    cap: Option<usize>,
}

impl<'a> Bfs<'a> {
    fn new(model: &'a CompiledModel, universe: &Universe, start: State, cap: Option<usize>) -> Self {
        let mut seen = HashMap::new();
        seen.insert(start.clone(), 0);
        Bfs {
            model,
            n_actions: universe.action_count(),
            nodes: vec![Node { state: start, parent: usize::MAX, action: usize::MAX, depth: 0 }],
            seen,
            queue: VecDeque::from([0]),
            expanded: 0,
            cap,
        }
    }

    fn plan_to(&self, mut idx: usize) -> Plan {
        let mut plan = Vec::with_capacity(self.nodes[idx].depth);
        while idx != 0 {
            plan.push(self.nodes[idx].action);
            idx = self.nodes[idx].parent;
        }
        plan.reverse();
        plan
    }

    /// Expands the next node, returning indices of newly generated nodes.
    fn expand(&mut self, max_depth: usize, out: &mut Vec<usize>) -> Result<bool> {
        out.clear();
        let Some(idx) = self.queue.pop_front() else {
            return Ok(false);
        };
        if self.nodes[idx].depth >= max_depth {
            return Ok(true);
        }
        if let Some(cap) = self.cap {
            if self.expanded >= cap {
                return Err(Error::ResourceExhausted { expanded: self.expanded });
            }
        }
        self.expanded += 1;
        let depth = self.nodes[idx].depth + 1;
        for g in 0..self.n_actions {
            let Some(next) = self.model.apply(g, &self.nodes[idx].state) else {
                continue;
            };
            if let Entry::Vacant(e) = self.seen.entry(next) {
                let id = self.nodes.len();
                let state = e.key().clone();
                e.insert(id);
                self.nodes.push(Node { state, parent: idx, action: g, depth });
                self.queue.push_back(id);
                out.push(id);
            }
        }
        Ok(true)
    }
}

/// Minimum-length plan, lexicographically least in canonical ground-action
/// order among plans of that length. `Ok(None)` means the goal is unreachable;
/// hitting `cap` expansions is reported as [`Error::ResourceExhausted`].
pub fn optimal_plan(task: &GroundTask, cap: Option<usize>) -> Result<Option<Plan>> {
    if task.is_goal(&task.init) {
        return Ok(Some(Vec::new()));
    }
    let mut bfs = Bfs::new(&task.model, &task.universe, task.init.clone(), cap);
    let mut fresh = Vec::new();
    while bfs.expand(usize::MAX, &mut fresh)? {
        for &id in &fresh {
            if task.is_goal(&bfs.nodes[id].state) {
                return Ok(Some(bfs.plan_to(id)));
            }
        }
    }
    Ok(None)
}

/// Length of the shortest plan from `from` to exactly `to`.
pub fn shortest_path(
    model: &CompiledModel,
    universe: &Universe,
    from: &State,
    to: &State,
    cap: Option<usize>,
) -> Result<Option<Plan>> {
    let mut r = shortest_paths(model, universe, from, std::slice::from_ref(to), usize::MAX, cap)?;
    Ok(r.pop().flatten())
}

/// One breadth-first sweep from `from` that finds shortest plans to each of
/// `targets` of length at most `max_depth`.
pub fn shortest_paths(
    model: &CompiledModel,
    universe: &Universe,
    from: &State,
    targets: &[State],
    max_depth: usize,
    cap: Option<usize>,
) -> Result<Vec<Option<Plan>>> {
    let mut found: Vec<Option<Plan>> = vec![None; targets.len()];
    let mut pending: HashMap<&State, Vec<usize>> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        if t == from {
            found[i] = Some(Vec::new());
        } else {
            pending.entry(t).or_default().push(i);
        }
    }
    let mut bfs = Bfs::new(model, universe, from.clone(), cap);
    let mut fresh = Vec::new();
    while !pending.is_empty() && bfs.expand(max_depth, &mut fresh)? {
        for &id in &fresh {
            if let Some(idx) = pending.remove(&bfs.nodes[id].state) {
                let plan = bfs.plan_to(id);
                for i in idx {
                    found[i] = Some(plan.clone());
                }
            }
        }
    }
    Ok(found)
}

/// Every state reachable from `from`, in breadth-first order.
pub fn reachable_states(model: &CompiledModel, universe: &Universe, from: &State, cap: Option<usize>) -> Result<Vec<State>> {
    let mut bfs = Bfs::new(model, universe, from.clone(), cap);
    let mut fresh = Vec::new();
    while bfs.expand(usize::MAX, &mut fresh)? {}
    Ok(bfs.nodes.into_iter().map(|n| n.state).collect())
}
