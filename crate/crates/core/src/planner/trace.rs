use std::sync::Arc;

use super::exec::apply;
use super::state::State;
use super::universe::{AtomId, GroundActionId, Universe};
use crate::error::{Error, Result};
use crate::model::{DomainModel, PresenceTuple};

/// ⟨s, a, s′⟩.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionTriplet {
    pub pre: State,
    pub action: GroundActionId,
    pub post: State,
}

/// Alternating states and ground actions, beginning and ending with a state.
#[derive(Debug, Clone)]
pub struct ObservationTrace {
    universe: Arc<Universe>,
    states: Vec<State>,
    actions: Vec<GroundActionId>,
}

impl PartialEq for ObservationTrace {
    fn eq(&self, other: &Self) -> bool {
        self.universe.compatible(&other.universe) && self.states == other.states && self.actions == other.actions
    }
}

impl ObservationTrace {
    pub fn new(universe: Arc<Universe>, states: Vec<State>, actions: Vec<GroundActionId>) -> Result<Self> {
        if states.len() != actions.len() + 1 {
            return Err(Error::Alternation(format!(
                "{} states and {} actions do not alternate",
                states.len(),
                actions.len()
            )));
        }
        if let Some(a) = actions.iter().find(|a| **a >= universe.action_count()) {
            return Err(Error::Vocabulary(format!("ground action #{a} outside the universe")));
        }
        Ok(ObservationTrace { universe, states, actions })
    }

    /// Replays `plan` from `start` under a concrete model.
    pub fn simulate(model: &DomainModel, universe: Arc<Universe>, start: State, plan: &[GroundActionId]) -> Result<Self> {
        let mut states = vec![start];
        for &g in plan {
            let next = apply(model, &universe, g, states.last().unwrap()).ok_or_else(|| {
                Error::NoTrace(format!("{} is not applicable", universe.action_text(g)))
            })?;
            states.push(next);
        }
        ObservationTrace::new(universe, states, plan.to_vec())
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn actions(&self) -> &[GroundActionId] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn triplet(&self, i: usize) -> ActionTriplet {
        ActionTriplet {
            pre: self.states[i].clone(),
            action: self.actions[i],
            post: self.states[i + 1].clone(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = ActionTriplet> + '_ {
        (0..self.actions.len()).map(|i| self.triplet(i))
    }

    /// The trace cut to its first `n` triplets.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.actions.len());
        ObservationTrace {
            universe: self.universe.clone(),
            states: self.states[..=n].to_vec(),
            actions: self.actions[..n].to_vec(),
        }
    }
}

pub fn presence_tuple(universe: &Universe, triplet: &ActionTriplet, atom: AtomId) -> Result<PresenceTuple> {
    if atom >= universe.atom_count() {
        return Err(Error::Grounding(format!("atom #{atom} outside the universe")));
    }
    Ok(PresenceTuple::from_truth(triplet.pre.contains(atom), triplet.post.contains(atom)))
}

/// The post-state is exactly what the model's action produces from the pre-state.
pub fn triplet_consistent(model: &DomainModel, universe: &Universe, triplet: &ActionTriplet) -> Result<bool> {
    model.ensure_concrete()?;
    model.vocab().ensure_same(universe.vocab())?;
    if triplet.action >= universe.action_count() {
        return Err(Error::Vocabulary(format!("ground action #{} outside the universe", triplet.action)));
    }
    Ok(apply(model, universe, triplet.action, &triplet.pre).as_ref() == Some(&triplet.post))
}

pub fn validate_trace(model: &DomainModel, trace: &ObservationTrace) -> Result<bool> {
    model.ensure_concrete()?;
    model.vocab().ensure_same(trace.universe.vocab())?;
    for t in trace.triplets() {
        if !triplet_consistent(model, &trace.universe, &t)? {
            return Ok(false);
        }
    }
    Ok(true)
}
