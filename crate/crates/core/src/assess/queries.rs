use super::constraints::PaConstraints;
use super::predict::{predict, Prediction};
use crate::agent::{Query, QueryResponse};
use crate::error::{Error, Result};
use crate::model::{DomainModel, PalId};
use crate::planner::{ActionTriplet, AtomId, ObservationTrace, State, Universe};

/// Whether lifted atom `γ.pa()` is the only lifted atom of the action that
/// grounds to its atom under ground action `g`.
pub fn collision_free(universe: &Universe, g: usize, pal: PalId) -> Option<AtomId> {
    let atom = universe.pa_atom(g, pal.pa());
    let n = universe.action(g).atoms.iter().filter(|a| **a == atom).count();
    (n == 1).then_some(atom)
}

/// Queries built from a triplet of γ's action by forcing γ's ground atom
/// false, then true, in the observed pre-state.
pub fn witness_queries(universe: &Universe, pal: PalId, w: &ActionTriplet) -> Option<[Query; 2]> {
    let atom = collision_free(universe, w.action, pal)?;
    Some([
        Query::single(w.pre.with(atom, false), w.action),
        Query::single(w.pre.with(atom, true), w.action),
    ])
}

/// The observed pre-state of γ's action with γ's ground atom made false,
/// paired with the observed grounding. `None` when γ's action never occurs
/// in the traces without another lifted atom sharing that ground atom.
pub fn make_precondition_query(pal: PalId, traces: &[ObservationTrace]) -> Option<Query> {
    for t in traces {
        let u = t.universe();
        let action = u.vocab().atom(pal.pa()).action;
        for w in t.triplets() {
            if u.action(w.action).action == action {
                if let Some([q, _]) = witness_queries(u, pal, &w) {
                    return Some(q);
                }
            }
        }
    }
    None
}

/// Single-action queries over `states` for γ's action: every state with
/// every canonical grounding, then the same pairs with γ's ground atom
/// flipped.
pub fn state_queries<'a>(universe: &'a Universe, pal: PalId, states: &'a [State]) -> impl Iterator<Item = Query> + 'a {
    let action = universe.vocab().atom(pal.pa()).action;
    let plain = states
        .iter()
        .flat_map(move |s| universe.groundings(action).map(move |g| Query::single(s.clone(), g)));
    let edited = states.iter().flat_map(move |s| {
        universe.groundings(action).map(move |g| {
            let atom = universe.pa_atom(g, pal.pa());
            Query::single(s.with(atom, !s.contains(atom)), g)
        })
    });
    plain.chain(edited)
}

/// A query on which two models that differ in γ predict disjoint responses.
pub fn generate_distinguishing_query(
    m_i: &DomainModel,
    m_j: &DomainModel,
    pal: PalId,
    states: &[State],
    universe: &Universe,
) -> Result<Option<Query>> {
    m_i.ensure_concrete()?;
    m_j.ensure_concrete()?;
    m_i.vocab().ensure_same(m_j.vocab())?;
    let c = PaConstraints::unconstrained(m_i.vocab());
    Ok(state_queries(universe, pal, states).find(|q| {
        predict(m_i, &c, universe, q).disjoint(&predict(m_j, &c, universe, q))
    }))
}

/// The candidates whose simulated response to `q` is exactly `r`.
pub fn sieve_models(
    candidates: &[DomainModel],
    universe: &Universe,
    q: &Query,
    r: &QueryResponse,
) -> Result<Vec<DomainModel>> {
    let mut kept = Vec::new();
    for m in candidates {
        m.ensure_concrete()?;
        let c = PaConstraints::unconstrained(m.vocab());
        if predict(m, &c, universe, q).admits(q, r) {
            kept.push(m.clone());
        } else {
            log::debug!("sieved out a candidate on {}", plan_text(universe, q));
        }
    }
    if kept.is_empty() && !candidates.is_empty() {
        return Err(Error::Contradiction(format!(
            "no candidate reproduces the response to {}",
            plan_text(universe, q)
        )));
    }
    Ok(kept)
}

pub fn plan_text(universe: &Universe, q: &Query) -> String {
    q.plan.iter().map(|g| universe.action_text(*g)).collect::<Vec<_>>().join(" ")
}

/// Whether some pair of predictions with different labels is disjoint.
pub fn splits<L: PartialEq>(labels: &[L], preds: &[Prediction]) -> bool {
    for i in 0..preds.len() {
        for j in i + 1..preds.len() {
            if labels[i] != labels[j] && preds[i].disjoint(&preds[j]) {
                return true;
            }
        }
    }
    false
}
