//! Finding the pal-tuples a drift touched and resolving their modes by
//! querying the agent, plus the query-everything baseline.

pub mod constraints;
mod engine;
pub mod predict;
pub mod queries;
pub mod reduced;
pub mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use constraints::{
    collision_groups, detect_expanded, fixed_modes, infer_pa_constraints, CollisionGroup, ExpandedFindings,
    PaConstraints,
};
pub use engine::Resolution;
pub use predict::{admissible, predict, Prediction};
pub use queries::{generate_distinguishing_query, make_precondition_query, sieve_models};
pub use reduced::{detect_reduced, ReducedFindings};
pub use report::{accuracy, partial_accuracy, AffectedPal, AssessmentReport, Evidence, Strategy};

use crate::agent::AgentSim;
use crate::error::Result;
use crate::model::{DomainModel, PalId};
use crate::planner::{ObservationTrace, State};
use engine::Engine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessConfig {
    /// Node expansion cap for each reduced-functionality search.
    pub expansion_cap: Option<usize>,
    /// Queries per action spent looking for a state where it executes.
    pub probe_budget: usize,
}

impl Default for AssessConfig {
    fn default() -> Self {
        AssessConfig { expansion_cap: Some(200_000), probe_budget: 50 }
    }
}

/// Γ_δ before any mode is fixed, with the evidence for each entry.
pub fn identify_affected(
    m_init: &DomainModel,
    constraints: &PaConstraints,
    traces: &[ObservationTrace],
    expansion_cap: Option<usize>,
) -> Result<(Vec<AffectedPal>, ReducedFindings)> {
    let expanded = detect_expanded(m_init, constraints, traces)?;
    let reduced = detect_reduced(m_init, traces, expansion_cap)?;
    let mut map: BTreeMap<PalId, Evidence> = BTreeMap::new();
    for p in &expanded.flagged {
        map.entry(*p).or_default().expanded = true;
    }
    for p in &reduced.flagged {
        map.entry(*p).or_default().reduced = true;
    }
    let gamma = map.into_iter().map(|(pal, evidence)| AffectedPal { pal, evidence }).collect();
    Ok((gamma, reduced))
}

pub fn daaisy(
    m_init: &DomainModel,
    traces: &[ObservationTrace],
    agent: &AgentSim,
    states: &[State],
    cfg: &AssessConfig,
) -> Result<AssessmentReport> {
    m_init.ensure_concrete()?;
    let vocab = m_init.vocab();
    vocab.ensure_same(agent.vocab())?;
    let constraints = infer_pa_constraints(traces, vocab)?;
    let (gamma, reduced) = identify_affected(m_init, &constraints, traces, cfg.expansion_cap)?;
    let pals: Vec<PalId> = gamma.iter().map(|a| a.pal).collect();
    let fixed = fixed_modes(&constraints, vocab, &pals);

    let mut start = m_init.clone();
    for (p, m) in &fixed {
        start.set_mode(*p, *m);
    }
    let mut engine = Engine::new(agent, start, constraints, traces, states, cfg.probe_budget);
    for (p, _) in &fixed {
        engine.settle(*p);
    }
    let open: Vec<PalId> = pals.iter().copied().filter(|p| !fixed.iter().any(|(f, _)| f == p)).collect();
    engine.open(open);
    engine.run()?;
    let learned = engine.finish(traces)?;

    let mut gamma_delta: Vec<AffectedPal> =
        gamma.into_iter().filter(|a| !fixed.iter().any(|(f, _)| *f == a.pal)).collect();
    for p in &engine.escalated {
        gamma_delta.push(AffectedPal { pal: *p, evidence: Evidence { query: true, ..Evidence::default() } });
    }
    gamma_delta.sort_by_key(|a| a.pal);
    Ok(AssessmentReport {
        strategy: Strategy::Daaisy,
        learned_models: learned,
        gamma_delta,
        fixed,
        query_log: std::mem::take(&mut engine.log),
        resolutions: std::mem::take(&mut engine.resolutions),
        skipped: reduced.skipped,
        accuracy: None,
    })
}

/// Resolves every pal-tuple from the fully unknown model with no traces.
pub fn aia_baseline(agent: &AgentSim, states: &[State], cfg: &AssessConfig) -> Result<AssessmentReport> {
    let vocab = agent.vocab().clone();
    let start = DomainModel::unknown(vocab.clone());
    let constraints = PaConstraints::unconstrained(&vocab);
    let mut engine = Engine::new(agent, start, constraints, &[], states, cfg.probe_budget);
    engine.open(vocab.pals());
    engine.run()?;
    let learned = engine.finish(&[])?;
    Ok(AssessmentReport {
        strategy: Strategy::Aia,
        learned_models: learned,
        gamma_delta: vocab
            .pals()
            .map(|pal| AffectedPal { pal, evidence: Evidence::default() })
            .collect(),
        fixed: Vec::new(),
        query_log: std::mem::take(&mut engine.log),
        resolutions: std::mem::take(&mut engine.resolutions),
        skipped: Vec::new(),
        accuracy: None,
    })
}
