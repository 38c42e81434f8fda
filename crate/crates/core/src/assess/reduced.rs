use std::collections::BTreeSet;

use log::warn;

use crate::error::{Error, Result};
use crate::model::{DomainModel, PalId};
use crate::planner::{shortest_paths, CompiledModel, ObservationTrace};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReducedFindings {
    pub flagged: Vec<PalId>,
    /// `(trace, i, j)` endpoint pairs whose M_init search hit the expansion cap.
    pub skipped: Vec<(usize, usize, usize)>,
    /// `(trace, i, j)` pairs where M_init plans strictly shorter than observed.
    pub shorter: Vec<(usize, usize, usize)>,
}

/// Finds observed state pairs that M_init connects with a strictly shorter
/// plan and flags every pal-tuple of the action where that plan first
/// departs from the observed trajectory.
pub fn detect_reduced(
    m_init: &DomainModel,
    traces: &[ObservationTrace],
    expansion_cap: Option<usize>,
) -> Result<ReducedFindings> {
    let vocab = m_init.vocab();
    let mut flagged_actions = BTreeSet::new();
    let mut out = ReducedFindings::default();
    for (ti, trace) in traces.iter().enumerate() {
        let u = trace.universe();
        let compiled = CompiledModel::new(m_init, u)?;
        let states = trace.states();
        let n = trace.len();
        for i in 0..n {
            let targets = &states[i + 1..];
            let plans = match shortest_paths(&compiled, u, &states[i], targets, n - i - 1, expansion_cap) {
                Ok(p) => p,
                Err(Error::ResourceExhausted { expanded }) => {
                    warn!("trace {ti}: search from state {i} exhausted after {expanded} expansions; pairs skipped");
                    out.skipped.extend((i + 1..=n).map(|j| (ti, i, j)));
                    continue;
                }
                Err(e) => return Err(e),
            };
            for (k, plan) in plans.into_iter().enumerate() {
                let j = i + 1 + k;
                let Some(plan) = plan else { continue };
                if plan.len() >= j - i {
                    continue;
                }
                out.shorter.push((ti, i, j));
                for (step, &g_init) in plan.iter().enumerate() {
                    let g_drift = trace.actions()[i + step];
                    if g_init != g_drift {
                        flagged_actions.insert(u.action(g_init).action);
                        break;
                    }
                    let next = compiled.apply(g_init, &states[i + step]);
                    if next.as_ref() != Some(&states[i + step + 1]) {
                        flagged_actions.insert(u.action(g_init).action);
                        break;
                    }
                }
            }
        }
    }
    for a in flagged_actions {
        out.flagged.extend(vocab.action_pals(a));
    }
    Ok(out)
}
