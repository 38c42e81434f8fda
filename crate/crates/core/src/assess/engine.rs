use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use log::{debug, warn};

use super::constraints::PaConstraints;
use super::predict::{predict, Prediction};
use super::queries::{plan_text, splits, state_queries, witness_queries};
use crate::agent::{answer_query, AgentSim, Query, QueryResponse};
use crate::error::{Error, Result};
use crate::model::{DomainModel, Mode, PaValueSet, PalId};
use crate::planner::{validate_trace, ActionTriplet, ObservationTrace, State, Universe};

/// Point at which a pal-tuple's mode was settled.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub pal: PalId,
    /// `None` when surviving candidates still disagree.
    pub mode: Option<Mode>,
    /// Queries asked so far, this one's included.
    pub queries: usize,
    /// Candidates right after the resolution, unresolved pal-tuples left `?`.
    pub snapshot: Vec<DomainModel>,
}

pub(crate) struct Engine<'a> {
    agent: &'a AgentSim,
    universe: Arc<Universe>,
    states: &'a [State],
    probe_budget: usize,
    pub constraints: PaConstraints,
    pub candidates: Vec<DomainModel>,
    pub log: Vec<(Query, QueryResponse)>,
    asked: HashSet<Query>,
    /// Truth patterns over an action's lifted atoms already put to the agent.
    patterns: HashSet<(usize, Vec<bool>)>,
    failed: Vec<(usize, Vec<bool>)>,
    witnesses: Vec<ActionTriplet>,
    probes: Vec<usize>,
    pending: BTreeSet<PalId>,
    /// Pal-tuples still carrying their starting value unexamined.
    held: Vec<bool>,
    pub escalated: Vec<PalId>,
    pub resolutions: Vec<Resolution>,
}

impl<'a> Engine<'a> {
    pub fn new(
        agent: &'a AgentSim,
        start: DomainModel,
        constraints: PaConstraints,
        traces: &[ObservationTrace],
        states: &'a [State],
        probe_budget: usize,
    ) -> Self {
        let vocab = start.vocab().clone();
        let witnesses = traces.iter().flat_map(|t| t.triplets()).collect();
        Engine {
            agent,
            universe: agent.universe().clone(),
            states,
            probe_budget,
            constraints,
            candidates: vec![start],
            log: Vec::new(),
            asked: HashSet::new(),
            patterns: HashSet::new(),
            failed: Vec::new(),
            witnesses,
            probes: vec![0; vocab.actions().len()],
            pending: BTreeSet::new(),
            held: vec![true; vocab.pal_count()],
            escalated: Vec::new(),
            resolutions: Vec::new(),
        }
    }

    /// Marks `pals` unknown in every candidate and queues them.
    pub fn open(&mut self, pals: impl IntoIterator<Item = PalId>) {
        for p in pals {
            self.held[p.index()] = false;
            self.pending.insert(p);
            for m in &mut self.candidates {
                m.set_mode(p, Mode::Unknown);
            }
        }
    }

    pub fn settle(&mut self, pal: PalId) {
        self.held[pal.index()] = false;
    }

    pub fn run(&mut self) -> Result<()> {
        while let Some(pal) = self.pending.pop_first() {
            self.resolve(pal)?;
        }
        Ok(())
    }

    fn predictions(&self, models: &[DomainModel], q: &Query) -> Vec<Prediction> {
        models.iter().map(|m| predict(m, &self.constraints, &self.universe, q)).collect()
    }

    fn strictly_admissible(&self, m: &DomainModel, pal: PalId) -> bool {
        let v = m.pa_value(pal.pa());
        !PaValueSet::ALL.matching(v.pre, v.eff).intersect(self.constraints.get(pal.pa())).is_empty()
    }

    fn prefer_admissible(&self, variants: Vec<DomainModel>, pal: PalId) -> Vec<DomainModel> {
        let strict: Vec<DomainModel> =
            variants.iter().filter(|m| self.strictly_admissible(m, pal)).cloned().collect();
        if strict.is_empty() {
            variants
        } else {
            strict
        }
    }

    fn resolve(&mut self, pal: PalId) -> Result<()> {
        let action = self.universe.vocab().atom(pal.pa()).action;
        let mut variants = Vec::new();
        for m in &self.candidates {
            for mode in Mode::CONCRETE {
                let v = m.with_mode(pal, mode);
                if v.pa_value(pal.pa()).is_legal() {
                    variants.push(v);
                }
            }
        }
        variants = self.prefer_admissible(variants, pal);
        let replayed: Vec<DomainModel> = variants
            .iter()
            .filter(|m| self.log.iter().all(|(q, r)| self.query_action(q) != Some(action) || self.admits(m, q, r)))
            .cloned()
            .collect();
        if replayed.is_empty() {
            warn!("no variant of {} replays the log; keeping all", self.universe.vocab().pal_text(pal));
        } else {
            variants = replayed;
        }
        self.candidates = variants;
        loop {
            let labels: Vec<Mode> = self.candidates.iter().map(|m| m.mode(pal)).collect();
            if labels.iter().all(|l| *l == labels[0]) {
                break;
            }
            let Some(q) = self.next_query(pal, &labels) else {
                debug!("no distinguishing query for {}", self.universe.vocab().pal_text(pal));
                break;
            };
            self.ask(q, action)?;
        }
        let first = self.candidates[0].mode(pal);
        let mode = self.candidates.iter().all(|m| m.mode(pal) == first).then_some(first);
        self.resolutions.push(Resolution {
            pal,
            mode,
            queries: self.log.len(),
            snapshot: self.candidates.clone(),
        });
        Ok(())
    }

    fn query_action(&self, q: &Query) -> Option<usize> {
        match q.plan.as_slice() {
            [g] => Some(self.universe.action(*g).action),
            _ => None,
        }
    }

    fn admits(&self, m: &DomainModel, q: &Query, r: &QueryResponse) -> bool {
        predict(m, &self.constraints, &self.universe, q).admits(q, r)
    }

    fn ask(&mut self, q: Query, action: usize) -> Result<()> {
        let r = answer_query(self.agent, &q)?;
        debug!("query {} -> {}", plan_text(&self.universe, &q), r.executed);
        self.asked.insert(q.clone());
        if let [g] = q.plan.as_slice() {
            let p = pattern(&self.universe, &q.start, *g);
            if r.executed == 0 {
                self.failed.push((action, p.clone()));
            }
            self.patterns.insert((action, p));
        }
        if r.executed == 1 {
            let t = ActionTriplet { pre: q.start.clone(), action: q.plan[0], post: r.state.clone() };
            self.constraints.add_triplet(&self.universe, &t)?;
            self.witnesses.push(t);
        }
        self.log.push((q.clone(), r.clone()));
        let kept: Vec<DomainModel> =
            self.candidates.iter().filter(|m| self.admits(m, &q, &r)).cloned().collect();
        if !kept.is_empty() {
            self.candidates = kept;
            return Ok(());
        }
        // The response contradicts every candidate, so some value taken over
        // unexamined from the starting model is wrong. Open the rest of the
        // action and retry.
        let extra: Vec<PalId> = self
            .universe
            .vocab()
            .action_pals(action)
            .filter(|p| self.held[p.index()])
            .collect();
        if extra.is_empty() {
            return Err(Error::Contradiction(format!(
                "response to {} rules out every candidate",
                plan_text(&self.universe, &q)
            )));
        }
        warn!(
            "response to {} contradicts all candidates; reopening {} pal-tuples",
            plan_text(&self.universe, &q),
            extra.len()
        );
        self.escalated.extend(extra.iter().copied());
        self.open(extra);
        let kept: Vec<DomainModel> =
            self.candidates.iter().filter(|m| self.admits(m, &q, &r)).cloned().collect();
        if kept.is_empty() {
            return Err(Error::Contradiction(format!(
                "response to {} rules out every candidate",
                plan_text(&self.universe, &q)
            )));
        }
        self.candidates = kept;
        Ok(())
    }

    fn informative(&self, q: &Query, labels: &[Mode]) -> bool {
        !self.asked.contains(q) && splits(labels, &self.predictions(&self.candidates, q))
    }

    fn next_query(&mut self, pal: PalId, labels: &[Mode]) -> Option<Query> {
        let u = self.universe.clone();
        let action = u.vocab().atom(pal.pa()).action;
        for w in &self.witnesses {
            if u.action(w.action).action != action {
                continue;
            }
            if let Some(qs) = witness_queries(&u, pal, w) {
                for q in qs {
                    if self.informative(&q, labels) {
                        return Some(q);
                    }
                }
            }
        }
        if let Some(q) = state_queries(&u, pal, self.states).find(|q| self.informative(q, labels)) {
            return Some(q);
        }
        if self.probes[action] >= self.probe_budget {
            return None;
        }
        let q = self.probe(pal)?;
        self.probes[action] += 1;
        Some(q)
    }

    /// A query some candidate expects to succeed, aimed at producing a
    /// witness triplet for γ's action. Each truth pattern of the action's
    /// lifted atoms is tried once. Patterns whose true atoms all lie inside
    /// a pattern that already failed go last, then most atoms true first.
    fn probe(&self, pal: PalId) -> Option<Query> {
        let u = &self.universe;
        let action = u.vocab().atom(pal.pa()).action;
        let mut best: Option<(ProbeKey, Query)> = None;
        for (si, s) in self.states.iter().enumerate() {
            for g in u.groundings(action) {
                let q = Query::single(s.clone(), g);
                let pat = pattern(u, s, g);
                if self.patterns.contains(&(action, pat.clone())) {
                    continue;
                }
                if !self.predictions(&self.candidates, &q).iter().any(Prediction::can_succeed) {
                    continue;
                }
                let ga = u.action(g);
                let collides = super::queries::collision_free(u, g, pal).is_none();
                let held = ga.atoms.iter().filter(|a| s.contains(**a)).count();
                let dominated = self
                    .failed
                    .iter()
                    .any(|(a, f)| *a == action && pat.iter().zip(f).all(|(x, y)| !*x || *y));
                let key = (dominated, collides, std::cmp::Reverse(held), si, g);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, q));
                }
            }
        }
        best.map(|(_, q)| q)
    }

    /// Concrete candidates consistent with every trace and logged response.
    pub fn finish(&mut self, traces: &[ObservationTrace]) -> Result<Vec<DomainModel>> {
        let mut out: Vec<DomainModel> = Vec::new();
        for m in &self.candidates {
            if !m.is_concrete() {
                continue;
            }
            let mut ok = true;
            for t in traces {
                ok &= validate_trace(m, t)?;
            }
            ok &= self.log.iter().all(|(q, r)| self.admits(m, q, r));
            if ok && !out.contains(m) {
                out.push(m.clone());
            }
        }
        if out.is_empty() {
            return Err(Error::Contradiction("no candidate is consistent with the observations and responses".into()));
        }
        out.sort_by(|a, b| a.modes().cmp(b.modes()));
        Ok(out)
    }
}

/// Dominated, collides, atoms held (most first), state index, grounding.
type ProbeKey = (bool, bool, std::cmp::Reverse<usize>, usize, usize);

fn pattern(u: &Universe, s: &State, g: usize) -> Vec<bool> {
    u.action(g).atoms.iter().map(|a| s.contains(*a)).collect()
}
