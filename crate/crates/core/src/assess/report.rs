use std::fmt::Write as _;

use super::engine::Resolution;
use crate::agent::{Query, QueryResponse};
use crate::error::Result;
use crate::model::{model_diff, DomainModel, Mode, PalId};
use crate::pddl::{print_domain, state_text};
use crate::planner::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Daaisy,
    Aia,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Daaisy => "daaisy",
            Strategy::Aia => "aia",
        }
    }
}

/// Why a pal-tuple entered Γ_δ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Evidence {
    pub expanded: bool,
    pub reduced: bool,
    /// Reopened after a response contradicted every candidate.
    pub query: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffectedPal {
    pub pal: PalId,
    pub evidence: Evidence,
}

#[derive(Debug, Clone)]
pub struct AssessmentReport {
    pub strategy: Strategy,
    /// Sorted by mode vector; a single model unless some variants could
    /// not be told apart.
    pub learned_models: Vec<DomainModel>,
    /// Canonical order.
    pub gamma_delta: Vec<AffectedPal>,
    /// Modes set directly from the observations.
    pub fixed: Vec<(PalId, Mode)>,
    pub query_log: Vec<(Query, QueryResponse)>,
    pub resolutions: Vec<Resolution>,
    /// `(trace, i, j)` endpoint pairs the reduced-functionality search skipped.
    pub skipped: Vec<(usize, usize, usize)>,
    pub accuracy: Option<f64>,
}

impl AssessmentReport {
    pub fn query_count(&self) -> usize {
        self.query_log.len()
    }

    pub fn gamma_pals(&self) -> impl Iterator<Item = PalId> + '_ {
        self.gamma_delta.iter().map(|a| a.pal)
    }

    /// Lowest accuracy among the learned models.
    pub fn score(&mut self, m_star: &DomainModel) -> Result<f64> {
        let mut worst = 1.0f64;
        for m in &self.learned_models {
            worst = worst.min(accuracy(m, m_star)?);
        }
        self.accuracy = Some(worst);
        Ok(worst)
    }

    /// Queries asked by the time every candidate scores at least `target`
    /// against `m_star`, with `?` counted as wrong. The full count when the
    /// target is never reached.
    pub fn queries_to_reach(&self, m_star: &DomainModel, target: f64) -> Result<usize> {
        const SLACK: f64 = 1e-9;
        let start = DomainModel::unknown(m_star.vocab().clone());
        if partial_accuracy(&start, m_star)? + SLACK >= target {
            return Ok(0);
        }
        for r in &self.resolutions {
            let mut worst = 1.0f64;
            for m in &r.snapshot {
                worst = worst.min(partial_accuracy(m, m_star)?);
            }
            if worst + SLACK >= target {
                return Ok(r.queries);
            }
        }
        Ok(self.query_count())
    }

    pub fn to_text(&self, universe: &Universe) -> Result<String> {
        let vocab = universe.vocab();
        let mut out = String::new();
        let _ = writeln!(out, "strategy = {}", self.strategy.name());
        let _ = writeln!(out, "query_count = {}", self.query_count());
        let _ = writeln!(out, "gamma_delta_size = {}", self.gamma_delta.len());
        let _ = writeln!(out, "learned_models = {}", self.learned_models.len());
        let _ = writeln!(out, "skipped_pairs = {}", self.skipped.len());
        if let Some(a) = self.accuracy {
            let _ = writeln!(out, "accuracy = {a:.6}");
        }
        out.push_str("\n(gamma-delta");
        for a in &self.gamma_delta {
            let _ = write!(out, "\n  (\"{}\"", vocab.pal_text(a.pal));
            for (on, tag) in [(a.evidence.expanded, "expanded"), (a.evidence.reduced, "reduced"), (a.evidence.query, "query")] {
                if on {
                    let _ = write!(out, " :{tag}");
                }
            }
            out.push(')');
        }
        out.push_str(")\n\n(fixed");
        for (p, m) in &self.fixed {
            let _ = write!(out, "\n  (\"{}\" {})", vocab.pal_text(*p), m.symbol());
        }
        out.push_str(")\n\n(query-log");
        for (i, (q, r)) in self.query_log.iter().enumerate() {
            let _ = write!(out, "\n  (query {i}\n    (start {})\n    (plan", state_text(universe, &q.start));
            for g in &q.plan {
                let _ = write!(out, " {}", universe.action_text(*g));
            }
            let _ = write!(out, ")\n    (executed {})\n    (result {}))", r.executed, state_text(universe, &r.state));
        }
        out.push_str(")\n");
        for (i, m) in self.learned_models.iter().enumerate() {
            let _ = writeln!(out, "\n; learned model {i}");
            out.push_str(&print_domain(m)?);
        }
        Ok(out)
    }
}

/// `1 − Δ(M, M*) / nPals`.
pub fn accuracy(m: &DomainModel, m_star: &DomainModel) -> Result<f64> {
    m.ensure_concrete()?;
    m_star.ensure_concrete()?;
    let n = m.vocab().pal_count();
    if n == 0 {
        model_diff(m, m_star)?;
        return Ok(1.0);
    }
    Ok(1.0 - model_diff(m, m_star)? as f64 / n as f64)
}

/// Like [`accuracy`] but `?` modes count as differing.
pub fn partial_accuracy(m: &DomainModel, m_star: &DomainModel) -> Result<f64> {
    m.vocab().ensure_same(m_star.vocab())?;
    let n = m.vocab().pal_count();
    if n == 0 {
        return Ok(1.0);
    }
    let right = m.modes().iter().zip(m_star.modes()).filter(|(a, b)| a == b && a.is_concrete()).count();
    Ok(right as f64 / n as f64)
}
