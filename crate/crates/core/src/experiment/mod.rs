//! Drift sweeps over a corpus: one trace per domain, seeded drift per trial,
//! both strategies per trial, and the CSV/JSON tables behind the plots.

pub mod corpus;
pub mod generate;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use corpus::DomainSource;

use crate::agent::{generate_trace, inject_drift, sample_random_states, AgentSim, DriftMethod, DriftSpec};
use crate::assess::{accuracy, aia_baseline, daaisy, AssessConfig, AssessmentReport};
use crate::error::{Error, Result};
use crate::model::{BindingMode, DomainModel};
use crate::pddl::{parse_domain_with, parse_problem, ProblemInstance};
use crate::planner::{ground, optimal_plan, ObservationTrace, State};

pub const CORPUS_ENV: &str = "DRIFT_CORPUS_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainEntry {
    pub name: String,
    /// Bundled or `corpus_dir` copy when absent.
    #[serde(default)]
    pub domain: Option<PathBuf>,
    #[serde(default)]
    pub problems: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domains: Vec<DomainEntry>,
    pub levels: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<DriftMethod>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_trace_length")]
    pub trace_length: usize,
    #[serde(default = "default_s_size")]
    pub s_size: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_cap")]
    pub expansion_cap: Option<usize>,
    #[serde(default = "default_probe_budget")]
    pub probe_budget: usize,
    /// Distinct by default so pal-tuple counts match the published ones.
    #[serde(default = "default_binding_mode")]
    pub binding_mode: BindingMode,
    #[serde(default)]
    pub corpus_dir: Option<PathBuf>,
}

fn default_methods() -> Vec<DriftMethod> {
    DriftMethod::ALL.to_vec()
}
fn default_trials() -> usize {
    10
}
fn default_trace_length() -> usize {
    10
}
fn default_s_size() -> usize {
    40
}
fn default_binding_mode() -> BindingMode {
    BindingMode::Distinct
}
fn default_cap() -> Option<usize> {
    AssessConfig::default().expansion_cap
}
fn default_probe_budget() -> usize {
    AssessConfig::default().probe_budget
}

impl ExperimentConfig {
    pub fn new(domains: &[&str], levels: &[f64]) -> Self {
        ExperimentConfig {
            domains: domains
                .iter()
                .map(|d| DomainEntry { name: d.to_string(), domain: None, problems: Vec::new() })
                .collect(),
            levels: levels.to_vec(),
            methods: default_methods(),
            trials: default_trials(),
            trace_length: default_trace_length(),
            s_size: default_s_size(),
            master_seed: 0,
            expansion_cap: default_cap(),
            probe_budget: default_probe_budget(),
            binding_mode: default_binding_mode(),
            corpus_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domains.is_empty() {
            return Err(Error::Config("no domains".into()));
        }
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l <= 1.0)) {
            return Err(Error::Config(format!("drift level {l} outside (0, 1]")));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.trace_length == 0 {
            return Err(Error::Config("trace_length must be at least 1".into()));
        }
        Ok(())
    }

    pub fn assess_config(&self) -> AssessConfig {
        AssessConfig { expansion_cap: self.expansion_cap, probe_budget: self.probe_budget }
    }

    fn source(&self, entry: &DomainEntry) -> Result<DomainSource> {
        let dir = self.corpus_dir.clone().or_else(|| std::env::var_os(CORPUS_ENV).map(PathBuf::from));
        let mut src = match &entry.domain {
            Some(path) => DomainSource {
                name: entry.name.clone(),
                domain: corpus::read(path)?,
                problems: Vec::new(),
            },
            None => corpus::load(dir.as_deref(), &entry.name)?,
        };
        if !entry.problems.is_empty() {
            src.problems = entry
                .problems
                .iter()
                .map(|p| Ok((p.display().to_string(), corpus::read(p)?)))
                .collect::<Result<_>>()?;
        }
        Ok(src)
    }
}

/// Independent, reproducible seed for one named stream.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn trial_seed(master: u64, domain: &str, level: f64, method: DriftMethod, trial: usize) -> u64 {
    derive_seed(master, &[domain, &format!("{level:.6}"), method.name(), &trial.to_string()])
}

/// Everything shared by the trials of one domain.
#[derive(Debug, Clone)]
pub struct DomainSetup {
    pub name: String,
    pub m_star: DomainModel,
    pub problem: ProblemInstance,
    pub agent: AgentSim,
    pub trace: ObservationTrace,
    pub states: Vec<State>,
}

impl DomainSetup {
    /// Uses the first problem whose optimal plan has at least
    /// `trace_length` steps and keeps that many triplets of its trace.
    pub fn new(src: &DomainSource, cfg: &ExperimentConfig) -> Result<Self> {
        let m_star = parse_domain_with(&src.domain, cfg.binding_mode)?;
        let mut longest = 0;
        for (_, text) in &src.problems {
            let problem = parse_problem(text, &m_star)?;
            let task = ground(&m_star, &problem)?;
            let Some(plan) = optimal_plan(&task, cfg.expansion_cap)? else { continue };
            longest = longest.max(plan.len());
            if plan.len() < cfg.trace_length {
                continue;
            }
            let agent = AgentSim::new(m_star.clone(), task.universe.clone(), vec![task.init.clone()])?
                .with_expansion_cap(cfg.expansion_cap);
            let trace = generate_trace(&agent, &problem)?.truncated(cfg.trace_length);
            let states = sample_random_states(&agent, cfg.s_size, derive_seed(cfg.master_seed, &[&src.name, "states"]));
            return Ok(DomainSetup { name: src.name.clone(), m_star, problem, agent, trace, states });
        }
        Err(Error::NoTrace(format!(
            "{}: no problem has an optimal plan of {} steps (longest {longest})",
            src.name, cfg.trace_length
        )))
    }
}

/// One domain's setup and its baseline run, which does not depend on drift.
#[derive(Debug)]
pub struct DomainRun {
    pub setup: DomainSetup,
    pub aia: Result<AssessmentReport>,
    pub aia_time: Duration,
}

#[derive(Debug)]
pub struct TrialRecord {
    pub domain: String,
    pub level: f64,
    pub method: DriftMethod,
    pub trial: usize,
    pub seed: u64,
    pub m_init: Result<DomainModel>,
    pub daaisy: Result<AssessmentReport>,
    pub time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub domain: String,
    pub level: f64,
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub strategy: String,
    pub status: String,
    pub queries: usize,
    /// For the baseline, queries until it matched the trial's DAAISy accuracy.
    pub matched_queries: usize,
    pub accuracy: f64,
    pub init_accuracy: f64,
    pub gamma_size: usize,
    pub learned_models: usize,
    #[serde(skip)]
    pub duration: Duration,
}

#[derive(Debug)]
pub struct Bench {
    pub domains: Vec<DomainRun>,
    pub trials: Vec<TrialRecord>,
    pub rows: Vec<ResultRow>,
}

impl Bench {
    pub fn domain(&self, name: &str) -> Option<&DomainRun> {
        self.domains.iter().find(|d| d.setup.name == name)
    }
}

pub fn run_trial(setup: &DomainSetup, level: f64, method: DriftMethod, trial: usize, cfg: &ExperimentConfig) -> TrialRecord {
    let seed = trial_seed(cfg.master_seed, &setup.name, level, method, trial);
    let start = Instant::now();
    let m_init = inject_drift(&setup.m_star, &DriftSpec { amount: level, method, seed });
    let daaisy = match &m_init {
        Ok(m) => daaisy(m, std::slice::from_ref(&setup.trace), &setup.agent, &setup.states, &cfg.assess_config())
            .and_then(|mut r| {
                r.score(&setup.m_star)?;
                Ok(r)
            }),
        Err(e) => Err(e.clone()),
    };
    TrialRecord {
        domain: setup.name.clone(),
        level,
        method,
        trial,
        seed,
        m_init,
        daaisy,
        time: start.elapsed(),
    }
}

pub fn run_domain(src: &DomainSource, cfg: &ExperimentConfig) -> Result<DomainRun> {
    let setup = DomainSetup::new(src, cfg)?;
    let start = Instant::now();
    let aia = aia_baseline(&setup.agent, &setup.states, &cfg.assess_config()).and_then(|mut r| {
        r.score(&setup.m_star)?;
        Ok(r)
    });
    Ok(DomainRun { setup, aia, aia_time: start.elapsed() })
}

pub fn run_bench(cfg: &ExperimentConfig) -> Result<Bench> {
    cfg.validate()?;
    let sources: Vec<DomainSource> = cfg.domains.iter().map(|d| cfg.source(d)).collect::<Result<_>>()?;
    let domains: Vec<DomainRun> = sources.par_iter().map(|s| run_domain(s, cfg)).collect::<Result<_>>()?;
    let mut keys = Vec::new();
    for (d, _) in domains.iter().enumerate() {
        for &method in &cfg.methods {
            for &level in &cfg.levels {
                for t in 0..cfg.trials {
                    keys.push((d, level, method, t));
                }
            }
        }
    }
    let trials: Vec<TrialRecord> = keys
        .par_iter()
        .map(|&(d, level, method, t)| run_trial(&domains[d].setup, level, method, t, cfg))
        .collect();
    let mut rows = Vec::with_capacity(trials.len() * 2);
    for rec in &trials {
        let run = domains.iter().find(|d| d.setup.name == rec.domain).expect("trial of a known domain");
        rows.extend(rows_for(rec, run)?);
    }
    rows.sort_by(|a, b| {
        (&a.domain, &a.method)
            .cmp(&(&b.domain, &b.method))
            .then(a.level.total_cmp(&b.level))
            .then((a.trial, &a.strategy).cmp(&(b.trial, &b.strategy)))
    });
    Ok(Bench { domains, trials, rows })
}

fn rows_for(rec: &TrialRecord, run: &DomainRun) -> Result<[ResultRow; 2]> {
    let m_star = &run.setup.m_star;
    let base = |strategy: &str| ResultRow {
        domain: rec.domain.clone(),
        level: rec.level,
        method: rec.method.name().to_string(),
        trial: rec.trial,
        seed: rec.seed,
        strategy: strategy.to_string(),
        status: "ok".to_string(),
        queries: 0,
        matched_queries: 0,
        accuracy: 0.0,
        init_accuracy: 0.0,
        gamma_size: 0,
        learned_models: 0,
        duration: Duration::ZERO,
    };
    let mut d = base("daaisy");
    let mut a = base("aia");
    let m_init = match &rec.m_init {
        Ok(m) => m,
        Err(e) => {
            d.status = e.kind().to_string();
            a.status = e.kind().to_string();
            return Ok([a, d]);
        }
    };
    d.init_accuracy = accuracy(m_init, m_star)?;
    a.init_accuracy = d.init_accuracy;
    d.duration = rec.time;
    let target = match &rec.daaisy {
        Ok(r) => {
            d.queries = r.query_count();
            d.matched_queries = r.query_count();
            d.accuracy = r.accuracy.unwrap_or(0.0);
            d.gamma_size = r.gamma_delta.len();
            d.learned_models = r.learned_models.len();
            Some(d.accuracy)
        }
        Err(e) => {
            d.status = e.kind().to_string();
            None
        }
    };
    a.duration = run.aia_time;
    match &run.aia {
        Ok(r) => {
            a.queries = r.query_count();
            a.matched_queries = match target {
                Some(t) => r.queries_to_reach(m_star, t)?,
                None => r.query_count(),
            };
            a.accuracy = r.accuracy.unwrap_or(0.0);
            a.gamma_size = r.gamma_delta.len();
            a.learned_models = r.learned_models.len();
        }
        Err(e) => a.status = e.kind().to_string(),
    }
    Ok([a, d])
}

pub fn rows_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Wall-clock per row, kept apart from the CSV so the latter is reproducible.
pub fn timings_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("domain,level,method,trial,strategy,duration_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.3}\n",
            r.domain,
            r.level,
            r.method,
            r.trial,
            r.strategy,
            r.duration.as_secs_f64() * 1000.0
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub domain: String,
    pub method: String,
    pub level: f64,
    pub strategy: String,
    pub trials: usize,
    pub errors: usize,
    pub queries_mean: f64,
    pub queries_std: f64,
    pub matched_queries_mean: f64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per domain, method, level and strategy, over rows with status `ok`.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String, u64, String), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.domain.clone(), r.method.clone(), r.level.to_bits(), r.strategy.clone()))
            .or_default()
            .push(r);
    }
    let mut out: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((domain, method, level, strategy), rs)| {
            let ok: Vec<&&ResultRow> = rs.iter().filter(|r| r.status == "ok").collect();
            let q: Vec<f64> = ok.iter().map(|r| r.queries as f64).collect();
            let mq: Vec<f64> = ok.iter().map(|r| r.matched_queries as f64).collect();
            let acc: Vec<f64> = ok.iter().map(|r| r.accuracy).collect();
            let (queries_mean, queries_std) = mean_std(&q);
            let (accuracy_mean, accuracy_std) = mean_std(&acc);
            SummaryRow {
                domain,
                method,
                level: f64::from_bits(level),
                strategy,
                trials: ok.len(),
                errors: rs.len() - ok.len(),
                queries_mean,
                queries_std,
                matched_queries_mean: mean_std(&mq).0,
                accuracy_mean,
                accuracy_std,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (&a.domain, &a.method)
            .cmp(&(&b.domain, &b.method))
            .then(a.level.total_cmp(&b.level))
            .then(a.strategy.cmp(&b.strategy))
    });
    out
}

pub fn summary_json(rows: &[ResultRow]) -> Result<String> {
    serde_json::to_string_pretty(&summarize(rows)).map_err(|e| Error::Io(e.to_string()))
}
