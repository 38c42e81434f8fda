use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use drift_core::agent::{generate_trace, inject_drift, sample_random_states, AgentSim, DriftMethod, DriftSpec};
use drift_core::assess::{aia_baseline, daaisy, AssessConfig};
use drift_core::experiment::{self, corpus, ExperimentConfig, CORPUS_ENV};
use drift_core::model::{differing_pals, model_diff, BindingMode, DomainModel};
use drift_core::pddl::{parse_domain_with, parse_problem, print_domain, read_trace_in, write_trace, ProblemInstance};
use drift_core::planner::{ground, GroundTask};
use drift_core::Error;

#[derive(Parser)]
#[command(name = "drift", version, about = "Assess a planning agent whose action model has drifted")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identify and resolve drifted pal-tuples of the agent defined by --domain.
    Assess(AssessArgs),
    /// Run a drift sweep from a TOML config.
    Bench(BenchArgs),
    /// List the pal-tuples two models disagree on.
    Diff(DiffArgs),
    /// Write the agent's optimal trace for a problem.
    Trace(TraceArgs),
    /// Write a drifted copy of a domain.
    Drift(DriftArgs),
}

#[derive(Args)]
struct DomainArgs {
    /// Domain file, or the name of a corpus domain.
    #[arg(long)]
    domain: String,
    /// Problem file; defaults to the first corpus problem of a named domain.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Directory holding `<name>/domain.pddl` corpora.
    #[arg(long, env = CORPUS_ENV)]
    corpus_dir: Option<PathBuf>,
    /// Enumerate lifted atoms with distinct parameters only.
    #[arg(long)]
    distinct: bool,
}

#[derive(Args)]
struct DriftFlags {
    /// Fraction of pal-tuples to flip.
    #[arg(long)]
    drift_amount: Option<f64>,
    #[arg(long, default_value = "mixed")]
    drift_method: DriftMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AssessArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    drift: DriftFlags,
    /// Previously known model; otherwise derived from --drift-amount, or the agent's own model.
    #[arg(long, conflicts_with = "drift_amount")]
    init: Option<PathBuf>,
    /// Observation trace file; generated from the problem when absent.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    trace_length: usize,
    #[arg(long, default_value_t = 40)]
    s_size: usize,
    #[arg(long)]
    expansion_cap: Option<usize>,
    /// Also run the query-everything baseline.
    #[arg(long)]
    baseline: bool,
    #[arg(long, default_value = "drift-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "drift-bench")]
    out_dir: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DiffArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    distinct: bool,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    trace_length: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DriftArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    drift: DriftFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Assess(a) => assess(a),
        Command::Bench(b) => bench(b),
        Command::Diff(d) => diff(d),
        Command::Trace(t) => trace(t),
        Command::Drift(d) => drift(d),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = match e.downcast_ref::<Error>() {
                Some(err) => (err.kind(), exit_code(err)),
                None => ("other", 1),
            };
            let record = serde_json::json!({ "error": kind, "message": format!("{e:#}") });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Parse { .. } | Error::UnsupportedFeature(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

struct Loaded {
    m_star: DomainModel,
    problem: ProblemInstance,
    task: GroundTask,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(args: &DomainArgs) -> anyhow::Result<Loaded> {
    let mode = if args.distinct { BindingMode::Distinct } else { BindingMode::WithRepeats };
    let path = Path::new(&args.domain);
    let looks_like_path = path.exists() || path.extension().is_some() || path.components().count() > 1;
    let (domain_text, default_problem) = if looks_like_path {
        (read(path)?, None)
    } else {
        let src = corpus::load(args.corpus_dir.as_deref(), &args.domain)?;
        let first = src.problems.first().map(|p| p.1.clone());
        (src.domain, first)
    };
    let m_star = parse_domain_with(&domain_text, mode)?;
    let problem_text = match (&args.problem, default_problem) {
        (Some(p), _) => read(p)?,
        (None, Some(t)) => t,
        (None, None) => return Err(Error::Config("--problem is required for a domain file".into()).into()),
    };
    let problem = parse_problem(&problem_text, &m_star)?;
    let task = ground(&m_star, &problem)?;
    Ok(Loaded { m_star, problem, task })
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn drifted(m_star: &DomainModel, flags: &DriftFlags) -> anyhow::Result<Option<DomainModel>> {
    match flags.drift_amount {
        Some(amount) => {
            let spec = DriftSpec { amount, method: flags.drift_method, seed: flags.seed };
            Ok(Some(inject_drift(m_star, &spec)?))
        }
        None => Ok(None),
    }
}

fn assess(args: AssessArgs) -> anyhow::Result<()> {
    let loaded = load(&args.domain)?;
    let m_star = &loaded.m_star;
    let m_init = match (&args.init, drifted(m_star, &args.drift)?) {
        (Some(p), _) => parse_domain_with(&read(p)?, m_star.vocab().binding_mode())?,
        (None, Some(m)) => m,
        (None, None) => m_star.clone(),
    };
    let cap = args.expansion_cap.or(AssessConfig::default().expansion_cap);
    let agent = AgentSim::new(m_star.clone(), loaded.task.universe.clone(), vec![loaded.task.init.clone()])?
        .with_expansion_cap(cap);
    let trace = match &args.trace {
        Some(p) => read_trace_in(&read(p)?, m_star, agent.universe())?,
        None => generate_trace(&agent, &loaded.problem)?.truncated(args.trace_length),
    };
    let states = sample_random_states(&agent, args.s_size, args.drift.seed);
    let cfg = AssessConfig { expansion_cap: cap, ..AssessConfig::default() };
    let mut report = daaisy(&m_init, std::slice::from_ref(&trace), &agent, &states, &cfg)?;
    report.score(m_star)?;

    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let u = agent.universe();
    write(&args.out_dir.join("report.txt"), &report.to_text(u)?)?;
    write(&args.out_dir.join("init.pddl"), &print_domain(&m_init)?)?;
    write(&args.out_dir.join("trace.txt"), &write_trace(&trace))?;
    for (i, m) in report.learned_models.iter().enumerate() {
        let name = if i == 0 { "learned.pddl".to_string() } else { format!("learned-{i}.pddl") };
        write(&args.out_dir.join(name), &print_domain(m)?)?;
    }
    println!("query_count = {}", report.query_count());
    println!("gamma_delta_size = {}", report.gamma_delta.len());
    println!("learned_models = {}", report.learned_models.len());
    println!("accuracy = {:.6}", report.accuracy.unwrap_or(0.0));
    if args.baseline {
        let mut base = aia_baseline(&agent, &states, &cfg)?;
        base.score(m_star)?;
        let target = report.accuracy.unwrap_or(0.0);
        write(&args.out_dir.join("baseline.txt"), &base.to_text(u)?)?;
        println!("baseline_query_count = {}", base.query_count());
        println!("baseline_matched_queries = {}", base.queries_to_reach(m_star, target)?);
        println!("baseline_accuracy = {:.6}", base.accuracy.unwrap_or(0.0));
    }
    Ok(())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::from_toml(&read(&args.config)?)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    for d in &mut cfg.domains {
        d.domain = d.domain.take().map(|p| base.join(p));
        d.problems = d.problems.iter().map(|p| base.join(p)).collect();
    }
    if let Some(dir) = cfg.corpus_dir.take() {
        cfg.corpus_dir = Some(base.join(dir));
    }
    let result = experiment::run_bench(&cfg)?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    write(&args.out_dir.join("results.csv"), &experiment::rows_csv(&result.rows)?)?;
    write(&args.out_dir.join("summary.json"), &experiment::summary_json(&result.rows)?)?;
    write(&args.out_dir.join("timings.csv"), &experiment::timings_csv(&result.rows))?;
    let errors = result.rows.iter().filter(|r| r.status != "ok").count();
    println!("rows = {}", result.rows.len());
    println!("error_rows = {errors}");
    Ok(())
}

fn diff(args: DiffArgs) -> anyhow::Result<()> {
    let mode = if args.distinct { BindingMode::Distinct } else { BindingMode::WithRepeats };
    let a = parse_domain_with(&read(&args.a)?, mode)?;
    let b = parse_domain_with(&read(&args.b)?, mode)?;
    let vocab = a.vocab().clone();
    for p in differing_pals(&a, &b)? {
        println!("{} {} {}", vocab.pal_text(p), a.mode(p).symbol(), b.mode(p).symbol());
    }
    println!("delta = {}", model_diff(&a, &b)?);
    Ok(())
}

fn trace(args: TraceArgs) -> anyhow::Result<()> {
    let loaded = load(&args.domain)?;
    let agent = AgentSim::new(loaded.m_star.clone(), loaded.task.universe.clone(), vec![loaded.task.init.clone()])?;
    let mut t = generate_trace(&agent, &loaded.problem)?;
    if let Some(n) = args.trace_length {
        t = t.truncated(n);
    }
    emit(args.out.as_deref(), &write_trace(&t))
}

fn drift(args: DriftArgs) -> anyhow::Result<()> {
    let loaded = load(&args.domain)?;
    let amount = args.drift.drift_amount.unwrap_or(0.0);
    let spec = DriftSpec { amount, method: args.drift.drift_method, seed: args.drift.seed };
    let m = inject_drift(&loaded.m_star, &spec)?;
    emit(args.out.as_deref(), &print_domain(&m)?)
}
