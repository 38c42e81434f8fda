use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drift_core::agent::{answer_query, generate_trace, inject_drift, sample_random_states, AgentSim, DriftMethod, DriftSpec, Query};
use drift_core::assess::{daaisy, detect_expanded, infer_pa_constraints, sieve_models, AssessConfig};
use drift_core::experiment::corpus;
use drift_core::model::{model_diff, BindingMode, DomainModel, Mode, PaValue};
use drift_core::pddl::{parse_domain_with, parse_problem, print_domain, read_trace, write_trace};
use drift_core::planner::{apply, ground, shortest_paths, validate_trace, CompiledModel, ObservationTrace, State, Universe};

const DOMAINS: [&str; 4] = ["gripper", "blocksworld", "miconic", "satellite"];

struct Setup {
    m_star: DomainModel,
    u: Arc<Universe>,
    agent: AgentSim,
    states: Vec<State>,
}

fn setup(name: &str, mode: BindingMode) -> Setup {
    let src = corpus::bundled(name).unwrap();
    let m_star = parse_domain_with(&src.domain, mode).unwrap();
    let problem = parse_problem(&src.problems[0].1, &m_star).unwrap();
    let task = ground(&m_star, &problem).unwrap();
    let agent = AgentSim::new(m_star.clone(), task.universe.clone(), vec![task.init.clone()]).unwrap();
    let states = sample_random_states(&agent, 30, 7);
    Setup { m_star, u: task.universe.clone(), agent, states }
}

fn domain() -> impl Strategy<Value = &'static str> {
    prop::sample::select(DOMAINS.to_vec())
}

fn method() -> impl Strategy<Value = DriftMethod> {
    prop::sample::select(DriftMethod::ALL.to_vec())
}

fn binding() -> impl Strategy<Value = BindingMode> {
    prop::sample::select(vec![BindingMode::WithRepeats, BindingMode::Distinct])
}

/// A state of 𝒮 and a ground action, chosen by `seed`.
fn random_query(s: &Setup, seed: u64, len: usize) -> Query {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = s.states[rng.gen_range(0..s.states.len())].clone();
    let plan = (0..len).map(|_| rng.gen_range(0..s.u.action_count())).collect();
    Query { start, plan }
}

/// Does `v` on a single atom reproduce its observed pre and post truth values?
fn reproduces(v: PaValue, pre: bool, post: bool) -> bool {
    let applicable = match v.pre {
        Mode::Plus => pre,
        Mode::Minus => !pre,
        _ => true,
    };
    let expected = match v.eff {
        Mode::Plus => true,
        Mode::Minus => false,
        _ => pre,
    };
    applicable && expected == post
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn drift_flips_exactly_the_requested_count(
        name in domain(), mode in binding(), m in method(), amount in 0.01f64..=1.0, seed in any::<u64>()
    ) {
        let m_star = parse_domain_with(&corpus::bundled(name).unwrap().domain, mode).unwrap();
        let spec = DriftSpec { amount, method: m, seed };
        match inject_drift(&m_star, &spec) {
            Ok(m_init) => {
                let n = m_star.vocab().pal_count();
                prop_assert_eq!(model_diff(&m_init, &m_star).unwrap(), (amount * n as f64).round() as usize);
                prop_assert!(m_init.is_concrete());
                for pa in 0..m_star.vocab().pa_count() {
                    prop_assert!(m_init.pa_value(pa).is_legal());
                }
                for (a, b) in m_init.modes().iter().zip(m_star.modes()) {
                    match m {
                        DriftMethod::Drop => prop_assert!(a == b || *a == Mode::Absent),
                        DriftMethod::Add => prop_assert!(a == b || *b == Mode::Absent),
                        DriftMethod::Mixed => {}
                    }
                }
                prop_assert_eq!(inject_drift(&m_star, &spec).unwrap(), m_init);
            }
            Err(e) => prop_assert_eq!(e.kind(), "infeasible-drift"),
        }
    }

    #[test]
    fn model_diff_is_symmetric_and_triangular(
        name in domain(), a in 0.0f64..=1.0, b in 0.0f64..=1.0, seeds in any::<(u64, u64)>()
    ) {
        let m = parse_domain_with(&corpus::bundled(name).unwrap().domain, BindingMode::Distinct).unwrap();
        let m1 = inject_drift(&m, &DriftSpec { amount: a, method: DriftMethod::Mixed, seed: seeds.0 }).unwrap();
        let m2 = inject_drift(&m, &DriftSpec { amount: b, method: DriftMethod::Mixed, seed: seeds.1 }).unwrap();
        let d = |x: &DomainModel, y: &DomainModel| model_diff(x, y).unwrap();
        prop_assert_eq!(d(&m1, &m1), 0);
        prop_assert_eq!(d(&m1, &m2), d(&m2, &m1));
        prop_assert!(d(&m1, &m2) <= d(&m1, &m) + d(&m, &m2));
        prop_assert_eq!(d(&m1, &m2) == 0, m1 == m2);
    }

    #[test]
    fn printed_models_parse_back(name in domain(), mode in binding(), amount in 0.0f64..=1.0, seed in any::<u64>()) {
        let m_star = parse_domain_with(&corpus::bundled(name).unwrap().domain, mode).unwrap();
        let m = inject_drift(&m_star, &DriftSpec { amount, method: DriftMethod::Mixed, seed }).unwrap();
        let text = print_domain(&m).unwrap();
        prop_assert_eq!(parse_domain_with(&text, mode).unwrap(), m);
        prop_assert_eq!(print_domain(&parse_domain_with(&text, mode).unwrap()).unwrap(), text);
    }

    #[test]
    fn traces_round_trip(name in domain(), seed in any::<u64>(), len in 0usize..8) {
        let s = setup(name, BindingMode::WithRepeats);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut states = vec![s.agent.initial_states()[0].clone()];
        let mut actions = Vec::new();
        for _ in 0..len {
            let cur = states.last().unwrap().clone();
            let next = (0..s.u.action_count())
                .filter_map(|g| apply(&s.m_star, &s.u, g, &cur).map(|n| (g, n)))
                .collect::<Vec<_>>();
            if next.is_empty() {
                break;
            }
            let (g, n) = next[rng.gen_range(0..next.len())].clone();
            actions.push(g);
            states.push(n);
        }
        let t = ObservationTrace::new(s.u.clone(), states, actions).unwrap();
        let back = read_trace(&write_trace(&t), &s.m_star).unwrap();
        prop_assert_eq!(back.states(), t.states());
        prop_assert_eq!(back.actions().len(), t.actions().len());
        prop_assert!(validate_trace(&s.m_star, &back).unwrap());
    }

    #[test]
    fn responses_replay_and_stop_at_the_first_failure(name in domain(), seed in any::<u64>(), len in 0usize..6) {
        let s = setup(name, BindingMode::WithRepeats);
        let q = random_query(&s, seed, len);
        let r = answer_query(&s.agent, &q).unwrap();
        let mut cur = q.start.clone();
        for &g in &q.plan[..r.executed] {
            cur = apply(&s.m_star, &s.u, g, &cur).expect("executed prefix applies");
        }
        prop_assert_eq!(&r.state, &cur);
        if r.executed < q.plan.len() {
            prop_assert!(apply(&s.m_star, &s.u, q.plan[r.executed], &cur).is_none());
        }
    }

    #[test]
    fn hidden_model_survives_every_sieve(
        name in domain(), mode in binding(), amount in 0.05f64..=1.0, seed in any::<u64>(), len in 1usize..4
    ) {
        let s = setup(name, mode);
        let mut cands = vec![s.m_star.clone()];
        for k in 0..4u64 {
            let spec = DriftSpec { amount, method: DriftMethod::Mixed, seed: seed ^ k };
            cands.push(inject_drift(&s.m_star, &spec).unwrap());
        }
        for k in 0..8 {
            let q = random_query(&s, seed.wrapping_add(k), len);
            let r = answer_query(&s.agent, &q).unwrap();
            cands = sieve_models(&cands, &s.u, &q, &r).unwrap();
            prop_assert!(cands.contains(&s.m_star));
        }
    }

    #[test]
    fn expanded_flags_match_single_atom_replay(
        name in domain(), mode in binding(), amount in 0.05f64..=1.0, seed in any::<u64>()
    ) {
        let s = setup(name, mode);
        let m_init = inject_drift(&s.m_star, &DriftSpec { amount, method: DriftMethod::Mixed, seed }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Single-triplet traces of the hidden model; ground actions that
        // bind two lifted atoms to one ground atom are left out.
        let mut traces = Vec::new();
        for st in &s.states {
            let options: Vec<usize> = (0..s.u.action_count())
                .filter(|g| {
                    let atoms = &s.u.action(*g).atoms;
                    atoms.iter().collect::<BTreeSet<_>>().len() == atoms.len()
                        && apply(&s.m_star, &s.u, *g, st).is_some()
                })
                .collect();
            if options.is_empty() || rng.gen_bool(0.5) {
                continue;
            }
            let g = options[rng.gen_range(0..options.len())];
            let post = apply(&s.m_star, &s.u, g, st).unwrap();
            traces.push(ObservationTrace::new(s.u.clone(), vec![st.clone(), post], vec![g]).unwrap());
        }
        let vocab = s.m_star.vocab();
        let mut want = BTreeSet::new();
        for t in &traces {
            let w = t.triplet(0);
            let ga = s.u.action(w.action);
            for (pa, &atom) in vocab.action_atoms(ga.action).zip(&ga.atoms) {
                if !reproduces(m_init.pa_value(pa), w.pre.contains(atom), w.post.contains(atom)) {
                    want.insert(pa);
                }
            }
        }
        let constraints = infer_pa_constraints(&traces, vocab).unwrap();
        let got: BTreeSet<usize> =
            detect_expanded(&m_init, &constraints, &traces).unwrap().flagged.iter().map(|p| p.pa()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn generated_traces_are_optimal_between_all_state_pairs(name in domain(), mode in binding()) {
        let s = setup(name, mode);
        let src = corpus::bundled(name).unwrap();
        for (_, text) in &src.problems {
            let problem = parse_problem(text, &s.m_star).unwrap();
            let task = ground(&s.m_star, &problem).unwrap();
            let agent = AgentSim::new(s.m_star.clone(), task.universe.clone(), vec![task.init.clone()]).unwrap();
            let t = generate_trace(&agent, &problem).unwrap().truncated(6);
            let compiled = CompiledModel::new(&s.m_star, &task.universe).unwrap();
            let states = t.states();
            for i in 0..states.len() {
                let plans = shortest_paths(&compiled, &task.universe, &states[i], &states[i + 1..], states.len(), None).unwrap();
                for (k, p) in plans.iter().enumerate() {
                    prop_assert_eq!(p.as_ref().map(|p| p.len()), Some(k + 1));
                }
            }
        }
    }

    #[test]
    fn sampled_states_are_distinct_and_seeded(name in domain(), seed in any::<u64>(), n in 1usize..40) {
        let s = setup(name, BindingMode::WithRepeats);
        let a = sample_random_states(&s.agent, n, seed);
        prop_assert_eq!(a.len(), n);
        prop_assert_eq!(a.iter().collect::<BTreeSet<_>>().len(), n);
        prop_assert_eq!(sample_random_states(&s.agent, n, seed), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn assessment_is_consistent_sound_and_monotone(
        name in prop::sample::select(vec!["gripper", "blocksworld"]), amount in 0.05f64..=1.0, seed in any::<u64>()
    ) {
        let s = setup(name, BindingMode::Distinct);
        let src = corpus::bundled(name).unwrap();
        let problem = parse_problem(&src.problems[0].1, &s.m_star).unwrap();
        let trace = generate_trace(&s.agent, &problem).unwrap().truncated(10);
        let m_init = inject_drift(&s.m_star, &DriftSpec { amount, method: DriftMethod::Mixed, seed }).unwrap();
        let report = daaisy(&m_init, std::slice::from_ref(&trace), &s.agent, &s.states, &AssessConfig::default()).unwrap();
        let before = model_diff(&m_init, &s.m_star).unwrap();
        for m in &report.learned_models {
            prop_assert!(validate_trace(m, &trace).unwrap());
            for (q, r) in &report.query_log {
                prop_assert_eq!(&answer_query(&AgentSim::new(m.clone(), s.u.clone(), vec![]).unwrap(), q).unwrap(), r);
            }
            for g in &report.gamma_delta {
                prop_assert_eq!(m.mode(g.pal), s.m_star.mode(g.pal));
            }
            for (p, mode) in &report.fixed {
                prop_assert_eq!(*mode, s.m_star.mode(*p));
            }
            prop_assert!(model_diff(m, &s.m_star).unwrap() <= before);
            for p in s.m_star.vocab().pals() {
                let touched = report.gamma_delta.iter().any(|g| g.pal == p) || report.fixed.iter().any(|(f, _)| *f == p);
                if !touched {
                    prop_assert_eq!(m.mode(p), m_init.mode(p));
                }
            }
        }
    }
}
