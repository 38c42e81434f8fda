use super::constraints::PaConstraints;
use crate::agent::{Query, QueryResponse};
use crate::model::{DomainModel, Mode, PaId, PaValue, PaValueSet};
use crate::planner::{apply, AtomId, State, Universe};

const POST_FALSE: u8 = 1;
const POST_TRUE: u8 = 2;

/// The set of responses a possibly abstract model allows for a query.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    /// Single-action plan: whether the action may fail, whether it may
    /// succeed, and on success the possible post values of each touched atom.
    Single {
        can_fail: bool,
        can_succeed: bool,
        posts: Vec<(AtomId, u8)>,
    },
    Exact(QueryResponse),
    /// Multi-step plan under an abstract model; nothing is ruled out.
    Any,
}

impl Prediction {
    pub fn admits(&self, q: &Query, r: &QueryResponse) -> bool {
        match self {
            Prediction::Exact(e) => e == r,
            Prediction::Any => r.executed <= q.plan.len(),
            Prediction::Single { can_fail, can_succeed, posts } => match r.executed {
                0 => *can_fail && r.state == q.start,
                1 => {
                    *can_succeed
                        && posts.iter().all(|(a, m)| m & post_bit(r.state.contains(*a)) != 0)
                        && q.start
                            .difference(&r.state)
                            .all(|a| posts.iter().any(|(x, _)| *x == a))
                }
                _ => false,
            },
        }
    }

    /// No response is admitted by both predictions.
    pub fn disjoint(&self, other: &Prediction) -> bool {
        match (self, other) {
            (
                Prediction::Single { can_fail: f1, can_succeed: s1, posts: p1 },
                Prediction::Single { can_fail: f2, can_succeed: s2, posts: p2 },
            ) => {
                let both_fail = *f1 && *f2;
                let both_succeed = *s1 && *s2 && p1.iter().zip(p2).all(|((_, a), (_, b))| a & b != 0);
                !both_fail && !both_succeed
            }
            (Prediction::Exact(a), Prediction::Exact(b)) => a != b,
            _ => false,
        }
    }

    pub fn can_succeed(&self) -> bool {
        match self {
            Prediction::Single { can_succeed, .. } => *can_succeed,
            Prediction::Exact(r) => r.executed > 0,
            Prediction::Any => true,
        }
    }

    pub fn can_fail(&self) -> bool {
        match self {
            Prediction::Single { can_fail, .. } => *can_fail,
            Prediction::Exact(r) => r.executed == 0,
            Prediction::Any => true,
        }
    }
}

fn post_bit(v: bool) -> u8 {
    if v {
        POST_TRUE
    } else {
        POST_FALSE
    }
}

/// Values a pa-tuple may take in `model`: the model's own value when it is
/// concrete, otherwise the legal completions allowed by the constraints. A
/// completion set the constraints leave empty falls back to legality alone.
pub fn admissible(model: &DomainModel, constraints: &PaConstraints, pa: PaId) -> PaValueSet {
    let v = model.pa_value(pa);
    if v.is_concrete() {
        return PaValueSet::from_values([v]);
    }
    let base = PaValueSet::ALL.matching(v.pre, v.eff);
    let narrowed = base.intersect(constraints.get(pa));
    if narrowed.is_empty() {
        base
    } else {
        narrowed
    }
}

/// Three-valued simulation of `q` under `model`. Unknown modes range over
/// their admissible values independently per pa-tuple.
pub fn predict(model: &DomainModel, constraints: &PaConstraints, universe: &Universe, q: &Query) -> Prediction {
    if q.plan.len() != 1 {
        if model.is_concrete() {
            let mut s = q.start.clone();
            let mut executed = 0;
            for &g in &q.plan {
                match apply(model, universe, g, &s) {
                    Some(next) => {
                        s = next;
                        executed += 1;
                    }
                    None => break,
                }
            }
            return Prediction::Exact(QueryResponse { executed, state: s });
        }
        return Prediction::Any;
    }
    predict_single(model, constraints, universe, &q.start, q.plan[0])
}

pub fn predict_single(
    model: &DomainModel,
    constraints: &PaConstraints,
    universe: &Universe,
    start: &State,
    g: usize,
) -> Prediction {
    let ga = universe.action(g);
    let first = universe.vocab().action_atoms(ga.action).start;
    let n = ga.atoms.len();
    let mut can_fail = false;
    let mut can_succeed = true;
    let mut posts: Vec<(AtomId, u8)> = Vec::with_capacity(n);
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let atom = ga.atoms[i];
        let holds = start.contains(atom);
        let mut group: Vec<PaValueSet> = Vec::new();
        for (j, d) in done.iter_mut().enumerate().skip(i) {
            if ga.atoms[j] == atom {
                *d = true;
                group.push(admissible(model, constraints, first + j));
            }
        }
        let (fail, pass_posts) = if group.len() == 1 {
            single_atom(group[0], holds)
        } else {
            joint_atom(&group, holds)
        };
        can_fail |= fail;
        if pass_posts == 0 {
            can_succeed = false;
        }
        posts.push((atom, pass_posts));
    }
    posts.sort_unstable();
    Prediction::Single { can_fail, can_succeed, posts }
}

fn passes(v: PaValue, holds: bool) -> bool {
    !((v.pre == Mode::Plus && !holds) || (v.pre == Mode::Minus && holds))
}

fn single_atom(values: PaValueSet, holds: bool) -> (bool, u8) {
    let mut fail = false;
    let mut posts = 0;
    for v in values.iter() {
        if passes(v, holds) {
            let after = match v.eff {
                Mode::Plus => true,
                Mode::Minus => false,
                _ => holds,
            };
            posts |= post_bit(after);
        } else {
            fail = true;
        }
    }
    (fail, posts)
}

fn joint_atom(group: &[PaValueSet], holds: bool) -> (bool, u8) {
    let options: Vec<Vec<PaValue>> = group.iter().map(|s| s.iter().collect()).collect();
    let mut idx = vec![0usize; options.len()];
    let mut fail = false;
    let mut posts = 0;
    loop {
        let mut ok = true;
        let mut add = false;
        let mut del = false;
        for (k, &i) in idx.iter().enumerate() {
            let v = options[k][i];
            ok &= passes(v, holds);
            add |= v.eff == Mode::Plus;
            del |= v.eff == Mode::Minus;
        }
        if ok {
            posts |= post_bit(if add { true } else if del { false } else { holds });
        } else {
            fail = true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return (fail, posts);
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
