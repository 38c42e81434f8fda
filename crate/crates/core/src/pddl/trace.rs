use std::fmt::Write as _;
use std::sync::Arc;

use super::sexpr::{parse_all, typed_list, SExpr};
use crate::error::{Error, Result};
use crate::model::vocab::ROOT_TYPE;
use crate::model::DomainModel;
use crate::planner::{GroundActionId, ObservationTrace, Objects, State, Universe};

/// Line-oriented trace text: an `(objects ...)` header followed by alternating
/// `(state ...)` and `(action (...))` records.
pub fn write_trace(trace: &ObservationTrace) -> String {
    let u = trace.universe();
    let mut out = String::new();
    out.push_str("(objects");
    for (n, t) in u.objects().declarations(u.vocab()) {
        let _ = write!(out, " {n} - {t}");
    }
    out.push_str(")\n");
    for (i, s) in trace.states().iter().enumerate() {
        out.push_str(&state_text(u, s));
        out.push('\n');
        if let Some(&a) = trace.actions().get(i) {
            let _ = writeln!(out, "(action {})", u.action_text(a));
        }
    }
    out
}

pub fn state_text(u: &Universe, s: &State) -> String {
    let mut out = String::from("(state");
    for a in s.iter() {
        out.push(' ');
        out.push_str(&u.atom_text(a));
    }
    out.push(')');
    out
}

pub fn read_trace(text: &str, model: &DomainModel) -> Result<ObservationTrace> {
    let records = parse_all(text)?;
    let mut it = records.iter();
    let header = it.next().ok_or_else(|| Error::Parse { line: 1, col: 1, message: "empty trace".into() })?;
    if header.head() != Some("objects") {
        return Err(header.error("trace must start with (objects ...)"));
    }
    let decl = typed_list(&header.as_list().unwrap()[1..], ROOT_TYPE)?;
    let objects = Objects::new(model.vocab(), &decl).map_err(|e| match e {
        Error::Grounding(m) => Error::Vocabulary(m),
        e => e,
    })?;
    let universe = Universe::new(model.vocab().clone(), objects);
    let mut states = Vec::new();
    let mut actions = Vec::new();
    let mut expect_state = true;
    for r in it {
        match r.head() {
            Some("state") => {
                if !expect_state {
                    return Err(Error::Alternation(format!("two consecutive states at line {}", r.pos().line)));
                }
                states.push(parse_state(&universe, &r.as_list().unwrap()[1..])?);
                expect_state = false;
            }
            Some("action") => {
                if expect_state {
                    return Err(Error::Alternation(format!(
                        "action at line {} is not preceded by a state",
                        r.pos().line
                    )));
                }
                match r.as_list().unwrap() {
                    [_, a] => actions.push(parse_action(&universe, a)?),
                    _ => return Err(r.error("expected (action (<name> <args>...))")),
                }
                expect_state = true;
            }
            _ => return Err(r.error("expected (state ...) or (action ...)")),
        }
    }
    if expect_state {
        return Err(Error::Alternation("trace must end with a state".into()));
    }
    ObservationTrace::new(universe, states, actions)
}

pub fn parse_state(u: &Universe, atoms: &[SExpr]) -> Result<State> {
    let mut s = State::empty(u.atom_count());
    for a in atoms {
        let (name, args) = name_and_args(a)?;
        s.insert(u.find_atom(name, &args)?);
    }
    Ok(s)
}

pub fn parse_action(u: &Universe, e: &SExpr) -> Result<GroundActionId> {
    let (name, args) = name_and_args(e)?;
    u.find_action(name, &args)
}

fn name_and_args(e: &SExpr) -> Result<(&str, Vec<&str>)> {
    let parts = e.expect_list("(name args...)")?;
    let name = parts.first().ok_or_else(|| e.error("empty expression"))?.expect_atom("name")?;
    let args = parts[1..].iter().map(|p| p.expect_atom("object")).collect::<Result<Vec<_>>>()?;
    Ok((name, args))
}

/// Resolves an already-built universe's view of a trace file, rejecting
/// traces whose objects differ.
pub fn read_trace_in(text: &str, model: &DomainModel, universe: &Arc<Universe>) -> Result<ObservationTrace> {
    let t = read_trace(text, model)?;
    if !t.universe().compatible(universe) {
        return Err(Error::Vocabulary("trace objects differ from the task's objects".into()));
    }
    ObservationTrace::new(universe.clone(), t.states().to_vec(), t.actions().to_vec())
}
