use std::collections::HashMap;
use std::fmt::Write as _;

use super::sexpr::{parse_one, typed_list, SExpr};
use crate::error::{Error, Result};
use crate::model::vocab::ROOT_TYPE;
use crate::model::DomainModel;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NamedAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl NamedAtom {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        NamedAtom { predicate: predicate.to_string(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

/// A planning problem over a domain's vocabulary. Objects and initial atoms are
/// kept sorted so that equal problems compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub name: String,
    pub domain: String,
    /// `(name, type)` pairs.
    pub objects: Vec<(String, String)>,
    pub init: Vec<NamedAtom>,
    /// `(positive, atom)` literals.
    pub goal: Vec<(bool, NamedAtom)>,
}

pub fn parse_problem(text: &str, model: &DomainModel) -> Result<ProblemInstance> {
    let root = parse_one(text)?;
    let items = root.expect_list("(define ...)")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(root.error("expected `define`"));
    }
    let name = match items.get(1).and_then(SExpr::as_list) {
        Some([kw, n]) if kw.as_atom() == Some("problem") => n.expect_atom("problem name")?.to_string(),
        _ => return Err(root.error("expected (problem <name>)")),
    };
    let mut p = ProblemInstance {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut goal_expr = None;
    let mut init_exprs: &[SExpr] = &[];
    for section in &items[2..] {
        let head = section.head().ok_or_else(|| section.error("expected a section"))?;
        let body = &section.as_list().unwrap()[1..];
        match head {
            ":domain" => p.domain = body.first().ok_or_else(|| section.error("missing domain"))?.expect_atom("domain")?.into(),
            ":objects" => p.objects = typed_list(body, ROOT_TYPE)?,
            ":init" => init_exprs = body,
            ":goal" => goal_expr = Some(body.first().ok_or_else(|| section.error("empty goal"))?),
            other => return Err(Error::UnsupportedFeature(other.to_string())),
        }
    }
    let vocab = model.vocab();
    if !p.domain.is_empty() && p.domain != vocab.name() {
        return Err(Error::Vocabulary(format!(
            "problem is for domain `{}`, not `{}`",
            p.domain,
            vocab.name()
        )));
    }
    let mut obj_types: HashMap<&str, &str> = HashMap::new();
    for (n, t) in &p.objects {
        if vocab.types().id(t).is_none() {
            return Err(Error::Vocabulary(format!("object `{n}` has undeclared type `{t}`")));
        }
        if obj_types.insert(n, t).is_some() {
            return Err(Error::Vocabulary(format!("object `{n}` declared twice")));
        }
    }
    let check = |e: &SExpr| -> Result<NamedAtom> {
        let parts = e.expect_list("atom")?;
        let pred = parts.first().ok_or_else(|| e.error("empty atom"))?.expect_atom("predicate")?;
        if pred == "=" {
            return Err(Error::UnsupportedFeature("=".into()));
        }
        let pid = vocab
            .predicate_id(pred)
            .ok_or_else(|| Error::Vocabulary(format!("undeclared predicate `{pred}`")))?;
        let sig = vocab.predicate_types(pid);
        if sig.len() != parts.len() - 1 {
            return Err(e.error(format!("wrong arity for `{pred}`")));
        }
        let mut args = Vec::new();
        for (a, &want) in parts[1..].iter().zip(sig) {
            let a = a.expect_atom("object")?;
            let t = obj_types
                .get(a)
                .ok_or_else(|| Error::Vocabulary(format!("undeclared object `{a}`")))?;
            let tid = vocab.types().id(t).unwrap();
            if !vocab.types().is_subtype(tid, want) {
                return Err(Error::Vocabulary(format!(
                    "object `{a}` of type `{t}` cannot fill `{pred}` argument of type `{}`",
                    vocab.types().name(want)
                )));
            }
            args.push(a.to_string());
        }
        Ok(NamedAtom { predicate: pred.to_string(), args })
    };
    for e in init_exprs {
        if e.head() == Some("not") {
            return Err(e.error("negative literals are implicit in the closed-world initial state"));
        }
        p.init.push(check(e)?);
    }
    if let Some(g) = goal_expr {
        let lits: Vec<&SExpr> = if g.head() == Some("and") {
            g.as_list().unwrap()[1..].iter().collect()
        } else if g.as_list().is_some_and(|l| l.is_empty()) {
            Vec::new()
        } else {
            vec![g]
        };
        for l in lits {
            match l.head() {
                Some("not") => match l.as_list().unwrap() {
                    [_, inner] => p.goal.push((false, check(inner)?)),
                    _ => return Err(l.error("`not` takes one argument")),
                },
                Some(h @ ("or" | "forall" | "exists" | "imply" | "and")) => {
                    return Err(Error::UnsupportedFeature(h.to_string()))
                }
                _ => p.goal.push((true, check(l)?)),
            }
        }
    }
    p.objects.sort();
    p.init.sort();
    p.init.dedup();
    p.goal.sort();
    p.goal.dedup();
    Ok(p)
}

pub fn print_problem(p: &ProblemInstance, model: &DomainModel) -> String {
    let typed = !model.vocab().types().is_untyped();
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", if p.domain.is_empty() { model.vocab().name() } else { &p.domain });
    out.push_str("  (:objects");
    for (n, t) in &p.objects {
        if typed {
            let _ = write!(out, " {n} - {t}");
        } else {
            let _ = write!(out, " {n}");
        }
    }
    out.push_str(")\n  (:init");
    for a in &p.init {
        let _ = write!(out, "\n    {}", atom_text(a));
    }
    out.push_str(")\n  (:goal (and");
    for (positive, a) in &p.goal {
        if *positive {
            let _ = write!(out, " {}", atom_text(a));
        } else {
            let _ = write!(out, " (not {})", atom_text(a));
        }
    }
    out.push_str(")))\n");
    out
}

fn atom_text(a: &NamedAtom) -> String {
    let mut s = format!("({}", a.predicate);
    for x in &a.args {
        s.push(' ');
        s.push_str(x);
    }
    s.push(')');
    s
}
