use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::sexpr::{parse_one, typed_list, SExpr};
use crate::error::{Error, Result};
use crate::model::{
    ActionSignature, BindingMode, DomainModel, Location, Mode, PalId, PredicateSignature, TypeHierarchy,
    Vocabulary,
};

const SUPPORTED_REQUIREMENTS: [&str; 3] = [":strips", ":typing", ":negative-preconditions"];

/// Parses a typed-STRIPS domain with the default binding mode.
pub fn parse_domain(text: &str) -> Result<DomainModel> {
    parse_domain_with(text, BindingMode::default())
}

pub fn parse_domain_with(text: &str, binding_mode: BindingMode) -> Result<DomainModel> {
    let root = parse_one(text)?;
    let items = root.expect_list("(define ...)")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(root.error("expected `define`"));
    }
    let name_decl = items.get(1).ok_or_else(|| root.error("missing (domain <name>)"))?;
    let name = match name_decl.as_list() {
        Some([kw, n]) if kw.as_atom() == Some("domain") => n.expect_atom("domain name")?.to_string(),
        _ => return Err(name_decl.error("expected (domain <name>)")),
    };

    let mut types = BTreeMap::new();
    let mut predicates = Vec::new();
    let mut action_exprs = Vec::new();
    for section in &items[2..] {
        let head = section.head().ok_or_else(|| section.error("expected a section"))?;
        let body = &section.as_list().unwrap()[1..];
        match head {
            ":requirements" => {
                for r in body {
                    let r = r.expect_atom("requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(Error::UnsupportedFeature(r.to_string()));
                    }
                }
            }
            ":types" => {
                for (child, parent) in typed_list(body, "object")? {
                    if types.insert(child.clone(), parent).is_some() {
                        return Err(section.error(format!("type `{child}` declared twice")));
                    }
                }
            }
            ":predicates" => {
                for p in body {
                    let parts = p.expect_list("predicate declaration")?;
                    let pname = parts
                        .first()
                        .ok_or_else(|| p.error("empty predicate declaration"))?
                        .expect_atom("predicate name")?;
                    let params = typed_list(&parts[1..], "object")?;
                    predicates.push(PredicateSignature {
                        name: pname.to_string(),
                        parameter_types: params.into_iter().map(|(_, t)| t).collect(),
                    });
                }
            }
            ":action" => action_exprs.push(section),
            other => return Err(Error::UnsupportedFeature(other.to_string())),
        }
    }

    let hierarchy = TypeHierarchy::new(&types)?;
    let mut actions = Vec::new();
    let mut bodies = Vec::new();
    for a in action_exprs {
        let (sig, pre, eff) = action_parts(a)?;
        actions.push(sig);
        bodies.push((pre, eff));
    }
    // Vocabulary sorts actions by name; keep bodies aligned.
    let names: Vec<String> = actions.iter().map(|a| a.name.clone()).collect();
    let vocab = Arc::new(Vocabulary::new(name, hierarchy, predicates, actions, binding_mode)?);
    let mut model = DomainModel::empty(vocab.clone());
    for (aname, (pre, eff)) in names.iter().zip(bodies) {
        let aid = vocab.action_id(aname).expect("action registered");
        for (loc, lits) in [(Location::Pre, pre), (Location::Eff, eff)] {
            for lit in lits {
                let pa = resolve_literal(&vocab, aid, &lit)?;
                let pal = PalId::new(pa, loc);
                let mode = if lit.positive { Mode::Plus } else { Mode::Minus };
                let prev = model.mode(pal);
                if prev != Mode::Absent && prev != mode {
                    return Err(lit.expr.error(format!(
                        "`{aname}` lists {} with both polarities in one location",
                        vocab.atom_text(pa)
                    )));
                }
                model.set_mode(pal, mode);
            }
        }
        for pa in vocab.action_atoms(aid) {
            if !model.pa_value(pa).is_legal() {
                return Err(Error::Vocabulary(format!(
                    "`{aname}` has {} as {} (same literal in precondition and effect)",
                    vocab.atom_text(pa),
                    model.pa_value(pa)
                )));
            }
        }
    }
    Ok(model)
}

struct Literal<'a> {
    positive: bool,
    predicate: String,
    args: Vec<String>,
    expr: &'a SExpr,
}

fn action_parts(a: &SExpr) -> Result<(ActionSignature, Vec<Literal<'_>>, Vec<Literal<'_>>)> {
    let items = a.as_list().unwrap();
    let name = items
        .get(1)
        .ok_or_else(|| a.error("missing action name"))?
        .expect_atom("action name")?
        .to_string();
    let mut params = Vec::new();
    let mut pre = Vec::new();
    let mut eff = Vec::new();
    let mut i = 2;
    while i < items.len() {
        let key = items[i].expect_atom("action keyword")?;
        let val = items.get(i + 1).ok_or_else(|| items[i].error(format!("missing value for {key}")))?;
        match key {
            ":parameters" => {
                for (n, t) in typed_list(val.expect_list("parameter list")?, "object")? {
                    let n = n
                        .strip_prefix('?')
                        .ok_or_else(|| val.error(format!("parameter `{n}` must start with `?`")))?;
                    params.push((n.to_string(), t));
                }
            }
            ":precondition" => pre = conjunction(val)?,
            ":effect" => eff = conjunction(val)?,
            other => return Err(Error::UnsupportedFeature(other.to_string())),
        }
        i += 2;
    }
    let sig = ActionSignature {
        name,
        parameter_names: params.iter().map(|(n, _)| n.clone()).collect(),
        parameter_types: params.into_iter().map(|(_, t)| t).collect(),
    };
    Ok((sig, pre, eff))
}

fn conjunction(e: &SExpr) -> Result<Vec<Literal<'_>>> {
    let items = e.expect_list("literal conjunction")?;
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if e.head() == Some("and") {
        items[1..].iter().map(literal).collect()
    } else {
        Ok(vec![literal(e)?])
    }
}

fn literal(e: &SExpr) -> Result<Literal<'_>> {
    let (positive, atom) = match e.head() {
        Some("not") => match e.as_list().unwrap() {
            [_, inner] => (false, inner),
            _ => return Err(e.error("`not` takes one argument")),
        },
        Some(h @ ("or" | "imply" | "forall" | "exists" | "when" | "=" | "and")) => {
            return Err(Error::UnsupportedFeature(h.to_string()))
        }
        Some(_) => (true, e),
        None => return Err(e.error("expected a literal")),
    };
    let parts = atom.expect_list("atom")?;
    let predicate = parts
        .first()
        .ok_or_else(|| atom.error("empty atom"))?
        .expect_atom("predicate")?;
    if matches!(predicate, "=" | "not" | "and" | "or" | "forall" | "exists" | "when" | "imply") {
        return Err(Error::UnsupportedFeature(predicate.to_string()));
    }
    let mut args = Vec::new();
    for p in &parts[1..] {
        let a = p.expect_atom("parameter")?;
        match a.strip_prefix('?') {
            Some(v) => args.push(v.to_string()),
            None => return Err(Error::UnsupportedFeature(format!("constant `{a}` in action schema"))),
        }
    }
    Ok(Literal { positive, predicate: predicate.to_string(), args, expr: e })
}

fn resolve_literal(vocab: &Vocabulary, action: usize, lit: &Literal<'_>) -> Result<usize> {
    let sig = &vocab.actions()[action];
    let pred = vocab.predicate_id(&lit.predicate).ok_or_else(|| {
        Error::Vocabulary(format!("`{}` uses undeclared predicate `{}`", sig.name, lit.predicate))
    })?;
    if vocab.predicates()[pred].arity() != lit.args.len() {
        return Err(lit.expr.error(format!("wrong arity for `{}`", lit.predicate)));
    }
    let binding = lit
        .args
        .iter()
        .map(|a| {
            sig.parameter_names.iter().position(|n| n == a).ok_or_else(|| {
                Error::Vocabulary(format!("`{}` uses undeclared parameter `?{a}`", sig.name))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    vocab.find_atom(action, pred, &binding).ok_or_else(|| {
        Error::Vocabulary(format!(
            "`{}`: literal on `{}` violates the predicate's argument types",
            sig.name, lit.predicate
        ))
    })
}

/// Canonical PDDL text of a concrete model.
pub fn print_domain(model: &DomainModel) -> Result<String> {
    model.ensure_concrete()?;
    let vocab = model.vocab();
    let types = vocab.types();
    let typed = !types.is_untyped();
    let negative = vocab
        .pals()
        .any(|p| p.location() == Location::Pre && model.mode(p) == Mode::Minus);
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", vocab.name());
    let mut reqs = vec![":strips"];
    if typed {
        reqs.push(":typing");
    }
    if negative {
        reqs.push(":negative-preconditions");
    }
    let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    if typed {
        out.push_str("  (:types");
        for t in 1..types.len() {
            let parent = types.parent(t).unwrap_or(0);
            let _ = write!(out, " {} - {}", types.name(t), types.name(parent));
        }
        out.push_str(")\n");
    }
    out.push_str("  (:predicates");
    for p in vocab.predicates() {
        let _ = write!(out, "\n    ({}", p.name);
        for (i, t) in p.parameter_types.iter().enumerate() {
            let _ = write!(out, " ?x{i}");
            if typed {
                let _ = write!(out, " - {t}");
            }
        }
        out.push(')');
    }
    out.push_str(")\n");
    for (aid, a) in vocab.actions().iter().enumerate() {
        let _ = writeln!(out, "  (:action {}", a.name);
        out.push_str("    :parameters (");
        for (i, (n, t)) in a.parameter_names.iter().zip(&a.parameter_types).enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "?{n}");
            if typed {
                let _ = write!(out, " - {t}");
            }
        }
        out.push_str(")\n");
        for (loc, key) in [(Location::Pre, ":precondition"), (Location::Eff, ":effect")] {
            let _ = write!(out, "    {key} (and");
            for (pa, mode) in model.literals(aid, loc) {
                let atom = vocab.atom_text(pa);
                if mode == Mode::Minus {
                    let _ = write!(out, " (not {atom})");
                } else {
                    let _ = write!(out, " {atom}");
                }
            }
            out.push(')');
            out.push_str(if loc == Location::Pre { "\n" } else { ")\n" });
        }
    }
    out.push_str(")\n");
    Ok(out)
}
