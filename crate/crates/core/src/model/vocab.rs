use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::mode::Location;
use crate::error::{Error, Result};

pub type TypeId = usize;
pub type PredId = usize;
pub type ActionId = usize;
/// Index of a lifted atom of an action, i.e. of a pa-tuple.
pub type PaId = usize;

pub const ROOT_TYPE: &str = "object";

/// Index of a pal-tuple in canonical order. Location is the innermost key, so
/// the two pal-tuples of pa-tuple `k` are `2k` (pre) and `2k + 1` (eff).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PalId(pub u32);

impl PalId {
    pub fn new(pa: PaId, loc: Location) -> Self {
        PalId((pa * 2 + loc as usize) as u32)
    }

    pub fn pa(self) -> PaId {
        (self.0 / 2) as usize
    }

    pub fn location(self) -> Location {
        if self.0.is_multiple_of(2) {
            Location::Pre
        } else {
            Location::Eff
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn partner(self) -> PalId {
        PalId(self.0 ^ 1)
    }
}

/// How action parameters may be bound to predicate argument positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingMode {
    /// A parameter may fill several argument positions, e.g. `(on ?x ?x)`.
    #[default]
    WithRepeats,
    /// Each argument position takes a different parameter.
    Distinct,
}

/// Type names with single-parent inheritance rooted at `object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeHierarchy {
    names: Vec<String>,
    parent: Vec<Option<TypeId>>,
    index: HashMap<String, TypeId>,
}

impl TypeHierarchy {
    /// Builds the hierarchy from `child -> parent` declarations. Types are
    /// ordered by name after the root so that equal declarations compare equal.
    pub fn new(declared: &BTreeMap<String, String>) -> Result<Self> {
        let mut names = vec![ROOT_TYPE.to_string()];
        names.extend(declared.keys().filter(|n| *n != ROOT_TYPE).cloned());
        let index: HashMap<String, TypeId> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut parent = vec![None; names.len()];
        for (child, par) in declared {
            if child == ROOT_TYPE {
                continue;
            }
            let p = *index
                .get(par)
                .ok_or_else(|| Error::Vocabulary(format!("type `{child}` has undeclared parent `{par}`")))?;
            parent[index[child]] = Some(p);
        }
        for (i, p) in parent.iter_mut().enumerate().skip(1) {
            if p.is_none() {
                *p = Some(0);
            }
            let _ = i;
        }
        let h = TypeHierarchy { names, parent, index };
        for t in 0..h.names.len() {
            let mut seen = HashSet::new();
            let mut cur = Some(t);
            while let Some(c) = cur {
                if !seen.insert(c) {
                    return Err(Error::Vocabulary(format!("type hierarchy cycle through `{}`", h.names[t])));
                }
                cur = h.parent[c];
            }
        }
        Ok(h)
    }

    pub fn universal() -> Self {
        TypeHierarchy::new(&BTreeMap::new()).expect("empty hierarchy is valid")
    }

    pub fn id(&self, name: &str) -> Option<TypeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: TypeId) -> &str {
        &self.names[id]
    }

    pub fn parent(&self, id: TypeId) -> Option<TypeId> {
        self.parent[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Whether only the root type exists.
    pub fn is_untyped(&self) -> bool {
        self.names.len() == 1
    }

    /// `sub` equals `sup` or inherits from it.
    pub fn is_subtype(&self, sub: TypeId, sup: TypeId) -> bool {
        let mut cur = Some(sub);
        while let Some(c) = cur {
            if c == sup {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateSignature {
    pub name: String,
    pub parameter_types: Vec<String>,
}

impl PredicateSignature {
    pub fn new(name: impl Into<String>, parameter_types: &[&str]) -> Self {
        PredicateSignature {
            name: name.into(),
            parameter_types: parameter_types.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.parameter_types.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionSignature {
    pub name: String,
    pub parameter_names: Vec<String>,
    pub parameter_types: Vec<String>,
}

impl ActionSignature {
    /// `params` are `(name, type)` pairs; names may be given with or without `?`.
    pub fn new(name: impl Into<String>, params: &[(&str, &str)]) -> Self {
        ActionSignature {
            name: name.into(),
            parameter_names: params
                .iter()
                .map(|(n, _)| n.trim_start_matches('?').to_string())
                .collect(),
            parameter_types: params.iter().map(|(_, t)| t.to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.parameter_names.len()
    }
}

/// A predicate whose argument positions are bound to parameters of one action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedAtom {
    pub action: ActionId,
    pub predicate: PredId,
    /// Action parameter index for each predicate argument.
    pub binding: Vec<usize>,
}

/// Fully resolved vocabulary: the predicates, actions and type hierarchy of a
/// domain plus the canonical enumeration of its pa- and pal-tuples.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    name: String,
    types: TypeHierarchy,
    predicates: Vec<PredicateSignature>,
    actions: Vec<ActionSignature>,
    binding_mode: BindingMode,
    pred_types: Vec<Vec<TypeId>>,
    action_types: Vec<Vec<TypeId>>,
    atoms: Vec<LiftedAtom>,
    action_atoms: Vec<std::ops::Range<PaId>>,
    atom_index: HashMap<(ActionId, PredId, Vec<usize>), PaId>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.types == other.types
            && self.predicates == other.predicates
            && self.actions == other.actions
            && self.binding_mode == other.binding_mode
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// Validates the signatures and enumerates every type-compatible lifted
    /// atom. Predicates and actions are sorted by name.
    pub fn new(
        name: impl Into<String>,
        types: TypeHierarchy,
        mut predicates: Vec<PredicateSignature>,
        mut actions: Vec<ActionSignature>,
        binding_mode: BindingMode,
    ) -> Result<Self> {
        predicates.sort_by(|a, b| a.name.cmp(&b.name));
        actions.sort_by(|a, b| a.name.cmp(&b.name));
        for w in predicates.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::Vocabulary(format!("duplicate predicate `{}`", w[0].name)));
            }
        }
        for w in actions.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::Vocabulary(format!("duplicate action `{}`", w[0].name)));
            }
        }
        let resolve = |what: &str, owner: &str, names: &[String]| -> Result<Vec<TypeId>> {
            names
                .iter()
                .map(|t| {
                    types.id(t).ok_or_else(|| {
                        Error::Vocabulary(format!("{what} `{owner}` uses undeclared type `{t}`"))
                    })
                })
                .collect()
        };
        let mut pred_types = Vec::with_capacity(predicates.len());
        for p in &predicates {
            if p.name.is_empty() {
                return Err(Error::Vocabulary("empty predicate name".into()));
            }
            pred_types.push(resolve("predicate", &p.name, &p.parameter_types)?);
        }
        let mut action_types = Vec::with_capacity(actions.len());
        for a in &actions {
            if a.parameter_names.len() != a.parameter_types.len() {
                return Err(Error::Vocabulary(format!(
                    "action `{}` has {} parameter names but {} types",
                    a.name,
                    a.parameter_names.len(),
                    a.parameter_types.len()
                )));
            }
            let distinct: HashSet<&String> = a.parameter_names.iter().collect();
            if distinct.len() != a.parameter_names.len() {
                return Err(Error::Vocabulary(format!("action `{}` repeats a parameter name", a.name)));
            }
            action_types.push(resolve("action", &a.name, &a.parameter_types)?);
        }

        let mut atoms = Vec::new();
        let mut action_atoms = Vec::with_capacity(actions.len());
        for (ai, params) in action_types.iter().enumerate() {
            let start = atoms.len();
            for (pi, args) in pred_types.iter().enumerate() {
                for binding in bindings(&types, params, args, binding_mode) {
                    atoms.push(LiftedAtom { action: ai, predicate: pi, binding });
                }
            }
            action_atoms.push(start..atoms.len());
        }
        let atom_index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.action, a.predicate, a.binding.clone()), i))
            .collect();
        Ok(Vocabulary {
            name: name.into(),
            types,
            predicates,
            actions,
            binding_mode,
            pred_types,
            action_types,
            atoms,
            action_atoms,
            atom_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn types(&self) -> &TypeHierarchy {
        &self.types
    }

    pub fn predicates(&self) -> &[PredicateSignature] {
        &self.predicates
    }

    pub fn actions(&self) -> &[ActionSignature] {
        &self.actions
    }

    pub fn binding_mode(&self) -> BindingMode {
        self.binding_mode
    }

    pub fn predicate_id(&self, name: &str) -> Option<PredId> {
        self.predicates.binary_search_by(|p| p.name.as_str().cmp(name)).ok()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.binary_search_by(|a| a.name.as_str().cmp(name)).ok()
    }

    pub fn predicate_types(&self, p: PredId) -> &[TypeId] {
        &self.pred_types[p]
    }

    pub fn action_types(&self, a: ActionId) -> &[TypeId] {
        &self.action_types[a]
    }

    /// All lifted atoms (pa-tuples) in canonical order.
    pub fn atoms(&self) -> &[LiftedAtom] {
        &self.atoms
    }

    pub fn atom(&self, pa: PaId) -> &LiftedAtom {
        &self.atoms[pa]
    }

    pub fn action_atoms(&self, a: ActionId) -> std::ops::Range<PaId> {
        self.action_atoms[a].clone()
    }

    pub fn find_atom(&self, action: ActionId, predicate: PredId, binding: &[usize]) -> Option<PaId> {
        self.atom_index.get(&(action, predicate, binding.to_vec())).copied()
    }

    pub fn pa_count(&self) -> usize {
        self.atoms.len()
    }

    /// nPals: the number of pal-tuples.
    pub fn pal_count(&self) -> usize {
        self.atoms.len() * 2
    }

    pub fn pals(&self) -> impl Iterator<Item = PalId> {
        (0..self.pal_count() as u32).map(PalId)
    }

    pub fn action_pals(&self, a: ActionId) -> impl Iterator<Item = PalId> {
        let r = self.action_atoms(a);
        (r.start as u32 * 2..r.end as u32 * 2).map(PalId)
    }

    pub fn pal_tuple(&self, pal: PalId) -> PalTuple {
        let atom = self.atom(pal.pa()).clone();
        PalTuple {
            action: atom.action,
            atom,
            location: pal.location(),
        }
    }

    /// `(pred ?p1 ?p2)` written with the action's parameter names.
    pub fn atom_text(&self, pa: PaId) -> String {
        let atom = &self.atoms[pa];
        let params = &self.actions[atom.action].parameter_names;
        let mut s = format!("({}", self.predicates[atom.predicate].name);
        for &b in &atom.binding {
            s.push_str(" ?");
            s.push_str(&params[b]);
        }
        s.push(')');
        s
    }

    /// `action (pred ?x) loc`, the human-readable key of a pal-tuple.
    pub fn pal_text(&self, pal: PalId) -> String {
        let atom = &self.atoms[pal.pa()];
        format!(
            "{} {} {}",
            self.actions[atom.action].name,
            self.atom_text(pal.pa()),
            pal.location()
        )
    }

    /// Looks up a pal-tuple from its `pal_text` form.
    pub fn parse_pal_text(&self, text: &str) -> Option<PalId> {
        let text = text.trim();
        let (action, rest) = text.split_once(char::is_whitespace)?;
        let rest = rest.trim();
        let open = rest.find('(')?;
        let close = rest.find(')')?;
        let body = &rest[open + 1..close];
        let loc = match rest[close + 1..].trim() {
            "pre" => Location::Pre,
            "eff" => Location::Eff,
            _ => return None,
        };
        let a = self.action_id(action)?;
        let mut parts = body.split_whitespace();
        let p = self.predicate_id(parts.next()?)?;
        let params = &self.actions[a].parameter_names;
        let binding = parts
            .map(|v| params.iter().position(|n| n == v.trim_start_matches('?')))
            .collect::<Option<Vec<_>>>()?;
        Some(PalId::new(self.find_atom(a, p, &binding)?, loc))
    }

    /// Checks that two vocabularies describe the same pal-tuple space.
    pub fn ensure_same(&self, other: &Vocabulary) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::IncomparableModels(format!(
                "vocabularies of `{}` and `{}` differ",
                self.name, other.name
            )))
        }
    }
}

fn bindings(
    types: &TypeHierarchy,
    params: &[TypeId],
    args: &[TypeId],
    mode: BindingMode,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(args.len());
    fn rec(
        types: &TypeHierarchy,
        params: &[TypeId],
        args: &[TypeId],
        mode: BindingMode,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == args.len() {
            out.push(cur.clone());
            return;
        }
        let want = args[cur.len()];
        for (i, &t) in params.iter().enumerate() {
            if mode == BindingMode::Distinct && cur.contains(&i) {
                continue;
            }
            if types.is_subtype(t, want) {
                cur.push(i);
                rec(types, params, args, mode, cur, out);
                cur.pop();
            }
        }
    }
    rec(types, params, args, mode, &mut cur, &mut out);
    out
}

/// A ⟨lifted atom, action, location⟩ key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PalTuple {
    pub atom: LiftedAtom,
    pub action: ActionId,
    pub location: Location,
}

/// Enumerates Γ for the given signatures: one entry per type-compatible lifted
/// atom and location, ordered by action name, predicate name, binding and
/// location.
pub fn enumerate_pal_tuples(
    predicates: &[PredicateSignature],
    actions: &[ActionSignature],
    types: &TypeHierarchy,
    binding_mode: BindingMode,
) -> Result<Vec<PalTuple>> {
    let vocab = Vocabulary::new("", types.clone(), predicates.to_vec(), actions.to_vec(), binding_mode)?;
    Ok(vocab.pals().map(|p| vocab.pal_tuple(p)).collect())
}

impl fmt::Display for PalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pal#{}", self.0)
    }
}
