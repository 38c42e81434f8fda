use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{ActionId, PaId, PredId, TypeId, Vocabulary};

pub type ObjId = u32;
pub type AtomId = usize;
pub type GroundActionId = usize;

/// Typed objects of a task, sorted by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objects {
    names: Vec<String>,
    types: Vec<TypeId>,
    index: HashMap<String, ObjId>,
}

impl Objects {
    /// `decl` holds `(name, type)` pairs; untyped objects use `object`.
    pub fn new(vocab: &Vocabulary, decl: &[(String, String)]) -> Result<Self> {
        let mut decl: Vec<(String, String)> = decl.to_vec();
        decl.sort();
        decl.dedup();
        for w in decl.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Grounding(format!(
                    "object `{}` declared with types `{}` and `{}`",
                    w[0].0, w[0].1, w[1].1
                )));
            }
        }
        let types = decl
            .iter()
            .map(|(n, t)| {
                vocab
                    .types()
                    .id(t)
                    .ok_or_else(|| Error::Grounding(format!("object `{n}` has undeclared type `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<String> = decl.into_iter().map(|(n, _)| n).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i as ObjId)).collect();
        Ok(Objects { names, types, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<ObjId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ObjId) -> &str {
        &self.names[id as usize]
    }

    pub fn type_of(&self, id: ObjId) -> TypeId {
        self.types[id as usize]
    }

    /// `(name, type)` pairs in canonical order.
    pub fn declarations(&self, vocab: &Vocabulary) -> Vec<(String, String)> {
        self.names
            .iter()
            .zip(&self.types)
            .map(|(n, t)| (n.clone(), vocab.types().name(*t).to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub predicate: PredId,
    pub args: Vec<ObjId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub action: ActionId,
    pub args: Vec<ObjId>,
    /// Ground atom of each lifted atom of the action, offset from its first pa.
    pub atoms: Vec<AtomId>,
}

/// All ground atoms and ground actions of a vocabulary over a set of objects,
/// in canonical order (predicate/action name, then argument tuple).
#[derive(Debug)]
pub struct Universe {
    vocab: Arc<Vocabulary>,
    objects: Objects,
    atoms: Vec<GroundAtom>,
    atom_index: HashMap<GroundAtom, AtomId>,
    actions: Vec<GroundAction>,
    action_index: HashMap<(ActionId, Vec<ObjId>), GroundActionId>,
    action_ranges: Vec<std::ops::Range<GroundActionId>>,
}

impl Universe {
    pub fn new(vocab: Arc<Vocabulary>, objects: Objects) -> Arc<Self> {
        let types = vocab.types();
        let by_type: Vec<Vec<ObjId>> = (0..types.len())
            .map(|t| {
                (0..objects.len() as ObjId)
                    .filter(|o| types.is_subtype(objects.type_of(*o), t))
                    .collect()
            })
            .collect();

        let mut atoms = Vec::new();
        for p in 0..vocab.predicates().len() {
            for args in tuples(vocab.predicate_types(p), &by_type) {
                atoms.push(GroundAtom { predicate: p, args });
            }
        }
        let atom_index: HashMap<GroundAtom, AtomId> =
            atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();

        let mut actions = Vec::new();
        let mut action_ranges = Vec::with_capacity(vocab.actions().len());
        for a in 0..vocab.actions().len() {
            let start = actions.len();
            for args in tuples(vocab.action_types(a), &by_type) {
                let ground = vocab
                    .action_atoms(a)
                    .map(|pa| {
                        let lifted = vocab.atom(pa);
                        let key = GroundAtom {
                            predicate: lifted.predicate,
                            args: lifted.binding.iter().map(|&b| args[b]).collect(),
                        };
                        atom_index[&key]
                    })
                    .collect();
                actions.push(GroundAction { action: a, args, atoms: ground });
            }
            action_ranges.push(start..actions.len());
        }
        let action_index = actions
            .iter()
            .enumerate()
            .map(|(i, g)| ((g.action, g.args.clone()), i))
            .collect();
        Arc::new(Universe { vocab, objects, atoms, atom_index, actions, action_index, action_ranges })
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn objects(&self) -> &Objects {
        &self.objects
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id]
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, id: GroundActionId) -> &GroundAction {
        &self.actions[id]
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    /// Groundings of one action schema in canonical order.
    pub fn groundings(&self, action: ActionId) -> std::ops::Range<GroundActionId> {
        self.action_ranges[action].clone()
    }

    /// Ground atom of lifted atom `pa` under ground action `g`.
    pub fn pa_atom(&self, g: GroundActionId, pa: PaId) -> AtomId {
        let ga = &self.actions[g];
        let start = self.vocab.action_atoms(ga.action).start;
        ga.atoms[pa - start]
    }

    pub fn find_atom(&self, predicate: &str, args: &[&str]) -> Result<AtomId> {
        let p = self
            .vocab
            .predicate_id(predicate)
            .ok_or_else(|| Error::Vocabulary(format!("undeclared predicate `{predicate}`")))?;
        let ids = self.resolve_objects(args)?;
        self.atom_index
            .get(&GroundAtom { predicate: p, args: ids })
            .copied()
            .ok_or_else(|| {
                Error::Vocabulary(format!("atom ({predicate} {}) is ill-typed or has wrong arity", args.join(" ")))
            })
    }

    pub fn find_action(&self, action: &str, args: &[&str]) -> Result<GroundActionId> {
        let a = self
            .vocab
            .action_id(action)
            .ok_or_else(|| Error::Vocabulary(format!("undeclared action `{action}`")))?;
        let ids = self.resolve_objects(args)?;
        self.action_index.get(&(a, ids)).copied().ok_or_else(|| {
            Error::Vocabulary(format!("action ({action} {}) is ill-typed or has wrong arity", args.join(" ")))
        })
    }

    pub fn action_id(&self, action: ActionId, args: &[ObjId]) -> Option<GroundActionId> {
        self.action_index.get(&(action, args.to_vec())).copied()
    }

    pub fn atom_id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.atom_index.get(atom).copied()
    }

    fn resolve_objects(&self, args: &[&str]) -> Result<Vec<ObjId>> {
        args.iter()
            .map(|a| {
                self.objects
                    .id(a)
                    .ok_or_else(|| Error::Vocabulary(format!("undeclared object `{a}`")))
            })
            .collect()
    }

    pub fn atom_text(&self, id: AtomId) -> String {
        let a = &self.atoms[id];
        let mut s = format!("({}", self.vocab.predicates()[a.predicate].name);
        for &o in &a.args {
            s.push(' ');
            s.push_str(self.objects.name(o));
        }
        s.push(')');
        s
    }

    pub fn action_text(&self, id: GroundActionId) -> String {
        let g = &self.actions[id];
        let mut s = format!("({}", self.vocab.actions()[g.action].name);
        for &o in &g.args {
            s.push(' ');
            s.push_str(self.objects.name(o));
        }
        s.push(')');
        s
    }

    /// Same vocabulary and objects, so states and actions are interchangeable.
    pub fn compatible(&self, other: &Universe) -> bool {
        *self.vocab == *other.vocab && self.objects == other.objects
    }
}

fn tuples(types: &[TypeId], by_type: &[Vec<ObjId>]) -> Vec<Vec<ObjId>> {
    let mut out = vec![Vec::with_capacity(types.len())];
    for &t in types {
        let mut next = Vec::with_capacity(out.len() * by_type[t].len());
        for prefix in &out {
            for &o in &by_type[t] {
                let mut v = prefix.clone();
                v.push(o);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
