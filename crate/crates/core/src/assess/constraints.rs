use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{
    consistent_pa_values, pre_only_pa_values, DomainModel, Location, Mode, PaId, PaValueSet, PalId, Presence,
    PresenceTuple, Vocabulary,
};
use crate::planner::{ActionTriplet, AtomId, ObservationTrace, Universe};

/// Possible pa values for every pa-tuple, narrowed by observed triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct PaConstraints {
    values: Vec<PaValueSet>,
    observed: Vec<bool>,
}

impl PaConstraints {
    pub fn unconstrained(vocab: &Vocabulary) -> Self {
        PaConstraints {
            values: vec![PaValueSet::ALL; vocab.pa_count()],
            observed: vec![false; vocab.actions().len()],
        }
    }

    pub fn get(&self, pa: PaId) -> PaValueSet {
        self.values[pa]
    }

    pub fn values(&self) -> &[PaValueSet] {
        &self.values
    }

    pub fn is_observed(&self, action: usize) -> bool {
        self.observed[action]
    }

    /// Intersects the constraints with what `t` implies.
    pub fn add_triplet(&mut self, universe: &Universe, t: &ActionTriplet) -> Result<()> {
        let vocab = universe.vocab();
        let ga = universe.action(t.action);
        self.observed[ga.action] = true;
        let range = vocab.action_atoms(ga.action);
        for (pa, &atom) in range.clone().zip(&ga.atoms) {
            let collides = ga.atoms.iter().filter(|a| **a == atom).count() > 1;
            let pre = t.pre.contains(atom);
            let allowed = if collides {
                pre_only_pa_values(Presence::of(pre))
            } else {
                consistent_pa_values(PresenceTuple::from_truth(pre, t.post.contains(atom)))
            };
            let next = self.values[pa].intersect(allowed);
            if next.is_empty() {
                return Err(Error::InconsistentObservations(format!(
                    "{} {}",
                    vocab.actions()[ga.action].name,
                    vocab.atom_text(pa)
                )));
            }
            self.values[pa] = next;
        }
        Ok(())
    }
}

/// Intersection of the consistent-value columns over every triplet of every trace. Pa-tuples of
/// unobserved actions keep all seven values.
pub fn infer_pa_constraints(traces: &[ObservationTrace], vocab: &Vocabulary) -> Result<PaConstraints> {
    let mut c = PaConstraints::unconstrained(vocab);
    for t in traces {
        vocab.ensure_same(t.universe().vocab())?;
        for triplet in t.triplets() {
            c.add_triplet(t.universe(), &triplet)?;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpandedFindings {
    /// Pal-tuples whose M_init value contradicts the observations.
    pub flagged: Vec<PalId>,
    /// Modes uniquely determined by the observations for flagged pal-tuples.
    pub fixed: Vec<(PalId, Mode)>,
}

/// Pairs both pal-tuples of every pa-tuple whose M_init value lies outside
/// its constraint. Lifted atoms that ground to the same atom in some
/// triplet are checked jointly against that triplet, since the single-atom
/// table cannot speak for each of them.
pub fn detect_expanded(
    m_init: &DomainModel,
    constraints: &PaConstraints,
    traces: &[ObservationTrace],
) -> Result<ExpandedFindings> {
    m_init.ensure_concrete()?;
    let vocab = m_init.vocab();
    let mut flagged_pa = BTreeSet::new();
    for a in 0..vocab.actions().len() {
        if !constraints.is_observed(a) {
            continue;
        }
        for pa in vocab.action_atoms(a) {
            if !constraints.get(pa).contains(m_init.pa_value(pa)) {
                flagged_pa.insert(pa);
            }
        }
    }
    for trace in traces {
        let u = trace.universe();
        for t in trace.triplets() {
            for group in collision_groups(u, t.action) {
                if group.pas.len() > 1 && !group_consistent(m_init, &group, &t) {
                    flagged_pa.extend(group.pas.iter().copied());
                }
            }
        }
    }
    let mut out = ExpandedFindings::default();
    for pa in flagged_pa {
        for loc in Location::ALL {
            out.flagged.push(PalId::new(pa, loc));
        }
    }
    out.fixed = fixed_modes(constraints, vocab, &out.flagged);
    Ok(out)
}

/// Modes that every possible value of an observed pa-tuple agrees on.
pub fn fixed_modes(constraints: &PaConstraints, vocab: &Vocabulary, pals: &[PalId]) -> Vec<(PalId, Mode)> {
    pals.iter()
        .filter(|p| constraints.is_observed(vocab.atom(p.pa()).action))
        .filter_map(|p| constraints.get(p.pa()).determined(p.location()).map(|m| (*p, m)))
        .collect()
}

/// Lifted atoms of one ground action that share a ground atom.
#[derive(Debug, Clone)]
pub struct CollisionGroup {
    pub atom: AtomId,
    pub pas: Vec<PaId>,
}

pub fn collision_groups(u: &Universe, g: usize) -> Vec<CollisionGroup> {
    let ga = u.action(g);
    let start = u.vocab().action_atoms(ga.action).start;
    let mut groups: Vec<CollisionGroup> = Vec::new();
    for (i, &atom) in ga.atoms.iter().enumerate() {
        match groups.iter_mut().find(|gr| gr.atom == atom) {
            Some(gr) => gr.pas.push(start + i),
            None => groups.push(CollisionGroup { atom, pas: vec![start + i] }),
        }
    }
    groups
}

fn group_consistent(m: &DomainModel, group: &CollisionGroup, t: &ActionTriplet) -> bool {
    let before = t.pre.contains(group.atom);
    let mut add = false;
    let mut del = false;
    for &pa in &group.pas {
        let v = m.pa_value(pa);
        if (v.pre == Mode::Plus && !before) || (v.pre == Mode::Minus && before) {
            return false;
        }
        add |= v.eff == Mode::Plus;
        del |= v.eff == Mode::Minus;
    }
    let after = if add { true } else if del { false } else { before };
    after == t.post.contains(group.atom)
}
