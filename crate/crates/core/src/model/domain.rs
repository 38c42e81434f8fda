use std::fmt::Write as _;
use std::sync::Arc;

use super::mode::{Location, Mode, PaValue};
use super::vocab::{ActionId, PaId, PalId, Vocabulary};
use crate::error::{Error, Result};

/// A total mapping from pal-tuples to modes over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    vocab: Arc<Vocabulary>,
    modes: Vec<Mode>,
}

impl DomainModel {
    /// The model in which every pal-tuple is ∅.
    pub fn empty(vocab: Arc<Vocabulary>) -> Self {
        let n = vocab.pal_count();
        DomainModel { vocab, modes: vec![Mode::Absent; n] }
    }

    /// The fully abstract model: every pal-tuple is `?`.
    pub fn unknown(vocab: Arc<Vocabulary>) -> Self {
        let n = vocab.pal_count();
        DomainModel { vocab, modes: vec![Mode::Unknown; n] }
    }

    pub fn from_modes(vocab: Arc<Vocabulary>, modes: Vec<Mode>) -> Result<Self> {
        if modes.len() != vocab.pal_count() {
            return Err(Error::Vocabulary(format!(
                "expected {} modes, got {}",
                vocab.pal_count(),
                modes.len()
            )));
        }
        let m = DomainModel { vocab, modes };
        for pa in 0..m.vocab.pa_count() {
            let v = m.pa_value(pa);
            if !v.is_legal() {
                return Err(Error::Vocabulary(format!(
                    "illegal value {v} for {}",
                    m.vocab.atom_text(pa)
                )));
            }
        }
        Ok(m)
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, pal: PalId) -> Mode {
        self.modes[pal.index()]
    }

    /// Sets one mode. The caller keeps the pa value legal.
    pub fn set_mode(&mut self, pal: PalId, mode: Mode) {
        self.modes[pal.index()] = mode;
    }

    pub fn set_pa_value(&mut self, pa: PaId, v: PaValue) {
        self.modes[2 * pa] = v.pre;
        self.modes[2 * pa + 1] = v.eff;
    }

    pub fn with_mode(&self, pal: PalId, mode: Mode) -> Self {
        let mut m = self.clone();
        m.set_mode(pal, mode);
        m
    }

    pub fn pa_value(&self, pa: PaId) -> PaValue {
        PaValue::new(self.modes[2 * pa], self.modes[2 * pa + 1])
    }

    pub fn is_concrete(&self) -> bool {
        self.modes.iter().all(|m| m.is_concrete())
    }

    pub fn unknown_count(&self) -> usize {
        self.modes.iter().filter(|m| **m == Mode::Unknown).count()
    }

    pub fn ensure_concrete(&self) -> Result<()> {
        match self.unknown_count() {
            0 => Ok(()),
            unknown => Err(Error::AbstractModel { unknown }),
        }
    }

    /// Pal-tuples of `action` whose mode is not ∅ at `loc`.
    pub fn literals(&self, action: ActionId, loc: Location) -> Vec<(PaId, Mode)> {
        self.vocab
            .action_atoms(action)
            .filter_map(|pa| {
                let m = self.mode(PalId::new(pa, loc));
                (m != Mode::Absent).then_some((pa, m))
            })
            .collect()
    }

    /// One line per pal-tuple in canonical order: `action (pred ?x) loc mode`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for pal in self.vocab.pals() {
            let _ = writeln!(out, "{} {}", self.vocab.pal_text(pal), self.mode(pal));
        }
        out
    }

    /// Inverse of [`DomainModel::dump`].
    pub fn parse_dump(vocab: Arc<Vocabulary>, text: &str) -> Result<Self> {
        let mut modes = vec![None; vocab.pal_count()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let (key, sym) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| dump_error(i, "expected `<pal> <mode>`"))?;
            let mode = Mode::from_symbol(sym).ok_or_else(|| dump_error(i, "bad mode symbol"))?;
            let pal = vocab
                .parse_pal_text(key)
                .ok_or_else(|| dump_error(i, &format!("unknown pal-tuple `{}`", key.trim())))?;
            modes[pal.index()] = Some(mode);
        }
        let modes = modes
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    Error::Vocabulary(format!("dump lacks {}", vocab.pal_text(PalId(i as u32))))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        DomainModel::from_modes(vocab, modes)
    }
}

fn dump_error(line: usize, msg: &str) -> Error {
    Error::Parse { line: line + 1, col: 1, message: msg.to_string() }
}

/// Pal-tuples on which the two models disagree, in canonical order.
pub fn differing_pals(m1: &DomainModel, m2: &DomainModel) -> Result<Vec<PalId>> {
    m1.vocab.ensure_same(&m2.vocab)?;
    Ok(m1
        .vocab
        .pals()
        .filter(|p| m1.mode(*p) != m2.mode(*p))
        .collect())
}

/// Δ: the number of pal-tuples whose modes differ.
pub fn model_diff(m1: &DomainModel, m2: &DomainModel) -> Result<usize> {
    m1.vocab.ensure_same(&m2.vocab)?;
    Ok(m1.modes.iter().zip(&m2.modes).filter(|(a, b)| a != b).count())
}

/// Whether `m2` is an abstraction of `m1`: every mode of `m2` is `?` or agrees with `m1`.
pub fn is_abstraction(m2: &DomainModel, m1: &DomainModel) -> Result<bool> {
    m1.vocab.ensure_same(&m2.vocab)?;
    Ok(m2
        .modes
        .iter()
        .zip(&m1.modes)
        .all(|(a, b)| *a == Mode::Unknown || a == b))
}
