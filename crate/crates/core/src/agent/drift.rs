use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DomainModel, Mode, PaValue, PalId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftMethod {
    /// `+`/`−` become `∅`.
    Drop,
    /// `∅` becomes `+` or `−`.
    Add,
    /// Each chosen pal-tuple is dropped if present and added if absent.
    Mixed,
}

impl DriftMethod {
    pub const ALL: [DriftMethod; 3] = [DriftMethod::Drop, DriftMethod::Add, DriftMethod::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            DriftMethod::Drop => "drop",
            DriftMethod::Add => "add",
            DriftMethod::Mixed => "mixed",
        }
    }
}

impl fmt::Display for DriftMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DriftMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(DriftMethod::Drop),
            "add" => Ok(DriftMethod::Add),
            "mixed" => Ok(DriftMethod::Mixed),
            _ => Err(Error::Config(format!("unknown drift method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    /// Fraction of nPals to flip.
    pub amount: f64,
    pub method: DriftMethod,
    pub seed: u64,
}

impl DriftSpec {
    pub fn flip_count(&self, n_pals: usize) -> usize {
        (self.amount * n_pals as f64).round() as usize
    }
}

/// Number of pal-tuples `method` may flip in `model`.
pub fn drift_capacity(model: &DomainModel, method: DriftMethod) -> usize {
    model
        .modes()
        .iter()
        .filter(|m| match method {
            DriftMethod::Drop => matches!(m, Mode::Plus | Mode::Minus),
            DriftMethod::Add => **m == Mode::Absent,
            DriftMethod::Mixed => true,
        })
        .count()
}

/// A model differing from `m_star` in exactly `round(amount × nPals)`
/// pal-tuples, chosen and signed by a generator seeded with `spec.seed`.
pub fn inject_drift(m_star: &DomainModel, spec: &DriftSpec) -> Result<DomainModel> {
    m_star.ensure_concrete()?;
    if !(0.0..=1.0).contains(&spec.amount) || spec.amount.is_nan() {
        return Err(Error::Config(format!("drift amount {} outside [0, 1]", spec.amount)));
    }
    let vocab = m_star.vocab();
    let k = spec.flip_count(vocab.pal_count());
    let mut candidates: Vec<PalId> = vocab
        .pals()
        .filter(|p| match spec.method {
            DriftMethod::Drop => m_star.mode(*p) != Mode::Absent,
            DriftMethod::Add => m_star.mode(*p) == Mode::Absent,
            DriftMethod::Mixed => true,
        })
        .collect();
    if k > candidates.len() {
        return Err(Error::InfeasibleDrift { requested: k, available: candidates.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    candidates.shuffle(&mut rng);
    let mut m = m_star.clone();
    for &pal in &candidates[..k] {
        let current = m.mode(pal);
        let next = if current == Mode::Absent {
            let partner = m.mode(pal.partner());
            let options: Vec<Mode> = [Mode::Plus, Mode::Minus]
                .into_iter()
                .filter(|mode| {
                    let v = if pal.location() == crate::model::Location::Pre {
                        PaValue::new(*mode, partner)
                    } else {
                        PaValue::new(partner, *mode)
                    };
                    v.is_legal()
                })
                .collect();
            *options.choose(&mut rng).expect("one sign is always legal")
        } else {
            Mode::Absent
        };
        m.set_mode(pal, next);
    }
    Ok(m)
}
