use std::fmt;

/// Closed-world state: a bit-set over a universe's ground atoms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct State {
    words: Vec<u64>,
}

impl State {
    pub fn empty(n_atoms: usize) -> Self {
        State { words: vec![0; n_atoms.div_ceil(64)] }
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(n_atoms: usize, atoms: I) -> Self {
        let mut s = State::empty(n_atoms);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    #[inline]
    pub fn contains(&self, atom: usize) -> bool {
        self.words[atom / 64] >> (atom % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, atom: usize) {
        self.words[atom / 64] |= 1 << (atom % 64);
    }

    #[inline]
    pub fn remove(&mut self, atom: usize) {
        self.words[atom / 64] &= !(1 << (atom % 64));
    }

    #[inline]
    pub fn set(&mut self, atom: usize, value: bool) {
        if value {
            self.insert(atom)
        } else {
            self.remove(atom)
        }
    }

    pub fn with(&self, atom: usize, value: bool) -> State {
        let mut s = self.clone();
        s.set(atom, value);
        s
    }

    /// `self ⊇ other`.
    #[inline]
    pub fn is_superset(&self, other: &State) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == *b)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &State) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// `(self \ del) ∪ add`.
    #[inline]
    pub fn successor(&self, del: &State, add: &State) -> State {
        State {
            words: self
                .words
                .iter()
                .zip(&del.words)
                .zip(&add.words)
                .map(|((s, d), a)| (s & !d) | a)
                .collect(),
        }
    }

    /// Whether this state is a subset of a universe of `n_atoms` atoms with
    /// the matching word count.
    pub fn fits(&self, n_atoms: usize) -> bool {
        self.words.len() == n_atoms.div_ceil(64) && self.iter().all(|a| a < n_atoms)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// Atoms whose truth differs between the two states.
    pub fn difference(&self, other: &State) -> impl Iterator<Item = usize> + '_ {
        let diff = State {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        };
        diff.iter().collect::<Vec<_>>().into_iter()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
