use std::fmt;

/// Mode of a pal-tuple: how a lifted atom appears at one location of an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Plus,
    Minus,
    Absent,
    /// Only legal inside abstract models.
    Unknown,
}

impl Mode {
    /// The three concrete modes in variant-expansion order.
    pub const CONCRETE: [Mode; 3] = [Mode::Plus, Mode::Minus, Mode::Absent];

    pub fn is_concrete(self) -> bool {
        self != Mode::Unknown
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Mode::Plus => "+",
            Mode::Minus => "-",
            Mode::Absent => "0",
            Mode::Unknown => "?",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Mode> {
        match s {
            "+" => Some(Mode::Plus),
            "-" => Some(Mode::Minus),
            "0" => Some(Mode::Absent),
            "?" => Some(Mode::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Pre,
    Eff,
}

impl Location {
    pub const ALL: [Location; 2] = [Location::Pre, Location::Eff];

    pub fn name(self) -> &'static str {
        match self {
            Location::Pre => "pre",
            Location::Eff => "eff",
        }
    }

    pub fn other(self) -> Location {
        match self {
            Location::Pre => Location::Eff,
            Location::Eff => Location::Pre,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Joint ⟨pre, eff⟩ value of a pa-tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PaValue {
    pub pre: Mode,
    pub eff: Mode,
}

impl PaValue {
    /// The seven legal concrete values, in the row order of the consistency table.
    pub const LEGAL: [PaValue; 7] = [
        PaValue::new(Mode::Plus, Mode::Minus),
        PaValue::new(Mode::Plus, Mode::Absent),
        PaValue::new(Mode::Minus, Mode::Plus),
        PaValue::new(Mode::Minus, Mode::Absent),
        PaValue::new(Mode::Absent, Mode::Plus),
        PaValue::new(Mode::Absent, Mode::Minus),
        PaValue::new(Mode::Absent, Mode::Absent),
    ];

    pub const fn new(pre: Mode, eff: Mode) -> Self {
        PaValue { pre, eff }
    }

    /// ⟨+,+⟩ and ⟨−,−⟩ are never legal; unknown halves are allowed for abstract models.
    pub fn is_legal(self) -> bool {
        !matches!(
            (self.pre, self.eff),
            (Mode::Plus, Mode::Plus) | (Mode::Minus, Mode::Minus)
        )
    }

    pub fn is_concrete(self) -> bool {
        self.pre.is_concrete() && self.eff.is_concrete()
    }

    pub fn at(self, loc: Location) -> Mode {
        match loc {
            Location::Pre => self.pre,
            Location::Eff => self.eff,
        }
    }

    fn index(self) -> Option<usize> {
        PaValue::LEGAL.iter().position(|v| *v == self)
    }
}

impl fmt::Display for PaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.pre, self.eff)
    }
}

/// A subset of the seven legal pa values, as a bitmask over `PaValue::LEGAL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PaValueSet(u8);

impl PaValueSet {
    pub const EMPTY: PaValueSet = PaValueSet(0);
    pub const ALL: PaValueSet = PaValueSet(0b111_1111);

    pub fn from_values<I: IntoIterator<Item = PaValue>>(values: I) -> Self {
        let mut set = PaValueSet::EMPTY;
        for v in values {
            set.insert(v);
        }
        set
    }

    pub fn insert(&mut self, v: PaValue) {
        if let Some(i) = v.index() {
            self.0 |= 1 << i;
        }
    }

    pub fn contains(self, v: PaValue) -> bool {
        v.index().is_some_and(|i| self.0 & (1 << i) != 0)
    }

    pub fn intersect(self, other: PaValueSet) -> PaValueSet {
        PaValueSet(self.0 & other.0)
    }

    pub fn union(self, other: PaValueSet) -> PaValueSet {
        PaValueSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = PaValue> {
        PaValue::LEGAL
            .into_iter()
            .enumerate()
            .filter(move |(i, _)| self.0 & (1 << i) != 0)
            .map(|(_, v)| v)
    }

    /// Values compatible with a (possibly unknown) pair of modes.
    pub fn matching(self, pre: Mode, eff: Mode) -> PaValueSet {
        PaValueSet::from_values(self.iter().filter(|v| {
            (pre == Mode::Unknown || v.pre == pre) && (eff == Mode::Unknown || v.eff == eff)
        }))
    }

    /// The single mode shared by every member at `loc`, if there is one.
    pub fn determined(self, loc: Location) -> Option<Mode> {
        let mut it = self.iter().map(|v| v.at(loc));
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    /// Modes that occur at `loc` among the members.
    pub fn modes_at(self, loc: Location) -> Vec<Mode> {
        Mode::CONCRETE
            .into_iter()
            .filter(|m| self.iter().any(|v| v.at(loc) == *m))
            .collect()
    }
}

impl fmt::Display for PaValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Presence {
    Pos,
    Neg,
}

impl Presence {
    pub fn of(value: bool) -> Self {
        if value {
            Presence::Pos
        } else {
            Presence::Neg
        }
    }
}

/// Truth of a ground atom in the pre- and post-state of one action triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PresenceTuple {
    pub pre: Presence,
    pub post: Presence,
}

impl PresenceTuple {
    pub const ALL: [PresenceTuple; 4] = [
        PresenceTuple::new(Presence::Pos, Presence::Pos),
        PresenceTuple::new(Presence::Pos, Presence::Neg),
        PresenceTuple::new(Presence::Neg, Presence::Pos),
        PresenceTuple::new(Presence::Neg, Presence::Neg),
    ];

    pub const fn new(pre: Presence, post: Presence) -> Self {
        PresenceTuple { pre, post }
    }

    pub fn from_truth(pre: bool, post: bool) -> Self {
        PresenceTuple::new(Presence::of(pre), Presence::of(post))
    }
}

// Rows follow `PaValue::LEGAL`; columns are (pos,pos), (pos,neg), (neg,pos), (neg,neg).
const CONSISTENCY: [[bool; 4]; 7] = [
    [false, true, false, false],
    [true, false, false, false],
    [false, false, true, false],
    [false, false, false, true],
    [true, false, true, false],
    [false, true, false, true],
    [true, false, false, true],
];

/// Pa values that can explain an observed presence tuple.
pub fn consistent_pa_values(pt: PresenceTuple) -> PaValueSet {
    let col = PresenceTuple::ALL
        .iter()
        .position(|p| *p == pt)
        .expect("presence tuple enumerated");
    PaValueSet::from_values(
        PaValue::LEGAL
            .into_iter()
            .enumerate()
            .filter(|(row, _)| CONSISTENCY[*row][col])
            .map(|(_, v)| v),
    )
}

/// Sound weakening used when another lifted atom of the same ground action
/// grounds to the same atom: only the pre-state truth is trusted.
pub fn pre_only_pa_values(pre: Presence) -> PaValueSet {
    consistent_pa_values(PresenceTuple::new(pre, Presence::Pos))
        .union(consistent_pa_values(PresenceTuple::new(pre, Presence::Neg)))
}
