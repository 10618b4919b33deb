//! Symbol declarations and index-label conventions.
//!
//! Index labels carry their index space by spelling: Greek letter names
//! (`mu`, `nu`, `lam`, `sigma`, ...) are coordinate indices, anything else
//! (`a`, `b`, `i`, ...) is a frame index. Trailing digits are ignored, so
//! `mu2` is a coordinate index too.
//!
//! A name may be declared more than once with different slot signatures;
//! `q^a_mu` (tetrad) and `q^mu_a` (inverse tetrad) resolve to different
//! declarations sharing the name `q`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Upper,
    Lower,
}

impl Position {
    pub fn marker(self) -> char {
        match self {
            Position::Upper => '^',
            Position::Lower => '_',
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Position::Upper => Position::Lower,
            Position::Lower => Position::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    Frame,
    Coordinate,
    /// Matches either space (Kronecker deltas).
    Any,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Frame => "frame",
            Space::Coordinate => "coord",
            Space::Any => "any",
        }
    }

    pub fn accepts(self, other: Space) -> bool {
        self == Space::Any || other == Space::Any || self == other
    }
}

const GREEK: [&str; 25] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "lam", "mu", "nu",
    "xi", "omicron", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
];

/// Index space implied by a label's spelling.
pub fn label_space(label: &str) -> Space {
    let stem = label.trim_end_matches(|c: char| c.is_ascii_digit());
    if GREEK.contains(&stem) {
        Space::Coordinate
    } else {
        Space::Frame
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub position: Position,
    pub space: Space,
}

impl Slot {
    pub const fn new(position: Position, space: Space) -> Self {
        Self { position, space }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.position.marker(), self.space.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolDecl {
    pub name: String,
    pub slots: Vec<Slot>,
    pub tensorial: bool,
}

impl SymbolDecl {
    pub fn tensor(name: &str, slots: &[Slot]) -> Self {
        Self {
            name: name.to_string(),
            slots: slots.to_vec(),
            tensorial: true,
        }
    }

    pub fn nontensor(name: &str, slots: &[Slot]) -> Self {
        Self {
            tensorial: false,
            ..Self::tensor(name, slots)
        }
    }

    pub fn scalar(name: &str) -> Self {
        Self::tensor(name, &[])
    }

    /// Whether the written indices fit this declaration slot by slot.
    pub fn accepts(&self, written: &[(Position, Space)]) -> bool {
        self.slots.len() == written.len()
            && self
                .slots
                .iter()
                .zip(written)
                .all(|(s, (p, sp))| s.position == *p && s.space.accepts(*sp))
    }

    /// A non-tensorial connection on `space`: slots `[^space, _coord, _space]`.
    pub fn connection_space(&self) -> Option<Space> {
        match self.slots.as_slice() {
            [up, mid, low]
                if !self.tensorial
                    && up.position == Position::Upper
                    && mid.position == Position::Lower
                    && mid.space == Space::Coordinate
                    && low.position == Position::Lower
                    && up.space == low.space =>
            {
                Some(up.space)
            }
            _ => None,
        }
    }

    /// Two-slot declarations whose slots are mirror images, like a tetrad
    /// `[^frame _coord]` and its inverse `[^coord _frame]`.
    pub fn is_inverse_pair(&self, other: &SymbolDecl) -> bool {
        match (self.slots.as_slice(), other.slots.as_slice()) {
            ([a0, a1], [b0, b1]) => {
                self.name == other.name
                    && a0.position != a1.position
                    && a0.position == b0.position
                    && a1.position == b1.position
                    && a0.space == b1.space
                    && a1.space == b0.space
                    && a0.space != a1.space
            }
            _ => false,
        }
    }
}

impl fmt::Display for SymbolDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match (self.tensorial, self.slots.is_empty()) {
            (true, true) => return write!(f, "scalar {}", self.name),
            (true, false) => "tensor",
            (false, _) => "nontensor",
        };
        write!(f, "{kind} {}[", self.name)?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    decls: Vec<SymbolDecl>,
}

const UF: Slot = Slot::new(Position::Upper, Space::Frame);
const LF: Slot = Slot::new(Position::Lower, Space::Frame);
const UC: Slot = Slot::new(Position::Upper, Space::Coordinate);
const LC: Slot = Slot::new(Position::Lower, Space::Coordinate);
const UA: Slot = Slot::new(Position::Upper, Space::Any);
const LA: Slot = Slot::new(Position::Lower, Space::Any);

impl SymbolTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Tetrad `q` and its inverse, spin connection `omega`, Christoffel
    /// symbols `Gamma`, metric `g`, frame metric `eta`, Kronecker `delta`
    /// and the scalar `R`.
    pub fn default_table() -> Self {
        let mut t = Self::empty();
        t.declare(SymbolDecl::tensor("q", &[UF, LC]));
        t.declare(SymbolDecl::tensor("q", &[UC, LF]));
        t.declare(SymbolDecl::nontensor("omega", &[UF, LC, LF]));
        t.declare(SymbolDecl::nontensor("Gamma", &[UC, LC, LC]));
        t.declare(SymbolDecl::tensor("g", &[LC, LC]));
        t.declare(SymbolDecl::tensor("g", &[UC, UC]));
        t.declare(SymbolDecl::tensor("eta", &[LF, LF]));
        t.declare(SymbolDecl::tensor("eta", &[UF, UF]));
        t.declare(SymbolDecl::tensor("delta", &[UA, LA]));
        t.declare(SymbolDecl::scalar("R"));
        t
    }

    /// Adds a declaration, replacing any with the same name and slot signature.
    pub fn declare(&mut self, decl: SymbolDecl) {
        match self
            .decls
            .iter_mut()
            .find(|d| d.name == decl.name && d.slots == decl.slots)
        {
            Some(existing) => *existing = decl,
            None => self.decls.push(decl),
        }
    }

    pub fn by_name<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a SymbolDecl> + 'a {
        self.decls.iter().filter(move |d| d.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.decls.iter()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }
}
