//! Atomic propositions and state valuations.

use std::collections::HashMap;
use std::fmt;

/// Largest number of atoms a single table can hold.
pub const MAX_ATOMS: usize = 64;

/// Indexed set of atomic proposition names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name` if absent and returns its index, or `None` when the
    /// table is full.
    pub fn insert(&mut self, name: &str) -> Option<usize> {
        if let Some(&i) = self.index.get(name) {
            return Some(i);
        }
        if self.names.len() == MAX_ATOMS {
            return None;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Some(i)
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Builds a valuation from atom names; unknown names are returned as
    /// the error.
    pub fn valuation<'a, I>(&self, names: I) -> Result<Valuation, String>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut v = Valuation::EMPTY;
        for n in names {
            match self.get(n) {
                Some(i) => v.insert(i),
                None => return Err(n.to_string()),
            }
        }
        Ok(v)
    }

    /// Names of the atoms true in `v`, in table order.
    pub fn names_of(&self, v: Valuation) -> Vec<&str> {
        (0..self.len())
            .filter(|&i| v.contains(i))
            .map(|i| self.name(i))
            .collect()
    }
}

/// Set of atoms holding in a state, as a bitmask over an [`AtomTable`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub u64);

impl Valuation {
    pub const EMPTY: Valuation = Valuation(0);

    pub fn contains(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub fn insert(&mut self, atom: usize) {
        self.0 |= 1 << atom;
    }

    pub fn with(mut self, atom: usize) -> Self {
        self.insert(atom);
        self
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}
