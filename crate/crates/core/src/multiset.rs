//! Finite multisets over an interned alphabet.
//!
//! Every quantity in both formalisms (membrane contents, rule sides,
//! markings, pending deliveries) is a [`Multiset`] of [`Symbol`]s. Symbols are
//! interned per model through an [`Alphabet`], so two independently loaded
//! models never share handles.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultisetError {
    #[error("multiset subtraction underflow: not enough copies of symbol #{symbol}")]
    Underflow { symbol: u32 },
    #[error("multiset count overflow on symbol #{symbol}")]
    Overflow { symbol: u32 },
}

/// Interned handle for an element of an alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Injective name <-> symbol table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Self::new();
        for name in names {
            alphabet.intern(name);
        }
        alphabet
    }

    /// Returns the existing handle for `name` or allocates a fresh one.
    pub fn intern(&mut self, name: impl Into<String>) -> Symbol {
        let name = name.into();
        if let Some(&sym) = self.lookup.get(&name) {
            return sym;
        }
        let sym = Symbol(self.names.len() as u32);
        self.lookup.insert(name.clone(), sym);
        self.names.push(name);
        sym
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        sym.index() < self.names.len()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A finite multiset, stored as `(symbol, count)` pairs sorted by symbol with
/// no zero counts. Equality, ordering and hashing are therefore count-wise.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    entries: Vec<(Symbol, u64)>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(sym: Symbol, count: u64) -> Self {
        let mut m = Self::new();
        if count > 0 {
            m.entries.push((sym, count));
        }
        m
    }

    /// Builds a multiset from possibly repeated pairs, summing repeats.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, MultisetError>
    where
        I: IntoIterator<Item = (Symbol, u64)>,
    {
        let mut m = Self::new();
        for (sym, n) in pairs {
            m.insert(sym, n)?;
        }
        Ok(m)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of elements, counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.entries.iter().map(|&(_, n)| n).sum()
    }

    pub fn count(&self, sym: Symbol) -> u64 {
        match self.entries.binary_search_by_key(&sym, |&(s, _)| s) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn support(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.entries.iter().map(|&(s, _)| s)
    }

    /// Adds `n` copies of `sym` in place.
    pub fn insert(&mut self, sym: Symbol, n: u64) -> Result<(), MultisetError> {
        if n == 0 {
            return Ok(());
        }
        match self.entries.binary_search_by_key(&sym, |&(s, _)| s) {
            Ok(i) => {
                let slot = &mut self.entries[i].1;
                *slot = slot
                    .checked_add(n)
                    .ok_or(MultisetError::Overflow { symbol: sym.0 })?;
            }
            Err(i) => self.entries.insert(i, (sym, n)),
        }
        Ok(())
    }

    /// Removes `n` copies of `sym` in place.
    pub fn remove(&mut self, sym: Symbol, n: u64) -> Result<(), MultisetError> {
        if n == 0 {
            return Ok(());
        }
        match self.entries.binary_search_by_key(&sym, |&(s, _)| s) {
            Ok(i) if self.entries[i].1 >= n => {
                self.entries[i].1 -= n;
                if self.entries[i].1 == 0 {
                    self.entries.remove(i);
                }
                Ok(())
            }
            _ => Err(MultisetError::Underflow { symbol: sym.0 }),
        }
    }

    /// In-place count-wise sum.
    pub fn absorb(&mut self, other: &Multiset) -> Result<(), MultisetError> {
        for (sym, n) in other.iter() {
            self.insert(sym, n)?;
        }
        Ok(())
    }

    /// In-place count-wise difference; leaves `self` untouched on underflow.
    pub fn deplete(&mut self, other: &Multiset) -> Result<(), MultisetError> {
        if let Some(sym) = other.iter().find(|&(s, n)| self.count(s) < n).map(|(s, _)| s) {
            return Err(MultisetError::Underflow { symbol: sym.0 });
        }
        for (sym, n) in other.iter() {
            self.remove(sym, n)?;
        }
        Ok(())
    }

    pub fn add(&self, other: &Multiset) -> Result<Multiset, MultisetError> {
        let mut out = self.clone();
        out.absorb(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Multiset) -> Result<Multiset, MultisetError> {
        let mut out = self.clone();
        out.deplete(other)?;
        Ok(out)
    }

    /// `self <= other` count-wise.
    pub fn leq(&self, other: &Multiset) -> bool {
        self.entries.iter().all(|&(s, n)| other.count(s) >= n)
    }

    pub fn scale(&self, factor: u64) -> Result<Multiset, MultisetError> {
        if factor == 0 {
            return Ok(Multiset::new());
        }
        let entries = self
            .entries
            .iter()
            .map(|&(s, n)| {
                n.checked_mul(factor)
                    .map(|v| (s, v))
                    .ok_or(MultisetError::Overflow { symbol: s.0 })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Multiset { entries })
    }

    /// How many times `self` fits into `other`; `None` when `self` is empty
    /// (it fits unboundedly often).
    pub fn multiplicity_in(&self, other: &Multiset) -> Option<u64> {
        self.entries.iter().map(|&(s, n)| other.count(s) / n).min()
    }

    /// Keeps only the elements whose symbol satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(Symbol) -> bool) -> Multiset {
        Multiset {
            entries: self.entries.iter().copied().filter(|&(s, _)| keep(s)).collect(),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayMultiset<'a> {
        DisplayMultiset {
            multiset: self,
            alphabet,
        }
    }
}

/// Renders `a^2 b^5` style text, `eps` for the empty multiset.
pub struct DisplayMultiset<'a> {
    multiset: &'a Multiset,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayMultiset<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiset.is_empty() {
            return f.write_str("eps");
        }
        for (i, (sym, n)) in self.multiset.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(sym))?;
            if n > 1 {
                write!(f, "^{n}")?;
            }
        }
        Ok(())
    }
}
