//! Alphabets and symbol sets.

use std::fmt;

use crate::error::{Error, Result};

/// Operator glyphs used in serialized notation.
pub const OPERATOR_GLYPHS: [char; 6] = ['?', '*', '+', '.', '&', '|'];

/// Upper bound on alphabet size; symbol sets are 64-bit masks.
pub const MAX_SYMBOLS: usize = 64;

pub(crate) fn is_reserved(c: char) -> bool {
    OPERATOR_GLYPHS.contains(&c) || c == '·' || c == '(' || c == ')' || c == '#' || c.is_whitespace()
}

/// An ordered set of distinct single-character symbols.
///
/// The order is fixed at construction and determines the column order of
/// the symbol part of an encoding.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if symbols.len() > MAX_SYMBOLS {
            return Err(Error::InvalidAlphabet(format!(
                "{} symbols exceed the limit of {MAX_SYMBOLS}",
                symbols.len()
            )));
        }
        for (k, &c) in symbols.iter().enumerate() {
            if is_reserved(c) {
                return Err(Error::InvalidAlphabet(format!("`{c}` is reserved")));
            }
            if symbols[..k].contains(&c) {
                return Err(Error::InvalidAlphabet(format!("`{c}` listed twice")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The first `n` lowercase letters.
    pub fn letters(n: usize) -> Result<Self> {
        if n > 26 {
            return Err(Error::InvalidAlphabet(format!("{n} letters requested")));
        }
        Alphabet::new((b'a'..b'a' + n as u8).map(char::from))
    }

    /// Parses a string of symbols, e.g. `"abc"`.
    pub fn parse(text: &str) -> Result<Self> {
        Alphabet::new(text.chars())
    }

    /// The distinct non-operator characters of `text`, sorted.
    pub fn from_symbols_in(text: &str) -> Result<Self> {
        let mut chars: Vec<char> = text.chars().filter(|&c| !is_reserved(c)).collect();
        chars.sort_unstable();
        chars.dedup();
        Alphabet::new(chars)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> char {
        self.symbols[index]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    /// The set holding every symbol.
    pub fn full_set(&self) -> SymbolSet {
        SymbolSet::first_n(self.len())
    }

    /// The set of alphabet symbols occurring in `s`; other characters are ignored.
    pub fn set_of(&self, s: &str) -> SymbolSet {
        s.chars()
            .filter_map(|c| self.index_of(c))
            .fold(SymbolSet::EMPTY, |acc, k| acc.with(k))
    }

    pub fn as_string(&self) -> String {
        self.symbols.iter().collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", self.as_string())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_string())
    }
}

/// A set of alphabet positions, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SymbolSet(pub u64);

impl SymbolSet {
    pub const EMPTY: SymbolSet = SymbolSet(0);

    pub fn first_n(n: usize) -> Self {
        if n >= 64 {
            SymbolSet(u64::MAX)
        } else {
            SymbolSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(index: usize) -> Self {
        SymbolSet(1u64 << index)
    }

    pub fn with(self, index: usize) -> Self {
        SymbolSet(self.0 | (1u64 << index))
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1u64 << index) != 0
    }

    pub fn union(self, other: SymbolSet) -> Self {
        SymbolSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SymbolSet) -> Self {
        SymbolSet(self.0 & other.0)
    }

    pub fn difference(self, other: SymbolSet) -> Self {
        SymbolSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: SymbolSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: SymbolSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&k| self.contains(k))
    }

    /// The member characters in alphabet order.
    pub fn chars(self, sigma: &Alphabet) -> Vec<char> {
        self.iter().map(|k| sigma.symbol(k)).collect()
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Keeps exactly the characters of `s` that belong to `keep`, in order.
pub fn filter(s: &str, keep: impl Fn(char) -> bool) -> String {
    s.chars().filter(|&c| keep(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_alphabets() {
        assert!(Alphabet::parse("").is_err());
        assert!(Alphabet::parse("aba").is_err());
        assert!(Alphabet::parse("a*").is_err());
        assert!(Alphabet::parse("a b").is_err());
        assert_eq!(Alphabet::letters(10).unwrap().as_string(), "abcdefghij");
    }

    #[test]
    fn set_of_ignores_foreign_characters() {
        let sigma = Alphabet::parse("abc").unwrap();
        let set = sigma.set_of("dbac");
        assert_eq!(set, sigma.full_set());
        assert_eq!(sigma.set_of("zz"), SymbolSet::EMPTY);
    }

    #[test]
    fn set_algebra() {
        let a = SymbolSet::singleton(0).with(2);
        let b = SymbolSet::singleton(2);
        assert!(b.is_subset(a));
        assert_eq!(a.difference(b), SymbolSet::singleton(0));
        assert_eq!(a.len(), 2);
        assert!(!a.is_disjoint(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
    }
}
