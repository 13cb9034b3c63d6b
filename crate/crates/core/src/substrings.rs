//! Substring bookkeeping shared by the boolean matcher and the network.

use crate::alphabet::{Alphabet, SymbolSet};

/// Indexes all non-empty substrings `s[i..=j]` plus one slot for ε.
///
/// Characters outside the alphabet occupy positions but belong to no
/// symbol set, so every filter removes them.
#[derive(Clone, Debug)]
pub(crate) struct Substrings {
    n: usize,
    sets: Vec<SymbolSet>,
    /// Symbols occurring exactly once in each slot.
    singles: Vec<SymbolSet>,
}

impl Substrings {
    pub fn new(s: &str, sigma: &Alphabet) -> Self {
        let symbols: Vec<Option<usize>> = s.chars().map(|c| sigma.index_of(c)).collect();
        let n = symbols.len();
        let slots = n * n + 1;
        let mut sets = vec![SymbolSet::EMPTY; slots];
        let mut singles = vec![SymbolSet::EMPTY; slots];
        for i in 0..n {
            let mut set = SymbolSet::EMPTY;
            let mut multi = SymbolSet::EMPTY;
            for j in i..n {
                if let Some(k) = symbols[j] {
                    if set.contains(k) {
                        multi = multi.with(k);
                    }
                    set = set.with(k);
                }
                sets[i * n + j] = set;
                singles[i * n + j] = set.difference(multi);
            }
        }
        Substrings { n, sets, singles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> usize {
        self.n * self.n + 1
    }

    pub fn eps(&self) -> usize {
        self.n * self.n
    }

    /// Slot of the inclusive substring `s[i..=j]`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n + j
    }

    /// Alphabet symbols occurring in the slot.
    #[inline]
    pub fn set(&self, slot: usize) -> SymbolSet {
        self.sets[slot]
    }

    /// Symbols occurring exactly once in the slot.
    #[inline]
    pub fn singles(&self, slot: usize) -> SymbolSet {
        self.singles[slot]
    }

    pub fn whole(&self) -> usize {
        if self.n == 0 {
            self.eps()
        } else {
            self.idx(0, self.n - 1)
        }
    }

    /// Visits slots from shorter to longer: ε first, then each length in
    /// increasing start order.
    pub fn ascending(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n;
        std::iter::once((0, 0, self.eps())).chain(
            (1..=n).flat_map(move |len| (0..=n - len).map(move |i| (i, i + len - 1, i * n + i + len - 1))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_sets() {
        let sigma = Alphabet::parse("abc").unwrap();
        let subs = Substrings::new("abca", &sigma);
        assert_eq!(subs.set(subs.idx(0, 3)), sigma.full_set());
        assert_eq!(subs.singles(subs.idx(0, 3)), sigma.set_of("bc"));
        assert_eq!(subs.set(subs.eps()), SymbolSet::EMPTY);
        assert_eq!(subs.singles(subs.idx(1, 1)), sigma.set_of("b"));
        let order: Vec<_> = subs.ascending().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(order.len(), 1 + 4 + 3 + 2 + 1);
        assert_eq!(order[1], (0, 0));
        assert_eq!(order[10], (0, 3));
    }
}
