//! Membership by dynamic programming over the syntax tree.
//!
//! `g[t][s_ij]` records whether the subexpression rooted at `t` matches the
//! substring `s_ij` filtered to that subexpression's symbols. The table is
//! filled from shorter to longer substrings and, within a substring, from
//! the last vertex to the root, so every entry only reads finished entries.

use crate::alphabet::SymbolSet;
use crate::soire::{filter_set, Label, Soire};
use crate::substrings::Substrings;

/// The filled boolean table for one expression and one string.
#[derive(Clone, Debug)]
pub struct MatchTable {
    subs: Substrings,
    size: usize,
    g: Vec<bool>,
}

impl MatchTable {
    /// Fills the table for every vertex and substring. No symbol guard is
    /// applied; characters outside the alphabet are filtered out everywhere.
    pub fn build(r: &Soire, s: &str) -> MatchTable {
        let subs = Substrings::new(s, r.alphabet());
        let size = r.size();
        let slots = subs.slots();
        let mut g = vec![false; size * slots];
        let eps = subs.eps();
        let alpha: Vec<SymbolSet> = (0..size).map(|t| r.alpha_unchecked(t)).collect();
        // flag(t, t', slot): filtering by t and by its child t' agree, i.e. no
        // symbol of the slot lies in alpha(t) but outside alpha(t').
        let flag = |t: usize, child: usize, slot: usize| {
            subs.set(slot).intersection(alpha[t]).is_subset(alpha[child])
        };
        for (i, j, slot) in subs.ascending() {
            let nonempty = slot != eps;
            for t in (0..size).rev() {
                let v = r.vertex(t);
                let at = |t: usize, slot: usize| g[t * slots + slot];
                let value = match v.label {
                    Label::Symbol(_) => subs.singles(slot).intersection(alpha[t]) == alpha[t],
                    Label::Optional => subs.set(slot).is_disjoint(alpha[t]) || at(t + 1, slot),
                    Label::Star => {
                        subs.set(slot).is_disjoint(alpha[t])
                            || at(t + 1, slot)
                            || (nonempty
                                && (i..j).any(|k| at(t, subs.idx(i, k)) && at(t + 1, subs.idx(k + 1, j))))
                    }
                    Label::Plus => {
                        at(t + 1, slot)
                            || (nonempty
                                && (i..j).any(|k| at(t, subs.idx(i, k)) && at(t + 1, subs.idx(k + 1, j))))
                    }
                    Label::Concat => {
                        let (l, rt) = (t + 1, v.right.unwrap());
                        (flag(t, l, slot) && at(l, slot) && at(rt, eps))
                            || (flag(t, rt, slot) && at(rt, slot) && at(l, eps))
                            || (nonempty
                                && (i..j).any(|k| {
                                    let (a, b) = (subs.idx(i, k), subs.idx(k + 1, j));
                                    flag(t, l, a) && at(l, a) && flag(t, rt, b) && at(rt, b)
                                }))
                    }
                    Label::Interleave => at(t + 1, slot) && at(v.right.unwrap(), slot),
                    Label::Union => {
                        let (l, rt) = (t + 1, v.right.unwrap());
                        (flag(t, l, slot) && at(l, slot)) || (flag(t, rt, slot) && at(rt, slot))
                    }
                };
                g[t * slots + slot] = value;
            }
        }
        MatchTable { subs, size, g }
    }

    /// Whether vertex `t` filter-matches `s[start..end]`; an empty range is ε.
    pub fn get(&self, t: usize, start: usize, end: usize) -> bool {
        assert!(t < self.size, "vertex {t} out of range");
        let slot = if start >= end {
            self.subs.eps()
        } else {
            self.subs.idx(start, end - 1)
        };
        self.g[t * self.subs.slots() + slot]
    }

    /// Whether vertex `t` matches ε.
    pub fn nullable(&self, t: usize) -> bool {
        self.get(t, 0, 0)
    }

    /// The root entry for the whole string.
    pub fn root(&self) -> bool {
        self.g[self.subs.whole()]
    }

    pub fn string_len(&self) -> usize {
        self.subs.len()
    }
}

/// Whether `r` matches `s`: every character of `s` must be a symbol of `r`,
/// and the root must filter-match the whole string.
pub fn soiretm(r: &Soire, s: &str) -> bool {
    soiretm_with_table(r, s).0
}

/// Like [`soiretm`], also returning the table when the symbol guard passes.
pub fn soiretm_with_table(r: &Soire, s: &str) -> (bool, Option<MatchTable>) {
    let symbols = r.symbols();
    let guard = s
        .chars()
        .all(|c| r.alphabet().index_of(c).is_some_and(|k| symbols.contains(k)));
    if !guard {
        return (false, None);
    }
    let table = MatchTable::build(r, s);
    (table.root(), Some(table))
}

/// Whether filtering `s[start..end]` by the symbols of vertex `t` and of
/// vertex `child` gives the same string.
pub fn flag(r: &Soire, s: &str, start: usize, end: usize, t: usize, child: usize) -> bool {
    let chars: Vec<char> = s.chars().collect();
    let sub: String = chars[start.min(end)..end].iter().collect();
    let sigma = r.alphabet();
    filter_set(&sub, sigma, r.alpha_unchecked(t)) == filter_set(&sub, sigma, r.alpha_unchecked(child))
}
