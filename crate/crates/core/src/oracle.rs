//! Reference matcher: direct recursion over the matching semantics.
//!
//! Exponential in the worst case and meant for small instances only. It
//! shares nothing with the dynamic program in [`crate::matcher`] beyond the
//! syntax tree.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::soire::{Label, Soire};

/// How the interleaving case splits its input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterleaveMode {
    /// Try every partition of the positions into two subsequences.
    Enumerate,
    /// Project the string onto each operand's symbols. Sound only because
    /// operands of a single-occurrence expression have disjoint symbols.
    Project,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub max_len: usize,
    pub max_size: usize,
    pub mode: InterleaveMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_len: 10,
            max_size: 15,
            mode: InterleaveMode::Enumerate,
        }
    }
}

/// Decides `r ⊨ s` by recursion on the expression.
pub fn oracle_match(r: &Soire, s: &str, config: OracleConfig) -> Result<bool> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() > config.max_len {
        return Err(Error::InstanceTooLarge(format!(
            "string length {} exceeds {}",
            chars.len(),
            config.max_len
        )));
    }
    if r.size() > config.max_size {
        return Err(Error::InstanceTooLarge(format!(
            "expression size {} exceeds {}",
            r.size(),
            config.max_size
        )));
    }
    let mut oracle = Oracle {
        r,
        mode: config.mode,
        memo: HashMap::new(),
    };
    Ok(oracle.matches(0, &chars))
}

struct Oracle<'a> {
    r: &'a Soire,
    mode: InterleaveMode,
    memo: HashMap<(usize, Vec<char>), bool>,
}

impl Oracle<'_> {
    fn matches(&mut self, t: usize, s: &[char]) -> bool {
        let key = (t, s.to_vec());
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let result = self.decide(t, s);
        self.memo.insert(key, result);
        result
    }

    fn decide(&mut self, t: usize, s: &[char]) -> bool {
        let v = self.r.vertex(t);
        let left = t + 1;
        match v.label {
            Label::Symbol(a) => s == [a],
            Label::Optional => s.is_empty() || self.matches(left, s),
            // r* matches ε or s1·s2 with s2 non-empty, r* ⊨ s1 and r ⊨ s2.
            Label::Star => {
                s.is_empty()
                    || (0..s.len()).any(|k| self.matches(t, &s[..k]) && self.matches(left, &s[k..]))
            }
            // r+ matches s1·s2 with r* ⊨ s1 and r ⊨ s2; r* is not a vertex
            // here, so unfold it: r* ⊨ s1 iff s1 = ε or r+ ⊨ s1. A split with
            // s2 = ε adds nothing a shorter s1 does not already cover.
            Label::Plus => (0..s.len().max(1)).any(|k| {
                let prefix_ok = k == 0 || self.matches(t, &s[..k]);
                prefix_ok && self.matches(left, &s[k..])
            }),
            Label::Concat => {
                let right = v.right.unwrap();
                (0..=s.len()).any(|k| self.matches(left, &s[..k]) && self.matches(right, &s[k..]))
            }
            Label::Interleave => {
                let right = v.right.unwrap();
                match self.mode {
                    InterleaveMode::Enumerate => self.interleave_enumerate(left, right, s),
                    InterleaveMode::Project => self.interleave_project(left, right, s),
                }
            }
            Label::Union => {
                let right = v.right.unwrap();
                self.matches(left, s) || self.matches(right, s)
            }
        }
    }

    fn interleave_enumerate(&mut self, left: usize, right: usize, s: &[char]) -> bool {
        let n = s.len();
        (0u64..1 << n).any(|mask| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (k, &c) in s.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    a.push(c);
                } else {
                    b.push(c);
                }
            }
            self.matches(left, &a) && self.matches(right, &b)
        })
    }

    fn interleave_project(&mut self, left: usize, right: usize, s: &[char]) -> bool {
        let sigma = self.r.alphabet();
        let in_left = self.r.alpha_unchecked(left);
        let in_right = self.r.alpha_unchecked(right);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for &c in s {
            match sigma.index_of(c) {
                Some(k) if in_left.contains(k) => a.push(c),
                Some(k) if in_right.contains(k) => b.push(c),
                _ => return false,
            }
        }
        self.matches(left, &a) && self.matches(right, &b)
    }
}
