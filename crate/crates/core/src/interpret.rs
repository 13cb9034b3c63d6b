//! Beam search from learnt parameters back to an expression.
//!
//! Candidates are built for every vertex from the last to the root. A vertex
//! may hold a symbol, a unary operator over a candidate of the next vertex, or
//! a binary operator joining a candidate of the next vertex with a candidate
//! of any later vertex whose symbols are disjoint from it. The score of a
//! candidate is the product of the weights used to build it, and each vertex
//! keeps the `beta` candidates with the largest `score^(1/size)`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::alphabet::SymbolSet;
use crate::dataset::Dataset;
use crate::encoding::{Column, Encoding};
use crate::error::{Error, Result};
use crate::metrics::accuracy;
use crate::soire::Soire;

pub const DEFAULT_BEAM: usize = 500;

/// Score of a candidate built from two operands.
pub fn score_merge(e_i: f64, e_j: f64, op_weight: f64) -> f64 {
    e_i * e_j * op_weight
}

/// Ranking key `score^(1/size)`.
pub fn rank_key(score: f64, size: usize) -> f64 {
    if score <= 0.0 {
        0.0
    } else {
        (score.ln() / size as f64).exp()
    }
}

/// A surviving candidate of one vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamCandidate {
    /// Prefix notation.
    pub prefix: String,
    pub score: f64,
    pub size: usize,
    pub symbols: SymbolSet,
}

impl BeamCandidate {
    pub fn rank(&self) -> f64 {
        rank_key(self.score, self.size)
    }
}

#[derive(Clone, Debug)]
struct Entry {
    key: f64,
    cand: BeamCandidate,
}

/// Better candidates sort first: larger key, then smaller size, then prefix.
fn better(a_key: f64, a_size: usize, a_prefix: &str, b_key: f64, b_size: usize, b_prefix: &str) -> Ordering {
    b_key
        .total_cmp(&a_key)
        .then(a_size.cmp(&b_size))
        .then_with(|| a_prefix.cmp(b_prefix))
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        better(
            self.key,
            self.cand.size,
            &self.cand.prefix,
            other.key,
            other.cand.size,
            &other.cand.prefix,
        )
    }
}

/// Top-`beta` candidates of one vertex; a repeated expression keeps its
/// best score.
struct Beam {
    beta: usize,
    entries: BTreeSet<Entry>,
    scores: HashMap<String, f64>,
}

impl Beam {
    fn new(beta: usize) -> Beam {
        Beam {
            beta,
            entries: BTreeSet::new(),
            scores: HashMap::new(),
        }
    }

    /// Whether a candidate with this key and size could enter, before its
    /// prefix is known.
    fn may_admit(&self, key: f64, size: usize) -> bool {
        if self.entries.len() < self.beta {
            return true;
        }
        let worst = self.entries.last().unwrap();
        match worst.key.total_cmp(&key) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => size <= worst.cand.size,
        }
    }

    fn offer(&mut self, cand: BeamCandidate) {
        let key = cand.rank();
        if let Some(&old) = self.scores.get(&cand.prefix) {
            if old >= cand.score {
                return;
            }
            let stale = Entry {
                key: rank_key(old, cand.size),
                cand: BeamCandidate { score: old, ..cand.clone() },
            };
            self.entries.remove(&stale);
            self.scores.remove(&cand.prefix);
        }
        let entry = Entry { key, cand };
        if self.entries.len() >= self.beta {
            let worst = self.entries.last().unwrap();
            if entry.cmp(worst) != Ordering::Less {
                return;
            }
            let worst = self.entries.pop_last().unwrap();
            self.scores.remove(&worst.cand.prefix);
        }
        self.scores.insert(entry.cand.prefix.clone(), entry.cand.score);
        self.entries.insert(entry);
    }

    fn into_sorted(self) -> Vec<BeamCandidate> {
        self.entries.into_iter().map(|e| e.cand).collect()
    }
}

/// Beam candidates of every vertex, best first. `beta = usize::MAX` keeps
/// every constructible expression.
pub fn beam_candidates(theta: &Encoding, beta: usize) -> Result<Vec<Vec<BeamCandidate>>> {
    if beta == 0 {
        return Err(Error::Config("beam width must be at least 1".into()));
    }
    let sigma = theta.alphabet();
    let n = sigma.len();
    let big_t = theta.bound();
    let mut beams: Vec<Vec<BeamCandidate>> = vec![Vec::new(); big_t + 1];
    for t in (0..big_t).rev() {
        let mut beam = Beam::new(beta);
        for k in 0..n {
            beam.offer(BeamCandidate {
                prefix: sigma.symbol(k).to_string(),
                score: theta.w(t, Column::Symbol(k)),
                size: 1,
                symbols: SymbolSet::singleton(k),
            });
        }
        let left = &beams[t + 1];
        for op in Column::UNARY {
            let weight = theta.w(t, op);
            let glyph = op.name(sigma);
            for c in left {
                let score = c.score * weight;
                if beam.may_admit(rank_key(score, c.size + 1), c.size + 1) {
                    beam.offer(BeamCandidate {
                        prefix: format!("{glyph}{}", c.prefix),
                        score,
                        size: c.size + 1,
                        symbols: c.symbols,
                    });
                }
            }
        }
        for right_at in t + 2..big_t {
            let link = theta.u(t, right_at);
            for op in Column::BINARY {
                let weight = theta.w(t, op) * link;
                let glyph = op.name(sigma);
                for l in left {
                    for r in &beams[right_at] {
                        if !l.symbols.is_disjoint(r.symbols) {
                            continue;
                        }
                        let score = score_merge(l.score, r.score, weight);
                        let size = l.size + r.size + 1;
                        if beam.may_admit(rank_key(score, size), size) {
                            beam.offer(BeamCandidate {
                                prefix: format!("{glyph}{}{}", l.prefix, r.prefix),
                                score,
                                size,
                                symbols: l.symbols.union(r.symbols),
                            });
                        }
                    }
                }
            }
        }
        beams[t] = beam.into_sorted();
    }
    beams.truncate(big_t);
    Ok(beams)
}

/// The outcome of interpretation.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub soire: Soire,
    pub score: f64,
    pub train_accuracy: f64,
}

/// Picks the root candidate with the best training accuracy; ties go to the
/// smaller expression, then to the lexicographically smaller prefix form.
pub fn interpret(train_set: &Dataset, theta: &Encoding, beta: usize) -> Result<Interpretation> {
    let beams = beam_candidates(theta, beta)?;
    let roots = beams.into_iter().next().unwrap_or_default();
    if roots.is_empty() {
        return Err(Error::EmptyBeam);
    }
    let sigma = theta.alphabet();
    let scored: Vec<(f64, Soire, BeamCandidate)> = roots
        .into_par_iter()
        .map(|c| {
            let r = Soire::parse_prefix(&c.prefix, sigma)?;
            Ok((accuracy(&r, train_set), r, c))
        })
        .collect::<Result<_>>()?;
    let (train_accuracy, soire, cand) = scored
        .into_iter()
        .min_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then(a.2.size.cmp(&b.2.size))
                .then_with(|| a.2.prefix.cmp(&b.2.prefix))
        })
        .unwrap();
    Ok(Interpretation {
        soire,
        score: cand.score,
        train_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Sample;
    use crate::Alphabet;

    #[test]
    fn merge_examples() {
        assert_eq!(score_merge(1.0, 1.0, 1.0), 1.0);
        assert!((score_merge(0.5, 0.5, 0.8) - 0.2).abs() < 1e-15);
        assert_eq!(score_merge(0.37, 1.0, 1.0), 0.37);
    }

    #[test]
    fn single_vertex() {
        let sigma = Alphabet::parse("ab").unwrap();
        let mut theta = Encoding::zeros(&sigma, 1);
        theta.set_w(0, Column::Symbol(0), 1.0);
        let data = Dataset::new(sigma, vec![Sample::new("a", true)]);
        let out = interpret(&data, &theta, 1).unwrap();
        assert_eq!(out.soire.to_prefix(), "a");
        assert_eq!(out.score, 1.0);
    }

    #[test]
    fn recovers_faithful_encoding() {
        let sigma = Alphabet::parse("abc").unwrap();
        let r = Soire::parse("(a&b)c*", &sigma).unwrap();
        let theta = Encoding::encode(&r, 8).unwrap();
        let beams = beam_candidates(&theta, 10).unwrap();
        assert_eq!(beams[0][0].prefix, ".&ab*c");
        assert_eq!(beams[0][0].score, 1.0);
        assert!(beams[0][1].score < 1.0);
        let data = Dataset::new(
            sigma,
            vec![Sample::new("abcc", true), Sample::new("ba", true), Sample::new("ac", false)],
        );
        let out = interpret(&data, &theta, 10).unwrap();
        assert_eq!(out.train_accuracy, 1.0);
    }

    #[test]
    fn duplicates_keep_their_best_score() {
        let sigma = Alphabet::parse("ab").unwrap();
        let mut beam = Beam::new(3);
        let cand = |prefix: &str, score| BeamCandidate {
            prefix: prefix.into(),
            score,
            size: prefix.len(),
            symbols: sigma.set_of(prefix),
        };
        beam.offer(cand("a", 0.2));
        beam.offer(cand("a", 0.6));
        beam.offer(cand("a", 0.4));
        beam.offer(cand("b", 0.5));
        let out = beam.into_sorted();
        assert_eq!(out.len(), 2);
        assert_eq!((out[0].prefix.as_str(), out[0].score), ("a", 0.6));
    }

    #[test]
    fn rank_prefers_short_then_lexicographic() {
        let sigma = Alphabet::parse("ab").unwrap();
        let mut beam = Beam::new(2);
        for (prefix, score) in [("*a", 1.0), ("b", 1.0), ("a", 1.0)] {
            beam.offer(BeamCandidate {
                prefix: prefix.into(),
                score,
                size: prefix.len(),
                symbols: sigma.set_of(prefix),
            });
        }
        let out: Vec<_> = beam.into_sorted().into_iter().map(|c| c.prefix).collect();
        assert_eq!(out, ["a", "b"]);
    }
}
