//! Random expressions and labeled datasets.
//!
//! Positives come from a random walk over the syntax tree. Negatives are
//! single edits (delete, insert, replace or move one character) of a
//! positive that the expression rejects. Noise flips a fixed fraction of the
//! labels of each class in the training and validation splits.

use std::collections::{BTreeSet, HashSet};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::dataset::{Dataset, Sample, Split, Splits};
use crate::error::{Error, Result};
use crate::matcher::soiretm;
use crate::soire::{Label, Node, Soire};

pub const DEFAULT_MAX_LEN: usize = 20;
/// Draws allowed before a sampler gives up.
pub const MAX_ATTEMPTS: usize = 200;
/// Probability of one more repetition under `*` and `+`, and of taking the
/// operand of `?`.
const CONTINUE: f64 = 0.5;

/// A random expression using `symbols` distinct symbols of `sigma`, each
/// vertex wrapped in up to three unary operators.
pub fn random_soire<R: Rng>(sigma: &Alphabet, symbols: usize, unary_prob: f64, rng: &mut R) -> Soire {
    assert!(symbols >= 1 && symbols <= sigma.len(), "cannot use {symbols} of {} symbols", sigma.len());
    let mut chosen: Vec<char> = sigma.symbols().choose_multiple(rng, symbols).copied().collect();
    chosen.shuffle(rng);
    let node = random_node(&chosen, unary_prob, rng);
    Soire::from_node(&node, sigma).expect("distinct symbols form a SOIRE")
}

fn random_node<R: Rng>(symbols: &[char], unary_prob: f64, rng: &mut R) -> Node {
    let mut node = if symbols.len() == 1 {
        Node::Symbol(symbols[0])
    } else {
        let cut = rng.gen_range(1..symbols.len());
        let op = *Label::BINARY.choose(rng).unwrap();
        Node::binary(
            op,
            random_node(&symbols[..cut], unary_prob, rng),
            random_node(&symbols[cut..], unary_prob, rng),
        )
    };
    for _ in 0..3 {
        if !rng.gen_bool(unary_prob) {
            break;
        }
        node = Node::unary(*Label::UNARY.choose(rng).unwrap(), node);
    }
    node
}

fn walk<R: Rng>(node: &Node, rng: &mut R, out: &mut String, budget: usize) {
    if out.chars().count() > budget {
        return;
    }
    match node {
        Node::Symbol(c) => out.push(*c),
        Node::Unary(Label::Optional, c) => {
            if rng.gen_bool(CONTINUE) {
                walk(c, rng, out, budget);
            }
        }
        Node::Unary(op, c) => {
            if *op == Label::Plus {
                walk(c, rng, out, budget);
            }
            while out.chars().count() <= budget && rng.gen_bool(CONTINUE) {
                walk(c, rng, out, budget);
            }
        }
        Node::Binary(Label::Concat, l, r) => {
            walk(l, rng, out, budget);
            walk(r, rng, out, budget);
        }
        Node::Binary(Label::Union, l, r) => {
            let branch = if rng.gen_bool(0.5) { l } else { r };
            walk(branch, rng, out, budget);
        }
        Node::Binary(_, l, r) => {
            let (mut a, mut b) = (String::new(), String::new());
            walk(l, rng, &mut a, budget);
            walk(r, rng, &mut b, budget);
            let a: Vec<char> = a.chars().collect();
            let b: Vec<char> = b.chars().collect();
            let mut from_left: Vec<bool> = std::iter::repeat(true)
                .take(a.len())
                .chain(std::iter::repeat(false).take(b.len()))
                .collect();
            from_left.shuffle(rng);
            let (mut i, mut j) = (0, 0);
            for take_left in from_left {
                if take_left {
                    out.push(a[i]);
                    i += 1;
                } else {
                    out.push(b[j]);
                    j += 1;
                }
            }
        }
    }
}

/// A string accepted by `r` of length at most `max_len`.
pub fn sample_positive<R: Rng>(r: &Soire, max_len: usize, rng: &mut R) -> Result<String> {
    let node = r.to_node();
    for _ in 0..MAX_ATTEMPTS {
        let mut s = String::new();
        walk(&node, rng, &mut s, max_len);
        if s.chars().count() <= max_len {
            debug_assert!(soiretm(r, &s), "{r} rejects sampled {s:?}");
            return Ok(s);
        }
    }
    Err(Error::Unsatisfiable(max_len))
}

/// Every string one delete, insert, replace or move away from `s`, other
/// than `s` itself.
pub fn edit_neighbors(s: &str, sigma: &Alphabet) -> BTreeSet<String> {
    let chars: Vec<char> = s.chars().collect();
    let n = chars.len();
    let mut out = BTreeSet::new();
    let build = |v: &[char]| v.iter().collect::<String>();
    for i in 0..n {
        let mut v = chars.clone();
        let c = v.remove(i);
        out.insert(build(&v));
        for j in 0..=v.len() {
            if j != i {
                let mut m = v.clone();
                m.insert(j, c);
                out.insert(build(&m));
            }
        }
        for &a in sigma.symbols() {
            if a != chars[i] {
                let mut m = chars.clone();
                m[i] = a;
                out.insert(build(&m));
            }
        }
    }
    for i in 0..=n {
        for &a in sigma.symbols() {
            let mut m = chars.clone();
            m.insert(i, a);
            out.insert(build(&m));
        }
    }
    out.remove(s);
    out
}

/// A string rejected by `r` that is one edit away from an accepted one.
pub fn sample_negative<R: Rng>(r: &Soire, sigma: &Alphabet, max_len: usize, max_retries: usize, rng: &mut R) -> Result<String> {
    for _ in 0..max_retries {
        let positive = sample_positive(r, max_len, rng)?;
        let choice = edit_neighbors(&positive, sigma)
            .into_iter()
            .filter(|s| s.chars().count() <= max_len && !soiretm(r, s))
            .choose(rng);
        if let Some(s) = choice {
            return Ok(s);
        }
    }
    Err(Error::ExhaustedRetries(max_retries))
}

/// Positives and negatives per class for each split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes {
            train: 250,
            validation: 50,
            test: 250,
        }
    }
}

impl SplitSizes {
    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Validation => self.validation,
            Split::Test => self.test,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub sizes: SplitSizes,
    pub delta: f64,
    pub seed: u64,
    pub max_len: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            sizes: SplitSizes::default(),
            delta: 0.0,
            seed: 0,
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

/// A noise-free split with `per_class` distinct positives and negatives.
pub fn clean_split<R: Rng>(r: &Soire, sigma: &Alphabet, per_class: usize, max_len: usize, rng: &mut R) -> Result<Dataset> {
    let mut seen = HashSet::new();
    let mut samples = Vec::with_capacity(2 * per_class);
    for label in [true, false] {
        let mut count = 0;
        let mut misses = 0;
        while count < per_class {
            let s = if label {
                sample_positive(r, max_len, rng)?
            } else {
                sample_negative(r, sigma, max_len, MAX_ATTEMPTS, rng)?
            };
            if seen.insert(s.clone()) {
                samples.push(Sample::new(s, label));
                count += 1;
                misses = 0;
            } else {
                misses += 1;
                if misses >= 50 * MAX_ATTEMPTS {
                    return Err(Error::ExhaustedRetries(misses));
                }
            }
        }
    }
    Ok(Dataset::new(sigma.clone(), samples))
}

/// Flips `⌊|class| · delta⌋` labels of each class, chosen uniformly.
/// Returns the flipped indices in increasing order.
pub fn flip_labels<R: Rng>(data: &mut Dataset, delta: f64, rng: &mut R) -> Vec<usize> {
    let mut flipped = Vec::new();
    for label in [true, false] {
        let class: Vec<usize> = (0..data.len()).filter(|&k| data.samples[k].label == label).collect();
        let count = ((class.len() as f64 * delta) + 1e-9).floor() as usize;
        flipped.extend(class.choose_multiple(rng, count).copied());
    }
    for &k in &flipped {
        data.samples[k].label = !data.samples[k].label;
    }
    flipped.sort_unstable();
    flipped
}

/// Train, validation and test splits for `r`; noise is applied to train and
/// validation only. Each split draws from its own stream of the seed.
pub fn make_dataset(r: &Soire, sigma: &Alphabet, config: &GenConfig) -> Result<Splits> {
    if !(0.0..1.0).contains(&config.delta) {
        return Err(Error::Config(format!("noise level {} outside [0, 1)", config.delta)));
    }
    let r = r.with_alphabet(sigma)?;
    let split = |split: Split, stream: u64| -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(stream);
        let mut data = clean_split(&r, sigma, config.sizes.get(split), config.max_len, &mut rng)?;
        if split != Split::Test {
            flip_labels(&mut data, config.delta, &mut rng);
        }
        data.samples.shuffle(&mut rng);
        Ok(data)
    };
    Ok(Splits {
        train: split(Split::Train, 1)?,
        validation: split(Split::Validation, 2)?,
        test: split(Split::Test, 3)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn positives_are_accepted() {
        let sigma = Alphabet::letters(10).unwrap();
        let mut rng = rng();
        let a = Soire::parse("a", &sigma).unwrap();
        assert_eq!(sample_positive(&a, 20, &mut rng).unwrap(), "a");
        let r = Soire::parse("(a&b)c*", &sigma).unwrap();
        for _ in 0..200 {
            let s = sample_positive(&r, 20, &mut rng).unwrap();
            assert!(soiretm(&r, &s), "{s}");
            assert!(s.len() <= 20);
        }
        let star = Soire::parse("a*", &sigma).unwrap();
        assert!((0..100).any(|_| sample_positive(&star, 20, &mut rng).unwrap().is_empty()));
    }

    #[test]
    fn neighbor_examples() {
        let sigma = Alphabet::parse("abc").unwrap();
        let n = edit_neighbors("abc", &sigma);
        for s in ["ac", "abac", "acc", "bca"] {
            assert!(n.contains(s), "{s}");
        }
        assert!(!n.contains("abc"));
        let empty: Vec<String> = edit_neighbors("", &sigma).into_iter().collect();
        assert_eq!(empty, ["a", "b", "c"]);
    }

    /// Brute force over each edit family separately.
    #[test]
    fn neighbor_count_by_enumeration() {
        let sigma = Alphabet::parse("ab").unwrap();
        let mut all = BTreeSet::new();
        // deletes
        all.insert("b".to_string());
        all.insert("a".to_string());
        // inserts at 0, 1, 2
        for x in ["a", "b"] {
            all.insert(format!("{x}ab"));
            all.insert(format!("a{x}b"));
            all.insert(format!("ab{x}"));
        }
        // replaces
        all.insert("bb".to_string());
        all.insert("aa".to_string());
        // moves
        all.insert("ba".to_string());
        all.remove("ab");
        assert_eq!(edit_neighbors("ab", &sigma), all);
        assert_eq!(all.len(), 9);
    }

    #[test]
    fn negatives_are_rejected() {
        let sigma = Alphabet::letters(10).unwrap();
        let mut rng = rng();
        let r = Soire::parse("(a&b)c*", &sigma).unwrap();
        for _ in 0..100 {
            let s = sample_negative(&r, &sigma, 20, MAX_ATTEMPTS, &mut rng).unwrap();
            assert!(!soiretm(&r, &s), "{s}");
        }
        let a = Soire::parse("a", &sigma).unwrap();
        let s = sample_negative(&a, &sigma, 20, MAX_ATTEMPTS, &mut rng).unwrap();
        assert!(s.is_empty() || s.len() == 2 || s.len() == 1 && s != "a");
    }

    #[test]
    fn universal_language_has_no_negatives() {
        let sigma = Alphabet::parse("ab").unwrap();
        let r = Soire::parse("(a|b)*", &sigma).unwrap();
        let err = sample_negative(&r, &sigma, 20, 20, &mut rng()).unwrap_err();
        assert!(matches!(err, Error::ExhaustedRetries(20)));
    }

    #[test]
    fn flips_are_exact() {
        let sigma = Alphabet::parse("abc").unwrap();
        let r = Soire::parse("(a?b)+", &sigma).unwrap();
        let mut rng = rng();
        let clean = clean_split(&r, &sigma, 250, 20, &mut rng).unwrap();
        let mut noisy = clean.clone();
        let flipped = flip_labels(&mut noisy, 0.1, &mut rng);
        assert_eq!(flipped.len(), 50);
        let pos_flipped = flipped.iter().filter(|&&k| clean.samples[k].label).count();
        assert_eq!(pos_flipped, 25);
        let mut same = clean.clone();
        assert!(flip_labels(&mut same, 0.0, &mut rng).is_empty());
        assert_eq!(same, clean);
    }

    #[test]
    fn splits_are_sound_and_deterministic() {
        let sigma = Alphabet::parse("abc").unwrap();
        let r = Soire::parse("a?&b*&c?", &sigma).unwrap();
        let config = GenConfig {
            sizes: SplitSizes {
                train: 40,
                validation: 10,
                test: 30,
            },
            delta: 0.1,
            seed: 5,
            max_len: 20,
        };
        let a = make_dataset(&r, &sigma, &config).unwrap();
        let b = make_dataset(&r, &sigma, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.train.len(), 80);
        for s in &a.test.samples {
            assert_eq!(soiretm(&r, &s.text), s.label);
        }
        let wrong = a.train.samples.iter().filter(|s| soiretm(&r, &s.text) != s.label).count();
        assert_eq!(wrong, 8);
        let distinct: HashSet<_> = a.train.samples.iter().map(|s| &s.text).collect();
        assert_eq!(distinct.len(), a.train.len());
    }
}
