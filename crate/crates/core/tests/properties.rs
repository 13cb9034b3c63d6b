use std::collections::HashMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use soire::checkpoint::{parse_checkpoint, to_checkpoint_string};
use soire::datagen::{edit_neighbors, random_soire, sample_negative, sample_positive, MAX_ATTEMPTS};
use soire::dataset::{Dataset, Sample};
use soire::encoding::STRICT;
use soire::interpret::beam_candidates;
use soire::matcher::soiretm;
use soire::notation::validate_prefix;
use soire::oracle::{oracle_match, OracleConfig};
use soire::soire::filter_set;
use soire::{Alphabet, Column, Encoding, Label, Soire, SymbolSet};

fn sigma(n: usize) -> Alphabet {
    Alphabet::letters(n).unwrap()
}

/// A random expression over the first `n` letters with between 1 and `n`
/// symbols.
fn arb_soire(max_symbols: usize) -> impl Strategy<Value = Soire> {
    (1..=max_symbols, any::<u64>(), 0.0..0.6f64).prop_map(move |(n, seed, unary)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + (seed as usize % n);
        random_soire(&sigma(n), k, unary, &mut rng)
    })
}

fn arb_string(n: usize, max_len: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(0..n, 0..=max_len)
        .prop_map(move |v| v.into_iter().map(|k| sigma(n).symbol(k)).collect())
}

proptest! {
    #[test]
    fn notation_round_trip(r in arb_soire(5)) {
        let sigma = r.alphabet().clone();
        prop_assert!(validate_prefix(&r.to_prefix()));
        prop_assert_eq!(&Soire::parse_prefix(&r.to_prefix(), &sigma).unwrap(), &r);
        prop_assert_eq!(&Soire::parse_infix(&r.to_infix(), &sigma).unwrap(), &r);
    }

    #[test]
    fn filter_is_idempotent(s in arb_string(5, 12), mask in 0u64..32) {
        let sigma = sigma(5);
        let keep = SymbolSet::first_n(5).intersection(SymbolSet(mask));
        let once = filter_set(&s, &sigma, keep);
        prop_assert_eq!(filter_set(&once, &sigma, keep), once.clone());
        prop_assert!(once.chars().all(|c| keep.contains(sigma.index_of(c).unwrap())));
    }

    #[test]
    fn matcher_agrees_with_oracle(r in arb_soire(4), s in arb_string(4, 7)) {
        prop_assume!(r.size() <= 15);
        let expected = oracle_match(&r, &s, OracleConfig::default()).unwrap();
        prop_assert_eq!(soiretm(&r, &s), expected, "{} on {:?}", r.to_prefix(), s);
    }

    #[test]
    fn normalized_unary_chains(r in arb_soire(4), strings in prop::collection::vec(arb_string(4, 6), 8)) {
        let n = r.normalize_unary();
        prop_assert!(n.size() <= r.size());
        let labels = n.labels();
        for (t, l) in labels.iter().enumerate() {
            if l.is_unary() {
                prop_assert!(!labels[t + 1].is_unary(), "{}", n.to_prefix());
            }
        }
        prop_assert_eq!(n.normalize_unary(), n.clone());
        for s in &strings {
            prop_assert_eq!(soiretm(&n, s), soiretm(&r, s), "{} vs {} on {:?}", r.to_prefix(), n.to_prefix(), s);
        }
    }

    #[test]
    fn codec_round_trip(r in arb_soire(5), extra in 0usize..5) {
        let e = Encoding::encode(&r, r.size() + extra).unwrap();
        prop_assert!(e.is_faithful(STRICT));
        prop_assert_eq!(e.decode().unwrap(), r.to_prefix());
        prop_assert_eq!(parse_checkpoint(&to_checkpoint_string(&e), "mem").unwrap(), e);
    }

    #[test]
    fn faithful_beam_recovers_the_expression(r in arb_soire(4), extra in 0usize..3) {
        let e = Encoding::encode(&r, r.size() + extra).unwrap();
        let roots = &beam_candidates(&e, 50).unwrap()[0];
        prop_assert_eq!(&roots[0].prefix, &r.to_prefix());
        prop_assert_eq!(roots[0].score, 1.0);
    }

    #[test]
    fn samplers_respect_the_target(r in arb_soire(4), seed in any::<u64>()) {
        let sigma = r.alphabet().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(s) = sample_positive(&r, 20, &mut rng) {
            prop_assert!(soiretm(&r, &s));
            prop_assert!(s.chars().count() <= 20);
        }
        if let Ok(s) = sample_negative(&r, &sigma, 20, MAX_ATTEMPTS, &mut rng) {
            prop_assert!(!soiretm(&r, &s));
        }
    }

    #[test]
    fn edit_neighbors_are_one_edit_away(s in arb_string(3, 6)) {
        let sigma = sigma(3);
        for t in edit_neighbors(&s, &sigma) {
            prop_assert_ne!(&t, &s);
            let (a, b) = (s.chars().count(), t.chars().count());
            prop_assert!(a.abs_diff(b) <= 1);
        }
    }

    #[test]
    fn dataset_text_round_trip(strings in prop::collection::vec((arb_string(3, 8), any::<bool>()), 0..20)) {
        let samples = strings.into_iter().map(|(s, l)| Sample::new(&s, l)).collect();
        let d = Dataset::new(sigma(3), samples);
        prop_assert_eq!(Dataset::parse(&d.to_text(), "mem").unwrap(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn unbounded_beam_matches_enumeration(seed in any::<u64>(), bound in 2usize..7, n in 1usize..4) {
        prop_assume!(n < 3 || bound <= 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = Encoding::random(&sigma(n), bound, &mut rng);
        let beams = beam_candidates(&e, usize::MAX).unwrap();
        let expected = enumerate(&e);
        for t in 0..bound {
            let got: HashMap<String, f64> = beams[t].iter().map(|c| (c.prefix.clone(), c.score)).collect();
            prop_assert_eq!(got.len(), beams[t].len(), "duplicate prefixes at vertex {}", t);
            prop_assert_eq!(got.len(), expected[t].len(), "vertex {}", t);
            for (p, &(score, _)) in &expected[t] {
                let other = got.get(p).copied();
                prop_assert!(other.is_some_and(|x| (x - score).abs() <= 1e-12 * score.max(1.0)), "{} at {}", p, t);
            }
        }
    }
}

/// Every expression constructible at each vertex without pruning, with the
/// best score over all derivations.
fn enumerate(e: &Encoding) -> Vec<HashMap<String, (f64, SymbolSet)>> {
    let sigma = e.alphabet();
    let big_t = e.bound();
    let mut sets: Vec<HashMap<String, (f64, SymbolSet)>> = vec![HashMap::new(); big_t + 1];
    let keep = |m: &mut HashMap<String, (f64, SymbolSet)>, p: String, score: f64, set: SymbolSet| {
        let slot = m.entry(p).or_insert((score, set));
        if score > slot.0 {
            slot.0 = score;
        }
    };
    for t in (0..big_t).rev() {
        let mut here = HashMap::new();
        for k in 0..sigma.len() {
            keep(&mut here, sigma.symbol(k).to_string(), e.w(t, Column::Symbol(k)), SymbolSet::singleton(k));
        }
        for op in [Label::Optional, Label::Star, Label::Plus] {
            let weight = e.w(t, Column::of_label(op, sigma));
            for (p, &(s, set)) in &sets[t + 1] {
                keep(&mut here, format!("{}{p}", op.glyph()), s * weight, set);
            }
        }
        for right in t + 2..big_t {
            for op in [Label::Concat, Label::Interleave, Label::Union] {
                let weight = e.w(t, Column::of_label(op, sigma)) * e.u(t, right);
                for (lp, &(ls, lset)) in &sets[t + 1] {
                    for (rp, &(rs, rset)) in &sets[right] {
                        if lset.is_disjoint(rset) {
                            keep(&mut here, format!("{}{lp}{rp}", op.glyph()), ls * rs * weight, lset.union(rset));
                        }
                    }
                }
            }
        }
        sets[t] = here;
    }
    sets
}
