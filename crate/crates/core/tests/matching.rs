mod common;

use std::collections::{BTreeMap, BTreeSet};

use varietal::rewrite::match_instances;
use varietal::{word, Letter, Word};

use common::{all_words, letters};

type Triple = (Word, BTreeMap<Letter, Word>, Word);

/// Tries every prefix length and every vector of image lengths.
fn naive(pattern: &Word, subject: &Word) -> BTreeSet<Triple> {
    let vars: Vec<Letter> = pattern.content().into_iter().collect();
    let s = subject.letters();
    let n = s.len();
    let mut out = BTreeSet::new();
    let mut lens = vec![0usize; vars.len()];
    loop {
        for start in 0..=n {
            let mut pos = start;
            let mut images: BTreeMap<Letter, Word> = BTreeMap::new();
            let mut ok = true;
            for x in pattern.letters() {
                let l = lens[vars.iter().position(|v| v == x).unwrap()];
                if pos + l > n {
                    ok = false;
                    break;
                }
                let piece = Word::from_letters(s[pos..pos + l].to_vec());
                if images.get(x).is_some_and(|w| *w != piece) {
                    ok = false;
                    break;
                }
                images.insert(*x, piece);
                pos += l;
            }
            if ok {
                for &x in &vars {
                    images.entry(x).or_insert_with(Word::empty);
                }
                out.insert((subject.slice(0..start), images, subject.slice(pos..n)));
            }
        }
        let mut i = 0;
        while i < lens.len() && lens[i] == n {
            lens[i] = 0;
            i += 1;
        }
        if i == lens.len() {
            break;
        }
        lens[i] += 1;
    }
    out
}

fn fast(pattern: &Word, subject: &Word) -> BTreeSet<Triple> {
    match_instances(pattern, subject)
        .into_iter()
        .map(|m| (m.prefix, m.subst.0, m.suffix))
        .collect()
}

#[test]
fn agrees_with_naive_enumeration() {
    let patterns = all_words(&letters(&["x", "y", "z"]), 4);
    let subjects = all_words(&letters(&["a", "b"]), 6);
    for p in &patterns {
        for s in &subjects {
            assert_eq!(fast(p, s), naive(p, s), "pattern {p}, subject {s}");
        }
    }
}

#[test]
fn matches_reassemble() {
    for m in match_instances(&word("x y x"), &word("a b a b a")) {
        let mut w = m.prefix.clone();
        w.extend_from(&m.subst.apply(&word("x y x")));
        w.extend_from(&m.suffix);
        assert_eq!(w, word("a b a b a"));
    }
}

#[test]
fn counts_for_small_cases() {
    assert!(fast(&word("x^2"), &word("a a")).contains(&(
        Word::empty(),
        BTreeMap::from([(varietal::letter("x"), word("a"))]),
        Word::empty()
    )));
    // xyx in ab: x ↦ λ and any factorization p·q·r with y ↦ q.
    assert_eq!(match_instances(&word("x y x"), &word("a b")).len(), naive(&word("x y x"), &word("a b")).len());
    assert_eq!(match_instances(&word("x y x"), &word("a b")).len(), 6);
}
