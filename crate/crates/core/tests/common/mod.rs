#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use varietal::{Identity, Letter, Word};

pub fn letters(names: &[&str]) -> Vec<Letter> {
    names.iter().map(|n| varietal::letter(n)).collect()
}

/// Every word of length at most `max_len` over `alphabet`.
pub fn all_words(alphabet: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in alphabet {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every pair `(u, v)` of words of length at most `max_len`.
pub fn all_identities(alphabet: &[Letter], max_len: usize) -> Vec<Identity> {
    let ws = all_words(alphabet, max_len);
    let mut out = Vec::with_capacity(ws.len() * ws.len());
    for u in &ws {
        for v in &ws {
            out.push(Identity::new(u.clone(), v.clone()));
        }
    }
    out
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &[Letter], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

pub fn random_identity(rng: &mut ChaCha8Rng, alphabet: &[Letter], max_len: usize) -> Identity {
    Identity::new(random_word(rng, alphabet, max_len), random_word(rng, alphabet, max_len))
}
