//! Words of the free monoid and the positional statistics used by the
//! word-problem criteria: occurrence counts, letter classes, projections,
//! the block/divider decomposition, and the functions `h_i`, `t`, `ℓ_i`.
//!
//! Positions and occurrence indices are 1-based throughout.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ParseError, WordError};

/// A letter token `[a-z][0-9]*`, e.g. `x`, `z1`, `t12`.
///
/// Letters are packed into a single integer so they are `Copy` and compare
/// quickly. Ordering is by base character, then unindexed before indexed,
/// then by numeric index (`x < x0 < x1 < x2 < x10`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u64);

impl Letter {
    /// Plain letter such as `x`. Panics if `base` is not an ASCII lowercase letter.
    pub fn plain(base: char) -> Letter {
        assert!(base.is_ascii_lowercase(), "letter base must be a-z");
        Letter((base as u64 - 'a' as u64) << 32)
    }

    /// Indexed letter such as `z3`.
    pub fn indexed(base: char, index: u32) -> Letter {
        assert!(base.is_ascii_lowercase(), "letter base must be a-z");
        assert!(index < u32::MAX, "letter index too large");
        Letter(((base as u64 - 'a' as u64) << 32) | (index as u64 + 1))
    }

    pub fn base(self) -> char {
        (b'a' + (self.0 >> 32) as u8) as char
    }

    pub fn index(self) -> Option<u32> {
        match (self.0 & 0xffff_ffff) as u32 {
            0 => None,
            k => Some(k - 1),
        }
    }

    fn parse_token(tok: &str) -> Option<Letter> {
        let mut chars = tok.chars();
        let base = chars.next()?;
        if !base.is_ascii_lowercase() {
            return None;
        }
        let digits = chars.as_str();
        if digits.is_empty() {
            return Some(Letter::plain(base));
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return None;
        }
        let index: u32 = digits.parse().ok()?;
        if index == u32::MAX {
            return None;
        }
        Some(Letter::indexed(base, index))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            None => write!(f, "{}", self.base()),
            Some(i) => write!(f, "{}{}", self.base(), i),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Letter::parse_token(s)
            .ok_or_else(|| ParseError::new(1, 1, format!("invalid letter token `{s}`")))
    }
}

/// Shorthand for building letters in code: `letter("z1")`. Panics on a bad token.
pub fn letter(token: &str) -> Letter {
    token.parse().expect("valid letter token")
}

/// An element of the free monoid; the empty word is λ.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex: shorter words first, then lexicographic on letters.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, x: Letter) {
        self.0.push(x);
    }

    pub fn push_pow(&mut self, x: Letter, k: usize) {
        self.0.extend(std::iter::repeat_n(x, k));
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// Factor at `range` (0-based, half-open).
    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }

    pub fn occurrences(&self, x: Letter) -> usize {
        self.0.iter().filter(|&&y| y == x).count()
    }

    /// Set of letters occurring in the word.
    pub fn content(&self) -> BTreeSet<Letter> {
        self.0.iter().copied().collect()
    }

    /// Occurrence count of every letter of the content.
    pub fn counts(&self) -> BTreeMap<Letter, usize> {
        let mut m = BTreeMap::new();
        for &x in &self.0 {
            *m.entry(x).or_insert(0) += 1;
        }
        m
    }

    pub fn classes(&self) -> LetterClasses {
        LetterClasses::of(self)
    }

    /// Subsequence keeping exactly the letters of `keep`.
    pub fn project(&self, keep: &BTreeSet<Letter>) -> Word {
        Word(self.0.iter().copied().filter(|x| keep.contains(x)).collect())
    }

    /// Deletes every occurrence of the letters in `drop`.
    pub fn delete(&self, drop: &BTreeSet<Letter>) -> Word {
        Word(self.0.iter().copied().filter(|x| !drop.contains(x)).collect())
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// 1-based position of the `i`th occurrence of `x`.
    pub fn position_of(&self, x: Letter, i: usize) -> Result<usize, WordError> {
        if i == 0 {
            return Err(WordError::OccurrenceOutOfRange { letter: x, index: i, count: self.occurrences(x) });
        }
        let mut seen = 0;
        for (p, &y) in self.0.iter().enumerate() {
            if y == x {
                seen += 1;
                if seen == i {
                    return Ok(p + 1);
                }
            }
        }
        if seen == 0 {
            Err(WordError::LetterAbsent(x))
        } else {
            Err(WordError::OccurrenceOutOfRange { letter: x, index: i, count: seen })
        }
    }

    pub fn decompose(&self) -> Decomposition {
        Decomposition::of(self)
    }

    /// `h_i(w, x)`: the right-most divider preceding the `i`th occurrence of `x`.
    pub fn h(&self, x: Letter, i: usize) -> Result<DividerToken, WordError> {
        let pos = self.position_of(x, i)?;
        Ok(self.decompose().divider_before(pos))
    }

    /// `t(w, x)`: the right-most divider preceding the last occurrence of `x`.
    pub fn t_divider(&self, x: Letter) -> Result<DividerToken, WordError> {
        let n = self.occurrences(x);
        if n == 0 {
            return Err(WordError::LetterAbsent(x));
        }
        self.h(x, n)
    }

    /// `ℓ_i(w, x)`: length of the shortest prefix holding `i` occurrences of `x`.
    pub fn ell(&self, x: Letter, i: usize) -> Result<usize, WordError> {
        if i == 0 {
            return Ok(0);
        }
        self.position_of(x, i)
    }

    /// Whether the multiple letters `x`, `y` are integrated: with divider
    /// indices `i = h_2(x)`, `j = t(x)`, `i' = h_2(y)`, `j' = t(y)`, either
    /// `i' ≤ i ≤ j'` or `i ≤ i' ≤ j`.
    pub fn integrated(&self, x: Letter, y: Letter) -> Result<bool, WordError> {
        let d = self.decompose();
        let interval = |a: Letter| -> Result<(usize, usize), WordError> {
            let n = self.occurrences(a);
            if n < 2 {
                return Err(WordError::NotMultiple(a));
            }
            let second = d.divider_before(self.position_of(a, 2)?).index();
            let last = d.divider_before(self.position_of(a, n)?).index();
            Ok((second, last))
        };
        let (i, j) = interval(x)?;
        let (i2, j2) = interval(y)?;
        Ok((i2 <= i && i <= j2) || (i <= i2 && i2 <= j))
    }

    /// Parses the whitespace-separated text form, e.g. `"y x s x y^2 t z y"`.
    /// `λ` and `1` denote the empty word.
    pub fn parse(text: &str) -> Result<Word, ParseError> {
        parse_word_at(text, 1, 1)
    }

    /// Compact rendering: letters concatenated, runs as superscripts,
    /// `λ` for the empty word (`xy²`).
    pub fn compact(&self) -> String {
        if self.is_empty() {
            return "λ".to_string();
        }
        let mut out = String::new();
        for (x, k) in self.runs() {
            out.push_str(&x.to_string());
            if k > 1 {
                out.push_str(&superscript(k));
            }
        }
        out
    }

    /// Maximal runs `(letter, length)`.
    pub fn runs(&self) -> Vec<(Letter, usize)> {
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for &x in &self.0 {
            match runs.last_mut() {
                Some((y, k)) if *y == x => *k += 1,
                _ => runs.push((x, 1)),
            }
        }
        runs
    }
}

fn superscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

/// Parses a word whose text begins at `line`/`column` of some larger input,
/// so errors point into that input.
pub(crate) fn parse_word_at(text: &str, line: usize, column: usize) -> Result<Word, ParseError> {
    let mut letters = Vec::new();
    for (offset, tok) in tokens(text) {
        let col = column + text[..offset].chars().count();
        if tok == "λ" || tok == "1" {
            continue;
        }
        let (base, power) = match tok.split_once('^') {
            Some((b, p)) => {
                let k: usize = p
                    .parse()
                    .ok()
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| ParseError::new(line, col, format!("invalid exponent in `{tok}`")))?;
                (b, k)
            }
            None => (tok, 1),
        };
        let x = Letter::parse_token(base)
            .ok_or_else(|| ParseError::new(line, col, format!("invalid letter token `{base}`")))?;
        letters.extend(std::iter::repeat_n(x, power));
    }
    Ok(Word(letters))
}

fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out.into_iter()
}

/// Machine text form: space separated, runs written `x^k`, `λ` when empty.
/// Round-trips through [`Word::parse`].
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "λ");
        }
        for (n, (x, k)) in self.runs().into_iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            if k == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^{k}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.compact())
    }
}

impl FromStr for Word {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a word, panicking on malformed input. Intended for literals.
pub fn word(text: &str) -> Word {
    Word::parse(text).unwrap_or_else(|e| panic!("bad word literal {text:?}: {e}"))
}

/// Content, simple/multiple letters and `con_k` of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterClasses {
    counts: BTreeMap<Letter, usize>,
}

impl LetterClasses {
    pub fn of(w: &Word) -> LetterClasses {
        LetterClasses { counts: w.counts() }
    }

    pub fn content(&self) -> BTreeSet<Letter> {
        self.counts.keys().copied().collect()
    }

    pub fn simple(&self) -> BTreeSet<Letter> {
        self.con_k(1)
    }

    pub fn multiple(&self) -> BTreeSet<Letter> {
        self.counts
            .iter()
            .filter(|&(_, &n)| n >= 2)
            .map(|(&x, _)| x)
            .collect()
    }

    /// Letters occurring exactly `k` times.
    pub fn con_k(&self, k: usize) -> BTreeSet<Letter> {
        self.counts
            .iter()
            .filter(|&(_, &n)| n == k)
            .map(|(&x, _)| x)
            .collect()
    }

    pub fn count(&self, x: Letter) -> usize {
        self.counts.get(&x).copied().unwrap_or(0)
    }
}

/// A divider: the λ sentinel (index 0) or the simple letter `t_k` (index k).
///
/// Ordering is positional within the decomposition the token came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DividerToken {
    index: usize,
    letter: Option<Letter>,
}

impl DividerToken {
    pub const LAMBDA: DividerToken = DividerToken { index: 0, letter: None };

    pub fn index(&self) -> usize {
        self.index
    }

    /// `None` for the λ sentinel.
    pub fn letter(&self) -> Option<Letter> {
        self.letter
    }

    pub fn is_lambda(&self) -> bool {
        self.letter.is_none()
    }
}

impl fmt::Display for DividerToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.letter {
            None => write!(f, "λ"),
            Some(x) => write!(f, "{x}"),
        }
    }
}

/// `t_0 w_0 t_1 w_1 ⋯ t_m w_m` with `t_0 = λ` and `t_1..t_m` the simple letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    dividers: Vec<Letter>,
    blocks: Vec<Word>,
    /// Divider index for each 1-based position of the source word (index 0 unused).
    divider_at: Vec<usize>,
}

impl Decomposition {
    pub fn of(w: &Word) -> Decomposition {
        let counts = w.counts();
        let mut dividers = Vec::new();
        let mut blocks = vec![Word::empty()];
        let mut divider_at = Vec::with_capacity(w.len() + 1);
        divider_at.push(0);
        for &x in w.letters() {
            if counts[&x] == 1 {
                dividers.push(x);
                blocks.push(Word::empty());
            } else {
                blocks.last_mut().expect("at least one block").push(x);
            }
            divider_at.push(dividers.len());
        }
        Decomposition { dividers, blocks, divider_at }
    }

    /// The letter dividers `t_1..t_m`.
    pub fn dividers(&self) -> &[Letter] {
        &self.dividers
    }

    /// The blocks `w_0..w_m`.
    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    pub fn divider(&self, index: usize) -> DividerToken {
        DividerToken {
            index,
            letter: if index == 0 { None } else { Some(self.dividers[index - 1]) },
        }
    }

    /// Right-most divider at or before 1-based position `pos`. A simple letter
    /// precedes itself: `h_1(w, t_k) = t_{k-1}`.
    pub(crate) fn divider_before(&self, pos: usize) -> DividerToken {
        let at = self.divider_at[pos];
        let prev = self.divider_at[pos - 1];
        // A simple letter at `pos` opens divider `at`; what precedes it is `prev`.
        if at != prev {
            self.divider(prev)
        } else {
            self.divider(at)
        }
    }

    pub fn reassemble(&self) -> Word {
        let mut w = self.blocks[0].clone();
        for (t, b) in self.dividers.iter().zip(&self.blocks[1..]) {
            w.push(*t);
            w.extend_from(b);
        }
        w
    }
}

/// Renders `λ·(yx)·s·(xy²)·t·(λ)·z·(y)`, blocks in parentheses.
impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ·({})", self.blocks[0].compact())?;
        for (t, b) in self.dividers.iter().zip(&self.blocks[1..]) {
            write!(f, "·{t}·({})", b.compact())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> Word {
        word("y x s x y^2 t z y")
    }

    #[test]
    fn letter_tokens() {
        assert_eq!(letter("z12").to_string(), "z12");
        assert_eq!(letter("x").index(), None);
        assert!("Z".parse::<Letter>().is_err());
        assert!("z01".parse::<Letter>().is_err());
        assert!("xy".parse::<Letter>().is_err());
        assert!(letter("x") < letter("x0"));
        assert!(letter("x2") < letter("x10"));
        assert!(letter("x10") < letter("y"));
    }

    #[test]
    fn parse_is_strict() {
        assert_eq!(ex().len(), 9);
        assert_eq!(Word::parse("λ").unwrap(), Word::empty());
        assert_eq!(Word::parse("").unwrap(), Word::empty());
        let err = Word::parse("x yx").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(Word::parse("x^0").is_err());
        assert!(Word::parse("x^").is_err());
        assert_eq!(word("x z1^3").to_string(), "x z1^3");
    }

    #[test]
    fn occurrence_counts() {
        assert_eq!(ex().occurrences(letter("y")), 4);
        assert_eq!(Word::empty().occurrences(letter("x")), 0);
        assert_eq!(word("x z1 z2 x t1 z1 t2 z2").occurrences(letter("z1")), 2);
    }

    #[test]
    fn classes_of_example() {
        let c = ex().classes();
        let set = |s: &str| word(s).content();
        assert_eq!(c.simple(), set("s t z"));
        assert_eq!(c.multiple(), set("x y"));
        let e = Word::empty().classes();
        assert!(e.content().is_empty() && e.simple().is_empty() && e.multiple().is_empty());
        let c = word("x^2 y^2").classes();
        assert_eq!(c.con_k(2), set("x y"));
        assert!(c.simple().is_empty());
    }

    #[test]
    fn projection_and_reverse() {
        assert_eq!(ex().project(&word("x y").content()), word("y x x y^2 y"));
        assert_eq!(ex().project(&ex().content()), ex());
        assert_eq!(ex().project(&BTreeSet::new()), Word::empty());
        assert_eq!(word("x y z x").reverse(), word("x z y x"));
        assert_eq!(word("x z1 z2 x").reverse(), word("x z2 z1 x"));
        assert_eq!(Word::empty().reverse(), Word::empty());
    }

    #[test]
    fn decomposition_of_example() {
        let d = ex().decompose();
        assert_eq!(d.to_string(), "λ·(yx)·s·(xy²)·t·(λ)·z·(y)");
        assert_eq!(d.reassemble(), ex());
        assert_eq!(Word::empty().decompose().to_string(), "λ·(λ)");
        let d = word("x^2 y^2").decompose();
        assert!(d.dividers().is_empty());
        assert_eq!(d.blocks(), &[word("x^2 y^2")]);
    }

    #[test]
    fn h_and_t_of_example() {
        let w = ex();
        let (x, y, s, t, z) = (letter("x"), letter("y"), letter("s"), letter("t"), letter("z"));
        let name = |d: DividerToken| d.to_string();
        assert_eq!(name(w.h(x, 1).unwrap()), "λ");
        assert_eq!(name(w.h(y, 1).unwrap()), "λ");
        assert_eq!(name(w.h(s, 1).unwrap()), "λ");
        assert_eq!(name(w.t_divider(s).unwrap()), "λ");
        assert_eq!(name(w.h(x, 2).unwrap()), "s");
        assert_eq!(name(w.t_divider(x).unwrap()), "s");
        assert_eq!(name(w.h(y, 2).unwrap()), "s");
        assert_eq!(name(w.h(y, 3).unwrap()), "s");
        assert_eq!(name(w.h(t, 1).unwrap()), "s");
        assert_eq!(name(w.t_divider(t).unwrap()), "s");
        assert_eq!(name(w.h(z, 1).unwrap()), "t");
        assert_eq!(name(w.t_divider(z).unwrap()), "t");
        assert_eq!(name(w.h(y, 4).unwrap()), "z");
        assert_eq!(name(w.t_divider(y).unwrap()), "z");
        assert_eq!(word("x").t_divider(x).unwrap(), DividerToken::LAMBDA);
    }

    #[test]
    fn h_errors() {
        let w = ex();
        assert_eq!(w.h(letter("q"), 1), Err(WordError::LetterAbsent(letter("q"))));
        assert!(matches!(w.h(letter("x"), 3), Err(WordError::OccurrenceOutOfRange { .. })));
        assert!(matches!(w.h(letter("x"), 0), Err(WordError::OccurrenceOutOfRange { .. })));
        assert!(w.t_divider(letter("q")).is_err());
    }

    #[test]
    fn ell_values() {
        let w = ex();
        assert_eq!(w.ell(letter("x"), 2), Ok(4));
        assert_eq!(word("x").ell(letter("x"), 1), Ok(1));
        assert_eq!(w.ell(letter("y"), 4), Ok(9));
        assert!(w.ell(letter("y"), 5).is_err());
    }

    #[test]
    fn integrated_letters() {
        let (x, y) = (letter("x"), letter("y"));
        assert_eq!(word("x y s x y").integrated(x, y), Ok(true));
        assert_eq!(word("x x s y y").integrated(x, y), Ok(false));
        assert_eq!(word("x x s y y").integrated(x, x), Ok(true));
        assert_eq!(word("x s x y").integrated(x, y), Err(WordError::NotMultiple(y)));
    }
}
