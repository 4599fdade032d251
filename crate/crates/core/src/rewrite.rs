//! Deduction by substitution instances in context: `a·ξ(s)·b → a·ξ(t)·b`
//! for an identity `s ≈ t` and an endomorphism `ξ` that may erase letters.
//!
//! Searches are breadth first with the frontier kept in shortlex order, so
//! results and certificates do not depend on the number of worker threads.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::RewriteError;
use crate::identity::{Identity, IdentitySystem};
use crate::oracle::necessary_filter;
use crate::word::{Letter, Word};

/// Search limits: derivation depth and the longest word admitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub max_steps: usize,
    pub max_len: usize,
}

impl Bounds {
    pub fn new(max_steps: usize, max_len: usize) -> Bounds {
        assert!(max_steps >= 1 && max_len >= 1, "bounds must be positive");
        Bounds { max_steps, max_len }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "depth ≤ {}, length ≤ {}", self.max_steps, self.max_len)
    }
}

/// An endomorphism restricted to finitely many letters; unmapped letters are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Substitution(pub BTreeMap<Letter, Word>);

impl Substitution {
    pub fn get(&self, x: Letter) -> Option<&Word> {
        self.0.get(&x)
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &x in w.letters() {
            match self.0.get(&x) {
                Some(img) => out.extend_from(img),
                None => out.push(x),
            }
        }
        out
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, w)| format!("{x}↦{}", w.compact())).collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

/// `subject = prefix · ξ(pattern) · suffix`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub prefix: Word,
    pub subst: Substitution,
    pub suffix: Word,
    pub side: Side,
}

/// Pattern letters renumbered into slots, with the letters that must not be
/// erased for the step to change anything.
struct Pattern {
    slots: Vec<usize>,
    letters: Vec<Letter>,
    required: Vec<bool>,
    /// Lower bound on the subject length consumed by `slots[pos..]`.
    min_rest: Vec<usize>,
}

impl Pattern {
    fn new(pattern: &Word, required: &BTreeSet<Letter>) -> Pattern {
        let mut letters: Vec<Letter> = Vec::new();
        let mut slots = Vec::with_capacity(pattern.len());
        for &x in pattern.letters() {
            let slot = match letters.iter().position(|&y| y == x) {
                Some(s) => s,
                None => {
                    letters.push(x);
                    letters.len() - 1
                }
            };
            slots.push(slot);
        }
        let required: Vec<bool> = letters.iter().map(|x| required.contains(x)).collect();
        let mut min_rest = vec![0; slots.len() + 1];
        for pos in (0..slots.len()).rev() {
            min_rest[pos] = min_rest[pos + 1] + usize::from(required[slots[pos]]);
        }
        Pattern { slots, letters, required, min_rest }
    }

    /// Calls `f(start, end, images)` for every factor `subject[start..end]`
    /// equal to `ξ(pattern)`; images are `(offset, len)` ranges into `subject`.
    fn for_each_match(&self, subject: &[Letter], mut f: impl FnMut(usize, usize, &[(usize, usize)])) {
        let mut images = vec![(0usize, usize::MAX); self.letters.len()];
        for start in 0..=subject.len() {
            self.extend(subject, start, 0, start, &mut images, &mut f);
        }
    }

    fn extend(
        &self,
        subject: &[Letter],
        start: usize,
        pos: usize,
        cur: usize,
        images: &mut [(usize, usize)],
        f: &mut impl FnMut(usize, usize, &[(usize, usize)]),
    ) {
        if pos == self.slots.len() {
            f(start, cur, images);
            return;
        }
        let slot = self.slots[pos];
        let (off, len) = images[slot];
        if len != usize::MAX {
            if cur + len <= subject.len() && subject[cur..cur + len] == subject[off..off + len] {
                self.extend(subject, start, pos + 1, cur + len, images, f);
            }
            return;
        }
        let rest = self.min_rest[pos + 1];
        let available = subject.len() - cur;
        if available < rest {
            return;
        }
        let lo = usize::from(self.required[slot]);
        for l in lo..=available - rest {
            images[slot] = (cur, l);
            self.extend(subject, start, pos + 1, cur + l, images, f);
        }
        images[slot] = (0, usize::MAX);
    }
}

/// All `(a, ξ, b)` with `a·ξ(pattern)·b = subject`, erasing images allowed.
/// The pattern is treated as a left side.
pub fn match_instances(pattern: &Word, subject: &Word) -> Vec<Match> {
    let p = Pattern::new(pattern, &BTreeSet::new());
    let s = subject.letters();
    let mut out = Vec::new();
    p.for_each_match(s, |start, end, images| {
        let subst = Substitution(
            p.letters
                .iter()
                .zip(images)
                .map(|(&x, &(o, l))| (x, Word::from_letters(s[o..o + l].to_vec())))
                .collect(),
        );
        out.push(Match {
            prefix: Word::from_letters(s[..start].to_vec()),
            subst,
            suffix: Word::from_letters(s[end..].to_vec()),
            side: Side::Lhs,
        });
    });
    out.sort();
    out.dedup();
    out
}

/// Matches of either side of `id` in `subject`, tagged with the side.
pub fn identity_matches(id: &Identity, subject: &Word) -> Vec<Match> {
    let mut out = match_instances(&id.lhs, subject);
    out.extend(match_instances(&id.rhs, subject).into_iter().map(|m| Match { side: Side::Rhs, ..m }));
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// An instance of the left side is replaced by the right side.
    #[serde(rename = "lr")]
    LeftToRight,
    #[serde(rename = "rl")]
    RightToLeft,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
        }
    }

    fn sides(self, id: &Identity) -> (&Word, &Word) {
        match self {
            Direction::LeftToRight => (&id.lhs, &id.rhs),
            Direction::RightToLeft => (&id.rhs, &id.lhs),
        }
    }
}

/// One elementary deduction step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    /// Position of the identity in its system.
    pub rule_index: usize,
    pub rule: String,
    pub direction: Direction,
    pub prefix: Word,
    pub images: Substitution,
    pub suffix: Word,
}

impl Step {
    /// The same step read backwards.
    pub fn inverse(&self) -> Step {
        Step { direction: self.direction.flip(), ..self.clone() }
    }

    /// `(before, after)` words of this step.
    pub fn endpoints(&self, id: &Identity) -> (Word, Word) {
        let (from, to) = self.direction.sides(id);
        let wrap = |side: &Word| {
            let mut w = self.prefix.clone();
            w.extend_from(&self.images.apply(side));
            w.extend_from(&self.suffix);
            w
        };
        (wrap(from), wrap(to))
    }
}

/// Letters whose erasure makes `from ≈ to` trivial; a step erasing one of them
/// returns the subject unchanged.
fn essential_letters(id: &Identity) -> BTreeSet<Letter> {
    id.content()
        .into_iter()
        .filter(|&x| {
            let drop = BTreeSet::from([x]);
            id.lhs.delete(&drop) == id.rhs.delete(&drop)
        })
        .collect()
}

/// Options for one-step expansion.
#[derive(Clone, Debug)]
pub struct StepOptions {
    pub max_len: usize,
    /// Image candidates (besides λ) for letters occurring only on the target
    /// side of an identity.
    pub alphabet: Vec<Letter>,
}

/// A system prepared for repeated expansion.
pub struct Rules<'a> {
    sys: &'a IdentitySystem,
    /// `(identity index, direction, source pattern, letters free on the target side)`.
    compiled: Vec<(usize, Direction, Pattern, Vec<Letter>)>,
}

impl<'a> Rules<'a> {
    pub fn new(sys: &'a IdentitySystem) -> Rules<'a> {
        let mut compiled = Vec::new();
        for (k, id) in sys.iter().enumerate() {
            if id.is_trivial() {
                continue;
            }
            let essential = essential_letters(id);
            for dir in [Direction::LeftToRight, Direction::RightToLeft] {
                let (from, to) = dir.sides(id);
                let from_content = from.content();
                let free: Vec<Letter> = to.content().into_iter().filter(|x| !from_content.contains(x)).collect();
                compiled.push((k, dir, Pattern::new(from, &essential), free));
            }
        }
        Rules { sys, compiled }
    }

    pub fn system(&self) -> &IdentitySystem {
        self.sys
    }

    /// Every word one step away from `w` (excluding `w`), each with the
    /// first step producing it in enumeration order.
    pub fn one_step(&self, w: &Word, opts: &StepOptions) -> BTreeMap<Word, Step> {
        let subject = w.letters();
        let mut out: BTreeMap<Word, Step> = BTreeMap::new();
        for (k, dir, pattern, free) in &self.compiled {
            let id = &self.sys.identities()[*k];
            let to = dir.sides(id).1;
            let free_choices = free_assignments(free, &opts.alphabet);
            pattern.for_each_match(subject, |start, end, images| {
                let img_len = |x: Letter| -> usize {
                    pattern
                        .letters
                        .iter()
                        .position(|&y| y == x)
                        .map(|s| images[s].1)
                        .unwrap_or(0)
                };
                let to_len_bound: usize = to.letters().iter().map(|&x| img_len(x)).sum();
                let base_len = subject.len() - (end - start) + to_len_bound;
                if base_len > opts.max_len {
                    return;
                }
                for choice in &free_choices {
                    let mut result = Vec::with_capacity(base_len + free.len());
                    result.extend_from_slice(&subject[..start]);
                    for &x in to.letters() {
                        match pattern.letters.iter().position(|&y| y == x) {
                            Some(s) => {
                                let (o, l) = images[s];
                                result.extend_from_slice(&subject[o..o + l]);
                            }
                            None => {
                                let fi = free.iter().position(|&y| y == x).expect("free letter");
                                if let Some(c) = choice[fi] {
                                    result.push(c);
                                }
                            }
                        }
                    }
                    result.extend_from_slice(&subject[end..]);
                    if result.len() > opts.max_len || result == subject {
                        continue;
                    }
                    let result = Word::from_letters(result);
                    if out.contains_key(&result) {
                        continue;
                    }
                    let mut map: BTreeMap<Letter, Word> = pattern
                        .letters
                        .iter()
                        .zip(images)
                        .map(|(&x, &(o, l))| (x, Word::from_letters(subject[o..o + l].to_vec())))
                        .collect();
                    for (fi, &x) in free.iter().enumerate() {
                        map.insert(x, choice[fi].map(|c| Word::from_letters(vec![c])).unwrap_or_default());
                    }
                    out.insert(
                        result,
                        Step {
                            rule_index: *k,
                            rule: id.label(),
                            direction: *dir,
                            prefix: Word::from_letters(subject[..start].to_vec()),
                            images: Substitution(map),
                            suffix: Word::from_letters(subject[end..].to_vec()),
                        },
                    );
                }
            });
        }
        out
    }
}

fn free_assignments(free: &[Letter], alphabet: &[Letter]) -> Vec<Vec<Option<Letter>>> {
    let mut out: Vec<Vec<Option<Letter>>> = vec![Vec::new()];
    for _ in free {
        let mut next = Vec::new();
        for prefix in &out {
            for c in std::iter::once(None).chain(alphabet.iter().copied().map(Some)) {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All words one step from `w` under `sys`, in either direction.
pub fn one_step(w: &Word, sys: &IdentitySystem) -> BTreeMap<Word, Step> {
    let opts = StepOptions { max_len: usize::MAX, alphabet: w.content().into_iter().collect() };
    Rules::new(sys).one_step(w, &opts)
}

/// A chain `v_0 → v_1 → ⋯ → v_m` of elementary steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub source: Word,
    pub steps: Vec<(Step, Word)>,
}

impl Derivation {
    pub fn trivial(w: Word) -> Derivation {
        Derivation { source: w, steps: Vec::new() }
    }

    pub fn target(&self) -> &Word {
        self.steps.last().map(|(_, w)| w).unwrap_or(&self.source)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-applies every step against `sys` and checks each intermediate word.
    pub fn verify(&self, sys: &IdentitySystem) -> Result<(), String> {
        let mut cur = &self.source;
        for (n, (step, next)) in self.steps.iter().enumerate() {
            let id = sys
                .identities()
                .get(step.rule_index)
                .ok_or_else(|| format!("step {n}: no identity #{}", step.rule_index))?;
            if id.label() != step.rule {
                return Err(format!("step {n}: rule label {} does not match {}", step.rule, id.label()));
            }
            for x in id.content() {
                if step.images.get(x).is_none() {
                    return Err(format!("step {n}: substitution misses letter {x}"));
                }
            }
            let (before, after) = step.endpoints(id);
            if &before != cur {
                return Err(format!("step {n}: {} is not {}", before, cur));
            }
            if &after != next {
                return Err(format!("step {n}: produces {} instead of {}", after, next));
            }
            cur = next;
        }
        Ok(())
    }

    /// Chain notation `u ≈_{rule} v ≈_{rule} w`.
    pub fn chain(&self) -> String {
        let mut s = self.source.compact();
        for (step, w) in &self.steps {
            s.push_str(&format!(" ≈_{{{}}} {}", step.rule, w.compact()));
        }
        s
    }

    /// `[{word, rule, direction, prefix, images, suffix}, …]`, source first
    /// with null step fields.
    pub fn to_json(&self) -> serde_json::Value {
        let mut rows = vec![serde_json::json!({
            "word": self.source,
            "rule": null,
            "direction": null,
            "prefix": null,
            "images": null,
            "suffix": null,
        })];
        for (step, w) in &self.steps {
            rows.push(serde_json::json!({
                "word": w,
                "rule": step.rule,
                "direction": step.direction,
                "prefix": step.prefix,
                "images": step.images,
                "suffix": step.suffix,
            }));
        }
        serde_json::Value::Array(rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeriveOutcome {
    Found(Derivation),
    /// Not found within the bounds; this is not a proof of underivability.
    NotFound { bounds: Bounds, explored: usize },
}

impl DeriveOutcome {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            DeriveOutcome::Found(d) => Some(d),
            DeriveOutcome::NotFound { .. } => None,
        }
    }
}

/// Breadth-first reachability with parent links.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub root: Word,
    /// Depth and the (parent, step) that first reached each word.
    pub reached: BTreeMap<Word, (usize, Option<(Word, Step)>)>,
    /// Whether words at the final depth were left unexpanded.
    pub truncated: bool,
}

impl Exploration {
    pub fn words(&self) -> BTreeSet<Word> {
        self.reached.keys().cloned().collect()
    }

    pub fn path_to(&self, w: &Word) -> Option<Derivation> {
        let mut back = Vec::new();
        let mut cur = w.clone();
        loop {
            let (_, link) = self.reached.get(&cur)?;
            match link {
                None => break,
                Some((parent, step)) => {
                    back.push((step.clone(), cur.clone()));
                    cur = parent.clone();
                }
            }
        }
        back.reverse();
        Some(Derivation { source: cur, steps: back })
    }
}

/// Depth and the (parent, step) link of every word seen by a search.
type Parents = HashMap<Word, (usize, Option<(Word, Step)>)>;

fn search_alphabet(words: &[&Word]) -> Vec<Letter> {
    let mut a = BTreeSet::new();
    for w in words {
        a.extend(w.content());
    }
    a.into_iter().collect()
}

/// Expands each frontier word in parallel; the merge is sequential in
/// frontier order so the outcome is independent of scheduling.
fn expand(rules: &Rules<'_>, frontier: &[Word], opts: &StepOptions) -> Vec<BTreeMap<Word, Step>> {
    frontier.par_iter().map(|w| rules.one_step(w, opts)).collect()
}

/// Every word reachable from `w` in at most `b.max_steps` steps through
/// words of length at most `b.max_len` (the root is always included).
pub fn explore(w: &Word, sys: &IdentitySystem, b: &Bounds) -> Exploration {
    let rules = Rules::new(sys);
    let opts = StepOptions { max_len: b.max_len, alphabet: search_alphabet(&[w]) };
    let mut reached = BTreeMap::new();
    reached.insert(w.clone(), (0, None));
    let mut frontier = vec![w.clone()];
    for depth in 1..=b.max_steps {
        if frontier.is_empty() {
            break;
        }
        let expansions = expand(&rules, &frontier, &opts);
        let mut next = Vec::new();
        for (parent, succ) in frontier.iter().zip(expansions) {
            for (v, step) in succ {
                if reached.contains_key(&v) {
                    continue;
                }
                reached.insert(v.clone(), (depth, Some((parent.clone(), step))));
                next.push(v);
            }
        }
        next.sort();
        frontier = next;
    }
    let truncated = !frontier.is_empty();
    Exploration { root: w.clone(), reached, truncated }
}

pub fn closure(w: &Word, sys: &IdentitySystem, b: &Bounds) -> BTreeSet<Word> {
    explore(w, sys, b).words()
}

/// Bidirectional breadth-first search for a derivation `u → v`. The returned
/// certificate is shortest, ties broken by the shortlex order of the meeting
/// word. Endpoints are admitted even if longer than `b.max_len`.
pub fn derive(u: &Word, v: &Word, sys: &IdentitySystem, b: &Bounds) -> DeriveOutcome {
    if u == v {
        return DeriveOutcome::Found(Derivation::trivial(u.clone()));
    }
    let rules = Rules::new(sys);
    let opts = StepOptions {
        max_len: b.max_len.max(u.len()).max(v.len()),
        alphabet: search_alphabet(&[u, v]),
    };
    // word -> (depth, parent, step) on each side; backward links point toward `v`.
    let mut fwd: Parents = HashMap::new();
    let mut bwd: Parents = HashMap::new();
    fwd.insert(u.clone(), (0, None));
    bwd.insert(v.clone(), (0, None));
    let mut ffront = vec![u.clone()];
    let mut bfront = vec![v.clone()];
    let (mut fdepth, mut bdepth) = (0usize, 0usize);
    while fdepth + bdepth < b.max_steps && !ffront.is_empty() && !bfront.is_empty() {
        let forward = ffront.len() <= bfront.len();
        let (front, mine, other, depth) = if forward {
            (&mut ffront, &mut fwd, &bwd, &mut fdepth)
        } else {
            (&mut bfront, &mut bwd, &fwd, &mut bdepth)
        };
        *depth += 1;
        let expansions = expand(&rules, front, &opts);
        let mut next = Vec::new();
        let mut meets: Vec<Word> = Vec::new();
        for (parent, succ) in front.iter().zip(expansions) {
            for (w, step) in succ {
                if mine.contains_key(&w) {
                    continue;
                }
                if other.contains_key(&w) {
                    meets.push(w.clone());
                }
                mine.insert(w.clone(), (*depth, Some((parent.clone(), step))));
                next.push(w);
            }
        }
        if !meets.is_empty() {
            let best = meets
                .into_iter()
                .min_by(|a, b| {
                    let da = fwd[a].0 + bwd[a].0;
                    let db = fwd[b].0 + bwd[b].0;
                    da.cmp(&db).then_with(|| a.cmp(b))
                })
                .expect("non-empty");
            return DeriveOutcome::Found(splice(u, &best, &fwd, &bwd));
        }
        next.sort();
        *front = next;
    }
    DeriveOutcome::NotFound { bounds: *b, explored: fwd.len() + bwd.len() }
}

fn splice(
    u: &Word,
    meet: &Word,
    fwd: &Parents,
    bwd: &Parents,
) -> Derivation {
    let mut steps = Vec::new();
    let mut cur = meet.clone();
    while let Some((_, Some((parent, step)))) = fwd.get(&cur) {
        steps.push((step.clone(), cur.clone()));
        cur = parent.clone();
    }
    steps.reverse();
    let mut cur = meet.clone();
    while let Some((_, Some((parent, step)))) = bwd.get(&cur) {
        // Backward search found `cur` from `parent`; walk it toward `v`.
        steps.push((step.inverse(), parent.clone()));
        cur = parent.clone();
    }
    Derivation { source: u.clone(), steps }
}

/// `w = v1·a·v2·a·v3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareSplit {
    pub v1: Word,
    pub a: Letter,
    pub v2: Word,
    pub v3: Word,
}

impl SquareSplit {
    /// Split at the 0-based positions of two occurrences of the same letter.
    pub fn at(w: &Word, first: usize, second: usize) -> Option<SquareSplit> {
        let s = w.letters();
        if first >= second || second >= s.len() || s[first] != s[second] {
            return None;
        }
        Some(SquareSplit {
            v1: w.slice(0..first),
            a: s[first],
            v2: w.slice(first + 1..second),
            v3: w.slice(second + 1..s.len()),
        })
    }
}

/// `v1 a v2 a v3 → v1 a² v2 v3` when every letter of `v2` is multiple in `w`.
pub fn absorb_square(w: &Word, split: &SquareSplit) -> Result<Word, RewriteError> {
    let mut whole = split.v1.clone();
    whole.push(split.a);
    whole.extend_from(&split.v2);
    whole.push(split.a);
    whole.extend_from(&split.v3);
    if &whole != w {
        return Err(RewriteError::SplitMismatch);
    }
    let counts = w.counts();
    if let Some(&x) = split.v2.letters().iter().find(|x| counts[x] < 2) {
        return Err(RewriteError::SimpleInMiddle(x));
    }
    let mut out = split.v1.clone();
    out.push_pow(split.a, 2);
    out.extend_from(&split.v2);
    out.extend_from(&split.v3);
    Ok(out)
}

/// `w = w'·a·b·w''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapSplit {
    pub prefix: Word,
    pub a: Letter,
    pub b: Letter,
    pub suffix: Word,
}

impl SwapSplit {
    /// Split around the adjacent pair at 0-based positions `pos`, `pos + 1`.
    pub fn at(w: &Word, pos: usize) -> Option<SwapSplit> {
        let s = w.letters();
        if pos + 1 >= s.len() {
            return None;
        }
        Some(SwapSplit { prefix: w.slice(0..pos), a: s[pos], b: s[pos + 1], suffix: w.slice(pos + 2..s.len()) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapCase {
    /// `a` and `b` are integrated in `w`.
    Integrated,
    /// `w' = v1·b·v2` with every letter of `v2` multiple in `w`.
    SecondOccurrence,
}

/// `w'·a·b·w'' → w'·b·a·w''` under either hypothesis of [`SwapCase`].
pub fn swap_adjacent(w: &Word, split: &SwapSplit, case: SwapCase) -> Result<Word, RewriteError> {
    let mut whole = split.prefix.clone();
    whole.push(split.a);
    whole.push(split.b);
    whole.extend_from(&split.suffix);
    if &whole != w {
        return Err(RewriteError::SplitMismatch);
    }
    let counts = w.counts();
    for x in [split.a, split.b] {
        if counts[&x] < 2 {
            return Err(RewriteError::NotMultiple(x));
        }
    }
    match case {
        SwapCase::Integrated => {
            let ok = w.integrated(split.a, split.b).map_err(|_| RewriteError::NotIntegrated(split.a, split.b))?;
            if !ok {
                return Err(RewriteError::NotIntegrated(split.a, split.b));
            }
        }
        SwapCase::SecondOccurrence => {
            // The last occurrence of b in w' leaves the shortest v2.
            let p = split.prefix.letters();
            let last_b = p.iter().rposition(|&x| x == split.b);
            let ok = last_b.is_some_and(|i| p[i + 1..].iter().all(|x| counts[x] >= 2));
            if !ok {
                return Err(RewriteError::NoSecondOccurrenceWitness(split.b));
            }
        }
    }
    let mut out = split.prefix.clone();
    out.push(split.b);
    out.push(split.a);
    out.extend_from(&split.suffix);
    Ok(out)
}

/// Brings every multiple letter to exactly three occurrences: the first,
/// second and last are kept and the rest deleted; a letter with two
/// occurrences gets a copy right after its second one.
pub fn normalize_con3(w: &Word) -> Word {
    let counts = w.counts();
    let mut seen: BTreeMap<Letter, usize> = BTreeMap::new();
    let mut out = Word::empty();
    for &x in w.letters() {
        let n = counts[&x];
        let k = {
            let e = seen.entry(x).or_insert(0);
            *e += 1;
            *e
        };
        match n {
            1 => out.push(x),
            2 => {
                out.push(x);
                if k == 2 {
                    out.push(x);
                }
            }
            _ => {
                if k <= 2 || k == n {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Whether `w ≈ result` of a macro rule passes the necessary condition for J.
pub fn macro_step_is_sound(w: &Word, result: &Word) -> bool {
    necessary_filter(&Identity::new(w.clone(), result.clone()))
}
