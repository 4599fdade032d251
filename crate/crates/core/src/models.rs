//! Finite monoids given by Cayley tables, and exhaustive identity checking.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::identity::{basis, Identity, IdentitySystem, VarietyId};
use crate::word::{Letter, Word};

/// A monoid on `0..size` with element labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    labels: Vec<String>,
    identity: usize,
    table: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct CayleyJson {
    elements: Vec<String>,
    identity: String,
    table: Vec<Vec<String>>,
}

impl FiniteMonoid {
    /// Validates totality, the identity law and associativity.
    pub fn new(labels: Vec<String>, identity: usize, table: Vec<Vec<usize>>) -> Result<FiniteMonoid, ModelError> {
        let n = labels.len();
        if n == 0 || identity >= n || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&e| e >= n)) {
            return Err(ModelError::MalformedTable(n));
        }
        if (0..n).any(|a| table[identity][a] != a || table[a][identity] != a) {
            return Err(ModelError::NotIdentity(labels[identity].clone()));
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(ModelError::NotAssociative(
                            labels[a].clone(),
                            labels[b].clone(),
                            labels[c].clone(),
                        ));
                    }
                }
            }
        }
        Ok(FiniteMonoid { labels, identity, table })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    pub fn element(&self, label: &str) -> Result<usize, ModelError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ModelError::UnknownElement(label.to_string()))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn product(&self, a: &str, b: &str) -> Result<&str, ModelError> {
        Ok(self.label(self.mul(self.element(a)?, self.element(b)?)))
    }

    /// Value of `w` under `assign` (letters missing from it evaluate to 1).
    pub fn eval(&self, w: &Word, assign: &BTreeMap<Letter, usize>) -> usize {
        w.letters()
            .iter()
            .fold(self.identity, |acc, x| self.mul(acc, assign.get(x).copied().unwrap_or(self.identity)))
    }

    /// The table restricted to `keep` (which must be closed under products).
    pub fn restrict(&self, keep: &[usize]) -> Vec<Vec<&str>> {
        keep.iter()
            .map(|&a| keep.iter().map(|&b| self.label(self.mul(a, b))).collect())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = CayleyJson {
            elements: self.labels.clone(),
            identity: self.labels[self.identity].clone(),
            table: self
                .table
                .iter()
                .map(|r| r.iter().map(|&e| self.labels[e].clone()).collect())
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<FiniteMonoid, ModelError> {
        let doc: CayleyJson = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let n = doc.elements.len();
        let index: BTreeMap<&str, usize> = doc.elements.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != n {
            return Err(ModelError::Json("duplicate element label".into()));
        }
        let lookup = |l: &str| index.get(l).copied().ok_or_else(|| ModelError::UnknownElement(l.to_string()));
        let identity = lookup(&doc.identity)?;
        let table = doc
            .table
            .iter()
            .map(|r| r.iter().map(|l| lookup(l)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        FiniteMonoid::new(doc.elements, identity, table)
    }
}

impl fmt::Display for FiniteMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.labels.iter().map(|l| l.chars().count()).max().unwrap_or(1);
        write!(f, "{:>w$} |", "·")?;
        for l in &self.labels {
            write!(f, " {l:>w$}")?;
        }
        writeln!(f)?;
        writeln!(f, "{}", "-".repeat((w + 1) * (self.size() + 1) + 1))?;
        for (a, row) in self.table.iter().enumerate() {
            write!(f, "{:>w$} |", self.labels[a])?;
            for &e in row {
                write!(f, " {:>w$}", self.labels[e])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `B_0^1 = {1, a, b, c, 0}`: `a² = a`, `b² = b`, `ab = ba = 0`,
/// `ac = cb = c`, `ca = bc = c² = 0`.
pub fn b0_monoid() -> FiniteMonoid {
    const L: [&str; 5] = ["1", "a", "b", "c", "0"];
    let rows = [
        ["1", "a", "b", "c", "0"],
        ["a", "a", "0", "c", "0"],
        ["b", "0", "b", "0", "0"],
        ["c", "0", "c", "0", "0"],
        ["0", "0", "0", "0", "0"],
    ];
    let idx = |s: &str| L.iter().position(|&l| l == s).unwrap();
    let table = rows.iter().map(|r| r.iter().map(|&s| idx(s)).collect()).collect();
    FiniteMonoid::new(L.iter().map(|s| s.to_string()).collect(), 0, table).expect("B_0^1 is a monoid")
}

/// One side of a defining relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Word(Word),
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Relation {
    pub fn new(lhs: Term, rhs: Term) -> Relation {
        Relation { lhs, rhs }
    }

    /// `"a b = 0"`, `"a^2 = a^3"`; `0` is the zero, `1` the empty word.
    pub fn parse(text: &str) -> Result<Relation, crate::error::ParseError> {
        let Some((l, r)) = text.split_once('=') else {
            return Err(crate::error::ParseError::new(1, 1, "expected '=' in relation"));
        };
        let side = |s: &str, col: usize| -> Result<Term, crate::error::ParseError> {
            if s.trim() == "0" {
                Ok(Term::Zero)
            } else {
                crate::word::parse_word_at(s, 1, col).map(Term::Word)
            }
        };
        Ok(Relation { lhs: side(l, 1)?, rhs: side(r, l.chars().count() + 2)? })
    }

    fn mentions_zero(&self) -> bool {
        self.lhs == Term::Zero || self.rhs == Term::Zero
    }
}

/// Normal forms under `rules`; `None` is the zero.
struct Rewriter {
    rules: Vec<(Word, Option<Word>)>,
}

impl Rewriter {
    fn new(relations: &[Relation]) -> Rewriter {
        let mut rules = Vec::new();
        for r in relations {
            match (&r.lhs, &r.rhs) {
                (Term::Zero, Term::Zero) => {}
                (Term::Word(w), Term::Zero) | (Term::Zero, Term::Word(w)) => rules.push((w.clone(), None)),
                (Term::Word(u), Term::Word(v)) => {
                    if u != v {
                        let (big, small) = if u > v { (u, v) } else { (v, u) };
                        rules.push((big.clone(), Some(small.clone())));
                    }
                }
            }
        }
        Rewriter { rules }
    }

    fn normal_form(&self, w: &Word) -> Option<Word> {
        let mut cur = w.letters().to_vec();
        'outer: loop {
            for pos in 0..cur.len() {
                for (lhs, rhs) in &self.rules {
                    let l = lhs.letters();
                    if !l.is_empty() && cur[pos..].starts_with(l) {
                        let rhs = rhs.as_ref()?;
                        cur.splice(pos..pos + l.len(), rhs.letters().iter().copied());
                        continue 'outer;
                    }
                }
            }
            return Some(Word::from_letters(cur));
        }
    }
}

fn element_label(w: &Option<Word>) -> String {
    match w {
        None => "0".to_string(),
        Some(w) if w.is_empty() => "1".to_string(),
        Some(w) => w.compact(),
    }
}

/// The monoid presented by `generators` and `relations`, built by closing
/// the normal forms of generator products (shortlex-oriented rewriting)
/// under right multiplication. The zero is an element only if some
/// relation mentions it.
pub fn from_presentation(
    generators: &[Letter],
    relations: &[Relation],
    max_size: usize,
) -> Result<FiniteMonoid, ModelError> {
    let gens: BTreeSet<Letter> = generators.iter().copied().collect();
    for r in relations {
        for t in [&r.lhs, &r.rhs] {
            if let Term::Word(w) = t {
                if let Some(&x) = w.letters().iter().find(|x| !gens.contains(x)) {
                    return Err(ModelError::UnknownGenerator(x));
                }
            }
        }
    }
    let rw = Rewriter::new(relations);
    let mut elements: Vec<Option<Word>> = vec![Some(Word::empty())];
    if relations.iter().any(Relation::mentions_zero) {
        elements.push(None);
    }
    let mut index: BTreeMap<Option<Word>, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let mut queue: VecDeque<usize> = (0..elements.len()).collect();
    while let Some(i) = queue.pop_front() {
        let Some(w) = elements[i].clone() else { continue };
        for &g in generators {
            let mut next = w.clone();
            next.push(g);
            let nf = rw.normal_form(&next);
            if !index.contains_key(&nf) {
                if elements.len() == max_size {
                    return Err(ModelError::SizeExceeded(max_size));
                }
                index.insert(nf.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(nf);
            }
        }
    }
    let n = elements.len();
    let mut table = vec![vec![0; n]; n];
    for (a, ea) in elements.iter().enumerate() {
        for (b, eb) in elements.iter().enumerate() {
            let p = match (ea, eb) {
                (Some(u), Some(v)) => rw.normal_form(&u.concat(v)),
                _ => None,
            };
            table[a][b] = *index.get(&p).ok_or(ModelError::SizeExceeded(max_size))?;
        }
    }
    FiniteMonoid::new(elements.iter().map(element_label).collect(), 0, table)
}

/// Outcome of checking one identity; `witness` is the first refuting
/// assignment in mixed-radix order (first letter most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub identity: Identity,
    pub verdict: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assignment: BTreeMap<Letter, usize>,
    pub lhs_value: usize,
    pub rhs_value: usize,
}

impl SatisfactionReport {
    pub fn describe(&self, m: &FiniteMonoid) -> String {
        match &self.witness {
            None => format!("{} holds", self.identity.pretty()),
            Some(w) => {
                let parts: Vec<String> = w.assignment.iter().map(|(x, &e)| format!("{x}↦{}", m.label(e))).collect();
                format!(
                    "{} fails at {}: lhs = {}, rhs = {}",
                    self.identity.pretty(),
                    parts.join(", "),
                    m.label(w.lhs_value),
                    m.label(w.rhs_value)
                )
            }
        }
    }

    pub fn to_json(&self, m: &FiniteMonoid) -> serde_json::Value {
        let witness = self.witness.as_ref().map(|w| {
            let assignment: serde_json::Map<String, serde_json::Value> =
                w.assignment.iter().map(|(x, &e)| (x.to_string(), m.label(e).into())).collect();
            serde_json::json!({
                "assignment": assignment,
                "lhs": m.label(w.lhs_value),
                "rhs": m.label(w.rhs_value),
            })
        });
        serde_json::json!({
            "identity": self.identity.to_string(),
            "verdict": self.verdict,
            "witness": witness,
        })
    }
}

/// Checks all `|M|^k` assignments of the `k` letters of `id`.
pub fn satisfies(m: &FiniteMonoid, id: &Identity) -> SatisfactionReport {
    let letters: Vec<Letter> = id.content().into_iter().collect();
    let n = m.size() as u128;
    let total = n.checked_pow(letters.len() as u32).expect("assignment space too large");
    let decode = |mut i: u128| {
        let mut assign = BTreeMap::new();
        for &x in letters.iter().rev() {
            assign.insert(x, (i % n) as usize);
            i /= n;
        }
        assign
    };
    let witness = if id.is_trivial() {
        None
    } else {
        (0..total as u64).into_par_iter().find_first(|&i| {
            let a = decode(i as u128);
            m.eval(&id.lhs, &a) != m.eval(&id.rhs, &a)
        })
    };
    let witness = witness.map(|i| {
        let assignment = decode(i as u128);
        Witness {
            lhs_value: m.eval(&id.lhs, &assignment),
            rhs_value: m.eval(&id.rhs, &assignment),
            assignment,
        }
    });
    SatisfactionReport { identity: id.clone(), verdict: witness.is_none(), witness }
}

pub fn satisfies_system(m: &FiniteMonoid, sys: &IdentitySystem) -> Vec<SatisfactionReport> {
    sys.iter().map(|id| satisfies(m, id)).collect()
}

/// A small model together with the varieties it is known to lie in.
#[derive(Clone, Debug)]
pub struct TaggedModel {
    pub name: &'static str,
    pub description: &'static str,
    pub monoid: FiniteMonoid,
    /// Every variety containing the one the model generates.
    pub tags: BTreeSet<VarietyId>,
}

impl TaggedModel {
    pub fn lies_in(&self, v: VarietyId) -> bool {
        self.tags.contains(&v)
    }
}

/// Truncation of J's basis used when verifying tags.
pub const TAG_CHECK_TRUNC: usize = 3;

fn up_set(v: VarietyId) -> BTreeSet<VarietyId> {
    VarietyId::ALL.into_iter().filter(|&w| v.leq(w)).collect()
}

fn relations(text: &[&str]) -> Vec<Relation> {
    text.iter().map(|r| Relation::parse(r).expect("valid relation")).collect()
}

fn build_refuters() -> Vec<TaggedModel> {
    let a = Letter::plain('a');
    let b = Letter::plain('b');
    let e = Letter::plain('e');
    let semilattice = from_presentation(&[e], &relations(&["e^2 = e"]), 2).expect("semilattice");
    let c3 = from_presentation(&[a], &relations(&["a^2 = a^3"]), 3).expect("C model");
    let sxy = from_presentation(&[a, b], &relations(&["a^2 = 0", "b^2 = 0", "b a = 0"]), 5).expect("D model");
    let models = vec![
        TaggedModel {
            name: "B0",
            description: "B_0 with an identity adjoined; generates E ∨ ←E",
            monoid: b0_monoid(),
            tags: up_set(VarietyId::EJoinDualE),
        },
        TaggedModel {
            name: "SL2",
            description: "two-element semilattice {1, e}; generates SL",
            monoid: semilattice,
            tags: up_set(VarietyId::Sl),
        },
        TaggedModel {
            name: "C3",
            description: "⟨a | a² = a³⟩ with identity; generates C",
            monoid: c3,
            tags: up_set(VarietyId::C),
        },
        TaggedModel {
            name: "Sxy",
            description: "⟨a, b | a² = b² = ba = 0⟩ with identity; generates D",
            monoid: sxy,
            tags: up_set(VarietyId::D),
        },
    ];
    for m in &models {
        for &v in &m.tags {
            let bad: Vec<_> = satisfies_system(&m.monoid, &basis(v, TAG_CHECK_TRUNC))
                .into_iter()
                .filter(|r| !r.verdict)
                .collect();
            assert!(bad.is_empty(), "model {} does not satisfy the basis of {v}: {:?}", m.name, bad[0].identity);
        }
    }
    models
}

/// `B0`, `SL2`, `C3`, `Sxy`, with tags checked against the bases on first use.
pub fn refuter_models() -> &'static [TaggedModel] {
    static MODELS: OnceLock<Vec<TaggedModel>> = OnceLock::new();
    MODELS.get_or_init(build_refuters)
}

pub fn refuter_model(name: &str) -> Option<&'static TaggedModel> {
    refuter_models().iter().find(|m| m.name.eq_ignore_ascii_case(name))
}

/// First tagged model inside `v` that refutes `id`.
pub fn model_refutation(v: VarietyId, id: &Identity) -> Option<(&'static TaggedModel, SatisfactionReport)> {
    refuter_models().iter().filter(|m| m.lies_in(v)).find_map(|m| {
        let r = satisfies(&m.monoid, id);
        (!r.verdict).then_some((m, r))
    })
}
