//! Identities, identity systems, the parametric families `w_n[π]`, `u_n[p, ℓ]`,
//! the named bases of the twelve varieties of L(J), and the lattice order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FamilyError, ParseError};
use crate::word::{parse_word_at, word, Letter, Word};

/// `lhs ≈ rhs`, optionally labelled.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Identity {
    pub lhs: Word,
    pub rhs: Word,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Identity {
    pub fn new(lhs: Word, rhs: Word) -> Identity {
        Identity { lhs, rhs, name: None }
    }

    pub fn named(name: impl Into<String>, lhs: Word, rhs: Word) -> Identity {
        Identity { lhs, rhs, name: Some(name.into()) }
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    /// Both sides reversed letterwise; the same identity read in the dual variety.
    pub fn reversed(&self) -> Identity {
        Identity { lhs: self.lhs.reverse(), rhs: self.rhs.reverse(), name: self.name.clone() }
    }

    pub fn swapped(&self) -> Identity {
        Identity { lhs: self.rhs.clone(), rhs: self.lhs.clone(), name: self.name.clone() }
    }

    /// Union of the contents of both sides.
    pub fn content(&self) -> std::collections::BTreeSet<Letter> {
        let mut c = self.lhs.content();
        c.extend(self.rhs.content());
        c
    }

    /// The label if present, otherwise the compact rendering.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.pretty())
    }

    /// Human rendering, `xyx ≈ xyx²`.
    pub fn pretty(&self) -> String {
        format!("{} ≈ {}", self.lhs.compact(), self.rhs.compact())
    }

    /// Parses `[name:] <word> = <word>`; `≈` is accepted for `=`.
    pub fn parse(text: &str) -> Result<Identity, ParseError> {
        parse_identity_line(text, 1)
    }
}

/// Machine form `u = v`, re-parseable; the label is not included.
impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl FromStr for Identity {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identity::parse(s)
    }
}

/// Builds an unnamed identity from a literal, panicking on bad input.
pub fn identity(text: &str) -> Identity {
    Identity::parse(text).unwrap_or_else(|e| panic!("bad identity literal {text:?}: {e}"))
}

fn parse_identity_line(text: &str, line: usize) -> Result<Identity, ParseError> {
    let col_of = |byte: usize| text[..byte].chars().count() + 1;
    let (name, body, body_start) = match text.find(':') {
        Some(i) => {
            let name = text[..i].trim();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(ParseError::new(line, col_of(i), "malformed identity label"));
            }
            (Some(name.to_string()), &text[i + 1..], i + 1)
        }
        None => (None, text, 0),
    };
    let mut seps = body
        .char_indices()
        .filter(|&(_, c)| c == '=' || c == '≈');
    let (sep, sep_char) = seps
        .next()
        .ok_or_else(|| ParseError::new(line, col_of(body_start), "expected `=` or `≈` between the sides"))?;
    if let Some((extra, _)) = seps.next() {
        return Err(ParseError::new(line, col_of(body_start + extra), "more than one `=` in identity"));
    }
    let lhs_text = &body[..sep];
    let rhs_start = sep + sep_char.len_utf8();
    let rhs_text = &body[rhs_start..];
    let lhs = parse_word_at(lhs_text, line, col_of(body_start))?;
    let rhs = parse_word_at(rhs_text, line, col_of(body_start + rhs_start))?;
    Ok(Identity { lhs, rhs, name })
}

/// A named finite set of identities, kept in insertion order without
/// duplicate `(lhs, rhs)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySystem {
    pub name: String,
    identities: Vec<Identity>,
}

impl IdentitySystem {
    pub fn new(name: impl Into<String>) -> IdentitySystem {
        IdentitySystem { name: name.into(), identities: Vec::new() }
    }

    pub fn from_identities(name: impl Into<String>, ids: impl IntoIterator<Item = Identity>) -> IdentitySystem {
        let mut sys = IdentitySystem::new(name);
        for id in ids {
            sys.push(id);
        }
        sys
    }

    /// Adds `id` unless an identity with the same sides is present.
    pub fn push(&mut self, id: Identity) -> bool {
        if self.contains(&id) {
            return false;
        }
        self.identities.push(id);
        true
    }

    pub fn extend(&mut self, other: &IdentitySystem) {
        for id in &other.identities {
            self.push(id.clone());
        }
    }

    /// Membership by sides; labels are ignored.
    pub fn contains(&self, id: &Identity) -> bool {
        self.identities.iter().any(|j| j.lhs == id.lhs && j.rhs == id.rhs)
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Identity> {
        self.identities.iter()
    }

    /// Each identity with both sides reversed.
    pub fn reversed(&self, name: impl Into<String>) -> IdentitySystem {
        IdentitySystem::from_identities(name, self.identities.iter().map(|id| {
            let mut r = id.reversed();
            r.name = id.name.as_ref().map(|n| format!("{n}~"));
            r
        }))
    }

    /// One identity per line, `#` starts a comment.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<IdentitySystem, ParseError> {
        let mut sys = IdentitySystem::new(name);
        for (i, raw) in text.lines().enumerate() {
            let content = match raw.find('#') {
                Some(c) => &raw[..c],
                None => raw,
            };
            if content.trim().is_empty() {
                continue;
            }
            sys.push(parse_identity_line(content, i + 1)?);
        }
        Ok(sys)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.name);
        for id in &self.identities {
            match &id.name {
                Some(n) => out.push_str(&format!("{n}: {id}\n")),
                None => out.push_str(&format!("{id}\n")),
            }
        }
        out
    }
}

impl<'a> IntoIterator for &'a IdentitySystem {
    type Item = &'a Identity;
    type IntoIter = std::slice::Iter<'a, Identity>;

    fn into_iter(self) -> Self::IntoIter {
        self.identities.iter()
    }
}

/// The twelve varieties of L(J). Declaration order is a linear extension of
/// the lattice order, bottom first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarietyId {
    T,
    #[serde(rename = "SL")]
    Sl,
    C,
    D,
    E,
    #[serde(rename = "dE")]
    DualE,
    #[serde(rename = "EvdE")]
    EJoinDualE,
    F,
    #[serde(rename = "FvdE")]
    FJoinDualE,
    H,
    I,
    J,
}

impl VarietyId {
    pub const ALL: [VarietyId; 12] = [
        VarietyId::T,
        VarietyId::Sl,
        VarietyId::C,
        VarietyId::D,
        VarietyId::E,
        VarietyId::DualE,
        VarietyId::EJoinDualE,
        VarietyId::F,
        VarietyId::FJoinDualE,
        VarietyId::H,
        VarietyId::I,
        VarietyId::J,
    ];

    pub fn token(self) -> &'static str {
        match self {
            VarietyId::T => "T",
            VarietyId::Sl => "SL",
            VarietyId::C => "C",
            VarietyId::D => "D",
            VarietyId::E => "E",
            VarietyId::DualE => "dE",
            VarietyId::EJoinDualE => "EvdE",
            VarietyId::F => "F",
            VarietyId::FJoinDualE => "FvdE",
            VarietyId::H => "H",
            VarietyId::I => "I",
            VarietyId::J => "J",
        }
    }

    /// Whether the word problem is decided by a criterion (everything below H).
    pub fn is_decidable(self) -> bool {
        !matches!(self, VarietyId::H | VarietyId::I | VarietyId::J)
    }

    /// Upper covers in the Hasse diagram.
    pub fn covers(self) -> &'static [VarietyId] {
        use VarietyId::*;
        match self {
            T => &[Sl],
            Sl => &[C],
            C => &[D],
            D => &[E, DualE],
            E => &[EJoinDualE, F],
            DualE => &[EJoinDualE],
            EJoinDualE => &[FJoinDualE],
            F => &[FJoinDualE],
            FJoinDualE => &[H],
            H => &[I],
            I => &[J],
            J => &[],
        }
    }

    /// `self ⊆ other` in L(J).
    pub fn leq(self, other: VarietyId) -> bool {
        if self == other {
            return true;
        }
        self.covers().iter().any(|c| c.leq(other))
    }
}

impl fmt::Display for VarietyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for VarietyId {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VarietyId::ALL
            .into_iter()
            .find(|v| v.token() == s)
            .ok_or_else(|| ParseError::new(1, 1, format!("unknown variety `{s}`")))
    }
}

/// `V ⊆ W` in L(J).
pub fn lattice_leq(v: VarietyId, w: VarietyId) -> bool {
    v.leq(w)
}

/// A permutation of `{1..n}` stored as its images `(1π, …, nπ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation, FamilyError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &i in &images {
            if i == 0 || i > n || seen[i] {
                return Err(FamilyError::NotAPermutation(images, n));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i + 1 == j)
    }

    /// All of `S_n` in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            let n = used.len() - 1;
            if prefix.len() == n {
                out.push(Permutation(prefix.clone()));
                return;
            }
            for i in 1..=n {
                if !used[i] {
                    used[i] = true;
                    prefix.push(i);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(n), &mut vec![false; n + 1], &mut out);
        out
    }

    /// Parses images separated by commas or whitespace: `2,1` or `2 1`.
    pub fn parse(text: &str) -> Result<Permutation, ParseError> {
        let mut images = Vec::new();
        for part in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()) {
            let k = part
                .parse()
                .map_err(|_| ParseError::new(1, 1, format!("invalid permutation image `{part}`")))?;
            images.push(k);
        }
        Permutation::new(images).map_err(|e| ParseError::new(1, 1, e.to_string()))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn x() -> Letter {
    Letter::plain('x')
}

fn z(i: usize) -> Letter {
    Letter::indexed('z', i as u32)
}

fn t(i: usize) -> Letter {
    Letter::indexed('t', i as u32)
}

/// `Φ = {xyx ≈ xyx², x²y² ≈ y²x², xyzxy ≈ yxzxy}`.
pub fn phi_system() -> IdentitySystem {
    IdentitySystem::from_identities(
        "Phi",
        [
            Identity::named("xyx=xyxx", word("x y x"), word("x y x^2")),
            Identity::named("xxyy=yyxx", word("x^2 y^2"), word("y^2 x^2")),
            Identity::named("xyzxy=yxzxy", word("x y z x y"), word("y x z x y")),
        ],
    )
}

/// `w_n[π] ≈ w_n'[π]`:
/// `x z_{1π}⋯z_{nπ} x ∏ t_i z_i ≈ x² z_{1π}⋯z_{nπ} ∏ t_i z_i`.
pub fn w_family(n: usize, pi: &Permutation) -> Result<Identity, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroSize);
    }
    if pi.degree() != n {
        return Err(FamilyError::NotAPermutation(pi.images().to_vec(), n));
    }
    let zs: Word = pi.images().iter().map(|&i| z(i)).collect();
    let tail: Word = (1..=n).flat_map(|i| [t(i), z(i)]).collect();
    let mut lhs = Word::from_letters(vec![x()]);
    lhs.extend_from(&zs);
    lhs.push(x());
    lhs.extend_from(&tail);
    let mut rhs = Word::from_letters(vec![x(), x()]);
    rhs.extend_from(&zs);
    rhs.extend_from(&tail);
    Ok(Identity::named(format!("w{n}[{pi}]"), lhs, rhs))
}

/// `u_n[p, ℓ_1..ℓ_n] = x z_1⋯z_n x^p ∏ t_i z_i^{ℓ_i}`.
pub fn u_word(n: usize, p: usize, ell: &[usize]) -> Result<Word, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroSize);
    }
    if ell.len() != n {
        return Err(FamilyError::ExponentCount { expected: n, got: ell.len() });
    }
    if p == 0 || ell.contains(&0) {
        return Err(FamilyError::NonPositive);
    }
    let mut w = Word::from_letters(vec![x()]);
    for i in 1..=n {
        w.push(z(i));
    }
    w.push_pow(x(), p);
    for (i, &l) in ell.iter().enumerate() {
        w.push(t(i + 1));
        w.push_pow(z(i + 1), l);
    }
    Ok(w)
}

fn named(name: &str, lhs: &str, rhs: &str) -> Identity {
    Identity::named(name, word(lhs), word(rhs))
}

/// The identity basis of `v`. Only J depends on `trunc`: its basis holds
/// `w_n[π] ≈ w_n'[π]` for every `n ≤ trunc` and `π ∈ S_n`.
pub fn basis(v: VarietyId, trunc: usize) -> IdentitySystem {
    use VarietyId::*;
    let xyxztx = || named("xyxztx=xyxzxtx", "x y x z t x", "x y x z x t x");
    let name = match v {
        J => format!("J[trunc={trunc}]"),
        other => other.token().to_string(),
    };
    let ids: Vec<Identity> = match v {
        T => vec![named("x=y", "x", "y")],
        Sl => vec![named("xx=x", "x^2", "x"), named("xy=yx", "x y", "y x")],
        C => vec![named("xx=xxx", "x^2", "x^3"), named("xy=yx", "x y", "y x")],
        D => vec![
            named("xx=xxx", "x^2", "x^3"),
            named("xxy=xyx", "x^2 y", "x y x"),
            named("xyx=yxx", "x y x", "y x^2"),
        ],
        E => vec![
            named("xx=xxx", "x^2", "x^3"),
            named("xxy=xyx", "x^2 y", "x y x"),
            named("xxyy=yyxx", "x^2 y^2", "y^2 x^2"),
        ],
        DualE => return basis(E, trunc).reversed(name),
        EJoinDualE => vec![
            named("xyzx=xyxzx", "x y z x", "x y x z x"),
            named("xxyy=yyxx", "x^2 y^2", "y^2 x^2"),
        ],
        F => {
            let mut ids = phi_system().identities().to_vec();
            ids.push(named("xyxz=xyxzx", "x y x z", "x y x z x"));
            ids
        }
        FJoinDualE => vec![
            named("xxyy=yyxx", "x^2 y^2", "y^2 x^2"),
            named("xyzxty=yxzxty", "x y z x t y", "y x z x t y"),
            named("xzxyty=xzyxty", "x z x y t y", "x z y x t y"),
            named("xyx=xyxx", "x y x", "x y x^2"),
            xyxztx(),
        ],
        H => {
            let mut ids = phi_system().identities().to_vec();
            ids.push(xyxztx());
            ids.push(named("xxyty=xyxty", "x^2 y t y", "x y x t y"));
            ids.push(named("xyxty=yxxty", "x y x t y", "y x^2 t y"));
            ids
        }
        I => {
            let mut ids = phi_system().identities().to_vec();
            ids.push(xyxztx());
            ids.push(named("xzxyty=xzyxty", "x z x y t y", "x z y x t y"));
            ids
        }
        J => {
            let mut ids = phi_system().identities().to_vec();
            ids.push(xyxztx());
            for n in 1..=trunc {
                for pi in Permutation::all(n) {
                    ids.push(w_family(n, &pi).expect("valid family parameters"));
                }
            }
            ids
        }
    };
    IdentitySystem::from_identities(name, ids)
}

/// Number of identities in the truncated basis of J (for reporting).
pub fn j_basis_size(trunc: usize) -> usize {
    4 + (1..=trunc).map(|n| (1..=n).product::<usize>()).sum::<usize>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_the_three_identities() {
        let phi = phi_system();
        assert_eq!(phi.len(), 3);
        assert!(phi.contains(&identity("x y x = x y x^2")));
        assert!(phi.contains(&identity("x^2 y^2 = y^2 x^2")));
        assert!(phi.contains(&identity("x y z x y = y x z x y")));
    }

    #[test]
    fn w_family_small_cases() {
        let w1 = w_family(1, &Permutation::identity(1)).unwrap();
        assert_eq!((w1.lhs.clone(), w1.rhs.clone()), (word("x z1 x t1 z1"), word("x^2 z1 t1 z1")));
        let w2 = w_family(2, &Permutation::identity(2)).unwrap();
        assert_eq!(w2.lhs, word("x z1 z2 x t1 z1 t2 z2"));
        assert_eq!(w2.rhs, word("x^2 z1 z2 t1 z1 t2 z2"));
        let swap = Permutation::new(vec![2, 1]).unwrap();
        let w2s = w_family(2, &swap).unwrap();
        assert_eq!(w2s.lhs, word("x z2 z1 x t1 z1 t2 z2"));
        assert_eq!(w2s.rhs, word("x^2 z2 z1 t1 z1 t2 z2"));
        assert!(w_family(2, &Permutation::identity(3)).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
    }

    #[test]
    fn u_word_cases() {
        assert_eq!(u_word(2, 1, &[1, 1]).unwrap(), w_family(2, &Permutation::identity(2)).unwrap().lhs);
        assert_eq!(u_word(1, 2, &[3]).unwrap(), word("x z1 x^2 t1 z1^3"));
        assert_eq!(u_word(1, 1, &[1]).unwrap(), word("x z1 x t1 z1"));
        assert_eq!(u_word(1, 0, &[1]), Err(FamilyError::NonPositive));
        assert_eq!(u_word(2, 1, &[1]), Err(FamilyError::ExponentCount { expected: 2, got: 1 }));
        assert_eq!(u_word(0, 1, &[]), Err(FamilyError::ZeroSize));
    }

    #[test]
    fn w_family_letter_profile() {
        for n in 1..=4 {
            for pi in Permutation::all(n) {
                let id = w_family(n, &pi).unwrap();
                for side in [&id.lhs, &id.rhs] {
                    let c = side.classes();
                    assert_eq!(c.content().len(), 2 * n + 1);
                    assert_eq!(c.count(x()), 2);
                    for i in 1..=n {
                        assert_eq!(c.count(z(i)), 2);
                        assert_eq!(c.count(t(i)), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn permutations_enumerate_symmetric_group() {
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::parse("2,1").unwrap().images(), &[2, 1]);
        assert_eq!(Permutation::parse("3 1 2").unwrap().images(), &[3, 1, 2]);
        assert!(Permutation::parse("1 3").is_err());
    }

    #[test]
    fn named_bases() {
        let f = basis(VarietyId::F, 1);
        assert_eq!(f.len(), 4);
        assert!(f.contains(&identity("x y x z = x y x z x")));
        let j2 = basis(VarietyId::J, 2);
        assert_eq!(j2.len(), j_basis_size(2));
        assert_eq!(j2.len(), 3 + 1 + 1 + 2);
        assert!(j2.contains(&identity("x z2 z1 x t1 z1 t2 z2 = x^2 z2 z1 t1 z1 t2 z2")));
        let evde = basis(VarietyId::EJoinDualE, 1);
        assert_eq!(evde.len(), 2);
        assert!(evde.contains(&identity("x y z x = x y x z x")));
        let de = basis(VarietyId::DualE, 1);
        assert!(de.contains(&identity("y x^2 = x y x")));
        assert_eq!(basis(VarietyId::T, 1).len(), 1);
    }

    #[test]
    fn lattice_examples() {
        use VarietyId::*;
        assert!(lattice_leq(E, FJoinDualE));
        assert!(!lattice_leq(DualE, F));
        assert!(!lattice_leq(F, DualE));
        assert!(!lattice_leq(EJoinDualE, F));
        assert!(lattice_leq(DualE, J));
        for v in VarietyId::ALL {
            assert!(lattice_leq(v, v));
            assert!(lattice_leq(T, v));
            assert!(lattice_leq(v, J));
        }
    }

    #[test]
    fn lattice_is_a_partial_order() {
        for a in VarietyId::ALL {
            for b in VarietyId::ALL {
                if a != b && a.leq(b) {
                    assert!(!b.leq(a), "{a} {b}");
                }
                for c in VarietyId::ALL {
                    if a.leq(b) && b.leq(c) {
                        assert!(a.leq(c));
                    }
                }
            }
        }
    }

    #[test]
    fn identity_text_format() {
        let id = Identity::parse("x^2 y ≈ x y x").unwrap();
        assert_eq!(id.to_string(), "x^2 y = x y x");
        assert_eq!(id.pretty(), "x²y ≈ xyx");
        let named = Identity::parse("phi1: x y x = x y x^2").unwrap();
        assert_eq!(named.name.as_deref(), Some("phi1"));
        assert!(Identity::parse("x y x").is_err());
        assert!(Identity::parse("x = y = z").is_err());
        let err = Identity::parse("x = y Q").unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
    }

    #[test]
    fn system_text_round_trip() {
        let sys = basis(VarietyId::H, 1);
        let again = IdentitySystem::parse("H", &sys.to_text()).unwrap();
        assert_eq!(again, sys);
        let text = "# comment\nx y = y x # trailing\n\nx^2 = x^3\n";
        let s = IdentitySystem::parse("s", text).unwrap();
        assert_eq!(s.len(), 2);
        let err = IdentitySystem::parse("s", "x = x\nx y\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn systems_reject_duplicates() {
        let mut s = IdentitySystem::new("s");
        assert!(s.push(identity("x = y")));
        assert!(!s.push(Identity::named("again", word("x"), word("y"))));
        assert_eq!(s.len(), 1);
    }
}
