//! Word problems for the varieties of L(J).
//!
//! Everything up to `F ∨ ←E` is decided by comparing letter classes and the
//! dividers `h_1`, `h_2`, `t` of both sides. For H, I and J the answer is
//! three-valued: a failed necessary condition or a template argument
//! refutes, a bounded derivation from the (truncated) basis confirms, and
//! otherwise the bounds that were exhausted are reported.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::identity::{basis, Identity, VarietyId};
use crate::rewrite::{derive, Bounds, DeriveOutcome, Derivation};
use crate::word::{Letter, Word};

/// Why a criterion rejected an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    Content,
    Simple,
    Multiple,
    /// `min(occ, 2)` differs at a letter.
    CappedCount(Letter),
    SimpleOrder,
    H1(Letter),
    H2(Letter),
    Last(Letter),
    /// Found on the reversed identity.
    Dual(Box<Mismatch>),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Content => write!(f, "content mismatch"),
            Mismatch::Simple => write!(f, "simple-letter sets differ"),
            Mismatch::Multiple => write!(f, "multiple-letter sets differ"),
            Mismatch::CappedCount(x) => write!(f, "occurrence count (capped at 2) mismatch at {x}"),
            Mismatch::SimpleOrder => write!(f, "simple letters occur in a different order"),
            Mismatch::H1(x) => write!(f, "h_1 mismatch at {x}"),
            Mismatch::H2(x) => write!(f, "h_2 mismatch at {x}"),
            Mismatch::Last(x) => write!(f, "t mismatch at {x}"),
            Mismatch::Dual(m) => write!(f, "{m} in the reversed identity"),
        }
    }
}

/// Letter classes and the dividers `h_1`, `h_2`, `t` of every letter,
/// compared across words by divider name.
struct Profile {
    simple: BTreeSet<Letter>,
    multiple: BTreeSet<Letter>,
    h1: BTreeMap<Letter, Option<Letter>>,
    h2: BTreeMap<Letter, Option<Letter>>,
    last: BTreeMap<Letter, Option<Letter>>,
}

impl Profile {
    fn of(w: &Word) -> Profile {
        let counts = w.counts();
        let mut h1 = BTreeMap::new();
        let mut h2 = BTreeMap::new();
        let mut last = BTreeMap::new();
        let mut seen: BTreeMap<Letter, usize> = BTreeMap::new();
        let mut divider: Option<Letter> = None;
        for &x in w.letters() {
            let k = {
                let e = seen.entry(x).or_insert(0);
                *e += 1;
                *e
            };
            if k == 1 {
                h1.insert(x, divider);
            }
            if k == 2 {
                h2.insert(x, divider);
            }
            if k == counts[&x] {
                last.insert(x, divider);
            }
            if counts[&x] == 1 {
                divider = Some(x);
            }
        }
        Profile {
            simple: counts.iter().filter(|&(_, &n)| n == 1).map(|(&x, _)| x).collect(),
            multiple: counts.iter().filter(|&(_, &n)| n >= 2).map(|(&x, _)| x).collect(),
            h1,
            h2,
            last,
        }
    }
}

fn first_difference(
    a: &BTreeMap<Letter, Option<Letter>>,
    b: &BTreeMap<Letter, Option<Letter>>,
) -> Option<Letter> {
    a.iter().find(|(x, d)| b.get(x) != Some(d)).map(|(&x, _)| x)
}

/// Checks the E conditions, then optionally `h_2` and `t`.
fn divider_conditions(id: &Identity, with_h2: bool, with_last: bool) -> Result<(), Mismatch> {
    if id.is_trivial() {
        return Ok(());
    }
    let (u, v) = (Profile::of(&id.lhs), Profile::of(&id.rhs));
    if u.simple != v.simple {
        return Err(Mismatch::Simple);
    }
    if u.multiple != v.multiple {
        return Err(Mismatch::Multiple);
    }
    if let Some(x) = first_difference(&u.h1, &v.h1) {
        return Err(Mismatch::H1(x));
    }
    if with_h2 {
        if let Some(x) = first_difference(&u.h2, &v.h2) {
            return Err(Mismatch::H2(x));
        }
    }
    if with_last {
        if let Some(x) = first_difference(&u.last, &v.last) {
            return Err(Mismatch::Last(x));
        }
    }
    Ok(())
}

pub fn check_e(id: &Identity) -> Result<(), Mismatch> {
    divider_conditions(id, false, false)
}

pub fn check_f(id: &Identity) -> Result<(), Mismatch> {
    divider_conditions(id, true, false)
}

pub fn check_dual_e(id: &Identity) -> Result<(), Mismatch> {
    check_e(&id.reversed()).map_err(|m| Mismatch::Dual(Box::new(m)))
}

pub fn check_f_join_dual_e(id: &Identity) -> Result<(), Mismatch> {
    divider_conditions(id, true, true)
}

pub fn holds_in_e(id: &Identity) -> bool {
    check_e(id).is_ok()
}

pub fn holds_in_f(id: &Identity) -> bool {
    check_f(id).is_ok()
}

pub fn holds_in_dual_e(id: &Identity) -> bool {
    check_dual_e(id).is_ok()
}

pub fn holds_in_f_join_dual_e(id: &Identity) -> bool {
    check_f_join_dual_e(id).is_ok()
}

/// Necessary condition for every variety containing `F ∨ ←E`, in particular
/// for H, I and J.
pub fn necessary_filter(id: &Identity) -> bool {
    holds_in_f_join_dual_e(id)
}

/// Criterion for the varieties below `F ∨ ←E` not covered above.
pub fn check_small(v: VarietyId, id: &Identity) -> Result<(), Mismatch> {
    if id.is_trivial() {
        return Ok(());
    }
    let (u, w) = (&id.lhs, &id.rhs);
    match v {
        VarietyId::T => Ok(()),
        VarietyId::Sl => {
            if u.content() == w.content() {
                Ok(())
            } else {
                Err(Mismatch::Content)
            }
        }
        VarietyId::C => {
            let (cu, cw) = (u.counts(), w.counts());
            let capped = |m: &BTreeMap<Letter, usize>, x: &Letter| m.get(x).copied().unwrap_or(0).min(2);
            match id.content().into_iter().find(|x| capped(&cu, x) != capped(&cw, x)) {
                Some(x) => Err(Mismatch::CappedCount(x)),
                None => Ok(()),
            }
        }
        VarietyId::D => {
            let (cu, cw) = (u.classes(), w.classes());
            if cu.multiple() != cw.multiple() {
                return Err(Mismatch::Multiple);
            }
            if u.project(&cu.simple()) != w.project(&cw.simple()) {
                return Err(if cu.simple() == cw.simple() { Mismatch::SimpleOrder } else { Mismatch::Simple });
            }
            Ok(())
        }
        VarietyId::EJoinDualE => check_e(id).and_then(|_| check_dual_e(id)),
        VarietyId::E => check_e(id),
        VarietyId::DualE => check_dual_e(id),
        VarietyId::F => check_f(id),
        VarietyId::FJoinDualE => check_f_join_dual_e(id),
        VarietyId::H | VarietyId::I | VarietyId::J => {
            panic!("{v} has no decision criterion")
        }
    }
}

/// Word problem for T, SL, C, D and E ∨ ←E (and, for convenience, any other
/// decidable variety).
pub fn holds_in_small(v: VarietyId, id: &Identity) -> bool {
    check_small(v, id).is_ok()
}

/// Decided verdict for any variety below H.
pub fn check_decidable(v: VarietyId, id: &Identity) -> Result<(), Mismatch> {
    check_small(v, id)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "Holds",
            Verdict::Fails => "Fails",
            Verdict::Unknown => "Unknown",
        })
    }
}

/// The words `xzyx^p ty^q` (J), `yx^p ty^q` (I), `xyzx^p ty^q` (H): an
/// identity with one side of this shape holds only if the other side has
/// the same shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Template(VarietyId);

/// Roles in template order: `x`, `z`, `y`, `t` for J and H; `x`, `y`, `t` for I.
type Roles = Vec<Letter>;

impl Template {
    pub fn of(v: VarietyId) -> Option<Template> {
        matches!(v, VarietyId::H | VarietyId::I | VarietyId::J).then_some(Template(v))
    }

    pub fn variety(&self) -> VarietyId {
        self.0
    }

    pub fn describe(&self) -> &'static str {
        match self.0 {
            VarietyId::J => "x z y x^p t y^q",
            VarietyId::I => "y x^p t y^q",
            _ => "x y z x^p t y^q",
        }
    }

    /// Run pattern as (role index, exponent fixed to 1?).
    fn runs(&self) -> &'static [(usize, bool)] {
        // roles: 0 = x, 1 = z, 2 = y, 3 = t
        match self.0 {
            VarietyId::J => &[(0, true), (1, true), (2, true), (0, false), (3, true), (2, false)],
            VarietyId::I => &[(2, true), (0, false), (3, true), (2, false)],
            _ => &[(0, true), (2, true), (1, true), (0, false), (3, true), (2, false)],
        }
    }

    fn role_count(&self) -> usize {
        if self.0 == VarietyId::I {
            3
        } else {
            4
        }
    }

    /// Letters playing `x, z, y, t` if `w` has the template shape.
    pub fn roles(&self, w: &Word) -> Option<[Option<Letter>; 4]> {
        let runs = w.runs();
        let pattern = self.runs();
        if runs.len() != pattern.len() {
            return None;
        }
        let mut roles: [Option<Letter>; 4] = [None; 4];
        for (&(x, k), &(role, single)) in runs.iter().zip(pattern) {
            if single && k != 1 {
                return None;
            }
            match roles[role] {
                Some(y) if y != x => return None,
                Some(_) => {}
                None => {
                    if roles.iter().flatten().any(|&y| y == x) {
                        return None;
                    }
                    roles[role] = Some(x);
                }
            }
        }
        Some(roles)
    }

    /// Whether `w` has the template shape with exactly the given role letters.
    pub fn fits(&self, w: &Word, roles: &[Option<Letter>; 4]) -> bool {
        self.roles(w).as_ref() == Some(roles)
    }

    /// Some side has the shape and the other does not (with the same letters).
    pub fn refutes(&self, id: &Identity) -> bool {
        for (a, b) in [(&id.lhs, &id.rhs), (&id.rhs, &id.lhs)] {
            if let Some(r) = self.roles(a) {
                if !self.fits(b, &r) {
                    return true;
                }
            }
        }
        false
    }

    /// A set of letters whose projection of `id` is refuted, if any.
    pub fn refuting_projection(&self, id: &Identity) -> Option<Roles> {
        if id.is_trivial() {
            return None;
        }
        if self.refutes(id) {
            return Some(id.content().into_iter().collect());
        }
        let content: Vec<Letter> = id.content().into_iter().collect();
        let k = self.role_count();
        if content.len() <= k || content.len() > 16 {
            return None;
        }
        let mut found = None;
        for_each_subset(&content, k, &mut |subset| {
            if found.is_some() {
                return;
            }
            let keep: BTreeSet<Letter> = subset.iter().copied().collect();
            let proj = Identity::new(id.lhs.project(&keep), id.rhs.project(&keep));
            if self.refutes(&proj) {
                found = Some(subset.to_vec());
            }
        });
        found
    }
}

fn for_each_subset(items: &[Letter], k: usize, f: &mut impl FnMut(&[Letter])) {
    fn rec(items: &[Letter], k: usize, start: usize, cur: &mut Vec<Letter>, f: &mut impl FnMut(&[Letter])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::new(), f);
}

/// Supporting evidence for a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Trivial,
    /// A decision criterion accepted.
    Criterion(VarietyId),
    /// A decision criterion rejected (the necessary condition, for H, I, J).
    Mismatch { criterion: VarietyId, mismatch: Mismatch },
    /// The template of `template` refutes the projection onto `letters`.
    Template { template: VarietyId, letters: Vec<Letter> },
    /// Derived from the basis of `system` (truncated at `trunc` for J).
    Derived { system: VarietyId, trunc: usize, derivation: Derivation },
    /// Follows from the verdict at another variety.
    Inferred { from: VarietyId },
    /// No verdict within the bounds.
    Exhausted { bounds: Bounds, trunc: usize },
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Trivial => write!(f, "trivial identity"),
            Evidence::Criterion(v) => write!(f, "word-problem criterion for {v}"),
            Evidence::Mismatch { criterion, mismatch } => write!(f, "{mismatch} ({criterion} criterion)"),
            Evidence::Template { template, letters } => {
                let t = Template(*template);
                let names: Vec<String> = letters.iter().map(|x| x.to_string()).collect();
                write!(f, "template {} refuter for {template} on letters {{{}}}", t.describe(), names.join(", "))
            }
            Evidence::Derived { system, trunc, derivation } => {
                if *system == VarietyId::J {
                    write!(f, "derived from basis(J, {trunc}) in {} step(s)", derivation.len())
                } else {
                    write!(f, "derived from basis({system}) in {} step(s)", derivation.len())
                }
            }
            Evidence::Inferred { from } => write!(f, "inferred from the verdict at {from}"),
            Evidence::Exhausted { bounds, trunc } => {
                write!(f, "no verdict within {bounds}, J basis truncated at n ≤ {trunc}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoldsStatus {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl HoldsStatus {
    fn holds(evidence: Evidence) -> HoldsStatus {
        HoldsStatus { verdict: Verdict::Holds, evidence }
    }

    fn fails(evidence: Evidence) -> HoldsStatus {
        HoldsStatus { verdict: Verdict::Fails, evidence }
    }
}

fn decided(v: VarietyId, id: &Identity) -> HoldsStatus {
    if id.is_trivial() {
        return HoldsStatus::holds(Evidence::Trivial);
    }
    match check_decidable(v, id) {
        Ok(()) => HoldsStatus::holds(Evidence::Criterion(v)),
        Err(mismatch) => HoldsStatus::fails(Evidence::Mismatch { criterion: v, mismatch }),
    }
}

const SEMI_DECIDED: [VarietyId; 3] = [VarietyId::H, VarietyId::I, VarietyId::J];

/// Three-valued word problem for H, I, J.
///
/// Refuters are tried for every semi-decided variety below `v` and
/// derivations from the bases of `v` and everything above it, since a
/// failure below or a proof above settles `v`.
pub fn status_hij(v: VarietyId, id: &Identity, b: &Bounds, trunc: usize) -> HoldsStatus {
    assert!(!v.is_decidable(), "status_hij is for H, I, J");
    if id.is_trivial() {
        return HoldsStatus::holds(Evidence::Trivial);
    }
    if let Err(mismatch) = check_f_join_dual_e(id) {
        return HoldsStatus::fails(Evidence::Mismatch { criterion: VarietyId::FJoinDualE, mismatch });
    }
    for w in SEMI_DECIDED.into_iter().filter(|w| w.leq(v)) {
        let t = Template(w);
        if let Some(letters) = t.refuting_projection(id) {
            return HoldsStatus::fails(Evidence::Template { template: w, letters });
        }
    }
    for w in SEMI_DECIDED.into_iter().filter(|&w| v.leq(w)) {
        let sys = basis(w, trunc);
        if let DeriveOutcome::Found(derivation) = derive(&id.lhs, &id.rhs, &sys, b) {
            return HoldsStatus::holds(Evidence::Derived { system: w, trunc, derivation });
        }
    }
    HoldsStatus { verdict: Verdict::Unknown, evidence: Evidence::Exhausted { bounds: *b, trunc } }
}

/// Status at one variety.
pub fn status(v: VarietyId, id: &Identity, b: &Bounds, trunc: usize) -> HoldsStatus {
    if v.is_decidable() {
        decided(v, id)
    } else {
        status_hij(v, id, b, trunc)
    }
}

/// Per-variety verdicts for one identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub identity: Identity,
    pub trunc: usize,
    pub bounds: Bounds,
    pub statuses: BTreeMap<VarietyId, HoldsStatus>,
}

impl Classification {
    pub fn verdict(&self, v: VarietyId) -> Verdict {
        self.statuses[&v].verdict
    }

    /// Pairs `(V, W)` with `V ⊆ W`, Holds at W and not Holds at V.
    pub fn antitonicity_violations(&self) -> Vec<(VarietyId, VarietyId)> {
        let mut out = Vec::new();
        for v in VarietyId::ALL {
            for w in VarietyId::ALL {
                if v != w && v.leq(w) && self.verdict(w) == Verdict::Holds && self.verdict(v) != Verdict::Holds {
                    out.push((v, w));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut verdicts = serde_json::Map::new();
        let mut evidence = serde_json::Map::new();
        for (v, s) in &self.statuses {
            verdicts.insert(v.token().to_string(), serde_json::json!(s.verdict));
            evidence.insert(v.token().to_string(), serde_json::json!(s.evidence.to_string()));
        }
        serde_json::json!({
            "identity": self.identity.to_string(),
            "trunc": self.trunc,
            "bounds": self.bounds,
            "verdicts": verdicts,
            "evidence": evidence,
        })
    }
}

/// Classifies `id` against all twelve varieties.
pub fn classify(id: &Identity, b: &Bounds, trunc: usize) -> Classification {
    let mut statuses: BTreeMap<VarietyId, HoldsStatus> = VarietyId::ALL
        .into_iter()
        .filter(|v| v.is_decidable())
        .map(|v| (v, decided(v, id)))
        .collect();
    let upper: Vec<(VarietyId, HoldsStatus)> = SEMI_DECIDED
        .into_iter()
        .map(|v| (v, status_hij(v, id, b, trunc)))
        .collect();
    statuses.extend(upper);
    // Holds propagates down and Fails up along the chain H ⊂ I ⊂ J.
    for v in SEMI_DECIDED {
        if statuses[&v].verdict != Verdict::Unknown {
            continue;
        }
        let above = SEMI_DECIDED
            .into_iter()
            .find(|&w| w != v && v.leq(w) && statuses[&w].verdict == Verdict::Holds);
        let below = SEMI_DECIDED
            .into_iter()
            .find(|&w| w != v && w.leq(v) && statuses[&w].verdict == Verdict::Fails);
        if let Some(w) = above {
            statuses.insert(v, HoldsStatus::holds(Evidence::Inferred { from: w }));
        } else if let Some(w) = below {
            statuses.insert(v, HoldsStatus::fails(Evidence::Inferred { from: w }));
        }
    }
    Classification { identity: id.clone(), trunc, bounds: *b, statuses }
}
