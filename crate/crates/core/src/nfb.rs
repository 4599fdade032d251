//! Shape-preservation experiments behind the non-finite basis argument for J.
//!
//! The closure of `u_n[1, 1, …, 1]` under a truncated basis of J is explored
//! within bounds and every reached word is tested for the `u_n` shape. A
//! word outside the shape would be a possible route to `w_n'[ε]`.

use std::collections::BTreeSet;

use serde_json::json;

use crate::error::ExperimentError;
use crate::identity::{basis, u_word, w_family, IdentitySystem, Permutation, VarietyId};
use crate::oracle::{necessary_filter, Template};
use crate::rewrite::{explore, Bounds, Exploration, Step};
use crate::identity::Identity;
use crate::word::{Letter, Word};

pub const SCOPE_NOTE: &str = "closure under the truncated basis only; identities of J outside it are not enumerated";

/// `w = x z_1⋯z_n x^q ∏ t_i z_i^{m_i}` with `q, m_i ≥ 1` and distinct letters.
pub fn u_shape(w: &Word, n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let runs = w.runs();
    if runs.len() != 3 * n + 2 {
        return false;
    }
    let (x, kx) = runs[0];
    if kx != 1 || runs[n + 1].0 != x {
        return false;
    }
    let mut seen: BTreeSet<Letter> = BTreeSet::from([x]);
    for i in 1..=n {
        let (z, k) = runs[i];
        let (t, kt) = runs[n + 2 * i];
        let (z2, _) = runs[n + 2 * i + 1];
        if k != 1 || kt != 1 || z2 != z || !seen.insert(z) || !seen.insert(t) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    U { n: usize, p: usize, ell: Vec<usize>, m: usize },
    Template { variety: VarietyId, seed: Word },
}

/// A reached word outside the shape, the step that produced it and its source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub word: Word,
    pub from: Word,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeReport {
    pub family: Family,
    pub system: String,
    pub trunc: usize,
    pub bounds: Bounds,
    pub violations: Vec<Violation>,
    pub reachable_count: usize,
    /// Words reached that fail the necessary filter against the seed.
    pub filter_failures: Vec<Word>,
    /// For `u_n` runs, `w_n'[ε]` and the depth at which it was reached.
    pub target: Option<(Word, Option<usize>)>,
    /// Whether the depth bound cut the exploration off.
    pub truncated: bool,
}

impl ShapeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.filter_failures.is_empty()
    }

    pub fn target_reached(&self) -> Option<usize> {
        self.target.as_ref().and_then(|(_, d)| *d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let family = match &self.family {
            Family::U { n, p, ell, m } => json!({"kind": "u", "n": n, "p": p, "ell": ell, "m": m}),
            Family::Template { variety, seed } => json!({
                "kind": "template",
                "variety": variety.token(),
                "template": Template::of(*variety).map(|t| t.describe()),
                "seed": seed,
            }),
        };
        let violations: Vec<_> = self
            .violations
            .iter()
            .map(|v| json!({"word": v.word, "from": v.from, "step": v.step}))
            .collect();
        json!({
            "family": family,
            "system": self.system,
            "trunc": self.trunc,
            "bounds": self.bounds,
            "violations": violations,
            "reachable_count": self.reachable_count,
            "filter_failures": self.filter_failures,
            "target": self.target.as_ref().map(|(w, _)| w),
            "target_reached_at": self.target_reached(),
            "truncated": self.truncated,
            "scope": SCOPE_NOTE,
            "passed": self.passed(),
        })
    }
}

fn run(
    seed: &Word,
    sys: &IdentitySystem,
    b: &Bounds,
    in_shape: impl Fn(&Word) -> bool,
) -> (Exploration, Vec<Violation>, Vec<Word>) {
    let ex = explore(seed, sys, b);
    let mut violations = Vec::new();
    let mut filter_failures = Vec::new();
    for (w, (_, link)) in &ex.reached {
        if !in_shape(w) {
            if let Some((from, step)) = link {
                violations.push(Violation { word: w.clone(), from: from.clone(), step: step.clone() });
            }
        }
        if !necessary_filter(&Identity::new(seed.clone(), w.clone())) {
            filter_failures.push(w.clone());
        }
    }
    (ex, violations, filter_failures)
}

/// Closure of `u_n[1, 1…1]` (the left side of `w_n[ε]`) under `basis(J, m)`.
///
/// For `m < n` the basis has no `w_n` pair and the question is whether the
/// shape is left at all; for `m ≥ n` the target is one step away.
pub fn shape_experiment(n: usize, m: usize, b: &Bounds) -> Result<ShapeReport, ExperimentError> {
    if n == 0 || m == 0 {
        return Err(ExperimentError::BadParameters { n, m });
    }
    let ell = vec![1; n];
    let seed = u_word(n, 1, &ell).map_err(|_| ExperimentError::BadParameters { n, m })?;
    let target = w_family(n, &Permutation::identity(n))
        .map_err(|_| ExperimentError::BadParameters { n, m })?
        .rhs;
    let sys = basis(VarietyId::J, m);
    let (ex, violations, filter_failures) = run(&seed, &sys, b, |w| u_shape(w, n));
    let reached_at = ex.reached.get(&target).map(|(d, _)| *d);
    Ok(ShapeReport {
        family: Family::U { n, p: 1, ell, m },
        system: sys.name.clone(),
        trunc: m,
        bounds: *b,
        violations,
        reachable_count: ex.reached.len(),
        filter_failures,
        target: Some((target, reached_at)),
        truncated: ex.truncated,
    })
}

/// Closure of a template instance under `basis(v, trunc)`; every reached
/// word must keep the template shape on the same letters.
pub fn template_experiment(v: VarietyId, seed: &Word, b: &Bounds, trunc: usize) -> Result<ShapeReport, ExperimentError> {
    let template = Template::of(v).ok_or(ExperimentError::NoTemplate)?;
    let roles = template.roles(seed).ok_or_else(|| ExperimentError::SeedNotTemplate {
        seed: seed.to_string(),
        template: template.describe().to_string(),
    })?;
    let sys = basis(v, trunc);
    let (ex, violations, filter_failures) = run(seed, &sys, b, |w| template.fits(w, &roles));
    Ok(ShapeReport {
        family: Family::Template { variety: v, seed: seed.clone() },
        system: sys.name.clone(),
        trunc,
        bounds: *b,
        violations,
        reachable_count: ex.reached.len(),
        filter_failures,
        target: None,
        truncated: ex.truncated,
    })
}

/// Default bounds: length of the seed plus 6, depth 4.
pub fn default_bounds(seed: &Word) -> Bounds {
    Bounds::new(4, seed.len() + 6)
}
