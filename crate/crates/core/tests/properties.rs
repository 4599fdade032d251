mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use varietal::models::{model_refutation, refuter_models};
use varietal::oracle::{
    check_small, holds_in_dual_e, holds_in_e, holds_in_f, holds_in_f_join_dual_e, holds_in_small,
};
use varietal::rewrite::Direction;
use varietal::{
    b0_monoid, basis, classify, one_step, satisfies, Bounds, Derivation, Identity, IdentitySystem, Letter, VarietyId,
    Verdict, Word,
};

use common::{all_words, letters};

const NAMES: [&str; 5] = ["x", "y", "z", "t", "s"];

fn word_over(k: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..k, 0..=max_len)
        .prop_map(|v| v.into_iter().map(|i| varietal::letter(NAMES[i])).collect())
}

fn identity_over(k: usize, max_len: usize) -> impl Strategy<Value = Identity> {
    (word_over(k, max_len), word_over(k, max_len)).prop_map(|(u, v)| Identity::new(u, v))
}

/// Replays a derivation by splicing images letter by letter.
fn replay(d: &Derivation, sys: &IdentitySystem) -> bool {
    let mut cur = d.source.clone();
    for (step, next) in &d.steps {
        let id = &sys.identities()[step.rule_index];
        let (from, to) = match step.direction {
            Direction::LeftToRight => (&id.lhs, &id.rhs),
            Direction::RightToLeft => (&id.rhs, &id.lhs),
        };
        let render = |side: &Word| {
            let mut out: Vec<Letter> = step.prefix.letters().to_vec();
            for x in side.letters() {
                out.extend(step.images.0[x].letters());
            }
            out.extend(step.suffix.letters());
            Word::from_letters(out)
        };
        if render(from) != cur || render(to) != *next {
            return false;
        }
        cur = next.clone();
    }
    true
}

/// The word reached after following the step choices in `picks`.
fn random_walk(u: &Word, sys: &IdentitySystem, picks: &[usize], max_len: usize) -> Derivation {
    let mut d = Derivation::trivial(u.clone());
    let mut cur = u.clone();
    for &p in picks {
        let next: Vec<_> = one_step(&cur, sys).into_iter().filter(|(w, _)| w.len() <= max_len).collect();
        if next.is_empty() {
            break;
        }
        let (w, step) = next[p % next.len()].clone();
        d.steps.push((step, w.clone()));
        cur = w;
    }
    d
}

#[test]
fn decomposition_round_trip_exhaustive() {
    for w in all_words(&letters(&["x", "y", "z"]), 6) {
        let d = w.decompose();
        assert_eq!(d.reassemble(), w);
        let classes = w.classes();
        assert!(d.dividers().iter().all(|x| classes.simple().contains(x)));
        assert!(d.blocks().iter().all(|b| b.letters().iter().all(|x| classes.multiple().contains(x))));
    }
}

proptest! {
    #[test]
    fn h_is_monotone(w in word_over(4, 10)) {
        for (x, n) in w.counts() {
            for i in 1..n {
                prop_assert!(w.h(x, i).unwrap().index() <= w.h(x, i + 1).unwrap().index());
            }
            prop_assert_eq!(w.t_divider(x).unwrap(), w.h(x, n).unwrap());
        }
    }

    #[test]
    fn projection_drops_one_letter(w in word_over(4, 10)) {
        for x in w.content() {
            let mut keep = w.content();
            keep.remove(&x);
            let p = w.project(&keep);
            prop_assert_eq!(p.occurrences(x), 0);
            for y in &keep {
                prop_assert_eq!(p.occurrences(*y), w.occurrences(*y));
            }
        }
    }

    #[test]
    fn reverse_is_an_anti_involution(u in word_over(4, 8), v in word_over(4, 8)) {
        prop_assert_eq!(u.reverse().reverse(), u.clone());
        prop_assert_eq!(u.concat(&v).reverse(), v.reverse().concat(&u.reverse()));
    }

    #[test]
    fn text_round_trip(id in identity_over(5, 8)) {
        let back = Identity::parse(&id.to_string()).unwrap();
        prop_assert_eq!(back, id.clone());
        prop_assert_eq!(Word::parse(&id.lhs.to_string()).unwrap(), id.lhs);
    }

    #[test]
    fn join_coherence_three_letters(id in identity_over(3, 5)) {
        prop_assert_eq!(holds_in_f_join_dual_e(&id), holds_in_f(&id) && holds_in_dual_e(&id));
    }

    #[test]
    fn duality_coherence(id in identity_over(4, 6)) {
        prop_assert_eq!(holds_in_dual_e(&id), holds_in_e(&id.reversed()));
        // The t-based condition together with the F conditions gives ←E.
        if holds_in_f_join_dual_e(&id) {
            prop_assert!(holds_in_dual_e(&id));
        }
    }

    #[test]
    fn satisfaction_respects_renaming(id in identity_over(3, 5), shift in 0usize..3) {
        let rename = |w: &Word| -> Word {
            w.letters()
                .iter()
                .map(|x| {
                    let i = NAMES.iter().position(|n| *n == x.to_string()).unwrap();
                    varietal::letter(NAMES[(i + shift) % 3 + 2])
                })
                .collect()
        };
        let renamed = Identity::new(rename(&id.lhs), rename(&id.rhs));
        for m in refuter_models() {
            prop_assert_eq!(satisfies(&m.monoid, &id).verdict, satisfies(&m.monoid, &renamed).verdict);
        }
    }

    #[test]
    fn witnesses_separate(id in identity_over(3, 5)) {
        let m = b0_monoid();
        let r = satisfies(&m, &id);
        prop_assert_eq!(r.verdict, r.witness.is_none());
        if let Some(w) = r.witness {
            prop_assert_ne!(m.eval(&id.lhs, &w.assignment), m.eval(&id.rhs, &w.assignment));
        }
    }

    #[test]
    fn tagged_models_are_sound(id in identity_over(4, 6)) {
        for m in refuter_models() {
            for &v in &m.tags {
                if v.is_decidable() && holds_in_small(v, &id) {
                    prop_assert!(satisfies(&m.monoid, &id).verdict, "{} in {v} refutes {}", m.name, id.pretty());
                }
            }
        }
    }

    #[test]
    fn b0_agrees_with_oracle(id in identity_over(3, 6)) {
        prop_assert_eq!(holds_in_small(VarietyId::EJoinDualE, &id), satisfies(&b0_monoid(), &id).verdict);
    }

    #[test]
    fn one_step_is_symmetric(u in word_over(3, 5), v_index in 0usize..12) {
        let v = [VarietyId::Sl, VarietyId::C, VarietyId::D, VarietyId::E, VarietyId::DualE, VarietyId::EJoinDualE,
                 VarietyId::F, VarietyId::FJoinDualE, VarietyId::H, VarietyId::I, VarietyId::J, VarietyId::J][v_index];
        let sys = basis(v, 2);
        for w in one_step(&u, &sys).keys() {
            prop_assert!(one_step(w, &sys).contains_key(&u), "{} → {} under {v}", u, w);
        }
    }

    #[test]
    fn walks_replay_and_agree_with_oracles(
        u in word_over(3, 6),
        picks in prop::collection::vec(0usize..1000, 1..5),
        v_index in 0usize..8,
    ) {
        let v = [VarietyId::Sl, VarietyId::C, VarietyId::D, VarietyId::E, VarietyId::DualE, VarietyId::EJoinDualE,
                 VarietyId::F, VarietyId::FJoinDualE][v_index];
        let sys = basis(v, 0);
        let d = random_walk(&u, &sys, &picks, 10);
        prop_assert!(replay(&d, &sys));
        prop_assert!(d.verify(&sys).is_ok());
        let id = Identity::new(u.clone(), d.target().clone());
        prop_assert!(check_small(v, &id).is_ok(), "{v}: {} from a derivation", id.pretty());
    }

    #[test]
    fn classifications_are_antitone(id in identity_over(4, 6)) {
        let c = classify(&id, &Bounds::new(3, 8), 2);
        prop_assert!(c.antitonicity_violations().is_empty());
        for v in VarietyId::ALL.into_iter().filter(|v| v.is_decidable()) {
            prop_assert_ne!(c.verdict(v), Verdict::Unknown);
        }
    }

    #[test]
    fn model_refutations_are_real(id in identity_over(3, 5)) {
        for v in VarietyId::ALL {
            if let Some((m, r)) = model_refutation(v, &id) {
                prop_assert!(!r.verdict);
                prop_assert!(m.lies_in(v));
                if v.is_decidable() {
                    prop_assert!(!holds_in_small(v, &id), "{} refutes {} at {v}", m.name, id.pretty());
                }
            }
        }
    }
}

#[test]
fn every_basis_holds_at_its_variety() {
    for v in VarietyId::ALL {
        for id in basis(v, 3).iter() {
            let c = classify(id, &Bounds::new(1, 14), 3);
            assert_eq!(c.verdict(v), Verdict::Holds, "{} at {v}", id.pretty());
        }
    }
}

#[test]
fn every_family_member_has_the_stated_content() {
    for n in 1..=4 {
        for pi in varietal::Permutation::all(n) {
            let id = varietal::w_family(n, &pi).unwrap();
            let expected: BTreeSet<Letter> = id.lhs.content();
            assert_eq!(id.rhs.content(), expected);
            for side in [&id.lhs, &id.rhs] {
                for (x, k) in side.counts() {
                    let want = if x.base() == 't' { 1 } else { 2 };
                    assert_eq!(k, want, "{x} in {side}");
                }
            }
            if pi.is_identity() {
                assert_eq!(id.lhs, varietal::u_word(n, 1, &vec![1; n]).unwrap());
            }
        }
    }
}
