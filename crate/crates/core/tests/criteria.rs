//! The C and D criteria against derivations from the bases and the models.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use varietal::models::model_refutation;
use varietal::oracle::holds_in_small;
use varietal::{basis, derive, Bounds, DeriveOutcome, Identity, VarietyId};

use common::{letters, random_identity};

const PROOF_BOUNDS: Bounds = Bounds { max_steps: 8, max_len: 9 };
const SEARCH_BOUNDS: Bounds = Bounds { max_steps: 4, max_len: 8 };

fn sample(v: VarietyId, positive: bool, seed: u64) -> Vec<Identity> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = letters(&["x", "y", "z"]);
    let mut out = Vec::new();
    while out.len() < 200 {
        let id = random_identity(&mut rng, &alphabet, 5);
        if !id.is_trivial() && holds_in_small(v, &id) == positive {
            out.push(id);
        }
    }
    out
}

fn positives_are_derivable(v: VarietyId, seed: u64) {
    let sys = basis(v, 0);
    for id in sample(v, true, seed) {
        match derive(&id.lhs, &id.rhs, &sys, &PROOF_BOUNDS) {
            DeriveOutcome::Found(d) => assert!(d.verify(&sys).is_ok()),
            DeriveOutcome::NotFound { .. } => panic!("{v}: no derivation of {}", id.pretty()),
        }
    }
}

fn negatives_are_refuted(v: VarietyId, seed: u64) {
    let sys = basis(v, 0);
    for id in sample(v, false, seed) {
        assert!(model_refutation(v, &id).is_some(), "{v}: no model refutes {}", id.pretty());
        assert!(derive(&id.lhs, &id.rhs, &sys, &SEARCH_BOUNDS).derivation().is_none());
    }
}

#[test]
fn c_positives() {
    positives_are_derivable(VarietyId::C, 31);
}

#[test]
fn c_negatives() {
    negatives_are_refuted(VarietyId::C, 32);
}

#[test]
fn d_positives() {
    positives_are_derivable(VarietyId::D, 41);
}

#[test]
fn d_negatives() {
    negatives_are_refuted(VarietyId::D, 42);
}

#[test]
fn sl_and_t() {
    assert!(holds_in_small(VarietyId::T, &varietal::identity("x = y^3")));
    positives_are_derivable(VarietyId::Sl, 51);
    negatives_are_refuted(VarietyId::Sl, 52);
}
