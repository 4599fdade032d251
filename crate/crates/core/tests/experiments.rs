use varietal::nfb::default_bounds;
use varietal::{shape_experiment, template_experiment, u_word, word, Bounds, VarietyId};

#[test]
fn target_is_one_step_away_once_the_basis_contains_it() {
    for n in 1..=3 {
        for m in n..=3 {
            let seed = u_word(n, 1, &vec![1; n]).unwrap();
            let r = shape_experiment(n, m, &Bounds::new(2, seed.len() + 2)).unwrap();
            assert_eq!(r.target_reached(), Some(1), "n={n}, m={m}");
        }
    }
}

#[test]
fn truncated_bases_keep_the_shape() {
    for (n, m) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        let seed = u_word(n, 1, &vec![1; n]).unwrap();
        let r = shape_experiment(n, m, &default_bounds(&seed)).unwrap();
        assert!(r.passed(), "n={n}, m={m}: {:?}", r.violations.first());
        assert_eq!(r.target_reached(), None);
    }
}

#[test]
fn reports_are_deterministic() {
    let b = Bounds::new(3, 16);
    assert_eq!(shape_experiment(3, 2, &b).unwrap(), shape_experiment(3, 2, &b).unwrap());
    let seed = word("x z y x t y");
    assert_eq!(
        template_experiment(VarietyId::J, &seed, &b, 2).unwrap().to_json(),
        template_experiment(VarietyId::J, &seed, &b, 2).unwrap().to_json()
    );
}

#[test]
fn template_closures_stay_in_the_template() {
    for (v, seed) in [
        (VarietyId::J, "x z y x^2 t y"),
        (VarietyId::I, "y x t y"),
        (VarietyId::I, "y x^2 t y^2"),
        (VarietyId::H, "x y z x t y^2"),
    ] {
        let seed = word(seed);
        let r = template_experiment(v, &seed, &default_bounds(&seed), 3).unwrap();
        assert!(r.passed(), "{v} from {seed}: {:?}", r.violations.first());
        assert!(r.reachable_count > 1);
    }
}
