mod common;

use common::*;
use niltri_core::eto::apply_step;
use niltri_core::hom::{key_eq_violation, solve_target};
use niltri_core::{
    apply_sequence, direct_hom_check, iso_search, key_eq_check, Element, Error, IsoSearchOptions,
    Matrix, Morphism, Sltm,
};
use proptest::prelude::*;

/// Two matrices related by a random walk, with the walk's Γ.
fn related() -> impl Strategy<Value = (Sltm, Sltm, Matrix)> {
    (sltm_strategy(1..=5), any::<u64>()).prop_map(|(t, seed)| {
        let mut rng = rng(seed);
        let mut cur = t.clone();
        let mut steps = Vec::new();
        for _ in 0..3 {
            let step = random_step(&mut rng, &cur);
            cur = apply_step(&cur, &step).unwrap();
            steps.push(step);
        }
        let (end, seq) = apply_sequence(&t, &steps).unwrap();
        (t, end, seq.gamma)
    })
}

fn unrelated() -> impl Strategy<Value = (Sltm, Sltm, Matrix)> {
    (field_strategy(), 1usize..=4, 1usize..=4, any::<u64>()).prop_map(|(field, n, m, seed)| {
        let mut rng = rng(seed);
        let t = random_sltm(&mut rng, n, field, 0.6);
        let s = random_sltm(&mut rng, m, field, 0.6);
        let g = random_matrix(&mut rng, m, n, field);
        (t, s, g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oracles_agree_on_related((t, s, g) in related()) {
        prop_assert!(key_eq_check(&t, &s, &g).unwrap());
        prop_assert!(direct_hom_check(&t, &s, &g).unwrap());
    }

    #[test]
    fn oracles_agree_on_unrelated((t, s, g) in unrelated()) {
        prop_assert_eq!(key_eq_check(&t, &s, &g).unwrap(), direct_hom_check(&t, &s, &g).unwrap());
    }

    #[test]
    fn perturbation_is_caught((t, s, g) in related(), i in 1usize..=5, j in 1usize..=5) {
        let n = t.n();
        let (i, j) = ((i - 1) % n + 1, (j - 1) % n + 1);
        let mut bent = g.clone();
        bent.set(i, j, bent.get(i, j) + &t.field().one());
        prop_assert_eq!(key_eq_check(&t, &s, &bent).unwrap(), direct_hom_check(&t, &s, &bent).unwrap());
        prop_assert_eq!(key_eq_violation(&t, &s, &bent).unwrap().is_none(), key_eq_check(&t, &s, &bent).unwrap());
    }

    #[test]
    fn solved_target_is_a_homomorphism((t, _s, g) in related()) {
        if let Some(s) = solve_target(&t, &g).unwrap() {
            prop_assert!(key_eq_check(&t, &s, &g).unwrap());
        }
    }

    #[test]
    fn morphisms_compose_and_invert((t, s, g) in related()) {
        let m = Morphism::new(t.clone(), s.clone(), g).unwrap();
        prop_assert!(m.is_iso());
        let inv = m.invert().unwrap();
        prop_assert!(inv.is_iso());
        let round = inv.compose(&m).unwrap();
        prop_assert_eq!(round.gamma(), &Matrix::identity(t.n(), t.field()));
        let alg = niltri_core::Algebra::new(t.clone()).unwrap();
        let x = Element::generator(&alg, t.n()).unwrap();
        let y = m.apply(&(&x * &x)).unwrap();
        let yx = m.apply(&x).unwrap();
        prop_assert_eq!(y, &yx * &yx);
    }
}

#[test]
fn search_finds_walk_partners() {
    let mut rng = rng(21);
    for _ in 0..25 {
        let t = random_sltm(&mut rng, 4, f(3), 0.6);
        let mut cur = t.clone();
        for _ in 0..3 {
            let step = random_step(&mut rng, &cur);
            cur = apply_step(&cur, &step).unwrap();
        }
        let r = iso_search(&t, &cur, &IsoSearchOptions::default()).unwrap();
        let m = r.found().expect("walk endpoints are isomorphic");
        assert!(direct_hom_check(&t, &cur, m.gamma()).unwrap());
    }
}

#[test]
fn search_is_independent_of_jobs() {
    let mut rng = rng(22);
    for _ in 0..10 {
        let t = random_sltm(&mut rng, 4, f(3), 0.6);
        let s = random_sltm(&mut rng, 4, f(3), 0.6);
        let one = iso_search(&t, &s, &IsoSearchOptions::default()).unwrap();
        let many = iso_search(&t, &s, &IsoSearchOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(one.found().map(|m| m.gamma().clone()), many.found().map(|m| m.gamma().clone()));
        assert_eq!(one.is_exhausted(), many.is_exhausted());
    }
}

#[test]
fn unverified_maps_are_refused() {
    let t = Sltm::b_matrix(3, 2, f(3)).unwrap();
    let z = Sltm::zero(3, f(3));
    let m = Morphism::new(z.clone(), t, Matrix::identity(3, f(3))).unwrap();
    assert!(!m.is_hom());
    let alg = niltri_core::Algebra::new(z).unwrap();
    assert_eq!(m.apply(&Element::one(&alg)).unwrap_err(), Error::UnverifiedMorphism);
}
