mod common;

use common::*;
use niltri_core::eto::{admissible_moves, apply_step, format_steps, parse_steps, step_gamma};
use niltri_core::hom::solve_target;
use niltri_core::{
    apply_sequence, direct_hom_check, eto_equiv_search, is_isomorphism, EtoStep, Sltm,
};
use proptest::prelude::*;

/// A start matrix and a seed for drawing admissible steps from it.
fn walk() -> impl Strategy<Value = (Sltm, Vec<EtoStep>)> {
    (sltm_strategy(2..=6), any::<u64>(), 1usize..=6).prop_map(|(t, seed, len)| {
        let mut rng = rng(seed);
        let mut cur = t.clone();
        let mut steps = Vec::new();
        for _ in 0..len {
            let step = random_step(&mut rng, &cur);
            cur = apply_step(&cur, &step).unwrap();
            steps.push(step);
        }
        (t, steps)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sequences_are_isomorphisms((t, steps) in walk()) {
        let (end, seq) = apply_sequence(&t, &steps).unwrap();
        prop_assert!(is_isomorphism(&t, &end, &seq.gamma).unwrap());
        prop_assert!(direct_hom_check(&t, &end, &seq.gamma).unwrap());
    }

    #[test]
    fn inverse_sequence_returns((t, steps) in walk()) {
        let (end, seq) = apply_sequence(&t, &steps).unwrap();
        let back: Vec<EtoStep> = steps.iter().rev().map(|s| s.inverse().unwrap()).collect();
        let (start, rev) = apply_sequence(&end, &back).unwrap();
        prop_assert_eq!(start, t);
        prop_assert_eq!(rev.gamma.mul(&seq.gamma).unwrap(), niltri_core::Matrix::identity(end.n(), end.field()));
    }

    #[test]
    fn step_image_is_the_solved_target((t, steps) in walk()) {
        let mut cur = t;
        for step in &steps {
            let g = step_gamma(step, cur.n(), cur.field()).unwrap();
            let next = apply_step(&cur, step).unwrap();
            prop_assert_eq!(solve_target(&cur, &g).unwrap(), Some(next.clone()));
            cur = next;
        }
    }

    #[test]
    fn step_text_round_trip((t, steps) in walk()) {
        let text = format_steps(&steps);
        prop_assert_eq!(parse_steps(t.field(), &text).unwrap(), steps.clone());
        for s in &steps {
            prop_assert_eq!(&EtoStep::from_json_value(t.field(), &s.to_json_value()).unwrap(), s);
        }
    }
}

#[test]
fn every_admissible_move_is_sound_on_small_fields() {
    for t in Sltm::enumerate(3, f(3)).unwrap() {
        for (step, s) in admissible_moves(&t).unwrap() {
            let g = step_gamma(&step, 3, f(3)).unwrap();
            assert!(is_isomorphism(&t, &s, &g).unwrap(), "{t:?} {step}");
        }
    }
    let mut rng = rng(11);
    for _ in 0..40 {
        let t = random_sltm(&mut rng, 4, f(5), 0.5);
        for (step, s) in admissible_moves(&t).unwrap() {
            let g = step_gamma(&step, 4, f(5)).unwrap();
            assert!(is_isomorphism(&t, &s, &g).unwrap(), "{t:?} {step}");
        }
    }
}

#[test]
fn equivalence_search_recovers_random_walks() {
    let mut rng = rng(12);
    for _ in 0..30 {
        let t = random_sltm(&mut rng, 4, f(3), 0.5);
        let mut cur = t.clone();
        for _ in 0..2 {
            let step = random_step(&mut rng, &cur);
            cur = apply_step(&cur, &step).unwrap();
        }
        let res = eto_equiv_search(&t, &cur, 2).unwrap();
        let path = res.path.expect("two-step walk is within depth 2");
        assert!(path.len() <= 2);
        assert_eq!(apply_sequence(&t, &path).unwrap().0, cur);
    }
}

/// Whenever the transpose of a `Q(r0, k0, β)` matrix is a morphism, five
/// steps reach its target, and the last scaling is by `-1/β`.
#[test]
fn transposed_q_factors_into_five_steps() {
    let mut hits = 0;
    for (n, p) in [(3, 5), (4, 3)] {
        let field = f(p);
        for t in Sltm::enumerate(n, field).unwrap() {
            for r0 in 2..=n {
                for k0 in 1..r0 {
                    for b in 1..p as i64 {
                        let beta = field.from_i64(b);
                        let g = step_gamma(&EtoStep::q(r0, k0, beta.clone()), n, field)
                            .unwrap()
                            .transpose();
                        let Some(s) = solve_target(&t, &g).unwrap() else { continue };
                        let inv = beta.inv().unwrap();
                        let steps = |last: niltri_core::Scalar| {
                            vec![
                                EtoStep::q(r0, k0, inv.clone()),
                                EtoStep::F { r1: k0, r2: r0 },
                                EtoStep::P { r: r0, alpha: beta.clone() },
                                EtoStep::q(r0, k0, field.from_i64(-1)),
                                EtoStep::P { r: k0, alpha: last },
                            ]
                        };
                        let (end, _) = apply_sequence(&t, &steps(-inv.clone())).unwrap();
                        assert_eq!(end, s, "{t:?} r0={r0} k0={k0} β={beta}");
                        let (wrong, _) = apply_sequence(&t, &steps(inv.clone())).unwrap();
                        assert_ne!(wrong, s);
                        if hits % 97 == 0 {
                            let found = eto_equiv_search(&t, &s, 5).unwrap().path;
                            assert!(found.is_some_and(|p| p.len() <= 5));
                        }
                        hits += 1;
                    }
                }
            }
        }
    }
    assert!(hits > 0);
}
