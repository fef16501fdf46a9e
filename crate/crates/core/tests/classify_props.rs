mod common;

use common::*;
use niltri_core::classify::{
    census, leader_graph, leader_of, zero_class_certificate, zero_class_check, zero_eto_path,
    CensusOptions, Certificate, ClassReport,
};
use niltri_core::eto::{apply_step, step_gamma};
use niltri_core::{
    apply_sequence, direct_hom_check, eto_equiv_search, is_isomorphism, iso_search, key_eq_check,
    Algebra, FieldSpec, IsoSearchOptions, Sltm,
};
use proptest::prelude::*;

/// Matrices in the zero class: random leaders with the remaining entries of
/// each row chosen so that `Δ^(2)` vanishes below the leader.
fn zero_class_member(field: FieldSpec, n: usize) -> impl Strategy<Value = Sltm> {
    let len = n * n.saturating_sub(1) / 2;
    (
        prop::collection::vec(0usize..n.max(1), n),
        prop::collection::vec(-3i64..=3, len),
    )
        .prop_map(move |(picks, vals)| {
            let mut u = Sltm::zero(n, field);
            let mut vals = vals.into_iter().cycle();
            for k in 2..=n {
                // pick 0 leaves the row zero; otherwise the leader column is pick
                let j = picks[k - 1] % k;
                if j == 0 {
                    continue;
                }
                let v = field.from_i64(vals.next().unwrap_or(1));
                let lead = if v.is_zero() { field.one() } else { v };
                u.set(k, j, lead.clone());
                if j == 1 {
                    continue;
                }
                for i in 1..j {
                    let v = -(&lead * &u.get(j, i)).half();
                    u.set(k, i, v);
                }
            }
            u
        })
}

fn zero_member_any() -> impl Strategy<Value = Sltm> {
    (prop_oneof![Just(f(5)), Just(q())], 1usize..=8).prop_flat_map(|(field, n)| zero_class_member(field, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn leader_graph_laws(u in sltm_strategy(1..=8)) {
        let g = leader_graph(&u);
        for &(k, j) in &g.arrows {
            prop_assert!(k > j);
            prop_assert!(!u.entry(k, j).is_zero());
            prop_assert!((j + 1..k).all(|c| u.entry(k, c).is_zero()));
        }
        let mut sources: Vec<usize> = g.arrows.iter().map(|a| a.0).collect();
        sources.dedup();
        prop_assert_eq!(sources.len(), g.arrows.len());
        for v in 1..=u.n() {
            prop_assert_eq!(g.minimal_vertices.contains(&v), u.is_zero_row(v));
            let bottom = g.minimal_below(v);
            prop_assert!(g.minimal_vertices.contains(&bottom));
            let comp = g.components.iter().find(|c| c.contains(&v)).unwrap();
            prop_assert!(comp.contains(&bottom));
            let minimal_in_comp = comp.iter().filter(|w| g.minimal_vertices.contains(w)).count();
            prop_assert_eq!(minimal_in_comp, 1);
            let chain = g.chain_from(v);
            prop_assert_eq!(chain.is_empty(), g.minimal_vertices.contains(&v));
            prop_assert!(chain.windows(2).all(|w| w[0].0 == w[1].1));
        }
        let covered: usize = g.components.iter().map(Vec::len).sum();
        prop_assert_eq!(covered, u.n());
    }

    #[test]
    fn generated_members_pass_the_criterion(u in zero_member_any()) {
        prop_assert!(zero_class_check(&u).holds());
    }

    #[test]
    fn delta_vanishes_off_the_leaders_too(u in zero_member_any()) {
        let two = u.field().from_i64(2);
        for r in 3..=u.n() {
            for c in 2..r {
                if u.entry(r, c).is_zero() || leader_of(&u, r) == Some(c) {
                    continue;
                }
                for i in 1..c {
                    prop_assert!(u.delta(&two, i, c, r).unwrap().is_zero(), "({i},{c},{r}) in {u:?}");
                }
            }
        }
    }

    #[test]
    fn certificates_are_isomorphisms(u in zero_member_any()) {
        let zero = Sltm::zero(u.n(), u.field());
        let m = zero_class_certificate(&u).unwrap();
        prop_assert!(is_isomorphism(&zero, &u, m.gamma()).unwrap());
        let alg = Algebra::new(u.clone()).unwrap();
        for img in niltri_core::hom::generator_images(&alg, m.gamma()).unwrap() {
            prop_assert!((&img * &img).is_zero());
        }
        let path = zero_eto_path(&u).unwrap();
        let nonzero_rows = (1..=u.n()).filter(|&k| !u.is_zero_row(k)).count();
        prop_assert_eq!(path.steps.len(), nonzero_rows);
        let (end, seq) = apply_sequence(&u, &path.steps).unwrap();
        prop_assert!(end.is_zero());
        prop_assert!(key_eq_check(&u, &end, &seq.gamma).unwrap());
    }
}

#[test]
fn criterion_matches_search_on_all_of_tm4_f3() {
    let opts = IsoSearchOptions::default();
    let zero = Sltm::zero(4, f(3));
    let mut members = 0;
    for u in Sltm::enumerate(4, f(3)).unwrap() {
        let found = iso_search(&zero, &u, &opts).unwrap().found().is_some();
        assert_eq!(zero_class_check(&u).holds(), found, "{u:?}");
        members += usize::from(found);
    }
    let report = census(4, f(3), &CensusOptions::default()).unwrap();
    assert_eq!(report.classes[0].representative, zero);
    assert_eq!(report.classes[0].size as usize, members);
}

#[test]
fn census_certificates_check_out() {
    let report = census(4, f(3), &CensusOptions::default()).unwrap();
    assert!(report.complete);
    let n = report.class_count;
    assert_eq!(report.splits.len(), n * (n - 1) / 2);
    assert_eq!(report.classes.iter().map(|c| c.size).sum::<u64>(), 729);
    let mut checked = 0;
    for class in &report.classes {
        assert_eq!(class.size as usize, class.members.len());
        assert_eq!(
            class.representative.serial_index().unwrap(),
            class.members[0],
            "representative is the least member"
        );
        for cert in &class.certificates {
            match cert {
                Certificate::Step { from, to, step } => {
                    assert_eq!(&apply_step(from, step).unwrap(), to);
                    let g = step_gamma(step, from.n(), from.field()).unwrap();
                    assert!(is_isomorphism(from, to, &g).unwrap());
                    // Re-check a sample of the merges by exhaustive search.
                    if checked % 25 == 0 {
                        let r = iso_search(from, to, &IsoSearchOptions::default()).unwrap();
                        assert!(r.found().is_some());
                    }
                    checked += 1;
                }
                Certificate::Search { from, to, gamma } => {
                    assert!(direct_hom_check(from, to, gamma).unwrap());
                }
            }
        }
    }
    let back = ClassReport::from_json_value(&report.to_json_value()).unwrap();
    assert_eq!(back, report);
    let parallel = census(4, f(3), &CensusOptions { jobs: 4, ..Default::default() }).unwrap();
    assert_eq!(parallel, report);
}

#[test]
fn search_merges_have_step_paths_up_to_q5() {
    for (n, field) in [(2, f(3)), (2, f(5)), (3, f(3)), (3, f(5))] {
        let report = census(n, field, &CensusOptions::default()).unwrap();
        for class in &report.classes {
            for cert in &class.certificates {
                if let Certificate::Search { from, to, .. } = cert {
                    let res = eto_equiv_search(from, to, 8).unwrap();
                    assert!(res.path.is_some(), "no step path {from:?} -> {to:?}");
                }
            }
        }
    }
}

#[test]
fn budget_exhaustion_flags_incomplete() {
    let report = census(3, f(3), &CensusOptions { budget: 1, ..Default::default() }).unwrap();
    assert!(!report.complete);
    assert!(!report.unresolved.is_empty());
}
