//! Shared generators and fixtures for the integration tests.
#![allow(dead_code)]

use niltri_core::eto::{f_well_defined, q_well_defined};
use niltri_core::{EtoStep, FieldSpec, Matrix, Scalar, Sltm};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn f(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

pub fn q() -> FieldSpec {
    FieldSpec::Rational
}

pub fn frac(field: FieldSpec, num: i64, den: i64) -> Scalar {
    field.ratio(num, den).unwrap()
}

/// Uniform over a prime field; over the rationals `a/b` with `|a| <= 3`, `1 <= b <= 3`.
pub fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
    match field.order() {
        Some(p) => field.element(rng.gen_range(0..p) as u32).unwrap(),
        None => frac(field, rng.gen_range(-3..=3), rng.gen_range(1..=3)),
    }
}

pub fn random_nonzero(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Each entry is nonzero with probability `density`.
pub fn random_sltm(rng: &mut ChaCha8Rng, n: usize, field: FieldSpec, density: f64) -> Sltm {
    Sltm::from_fn(n, field, |_, _| {
        if rng.gen_bool(density) {
            random_scalar(rng, field)
        } else {
            field.zero()
        }
    })
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, field: FieldSpec) -> Matrix {
    let mut m = Matrix::zeros(rows, cols, field);
    for i in 1..=rows {
        for j in 1..=cols {
            m.set(i, j, random_scalar(rng, field));
        }
    }
    m
}

pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, field: FieldSpec) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n, field);
        if m.is_invertible() {
            return m;
        }
    }
}

/// A random step that is admissible on `t`; falls back to a scaling.
pub fn random_step(rng: &mut ChaCha8Rng, t: &Sltm) -> EtoStep {
    let n = t.n();
    let field = t.field();
    for _ in 0..32 {
        match rng.gen_range(0..3) {
            1 if n >= 2 => {
                let r1 = rng.gen_range(1..n);
                let r2 = rng.gen_range(r1 + 1..=n);
                if f_well_defined(t, r1, r2) {
                    return EtoStep::f(r1, r2);
                }
            }
            2 if n >= 2 => {
                let r0 = rng.gen_range(2..=n);
                let k0 = rng.gen_range(1..r0);
                let one = field.one();
                // The restriction fixes β whenever row k0 has a nonzero entry.
                let beta = match (1..k0).find(|&i| !t.entry(k0, i).is_zero()) {
                    Some(i) => t.delta(&one, i, k0, r0).unwrap() / t.entry(k0, i),
                    None => random_scalar(rng, field),
                };
                if q_well_defined(t, r0, k0, &beta) {
                    return EtoStep::q(r0, k0, beta);
                }
            }
            _ => {}
        }
    }
    EtoStep::p(rng.gen_range(1..=n), random_nonzero(rng, field))
}

/// The 12 x 12 matrix with two chains of leaders and an isolated vertex.
pub fn twelve() -> Sltm {
    let rows: Vec<Vec<(i64, i64)>> = vec![
        vec![(1, 1)],
        vec![(-1, 1), (2, 1)],
        vec![],
        vec![(1, 1), (-2, 1), (2, 1)],
        vec![(1, 2), (-1, 1), (1, 1)],
        vec![(-1, 1), (2, 1), (-2, 1), (0, 1), (2, 1)],
        vec![(0, 1), (0, 1), (0, 1), (1, 1)],
        vec![(0, 1), (0, 1), (0, 1), (-3, 2), (0, 1), (0, 1), (0, 1), (3, 1)],
        vec![(1, 2), (-1, 1), (1, 1), (0, 1), (-1, 1), (0, 1), (1, 1)],
        vec![],
        vec![(-3, 4), (3, 2), (-3, 2), (0, 1), (0, 1), (3, 1)],
    ];
    Sltm::from_fn(12, q(), |i, j| {
        rows[i - 2]
            .get(j - 1)
            .map(|&(a, b)| frac(q(), a, b))
            .unwrap_or_else(|| q().zero())
    })
}

pub fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(f(3)), Just(f(5)), Just(f(7)), Just(q())]
}

/// Entries drawn from small integers and halves, mapped into `field`.
pub fn sltm_in(field: FieldSpec, n: usize) -> impl Strategy<Value = Sltm> {
    let len = n * n.saturating_sub(1) / 2;
    prop::collection::vec((-3i64..=3, prop_oneof![Just(1i64), Just(2)]), len).prop_map(
        move |v| {
            let mut it = v.into_iter();
            Sltm::from_fn(n, field, |_, _| {
                let (a, b) = it.next().unwrap();
                frac(field, a, b)
            })
        },
    )
}

pub fn sltm_strategy(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Sltm> {
    (field_strategy(), sizes).prop_flat_map(|(field, n)| sltm_in(field, n))
}
