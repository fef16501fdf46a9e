//! Fixtures shared by the benchmarks.

use niltri_core::{Algebra, Element, FieldSpec, Scalar, Sltm};

/// A 12×12 rational matrix in the zero class with three leader components.
pub const TWELVE: &str = "n=12; field=rational
1
-1 2
0 0 0
1 -2 2 0
1/2 -1 1 0 0
-1 2 -2 0 2 0
0 0 0 1 0 0 0
0 0 0 -3/2 0 0 0 3
1/2 -1 1 0 -1 0 1 0 0
0 0 0 0 0 0 0 0 0 0
-3/4 3/2 -3/2 0 0 3 0 0 0 0 0
";

pub fn twelve() -> Sltm {
    Sltm::parse_any(TWELVE).expect("fixture parses")
}

/// Strictly lower entries cycling through 1, 2, 3, 4.
pub fn dense(n: usize, field: FieldSpec) -> Sltm {
    let mut t = Sltm::zero(n, field);
    let mut v = 1i64;
    for i in 2..=n {
        for j in 1..i {
            t.set(i, j, field.from_i64(v));
            v = v % 4 + 1;
        }
    }
    t
}

/// The sum of all generators, a dense element once raised to a power.
pub fn generator_sum(alg: &std::sync::Arc<Algebra>) -> Element {
    let ones: Vec<Scalar> = (0..alg.n()).map(|_| alg.field().one()).collect();
    Element::linear(alg, &ones).expect("length matches")
}
