use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use niltri_bench::{dense, generator_sum, twelve};
use niltri_core::algebra::MulOptions;
use niltri_core::{
    census, direct_hom_check, iso_search, key_eq_check, zero_class_certificate, Algebra,
    CensusOptions, FieldSpec, IsoSearchOptions, Sltm,
};

fn hom_checks(c: &mut Criterion) {
    let u = twelve();
    let zero = Sltm::zero(12, u.field());
    let gamma = zero_class_certificate(&u).unwrap().gamma().clone();
    let mut g = c.benchmark_group("hom_check_n12");
    g.bench_function("key_eq", |b| b.iter(|| key_eq_check(black_box(&zero), &u, &gamma).unwrap()));
    g.sample_size(10);
    g.bench_function("direct", |b| b.iter(|| direct_hom_check(black_box(&zero), &u, &gamma).unwrap()));
    g.finish();
}

fn multiplication(c: &mut Criterion) {
    let mut g = c.benchmark_group("mul_dense");
    for n in [6usize, 8, 10] {
        let alg = Algebra::new(dense(n, FieldSpec::Rational)).unwrap();
        let x = generator_sum(&alg);
        let a = x.pow(2);
        let b3 = x.pow(3);
        for (name, opts) in [
            ("memo", MulOptions::DEFAULT),
            ("direct", MulOptions { memoize: false, descending: false }),
        ] {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |bench, _| {
                bench.iter(|| a.mul_with(black_box(&b3), opts).unwrap())
            });
        }
    }
    g.finish();
}

fn searches(c: &mut Criterion) {
    let f3 = FieldSpec::prime(3).unwrap();
    let zero = Sltm::zero(4, f3);
    let b42 = Sltm::b_matrix(4, 2, f3).unwrap();
    let opts = IsoSearchOptions::default();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("iso_search_zero4_vs_b42_f3", |b| {
        b.iter(|| iso_search(black_box(&zero), &b42, &opts).unwrap())
    });
    g.bench_function("census_n3_f3", |b| {
        b.iter(|| census(3, black_box(f3), &CensusOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, hom_checks, multiplication, searches);
criterion_main!(benches);
