use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsepoly_core::blackbox::make_poly_oracle;
use sparsepoly_core::gf2poly::random_sparse;
use sparsepoly_core::variation::IndependenceTest;
use sparsepoly_core::{Assignment, Monomial, SparsePoly, TruthTable, VarSet};

fn mobius(c: &mut Criterion) {
    let mut group = c.benchmark_group("mobius_interpolate");
    for n in [10, 14, 18] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let table = TruthTable::from_fn(n, |_| rng.random()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &table, |b, t| b.iter(|| t.mobius_interpolate()));
    }
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for n in [64, 512, 4096] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_sparse(n, 8, 4, &mut rng).unwrap();
        let points: Vec<Assignment> = (0..256).map(|_| Assignment::random(n, &mut rng)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &points, |b, points| {
            b.iter(|| points.iter().filter(|x| p.evaluate(x).unwrap()).count())
        });
    }
    group.finish();
}

fn independence_test(c: &mut Criterion) {
    let mut group = c.benchmark_group("independence_test_1000_runs");
    for n in [64, 512] {
        let p = SparsePoly::new(n, [Monomial::new([1, 2]), Monomial::new([3, 4, 5])]).unwrap();
        let f = make_poly_oracle(p);
        let vars = VarSet::from_vars(n, (1..=n).step_by(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| IndependenceTest::new(&vars).count_rejections(&f, black_box(1000), &mut rng))
        });
    }
    group.finish();
}

criterion_group!(benches, mobius, evaluation, independence_test);
criterion_main!(benches);
