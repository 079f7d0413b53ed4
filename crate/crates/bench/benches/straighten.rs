use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rnc_bench::{lifted_quartic, PASCAL_FOUR_TERM};
use rnc_core::syzygy::straighten;
use rnc_core::BracketPolynomial;

fn bench_straighten(c: &mut Criterion) {
    let pascal = BracketPolynomial::parse(PASCAL_FOUR_TERM).unwrap();
    c.bench_function("straighten pascal", |b| b.iter(|| straighten(&pascal)));

    let mut group = c.benchmark_group("straighten lifted quartic");
    for d in [3, 4, 5] {
        let p = lifted_quartic(d);
        group.bench_with_input(BenchmarkId::from_parameter(d), &p, |b, p| b.iter(|| straighten(p)));
    }
    group.finish();
}

criterion_group!(benches, bench_straighten);
criterion_main!(benches);
