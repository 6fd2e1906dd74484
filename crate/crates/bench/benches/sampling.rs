use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use tentcode::oracle::enumerate_sections;
use tentcode::sampler::run_stats_only;
use tentcode::{BitSource, ExactBernoulli, Rational, SegmentTable};
use tentcode_bench::slopes;

fn sampler_throughput(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    let n = 100_000u64;
    group.throughput(Throughput::Elements(n));
    for mu in slopes() {
        group.bench_with_input(BenchmarkId::from_parameter(&mu), &mu, |b, mu| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                black_box(run_stats_only(mu, n, seed))
            });
        });
    }
    group.finish();
}

fn table_growth(c: &mut Criterion) {
    let mut group = c.benchmark_group("table_growth");
    for mu in slopes() {
        group.bench_with_input(BenchmarkId::new("frontier_200", &mu), &mu, |b, mu| {
            b.iter_batched(
                || SegmentTable::new(mu),
                |mut t| {
                    t.materialize_to(200);
                    black_box(t.table_bits())
                },
                BatchSize::SmallInput,
            );
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    for mu in slopes() {
        group.bench_with_input(BenchmarkId::new("n_12", &mu), &mu, |b, mu| {
            b.iter(|| black_box(enumerate_sections(mu, 12).unwrap().len()));
        });
    }
    group.finish();
}

fn bernoulli(c: &mut Criterion) {
    let p = ExactBernoulli::new(&Rational::frac(9, 16 * 27 + 1)).unwrap();
    c.bench_function("exact_bernoulli", |b| {
        let mut src = BitSource::new(1);
        b.iter(|| black_box(p.sample(&mut src)));
    });
}

criterion_group!(
    benches,
    sampler_throughput,
    table_growth,
    enumeration,
    bernoulli
);
criterion_main!(benches);
