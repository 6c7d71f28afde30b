use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use randsync_core::fastsync::build_words;
use randsync_core::oracle::{greedy_reset_word, shortest_reset_word};
use randsync_core::randgen::{cerny, uniform_dfa, uniform_mapping};
use randsync_core::{decompose, eval_word, synchronize, Rng, Thresholds};

fn bench_decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    for n in [1_000usize, 100_000, 1_000_000] {
        let f = uniform_mapping(n, &mut Rng::from_seed(1)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| decompose(black_box(f)))
        });
    }
    g.finish();
}

fn bench_eval_word(c: &mut Criterion) {
    let n = 100_000;
    let d = uniform_dfa(n, 2, &mut Rng::from_seed(2)).unwrap();
    let mut g = c.benchmark_group("eval_w");
    g.sample_size(20);
    for eps in [0.02, 0.05, 0.1] {
        let w = build_words(&Thresholds::compute(n, eps).unwrap())
            .unwrap()
            .w;
        g.bench_with_input(BenchmarkId::from_parameter(eps), &w, |b, w| {
            b.iter(|| eval_word(&d, black_box(w)).unwrap())
        });
    }
    g.finish();
}

fn bench_synchronize(c: &mut Criterion) {
    let mut g = c.benchmark_group("synchronize");
    g.sample_size(10);
    for n in [1_024usize, 65_536, 1_000_000] {
        let d = uniform_dfa(n, 2, &mut Rng::from_seed(3)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &d, |b, d| {
            b.iter(|| synchronize(black_box(d), 0.05).unwrap())
        });
    }
    g.finish();
}

fn bench_oracles(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracles");
    g.sample_size(10);
    let random = uniform_dfa(20, 2, &mut Rng::from_seed(4)).unwrap();
    g.bench_function("shortest_reset_word/random20", |b| {
        b.iter(|| shortest_reset_word(black_box(&random)).unwrap())
    });
    let c16 = cerny(16).unwrap();
    g.bench_function("shortest_reset_word/cerny16", |b| {
        b.iter(|| shortest_reset_word(black_box(&c16)).unwrap())
    });
    let mid = uniform_dfa(1024, 2, &mut Rng::from_seed(5)).unwrap();
    g.bench_function("greedy/random1024", |b| {
        b.iter(|| greedy_reset_word(black_box(&mid)))
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_decompose,
    bench_eval_word,
    bench_synchronize,
    bench_oracles
);
criterion_main!(benches);
