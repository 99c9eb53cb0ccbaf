use std::hint::black_box;

use abex_bench::graphs;
use abex_core::mix::build_mix_plan;
use abex_core::penman::{parse_penman, serialize_penman};
use abex_core::pipeline::{abstract_once, EditConfig};
use abex_core::smatch::{score, score_exact, SimilarityMode, TripleSet};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn penman(c: &mut Criterion) {
    let gs = graphs(64, 20, 1);
    let texts: Vec<String> = gs.iter().map(serialize_penman).collect();
    c.bench_function("serialize/64x20", |b| {
        b.iter(|| gs.iter().map(|g| serialize_penman(black_box(g)).len()).sum::<usize>())
    });
    c.bench_function("parse/64x20", |b| {
        b.iter(|| {
            texts
                .iter()
                .map(|t| parse_penman(black_box(t)).unwrap().len())
                .sum::<usize>()
        })
    });
}

fn smatch(c: &mut Criterion) {
    let mut group = c.benchmark_group("smatch");
    for vars in [4, 6, 8] {
        let gs = graphs(2, vars, vars as u64);
        let (a, b) = (TripleSet::from_graph(&gs[0]), TripleSet::from_graph(&gs[1]));
        group.bench_with_input(BenchmarkId::new("exact", vars), &vars, |bench, _| {
            bench.iter(|| score_exact(black_box(&a), black_box(&b)).unwrap().matched)
        });
        group.bench_with_input(BenchmarkId::new("hill4", vars), &vars, |bench, _| {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            bench.iter(|| score(black_box(&a), black_box(&b), 4, &mut rng).matched)
        });
    }
    let big = graphs(2, 40, 9);
    let (a, b) = (TripleSet::from_graph(&big[0]), TripleSet::from_graph(&big[1]));
    group.bench_function("hill4/40", |bench| {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        bench.iter(|| score(black_box(&a), black_box(&b), 4, &mut rng).matched)
    });
    group.finish();
}

fn editing(c: &mut Criterion) {
    let gs = graphs(32, 16, 3);
    let config = EditConfig::default();
    c.bench_function("abstract_once/32x16", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        b.iter(|| {
            gs.iter()
                .map(|g| abstract_once(black_box(g), &[], &config, &mut rng).len())
                .sum::<usize>()
        })
    });
    c.bench_function("mix_plan/12x12", |b| {
        let pair = graphs(2, 12, 4);
        b.iter(|| build_mix_plan(black_box(&pair[0]), black_box(&pair[1]), 1, SimilarityMode::F1).k)
    });
}

criterion_group!(benches, penman, smatch, editing);
criterion_main!(benches);
