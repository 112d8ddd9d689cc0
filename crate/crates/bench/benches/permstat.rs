use criterion::{criterion_group, criterion_main, Criterion};
use permstat_bench::des_table;
use permstat_core::*;
use std::hint::black_box;

fn shuffle_sets(c: &mut Criterion) {
    let p: Permutation = "1324".parse().unwrap();
    let q: Permutation = "5768".parse().unwrap();
    c.bench_function("shuffles 4x4", |b| b.iter(|| shuffles(black_box(&p), black_box(&q)).unwrap()));
}

fn strong_check(c: &mut Criterion) {
    let t = des_table(6);
    c.bench_function("strong shuffle check Des to 6", |b| {
        b.iter(|| check_shuffle_compatible(black_box(&t), ShuffleMode::Strong, 6).unwrap())
    });
}

fn enumerate_n4(c: &mut Criterion) {
    let inst = SearchInstance::new(&StatisticTable::trivial(3), 4).unwrap();
    c.bench_function("enumerate trivial base n=4", |b| b.iter(|| enumerate_level(black_box(&inst)).unwrap()));
}

criterion_group!(benches, shuffle_sets, strong_check, enumerate_n4);
criterion_main!(benches);
