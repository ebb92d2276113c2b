use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use permitmc_bench::{chain, model};
use permitmc_core::deduction::shipped_derivations;
use permitmc_core::{check_state_naive, expand_model, is_tautology, model_check, random_formula, verify_derivation};

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn by_model_size(c: &mut Criterion) {
    let f = chain(20);
    let mut g = c.benchmark_group("model_check/states");
    for n in [500, 1_000, 2_000, 4_000] {
        let m = model(n, 7);
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| model_check(m, black_box(&f)).unwrap())
        });
    }
    g.finish();
}

fn by_formula_size(c: &mut Criterion) {
    let m = model(1_000, 7);
    let mut g = c.benchmark_group("model_check/formula");
    for k in [10, 20, 40, 80] {
        let f = chain(k);
        g.bench_with_input(BenchmarkId::from_parameter(k), &f, |b, f| {
            b.iter(|| model_check(&m, black_box(f)).unwrap())
        });
    }
    g.finish();
}

fn against_naive(c: &mut Criterion) {
    let m = model(50, 3);
    let f = random_formula(3, 4, &names(&["a", "b"]), &names(&["p", "q"]));
    let states: Vec<String> = m.states().iter().map(|s| s.to_string()).collect();
    let mut g = c.benchmark_group("all_states");
    g.bench_function("truth_sets", |b| b.iter(|| model_check(&m, black_box(&f)).unwrap()));
    g.bench_function("naive", |b| {
        b.iter(|| {
            states
                .iter()
                .map(|s| check_state_naive(&m, s, black_box(&f)).unwrap())
                .filter(|&x| x)
                .count()
        })
    });
    g.finish();
}

fn atl_expansion(c: &mut Criterion) {
    let mut g = c.benchmark_group("expand_model");
    for n in [10, 50, 200] {
        let m = model(n, 5);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| expand_model(m).unwrap())
        });
    }
    g.finish();
}

fn deduction(c: &mut Criterion) {
    let derivations = shipped_derivations();
    c.bench_function("verify_derivation/shipped", |b| {
        b.iter(|| {
            derivations
                .iter()
                .filter(|(_, d)| verify_derivation(d).is_accepted())
                .count()
        })
    });
    let f = random_formula(9, 5, &names(&["a", "b"]), &names(&["p", "q", "r"]));
    c.bench_function("is_tautology/depth5", |b| {
        b.iter(|| is_tautology(black_box(&f)).unwrap())
    });
}

criterion_group!(
    benches,
    by_model_size,
    by_formula_size,
    against_naive,
    atl_expansion,
    deduction
);
criterion_main!(benches);
