use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use pinwheel::exact::max_holiday_cycle;
use pinwheel::reductions::{build_eps_witness, validate_witness};
use pinwheel::sat::{brute_force_sat_with, gen_random_34sat, SatVerdict};
use pinwheel::verify::{check_exact_catalog, SuiteConfig};
use pinwheel::Exec;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn holiday_cycle(c: &mut Criterion) {
    let mut g = c.benchmark_group("max_holiday_cycle");
    let periods = [3u64, 5, 7, 9];
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "3,5,7,9"), &periods, |b, p| {
            b.iter(|| max_holiday_cycle(black_box(p), 1 << 22, exec).unwrap())
        });
    }
    g.finish();
}

fn witness_validation(c: &mut Criterion) {
    let f = gen_random_34sat(8, 10, 3).unwrap();
    let SatVerdict::Sat(a) = brute_force_sat_with(&f, 24, Exec::Sequential).unwrap() else {
        panic!("benchmark formula must be satisfiable");
    };
    let w = build_eps_witness(&f, &a).unwrap();
    let mut g = c.benchmark_group("validate_witness");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "n=8 m=10"), |b| {
            b.iter(|| validate_witness(black_box(&w), exec).unwrap())
        });
    }
    g.finish();
}

fn sat_search(c: &mut Criterion) {
    let f = gen_random_34sat(18, 24, 7).unwrap();
    let mut g = c.benchmark_group("brute_force_sat");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "n=18 m=24"), |b| {
            b.iter(|| brute_force_sat_with(black_box(&f), 24, exec).unwrap())
        });
    }
    g.finish();
}

fn exact_catalog(c: &mut Criterion) {
    let cfg = SuiteConfig::default();
    let mut g = c.benchmark_group("exact_catalog");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| check_exact_catalog(black_box(&cfg), exec))
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    holiday_cycle,
    witness_validation,
    sat_search,
    exact_catalog
);
criterion_main!(benches);
