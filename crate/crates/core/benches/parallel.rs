use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use inout_core::exec::Exec;
use inout_core::gtsp::{brute_force_atsp, convert, random_instance, RandomParams};
use inout_core::search::{search_min, SearchOptions};
use inout_core::{build_inout, verify_inout, VerifyOptions};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn verify(c: &mut Criterion) {
    let g = build_inout(10).unwrap();
    let mut group = c.benchmark_group("verify_s10_paranoid");
    for (name, exec) in POLICIES {
        let opts = VerifyOptions { exec, ..VerifyOptions::paranoid() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| verify_inout(black_box(&g), &opts)));
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search_order5_k3");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = SearchOptions { exec, ..SearchOptions::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| search_min(5, 3, 20, &opts)));
    }
    group.finish();
}

fn atsp_oracle(c: &mut Criterion) {
    let instances: Vec<_> =
        (0..20).map(|s| convert(&random_instance(&RandomParams::default(), s)).unwrap().0).collect();
    let mut group = c.benchmark_group("brute_force_atsp_20_instances");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| instances.iter().filter_map(|a| brute_force_atsp(a, exec).unwrap()).count())
        });
    }
    group.finish();
}

criterion_group!(benches, verify, search, atsp_oracle);
criterion_main!(benches);
