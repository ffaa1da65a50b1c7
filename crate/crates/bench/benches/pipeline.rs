//! End-to-end benchmarks: graph generation, BFS, the full round-synchronous
//! spanner construction, and fast-level verification.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spanner_core::rational::rat_u64;
use spanner_core::verifier::{verify, VerificationLevel};
use spanner_core::{bfs, build_schedule, gen, protocol, EpsilonMode, ScheduleParams};

fn schedule_for(n: u64) -> spanner_core::PhaseSchedule {
    build_schedule(&ScheduleParams {
        n,
        kappa: 4,
        c: 3,
        mode: EpsilonMode::Exploratory,
        eps_arg: rat_u64(1, 2),
    })
    .unwrap()
}

fn bench_generate(c: &mut Criterion) {
    c.bench_function("gnp_n1024_p1_64", |b| {
        b.iter(|| gen::gnp(1024, &rat_u64(1, 64), 7))
    });
}

fn bench_bfs(c: &mut Criterion) {
    let g = gen::gnp(2048, &rat_u64(1, 128), 7);
    c.bench_function("bfs_n2048", |b| b.iter(|| bfs(&g, 0, None).unwrap()));
}

fn bench_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_spanner");
    group.sample_size(10);
    for &n in &[64u32, 128, 256] {
        let g = gen::gnp(n, &rat_u64(1, 20), 7);
        let schedule = schedule_for(u64::from(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| protocol::build_spanner(&g, &schedule).unwrap())
        });
    }
    group.finish();
}

fn bench_verify_fast(c: &mut Criterion) {
    let g = gen::gnp(128, &rat_u64(1, 20), 7);
    let schedule = schedule_for(128);
    let (edges, trace) = protocol::build_spanner(&g, &schedule).unwrap();
    let mut group = c.benchmark_group("verify_fast");
    group.sample_size(10);
    group.bench_function("n128", |b| {
        b.iter(|| verify(&g, &schedule, &edges, &trace, VerificationLevel::Fast))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_generate,
    bench_bfs,
    bench_build,
    bench_verify_fast
);
criterion_main!(benches);
