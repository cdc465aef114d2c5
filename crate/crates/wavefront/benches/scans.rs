//! Wall-clock comparison of the data-parallel scans against a
//! single-threaded baseline. With the `parallel` feature (on by default)
//! the grid points fan out over rayon; pinning the pool to one thread
//! measures the same code path without the fan-out, which is also what the
//! sequential fallback build (`--no-default-features`) does.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use wavefront::{find_limit_cycle, scan_gap, ShootConfig, WaveParams};

fn flagship() -> WaveParams {
    WaveParams::new(2.0, 3.0, 2.0, 1.0).unwrap()
}

fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
}

/// Axis-crossing scan over a 41-point speed grid spanning both shooting
/// regimes; each point is an independent pair of integrations.
fn bench_gap_scan(c: &mut Criterion) {
    let params = flagship();
    let cfg = ShootConfig::default();
    let mut group = c.benchmark_group("gap_scan");
    group
        .sample_size(10)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(3));
    group.bench_function("thread_pool_default", |b| {
        b.iter(|| scan_gap(&params, -1.0, 3.0, 0.1, &cfg))
    });
    let pool = single_thread_pool();
    group.bench_function("single_thread", |b| {
        b.iter(|| pool.install(|| scan_gap(&params, -1.0, 3.0, 0.1, &cfg)))
    });
    group.finish();
}

/// Limit-cycle search inside the oscillatory band; the initial return-map
/// scan is the parallel part, the bisection afterwards is sequential.
fn bench_cycle_search(c: &mut Criterion) {
    let params = flagship();
    let cfg = ShootConfig::default();
    let mut group = c.benchmark_group("cycle_search");
    group
        .sample_size(10)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(3));
    group.bench_function("thread_pool_default", |b| {
        b.iter(|| find_limit_cycle(&params, 1.8, &cfg).unwrap())
    });
    let pool = single_thread_pool();
    group.bench_function("single_thread", |b| {
        b.iter(|| pool.install(|| find_limit_cycle(&params, 1.8, &cfg).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_gap_scan, bench_cycle_search);
criterion_main!(benches);
