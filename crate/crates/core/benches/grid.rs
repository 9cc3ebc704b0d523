//! Sequential vs rayon-parallel timings for the two hot paths: fitting the
//! order grid and backtesting every fitted model.
//!
//!     cargo bench -p arima-core --bench grid

use std::hint::black_box;
use std::time::Duration;

use arima_core::seed::rng;
use arima_core::{log_transform, EvalConfig, FitConfig, FittedGrid, Parallelism, Region, TimeSeries};
use chrono::NaiveDate;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand_distr::{Distribution, Normal};

fn prices(n: usize) -> TimeSeries {
    let mut r = rng(11);
    let noise = Normal::new(0.0, 0.03).unwrap();
    let mut level = 300f64.ln();
    let v = (0..n)
        .map(|_| {
            level += noise.sample(&mut r);
            level.exp()
        })
        .collect();
    TimeSeries::from_values(NaiveDate::from_ymd_opt(2015, 9, 1).unwrap(), v).unwrap()
}

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn fit_grid(c: &mut Criterion) {
    let logged = log_transform(&prices(120)).unwrap();
    let cfg = FitConfig::default();
    let mut g = c.benchmark_group("fit_grid");
    g.sample_size(10).measurement_time(Duration::from_secs(30));
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| FittedGrid::fit(black_box(&logged), &cfg, true, mode).unwrap())
        });
    }
    g.finish();
}

fn mse_report(c: &mut Criterion) {
    let p = prices(400);
    let grid = FittedGrid::fit(&log_transform(&p).unwrap(), &FitConfig::default(), true, Parallelism::Parallel).unwrap();
    let eval = EvalConfig {
        window_len: 9,
        num_locations: 50,
        reps: 40,
        region: Region::FullSpan,
        master_seed: 42,
    };
    let mut g = c.benchmark_group("mse_report");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| grid.mse_report(black_box(&p), &eval, mode).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, fit_grid, mse_report);
criterion_main!(benches);
