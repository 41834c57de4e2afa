use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hyporate::decay_bounds::gt_line_global_bound;
use hyporate::gt_sim::propagator_norm_sq;
use hyporate::modal_rates::{rate_point, Variant};
use hyporate::numeric::log_grid;
use hyporate::par::{map_par, map_seq};
use hyporate::spectral_lyapunov::{certify, gt_matrix, gt_p_family, Family};

type Mapper = fn(&[f64], &(dyn Fn(&f64) -> f64 + Sync + Send)) -> Vec<f64>;

fn seq(items: &[f64], f: &(dyn Fn(&f64) -> f64 + Sync + Send)) -> Vec<f64> {
    map_seq(items, f)
}

fn par(items: &[f64], f: &(dyn Fn(&f64) -> f64 + Sync + Send)) -> Vec<f64> {
    map_par(items, f)
}

const MAPPERS: [(&str, Mapper); 2] = [("seq", seq), ("par", par)];

fn lambda_curves(c: &mut Criterion) {
    let mut g = c.benchmark_group("lambda2_curve");
    g.sample_size(10);
    for n in [32usize, 128] {
        let grid = log_grid(1e-3, 1e3, n);
        for (name, m) in MAPPERS {
            g.bench_with_input(BenchmarkId::new(name, n), &grid, |b, grid| {
                b.iter(|| m(grid, &|&s| rate_point(Variant::Lambda2, s).unwrap().lambda))
            });
        }
    }
    g.finish();
}

fn certification(c: &mut Criterion) {
    let mut g = c.benchmark_group("pbar_certify");
    let xs: Vec<f64> = (1..=1024).map(|k| k as f64).collect();
    for (name, m) in MAPPERS {
        g.bench_function(name, |b| {
            b.iter(|| {
                m(&xs, &|&xi| {
                    let d = gt_p_family(xi, 3.0, Family::PBar).unwrap();
                    certify(&d, &gt_matrix(xi, 3.0)).unwrap().residual
                })
            })
        });
    }
    g.finish();
}

fn envelopes(c: &mut Criterion) {
    let mut g = c.benchmark_group("gt_line_envelope");
    let times = log_grid(1e-2, 1e3, 256);
    for (name, m) in MAPPERS {
        g.bench_function(name, |b| {
            b.iter(|| m(&times, &|&t| gt_line_global_bound(t, 1.0, 1.0).bound))
        });
    }
    g.finish();
}

fn propagators(c: &mut Criterion) {
    let mut g = c.benchmark_group("modal_propagator");
    let xs: Vec<f64> = (0..8192).map(|j| -16.0 + j as f64 / 256.0).collect();
    for (name, m) in MAPPERS {
        g.bench_function(name, |b| {
            b.iter(|| m(&xs, &|&xi| propagator_norm_sq(xi, 1.0, black_box(10.0))))
        });
    }
    g.finish();
}

criterion_group!(benches, lambda_curves, certification, envelopes, propagators);
criterion_main!(benches);
