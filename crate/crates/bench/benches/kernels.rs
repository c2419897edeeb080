use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use growthlab::growth::{ball_samples, estimate_rate, log_ball_integral, log_spaced};
use growthlab::params::solve_c1;
use growthlab::{build_sharp_example, QuadOptions, Regime};

fn c1(c: &mut Criterion) {
    c.bench_function("solve_c1 p=3", |b| {
        b.iter(|| solve_c1(black_box(3.0), black_box(7.5)).unwrap())
    });
}

fn ball_integral(c: &mut Criterion) {
    let opts = QuadOptions::default();
    let mut group = c.benchmark_group("log_ball_integral");
    for (p, q, mu) in [(2.0, 3.0, 1.0), (1.5, 0.625, 0.0), (2.0, 2.0, 2.0)] {
        let ex = build_sharp_example(p, q, mu).unwrap();
        let r = 100.0 * (ex.t0 + 1.0);
        group.bench_function(format!("p={p} q={q} mu={mu}"), |b| {
            b.iter(|| log_ball_integral(&ex.model, &ex.profile, q, ex.s0, black_box(r), &opts).unwrap())
        });
    }
    group.finish();
}

fn rate_fit(c: &mut Criterion) {
    let ex = build_sharp_example(2.0, 3.0, 1.0).unwrap();
    let radii = log_spaced(ex.t0 + 10.0, 1e4, 10).unwrap();
    let samples = ball_samples(&ex.model, &ex.profile, 3.0, ex.s0, &radii, &QuadOptions::default()).unwrap();
    let regime = Regime::Power { beta: ex.beta() };
    c.bench_function("estimate_rate power", |b| {
        b.iter(|| estimate_rate(black_box(&samples), regime).unwrap())
    });
}

criterion_group!(benches, c1, ball_integral, rate_fit);
criterion_main!(benches);
