use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fairgame::casegen::{gen_roborta, gen_uav, LightVersion, RobortaConfig, UavConfig};
use fairgame::corpus::layered_game;
use fairgame::modelc::{compile_str, CompileOptions};
use fairgame::solver::{gamma_apply_into, gamma_apply_into_par};
use fairgame::{is_stopping_under_fairness, solve, SolveOptions};

fn gamma(c: &mut Criterion) {
    let mut group = c.benchmark_group("gamma");
    for n in [1_000, 100_000] {
        let g = layered_game(1, n);
        let f: Vec<f64> = (0..n).map(|i| (i % 17) as f64).collect();
        let mut out = vec![0.0; n];
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| gamma_apply_into(&g, black_box(&f), &mut out))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| gamma_apply_into_par(&g, black_box(&f), &mut out))
        });
    }
    group.finish();
}

fn fairness(c: &mut Criterion) {
    let mut group = c.benchmark_group("stopping_check");
    for n in [1_000, 10_000, 100_000] {
        let g = layered_game(2, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| is_stopping_under_fairness(g)));
    }
    group.finish();
}

fn solving(c: &mut Criterion) {
    let opts = CompileOptions::default();
    let roborta = compile_str(
        &gen_roborta(&RobortaConfig::random(60, 8, 0.1, 0.0, LightVersion::A, 1)).unwrap(),
        &opts,
    )
    .unwrap()
    .game;
    let uav = compile_str(&gen_uav(&UavConfig::random(6, 0.1, 0.05, 1)).unwrap(), &opts)
        .unwrap()
        .game;
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("roborta_60x8", |b| b.iter(|| solve(&roborta, &SolveOptions::default()).unwrap()));
    group.bench_function("uav_6", |b| b.iter(|| solve(&uav, &SolveOptions::default()).unwrap()));
    group.bench_function("layered_2000", |b| {
        let g = layered_game(3, 2_000);
        b.iter(|| solve(&g, &SolveOptions::default()).unwrap())
    });
    group.finish();
}

fn compiling(c: &mut Criterion) {
    let text = gen_roborta(&RobortaConfig::random(60, 8, 0.1, 0.1, LightVersion::C, 1)).unwrap();
    c.bench_function("compile_roborta_60x8_c", |b| {
        b.iter(|| compile_str(black_box(&text), &CompileOptions::default()).unwrap())
    });
}

criterion_group!(benches, gamma, fairness, solving, compiling);
criterion_main!(benches);
