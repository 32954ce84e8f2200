use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use femtocell_core::simulation::load_params;
use femtocell_core::{
    dsatur_color, estimate_load, expand_graph, greedy_bfs_color, maxmin_allocate, prepare_trial,
    run_channel, seed, RateMatrix, SystemConfig, UserDemand,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn full_scale() -> SystemConfig {
    SystemConfig::default()
}

fn desk_scale() -> SystemConfig {
    SystemConfig {
        cell_radius_m: 50.0,
        ..SystemConfig::default()
    }
}

fn coloring(c: &mut Criterion) {
    let cfg = full_scale();
    let setup = prepare_trial(&cfg, seed::topology_seed(cfg.master_seed, 0)).unwrap();
    let g = expand_graph(&setup.interference, &setup.demands);
    c.bench_function("dsatur full scale", |b| {
        b.iter(|| dsatur_color(black_box(&g), cfg.n_prbs_femto))
    });
    c.bench_function("bfs full scale", |b| {
        b.iter(|| greedy_bfs_color(black_box(&g), cfg.n_prbs_femto))
    });
}

fn load(c: &mut Criterion) {
    let cfg = full_scale();
    let params = load_params(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let users: Vec<UserDemand> = (0..8)
        .map(|_| UserDemand {
            rate_bps: 1e6,
            avg_gain: 10f64.powf(-rng.random_range(6.0..10.0)),
        })
        .collect();
    c.bench_function("estimate_load 8 users", |b| {
        b.iter(|| estimate_load(black_box(&users), cfg.p_max_w(), &params))
    });
}

fn allocation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..12).map(|_| rng.random_range(0.0..2e6)).collect())
        .collect();
    let r = RateMatrix::from_rows(&rows);
    let demands = vec![1e6; 6];
    c.bench_function("maxmin 6 users x 12 prbs", |b| {
        b.iter(|| maxmin_allocate(black_box(&r), &demands).unwrap())
    });
}

fn trial(c: &mut Criterion) {
    for (name, cfg) in [
        ("trial desk scale", desk_scale()),
        ("trial full scale", full_scale()),
    ] {
        let ts = seed::topology_seed(cfg.master_seed, 0);
        let cs = seed::channel_seed(cfg.master_seed, 0, 0);
        c.bench_function(name, |b| {
            b.iter_batched(
                || cfg.clone(),
                |cfg| {
                    let setup = prepare_trial(&cfg, ts).unwrap();
                    run_channel(&cfg, &setup, cs).unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
}

criterion_group!(benches, coloring, load, allocation, trial);
criterion_main!(benches);
