use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlgame::analysis::local_bound_with;
use nlgame::equilibrium::check_ex_post_with;
use nlgame::par::Execution;
use nlgame::polytope::{enumerate_ns_vertices_with, VertexOptions};
use nlgame::{presets, Player, Prior, QuadExt, Scenario};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn local_bounds(c: &mut Criterion) {
    // 3 types x 3 actions for each player: 3^6 deterministic strategies.
    let s = Scenario::new(vec![3, 3, 3], vec![3, 3, 3]).unwrap();
    let game = nlgame::Game::from_fn(s.clone(), |x, y, a, b| {
        let u = QuadExt::from(((x * 7 + y * 5 + a * 3 + b) % 5) as i64 - 2);
        (u.clone(), u)
    });
    let prior = Prior::uniform(&s);
    let mut group = c.benchmark_group("local_bound");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| local_bound_with(black_box(&game), &prior, Player::Alice, exec).unwrap())
        });
    }
    group.finish();
}

fn vertices(c: &mut Criterion) {
    let s = Scenario::chsh();
    let mut group = c.benchmark_group("ns_vertices_chsh");
    group.sample_size(10);
    for (name, exec) in MODES {
        let options = VertexOptions {
            execution: exec,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &options, |b, options| {
            b.iter(|| enumerate_ns_vertices_with(black_box(&s), *options).unwrap())
        });
    }
    group.finish();
}

fn ex_post(c: &mut Criterion) {
    let game = presets::vb_game(&QuadExt::from(4)).unwrap();
    let behavior = presets::vb_quantum();
    let tol = QuadExt::ratio(1, 1000);
    let mut group = c.benchmark_group("ex_post_vb");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_ex_post_with(black_box(&game), &behavior, &tol, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, local_bounds, vertices, ex_post);
criterion_main!(benches);
