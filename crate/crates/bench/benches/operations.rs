use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kurepa_bench::{candidates, comparable_pairs, fragment, functions};
use kurepa_core::game::{decompose, diagonalize, EOracle};
use kurepa_core::separation::verify_gdelta;
use kurepa_core::talagrand::t_op;
use kurepa_core::tau::tau;

fn tau_all_pairs(c: &mut Criterion) {
    let frag = fragment(4, 5);
    let pairs = comparable_pairs(&frag);
    c.bench_function("tau/depth4-alphabet5", |b| {
        b.iter(|| {
            for (s, u) in &pairs {
                black_box(tau(s, u).unwrap());
            }
        })
    });
}

fn gdelta(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_gdelta");
    group.sample_size(10);
    for (depth, alphabet) in [(2, 3), (3, 4)] {
        let frag = fragment(depth, alphabet);
        let p_max = frag.max_value().unwrap() + 2;
        group.bench_function(format!("depth{depth}-alphabet{alphabet}"), |b| {
            b.iter(|| verify_gdelta(black_box(&frag), p_max).unwrap())
        });
    }
    group.finish();
}

fn operator(c: &mut Criterion) {
    let frag = fragment(3, 4);
    let fs = functions(&frag, 256);
    c.bench_function("t_op/256-functions", |b| {
        b.iter(|| {
            for (f, p) in &fs {
                for n in 1..=4 {
                    black_box(t_op(f, p, n));
                }
            }
        })
    });
}

fn game(c: &mut Criterion) {
    let frag = fragment(3, 5);
    let cs = candidates(&frag, 32);
    c.bench_function("decompose+diagonalize/32-candidates", |b| {
        b.iter(|| {
            for cand in &cs {
                let esets = decompose(cand, &frag).unwrap();
                let oracles: Vec<&dyn EOracle> = esets.iter().map(|e| e as &dyn EOracle).collect();
                black_box(diagonalize(&oracles, &frag, 64).unwrap());
            }
        })
    });
}

criterion_group!(benches, tau_all_pairs, gdelta, operator, game);
criterion_main!(benches);
