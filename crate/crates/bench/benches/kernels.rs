use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fitzcalc_core::convexfn::j_transform;
use fitzcalc_core::enlarge::{br_search, BRQuery};
use fitzcalc_core::fitz::{phi_of, s_of};
use fitzcalc_core::optim::MultistartConfig;
use fitzcalc_core::polar::polar_monotone_decide;
use fitzcalc_core::{FiniteGraph, OperatorSpec, PairPoint, Window};

fn line(k: usize) -> FiniteGraph {
    let pts: Vec<(f64, f64)> = (0..k).map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64).map(|t| (t, t)).collect();
    FiniteGraph::from_scalars(&pts)
}

fn kernels(c: &mut Criterion) {
    let g = line(20);
    let pts = Window::cube(2, -2.0, 2.0, 21).unwrap().pair_points().unwrap();
    let phi = phi_of(&g).unwrap();
    c.bench_function("phi_eval_20pts_441", |b| {
        b.iter(|| pts.iter().map(|z| phi.eval(black_box(z)).unwrap().to_f64()).sum::<f64>())
    });

    let js = j_transform(&s_of(&g).unwrap()).unwrap();
    let few: Vec<PairPoint> = pts.iter().step_by(20).cloned().collect();
    c.bench_function("j_of_s_lp_eval_23", |b| {
        b.iter(|| few.iter().map(|z| js.eval(black_box(z)).unwrap().to_f64()).sum::<f64>())
    });

    let two = FiniteGraph::from_scalars(&[(0.0, 0.0), (1.0, 1.0)]);
    let cfg = MultistartConfig::with_seed(0);
    c.bench_function("polar_decide_two_point", |b| b.iter(|| polar_monotone_decide(black_box(&two), None, &cfg).unwrap()));

    let abs = OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap();
    let q = BRQuery { x: vec![1.0].into(), xs: vec![0.0].into(), eps: 1.0, eps_tilde: 1.1, lambda: 1.0 };
    c.bench_function("br_search_abs", |b| b.iter(|| br_search(black_box(&abs), &q, None).unwrap()));
}

criterion_group!(benches, kernels);
criterion_main!(benches);
