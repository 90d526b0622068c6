//! Criterion benchmarks comparing the rayon-parallel and sequential paths
//! of the verification and search kernels at n = 9 desk scale.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dho_core::equiv::{aut_order, DhoContext, SearchConfig};
use dho_core::exec;
use dho_core::families::{nearflag_family, semifield_shadow_family, ChainParams};
use dho_core::field::FieldCtx;
use dho_core::opsets::{verify_spread_set, OpSet};

fn instances() -> (OpSet, OpSet) {
    let f = FieldCtx::new(2, 9, None).unwrap();
    let f8 = f.subfield_elements(3).unwrap();
    let (sigma, _) = semifield_shadow_family(&f, &ChainParams::new(9, vec![3], vec![f8[2]])).unwrap();
    let (_, delta, _) = nearflag_family(&f, &ChainParams::new(9, vec![3], vec![f8[2]])).unwrap();
    (sigma, delta)
}

/// Sequential twin of the pairwise-difference check in `verify_spread_set`,
/// for the parallel-vs-sequential comparison.
fn spread_set_pairs_seq(set: &OpSet) -> bool {
    let m = set.len();
    exec::first_violation_seq(m * m, |idx| {
        let (i, j) = (idx / m, idx % m);
        (i < j && !set.ops[i].add(&set.ops[j]).is_invertible()).then(String::new)
    })
    .is_none()
}

fn bench_verify(c: &mut Criterion) {
    let (sigma, _) = instances();
    let mut g = c.benchmark_group("verify_spread_set_n9");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| black_box(verify_spread_set(&sigma).ok)));
    g.bench_function("sequential", |b| b.iter(|| black_box(spread_set_pairs_seq(&sigma))));
    g.finish();
}

fn bench_kernel_structure(c: &mut Criterion) {
    let (_, delta) = instances();
    let mut g = c.benchmark_group("kappa_and_signatures_n9");
    g.sample_size(10);
    g.bench_function("build", |b| b.iter(|| black_box(DhoContext::new(&delta).unwrap().m)));
    g.finish();
}

fn bench_aut(c: &mut Criterion) {
    let (_, delta) = instances();
    let mut g = c.benchmark_group("aut_order_nearflag_n9");
    g.sample_size(10);
    g.bench_function("search", |b| {
        b.iter(|| black_box(aut_order(&delta, &SearchConfig::default()).unwrap().order))
    });
    g.finish();
}

criterion_group!(benches, bench_verify, bench_kernel_structure, bench_aut);
criterion_main!(benches);
