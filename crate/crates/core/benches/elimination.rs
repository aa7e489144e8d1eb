use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use koszul_core::catalog;
use koszul_core::linalg::Field;
use koszul_core::par;
use koszul_core::suite::{koszulness_check, random};

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", true), ("parallel", false)]
}

fn rref(c: &mut Criterion) {
    let mut g = c.benchmark_group("rref");
    for (field, n) in [(Field::prime(32003).unwrap(), 160), (Field::Rational, 40)] {
        let m = random::matrix(field, n, n + 20, &mut random::rng(9));
        for (mode, seq) in modes() {
            par::set_sequential(seq);
            g.bench_with_input(BenchmarkId::new(mode, format!("{field:?} {n}")), &m, |b, m| b.iter(|| black_box(m.rref())));
        }
    }
    par::set_sequential(false);
    g.finish();
}

fn strands(c: &mut Criterion) {
    let mut g = c.benchmark_group("koszul_strands");
    g.sample_size(10);
    let p = catalog::symmetric(Field::prime(32003).unwrap(), 3);
    for (mode, seq) in modes() {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::new(mode, "S(3) to 5"), |b| b.iter(|| black_box(koszulness_check(&p, 5).unwrap())));
    }
    par::set_sequential(false);
    g.finish();
}

criterion_group!(benches, rref, strands);
criterion_main!(benches);
