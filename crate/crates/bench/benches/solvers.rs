use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sawfeti::feti::FetiModel;
use sawfeti::qtsolver::{complete_factorization, double_newton, smw_solve};
use sawfeti_bench::{small_config, small_system};

fn bench_double_newton(c: &mut Criterion) {
    let qt = small_system(2).expect("system");
    c.bench_function("double_newton", |b| {
        b.iter(|| double_newton(&qt.m, &qt.b, 1e-10, 1e-10, 50).expect("converges"))
    });
}

fn bench_smw(c: &mut Criterion) {
    let mut group = c.benchmark_group("smw_solve");
    for cells in [4usize, 16, 64] {
        let qt = small_system(cells).expect("system");
        let (lambda1, _) = double_newton(&qt.m, &qt.b, 1e-10, 1e-10, 50).expect("converges");
        let fact =
            complete_factorization(&lambda1, &qt.b, &qt.m_l, &qt.m_r).expect("factorization");
        group.bench_with_input(BenchmarkId::from_parameter(cells), &qt, |b, qt| {
            b.iter(|| smw_solve(&fact, qt).expect("solve"))
        });
    }
    group.finish();
}

fn bench_feti_build(c: &mut Criterion) {
    let cfg = small_config(4).expect("config");
    c.bench_function("feti_build", |b| {
        b.iter(|| FetiModel::build(&cfg).expect("build"))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_double_newton, bench_smw, bench_feti_build
}
criterion_main!(benches);
