use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hypercourant::algebroid::{check_hyper_with_torsion, theorem_suite};
use hypercourant::courant::nijenhuis_torsion;
use hypercourant::hyper::check_eps_hypersymplectic;
use hypercourant::{CourantStructure, TheoremInputs, TheoremKind, Z3};
use hypercourant_bench::{quaternionic, theta, torsion_instance};

fn bracket(c: &mut Criterion) {
    let mut g = c.benchmark_group("big-bracket");
    for d in [2, 3, 4] {
        let t = theta(d);
        let e = t.theta().clone();
        g.bench_with_input(BenchmarkId::new("square", d), &e, |b, e| {
            b.iter(|| black_box(e.bracket(e).unwrap()))
        });
    }
    g.finish();
}

fn torsion(c: &mut Criterion) {
    let (_, h) = quaternionic(1);
    let t = theta(4);
    c.bench_function("nijenhuis-torsion/d4", |b| {
        b.iter(|| black_box(nijenhuis_torsion(&t, h.s(Z3::ONE)).unwrap()))
    });
    let zero = CourantStructure::zero(h.basis());
    c.bench_function("hypersymplectic-check/d4", |b| {
        b.iter(|| black_box(check_eps_hypersymplectic(&zero, &h).unwrap()))
    });
    let (mu, ft) = torsion_instance();
    c.bench_function("torsion-check/d4", |b| {
        b.iter(|| black_box(check_hyper_with_torsion(&mu, &ft).unwrap()))
    });
    let inputs = TheoremInputs {
        mu,
        gamma: None,
        triple: ft,
    };
    c.bench_function("thm9_4/d4", |b| {
        b.iter(|| black_box(theorem_suite(TheoremKind::Thm9_4, &inputs).unwrap()))
    });
}

criterion_group!(benches, bracket, torsion);
criterion_main!(benches);
