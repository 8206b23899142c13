use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qubopath::quadratize::quadratize;
use qubopath::{
    brute_force, compile, parse_spec, simulated_annealing, AnnealSchedule, CompiledProblem,
    Constraint, EncodingSettings, Monomial, Objective, Polynomial, ProblemSpec, Scheme,
    VariableRegistry,
};

fn fixture(name: &str) -> ProblemSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    parse_spec(&std::fs::read(path).unwrap()).unwrap()
}

fn with_scheme(spec: &ProblemSpec, scheme: Scheme) -> ProblemSpec {
    let mut s = spec.clone();
    s.encoding = spec.encoding.with_scheme(scheme);
    s
}

fn bench_compile(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile");
    for name in ["sop.json", "dpp.json"] {
        let spec = fixture(name);
        for scheme in Scheme::ALL {
            let s = with_scheme(&spec, scheme);
            group.bench_with_input(BenchmarkId::new(name, scheme.name()), &s, |b, s| {
                b.iter(|| compile(black_box(s)).unwrap())
            });
        }
    }
    group.finish();
}

/// Sum of all `k`-subsets of `n` variables, a worst case for pair sharing.
fn dense_cubic(n: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                p.add_term(Monomial::new(vec![a, b, c]), ((a + b + c) % 5) as f64 - 2.0);
            }
        }
    }
    p
}

fn bench_quadratize(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadratize");
    for n in [8, 12, 16] {
        let p = dense_cubic(n);
        let reg =
            VariableRegistry::new(EncodingSettings::single(Scheme::OneHot, 1, false), n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| {
                let mut r = reg.clone();
                quadratize(black_box(p), &mut r)
            })
        });
    }
    group.finish();
}

fn tsp(n: usize) -> CompiledProblem {
    let g = fixture("tsp.json").graph.restrict(n);
    let mut spec = ProblemSpec::new(g, EncodingSettings::single(Scheme::OneHot, n, true))
        .with_constraint(Constraint::VerticesExactlyOnce {
            paths: None,
            vertices: None,
        })
        .with_objective(Objective::Minimize);
    spec.resolve_defaults();
    compile(&spec).unwrap()
}

fn bench_brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    let four = tsp(4);
    group.bench_function("tsp4_16vars", |b| {
        b.iter(|| brute_force(black_box(&four), 24, None).unwrap())
    });
    group.finish();
}

fn bench_anneal(c: &mut Criterion) {
    let mut group = c.benchmark_group("anneal");
    group.sample_size(10);
    let schedule = AnnealSchedule {
        steps: 2000,
        ..AnnealSchedule::default()
    };
    for name in ["sop.json", "dpp.json"] {
        let compiled = compile(&fixture(name)).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| simulated_annealing(black_box(&compiled), &schedule, 0))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_compile,
    bench_quadratize,
    bench_brute_force,
    bench_anneal
);
criterion_main!(benches);
