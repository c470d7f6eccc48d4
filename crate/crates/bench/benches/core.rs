use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use jacobi_core::forest::pi_tilde;
use jacobi_core::hopf::comult;
use jacobi_core::relations::{four_t, stu2};
use jacobi_core::{enumerate_diagrams, tree_bracket, Basis, EnumSpec, QuotientSpace, Shape, SizeFilter};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for (m, n) in [(1, 4), (2, 3), (3, 3)] {
        g.bench_function(format!("all m{m} n{n}"), |b| {
            b.iter(|| enumerate_diagrams(&EnumSpec::new(m, n, Shape::All)).unwrap())
        });
    }
    g.bench_function("forests m2 n4", |b| {
        b.iter(|| enumerate_diagrams(&EnumSpec::new(2, 4, Shape::Forest)).unwrap())
    });
    g.finish();
}

fn quotients(c: &mut Criterion) {
    let chords = enumerate_diagrams(&EnumSpec::new(2, 3, Shape::Chord)).unwrap();
    let basis = Arc::new(Basis::new(chords));
    let rels = four_t(2, 3).unwrap().vectors;
    c.bench_function("4T relations m2 n3", |b| b.iter(|| four_t(2, 3).unwrap()));
    c.bench_function("chord algebra quotient m2 n3", |b| {
        b.iter(|| QuotientSpace::new(basis.clone(), &rels).unwrap().dim())
    });
    c.bench_function("stu2 relations m2 n4 s2", |b| b.iter(|| stu2(2, 4, 2).unwrap()));
}

fn forests(c: &mut Criterion) {
    let mut spec = EnumSpec::new(2, 4, Shape::Forest);
    spec.size = SizeFilter::Exact(3);
    let pool = enumerate_diagrams(&spec).unwrap();
    c.bench_function("pi_tilde size-3 forests m2 n4", |b| {
        b.iter(|| {
            for f in &pool {
                black_box(pi_tilde(f).unwrap());
            }
        })
    });
    let all = enumerate_diagrams(&EnumSpec::new(1, 3, Shape::All)).unwrap();
    c.bench_function("comultiplication m1 n3", |b| {
        b.iter(|| {
            for d in &all {
                black_box(comult(d));
            }
        })
    });
}

fn brackets(c: &mut Criterion) {
    let trees = enumerate_diagrams(&EnumSpec::new(2, 2, Shape::Tree)).unwrap();
    c.bench_function("tree brackets m2 n2", |b| {
        b.iter(|| {
            for t in &trees {
                for u in &trees {
                    black_box(tree_bracket(t, u).unwrap());
                }
            }
        })
    });
}

criterion_group!(benches, enumeration, quotients, forests, brackets);
criterion_main!(benches);
