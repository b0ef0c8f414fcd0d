//! Criterion benchmarks for the hot kernels: lattice-sum evaluation,
//! infinite products, series inversion, system uncoupling and solving,
//! partition enumeration, and certificate checking.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qfold::certify::{numeric_check, recurrence_combination, Family};
use qfold::exactalg::Monomial;
use qfold::multisum::{evaluate, mod14_spec};
use qfold::partitions::{enumerate_base, genfun, SetName};
use qfold::qseries::{pochhammer, product_from_residues, theta};
use qfold::shiftrec::{nandi_system, rec_f7, solve_scalar_unique, uncouple};

fn bench_multisum(c: &mut Criterion) {
    let spec = mod14_spec(&[0, 0, 0, 0]).unwrap();
    c.bench_function("multisum evaluate mod-14 order 100", |b| {
        b.iter(|| evaluate(black_box(&spec), 100).unwrap())
    });
    c.bench_function("multisum evaluate mod-14 order 200", |b| {
        b.iter(|| evaluate(black_box(&spec), 200).unwrap())
    });
}

fn bench_products(c: &mut Criterion) {
    let q = Monomial::q_pow_int(1, 1);
    c.bench_function("pochhammer (q;q)_inf order 400", |b| {
        b.iter(|| pochhammer(black_box(&q), &q, None, 400).unwrap())
    });
    c.bench_function("theta q^2 base q^14 order 400", |b| {
        b.iter(|| {
            theta(
                black_box(&Monomial::q_pow_int(1, 2)),
                &Monomial::q_pow_int(1, 14),
                400,
            )
            .unwrap()
        })
    });
    c.bench_function("residue product mod 14 order 400", |b| {
        b.iter(|| product_from_residues(14, black_box(&[2, 3, 4, 10, 11, 12]), 400).unwrap())
    });
}

fn bench_inversion(c: &mut Criterion) {
    let q = Monomial::q_pow_int(1, 1);
    let euler = pochhammer(&q, &q, None, 300).unwrap().truncate_to(300);
    c.bench_function("series invert order 300", |b| {
        b.iter(|| black_box(&euler).invert().unwrap())
    });
}

fn bench_shiftrec(c: &mut Criterion) {
    let sys = nandi_system();
    let target = sys.component("F7").unwrap();
    c.bench_function("uncouple 7x7 system", |b| {
        b.iter(|| uncouple(black_box(&sys), target, 6).unwrap())
    });
    let rec = rec_f7();
    c.bench_function("solve scalar recurrence x<=10 q<60", |b| {
        b.iter(|| solve_scalar_unique(black_box(&rec), 10, 60).unwrap())
    });
}

fn bench_partitions(c: &mut Criterion) {
    c.bench_function("enumerate base set to weight 40", |b| {
        b.iter(|| {
            let mut count = 0u64;
            enumerate_base(40, &mut |_| count += 1).unwrap();
            count
        })
    });
    c.bench_function("generating function weight 40", |b| {
        b.iter(|| genfun(black_box(SetName::N1), 40).unwrap())
    });
}

fn bench_certify(c: &mut Criterion) {
    let comb = recurrence_combination(&rec_f7(), Family::S, [0, 0, 0, 0]).unwrap();
    c.bench_function("numeric residual check order 60", |b| {
        b.iter(|| numeric_check(black_box(&comb), 60).unwrap())
    });
}

criterion_group!(
    benches,
    bench_multisum,
    bench_products,
    bench_inversion,
    bench_shiftrec,
    bench_partitions,
    bench_certify
);
criterion_main!(benches);
