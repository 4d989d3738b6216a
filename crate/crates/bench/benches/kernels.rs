//! Benchmarks for the exact kernels: member averaging (the reused
//! column-profile route against the per-member polygon oracle), the greedy
//! selection, and the overlap power integral.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use dirmax_core::{
    average_over, enumerate_family, gen_field, polygon_average, q_integral, select, Dyadic,
    FamilySpec, FieldGenSpec, GridFunction,
};

fn fixture(n: u32, dlog: u32) -> (Vec<dirmax_core::Parallelogram>, GridFunction) {
    let u = gen_field(&FieldGenSpec::IidUniform { seed: 7 }, n).unwrap();
    let family = enumerate_family(&u, &FamilySpec::new(Dyadic::inv_pow2(dlog), 2)).unwrap();
    (family, GridFunction::random(3, 3))
}

fn bench_averages(c: &mut Criterion) {
    let (family, f) = fixture(4, 2);
    let mut group = c.benchmark_group("member_average");
    group.bench_function("column_profile_route", |b| {
        b.iter(|| {
            family
                .iter()
                .map(|r| average_over(r, &f))
                .fold(0usize, |acc, v| acc + v.numer().bits() as usize)
        })
    });
    group.bench_function("polygon_oracle_route", |b| {
        b.iter(|| {
            family
                .iter()
                .map(|r| polygon_average(r, &f))
                .fold(0usize, |acc, v| acc + v.numer().bits() as usize)
        })
    });
    group.finish();
}

fn bench_select(c: &mut Criterion) {
    let (family, _) = fixture(5, 2);
    c.bench_function("select_n5", |b| {
        b.iter_batched(|| family.clone(), |fam| select(&fam), BatchSize::LargeInput)
    });
}

fn bench_q_integral(c: &mut Criterion) {
    let (family, _) = fixture(5, 2);
    let sel = select(&family);
    c.bench_function("q_integral_r1_q3", |b| b.iter(|| q_integral(&sel.r1, 3)));
}

criterion_group!(benches, bench_averages, bench_select, bench_q_integral);
criterion_main!(benches);
