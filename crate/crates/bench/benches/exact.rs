use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use solenoid_bench::{random_matrix, Lcg};
use solenoid_core::profinite::{ModulusChain, ProfiniteInt};
use solenoid_core::rank_one::{type_from_tower, SolenoidTower1D};
use solenoid_core::solv3::{self, HypMatrix, QuadField};
use solenoid_core::BigInt;

fn profinite(c: &mut Criterion) {
    let mut group = c.benchmark_group("profinite_mul");
    for depth in [12, 24] {
        let chain = ModulusChain::factorial(depth).unwrap();
        let x = ProfiniteInt::embed(&BigInt::from(-987_654_321_987i64), &chain);
        let y = ProfiniteInt::embed(&BigInt::from(123_456_789_123i64), &chain);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &(x, y), |b, (x, y)| {
            b.iter(|| black_box(x.mul(y).unwrap()))
        });
    }
    group.finish();
}

fn smith(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_diagonal");
    for n in [3, 5, 8] {
        let m = random_matrix(n, 50, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| black_box(m.smith_diagonal())));
    }
    group.finish();
}

fn baer(c: &mut Criterion) {
    let t = SolenoidTower1D::with_repeat(vec![2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], true).unwrap();
    c.bench_function("type_from_tower", |b| b.iter(|| black_box(type_from_tower(&t))));
}

fn solv(c: &mut Criterion) {
    // conjugate pairs P·A·P⁻¹ with random unimodular P
    let a: HypMatrix = "7,2;3,1".parse().unwrap();
    let mut rng = Lcg::new(5);
    let pairs: Vec<(HypMatrix, HypMatrix)> = (0..16)
        .map(|_| {
            let (k, l) = (rng.int(-6, 6) as i128, rng.int(-6, 6) as i128);
            // P = [[1,k],[0,1]]·[[1,0],[l,1]], det 1, P⁻¹ = [[1,0],[-l,1]]·[[1,-k],[0,1]]
            let p = [[1 + k * l, k], [l, 1]];
            let pinv = [[1, -k], [-l, 1 + k * l]];
            let e = a.entries();
            let mul = |x: [[i128; 2]; 2], y: [[i128; 2]; 2]| {
                [[x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
                 [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]]]
            };
            let m = mul(mul(p, e), pinv);
            let b = HypMatrix::new(m[0][0], m[0][1], m[1][0], m[1][1]).unwrap();
            (a, b)
        })
        .collect();
    c.bench_function("gl2z_conjugator", |b| {
        b.iter(|| {
            for (x, y) in &pairs {
                black_box(solv3::gl2z_conjugator(x, y));
            }
        })
    });
    let fields: Vec<QuadField> = [94u64, 151, 199, 313, 331].iter().map(|&d| QuadField::new(d).unwrap()).collect();
    c.bench_function("fundamental_unit", |b| {
        b.iter(|| {
            for f in &fields {
                black_box(solv3::fundamental_unit(*f));
            }
        })
    });
}

criterion_group!(benches, profinite, smith, baer, solv);
criterion_main!(benches);
