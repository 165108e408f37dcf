use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use diffreduce::encoder::config_difference;
use diffreduce::membership::{certify, independence_check, verify_certificate, CertifyOutcome, Oracle, OracleBounds};
use diffreduce::minsky::library;
use diffreduce::{Algebra, CoeffRing, Config, DerivOp, DiffPoly, EncodedSystem};
use std::hint::black_box;

fn q() -> Algebra {
    Algebra::quotient(CoeffRing::Rationals)
}

fn poly_kernel(c: &mut Criterion) {
    let alg = Algebra::free(CoeffRing::Rationals);
    let a = DiffPoly::parse(alg, "3*x1[1,0]*q0[2,1]^2 - x2[0,2]*t + 5/2*q1*x1 + 7").unwrap();
    let b = DiffPoly::parse(alg, "x1[0,1]^2 + q0[1,1]*t[1,0] - 2*x2").unwrap();
    c.bench_function("poly/mul", |bch| bch.iter(|| black_box(&a).mul(black_box(&b)).unwrap()));
    let p = a.mul(&b).unwrap();
    let mut g = c.benchmark_group("poly/apply_theta");
    for k in [1u32, 2, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |bch, &k| bch.iter(|| p.apply_theta(&DerivOp::d2(k, k))));
    }
    g.finish();
}

fn certificates(c: &mut Criterion) {
    let sys = EncodedSystem::compile(&library::transfer(), q()).unwrap();
    let start = Config::new(1, 12u32, 3u32);
    c.bench_function("certify/transfer", |bch| bch.iter(|| certify(&sys, black_box(&start), None, 10_000).unwrap()));
    let CertifyOutcome::Certified(cert) = certify(&sys, &start, None, 10_000).unwrap() else { unreachable!() };
    c.bench_function("verify/transfer", |bch| bch.iter(|| verify_certificate(&sys, black_box(&cert)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let sys = EncodedSystem::compile(&library::dec_to_one(), q()).unwrap();
    let mut g = c.benchmark_group("oracle/dec_to_one");
    g.sample_size(10);
    for n in [2u32, 4, 8] {
        let target = config_difference(q(), &Config::new(1, n, 0u32), &Config::new(0, 1u32, 0u32));
        let bounds = OracleBounds { max_order: n, ..OracleBounds::default() };
        g.bench_with_input(BenchmarkId::from_parameter(n), &target, |bch, t| {
            // Fresh oracle each time so the component cache does not hide the elimination.
            bch.iter(|| Oracle::for_system(&sys, bounds).unwrap().member(t).unwrap())
        });
    }
    g.finish();
}

fn independence(c: &mut Criterion) {
    let sys = EncodedSystem::compile(&library::even(), q()).unwrap();
    let mut g = c.benchmark_group("independence/even");
    g.sample_size(10);
    for bound in [3u32, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |bch, &b| bch.iter(|| independence_check(&sys, b).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, poly_kernel, certificates, oracle, independence);
criterion_main!(benches);
