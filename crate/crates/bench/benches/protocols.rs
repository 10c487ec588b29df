use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use sipkit_bench::{elements, matmul_input, rng, stream};
use sipkit_core::extension::{num_vars, MleEvalState, UnivariatePoly};
use sipkit_core::field::PrimeField;
use sipkit_core::matmul::{matmul_annotation, MatMulVerifier};
use sipkit_core::sumcheck::{moment_prover, RoundProver};
use std::hint::black_box;

fn field_ops(c: &mut Criterion) {
    let f = PrimeField::mersenne61();
    let xs = elements(f, 1024, 1);
    c.bench_function("field/mul_1024", |b| {
        b.iter(|| xs.iter().fold(f.one(), |acc, &x| acc * x))
    });
    c.bench_function("field/inverse", |b| b.iter(|| black_box(xs[7]).inverse().unwrap()));
}

fn mle_update(c: &mut Criterion) {
    let f = PrimeField::mersenne61();
    let mut g = c.benchmark_group("mle/update_1000");
    for u in [1u64 << 8, 1 << 16, 1 << 24] {
        let (ups, _) = stream(u, 1000, 2);
        let r = elements(f, num_vars(u), 3);
        g.bench_with_input(BenchmarkId::from_parameter(u), &ups, |b, ups| {
            b.iter_batched(
                || MleEvalState::new(r.clone()).unwrap(),
                |mut st| {
                    for &upd in ups {
                        st.update(upd).unwrap();
                    }
                    st.value()
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn sumcheck_prover(c: &mut Criterion) {
    let f = PrimeField::mersenne61();
    let h = UnivariatePoly::from_u64s(f, &[0, 0, 1]);
    let mut g = c.benchmark_group("sumcheck/f2_prover");
    for u in [1u64 << 10, 1 << 14] {
        let (_, freqs) = stream(u, 4 * u as usize, 4);
        let challenges = elements(f, num_vars(u), 5);
        g.bench_with_input(BenchmarkId::from_parameter(u), &freqs, |b, freqs| {
            b.iter(|| {
                let mut p = moment_prover(f, freqs, &h).unwrap();
                for &r in &challenges {
                    black_box(p.round_message());
                    p.bind(r);
                }
            })
        });
    }
    g.finish();
}

fn matmul_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("matmul/verify_n256");
    for (h, v) in [(16, 16), (256, 1), (1, 256)] {
        let input = matmul_input(4, 4, 256, h, v, 6);
        let ann = matmul_annotation(&input.instance, &input.a, &input.b).unwrap();
        let entries = input.entries();
        g.bench_function(BenchmarkId::from_parameter(format!("h{h}_v{v}")), |b| {
            b.iter(|| {
                let mut ver = MatMulVerifier::new(input.instance, &mut rng(7)).unwrap();
                for &e in &entries {
                    ver.observe(e).unwrap();
                }
                ver.verify(&ann).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, field_ops, mle_update, sumcheck_prover, matmul_verify);
criterion_main!(benches);
