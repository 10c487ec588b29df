//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sipkit_core::field::{FieldElement, PrimeField};
use sipkit_core::matmul::{MatMulInput, MatMulInstance};
use sipkit_core::stream::gen::random_stream;
use sipkit_core::stream::{frequencies, StreamUpdate};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn elements(field: PrimeField, n: usize, seed: u64) -> Vec<FieldElement> {
    field.sample_vec(&mut rng(seed), n)
}

/// Turnstile stream over `[0, u)` and its frequency vector.
pub fn stream(u: u64, n: usize, seed: u64) -> (Vec<StreamUpdate>, Vec<i64>) {
    let ups = random_stream(u, n, &mut rng(seed));
    let freqs = frequencies(ups.iter().copied(), u as usize).expect("in-range stream");
    (ups, freqs.values().to_vec())
}

/// Random `k × n` by `n × kp` product input with entries in `[-100, 100]`.
pub fn matmul_input(k: usize, kp: usize, n: usize, h: usize, v: usize, seed: u64) -> MatMulInput {
    let instance = MatMulInstance::new(PrimeField::mersenne61(), k, kp, n, h, v).expect("valid shape");
    let mut r = rng(seed);
    let mut mat = |rows: usize| -> Vec<Vec<i64>> {
        (0..rows).map(|_| (0..n).map(|_| r.gen_range(-100..=100)).collect()).collect()
    };
    let a = mat(k);
    let b = mat(kp);
    MatMulInput { instance, a, b }
}
