//! Shared fixtures for the benchmarks.

use rrcr::sampler::{sample_regular_with, SamplerMethod};
use rrcr::{Graph, RngSeed};

pub const BENCH_SEED: u64 = 0xbe4c;

pub fn regular_fixture(n: usize, d: usize) -> Graph {
    sample_regular_with(n, d, RngSeed::new(BENCH_SEED).derive(&[n as u64, d as u64]), SamplerMethod::Auto)
        .expect("fixture parameters are valid")
}
