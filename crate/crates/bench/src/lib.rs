//! Fixed parameter sets and evaluation points shared by the benchmarks.

use nvgz::verify::SampleSpec;
use nvgz::{expand_blocks, BlockSeed, ParameterSet, PotentialEvaluator, SpacetimePoint, C64};

/// The first `n` of four well-separated block seeds at unit energy.
pub fn fixture(n: usize) -> ParameterSet {
    let seeds = [
        BlockSeed::new(C64::new(2f64.sqrt(), 0.0), C64::new(1.0, 0.0)),
        BlockSeed::new(C64::new(0.0, 2.0), C64::new(0.5, 0.0)),
        BlockSeed::new(C64::new(1.3, 1.1), C64::new(-0.4, 0.3)),
        BlockSeed::new(C64::new(-0.35, 0.5), C64::new(0.2, -0.8)),
    ];
    assert!((1..=seeds.len()).contains(&n), "fixture has 1..=4 blocks");
    expand_blocks(1.0, &seeds[..n]).expect("fixture seeds are valid")
}

pub fn evaluator(n: usize) -> PotentialEvaluator {
    PotentialEvaluator::new(fixture(n)).expect("fixture seeds are valid")
}

pub fn points(count: usize) -> Vec<SpacetimePoint> {
    SampleSpec::new(count, 0).points()
}
