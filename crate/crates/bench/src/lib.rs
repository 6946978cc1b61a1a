//! Shared fixtures for the benchmarks.

use nlsd_core::dist::ErrorDistribution;
use nlsd_core::{ModelSpec, TimeSeries};

/// MAR(1,1) sample with Student-t(5) errors.
pub fn mar11(t: usize, seed: u64) -> (ModelSpec, TimeSeries) {
    let spec = ModelSpec::mar(vec![0.4], vec![0.7]).expect("stationary");
    let y = spec.simulate(ErrorDistribution::StudentT { nu: 5.0 }, t, None, seed).expect("simulates").series;
    (spec, y)
}

/// MAR(0,1) sample with Student-t(5) errors.
pub fn mar01(psi: f64, t: usize, seed: u64) -> (ModelSpec, TimeSeries) {
    let spec = ModelSpec::mar(vec![], vec![psi]).expect("stationary");
    let y = spec.simulate(ErrorDistribution::StudentT { nu: 5.0 }, t, None, seed).expect("simulates").series;
    (spec, y)
}
