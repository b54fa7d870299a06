//! Shared fixtures for the criterion benches.

use conceptor_core::{load_patterns, synth, Conceptor, LoadParams, LoadedNetwork, Pattern, Reservoir, ReservoirParams};

/// A reservoir of `n` neurons with scalar input.
pub fn reservoir(n: usize) -> Reservoir {
    Reservoir::new(ReservoirParams::new(n, 1).with_seed(1)).expect("valid reservoir params")
}

/// Two sines and two random periodic patterns of `len` samples.
pub fn patterns(len: usize) -> Vec<Pattern> {
    vec![
        synth::sine(8.8342, len, 0.0),
        synth::sine(9.8342, len, 0.0),
        synth::random_periodic(5, len, 1),
        synth::random_periodic(5, len, 2),
    ]
}

pub fn load_params() -> LoadParams {
    LoadParams { aperture: 10.0, ridge_w: 0.01, ..Default::default() }
}

/// A network of `n` neurons holding [`patterns`].
pub fn network(n: usize) -> LoadedNetwork {
    load_patterns(&reservoir(n), &patterns(1500), &load_params()).expect("loading")
}

/// A conceptor computed from the state cloud of one sine, at aperture 10.
pub fn conceptor(n: usize) -> Conceptor {
    let res = reservoir(n);
    let cloud = res.drive(&synth::sine(8.8342, 1000, 0.0), 200).expect("drive");
    Conceptor::from_correlation(&conceptor_core::Correlation::from_cloud(&cloud).expect("cloud"), 10.0)
        .expect("conceptor")
}
