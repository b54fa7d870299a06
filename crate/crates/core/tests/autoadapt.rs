mod common;

use common::in_unit_interval;
use conceptor_core::autoadapt::{autoadapt, autofocus_aperture, content_addressable_recall, cue};
use conceptor_core::demo::{family_adapt_options, family_cue_options, family_members, family_recall_options};
use conceptor_core::{load_patterns, synth, AutoAdaptOptions, CueOptions, Error, GenerateOptions, LoadParams, LoadedNetwork, Reservoir, ReservoirParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family_network(count: usize) -> (LoadedNetwork, Vec<conceptor_core::Pattern>) {
    let mut p = ReservoirParams::new(100, 1).with_seed(1);
    p.spectral_radius = 1.2;
    p.input_scaling = 0.5;
    let res = Reservoir::new(p).unwrap();
    let members = family_members(&mut ChaCha8Rng::seed_from_u64(99), count, 1000);
    let params = LoadParams { aperture: 10.0, ridge_w: 0.01, ridge_out: 0.01, washout: 200, ..Default::default() };
    (load_patterns(&res, &members, &params).unwrap(), members)
}

fn mid_band(spectrum: &[f64]) -> usize {
    spectrum.iter().filter(|&&s| s > 0.1 && s < 0.9).count()
}

#[test]
fn spectrum_stays_clamped_and_polarizes() {
    let (net, members) = family_network(5);
    let cued = cue(&net, &members[0], &family_cue_options()).unwrap();
    let opts = AutoAdaptOptions { trace: true, steps: 3000, ..family_adapt_options(0, None) };
    let (adapted, trace) = autoadapt(&net, &cued, &opts).unwrap();
    assert_eq!(trace.damping.len(), 3000);
    assert_eq!(trace.snapshots.len(), 30);
    for snap in &trace.snapshots {
        assert!(snap.spectrum.iter().all(|&s| in_unit_interval(s)), "step {}", snap.step);
    }
    let end = adapted.conceptor.spectrum();
    assert!(end.iter().all(|&s| in_unit_interval(s)));
    assert!(mid_band(&end) <= mid_band(&cued.conceptor.spectrum()));
    assert_eq!(adapted.step_count, cued.step_count + 3000);
    assert!(trace.final_conceptor.is_some());
}

#[test]
fn cue_then_adapt_recalls_a_stored_member() {
    let (net, members) = family_network(5);
    let out = content_addressable_recall(
        &net,
        &members[1],
        &members[1],
        &family_cue_options(),
        &family_adapt_options(1, None),
        &family_recall_options(1),
    )
    .unwrap();
    assert!(out.nrmse < 0.1, "{}", out.nrmse);
}

#[test]
fn noise_is_reproducible_from_its_seed() {
    let (net, members) = family_network(3);
    let cued = cue(&net, &members[0], &family_cue_options()).unwrap();
    let opts = AutoAdaptOptions { steps: 500, ..family_adapt_options(7, Some(1.0)) };
    let (a, _) = autoadapt(&net, &cued, &opts).unwrap();
    let (b, _) = autoadapt(&net, &cued, &opts).unwrap();
    assert_eq!(a.conceptor, b.conceptor);
    let (clean, _) = autoadapt(&net, &cued, &AutoAdaptOptions { noise_snr: None, ..opts }).unwrap();
    assert_ne!(a.conceptor, clean.conceptor);
}

#[test]
fn rejects_bad_options() {
    let (net, members) = family_network(2);
    let bad_rate = CueOptions { learn_rate: 0.0, ..family_cue_options() };
    assert!(matches!(cue(&net, &members[0], &bad_rate), Err(Error::InvalidParameter(_))));
    let short = synth::sine(10.0, 50, 0.0);
    assert!(matches!(cue(&net, &short, &family_cue_options()), Err(Error::TooShort { .. })));
    let cued = cue(&net, &members[0], &family_cue_options()).unwrap();
    let bad = AutoAdaptOptions { learn_rate: f64::NAN, ..Default::default() };
    assert!(autoadapt(&net, &cued, &bad).is_err());
}

#[test]
fn autofocus_reports_every_grid_point() {
    let (net, _) = family_network(2);
    let c = &net.stored()[0].conceptor;
    let grid = [0.01, 0.1, 1.0, 10.0];
    let focus = autofocus_aperture(&net, c, &grid, &GenerateOptions::new(200)).unwrap();
    assert_eq!(focus.curve.len(), 4);
    assert!(grid.contains(&focus.best_gamma));
    assert!(autofocus_aperture(&net, c, &[], &GenerateOptions::new(10)).is_err());
    assert!(autofocus_aperture(&net, c, &[1.0, 0.5], &GenerateOptions::new(10)).is_err());
}
