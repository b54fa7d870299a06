use conceptor_core::synth::{self, LorenzParams};
use conceptor_core::{metrics, Pattern};

#[test]
fn random_periodic_matches_golden() {
    let golden: Vec<f64> = include_str!("data/random_periodic_p5_seed1.csv")
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect();
    let p = synth::random_periodic(5, 20, 1);
    for (n, v) in p.channel(0).iter().enumerate() {
        assert_eq!(*v, golden[n % 5], "sample {n}");
    }
}

#[test]
fn sine_stays_in_unit_range() {
    let p = synth::sine(8.8342, 2000, 0.3);
    assert!(p.channel(0).iter().all(|v| v.abs() <= 1.0));
}

#[test]
fn irrational_sine_autocorrelation_peak() {
    let p = synth::sine(8.8357, 3000, 0.0);
    let peak = metrics::autocorrelation_peak(&p.channel(0), 20).unwrap();
    assert!((peak - 8.8357).abs() < 0.05, "{peak}");
}

#[test]
fn lorenz_is_bounded_and_keeps_moving() {
    let p = LorenzParams { length: 10_000, subsample: 1, transient: 0, ..Default::default() };
    let traj = synth::lorenz_trajectory(&p).unwrap();
    assert!(traj.iter().all(|s| s.iter().all(|v| v.abs() < 100.0)));
    let tail = &traj[9000..];
    let spread = tail.iter().map(|s| s[0]).fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min);
    assert!(spread > 10.0, "x spread {spread}");
}

#[test]
fn lorenz_step_halving_converges() {
    let coarse = LorenzParams { dt: 0.01, subsample: 1, length: 100, transient: 0, ..Default::default() };
    let fine = LorenzParams { dt: 0.005, subsample: 2, ..coarse.clone() };
    let a = synth::lorenz_trajectory(&coarse).unwrap();
    let b = synth::lorenz_trajectory(&fine).unwrap();
    for (n, (x, y)) in a.iter().zip(&b).enumerate() {
        assert!((x[0] - y[0]).abs() < 1e-3, "sample {n}: {} vs {}", x[0], y[0]);
    }
}

#[test]
fn lorenz_output_is_rescaled() {
    let p = synth::lorenz(&LorenzParams::default()).unwrap();
    let v = p.channel(0);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((hi - 1.0).abs() < 1e-12 && (lo + 1.0).abs() < 1e-12);
}

#[test]
fn harmonic_motion_shape() {
    let p = synth::harmonic_motion(8, 16.0, 100, 3).unwrap();
    assert_eq!((p.dim(), p.len()), (8, 100));
    assert_eq!(p.matrix().amax(), 1.0);
    assert!(synth::harmonic_motion(0, 16.0, 100, 3).is_err());
    assert!(synth::harmonic_motion(2, 2.0, 100, 3).is_err());
}

#[test]
fn nrmse_examples() {
    let b = synth::sine(7.0, 70, 0.0);
    assert_eq!(metrics::nrmse(&b, &b).unwrap(), 0.0);
    let std = metrics::variance(&b.channel(0)).sqrt();
    let shifted = Pattern::scalar("s", &b.channel(0).iter().map(|v| v + std).collect::<Vec<_>>()).unwrap();
    assert!((metrics::nrmse(&shifted, &b).unwrap() - 1.0).abs() < 1e-12);
    let two = Pattern::new("two", vec![vec![0.0, 1.0]; 70]).unwrap();
    assert!(metrics::nrmse(&two, &b).is_err());
    let flat = Pattern::scalar("flat", &[1.0; 70]).unwrap();
    assert!(metrics::nrmse(&b, &flat).is_err());
}
