use conceptor_core::{linalg, synth, Reservoir, ReservoirParams};
use proptest::prelude::*;

fn params(n: usize, seed: u64, rho: f64) -> ReservoirParams {
    let mut p = ReservoirParams::new(n, 1).with_seed(seed);
    p.spectral_radius = rho;
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn construction_is_bit_identical(seed in any::<u64>(), n in 2usize..40) {
        let a = Reservoir::new(params(n, seed, 1.5)).unwrap();
        let b = Reservoir::new(params(n, seed, 1.5)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn spectral_radius_matches_request(seed in any::<u64>(), n in 2usize..40, rho in 0.1f64..3.0) {
        let res = Reservoir::new(params(n, seed, rho)).unwrap();
        prop_assert!((linalg::spectral_radius(res.w()) - rho).abs() < 1e-10);
        prop_assert!(res.w().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn drive_is_deterministic_and_bounded(seed in any::<u64>(), pseed in any::<u64>(), period in 2usize..9) {
        let res = Reservoir::new(params(30, seed, 1.5)).unwrap();
        let p = synth::random_periodic(period, 300, pseed);
        let a = res.drive(&p, 50).unwrap();
        let b = res.drive(&p, 50).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.states.ncols(), a.inputs.ncols());
        prop_assert!(a.states.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn contracting_reservoir_inherits_period(seed in any::<u64>(), rho in 0.2f64..0.9, period in 2usize..9) {
        let res = Reservoir::new(params(30, seed, rho)).unwrap();
        let p = synth::random_periodic(period, 700, seed ^ 1);
        let cloud = res.drive(&p, 500).unwrap();
        for n in 0..cloud.len() - period {
            let gap = (cloud.states.column(n + period) - cloud.states.column(n)).norm();
            prop_assert!(gap < 1e-6, "step {n}: {gap:e}");
        }
    }
}
