//! Fixed random recurrent networks and the state clouds they produce when
//! driven by a pattern.
//!
//! The update rule is the leak-free tanh network
//! `x(n+1) = tanh(W x(n) + W_in p(n+1) + b)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::pattern::Pattern;

pub const DEFAULT_WASHOUT: usize = 500;
const MAX_DRAWS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirParams {
    pub n_neurons: usize,
    pub input_dim: usize,
    pub spectral_radius: f64,
    pub input_scaling: f64,
    pub bias_scaling: f64,
    /// Fraction of nonzero recurrent weights.
    pub connectivity: f64,
    pub seed: u64,
}

impl ReservoirParams {
    /// Demo defaults: spectral radius 1.5, input scaling 1.5, bias 0.2, dense
    /// up to 100 neurons and about ten connections per neuron beyond.
    pub fn new(n_neurons: usize, input_dim: usize) -> Self {
        let connectivity = if n_neurons <= 100 { 1.0 } else { 10.0 / n_neurons as f64 };
        Self {
            n_neurons,
            input_dim,
            spectral_radius: 1.5,
            input_scaling: 1.5,
            bias_scaling: 0.2,
            connectivity,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.n_neurons == 0 {
            return bad("n_neurons must be positive");
        }
        if self.input_dim == 0 {
            return bad("input_dim must be positive");
        }
        if !(self.spectral_radius > 0.0 && self.spectral_radius.is_finite()) {
            return bad("spectral_radius must be positive");
        }
        if !(self.input_scaling >= 0.0 && self.input_scaling.is_finite()) {
            return bad("input_scaling must be nonnegative");
        }
        if !(self.bias_scaling >= 0.0 && self.bias_scaling.is_finite()) {
            return bad("bias_scaling must be nonnegative");
        }
        if !(self.connectivity > 0.0 && self.connectivity <= 1.0) {
            return bad("connectivity must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    params: ReservoirParams,
    #[serde(with = "crate::serde_mat")]
    w: DMatrix<f64>,
    #[serde(with = "crate::serde_mat")]
    w_in: DMatrix<f64>,
    #[serde(with = "crate::serde_mat::vector")]
    bias: DVector<f64>,
}

impl Reservoir {
    /// Draws a reservoir from `params.seed`. Recurrent weights are standard
    /// normal, masked to the requested connectivity and rescaled to the
    /// target spectral radius. A draw with zero spectral radius is retried
    /// with a perturbed seed.
    pub fn new(params: ReservoirParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_neurons;
        let m = params.input_dim;
        for attempt in 0..MAX_DRAWS {
            let seed = params.seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = DMatrix::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    let keep = params.connectivity >= 1.0 || rng.gen::<f64>() < params.connectivity;
                    let v: f64 = rng.sample(StandardNormal);
                    if keep {
                        w[(i, j)] = v;
                    }
                }
            }
            let radius = linalg::spectral_radius(&w);
            if !(radius > 1e-12) {
                continue;
            }
            w *= params.spectral_radius / radius;
            let w_in = DMatrix::from_fn(n, m, |_, _| {
                rng.sample::<f64, _>(StandardNormal) * params.input_scaling
            });
            let bias = DVector::from_fn(n, |_, _| {
                rng.sample::<f64, _>(StandardNormal) * params.bias_scaling
            });
            return Ok(Self { params, w, w_in, bias });
        }
        Err(Error::DegenerateReservoir(MAX_DRAWS))
    }

    /// Assembles a reservoir from explicit weights. `params` sizes must match.
    pub fn from_parts(
        params: ReservoirParams,
        w: DMatrix<f64>,
        w_in: DMatrix<f64>,
        bias: DVector<f64>,
    ) -> Result<Self> {
        let n = params.n_neurons;
        let m = params.input_dim;
        if w.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, got: w.nrows() });
        }
        if w_in.shape() != (n, m) {
            return Err(Error::DimensionMismatch { expected: m, got: w_in.ncols() });
        }
        if bias.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: bias.len() });
        }
        Ok(Self { params, w, w_in, bias })
    }

    pub fn params(&self) -> &ReservoirParams {
        &self.params
    }

    pub fn size(&self) -> usize {
        self.params.n_neurons
    }

    pub fn input_dim(&self) -> usize {
        self.params.input_dim
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn w_in(&self) -> &DMatrix<f64> {
        &self.w_in
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), got: x.len() });
        }
        if u.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), got: u.len() });
        }
        Ok(self.step_unchecked(x, u.as_slice()))
    }

    pub(crate) fn step_unchecked(&self, x: &DVector<f64>, u: &[f64]) -> DVector<f64> {
        let mut pre = &self.w * x + &self.bias;
        for (k, &uk) in u.iter().enumerate() {
            pre.axpy(uk, &self.w_in.column(k), 1.0);
        }
        pre.map(f64::tanh)
    }

    /// Drives the network from `x(0) = 0` with `p` and keeps the states after
    /// the first `washout` steps. Column `n` of the result pairs the state
    /// with the input sample that produced it.
    pub fn drive(&self, p: &Pattern, washout: usize) -> Result<StateCloud> {
        if p.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), got: p.dim() });
        }
        if p.len() <= washout {
            return Err(Error::TooShort { len: p.len(), washout });
        }
        let n = self.size();
        let keep = p.len() - washout;
        let mut states = DMatrix::zeros(n, keep);
        let mut prev_states = DMatrix::zeros(n, keep);
        let mut x = DVector::zeros(n);
        for t in 0..p.len() {
            let u: Vec<f64> = p.sample(t).iter().copied().collect();
            let next = self.step_unchecked(&x, &u);
            if t >= washout {
                prev_states.set_column(t - washout, &x);
                states.set_column(t - washout, &next);
            }
            x = next;
        }
        Ok(StateCloud {
            states,
            prev_states,
            inputs: p.matrix().columns(washout, keep).into_owned(),
            washout,
        })
    }
}

/// Harvested states of a driven run.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCloud {
    /// `N × L`; column `n` is the state produced at step `n`.
    pub states: DMatrix<f64>,
    /// `N × L`; column `n` is the state the update at step `n` started from.
    pub prev_states: DMatrix<f64>,
    /// `M × L`; column `n` is the input applied at step `n`.
    pub inputs: DMatrix<f64>,
    pub washout: usize,
}

impl StateCloud {
    pub fn len(&self) -> usize {
        self.states.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.states.ncols() == 0
    }

    pub fn size(&self) -> usize {
        self.states.nrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn small(n: usize, rho: f64, seed: u64) -> Reservoir {
        let mut p = ReservoirParams::new(n, 1).with_seed(seed);
        p.spectral_radius = rho;
        Reservoir::new(p).unwrap()
    }

    #[test]
    fn construction_is_deterministic() {
        let a = small(3, 1.5, 42);
        let b = small(3, 1.5, 42);
        assert_eq!(a, b);
        assert_ne!(a.w(), small(3, 1.5, 43).w());
    }

    #[test]
    fn spectral_radius_is_rescaled() {
        let r = small(100, 1.5, 7);
        assert!((linalg::spectral_radius(r.w()) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn sparse_connectivity_fraction() {
        // Nonzero fraction over 20 seeds at connectivity 0.1.
        for seed in 0..20 {
            let mut p = ReservoirParams::new(100, 1).with_seed(seed);
            p.connectivity = 0.1;
            let r = Reservoir::new(p).unwrap();
            let frac = r.w().iter().filter(|v| **v != 0.0).count() as f64 / 10_000.0;
            assert!((0.05..=0.15).contains(&frac), "seed {seed}: {frac}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = ReservoirParams::new(10, 1);
        p.connectivity = 0.0;
        assert!(Reservoir::new(p.clone()).is_err());
        p.connectivity = 1.0;
        p.spectral_radius = 0.0;
        assert!(Reservoir::new(p).is_err());
    }

    #[test]
    fn step_examples() {
        let r = small(5, 1.5, 1);
        let zero = DVector::zeros(5);
        let out = r.step(&zero, &DVector::from_element(1, 3.0)).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1.0));
        assert!(r.step(&DVector::zeros(4), &DVector::zeros(1)).is_err());
        assert!(r.step(&zero, &DVector::zeros(2)).is_err());

        let mut p = ReservoirParams::new(1, 1);
        p.bias_scaling = 0.0;
        let scalar = Reservoir::from_parts(
            p,
            DMatrix::zeros(1, 1),
            DMatrix::from_element(1, 1, 1.0),
            DVector::zeros(1),
        )
        .unwrap();
        let y = scalar.step(&DVector::zeros(1), &DVector::from_element(1, 1.0)).unwrap();
        assert!((y[0] - 0.761_594_155_955_764_9).abs() < 1e-15);
        let y0 = scalar.step(&DVector::zeros(1), &DVector::zeros(1)).unwrap();
        assert_eq!(y0[0], 0.0);
    }

    #[test]
    fn drive_requires_samples_past_washout() {
        let r = small(5, 1.5, 1);
        let p = synth::sine(5.0, 10, 0.0);
        assert!(matches!(r.drive(&p, 10), Err(Error::TooShort { .. })));
        let cloud = r.drive(&p, 4).unwrap();
        assert_eq!(cloud.len(), 6);
        assert_eq!(cloud.inputs.ncols(), 6);
        assert_eq!(cloud.inputs[(0, 0)], p.sample(4)[0]);
        // Each state is the update of its predecessor under its own input.
        let again = r
            .step(&cloud.prev_states.column(2).into_owned(), &cloud.inputs.column(2).into_owned())
            .unwrap();
        assert_eq!(again, cloud.states.column(2).into_owned());
        assert_eq!(cloud.prev_states.column(3), cloud.states.column(2));
    }

    #[test]
    fn zero_drive_without_bias_stays_at_origin() {
        let mut p = ReservoirParams::new(8, 1).with_seed(3);
        p.bias_scaling = 0.0;
        let r = Reservoir::new(p).unwrap();
        let cloud = r.drive(&Pattern::scalar("z", &[0.0; 50]).unwrap(), 10).unwrap();
        assert!(cloud.states.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn periodic_drive_gives_periodic_states() {
        let r = small(50, 0.8, 11);
        let p = synth::random_periodic(4, 700, 5);
        let a = r.drive(&p, 500).unwrap();
        let b = r.drive(&p, 600).unwrap();
        for n in 0..a.len() - 4 {
            let d = (a.states.column(n + 4) - a.states.column(n)).norm();
            assert!(d < 1e-6, "step {n}: {d}");
        }
        // Shifting the washout by a multiple of the period lands on the same orbit.
        assert!((a.states.column(100) - b.states.column(0)).norm() < 1e-6);
    }
}
