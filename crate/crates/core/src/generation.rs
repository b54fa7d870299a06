//! Conceptor-controlled autonomous runs of a loaded network.
//!
//! The conceptor is inserted after the nonlinearity:
//! `x(n+1) = C tanh(W̃ x(n) + b)`, with output `y(n) = W_out x(n)`.

use std::borrow::Cow;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conceptor::{mix, Aperture, Conceptor};
use crate::error::{Error, Result};
use crate::loading::LoadedNetwork;
use crate::metrics;
use crate::pattern::Pattern;
use crate::reservoir::StateCloud;

pub const DEFAULT_INIT_STEPS: usize = 200;
pub const DEFAULT_MAX_SHIFT: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateOptions {
    pub length: usize,
    /// Steps run (and discarded) before recording starts.
    pub init_steps: usize,
    /// Seed of the random initial state.
    pub seed: u64,
}

impl GenerateOptions {
    pub fn new(length: usize) -> Self {
        Self { length, init_steps: DEFAULT_INIT_STEPS, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Which conceptor governed a stretch of recorded steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSegment {
    pub start: usize,
    pub len: usize,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct GenerationRun {
    pub output: Pattern,
    /// Recorded states; `inputs` holds the outputs read out from them.
    pub states: StateCloud,
    pub schedule: Vec<ScheduleSegment>,
    /// Pre-filter states `tanh(W̃ x + b)` matching `states` column by column.
    pub raw_states: DMatrix<f64>,
    pub seed: u64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    schedule: &'a [ScheduleSegment],
    seed: u64,
    length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    nrmse: Option<f64>,
}

impl GenerationRun {
    /// Writes `<stem>.csv` with the output and `<stem>.json` with the
    /// schedule, seed and (optional) NRMSE.
    pub fn export(&self, dir: &Path, stem: &str, nrmse: Option<f64>) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{stem}.csv"));
        self.output.write_csv(&csv)?;
        let json = dir.join(format!("{stem}.json"));
        let manifest = RunManifest { schedule: &self.schedule, seed: self.seed, length: self.output.len(), nrmse };
        std::fs::write(&json, serde_json::to_string_pretty(&manifest)?)?;
        Ok(vec![csv, json])
    }
}

pub(crate) fn random_state(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.gen_range(-0.5..0.5))
}

/// Runs the filtered loop from a random state. `conceptor_at(k)` gives the
/// conceptor for step `k`, counting the initial discarded steps.
fn run_loop<'c>(
    net: &LoadedNetwork,
    init_steps: usize,
    length: usize,
    seed: u64,
    name: &str,
    conceptor_at: impl Fn(usize) -> Cow<'c, Conceptor>,
) -> Result<(Pattern, StateCloud, DMatrix<f64>)> {
    if length == 0 {
        return Err(Error::InvalidParameter("length must be at least 1".into()));
    }
    let n = net.size();
    let limit = (n as f64).sqrt() * 10.0;
    let bias = net.base().bias();
    let mut x = random_state(n, seed);
    let mut states = DMatrix::zeros(n, length);
    let mut prev_states = DMatrix::zeros(n, length);
    let mut raw = DMatrix::zeros(n, length);
    for k in 0..init_steps + length {
        let c = conceptor_at(k);
        if c.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
        }
        let r = (net.w_loaded() * &x + bias).map(f64::tanh);
        let next = c.matrix() * &r;
        if !next.iter().all(|v| v.is_finite()) || next.norm() > limit {
            return Err(Error::Unstable { step: k });
        }
        if k >= init_steps {
            let t = k - init_steps;
            prev_states.set_column(t, &x);
            states.set_column(t, &next);
            raw.set_column(t, &r);
        }
        x = next;
    }
    let outputs = net.w_out() * &states;
    let output = Pattern::from_matrix(name, outputs.clone())?;
    Ok((output, StateCloud { states, prev_states, inputs: outputs, washout: init_steps }, raw))
}

pub fn generate(net: &LoadedNetwork, c: &Conceptor, opts: &GenerateOptions) -> Result<GenerationRun> {
    let (output, states, raw_states) =
        run_loop(net, opts.init_steps, opts.length, opts.seed, "generated", |_| Cow::Borrowed(c))?;
    Ok(GenerationRun {
        output,
        states,
        raw_states,
        schedule: vec![ScheduleSegment { start: 0, len: opts.length, label: "conceptor".into() }],
        seed: opts.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallOptions {
    /// Number of reference samples compared.
    pub length: usize,
    pub max_shift: usize,
    pub subsample: bool,
    pub init_steps: usize,
    pub seed: u64,
}

impl Default for RecallOptions {
    fn default() -> Self {
        Self { length: 200, max_shift: DEFAULT_MAX_SHIFT, subsample: true, init_steps: DEFAULT_INIT_STEPS, seed: 0 }
    }
}

/// Generates under `c` and returns the phase-aligned NRMSE against the first
/// `opts.length` samples of `original`.
pub fn recall_nrmse(net: &LoadedNetwork, c: &Conceptor, original: &Pattern, opts: &RecallOptions) -> Result<f64> {
    let reference = original.window(0, opts.length.min(original.len()))?;
    let gen = GenerateOptions { length: reference.len() + opts.max_shift + 2, init_steps: opts.init_steps, seed: opts.seed };
    let run = generate(net, c, &gen)?;
    metrics::aligned_nrmse(&run.output, &reference, opts.max_shift, opts.subsample)
}

/// Generates under the fixed mixture `Σ aᵢ Cⁱ`.
pub fn morph(net: &LoadedNetwork, cs: &[Conceptor], coeffs: &[f64], opts: &GenerateOptions) -> Result<GenerationRun> {
    let mixed = mix(cs, coeffs)?;
    let mut run = generate(net, &mixed, opts)?;
    let label = coeffs.iter().map(|a| format!("{a}")).collect::<Vec<_>>().join(",");
    run.schedule[0].label = format!("mix[{label}]");
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendSchedule {
    pub hold_from: usize,
    pub ramp: usize,
    pub hold_to: usize,
}

/// One continuous run: hold `from`, ramp linearly to `to`, hold `to`. The
/// initial discarded steps run under `from`.
pub fn blend(
    net: &LoadedNetwork,
    from: &Conceptor,
    to: &Conceptor,
    schedule: BlendSchedule,
    init_steps: usize,
    seed: u64,
) -> Result<GenerationRun> {
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch { expected: from.dim(), got: to.dim() });
    }
    let BlendSchedule { hold_from, ramp, hold_to } = schedule;
    let length = hold_from + ramp + hold_to;
    let ramp_start = init_steps + hold_from;
    let conceptor_at = |k: usize| -> Cow<'_, Conceptor> {
        if k < ramp_start {
            Cow::Borrowed(from)
        } else if k >= ramp_start + ramp {
            Cow::Borrowed(to)
        } else {
            let t = (k - ramp_start + 1) as f64 / (ramp + 1) as f64;
            let mat = from.matrix() * (1.0 - t) + to.matrix() * t;
            // A convex combination of conceptors is a conceptor.
            Cow::Owned(Conceptor::from_valid(mat, Aperture::Composite))
        }
    };
    let (output, states, raw_states) = run_loop(net, init_steps, length, seed, "blend", conceptor_at)?;
    let schedule = [("from", hold_from), ("ramp", ramp), ("to", hold_to)]
        .into_iter()
        .scan(0, |start, (label, len)| {
            let seg = ScheduleSegment { start: *start, len, label: label.into() };
            *start += len;
            Some(seg)
        })
        .filter(|s| s.len > 0)
        .collect();
    Ok(GenerationRun { output, states, raw_states, schedule, seed })
}
