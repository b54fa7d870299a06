//! Content-addressable recall.
//!
//! A conceptor starts at zero and is adapted online while the native
//! reservoir is driven by a short cue. The network then runs autonomously
//! with the conceptor in the loop and keeps adapting it to its own filtered
//! states, `C ← C + λ((z − Cz)zᵀ − α⁻²C)` with `z = C r`. Weak directions
//! decay to zero and strong ones saturate.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::conceptor::{Aperture, Conceptor};
use crate::error::{Error, Result};
use crate::generation::{self, GenerateOptions, RecallOptions};
use crate::linalg;
use crate::loading::LoadedNetwork;
use crate::pattern::Pattern;

/// The spectrum is re-clamped to `[0, 1]` every this many updates.
pub const CLAMP_INTERVAL: usize = 10;
const SNAPSHOT_INTERVAL: usize = 100;

#[derive(Debug, Clone)]
pub struct AdaptState {
    pub conceptor: Conceptor,
    pub learn_rate: f64,
    pub aperture: f64,
    pub step_count: usize,
    /// Network state the next step starts from.
    pub state: DVector<f64>,
    /// Mean squared state component during the cue, the reference for noise levels.
    pub signal_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CueOptions {
    /// Adapting steps.
    pub steps: usize,
    /// Cue samples driven before adaptation starts.
    pub washout: usize,
    pub learn_rate: f64,
    pub aperture: f64,
}

impl Default for CueOptions {
    fn default() -> Self {
        Self { steps: 30, washout: 100, learn_rate: 0.02, aperture: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoAdaptOptions {
    pub steps: usize,
    pub learn_rate: f64,
    /// Signal-to-noise ratio of Gaussian state noise; `None` runs noise-free.
    pub noise_snr: Option<f64>,
    pub noise_seed: u64,
    pub trace: bool,
}

impl Default for AutoAdaptOptions {
    fn default() -> Self {
        Self { steps: 10_000, learn_rate: 0.01, noise_snr: None, noise_seed: 0, trace: false }
    }
}

/// Per-session record: damping at every step, spectrum snapshots every 100
/// steps and the final conceptor.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AdaptTrace {
    pub damping: Vec<f64>,
    pub snapshots: Vec<SpectrumSnapshot>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_conceptor: Option<Conceptor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSnapshot {
    pub step: usize,
    pub spectrum: Vec<f64>,
}

impl AdaptTrace {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn adapt_step(c: &mut DMatrix<f64>, z: &DVector<f64>, learn_rate: f64, reg: f64) {
    let err = z - &*c * z;
    c.ger(learn_rate, &err, z, 1.0 - learn_rate * reg);
}

fn tidy(c: &mut DMatrix<f64>, clamp: bool) {
    *c = linalg::symmetrize(c);
    if clamp {
        *c = linalg::map_spectrum(c, |s| s.clamp(0.0, 1.0));
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("learn rate {rate} must be positive")));
    }
    Ok(())
}

/// Drives the native reservoir with `cue_signal` from the zero state and
/// adapts a conceptor, starting from zero, to the driven states.
pub fn cue(net: &LoadedNetwork, cue_signal: &Pattern, opts: &CueOptions) -> Result<AdaptState> {
    check_rate(opts.learn_rate)?;
    if !(opts.aperture > 0.0 && opts.aperture.is_finite()) {
        return Err(Error::InvalidParameter("aperture must be positive".into()));
    }
    let res = net.base();
    if cue_signal.dim() != res.input_dim() {
        return Err(Error::DimensionMismatch { expected: res.input_dim(), got: cue_signal.dim() });
    }
    let needed = opts.washout + opts.steps;
    if cue_signal.len() < needed {
        return Err(Error::TooShort { len: cue_signal.len(), washout: needed });
    }
    let n = net.size();
    let reg = opts.aperture.powi(-2);
    let mut c = DMatrix::zeros(n, n);
    let mut x = DVector::zeros(n);
    let mut power = 0.0;
    for t in 0..needed {
        let u: Vec<f64> = cue_signal.sample(t).iter().copied().collect();
        x = res.step_unchecked(&x, &u);
        if t >= opts.washout {
            let k = t - opts.washout + 1;
            adapt_step(&mut c, &x, opts.learn_rate, reg);
            tidy(&mut c, k % CLAMP_INTERVAL == 0);
            power += x.norm_squared() / n as f64;
        }
    }
    tidy(&mut c, true);
    Ok(AdaptState {
        conceptor: Conceptor::from_valid(c, Aperture::Value(opts.aperture)),
        learn_rate: opts.learn_rate,
        aperture: opts.aperture,
        step_count: opts.steps,
        state: x,
        signal_power: if opts.steps > 0 { power / opts.steps as f64 } else { 0.0 },
    })
}

/// Continues autonomously from `state`, adapting the conceptor to the
/// network's own filtered states.
pub fn autoadapt(net: &LoadedNetwork, state: &AdaptState, opts: &AutoAdaptOptions) -> Result<(AdaptState, AdaptTrace)> {
    check_rate(opts.learn_rate)?;
    let n = net.size();
    if state.conceptor.dim() != n || state.state.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: state.conceptor.dim() });
    }
    let noise = match opts.noise_snr {
        Some(snr) if snr > 0.0 => Some(
            Normal::new(0.0, (state.signal_power / snr).sqrt())
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
        Some(snr) => return Err(Error::InvalidParameter(format!("snr {snr} must be positive"))),
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.noise_seed);
    let reg = state.aperture.powi(-2);
    let limit = (n as f64).sqrt() * 10.0;
    let bias = net.base().bias();
    let mut c = state.conceptor.matrix().clone();
    let mut x = state.state.clone();
    let mut trace = AdaptTrace::default();
    for k in 1..=opts.steps {
        let mut r = (net.w_loaded() * &x + bias).map(f64::tanh);
        if let Some(dist) = &noise {
            r.iter_mut().for_each(|v| *v += dist.sample(&mut rng));
        }
        let z = &c * &r;
        if !z.iter().all(|v| v.is_finite()) || z.norm() > limit {
            return Err(Error::Unstable { step: k });
        }
        if opts.trace {
            let rr = r.norm_squared();
            trace.damping.push(if rr > 0.0 { (&r - &z).norm_squared() / rr } else { 0.0 });
        }
        adapt_step(&mut c, &z, opts.learn_rate, reg);
        tidy(&mut c, k % CLAMP_INTERVAL == 0);
        if opts.trace && k % SNAPSHOT_INTERVAL == 0 {
            trace.snapshots.push(SpectrumSnapshot { step: state.step_count + k, spectrum: linalg::sorted_eigenvalues(&c) });
        }
        x = z;
    }
    tidy(&mut c, true);
    let conceptor = Conceptor::from_valid(c, Aperture::Value(state.aperture));
    if opts.trace {
        trace.final_conceptor = Some(conceptor.clone());
    }
    Ok((
        AdaptState {
            conceptor,
            learn_rate: opts.learn_rate,
            aperture: state.aperture,
            step_count: state.step_count + opts.steps,
            state: x,
            signal_power: state.signal_power,
        },
        trace,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecallOutcome {
    pub cue_nrmse: f64,
    pub nrmse: f64,
    pub cue_spectrum: Vec<f64>,
    pub adapted_spectrum: Vec<f64>,
}

/// Cue, auto-adapt, then measure recall of `original` under the adapted
/// conceptor (and, for comparison, under the cue conceptor).
pub fn content_addressable_recall(
    net: &LoadedNetwork,
    cue_signal: &Pattern,
    original: &Pattern,
    cue_opts: &CueOptions,
    adapt_opts: &AutoAdaptOptions,
    recall: &RecallOptions,
) -> Result<RecallOutcome> {
    let cued = cue(net, cue_signal, cue_opts)?;
    let (adapted, _) = autoadapt(net, &cued, adapt_opts)?;
    let cue_nrmse = generation::recall_nrmse(net, &cued.conceptor, original, recall).unwrap_or(f64::INFINITY);
    let nrmse = generation::recall_nrmse(net, &adapted.conceptor, original, recall)?;
    Ok(RecallOutcome {
        cue_nrmse,
        nrmse,
        cue_spectrum: cued.conceptor.spectrum(),
        adapted_spectrum: adapted.conceptor.spectrum(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DampingPoint {
    pub gamma: f64,
    /// `mean ‖r − C_γ r‖² / mean ‖r‖²` over the run, `None` if it was unstable.
    pub damping: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Autofocus {
    pub best_gamma: f64,
    pub curve: Vec<DampingPoint>,
}

/// Sweeps aperture adaptations of `c` and picks the `γ` where the damping
/// ratio falls fastest on a log-log scale.
pub fn autofocus_aperture(
    net: &LoadedNetwork,
    c: &Conceptor,
    gamma_grid: &[f64],
    opts: &GenerateOptions,
) -> Result<Autofocus> {
    if gamma_grid.is_empty() {
        return Err(Error::InvalidParameter("empty gamma grid".into()));
    }
    if gamma_grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) || gamma_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("gamma grid must be positive and increasing".into()));
    }
    let mut curve = Vec::with_capacity(gamma_grid.len());
    for &gamma in gamma_grid {
        let cg = c.adapt_aperture(gamma)?;
        let damping = match generation::generate(net, &cg, opts) {
            Ok(run) => {
                let filtered = cg.matrix() * &run.raw_states;
                let total = run.raw_states.norm_squared();
                Some(if total > 0.0 { (&run.raw_states - filtered).norm_squared() / total } else { 0.0 })
            }
            Err(Error::Unstable { .. }) => None,
            Err(e) => return Err(e),
        };
        curve.push(DampingPoint { gamma, damping });
    }
    let stable: Vec<(f64, f64, f64)> = curve
        .iter()
        .filter_map(|p| p.damping.map(|d| (p.gamma, p.gamma.ln(), d.max(f64::MIN_POSITIVE).ln())))
        .collect();
    if stable.is_empty() {
        let status = curve.iter().map(|p| format!("γ={} unstable", p.gamma)).collect::<Vec<_>>().join(", ");
        return Err(Error::AutofocusFailed(status));
    }
    let best = if stable.len() == 1 {
        0
    } else {
        let slope = |i: usize| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(stable.len() - 1));
            ((stable[b].2 - stable[a].2) / (stable[b].1 - stable[a].1)).abs()
        };
        (0..stable.len()).max_by(|&i, &j| slope(i).total_cmp(&slope(j))).unwrap_or(0)
    };
    Ok(Autofocus { best_gamma: stable[best].0, curve })
}
