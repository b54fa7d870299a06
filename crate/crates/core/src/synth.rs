//! Synthetic driving patterns: sampled sines, random periodic sequences,
//! Lorenz attractor traces, multichannel harmonic motions and a
//! two-parameter sine-mixture family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// `y(n) = sin(2πn / period + phase)`.
pub fn sine(period: f64, length: usize, phase: f64) -> Pattern {
    let values: Vec<f64> = (0..length)
        .map(|n| (2.0 * std::f64::consts::PI * n as f64 / period + phase).sin())
        .collect();
    Pattern::scalar(format!("sine-{period}"), &values).expect("finite sine samples")
}

pub fn try_sine(period: f64, length: usize, phase: f64) -> Result<Pattern> {
    if !(period > 1.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!("sine period {period} must exceed 1")));
    }
    if length == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    Ok(sine(period, length, phase))
}

/// One uniform draw in `[-1, 1]` per phase position, tiled to `length` and
/// normalized to a maximum absolute value of 1.
pub fn random_periodic(period: usize, length: usize, seed: u64) -> Pattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cycle: Vec<f64> = (0..period.max(1)).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let peak = cycle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        cycle.iter_mut().for_each(|v| *v /= peak);
    }
    let values: Vec<f64> = (0..length).map(|n| cycle[n % cycle.len()]).collect();
    Pattern::scalar(format!("periodic-{period}-{seed}"), &values).expect("finite samples")
}

pub fn try_random_periodic(period: usize, length: usize, seed: u64) -> Result<Pattern> {
    if period < 2 {
        return Err(Error::InvalidParameter(format!("period {period} must be at least 2")));
    }
    if length == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    Ok(random_periodic(period, length, seed))
}

/// Members of the family `a·sin(2πn/P) + (1−a)·sin(4πn/P)`, parameterized by
/// the mixing weight `a` and the period `P`.
pub fn sine_mixture(weight: f64, period: f64, length: usize) -> Pattern {
    let w = 2.0 * std::f64::consts::PI / period;
    let values: Vec<f64> = (0..length)
        .map(|n| {
            let t = n as f64 * w;
            weight * t.sin() + (1.0 - weight) * (2.0 * t).sin()
        })
        .collect();
    Pattern::scalar(format!("mix-{weight:.3}-{period:.3}"), &values).expect("finite samples")
}

/// A `dim`-channel periodic motion: every channel is a random combination of
/// the fundamental and the second harmonic of `period`, with its own phases,
/// scaled so the largest absolute value is 1.
pub fn harmonic_motion(dim: usize, period: f64, length: usize, seed: u64) -> Result<Pattern> {
    if !(period > 2.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!("motion period {period} must exceed 2")));
    }
    if dim == 0 || length == 0 {
        return Err(Error::InvalidParameter("dim and length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = 2.0 * std::f64::consts::PI / period;
    let channels: Vec<[f64; 4]> = (0..dim)
        .map(|_| {
            [
                rng.gen_range(0.3..1.0),
                rng.gen_range(0.0..0.6),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ]
        })
        .collect();
    let mut samples: Vec<Vec<f64>> = (0..length)
        .map(|n| {
            let t = n as f64 * w;
            channels.iter().map(|[a, b, p1, p2]| a * (t + p1).sin() + b * (2.0 * t + p2).sin()).collect()
        })
        .collect();
    let peak = samples.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    samples.iter_mut().flatten().for_each(|v| *v /= peak);
    Pattern::new(format!("motion-{period}-{seed}"), samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub dt: f64,
    /// Number of output samples.
    pub length: usize,
    /// Integration steps per output sample.
    pub subsample: usize,
    /// Integration steps discarded before recording.
    pub transient: usize,
    pub init: [f64; 3],
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            dt: 0.005,
            length: 2000,
            subsample: 3,
            transient: 5000,
            init: [1.0, 1.0, 1.0],
        }
    }
}

fn lorenz_rhs(p: &LorenzParams, s: [f64; 3]) -> [f64; 3] {
    [
        p.sigma * (s[1] - s[0]),
        s[0] * (p.rho - s[2]) - s[1],
        s[0] * s[1] - p.beta * s[2],
    ]
}

fn rk4_step(p: &LorenzParams, s: [f64; 3], h: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], k: f64| [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]];
    let k1 = lorenz_rhs(p, s);
    let k2 = lorenz_rhs(p, add(s, k1, h / 2.0));
    let k3 = lorenz_rhs(p, add(s, k2, h / 2.0));
    let k4 = lorenz_rhs(p, add(s, k3, h));
    [
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Raw `(x, y, z)` trajectory sampled every `subsample` RK4 steps.
pub fn lorenz_trajectory(p: &LorenzParams) -> Result<Vec<[f64; 3]>> {
    if !(p.dt > 0.0 && p.dt <= 0.05) {
        return Err(Error::InvalidParameter(format!("dt {} must lie in (0, 0.05]", p.dt)));
    }
    if p.subsample == 0 || p.length == 0 {
        return Err(Error::InvalidParameter("length and subsample must be positive".into()));
    }
    let mut s = p.init;
    let mut out = Vec::with_capacity(p.length);
    let total = p.transient + p.length * p.subsample;
    for k in 0..total {
        if k >= p.transient && (k - p.transient) % p.subsample == 0 {
            out.push(s);
        }
        s = rk4_step(p, s, p.dt);
        if s.iter().any(|v| !v.is_finite() || v.abs() > 1e6) {
            return Err(Error::Unstable { step: k });
        }
    }
    Ok(out)
}

/// Lorenz x-coordinate rescaled to `[-1, 1]`.
pub fn lorenz(p: &LorenzParams) -> Result<Pattern> {
    let traj = lorenz_trajectory(p)?;
    let xs: Vec<f64> = traj.iter().map(|s| s[0]).collect();
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let scaled: Vec<f64> = if span > 0.0 {
        xs.iter().map(|v| 2.0 * (v - lo) / span - 1.0).collect()
    } else {
        vec![0.0; xs.len()]
    };
    Pattern::scalar("lorenz", &scaled)
}

/// Delay embedding `(s(n), s(n+τ), …, s(n+(dim−1)τ))`.
pub fn delay_embed(signal: &[f64], tau: usize, dim: usize) -> Vec<Vec<f64>> {
    let span = tau * dim.saturating_sub(1);
    if dim == 0 || signal.len() <= span {
        return Vec::new();
    }
    (0..signal.len() - span)
        .map(|n| (0..dim).map(|k| signal[n + k * tau]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_period_four() {
        let p = sine(4.0, 8, 0.0);
        let expect = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0];
        for (a, b) in p.channel(0).iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(try_sine(1.0, 10, 0.0).is_err());
    }

    #[test]
    fn random_periodic_repeats_exactly() {
        let p = random_periodic(5, 40, 1);
        let v = p.channel(0);
        for n in 0..35 {
            assert_eq!(v[n + 5], v[n]);
        }
        assert_eq!(v.iter().fold(0.0f64, |m, x| m.max(x.abs())), 1.0);
        assert_eq!(random_periodic(5, 40, 1), p);
        assert!(try_random_periodic(1, 10, 0).is_err());
    }

    #[test]
    fn lorenz_rejects_large_dt() {
        let p = LorenzParams { dt: 0.1, ..Default::default() };
        assert!(lorenz(&p).is_err());
    }

    #[test]
    fn lorenz_without_drive_decays() {
        let p = LorenzParams { rho: 0.0, transient: 0, length: 200, subsample: 50, dt: 0.01, ..Default::default() };
        let traj = lorenz_trajectory(&p).unwrap();
        let last = traj.last().unwrap();
        assert!(last.iter().all(|v| v.abs() < 1e-6), "{last:?}");
    }

    #[test]
    fn delay_embedding_shape() {
        let s: Vec<f64> = (0..10).map(f64::from).collect();
        let e = delay_embed(&s, 2, 3);
        assert_eq!(e.len(), 6);
        assert_eq!(e[0], vec![0.0, 2.0, 4.0]);
        assert!(delay_embed(&s, 5, 3).is_empty());
    }
}
