//! Signal comparison and summary statistics.

use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// `sqrt(mean (a − b)² / var b)` for scalar sequences of equal length.
pub fn nrmse_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: a.len() });
    }
    if b.is_empty() {
        return Err(Error::ZeroVariance);
    }
    let var = variance(b);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let mse = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64;
    Ok((mse / var).sqrt())
}

/// NRMSE of `a` against reference `b`, averaged over signal dimensions.
pub fn nrmse(a: &Pattern, b: &Pattern) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), got: a.dim() });
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: a.len() });
    }
    let mut total = 0.0;
    for d in 0..a.dim() {
        total += nrmse_slices(&a.channel(d), &b.channel(d))?;
    }
    Ok(total / a.dim() as f64)
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population variance.
pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    mean(&v.iter().map(|x| (x - m).powi(2)).collect::<Vec<_>>())
}

/// Catmull-Rom interpolation of `s` at fractional index `t`; needs
/// `1 ≤ t` and `t + 2 < s.len()`.
fn cubic_at(s: &[f64], t: f64) -> f64 {
    let i = t.floor() as usize;
    let f = t - i as f64;
    let (p0, p1, p2, p3) = (s[i - 1], s[i], s[i + 1], s[i + 2]);
    p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)))
}

/// Smallest NRMSE between `reference` and a window of `output` starting at
/// any integer shift in `0..=max_shift`. With `subsample`, every local
/// minimum of the integer scan is refined to 0.0025 samples using cubic
/// interpolation of `output`; the true optimum may sit just below an integer
/// shift that is not the global integer minimum.
pub fn aligned_nrmse(output: &Pattern, reference: &Pattern, max_shift: usize, subsample: bool) -> Result<f64> {
    aligned_error(output, reference, max_shift, subsample, nrmse_slices)
}

/// Like [`aligned_nrmse`] but unnormalized, so it is defined for constant
/// references too.
pub fn aligned_rmse(output: &Pattern, reference: &Pattern, max_shift: usize, subsample: bool) -> Result<f64> {
    aligned_error(output, reference, max_shift, subsample, rmse_slices)
}

fn rmse_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: a.len() });
    }
    Ok(mean(&a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).collect::<Vec<_>>()).sqrt())
}

fn aligned_error(
    output: &Pattern,
    reference: &Pattern,
    max_shift: usize,
    subsample: bool,
    error: fn(&[f64], &[f64]) -> Result<f64>,
) -> Result<f64> {
    if output.dim() != reference.dim() {
        return Err(Error::DimensionMismatch { expected: reference.dim(), got: output.dim() });
    }
    let len = reference.len();
    if output.len() < len + max_shift {
        return Err(Error::TooShort { len: output.len(), washout: len + max_shift });
    }
    let outs: Vec<Vec<f64>> = (0..output.dim()).map(|d| output.channel(d)).collect();
    let refs: Vec<Vec<f64>> = (0..reference.dim()).map(|d| reference.channel(d)).collect();
    let eval = |shifted: &dyn Fn(&[f64]) -> Vec<f64>| -> Result<f64> {
        let mut total = 0.0;
        for (o, r) in outs.iter().zip(&refs) {
            total += error(&shifted(o), r)?;
        }
        Ok(total / refs.len() as f64)
    };
    let errs = (0..=max_shift).map(|s| eval(&|o: &[f64]| o[s..s + len].to_vec())).collect::<Result<Vec<f64>>>()?;
    let mut best = errs.iter().copied().fold(f64::INFINITY, f64::min);
    if !subsample {
        return Ok(best);
    }
    let fits = |t0: f64| t0 >= 1.0 && t0 + len as f64 + 2.0 <= output.len() as f64;
    let at = |t0: f64| eval(&|o: &[f64]| (0..len).map(|n| cubic_at(o, t0 + n as f64)).collect());
    let minima = (0..errs.len()).filter(|&s| {
        (s == 0 || errs[s] <= errs[s - 1]) && (s + 1 == errs.len() || errs[s] <= errs[s + 1])
    });
    for start in minima {
        // Coarse pass at 0.05 samples, then a fine pass at 0.0025 around the best.
        let mut center = start as f64;
        let mut local_best = errs[start];
        for step in [0.05, 0.0025] {
            let mut local = center;
            for k in -19..=19 {
                let t0 = center + step * k as f64;
                if k == 0 || !fits(t0) {
                    continue;
                }
                let e = at(t0)?;
                if e < local_best {
                    local_best = e;
                    local = t0;
                }
            }
            center = local;
        }
        best = best.min(local_best);
    }
    Ok(best)
}

/// Period of the strongest spectral peak of `signal` (mean removed), searched
/// over periods in `[min_period, max_period]` on a grid of `resolution` frequencies.
pub fn dominant_period(signal: &[f64], min_period: f64, max_period: f64, resolution: usize) -> f64 {
    let m = mean(signal);
    let centered: Vec<f64> = signal.iter().map(|v| v - m).collect();
    let (f_lo, f_hi) = (1.0 / max_period, 1.0 / min_period);
    let steps = resolution.max(2);
    let mut best = (0.0, f_lo);
    for k in 0..steps {
        let f = f_lo + (f_hi - f_lo) * k as f64 / (steps - 1) as f64;
        let w = 2.0 * std::f64::consts::PI * f;
        let (mut re, mut im) = (0.0, 0.0);
        for (n, v) in centered.iter().enumerate() {
            let (s, c) = (w * n as f64).sin_cos();
            re += v * c;
            im += v * s;
        }
        let power = re * re + im * im;
        if power > best.0 {
            best = (power, f);
        }
    }
    1.0 / best.1
}

/// Lag of the first autocorrelation maximum after the first zero crossing,
/// refined by parabolic interpolation.
pub fn autocorrelation_peak(signal: &[f64], max_lag: usize) -> Option<f64> {
    let m = mean(signal);
    let c: Vec<f64> = signal.iter().map(|v| v - m).collect();
    let ac: Vec<f64> = (0..=max_lag.min(c.len().saturating_sub(1)))
        .map(|lag| (0..c.len() - lag).map(|n| c[n] * c[n + lag]).sum::<f64>() / (c.len() - lag) as f64)
        .collect();
    let first_neg = ac.iter().position(|v| *v < 0.0)?;
    let peak = (first_neg..ac.len() - 1).find(|&k| k > 0 && ac[k] >= ac[k - 1] && ac[k] >= ac[k + 1])?;
    let (a, b, cc) = (ac[peak - 1], ac[peak], ac[peak + 1]);
    let denom = a - 2.0 * b + cc;
    let offset = if denom.abs() > 0.0 { 0.5 * (a - cc) / denom } else { 0.0 };
    Some(peak as f64 + offset)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn directed_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Largest pairwise distance within a point set.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(dist(p, q));
        }
    }
    d
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let (ma, mb) = (mean(&ra), mean(&rb));
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}
