//! Demo pipelines.
//!
//! Each demo builds its networks from a [`DemoConfig`], runs end to end, and
//! returns a [`DemoReport`] with named metrics, plot series, threshold checks
//! and the list of files it wrote. Everything except wall-clock fields (names
//! ending in `_seconds`) is a pure function of the config.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::autoadapt::{self, AutoAdaptOptions, CueOptions};
use crate::classify;
use crate::conceptor::{Conceptor, Correlation};
use crate::error::{Error, Result};
use crate::generation::{self, BlendSchedule, GenerateOptions, RecallOptions};
use crate::linalg;
use crate::loading::{load_patterns, LoadParams, LoadedNetwork};
use crate::metrics;
use crate::pattern::Pattern;
use crate::reservoir::{Reservoir, ReservoirParams};
use crate::synth;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const CATALOG: &[&str] = &[
    "morph-grid",
    "boolean-geometry",
    "aperture-sweep",
    "incremental-16",
    "content-addressable",
    "class-learning",
    "classify-bench",
    "multipattern-blend",
    "stability-contrast",
];

/// Partial reservoir settings; unset fields keep the demo's own choice.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirOverrides {
    pub n_neurons: Option<usize>,
    pub spectral_radius: Option<f64>,
    pub input_scaling: Option<f64>,
    pub bias_scaling: Option<f64>,
    pub connectivity: Option<f64>,
}

impl ReservoirOverrides {
    fn apply(&self, mut p: ReservoirParams) -> ReservoirParams {
        if let Some(n) = self.n_neurons {
            p.n_neurons = n;
        }
        if let Some(v) = self.spectral_radius {
            p.spectral_radius = v;
        }
        if let Some(v) = self.input_scaling {
            p.input_scaling = v;
        }
        if let Some(v) = self.bias_scaling {
            p.bias_scaling = v;
        }
        if let Some(v) = self.connectivity {
            p.connectivity = v;
        }
        p
    }
}

/// A pattern recipe in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PatternSpec {
    Sine {
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    RandomPeriodic {
        period: usize,
        seed: u64,
    },
    SineMixture {
        weight: f64,
        period: f64,
    },
    HarmonicMotion {
        dim: usize,
        period: f64,
        seed: u64,
    },
    /// A CSV or JSON pattern file, used as is.
    File {
        path: PathBuf,
    },
}

impl PatternSpec {
    pub fn build(&self, length: usize) -> Result<Pattern> {
        match self {
            PatternSpec::Sine { period, phase } => synth::try_sine(*period, length, *phase),
            PatternSpec::RandomPeriodic { period, seed } => synth::try_random_periodic(*period, length, *seed),
            PatternSpec::SineMixture { weight, period } => {
                if !(*period > 2.0 && period.is_finite()) {
                    return Err(Error::InvalidParameter(format!("mixture period {period} must exceed 2")));
                }
                Ok(synth::sine_mixture(*weight, *period, length))
            }
            PatternSpec::HarmonicMotion { dim, period, seed } => synth::harmonic_motion(*dim, *period, length, *seed),
            PatternSpec::File { path } => Pattern::load(path),
        }
    }
}

/// Run configuration. Only `demo` is required; every other field falls back
/// to the demo's built-in setting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoConfig {
    /// Demo name; the command line fills it in when the file leaves it out.
    #[serde(default)]
    pub demo: String,
    /// Reservoir seed; other seeds in the demo are derived from it.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Artifacts go to `<out_dir>/<demo>/`; nothing is written when unset.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub reservoir: Option<ReservoirOverrides>,
    /// Loading (or class) aperture.
    #[serde(default)]
    pub aperture: Option<f64>,
    /// Replaces the demo's stored patterns, where it has a fixed set.
    #[serde(default)]
    pub patterns: Option<Vec<PatternSpec>>,
}

impl DemoConfig {
    pub fn new(demo: impl Into<String>) -> Self {
        Self { demo: demo.into(), ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_out_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out_dir = Some(dir.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Lt => value < threshold,
            Comparison::Le => value <= threshold,
            Comparison::Gt => value > threshold,
            Comparison::Ge => value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `None` when the quantity could not be computed (e.g. an unstable run).
    pub value: Option<f64>,
    pub op: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub schema_version: u32,
    pub demo: String,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    /// Plot series; failed points are NaN (`null` in JSON).
    #[serde(with = "nan_as_null")]
    pub series: BTreeMap<String, Vec<f64>>,
    pub checks: Vec<Check>,
    /// File names relative to the demo's output directory.
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl DemoReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.get(name).map(Vec::as_slice)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Version(r.schema_version));
        }
        Ok(r)
    }
}

mod nan_as_null {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    type Series = BTreeMap<String, Vec<f64>>;

    pub fn serialize<S: Serializer>(series: &Series, s: S) -> Result<S::Ok, S::Error> {
        let opt: BTreeMap<&String, Vec<Option<f64>>> =
            series.iter().map(|(k, v)| (k, v.iter().map(|x| x.is_finite().then_some(*x)).collect())).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Series, D::Error> {
        let opt = BTreeMap::<String, Vec<Option<f64>>>::deserialize(d)?;
        Ok(opt.into_iter().map(|(k, v)| (k, v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())).collect())
    }
}

/// Collects a report and writes artifacts as it goes.
struct Recorder {
    report: DemoReport,
    dir: Option<PathBuf>,
}

impl Recorder {
    fn new(demo: &str, seed: u64, out_dir: Option<&Path>) -> Result<Self> {
        let dir = out_dir.map(|d| d.join(demo));
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Self {
            report: DemoReport {
                schema_version: REPORT_SCHEMA_VERSION,
                demo: demo.to_string(),
                seed,
                metrics: BTreeMap::new(),
                series: BTreeMap::new(),
                checks: Vec::new(),
                artifacts: Vec::new(),
                passed: false,
            },
            dir,
        })
    }

    /// Non-finite values are left out; checks that need them then fail.
    fn metric(&mut self, name: impl Into<String>, value: f64) {
        if value.is_finite() {
            self.report.metrics.insert(name.into(), value);
        }
    }

    fn series(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.report.series.insert(name.into(), values);
    }

    fn check(&mut self, name: impl Into<String>, value: Option<f64>, op: Comparison, threshold: f64) {
        let value = value.filter(|v| v.is_finite());
        let passed = value.is_some_and(|v| op.holds(v, threshold));
        self.report.checks.push(Check { name: name.into(), value, op, threshold, passed });
    }

    fn csv(&mut self, file: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut w = csv::Writer::from_path(dir.join(file))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.report.artifacts.push(file.to_string());
        Ok(())
    }

    fn text(&mut self, file: &str, contents: &str) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::write(dir.join(file), contents)?;
        self.report.artifacts.push(file.to_string());
        Ok(())
    }

    fn pattern(&mut self, file: &str, p: &Pattern) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        p.write_csv(&dir.join(file))?;
        self.report.artifacts.push(file.to_string());
        Ok(())
    }

    fn points(&mut self, file: &str, pts: &[Vec<f64>]) -> Result<()> {
        let dim = pts.first().map_or(0, Vec::len);
        let header: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        self.csv(file, &header, pts.iter().map(|p| p.iter().map(f64::to_string).collect()))
    }

    fn finish(mut self) -> Result<DemoReport> {
        self.report.passed = !self.report.checks.is_empty() && self.report.checks.iter().all(|c| c.passed);
        if self.dir.is_some() {
            self.report.artifacts.push("report.json".into());
            let json = self.report.to_json()?;
            if let Some(dir) = &self.dir {
                std::fs::write(dir.join("report.json"), json)?;
            }
        }
        Ok(self.report)
    }
}

/// Turns failures that a run can legitimately produce into a missing value.
fn soft<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unstable { .. } | Error::ZeroVariance | Error::AutofocusFailed(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn fmt(v: f64) -> String {
    v.to_string()
}

fn opt_fmt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub fn run_demo(config: &DemoConfig) -> Result<DemoReport> {
    let ctx = Context::new(config)?;
    match config.demo.as_str() {
        "morph-grid" => morph_grid(&ctx),
        "boolean-geometry" => boolean_geometry(&ctx),
        "aperture-sweep" => aperture_sweep(&ctx),
        "incremental-16" => incremental_16(&ctx),
        "content-addressable" => content_addressable(&ctx),
        "class-learning" => class_learning(&ctx),
        "classify-bench" => classify_bench(&ctx),
        "multipattern-blend" => multipattern_blend(&ctx),
        "stability-contrast" => stability_contrast(&ctx),
        other => Err(Error::UnknownDemo(other.to_string())),
    }
}

struct Context<'a> {
    config: &'a DemoConfig,
}

impl<'a> Context<'a> {
    fn new(config: &'a DemoConfig) -> Result<Self> {
        if !CATALOG.contains(&config.demo.as_str()) {
            return Err(Error::UnknownDemo(config.demo.clone()));
        }
        if let Some(a) = config.aperture {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter("aperture must be positive".into()));
            }
        }
        Ok(Self { config })
    }

    fn seed(&self, default: u64) -> u64 {
        self.config.seed.unwrap_or(default)
    }

    fn aperture(&self, default: f64) -> f64 {
        self.config.aperture.unwrap_or(default)
    }

    fn recorder(&self, seed: u64) -> Result<Recorder> {
        Recorder::new(&self.config.demo, seed, self.config.out_dir.as_deref())
    }

    fn reservoir(&self, params: ReservoirParams) -> Result<Reservoir> {
        let params = match &self.config.reservoir {
            Some(o) => o.apply(params),
            None => params,
        };
        Reservoir::new(params)
    }

    /// The configured patterns, or `defaults` when none are given.
    fn patterns(&self, length: usize, defaults: Vec<Pattern>) -> Result<Vec<Pattern>> {
        match &self.config.patterns {
            Some(specs) => specs.iter().map(|s| s.build(length)).collect(),
            None => Ok(defaults),
        }
    }

    fn reject_patterns(&self) -> Result<()> {
        if self.config.patterns.is_some() {
            return Err(Error::InvalidParameter(format!("demo `{}` does not take patterns", self.config.demo)));
        }
        Ok(())
    }
}

/// Reservoir with the default demo parameters and the given overrides.
fn params(n: usize, input_dim: usize, seed: u64, tweak: impl FnOnce(&mut ReservoirParams)) -> ReservoirParams {
    let mut p = ReservoirParams::new(n, input_dim).with_seed(seed);
    tweak(&mut p);
    p
}

fn named(mut ps: Vec<Pattern>, prefix: &str) -> Vec<Pattern> {
    let width = ps.len().to_string().len().max(2);
    for (i, p) in ps.iter_mut().enumerate() {
        *p = p.clone().with_name(format!("{prefix}{:0width$}", i + 1));
    }
    ps
}

// ---------------------------------------------------------------------------
// Four prototypes (two sines, two random 5-periodic) and their mixtures.

const MORPH_LENGTH: usize = 1500;
const MORPH_GRID: usize = 5;

fn morph_network(ctx: &Context, seed: u64) -> Result<(LoadedNetwork, Vec<Pattern>)> {
    let defaults = vec![
        synth::sine(8.8342, MORPH_LENGTH, 0.0),
        synth::sine(9.8342, MORPH_LENGTH, 0.0),
        synth::random_periodic(5, MORPH_LENGTH, 1),
        synth::random_periodic(5, MORPH_LENGTH, 2),
    ];
    let patterns = ctx.patterns(MORPH_LENGTH, defaults)?;
    let dim = patterns.first().map_or(1, Pattern::dim);
    let res = ctx.reservoir(params(100, dim, seed, |_| {}))?;
    let load = LoadParams { aperture: ctx.aperture(100.0), ridge_w: 0.01, ..Default::default() };
    let net = load_patterns(&res, &patterns, &load)?;
    Ok((net, patterns))
}

fn morph_grid(ctx: &Context) -> Result<DemoReport> {
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let (net, patterns) = morph_network(ctx, seed)?;
    if patterns.len() != 4 {
        return Err(Error::InvalidParameter(format!("morph-grid needs 4 patterns, got {}", patterns.len())));
    }
    let cs: Vec<Conceptor> = net.stored().iter().map(|s| s.conceptor.clone()).collect();

    for (i, p) in patterns.iter().enumerate() {
        let e = soft(generation::recall_nrmse(&net, &cs[i], p, &RecallOptions::default()))?;
        rec.metric(format!("corner_nrmse_{i}"), e.unwrap_or(f64::NAN));
        rec.check(format!("corner_{i}_recall"), e, Comparison::Lt, 0.05);
    }

    // Bilinear weights: `a` moves between the two sines (and between the two
    // periodic patterns), `b` from the sine pair to the periodic pair.
    let opts = GenerateOptions::new(500).with_seed(seed);
    let steps: Vec<f64> = (0..MORPH_GRID).map(|k| k as f64 / (MORPH_GRID - 1) as f64).collect();
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let (mut unstable, mut peak) = (0usize, 0.0f64);
    let mut edge_periods = Vec::new();
    for &b in &steps {
        for &a in &steps {
            let w = [(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b];
            let run = soft(generation::morph(&net, &cs, &w, &opts))?;
            let (period, max_abs) = match &run {
                Some(r) => {
                    let y = r.output.channel(0);
                    let m = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    for (t, v) in y.iter().take(100).enumerate() {
                        traces.push(vec![fmt(a), fmt(b), t.to_string(), fmt(*v)]);
                    }
                    (metrics::dominant_period(&y, 3.0, 20.0, 2000), m)
                }
                None => (f64::NAN, f64::NAN),
            };
            if run.is_none() {
                unstable += 1;
            } else {
                peak = peak.max(max_abs);
            }
            if b == 0.0 {
                edge_periods.push(period);
            }
            rows.push(vec![fmt(a), fmt(b), fmt(period), fmt(max_abs)]);
        }
    }
    rec.csv("grid.csv", &["a", "b", "dominant_period", "max_abs"], rows)?;
    rec.csv("grid_traces.csv", &["a", "b", "t", "y"], traces)?;

    let rho = if edge_periods.iter().all(|p| p.is_finite()) { metrics::spearman(&steps, &edge_periods) } else { f64::NAN };
    rec.metric("edge_spearman", rho);
    rec.metric("grid_max_abs", peak);
    rec.metric("grid_unstable_cells", unstable as f64);
    rec.series("edge_periods", edge_periods);
    rec.check("edge_period_monotone", Some(rho), Comparison::Gt, 0.9);
    rec.check("grid_unstable_cells", Some(unstable as f64), Comparison::Le, 0.0);
    // tanh states are bounded, so a blown-up readout means the mixture failed.
    rec.check("grid_bounded", Some(peak), Comparison::Lt, 2.0);
    rec.finish()
}

// ---------------------------------------------------------------------------
// Stored conceptors versus an unfiltered (identity) loop on the morph network.

const RESTARTS: u64 = 10;

fn restart_outputs(net: &LoadedNetwork, c: &Conceptor) -> Result<Vec<Option<Pattern>>> {
    (1..=RESTARTS)
        .map(|s| {
            let opts = GenerateOptions { length: 300, init_steps: 200, seed: s };
            Ok(soft(generation::generate(net, c, &opts))?.map(|r| r.output))
        })
        .collect()
}

/// Largest and smallest phase-aligned RMSE over all ordered pairs, divided by
/// `scale`. A failed run counts as an infinite disagreement.
fn pairwise_range(outs: &[Option<Pattern>], scale: f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (i, a) in outs.iter().enumerate() {
        for (j, b) in outs.iter().enumerate() {
            if i == j {
                continue;
            }
            let e = match (a, b) {
                (Some(a), Some(b)) => metrics::aligned_rmse(a, &b.window(0, 200)?, 50, true)? / scale,
                _ => f64::INFINITY,
            };
            lo = lo.min(e);
            hi = hi.max(e);
        }
    }
    Ok((lo, hi))
}

fn pattern_std(p: &Pattern) -> f64 {
    metrics::mean(&(0..p.dim()).map(|d| metrics::variance(&p.channel(d))).collect::<Vec<_>>()).sqrt()
}

fn stability_contrast(ctx: &Context) -> Result<DemoReport> {
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let (net, patterns) = morph_network(ctx, seed)?;
    let mut worst_stored = 0.0f64;
    let mut rows = Vec::new();
    for (i, (sp, p)) in net.stored().iter().zip(&patterns).enumerate() {
        let outs = restart_outputs(&net, &sp.conceptor)?;
        let (_, hi) = pairwise_range(&outs, pattern_std(p))?;
        rec.metric(format!("stored_{i}_max_pairwise"), hi);
        rows.push(vec![sp.name.clone(), fmt(hi)]);
        worst_stored = worst_stored.max(hi);
        if let Some(o) = outs.first().and_then(Option::as_ref) {
            rec.pattern(&format!("stored_{i}_restart.csv"), o)?;
        }
    }
    let scale = patterns.iter().map(pattern_std).sum::<f64>() / patterns.len() as f64;
    let identity = Conceptor::identity(net.size());
    let outs = restart_outputs(&net, &identity)?;
    let (lo, _) = pairwise_range(&outs, scale)?;
    rows.push(vec!["identity".into(), fmt(lo)]);
    for (k, o) in outs.iter().enumerate().take(3) {
        if let Some(o) = o {
            rec.pattern(&format!("identity_restart_{k}.csv"), o)?;
        }
    }
    rec.csv("pairwise.csv", &["filter", "pairwise_nrmse"], rows)?;
    rec.metric("stored_max_pairwise", worst_stored);
    rec.metric("identity_min_pairwise", lo);
    rec.check("stored_restarts_agree", Some(worst_stored), Comparison::Lt, 0.05);
    rec.check("identity_restarts_disagree", Some(lo), Comparison::Gt, 0.3);
    rec.finish()
}

// ---------------------------------------------------------------------------
// Two-dimensional conceptors drawn as ellipses.

fn ellipse(c: &Conceptor, points: usize) -> Vec<(f64, f64)> {
    (0..=points)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / points as f64;
            let v = c.apply(&DVector::from_vec(vec![t.cos(), t.sin()]));
            (v[0], v[1])
        })
        .collect()
}

fn random_cloud_correlation(rng: &mut ChaCha8Rng) -> Result<Correlation> {
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (major, minor): (f64, f64) = (rng.gen_range(0.8..1.5), rng.gen_range(0.1..0.4));
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let (s, c) = angle.sin_cos();
    let states = DMatrix::from_fn(2, 200, |_, _| normal.sample(rng));
    let shape = DMatrix::from_row_slice(2, 2, &[c * major, -s * minor, s * major, c * minor]);
    Correlation::from_states(&(shape * states))
}

fn boolean_geometry(ctx: &Context) -> Result<DemoReport> {
    ctx.reject_patterns()?;
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let alpha = ctx.aperture(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ra = random_cloud_correlation(&mut rng)?;
    let rb = random_cloud_correlation(&mut rng)?;
    let a = Conceptor::from_correlation(&ra, alpha)?;
    let b = Conceptor::from_correlation(&rb, alpha)?;
    let shapes = [
        ("A", a.clone()),
        ("B", b.clone()),
        ("not A", a.not()),
        ("A and B", a.and(&b)?),
        ("A or B", a.or(&b)?),
        ("A minus B", a.diff(&b)?),
    ];
    let mut rows = Vec::new();
    for (name, c) in &shapes {
        for (k, (x, y)) in ellipse(c, 120).into_iter().enumerate() {
            rows.push(vec![name.to_string(), k.to_string(), fmt(x), fmt(y)]);
        }
    }
    rec.csv("ellipses.csv", &["shape", "k", "x", "y"], rows)?;
    let (and, or) = (&shapes[3].1, &shapes[4].1);

    let de_morgan = or.distance(&a.not().and(&b.not())?.not());
    let sum = Correlation::from_matrix(ra.matrix() + rb.matrix(), ra.sample_count() + rb.sample_count())?;
    let or_semantics = or.distance(&Conceptor::from_correlation(&sum, alpha)?);
    let order_gap = |lo: &Conceptor, hi: &Conceptor| linalg::min_eigenvalue(&(hi.matrix() - lo.matrix()));
    let order = [order_gap(and, &a), order_gap(and, &b), order_gap(&a, or), order_gap(&b, or)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    rec.metric("de_morgan_error", de_morgan);
    rec.metric("or_semantics_error", or_semantics);
    rec.metric("order_min_eigen_gap", order);
    rec.metric("quota_and", and.quota());
    rec.metric("quota_or", or.quota());
    rec.check("de_morgan", Some(de_morgan), Comparison::Le, 1e-8);
    rec.check("or_is_summed_correlation", Some(or_semantics), Comparison::Le, 1e-8);
    rec.check("and_below_or_above", Some(order), Comparison::Ge, -1e-10);
    rec.finish()
}

// ---------------------------------------------------------------------------
// Lorenz attractor under a sweep of aperture adaptations.

pub const APERTURE_GRID: [f64; 10] = [1e-3, 4.6416e-3, 2.1544e-2, 0.1, 0.46416, 2.1544, 10.0, 46.416, 215.44, 1000.0];
const EMBED_LAG: usize = 2;
const LORENZ_WASHOUT: usize = 500;

fn aperture_sweep(ctx: &Context) -> Result<DemoReport> {
    ctx.reject_patterns()?;
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let res = ctx.reservoir(params(400, 1, seed, |p| {
        p.spectral_radius = 1.3;
        p.bias_scaling = 0.5;
    }))?;
    let lorenz = synth::lorenz(&synth::LorenzParams { length: 2500, ..Default::default() })?;
    let load = LoadParams { aperture: ctx.aperture(1000.0), ridge_w: 0.01, washout: LORENZ_WASHOUT, ..Default::default() };
    let net = load_patterns(&res, std::slice::from_ref(&lorenz), &load)?;
    let c = &net.stored()[0].conceptor;

    let train = lorenz.channel(0)[LORENZ_WASHOUT..].to_vec();
    let train_var = metrics::variance(&train);
    let train_cloud = synth::delay_embed(&train, EMBED_LAG, 2);
    let diameter = metrics::diameter(&train_cloud);
    rec.points("training_embedding.csv", &train_cloud)?;

    let opts = GenerateOptions { length: 1500, init_steps: 200, seed: seed + 2 };
    let focus = soft(autoadapt::autofocus_aperture(&net, c, &APERTURE_GRID, &opts))?;
    let mut rows = Vec::new();
    let mut damping = Vec::new();
    let mut var_ratio = Vec::new();
    let mut haus_ratio = Vec::new();
    for (k, &gamma) in APERTURE_GRID.iter().enumerate() {
        let d = focus.as_ref().and_then(|f| f.curve[k].damping);
        let run = soft(generation::generate(&net, &c.adapt_aperture(gamma)?, &opts))?;
        let (v, h) = match &run {
            Some(r) => {
                let y = r.output.channel(0);
                let cloud = synth::delay_embed(&y, EMBED_LAG, 2);
                if Some(gamma) == focus.as_ref().map(|f| f.best_gamma) {
                    rec.points("focused_embedding.csv", &cloud)?;
                }
                if k == 0 {
                    rec.points("smallest_gamma_embedding.csv", &cloud)?;
                }
                (metrics::variance(&y) / train_var, metrics::hausdorff(&cloud, &train_cloud) / diameter)
            }
            None => (f64::NAN, f64::NAN),
        };
        rows.push(vec![fmt(gamma), opt_fmt(d), fmt(v), fmt(h)]);
        damping.push(d.unwrap_or(f64::NAN));
        var_ratio.push(v);
        haus_ratio.push(h);
    }
    rec.csv("sweep.csv", &["gamma", "damping", "variance_ratio", "hausdorff_ratio"], rows)?;

    // Each step may rise by at most 5% of the previous value.
    let rises = damping.windows(2).filter(|w| !(w[1] <= w[0] * 1.05)).count();
    let best = focus.as_ref().map(|f| f.best_gamma);
    let best_idx = best.and_then(|g| APERTURE_GRID.iter().position(|x| *x == g));
    let focused_haus = best_idx.map(|i| haus_ratio[i]);
    rec.metric("damping_rises", rises as f64);
    rec.metric("autofocus_gamma", best.unwrap_or(f64::NAN));
    rec.metric("focused_hausdorff_ratio", focused_haus.unwrap_or(f64::NAN));
    rec.metric("smallest_gamma_variance_ratio", var_ratio[0]);
    rec.metric("attractor_diameter", diameter);
    rec.series("gamma", APERTURE_GRID.to_vec());
    rec.series("damping", damping);
    rec.series("variance_ratio", var_ratio.clone());
    rec.series("hausdorff_ratio", haus_ratio);
    rec.check("damping_nonincreasing", Some(rises as f64), Comparison::Le, 0.0);
    rec.check("focused_attractor_overlap", focused_haus, Comparison::Lt, 0.15);
    rec.check("smallest_gamma_collapses", Some(var_ratio[0]), Comparison::Lt, 0.01);
    rec.finish()
}

// ---------------------------------------------------------------------------
// Sixteen patterns stored one after another.

const INCREMENTAL_LENGTH: usize = 1500;

/// Periodic patterns for incremental storage; 6–8 repeat 1–3.
pub fn incremental_patterns(length: usize) -> Vec<Pattern> {
    let r = |period, seed| synth::random_periodic(period, length, seed);
    let first = vec![r(3, 11), synth::sine(10.0, length, 0.0), r(5, 12), r(4, 13), r(6, 14)];
    let mut all = first.clone();
    all.extend(first[..3].iter().cloned());
    all.extend([r(7, 19), r(8, 20), synth::sine(12.0, length, 0.0), r(8, 22), r(9, 23), r(7, 24), r(10, 25), r(18, 26)]);
    named(all, "p")
}

fn incremental_16(ctx: &Context) -> Result<DemoReport> {
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let patterns = named(ctx.patterns(INCREMENTAL_LENGTH, incremental_patterns(INCREMENTAL_LENGTH))?, "p");
    if patterns.len() < 2 {
        return Err(Error::InvalidParameter("incremental-16 needs at least 2 patterns".into()));
    }
    let dim = patterns[0].dim();
    let res = ctx.reservoir(params(100, dim, seed, |p| p.bias_scaling = 0.5))?;
    let load = LoadParams { aperture: ctx.aperture(1000.0), ridge_w: 0.01, ridge_out: 0.01, ..Default::default() };
    let mut net = LoadedNetwork::empty(res, load);
    let mut quotas = Vec::new();
    let mut refused = vec![false; patterns.len()];
    let mut stage_rows = Vec::new();
    for (k, p) in patterns.iter().enumerate() {
        match net.incremental_load(p) {
            Ok(next) => net = next,
            Err(Error::MemoryExhausted { .. }) => refused[k] = true,
            Err(e) => return Err(e),
        }
        let stage_recall = if refused[k] {
            None
        } else {
            let c = &net.stored().last().expect("just stored").conceptor;
            soft(generation::recall_nrmse(&net, c, p, &RecallOptions::default()))?
        };
        quotas.push(net.quota());
        stage_rows.push(vec![(k + 1).to_string(), p.name().to_string(), fmt(net.quota()), refused[k].to_string(), opt_fmt(stage_recall)]);
    }
    rec.csv("stages.csv", &["stage", "pattern", "quota", "refused", "recall_nrmse_at_stage"], stage_rows)?;

    // Recall of every pattern once storing is complete.
    let mut finals = Vec::new();
    let mut final_rows = Vec::new();
    let mut stored_iter = net.stored().iter();
    for (k, p) in patterns.iter().enumerate() {
        let e = if refused[k] {
            None
        } else {
            let c = &stored_iter.next().expect("one record per stored pattern").conceptor;
            soft(generation::recall_nrmse(&net, c, p, &RecallOptions::default()))?
        };
        finals.push(e);
        final_rows.push(vec![p.name().to_string(), refused[k].to_string(), opt_fmt(e)]);
    }
    rec.csv("final_recall.csv", &["pattern", "refused", "recall_nrmse"], final_rows)?;

    let drops = quotas.windows(2).filter(|w| w[1] < w[0] - 1e-12).count();
    rec.series("quota", quotas.clone());
    rec.series("final_nrmse", finals.iter().map(|e| e.unwrap_or(f64::NAN)).collect());
    rec.metric("final_quota", *quotas.last().expect("non-empty"));
    rec.metric("quota_drops", drops as f64);
    rec.check("quota_nondecreasing", Some(drops as f64), Comparison::Le, 0.0);
    if patterns.len() == 16 {
        let dup_growth = quotas[7] - quotas[4];
        let good = finals[..15].iter().filter(|e| e.is_some_and(|v| v < 0.1)).count();
        // Pattern 16 passes if it was refused or its recall failed.
        let last = if refused[15] { f64::INFINITY } else { finals[15].unwrap_or(f64::INFINITY) };
        rec.metric("duplicate_quota_growth", dup_growth);
        rec.metric("recalled_of_first_15", good as f64);
        rec.metric("p16_nrmse", last);
        rec.metric("p16_refused", f64::from(u8::from(refused[15])));
        rec.check("duplicates_claim_no_space", Some(dup_growth), Comparison::Lt, 0.01);
        rec.check("first_15_recalled", Some(good as f64), Comparison::Ge, 12.0);
        rec.check("p16_not_recalled", Some(if last.is_finite() { last } else { f64::MAX }), Comparison::Gt, 0.3);
    }
    rec.finish()
}

// ---------------------------------------------------------------------------
// Content-addressable recall and class learning on the sine-mixture family.

const FAMILY_SEED: u64 = 99;
const FAMILY_LENGTH: usize = 1000;
const FAMILY_TRIALS: usize = 20;
pub const CLASS_SIZES: [usize; 6] = [2, 3, 5, 10, 20, 50];

/// Random members of the sine-mixture family: weight in `[0, 1)`, period in `[9, 15)`.
pub fn family_members(rng: &mut ChaCha8Rng, count: usize, length: usize) -> Vec<Pattern> {
    (0..count)
        .map(|_| {
            let weight = rng.gen_range(0.0..1.0);
            let period = rng.gen_range(9.0..15.0);
            synth::sine_mixture(weight, period, length)
        })
        .collect()
}

fn family_reservoir(ctx: &Context, seed: u64) -> Result<Reservoir> {
    ctx.reservoir(params(100, 1, seed, |p| {
        p.spectral_radius = 1.2;
        p.input_scaling = 0.5;
    }))
}

fn family_load(ctx: &Context) -> LoadParams {
    LoadParams { aperture: ctx.aperture(10.0), ridge_w: 0.01, ridge_out: 0.01, washout: 200, ..Default::default() }
}

pub fn family_cue_options() -> CueOptions {
    CueOptions { steps: 30, washout: 100, learn_rate: 0.05, aperture: 30.0 }
}

pub fn family_adapt_options(trial: u64, noise_snr: Option<f64>) -> AutoAdaptOptions {
    AutoAdaptOptions { steps: 10_000, learn_rate: 0.03, noise_snr, noise_seed: trial, trace: false }
}

pub fn family_recall_options(trial: u64) -> RecallOptions {
    RecallOptions { length: 50, seed: trial, ..Default::default() }
}

fn family_recall(net: &LoadedNetwork, p: &Pattern, trial: u64, snr: Option<f64>) -> Result<Option<f64>> {
    let out = soft(autoadapt::content_addressable_recall(
        net,
        p,
        p,
        &family_cue_options(),
        &family_adapt_options(trial, snr),
        &family_recall_options(trial),
    ))?;
    Ok(out.map(|o| o.nrmse))
}

/// Mean over trials; a failed trial makes the mean undefined.
fn mean_of(v: &[Option<f64>]) -> f64 {
    if v.iter().any(Option::is_none) {
        return f64::NAN;
    }
    metrics::mean(&v.iter().flatten().copied().collect::<Vec<_>>())
}

fn content_addressable(ctx: &Context) -> Result<DemoReport> {
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    let defaults = family_members(&mut rng, 10, FAMILY_LENGTH);
    let patterns = named(ctx.patterns(FAMILY_LENGTH, defaults)?, "m");
    let res = family_reservoir(ctx, seed)?;
    let net = load_patterns(&res, &patterns, &family_load(ctx))?;

    let trials = patterns.len().min(5);
    let mut rows = Vec::new();
    let (mut cue_err, mut clean, mut noisy) = (Vec::new(), Vec::new(), Vec::new());
    for (k, p) in patterns.iter().take(trials).enumerate() {
        let trial = k as u64;
        let cued = autoadapt::cue(&net, p, &family_cue_options())?;
        let opts = AutoAdaptOptions { trace: k == 0, ..family_adapt_options(trial, None) };
        let adapted = soft(autoadapt::autoadapt(&net, &cued, &opts))?;
        let recall = family_recall_options(trial);
        let e_cue = soft(generation::recall_nrmse(&net, &cued.conceptor, p, &recall))?;
        let e_clean = match &adapted {
            Some((state, trace)) => {
                if k == 0 {
                    rec.text("session_trace.json", &trace.to_json()?)?;
                    let spectra = cued.conceptor.spectrum().into_iter().zip(state.conceptor.spectrum());
                    let spec_rows = spectra.enumerate().map(|(i, (a, b))| vec![i.to_string(), fmt(a), fmt(b)]);
                    rec.csv("spectra.csv", &["index", "cue", "adapted"], spec_rows.collect::<Vec<_>>())?;
                }
                soft(generation::recall_nrmse(&net, &state.conceptor, p, &recall))?
            }
            None => None,
        };
        let e_noisy = family_recall(&net, p, trial, Some(1.0))?;
        rows.push(vec![p.name().to_string(), opt_fmt(e_cue), opt_fmt(e_clean), opt_fmt(e_noisy)]);
        cue_err.push(e_cue);
        clean.push(e_clean);
        noisy.push(e_noisy);
    }
    rec.csv("recall.csv", &["pattern", "cue_nrmse", "adapted_nrmse", "adapted_nrmse_snr1"], rows)?;
    let (c, n) = (mean_of(&clean), mean_of(&noisy));
    rec.metric("mean_cue_nrmse", mean_of(&cue_err));
    rec.metric("mean_adapted_nrmse", c);
    rec.metric("mean_adapted_nrmse_snr1", n);
    rec.metric("noise_penalty", n - c);
    rec.check("noise_penalty_snr1", Some(n - c), Comparison::Lt, 0.1);
    rec.finish()
}

/// Gaps that rose relative to the previous size while still above the
/// closing threshold.
pub fn gap_increases(gaps: &[f64], closed: f64) -> usize {
    gaps.windows(2).filter(|w| !(w[1] <= w[0] || w[1].abs() < closed)).count()
}

fn class_learning(ctx: &Context) -> Result<DemoReport> {
    ctx.reject_patterns()?;
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let res = family_reservoir(ctx, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    let novel = family_members(&mut rng, FAMILY_TRIALS, FAMILY_LENGTH);
    let mut rows = Vec::new();
    let (mut stored_err, mut novel_err, mut gaps) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &CLASS_SIZES {
        // Small sizes spread the trials over several independent stored sets
        // so every size averages the same number of recalls.
        let draws = FAMILY_TRIALS.div_ceil(n);
        let (mut s, mut v) = (Vec::new(), Vec::new());
        for draw in 0..draws {
            let stored = family_members(&mut rng, n, FAMILY_LENGTH);
            let net = load_patterns(&res, &stored, &family_load(ctx))?;
            for p in stored.iter().take(FAMILY_TRIALS - s.len()) {
                s.push(family_recall(&net, p, s.len() as u64, None)?);
            }
            for (k, p) in novel.iter().enumerate().skip(draw).step_by(draws) {
                v.push(family_recall(&net, p, k as u64, None)?);
            }
        }
        let (ms, mn) = (mean_of(&s), mean_of(&v));
        rows.push(vec![n.to_string(), fmt(ms), fmt(mn), fmt(mn - ms)]);
        rec.metric(format!("stored_nrmse_n{n}"), ms);
        rec.metric(format!("novel_nrmse_n{n}"), mn);
        rec.metric(format!("gap_n{n}"), mn - ms);
        stored_err.push(ms);
        novel_err.push(mn);
        gaps.push(mn - ms);
    }
    rec.csv("class_learning.csv", &["n", "stored_nrmse", "novel_nrmse", "gap"], rows)?;
    let last = *gaps.last().expect("non-empty sizes");
    let increases = if gaps.iter().all(|g| g.is_finite()) { gap_increases(&gaps, 0.05) as f64 } else { f64::NAN };
    rec.series("n", CLASS_SIZES.iter().map(|&n| n as f64).collect());
    rec.series("stored_nrmse", stored_err);
    rec.series("novel_nrmse", novel_err);
    rec.series("gap", gaps);
    rec.metric("gap_increases", increases);
    rec.check("gap_decreases_with_n", Some(increases), Comparison::Le, 0.0);
    rec.metric("abs_gap_at_largest_n", last.abs());
    rec.check("gap_closed_at_largest_n", Some(last.abs()), Comparison::Lt, 0.05);
    rec.finish()
}

// ---------------------------------------------------------------------------
// Three-class timeseries classification on a ten-neuron reservoir.

pub const BENCH_CLASSES: usize = 3;
const BENCH_PERIODS: [[f64; 2]; BENCH_CLASSES] = [[5.0, 9.0], [6.5, 4.0], [9.0, 6.0]];
const BENCH_LENGTH: usize = 30;
const BENCH_NOISE: f64 = 0.25;
const BENCH_TRAIN_PER_CLASS: usize = 30;
pub const BENCH_TEST: usize = 150;

/// One noisy two-channel sample of class `class`: class-specific periods with
/// random phase, amplitude and a small period jitter.
fn bench_sample(class: usize, id: String, rng: &mut ChaCha8Rng) -> Pattern {
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let amp: f64 = rng.gen_range(0.7..1.3);
    let jitter: f64 = rng.gen_range(0.93..1.07);
    let noise = Normal::new(0.0, BENCH_NOISE).expect("positive noise level");
    let data = DMatrix::from_fn(2, BENCH_LENGTH, |k, t| {
        let p = BENCH_PERIODS[class][k] * jitter;
        amp * (std::f64::consts::TAU * t as f64 / p + phase * (k + 1) as f64).sin() + noise.sample(rng)
    });
    Pattern::from_matrix(id, data).expect("finite samples")
}

pub fn bench_label(class: usize) -> String {
    format!("class-{class}")
}

/// Training groups per class and labeled held-out samples.
pub fn classify_bench_dataset(data_seed: u64) -> (Vec<(String, Vec<Pattern>)>, Vec<(String, Option<String>, Pattern)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    let train = (0..BENCH_CLASSES)
        .map(|c| {
            let samples = (0..BENCH_TRAIN_PER_CLASS).map(|i| bench_sample(c, format!("train-{c}-{i}"), &mut rng)).collect();
            (bench_label(c), samples)
        })
        .collect();
    let test = (0..BENCH_TEST)
        .map(|i| {
            let c = i % BENCH_CLASSES;
            (format!("test-{i}"), Some(bench_label(c)), bench_sample(c, format!("test-{i}"), &mut rng))
        })
        .collect();
    (train, test)
}

pub fn bench_reservoir_params(seed: u64) -> ReservoirParams {
    params(10, 2, seed, |p| {
        p.spectral_radius = 1.0;
        p.input_scaling = 1.0;
    })
}

pub const BENCH_APERTURE: f64 = 10.0;
pub const BENCH_WASHOUT: usize = 5;
const BENCH_DATA_SEED: u64 = 7;

fn long_rows(patterns: &[&Pattern]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for p in patterns {
        for t in 0..p.len() {
            let mut row = vec![p.name().to_string(), t.to_string()];
            row.extend(p.sample(t).iter().map(|v| fmt(*v)));
            rows.push(row);
        }
    }
    rows
}

fn classify_bench(ctx: &Context) -> Result<DemoReport> {
    ctx.reject_patterns()?;
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let res = ctx.reservoir(bench_reservoir_params(seed))?;
    let (train, test) = classify_bench_dataset(BENCH_DATA_SEED);
    let aperture = ctx.aperture(BENCH_APERTURE);

    let start = Instant::now();
    let clf = classify::train_classifier(&res, &train, aperture, BENCH_WASHOUT)?;
    let train_seconds = start.elapsed().as_secs_f64();

    let report = classify::evaluate(&clf, &test)?;
    let accuracy = report.accuracy.unwrap_or(f64::NAN);
    let positive_only = test
        .iter()
        .map(|(_, truth, p)| Ok(clf.evidence(p)?.best_positive() == truth.as_deref().unwrap_or_default()))
        .collect::<Result<Vec<bool>>>()?;
    let positive_accuracy = positive_only.iter().filter(|b| **b).count() as f64 / test.len() as f64;

    // Adding a class must not touch the records already there.
    let (head, tail) = train.split_at(BENCH_CLASSES - 1);
    let partial = classify::train_classifier(&res, head, aperture, BENCH_WASHOUT)?;
    let extended = partial.add_class(&tail[0].0, &tail[0].1)?;
    let untouched = partial.classes().iter().zip(extended.classes()).all(|(a, b)| a == b);

    if rec.dir.is_some() {
        let train_refs: Vec<&Pattern> = train.iter().flat_map(|(_, ps)| ps).collect();
        rec.csv("train.csv", &["id", "t", "x0", "x1"], long_rows(&train_refs))?;
        let labels: BTreeMap<&str, &str> =
            train.iter().flat_map(|(l, ps)| ps.iter().map(move |p| (p.name(), l.as_str()))).collect();
        rec.text("train_labels.json", &serde_json::to_string_pretty(&labels)?)?;
        let test_refs: Vec<&Pattern> = test.iter().map(|(_, _, p)| p).collect();
        rec.csv("test.csv", &["id", "t", "x0", "x1"], long_rows(&test_refs))?;
        let test_labels: BTreeMap<&str, &str> =
            test.iter().map(|(id, l, _)| (id.as_str(), l.as_deref().unwrap_or_default())).collect();
        rec.text("test_labels.json", &serde_json::to_string_pretty(&test_labels)?)?;
        rec.text("classification.json", &serde_json::to_string_pretty(&report)?)?;
    }
    rec.metric("accuracy", accuracy);
    rec.metric("accuracy_positive_only", positive_accuracy);
    rec.metric("train_seconds", train_seconds);
    rec.check("accuracy", Some(accuracy), Comparison::Ge, 0.95);
    rec.check("add_class_preserves_records", Some(f64::from(u8::from(untouched))), Comparison::Ge, 1.0);
    rec.check("train_seconds", Some(train_seconds), Comparison::Lt, 1.0);
    rec.finish()
}

// ---------------------------------------------------------------------------
// Two eight-channel motions and a blend from one to the other.

const MOTION_LENGTH: usize = 1500;
const BLEND: BlendSchedule = BlendSchedule { hold_from: 200, ramp: 100, hold_to: 300 };

fn multipattern_blend(ctx: &Context) -> Result<DemoReport> {
    let seed = ctx.seed(1);
    let mut rec = ctx.recorder(seed)?;
    let defaults = vec![
        synth::harmonic_motion(8, 16.0, MOTION_LENGTH, 31)?,
        synth::harmonic_motion(8, 11.0, MOTION_LENGTH, 32)?,
    ];
    let patterns = named(ctx.patterns(MOTION_LENGTH, defaults)?, "motion");
    if patterns.len() != 2 {
        return Err(Error::InvalidParameter(format!("multipattern-blend needs 2 patterns, got {}", patterns.len())));
    }
    let res = ctx.reservoir(params(100, patterns[0].dim(), seed, |p| p.input_scaling = 0.5))?;
    let load = LoadParams { aperture: ctx.aperture(30.0), ridge_w: 0.01, ..Default::default() };
    let net = load_patterns(&res, &patterns, &load)?;
    let (from, to) = (&net.stored()[0].conceptor, &net.stored()[1].conceptor);
    for (i, (sp, p)) in net.stored().iter().zip(&patterns).enumerate() {
        let e = soft(generation::recall_nrmse(&net, &sp.conceptor, p, &RecallOptions::default()))?;
        rec.metric(format!("motion_{i}_nrmse"), e.unwrap_or(f64::NAN));
        rec.check(format!("motion_{i}_recall"), e, Comparison::Lt, 0.1);
    }
    let run = soft(generation::blend(&net, from, to, BLEND, 200, seed))?;
    let settled = match &run {
        Some(r) => {
            if let Some(dir) = rec.dir.clone() {
                let files = r.export(&dir, "blend", None)?;
                let names = files.iter().filter_map(|f| f.file_name()).map(|f| f.to_string_lossy().into_owned());
                rec.report.artifacts.extend(names);
            }
            let tail_start = BLEND.hold_from + BLEND.ramp + 100;
            let tail = r.output.window(tail_start, BLEND.hold_to - 100)?;
            soft(metrics::aligned_nrmse(&tail, &patterns[1].window(0, 100)?, 50, true))?
        }
        None => None,
    };
    rec.metric("blend_settled_nrmse", settled.unwrap_or(f64::NAN));
    rec.check("blend_reaches_target", settled, Comparison::Lt, 0.1);
    rec.finish()
}
