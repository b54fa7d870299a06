use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use conceptor_core::autoadapt::{self, AutoAdaptOptions, CueOptions};
use conceptor_core::classify;
use conceptor_core::demo::{self, DemoConfig, DemoReport, CATALOG};
use conceptor_core::generation::{self, BlendSchedule, GenerateOptions, DEFAULT_INIT_STEPS, DEFAULT_MAX_SHIFT};
use conceptor_core::{load_patterns, metrics, Conceptor, LoadParams, LoadedNetwork, Pattern, Reservoir, ReservoirParams};

/// Store, regenerate, recall and classify timeseries with conceptors.
#[derive(Parser)]
#[command(name = "conceptor", version)]
struct Cli {
    /// JSON config: a demo config (`demo` optional), whose reservoir,
    /// aperture and pattern fields also seed `store` and `classify`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Reservoir seed (also used for generation runs).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, env = "CONCEPTOR_OUT")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a demo (or `all`, or `list` to print the catalog).
    Demo { name: String },
    /// Store patterns in a reservoir and save the network.
    Store(StoreArgs),
    /// Regenerate a stored pattern, or recall one from a cue.
    Recall(RecallArgs),
    /// Run a loaded network under a mixture of its conceptors, or blend two.
    Morph(MorphArgs),
    /// Train per-class conceptors and classify a test set.
    Classify(ClassifyArgs),
    /// Arithmetic on saved conceptors.
    Algebra(AlgebraArgs),
}

#[derive(Args)]
struct StoreArgs {
    /// Pattern files (CSV or JSON), stored in order.
    #[arg(long = "pattern", short)]
    patterns: Vec<PathBuf>,
    #[arg(long)]
    neurons: Option<usize>,
    #[arg(long)]
    aperture: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    ridge: f64,
    #[arg(long, default_value_t = 500)]
    washout: usize,
    /// Store one pattern at a time into the free space.
    #[arg(long)]
    incremental: bool,
    /// Extend an existing network (implies incremental storage).
    #[arg(long)]
    into: Option<PathBuf>,
    /// Pattern length for config-file pattern recipes.
    #[arg(long, default_value_t = 1500)]
    length: usize,
}

#[derive(Args)]
struct RecallArgs {
    #[arg(long)]
    network: PathBuf,
    /// Name of a stored pattern to regenerate.
    #[arg(long, conflicts_with = "cue")]
    name: Option<String>,
    /// Cue signal for content-addressable recall.
    #[arg(long, required_unless_present = "name")]
    cue: Option<PathBuf>,
    /// Reference signal; its first samples are compared with the output.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    length: usize,
    #[arg(long, default_value_t = 10_000)]
    adapt_steps: usize,
    #[arg(long, default_value_t = 0.02)]
    cue_rate: f64,
    #[arg(long, default_value_t = 0.01)]
    adapt_rate: f64,
    #[arg(long, default_value_t = 10.0)]
    cue_aperture: f64,
    /// Signal-to-noise ratio of state noise during adaptation.
    #[arg(long)]
    snr: Option<f64>,
}

#[derive(Args)]
struct MorphArgs {
    #[arg(long)]
    network: PathBuf,
    /// Mixture weights as `name=weight,…` (must sum to 1).
    #[arg(long, conflicts_with = "blend")]
    mix: Option<String>,
    /// Blend from the first stored pattern to the second.
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
    blend: Option<Vec<String>>,
    #[arg(long, default_value_t = 100)]
    ramp: usize,
    #[arg(long, default_value_t = 200)]
    hold: usize,
    #[arg(long, default_value_t = 500)]
    length: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Long-format training CSV: `id, t, feature…`.
    #[arg(long)]
    train: PathBuf,
    /// JSON map from training ids to labels.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// JSON map from test ids to true labels, for accuracy.
    #[arg(long)]
    test_labels: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    neurons: usize,
    #[arg(long)]
    aperture: Option<f64>,
    #[arg(long, default_value_t = demo::BENCH_WASHOUT)]
    washout: usize,
}

#[derive(Args)]
struct AlgebraArgs {
    /// Operands are conceptor JSON files or `network.json#name`.
    #[arg(value_enum)]
    op: AlgebraOp,
    a: PathBuf,
    b: Option<PathBuf>,
    /// Aperture factor for `aperture`.
    #[arg(long)]
    gamma: Option<f64>,
    /// Write the result here instead of `<out>/<op>.json`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlgebraOp {
    Not,
    And,
    Or,
    Diff,
    Aperture,
    Quota,
    Leq,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            DemoConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => DemoConfig::default(),
    };
    let out = cli.out.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.or(config.seed);
    match cli.command {
        Command::Demo { name } => run_demos(&name, config, seed, &out),
        Command::Store(args) => store(args, &config, seed, &out).map(|_| true),
        Command::Recall(args) => recall(args, seed, &out).map(|_| true),
        Command::Morph(args) => morph(args, seed, &out).map(|_| true),
        Command::Classify(args) => classify_cmd(args, &config, seed, &out).map(|_| true),
        Command::Algebra(args) => algebra(args, &out).map(|_| true),
    }
}

fn print_report(r: &DemoReport) {
    for c in &r.checks {
        let value = c.value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}/{}: {value} {:?} {}", r.demo, c.name, c.op, c.threshold);
    }
}

fn run_demos(name: &str, config: DemoConfig, seed: Option<u64>, out: &Path) -> Result<bool> {
    let names: Vec<&str> = match name {
        "list" => {
            CATALOG.iter().for_each(|n| println!("{n}"));
            return Ok(true);
        }
        "all" => CATALOG.to_vec(),
        other => vec![other],
    };
    let mut all_passed = true;
    for n in names {
        let cfg = DemoConfig { demo: n.to_string(), seed: seed.or(config.seed), out_dir: Some(out.to_path_buf()), ..config.clone() };
        let report = demo::run_demo(&cfg)?;
        print_report(&report);
        println!("{} {} -> {}", if report.passed { "passed" } else { "failed" }, n, out.join(n).display());
        all_passed &= report.passed;
    }
    Ok(all_passed)
}

fn write_json(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn store(args: StoreArgs, config: &DemoConfig, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut patterns = args
        .patterns
        .iter()
        .map(|p| Pattern::load(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    for spec in config.patterns.iter().flatten() {
        patterns.push(spec.build(args.length)?);
    }
    if patterns.is_empty() {
        bail!("no patterns given (use --pattern or a config with patterns)");
    }
    let aperture = args.aperture.or(config.aperture).unwrap_or(10.0);
    let net = match &args.into {
        Some(path) => {
            let mut net = LoadedNetwork::open(path)?;
            for p in &patterns {
                net = net.incremental_load(p)?;
            }
            net
        }
        None => {
            let neurons = args.neurons.or(config.reservoir.as_ref().and_then(|r| r.n_neurons)).unwrap_or(100);
            let mut params = ReservoirParams::new(neurons, patterns[0].dim()).with_seed(seed.unwrap_or(0));
            if let Some(o) = &config.reservoir {
                params.spectral_radius = o.spectral_radius.unwrap_or(params.spectral_radius);
                params.input_scaling = o.input_scaling.unwrap_or(params.input_scaling);
                params.bias_scaling = o.bias_scaling.unwrap_or(params.bias_scaling);
                params.connectivity = o.connectivity.unwrap_or(params.connectivity);
            }
            let res = Reservoir::new(params)?;
            let load = LoadParams { aperture, ridge_w: args.ridge, washout: args.washout, ..Default::default() };
            if args.incremental {
                let mut net = LoadedNetwork::empty(res, load);
                for p in &patterns {
                    net = net.incremental_load(p)?;
                }
                net
            } else {
                load_patterns(&res, &patterns, &load)?
            }
        }
    };
    let path = out.join("network.json");
    std::fs::create_dir_all(out)?;
    net.save(&path)?;
    for s in net.stored() {
        println!("{}\tquota {:.4}", s.name, s.conceptor.quota());
    }
    println!("occupied quota {:.4} -> {}", net.quota(), path.display());
    Ok(())
}

fn recall(args: RecallArgs, seed: Option<u64>, out: &Path) -> Result<()> {
    let net = LoadedNetwork::open(&args.network)?;
    let seed = seed.unwrap_or(0);
    let opts = GenerateOptions { length: args.length + DEFAULT_MAX_SHIFT + 2, init_steps: DEFAULT_INIT_STEPS, seed };
    let (c, stem) = match (&args.name, &args.cue) {
        (Some(name), _) => (net.conceptor(name)?.clone(), format!("recall-{name}")),
        (None, Some(cue_path)) => {
            let cue_signal = Pattern::load(cue_path)?;
            let cue_opts = CueOptions { learn_rate: args.cue_rate, aperture: args.cue_aperture, ..Default::default() };
            let cued = autoadapt::cue(&net, &cue_signal, &cue_opts)?;
            let adapt_opts = AutoAdaptOptions {
                steps: args.adapt_steps,
                learn_rate: args.adapt_rate,
                noise_snr: args.snr,
                noise_seed: seed,
                trace: true,
            };
            let (adapted, trace) = autoadapt::autoadapt(&net, &cued, &adapt_opts)?;
            write_json(&out.join("session_trace.json"), &trace.to_json()?)?;
            write_json(&out.join("adapted_conceptor.json"), &serde_json::to_string(&adapted.conceptor)?)?;
            (adapted.conceptor, "recall-cued".to_string())
        }
        (None, None) => bail!("give --name or --cue"),
    };
    let run = generation::generate(&net, &c, &opts)?;
    let nrmse = match &args.reference {
        Some(path) => {
            let reference = Pattern::load(path)?;
            let reference = reference.window(0, args.length.min(reference.len()))?;
            Some(metrics::aligned_nrmse(&run.output, &reference, DEFAULT_MAX_SHIFT, true)?)
        }
        None => None,
    };
    let files = run.export(out, &stem, nrmse)?;
    if let Some(e) = nrmse {
        println!("nrmse {e:.6}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn morph(args: MorphArgs, seed: Option<u64>, out: &Path) -> Result<()> {
    let net = LoadedNetwork::open(&args.network)?;
    let seed = seed.unwrap_or(0);
    let run = match (&args.mix, &args.blend) {
        (Some(mix), _) => {
            let mut cs = Vec::new();
            let mut weights = Vec::new();
            for term in mix.split(',') {
                let (name, w) = term.split_once('=').with_context(|| format!("bad mixture term `{term}`"))?;
                cs.push(net.conceptor(name.trim())?.clone());
                weights.push(w.trim().parse::<f64>().with_context(|| format!("bad weight in `{term}`"))?);
            }
            generation::morph(&net, &cs, &weights, &GenerateOptions::new(args.length).with_seed(seed))?
        }
        (None, Some(pair)) => {
            let schedule = BlendSchedule { hold_from: args.hold, ramp: args.ramp, hold_to: args.hold };
            generation::blend(&net, net.conceptor(&pair[0])?, net.conceptor(&pair[1])?, schedule, DEFAULT_INIT_STEPS, seed)?
        }
        (None, None) => bail!("give --mix or --blend"),
    };
    for f in run.export(out, "morph", None)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn classify_cmd(args: ClassifyArgs, config: &DemoConfig, seed: Option<u64>, out: &Path) -> Result<()> {
    let train = classify::load_long_csv(&args.train)?;
    let labels = classify::load_label_map(&args.labels)?;
    let groups = classify::group_by_label(&train, &labels);
    if groups.is_empty() {
        bail!("no training sample has a label");
    }
    let dim = groups[0].1[0].dim();
    let mut params = demo::bench_reservoir_params(seed.unwrap_or(1));
    params.n_neurons = args.neurons;
    params.input_dim = dim;
    let res = Reservoir::new(params)?;
    let aperture = args.aperture.or(config.aperture).unwrap_or(demo::BENCH_APERTURE);
    let clf = classify::train_classifier(&res, &groups, aperture, args.washout)?;
    let truth = match &args.test_labels {
        Some(p) => classify::load_label_map(p)?,
        None => Default::default(),
    };
    let samples: Vec<_> = classify::load_long_csv(&args.test)?
        .into_iter()
        .map(|p| (p.name().to_string(), truth.get(p.name()).cloned(), p))
        .collect();
    let report = classify::evaluate(&clf, &samples)?;
    let path = out.join("classification.json");
    write_json(&path, &serde_json::to_string_pretty(&report)?)?;
    if let Some(acc) = report.accuracy {
        println!("accuracy {acc:.4}");
    }
    println!("classified {} samples -> {}", samples.len(), path.display());
    Ok(())
}

/// Reads a conceptor file, or a stored conceptor addressed as `network.json#name`.
fn load_conceptor(path: &Path) -> Result<Conceptor> {
    if let Some((net, name)) = path.to_str().and_then(|s| s.rsplit_once('#')) {
        return Ok(LoadedNetwork::open(Path::new(net))?.conceptor(name)?.clone());
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn algebra(args: AlgebraArgs, out: &Path) -> Result<()> {
    let a = load_conceptor(&args.a)?;
    let b = || -> Result<Conceptor> { load_conceptor(args.b.as_deref().context("this operation needs a second conceptor")?) };
    let (name, result) = match args.op {
        AlgebraOp::Not => ("not", a.not()),
        AlgebraOp::And => ("and", a.and(&b()?)?),
        AlgebraOp::Or => ("or", a.or(&b()?)?),
        AlgebraOp::Diff => ("diff", a.diff(&b()?)?),
        AlgebraOp::Aperture => ("aperture", a.adapt_aperture(args.gamma.context("aperture needs --gamma")?)?),
        AlgebraOp::Quota => {
            println!("{}", a.quota());
            return Ok(());
        }
        AlgebraOp::Leq => {
            println!("{}", a.loewner_leq(&b()?, 1e-10)?);
            return Ok(());
        }
    };
    let path = args.output.unwrap_or_else(|| out.join(format!("{name}.json")));
    write_json(&path, &serde_json::to_string(&result)?)?;
    println!("quota {:.6} -> {}", result.quota(), path.display());
    Ok(())
}
