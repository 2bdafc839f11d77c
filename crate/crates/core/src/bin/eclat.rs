use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eclat::bounds::{self, BoundIVariant, BoundReport, MonteCarlo};
use eclat::dist::Family;
use eclat::harness::{self, ComparisonRow, HarnessError, SweepSpec};
use eclat::sim::{self, ClusterConfig, Policy};

/// Latency simulator and analytical bounds for erasure-coded storage.
#[derive(Parser)]
#[command(name = "eclat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its latency statistics.
    Simulate(SimulateArgs),
    /// Evaluate one bound and print its report.
    Bound(BoundArgs),
    /// Execute a sweep and write its CSV.
    Sweep(SweepArgs),
    /// Execute a sweep with bound comparisons; exit 1 if any row fails.
    Compare(SweepArgs),
    /// Write the figure presets as plot-ready CSV files.
    Figures(FiguresArgs),
}

#[derive(Args, Clone)]
struct DistArgs {
    /// exponential, shifted-exponential, weibull or pareto.
    #[arg(long, default_value = "exponential")]
    dist: String,
    /// Weibull shape or Pareto tail index.
    #[arg(long)]
    shape: Option<f64>,
    /// Shift fraction of the shifted exponential.
    #[arg(long)]
    shift: Option<f64>,
}

impl DistArgs {
    fn family(&self) -> Result<Family, HarnessError> {
        harness::family_from_parts(&self.dist, self.shape, self.shift)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyKind {
    Naive,
    Ksplit,
    LeastKOfN,
    BatchSampling,
    Redundant,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "least-k-of-n")]
    policy: PolicyKind,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Probed servers for least-k-of-n and batch-sampling (default d k).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    servers: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    measured: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    /// Mean latency of the k-split policy.
    Mean,
    /// P(W > t) for exponential chunks.
    Tail,
    /// Batch-sampling bound with rank weights (needs --d).
    BoundI,
    BoundILoose,
    /// Batch-sampling bound from interpolated moments (needs --d).
    BoundIi,
    /// E[max of k chunk service times].
    ZeroLoad,
    /// Latency with k + delta idle servers.
    Redundant,
    /// Bound on the mean of the largest of k residual service times.
    Mk,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum, default_value = "mean")]
    kind: BoundKind,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    lambda: Option<f64>,
    /// Probe ratio for the batch-sampling bounds.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long, default_value_t = harness::TAIL_EPSILON)]
    epsilon: f64,
    #[arg(long)]
    t: Option<f64>,
    #[command(flatten)]
    dist: DistArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Config file; flags below are appended to it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named figure preset (fig3a, fig3b, fig4, fig5).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    experiment: Option<String>,
    /// Comma-separated arrival intensities.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Comma-separated code.n values.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated code.k values.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated code.d values.
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    shape: Option<f64>,
    #[arg(long)]
    shift: Option<f64>,
    /// Comma-separated seeds.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    servers: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    measured: Option<usize>,
    /// CSV destination (default: out.path, else $ECLAT_OUT_DIR/<name>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Output directory (default: $ECLAT_OUT_DIR or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Presets to emit; all by default.
    #[arg(long, value_delimiter = ',')]
    preset: Vec<String>,
    #[arg(long)]
    measured: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(String),
    Comparison(usize),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<eclat::Error> for Failure {
    fn from(e: eclat::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Bound(a) => bound(a),
        Command::Sweep(a) => sweep(a, false),
        Command::Compare(a) => sweep(a, true),
        Command::Figures(a) => figures(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Comparison(n)) => {
            eprintln!("error: {n} comparison row(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let n = a.n.unwrap_or(a.d * a.k);
    let policy = match a.policy {
        PolicyKind::Naive => Policy::NaiveReplication { d: a.d },
        PolicyKind::Ksplit => Policy::KSplit { k: a.k, d: a.d },
        PolicyKind::LeastKOfN => Policy::LeastKOfN { n, k: a.k },
        PolicyKind::BatchSampling => Policy::BatchSampling { n, k: a.k },
        PolicyKind::Redundant => Policy::RedundantRequest { k: a.k, delta: a.delta },
    };
    let mut cfg = ClusterConfig::new(policy, a.lambda, a.dist.family()?, a.seed);
    if let Some(l) = a.servers {
        cfg = cfg.with_servers(l);
        cfg.warmup_jobs = sim::WARMUP_PER_SERVER * l;
    }
    if let Some(w) = a.warmup {
        cfg.warmup_jobs = w;
    }
    if let Some(m) = a.measured {
        cfg.measured_jobs = m;
    }
    let s = sim::run(&cfg)?;
    println!("policy={policy}");
    println!("family={}", cfg.family);
    println!("lambda={}", cfg.lambda);
    println!("servers={}", cfg.servers);
    println!("jobs={}", s.job_count);
    println!("mean={}", harness::format_sig(s.mean));
    println!("std_err={}", harness::format_sig(s.std_err));
    for (p, q) in &s.quantiles {
        println!("q{p}={}", harness::format_sig(*q));
    }
    for r in 1..s.queue_ccdf.len().min(6) {
        println!("P(Q>={r})={}", harness::format_sig(s.queue_tail(r)));
    }
    Ok(())
}

fn need(v: Option<f64>, flag: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Config(format!("--{flag} is required for this bound")))
}

fn print_report(r: &BoundReport) {
    println!("value={}", harness::format_sig(r.value));
    println!("branch={}", r.branch);
    for (k, v) in &r.aux {
        println!("{k}={}", harness::format_sig(*v));
    }
}

fn bound(a: BoundArgs) -> Result<(), Failure> {
    let family = a.dist.family()?;
    let mc = MonteCarlo::default();
    match a.kind {
        BoundKind::Mean => {
            let lambda = need(a.lambda, "lambda")?;
            print_report(&bounds::coded_latency_bound(&family, a.k, lambda, mc)?);
        }
        BoundKind::Tail => {
            let lambda = need(a.lambda, "lambda")?;
            let t = need(a.t, "t")?;
            let p = bounds::tail_latency_bound(a.k, lambda, a.epsilon, t)?;
            println!("value={}", harness::format_sig(p));
            println!("r={}", harness::format_sig(bounds::tail_cutoff(a.k, lambda, a.epsilon)?));
        }
        BoundKind::BoundI | BoundKind::BoundILoose => {
            let variant = if matches!(a.kind, BoundKind::BoundI) { BoundIVariant::Tight } else { BoundIVariant::Loose };
            let r = bounds::bound_i(need(a.lambda, "lambda")?, need(a.d, "d")?, a.k, variant, None)?;
            print_report(&r);
        }
        BoundKind::BoundIi => {
            print_report(&bounds::bound_ii(need(a.lambda, "lambda")?, need(a.d, "d")?, a.k)?);
        }
        BoundKind::ZeroLoad => {
            let lat = bounds::zero_load_latency(&family, a.k, mc)?;
            let gain = bounds::zero_load_gain(&family, a.k, mc)?;
            println!("latency={}", harness::format_sig(lat.value));
            println!("gain={}", harness::format_sig(gain.value));
            println!("std_err={}", harness::format_sig(lat.std_err));
        }
        BoundKind::Redundant => {
            println!("value={}", harness::format_sig(bounds::redundant_request_latency(a.k, a.delta)?));
        }
        BoundKind::Mk => {
            let m = bounds::m_k_bound(&family.chunk(a.k)?, a.k)?;
            println!("value={}", harness::format_sig(m.value));
            println!("s={}", harness::format_sig(m.s));
        }
    }
    Ok(())
}

fn sweep_spec(a: &SweepArgs) -> Result<(SweepSpec, String), Failure> {
    if let Some(name) = &a.preset {
        let mut spec = harness::preset(name)?;
        if let Some(m) = a.measured {
            spec.measured_jobs = Some(m);
        }
        if let Some(s) = &a.seed {
            spec.seeds = s
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Failure::Config(format!("configuration key `sim.seed`: cannot parse `{x}`"))))
                .collect::<Result<_, _>>()?;
        }
        return Ok((spec, name.clone()));
    }
    let mut text = match &a.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            text.push_str(&format!("\n{key} = {v}"));
        }
    };
    set("experiment", a.experiment.clone());
    set("lambda.grid", a.lambda.clone());
    set("code.n", a.n.clone());
    set("code.k", a.k.clone());
    set("code.d", a.d.clone());
    set("dist.family", a.dist.clone());
    set("dist.shape", a.shape.map(|x| x.to_string()));
    set("dist.shift", a.shift.map(|x| x.to_string()));
    set("sim.seed", a.seed.clone());
    set("sim.L", a.servers.map(|x| x.to_string()));
    set("sim.warmup_jobs", a.warmup.map(|x| x.to_string()));
    set("sim.measured_jobs", a.measured.map(|x| x.to_string()));
    let spec = harness::parse_config(&text)?;
    let name = spec.experiment.name().to_string();
    Ok((spec, name))
}

fn out_path(explicit: &Option<PathBuf>, spec: &SweepSpec, name: &str) -> PathBuf {
    explicit
        .clone()
        .or_else(|| spec.out_path.clone())
        .unwrap_or_else(|| harness::default_out_dir().join(format!("{name}.csv")))
}

fn summarize(rows: &[ComparisonRow], path: &Path) -> usize {
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("rows={} passed={} failed={} csv={}", rows.len(), rows.len() - failed, failed, path.display());
    for r in rows.iter().filter(|r| !r.pass) {
        println!(
            "FAIL {} {} {} lambda={} sim={}±{} theory={} ({})",
            r.experiment,
            r.family,
            r.policy,
            r.lambda,
            harness::format_sig(r.sim_value),
            harness::format_sig(r.sim_std_err),
            harness::format_sig(r.theory),
            r.branch
        );
    }
    failed
}

fn sweep(a: SweepArgs, compare: bool) -> Result<(), Failure> {
    let (spec, name) = sweep_spec(&a)?;
    let rows = harness::run_sweep(&spec)?;
    let path = out_path(&a.out, &spec, &name);
    harness::write_csv(&rows, &path)?;
    let failed = summarize(&rows, &path);
    if compare && failed > 0 {
        return Err(Failure::Comparison(failed));
    }
    Ok(())
}

fn figures(a: FiguresArgs) -> Result<(), Failure> {
    let dir = a.out.clone().unwrap_or_else(harness::default_out_dir);
    let names: Vec<String> = if a.preset.is_empty() {
        harness::PRESET_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        a.preset.clone()
    };
    for name in names {
        let mut spec = harness::preset(&name)?;
        if let Some(m) = a.measured {
            spec.measured_jobs = Some(m);
        }
        if let Some(s) = a.seed {
            spec.seeds = vec![s];
        }
        let rows = harness::run_sweep(&spec)?;
        let path = dir.join(format!("{name}.csv"));
        harness::write_csv(&rows, &path)?;
        summarize(&rows, &path);
    }
    Ok(())
}
