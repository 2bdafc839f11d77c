//! Parameter sweeps, bound-vs-simulation comparisons, figure presets and
//! their configuration and CSV formats.
//!
//! # Config files
//!
//! Flat UTF-8 `key = value` lines; `#` starts a comment. Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `experiment` | `gain-sweep`, `bound-check`, `tail-check`, `batch-sampling`, `residual-check` | required |
//! | `lambda.grid` | comma-separated arrival intensities | required |
//! | `code.n`, `code.k`, `code.d` | comma-separated, one entry per code | `n = d k`, `d = n / k` |
//! | `dist.family` | `exponential`, `shifted-exponential`, `weibull`, `pareto` | `exponential` |
//! | `dist.shape` | Weibull shape or Pareto tail index | required for those |
//! | `dist.shift` | shift fraction of the shifted exponential | required for it |
//! | `sim.L` | servers | `max(2000, 200 k)` |
//! | `sim.seed` | comma-separated seeds | `1` |
//! | `sim.warmup_jobs` | discarded jobs | `20 L` |
//! | `sim.measured_jobs` | measured jobs | `10^6` tasks worth |
//! | `out.path` | CSV destination | none |
//!
//! # CSV schema
//!
//! Header [`CSV_HEADER`]; one [`ComparisonRow`] per line, numbers with nine
//! significant digits, rows sorted by their coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bounds::{self, BoundIVariant, MonteCarlo};
use crate::dist::Family;
use crate::sim::{self, ClusterConfig, Policy, ResidualConfig, ResidualService, RunSizes};

/// Width of every pass criterion, in combined standard errors.
pub const PASS_SIGMAS: f64 = 3.0;
/// Relative tolerance of the residual-time check.
pub const RESIDUAL_REL_TOL: f64 = 0.02;
/// Deviation probability of the tail check.
pub const TAIL_EPSILON: f64 = 0.01;
/// Significant digits of numeric CSV fields.
pub const CSV_SIGNIFICANT_DIGITS: usize = 9;
/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ECLAT_OUT_DIR";

pub const CSV_HEADER: &str = "experiment,family,family_param,policy,n,k,d,lambda,seed,t,\
sim_value,sim_std_err,theory,branch,pass";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("{}configuration key `{key}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl HarnessError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        HarnessError::Config {
            key: key.to_string(),
            line: None,
            message: message.into(),
        }
    }

    fn at_line(self, line: usize) -> Self {
        match self {
            HarnessError::Config { key, message, .. } => HarnessError::Config {
                key,
                line: Some(line),
                message,
            },
            other => other,
        }
    }

    /// Config errors map to exit status 2.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config { .. })
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    GainSweep,
    BoundCheck,
    TailCheck,
    BatchSampling,
    ResidualCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::GainSweep,
        Experiment::BoundCheck,
        Experiment::TailCheck,
        Experiment::BatchSampling,
        Experiment::ResidualCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::GainSweep => "gain-sweep",
            Experiment::BoundCheck => "bound-check",
            Experiment::TailCheck => "tail-check",
            Experiment::BatchSampling => "batch-sampling",
            Experiment::ResidualCheck => "residual-check",
        }
    }

    pub fn parse(s: &str) -> HarnessResult<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::config("experiment", format!("unknown experiment `{s}`")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One `(n, k)` code with probe ratio `d = n / k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodePair {
    pub n: usize,
    pub k: usize,
    pub d: f64,
}

impl CodePair {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            d: n as f64 / k as f64,
        }
    }

    /// Integer replication factor for the high-redundancy experiments.
    fn integer_d(&self) -> HarnessResult<usize> {
        if !self.n.is_multiple_of(self.k) || self.n / self.k < 2 {
            return Err(HarnessError::config(
                "code.n",
                format!("({}, {}) needs n = d k with integer d >= 2", self.n, self.k),
            ));
        }
        Ok(self.n / self.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub lambda_grid: Vec<f64>,
    pub codes: Vec<CodePair>,
    pub family: Family,
    pub seeds: Vec<u64>,
    /// `None` uses the simulator default for each code.
    pub servers: Option<usize>,
    pub warmup_jobs: Option<usize>,
    pub measured_jobs: Option<usize>,
    pub out_path: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(experiment: Experiment, lambda_grid: Vec<f64>, codes: Vec<CodePair>, family: Family) -> Self {
        Self {
            experiment,
            lambda_grid,
            codes,
            family,
            seeds: vec![1],
            servers: None,
            warmup_jobs: None,
            measured_jobs: None,
            out_path: None,
        }
    }

    pub fn validate(&self) -> HarnessResult<()> {
        if self.lambda_grid.is_empty() {
            return Err(HarnessError::config("lambda.grid", "lambda grid empty"));
        }
        if let Some(l) = self.lambda_grid.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(HarnessError::config("lambda.grid", format!("{l} outside (0, 1)")));
        }
        if self.codes.is_empty() {
            return Err(HarnessError::config("code.k", "no code given"));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::config("sim.seed", "seed list empty"));
        }
        self.family
            .validate()
            .map_err(|e| HarnessError::config("dist.family", e.to_string()))?;
        for c in &self.codes {
            if c.k == 0 || c.n < c.k {
                return Err(HarnessError::config("code.k", format!("need 1 <= k <= n, got ({}, {})", c.n, c.k)));
            }
            match self.experiment {
                Experiment::GainSweep | Experiment::BoundCheck | Experiment::TailCheck => {
                    c.integer_d()?;
                }
                Experiment::BatchSampling => {
                    if !(c.d > 1.0 && c.d < 2.0) {
                        return Err(HarnessError::config("code.d", format!("batch sampling needs 1 < n/k < 2, got {}", c.d)));
                    }
                }
                Experiment::ResidualCheck => {}
            }
        }
        if self.measured_jobs == Some(0) {
            return Err(HarnessError::config("sim.measured_jobs", "must be >= 1"));
        }
        Ok(())
    }

    fn sizes(&self) -> RunSizes {
        RunSizes {
            servers: self.servers,
            warmup_jobs: self.warmup_jobs,
            measured_jobs: self.measured_jobs,
        }
    }
}

/// Builds a family from config-style parts.
pub fn family_from_parts(name: &str, shape: Option<f64>, shift: Option<f64>) -> HarnessResult<Family> {
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| HarnessError::config(key, format!("required for {name}")));
    let family = match name {
        "exponential" | "exp" => Family::Exponential,
        "shifted-exponential" | "shift-exp" => Family::ShiftedExponential {
            shift: need(shift, "dist.shift")?,
        },
        "weibull" => Family::Weibull {
            shape: need(shape, "dist.shape")?,
        },
        "pareto" => Family::Pareto {
            tail: need(shape, "dist.shape")?,
        },
        other => return Err(HarnessError::config("dist.family", format!("unknown family `{other}`"))),
    };
    family
        .validate()
        .map_err(|e| HarnessError::config("dist.family", e.to_string()))?;
    Ok(family)
}

const CONFIG_KEYS: [&str; 13] = [
    "experiment",
    "lambda.grid",
    "code.n",
    "code.k",
    "code.d",
    "dist.family",
    "dist.shape",
    "dist.shift",
    "sim.L",
    "sim.seed",
    "sim.warmup_jobs",
    "sim.measured_jobs",
    "out.path",
];

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> HarnessResult<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| HarnessError::config(key, format!("cannot parse `{s}`"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> HarnessResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| HarnessError::config(key, format!("cannot parse `{value}`")))
}

/// Parses config text; see the module docs for the format.
pub fn parse_config(text: &str) -> HarnessResult<SweepSpec> {
    let mut entries: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::config(line, "expected `key = value`").at_line(line_no)
        })?;
        let key = key.trim();
        let Some(&known) = CONFIG_KEYS.iter().find(|k| **k == key) else {
            return Err(HarnessError::config(key, "unknown key").at_line(line_no));
        };
        if let Some((first, _)) = entries.get(known) {
            return Err(HarnessError::config(key, format!("duplicate key (first set on line {first})")).at_line(line_no));
        }
        entries.insert(known, (line_no, value.trim().to_string()));
    }
    let get = |key: &str| entries.get(key).map(|(l, v)| (*l, v.as_str()));
    let with_line = |key: &str, r: HarnessError| match get(key) {
        Some((l, _)) => r.at_line(l),
        None => r,
    };
    let parse = |key: &'static str| -> HarnessResult<Option<(usize, &str)>> { Ok(get(key)) };

    let (_, exp) = parse("experiment")?.ok_or_else(|| HarnessError::config("experiment", "missing"))?;
    let experiment = Experiment::parse(exp).map_err(|e| with_line("experiment", e))?;
    let lambda_grid: Vec<f64> = match get("lambda.grid") {
        Some((l, v)) => parse_list("lambda.grid", v).map_err(|e| e.at_line(l))?,
        None => return Err(HarnessError::config("lambda.grid", "missing")),
    };
    let list_usize = |key: &'static str| -> HarnessResult<Option<Vec<usize>>> {
        get(key)
            .map(|(l, v)| parse_list(key, v).map_err(|e| e.at_line(l)))
            .transpose()
    };
    let ns = list_usize("code.n")?;
    let ks = list_usize("code.k")?.ok_or_else(|| HarnessError::config("code.k", "missing"))?;
    let ds: Option<Vec<f64>> = get("code.d")
        .map(|(l, v)| parse_list("code.d", v).map_err(|e| e.at_line(l)))
        .transpose()?;
    let mut codes = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let n = match (&ns, &ds) {
            (Some(ns), _) => *ns.get(i).ok_or_else(|| with_line("code.n", HarnessError::config("code.n", "fewer entries than code.k")))?,
            (None, Some(ds)) => {
                let d = *ds.get(i).ok_or_else(|| with_line("code.d", HarnessError::config("code.d", "fewer entries than code.k")))?;
                (d * k as f64).round() as usize
            }
            (None, None) => return Err(HarnessError::config("code.n", "give code.n or code.d")),
        };
        let mut code = CodePair::new(n, k);
        if let Some(ds) = &ds {
            let d = *ds.get(i).ok_or_else(|| with_line("code.d", HarnessError::config("code.d", "fewer entries than code.k")))?;
            if (d * k as f64 - n as f64).abs() > 1e-9 * n as f64 {
                return Err(with_line("code.d", HarnessError::config("code.d", format!("d = {d} disagrees with n/k = {n}/{k}"))));
            }
            code.d = d;
        }
        codes.push(code);
    }
    let opt_f64 = |key: &'static str| -> HarnessResult<Option<f64>> {
        get(key).map(|(l, v)| parse_one(key, v).map_err(|e| e.at_line(l))).transpose()
    };
    let family_name = get("dist.family").map_or("exponential", |(_, v)| v);
    let family = family_from_parts(family_name, opt_f64("dist.shape")?, opt_f64("dist.shift")?)
        .map_err(|e| with_line("dist.family", e))?;
    let opt_usize = |key: &'static str| -> HarnessResult<Option<usize>> {
        get(key).map(|(l, v)| parse_one(key, v).map_err(|e| e.at_line(l))).transpose()
    };
    let seeds = match get("sim.seed") {
        Some((l, v)) => parse_list("sim.seed", v).map_err(|e| e.at_line(l))?,
        None => vec![1],
    };
    let k_max = codes.iter().map(|c| c.k).max().unwrap_or(1);
    let servers = opt_usize("sim.L")?.unwrap_or(sim::MIN_SERVERS.max(sim::SERVERS_PER_SPLIT * k_max));
    let warmup = opt_usize("sim.warmup_jobs")?.unwrap_or(sim::WARMUP_PER_SERVER * servers);
    let spec = SweepSpec {
        experiment,
        lambda_grid,
        codes,
        family,
        seeds,
        servers: Some(servers),
        warmup_jobs: Some(warmup),
        measured_jobs: opt_usize("sim.measured_jobs")?,
        out_path: get("out.path").map(|(_, v)| PathBuf::from(v)),
    };
    spec.validate().map_err(|e| match &e {
        HarnessError::Config { key, .. } => with_line(&key.clone(), e),
        _ => e,
    })?;
    Ok(spec)
}

pub fn load_config(path: &Path) -> HarnessResult<SweepSpec> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub experiment: Experiment,
    pub family: Family,
    pub policy: String,
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub lambda: f64,
    pub seed: u64,
    /// Latency threshold of tail rows.
    pub t: Option<f64>,
    /// Simulated mean, gain, tail probability or residual.
    pub sim_value: f64,
    pub sim_std_err: f64,
    pub theory: f64,
    pub branch: String,
    pub pass: bool,
}

/// Whether the simulated value satisfies the experiment's comparison.
pub fn pass_rule(experiment: Experiment, sim_value: f64, std_err: f64, theory: f64) -> bool {
    match experiment {
        Experiment::GainSweep => sim_value > 0.0 && sim_value >= theory - PASS_SIGMAS * std_err,
        Experiment::ResidualCheck => (sim_value - theory).abs() <= RESIDUAL_REL_TOL * theory.abs(),
        Experiment::BoundCheck | Experiment::TailCheck | Experiment::BatchSampling => {
            sim_value <= theory + PASS_SIGMAS * std_err
        }
    }
}

impl ComparisonRow {
    /// Recomputes the pass flag from the row's own numbers.
    pub fn recompute_pass(&self) -> bool {
        pass_rule(self.experiment, self.sim_value, self.sim_std_err, self.theory)
    }

    fn sort_key_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let fam = |r: &Self| (r.family.name(), r.family.parameter().unwrap_or(f64::NAN));
        self.experiment
            .cmp(&other.experiment)
            .then_with(|| fam(self).0.cmp(fam(other).0))
            .then_with(|| fam(self).1.total_cmp(&fam(other).1))
            .then_with(|| self.policy.cmp(&other.policy))
            .then_with(|| self.n.cmp(&other.n))
            .then_with(|| self.k.cmp(&other.k))
            .then_with(|| self.d.total_cmp(&other.d))
            .then_with(|| self.lambda.total_cmp(&other.lambda))
            .then_with(|| self.seed.cmp(&other.seed))
            .then_with(|| self.t.unwrap_or(f64::NEG_INFINITY).total_cmp(&other.t.unwrap_or(f64::NEG_INFINITY)))
            .then_with(|| self.branch.cmp(&other.branch))
    }
}

/// Formats with [`CSV_SIGNIFICANT_DIGITS`] significant digits.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", CSV_SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

pub fn sort_rows(rows: &mut [ComparisonRow]) {
    rows.sort_by(|a, b| a.sort_key_cmp(b));
}

/// Renders rows (sorted) as CSV text with [`CSV_HEADER`].
pub fn render_csv(rows: &[ComparisonRow]) -> String {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in &sorted {
        w.write_record([
            r.experiment.name().to_string(),
            r.family.name().to_string(),
            r.family.parameter().map(format_sig).unwrap_or_default(),
            r.policy.clone(),
            r.n.to_string(),
            r.k.to_string(),
            format_sig(r.d),
            format_sig(r.lambda),
            r.seed.to_string(),
            r.t.map(format_sig).unwrap_or_default(),
            format_sig(r.sim_value),
            format_sig(r.sim_std_err),
            format_sig(r.theory),
            r.branch.clone(),
            r.pass.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn write_csv(rows: &[ComparisonRow], path: &Path) -> HarnessResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| HarnessError::Io {
            path: parent.display().to_string(),
            message: e.to_string(),
        })?;
    }
    fs::write(path, render_csv(rows)).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses a CSV produced by [`render_csv`] back into `(pass, recomputed)`
/// pairs, one per row.
pub fn recheck_csv(text: &str) -> HarnessResult<Vec<(bool, bool)>> {
    let bad = |m: String| HarnessError::Io {
        path: "<csv>".into(),
        message: m,
    };
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| field(i).parse::<f64>().map_err(|e| bad(format!("column {i}: {e}")));
        let experiment = Experiment::parse(field(0))?;
        let recomputed = pass_rule(experiment, num(10)?, num(11)?, num(12)?);
        out.push((field(14) == "true", recomputed));
    }
    Ok(out)
}

/// One sweep point: a code, an intensity and a seed.
#[derive(Debug, Clone, Copy)]
struct Point {
    code: CodePair,
    lambda: f64,
    seed: u64,
}

fn points(spec: &SweepSpec) -> Vec<Point> {
    let mut v = Vec::new();
    for &code in &spec.codes {
        for &lambda in &spec.lambda_grid {
            for &seed in &spec.seeds {
                v.push(Point { code, lambda, seed });
            }
        }
    }
    v
}

fn row(spec: &SweepSpec, p: &Point, policy: &Policy, sim: (f64, f64), theory: f64, branch: &str, t: Option<f64>) -> ComparisonRow {
    ComparisonRow {
        experiment: spec.experiment,
        family: spec.family,
        policy: policy.name().to_string(),
        n: p.code.n,
        k: p.code.k,
        d: p.code.d,
        lambda: p.lambda,
        seed: p.seed,
        t,
        sim_value: sim.0,
        sim_std_err: sim.1,
        theory,
        branch: branch.to_string(),
        pass: pass_rule(spec.experiment, sim.0, sim.1, theory),
    }
}

fn cluster(spec: &SweepSpec, policy: Policy, lambda: f64, seed: u64) -> ClusterConfig {
    spec.sizes().apply(ClusterConfig::new(policy, lambda, spec.family, seed))
}

/// Latency thresholds of the tail check, spanning `[r/k, 6r/k]`.
pub fn tail_grid(k: usize, lambda: f64) -> crate::Result<Vec<f64>> {
    let r = bounds::tail_cutoff(k, lambda, TAIL_EPSILON)?;
    let start = r / k as f64;
    Ok((0..=10).map(|i| start * (1.0 + 5.0 * i as f64 / 10.0)).collect())
}

fn run_point(spec: &SweepSpec, p: &Point) -> HarnessResult<Vec<ComparisonRow>> {
    let k = p.code.k;
    let mc = MonteCarlo {
        seed: p.seed,
        ..MonteCarlo::default()
    };
    match spec.experiment {
        Experiment::GainSweep => {
            let d = p.code.integer_d()?;
            let g = sim::gain_experiment(k, d, p.lambda, &spec.family, p.seed, spec.sizes())?;
            let tg = bounds::theoretical_gain(d as u32, k, p.lambda, &spec.family, mc)?;
            let policy = Policy::LeastKOfN { n: p.code.n, k };
            let se = g.std_err.hypot(tg.std_err);
            Ok(vec![row(spec, p, &policy, (g.gain, se), tg.value, tg.bound.branch.label(), None)])
        }
        Experiment::BoundCheck => {
            let d = p.code.integer_d()?;
            let policy = Policy::KSplit { k, d };
            let stats = sim::run(&cluster(spec, policy, p.lambda, p.seed))?;
            let report = bounds::coded_latency_bound(&spec.family, k, p.lambda, mc)?;
            Ok(vec![row(spec, p, &policy, (stats.mean, stats.std_err), report.value, report.branch.label(), None)])
        }
        Experiment::TailCheck => {
            let d = p.code.integer_d()?;
            let policy = Policy::KSplit { k, d };
            let out = sim::run_detailed(&cluster(spec, policy, p.lambda, p.seed))?;
            let sorted = out.sorted_latencies();
            let n = sorted.len() as f64;
            let mut rows = Vec::new();
            for t in tail_grid(k, p.lambda)? {
                let emp = sim::empirical_ccdf(&sorted, t);
                let se = (emp * (1.0 - emp) / n).sqrt();
                let bound = bounds::tail_latency_bound(k, p.lambda, TAIL_EPSILON, t)?;
                rows.push(row(spec, p, &policy, (emp, se), bound, "Tail", Some(t)));
            }
            Ok(rows)
        }
        Experiment::BatchSampling => {
            let policy = Policy::BatchSampling { n: p.code.n, k };
            let cfg = cluster(spec, policy, p.lambda, p.seed).with_task_service(spec.family.unit()?);
            let stats = sim::run(&cfg)?;
            let sim = (stats.mean, stats.std_err);
            let tight = bounds::bound_i(p.lambda, p.code.d, k, BoundIVariant::Tight, None)?;
            let loose = bounds::bound_i(p.lambda, p.code.d, k, BoundIVariant::Loose, None)?;
            let b2 = bounds::bound_ii(p.lambda, p.code.d, k)?;
            Ok([tight, loose, b2]
                .iter()
                .map(|b| row(spec, p, &policy, sim, b.value, b.branch.label(), None))
                .collect())
        }
        Experiment::ResidualCheck => {
            let law = spec.family.chunk(k)?;
            let cfg = ResidualConfig {
                arrival_rate: p.lambda / law.mean()?,
                service: ResidualService::Random(law),
                seed: p.seed,
                warmup_jobs: spec.warmup_jobs.unwrap_or(10_000),
                measured_jobs: spec.measured_jobs.unwrap_or(sim::MEASURED_TASKS),
            };
            let emp = sim::empirical_residual(&cfg)?;
            let theory = bounds::residual_moment(&law, 1)?;
            let policy = Policy::LeastKOfN { n: 1, k: 1 };
            Ok(vec![row(spec, p, &policy, (emp, 0.0), theory, "Residual", None)])
        }
    }
}

/// Executes every sweep point in parallel and returns the rows sorted by
/// coordinates, so the result does not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> HarnessResult<Vec<ComparisonRow>> {
    spec.validate()?;
    let results: Vec<HarnessResult<Vec<ComparisonRow>>> =
        points(spec).par_iter().map(|p| run_point(spec, p)).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// [`run_sweep`] on the calling thread only.
pub fn run_sweep_serial(spec: &SweepSpec) -> HarnessResult<Vec<ComparisonRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for p in points(spec) {
        rows.extend(run_point(spec, &p)?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// `0.1, 0.2, ..., 0.9`.
pub fn figure_lambda_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// Codes compared against replication in the gain figures: `(4,2)`, `(6,3)`,
/// `(8,4)` against `(2,1)` and `(9,3)` against `(3,1)`.
pub fn figure_codes() -> Vec<CodePair> {
    vec![CodePair::new(4, 2), CodePair::new(6, 3), CodePair::new(8, 4), CodePair::new(9, 3)]
}

/// Weibull shape of the heavy-tailed preset.
pub const WEIBULL_PRESET_SHAPE: f64 = 1.5;
/// Shift of the shifted-exponential preset.
pub const SHIFT_PRESET: f64 = 0.1;

pub const PRESET_NAMES: [&str; 4] = ["fig3a", "fig3b", "fig4", "fig5"];

/// Named figure presets: gain sweeps for exponential (`fig3a`), shifted
/// exponential (`fig3b`) and Weibull (`fig4`) service, and the
/// batch-sampling bounds (`fig5`).
pub fn preset(name: &str) -> HarnessResult<SweepSpec> {
    let gain = |family| SweepSpec::new(Experiment::GainSweep, figure_lambda_grid(), figure_codes(), family);
    let spec = match name {
        "fig3a" => gain(Family::Exponential),
        "fig3b" => gain(Family::ShiftedExponential { shift: SHIFT_PRESET }),
        "fig4" => gain(Family::Weibull {
            shape: WEIBULL_PRESET_SHAPE,
        }),
        "fig5" => SweepSpec::new(
            Experiment::BatchSampling,
            vec![0.7, 0.75, 0.8, 0.85, 0.9, 0.95],
            vec![CodePair::new(14, 10)],
            Family::Exponential,
        ),
        other => {
            return Err(HarnessError::config(
                "preset",
                format!("unknown preset `{other}` (known: {})", PRESET_NAMES.join(", ")),
            ))
        }
    };
    Ok(spec)
}

/// Default output directory: `$ECLAT_OUT_DIR` or `out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from)
}
