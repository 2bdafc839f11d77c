//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits nonzero if any fails. Pass criterion numbers as arguments to run
//! a subset, e.g. `cargo test --release --test acceptance -- 3 7`.

use std::process::ExitCode;
use std::time::Instant;

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use eclat::bounds::{
    self, BoundIVariant, MonteCarlo, bound_i, bound_ii, m_k_bound, maximal_subexp_bound,
    redundant_request_latency, tail_latency_bound, theoretical_gain, zero_load_gain,
    zero_load_gain_between,
};
use eclat::dist::{Family, ServiceDistribution};
use eclat::harness::{self, figure_codes, figure_lambda_grid};
use eclat::meanfield::{Pmf, order_stat_expectation, sum_order_stats};
use eclat::numeric::harmonic;
use eclat::sim::{
    self, ClusterConfig, LatencyStats, Policy, ResidualConfig, ResidualService, RunSizes,
    empirical_ccdf, empirical_residual, run, run_detailed,
};

const SIGMAS: f64 = 3.0;
const ORACLE_SIGMAS: f64 = 4.0;
const ZERO_LOAD_REL_TOL: f64 = 0.02;
const TAIL_ABS_TOL: f64 = 0.02;
const RESIDUAL_REL_TOL: f64 = 0.02;
const EXACT_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;
const LOOSE_BOUND_I_TOL: f64 = 1e-3;
const M_K_TOL: f64 = 1e-3;
const ABSTRACT_RATIO: f64 = 0.8;
const LOW_LOAD: f64 = 0.01;
const ORACLE_SAMPLES: usize = 1_000_000;
const LOW_LOAD_JOBS: usize = 100_000;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details,
        }
    }
}

/// Records one check and returns whether it held.
struct Checks {
    failures: Vec<String>,
    total: usize,
}

impl Checks {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            total: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) -> bool {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
        ok
    }

    fn finish(self, title: &str) -> Outcome {
        let failed = self.failures.len();
        Outcome::new(
            failed == 0,
            format!("{title} ({}/{} checks hold)", self.total - failed, self.total),
            self.failures,
        )
    }
}

fn low_load(policy: Policy, seed: u64) -> ClusterConfig {
    ClusterConfig::new(policy, LOW_LOAD, Family::Exponential, seed)
        .with_servers(sim::MIN_SERVERS)
        .with_jobs(sim::WARMUP_PER_SERVER * sim::MIN_SERVERS, LOW_LOAD_JOBS)
}

fn combined(a: &LatencyStats, b: &LatencyStats) -> f64 {
    a.std_err.hypot(b.std_err)
}

fn criterion_1() -> Outcome {
    let mut c = Checks::new();
    for k in [2usize, 3, 4] {
        let stats = run(&low_load(Policy::LeastKOfN { n: 2 * k, k }, 100 + k as u64)).unwrap();
        let target = harmonic(k) / k as f64;
        c.check((stats.mean - target).abs() <= ZERO_LOAD_REL_TOL * target, || {
            format!("k={k}: mean {:.5} vs H(k)/k {target:.6}", stats.mean)
        });
    }
    c.finish("zero-load latency of LeastKOfN equals H(k)/k within 2%")
}

fn criterion_2() -> Outcome {
    let mut c = Checks::new();
    let mc = MonteCarlo::default();
    let exp_gain = zero_load_gain(&Family::Exponential, 2, mc).unwrap();
    c.check((exp_gain.value - 0.25).abs() <= EXACT_TOL, || {
        format!("exponential closed form {}", exp_gain.value)
    });
    let whole = ServiceDistribution::shifted_exponential(0.2, 1.0).unwrap();
    let chunk = ServiceDistribution::shifted_exponential(0.1, 2.0).unwrap();
    let shift_gain = zero_load_gain_between(&whole, &chunk, 2, mc).unwrap();
    c.check((shift_gain.value - 0.35).abs() <= EXACT_TOL, || {
        format!("shift closed form {}", shift_gain.value)
    });

    let g = sim::gain_experiment(
        2,
        2,
        LOW_LOAD,
        &Family::Exponential,
        21,
        RunSizes {
            servers: Some(sim::MIN_SERVERS),
            measured_jobs: Some(LOW_LOAD_JOBS),
            ..RunSizes::default()
        },
    )
    .unwrap();
    c.check((g.gain - 0.25).abs() <= SIGMAS * g.std_err, || {
        format!("simulated exponential gain {:.5} ± {:.5}", g.gain, g.std_err)
    });
    let naive = run(&low_load(Policy::NaiveReplication { d: 2 }, 22).with_task_service(whole)).unwrap();
    let coded = run(&low_load(Policy::LeastKOfN { n: 4, k: 2 }, 22).with_task_service(chunk)).unwrap();
    let gain = naive.mean - coded.mean;
    let se = combined(&naive, &coded);
    c.check((gain - 0.35).abs() <= SIGMAS * se, || {
        format!("simulated shift gain {gain:.5} ± {se:.5}")
    });
    c.finish("zero-load gains 0.25 and 0.35, closed form and simulated")
}

const DOMINANCE_K: [usize; 2] = [4, 8];
const DOMINANCE_LAMBDA: [f64; 3] = [0.5, 0.7, 0.9];

fn dominance(family: Family, seed: u64, c: &mut Checks) {
    let mc = MonteCarlo::default();
    for k in DOMINANCE_K {
        for lambda in DOMINANCE_LAMBDA {
            let stats = run(&ClusterConfig::new(Policy::KSplit { k, d: 2 }, lambda, family, seed)).unwrap();
            let bound = bounds::coded_latency_bound(&family, k, lambda, mc).unwrap();
            c.check(stats.mean <= bound.value + SIGMAS * stats.std_err, || {
                format!(
                    "{} k={k} lambda={lambda}: sim {:.4} ± {:.4} above {} {:.4}",
                    family.name(),
                    stats.mean,
                    stats.std_err,
                    bound.branch,
                    bound.value
                )
            });
        }
    }
}

fn criterion_3() -> Outcome {
    let mut c = Checks::new();
    dominance(Family::Exponential, 31, &mut c);
    c.finish("KSplit exponential mean below Phi3/Phi4 + 3 s.e.")
}

fn criterion_4() -> Outcome {
    let mut c = Checks::new();
    dominance(Family::ShiftedExponential { shift: 0.1 }, 41, &mut c);
    dominance(Family::Weibull { shape: 1.5 }, 42, &mut c);
    c.finish("KSplit shift/Weibull mean below Phi1/Phi2 + M(k) + 3 s.e.")
}

/// The three arms simulated at one point of the figure grid.
struct GridPoint {
    family: Family,
    n: usize,
    k: usize,
    d: usize,
    lambda: f64,
    naive: LatencyStats,
    coded: LatencyStats,
    split: LatencyStats,
}

fn grid_families() -> [Family; 3] {
    [
        Family::Exponential,
        Family::ShiftedExponential {
            shift: harness::SHIFT_PRESET,
        },
        Family::Weibull {
            shape: harness::WEIBULL_PRESET_SHAPE,
        },
    ]
}

fn simulate_grid() -> Vec<GridPoint> {
    let mut coords = Vec::new();
    for (fi, family) in grid_families().into_iter().enumerate() {
        for code in figure_codes() {
            for (li, lambda) in figure_lambda_grid().into_iter().enumerate() {
                let seed = 1000 + 100 * fi as u64 + 10 * code.n as u64 + li as u64;
                coords.push((family, code.n, code.k, lambda, seed));
            }
        }
    }
    coords
        .into_par_iter()
        .map(|(family, n, k, lambda, seed)| {
            let d = n / k;
            let (naive_cfg, coded_cfg) =
                sim::gain_configs(k, d, lambda, &family, seed, RunSizes::default());
            let mut split_cfg = coded_cfg.clone();
            split_cfg.policy = Policy::KSplit { k, d };
            GridPoint {
                family,
                n,
                k,
                d,
                lambda,
                naive: run(&naive_cfg).unwrap(),
                coded: run(&coded_cfg).unwrap(),
                split: run(&split_cfg).unwrap(),
            }
        })
        .collect()
}

fn label(p: &GridPoint) -> String {
    format!("{} ({},{}) lambda={:.1}", p.family.name(), p.n, p.k, p.lambda)
}

fn criterion_5(grid: &[GridPoint]) -> Outcome {
    let mut c = Checks::new();
    for p in grid {
        let se = combined(&p.coded, &p.split);
        c.check(p.coded.mean <= p.split.mean + SIGMAS * se, || {
            format!(
                "{}: LeastKOfN {:.4} vs KSplit {:.4} ± {se:.4}",
                label(p),
                p.coded.mean,
                p.split.mean
            )
        });
    }
    c.finish("LeastKOfN mean below KSplit mean + 3 s.e. on the figure grid")
}

fn criterion_6(grid: &[GridPoint]) -> Outcome {
    let mut positive = Checks::new();
    let mut lower = Checks::new();
    let mut ratio = Checks::new();
    for (i, p) in grid.iter().enumerate() {
        let gain = p.naive.mean - p.coded.mean;
        let se = combined(&p.naive, &p.coded);
        let mc = MonteCarlo {
            seed: 6000 + i as u64,
            ..MonteCarlo::default()
        };
        let tg = theoretical_gain(p.d as u32, p.k, p.lambda, &p.family, mc).unwrap();
        let tg_se = se.hypot(tg.std_err);
        positive.check(gain > 0.0, || format!("{}: gain {gain:.4} not positive", label(p)));
        lower.check(gain >= tg.value - SIGMAS * tg_se, || {
            format!(
                "{}: gain {gain:.4} ± {tg_se:.4} below theoretical {:.4} (replicated {:.4}, {} {:.4})",
                label(p),
                tg.value,
                tg.replicated.value,
                tg.bound.branch,
                tg.bound.value
            )
        });
        let ratio_se = p.coded.std_err.hypot(ABSTRACT_RATIO * p.naive.std_err);
        ratio.check(
            p.coded.mean <= ABSTRACT_RATIO * p.naive.mean + SIGMAS * ratio_se,
            || {
                format!(
                    "{}: coded/naive = {:.4} / {:.4} = {:.3} above 0.8",
                    label(p),
                    p.coded.mean,
                    p.naive.mean,
                    p.coded.mean / p.naive.mean
                )
            },
        );
    }
    let mut details = Vec::new();
    let mut pass = true;
    for (name, checks) in [
        ("gain > 0", positive),
        ("gain >= theoretical - 3 s.e.", lower),
        ("coded <= 0.8 naive", ratio),
    ] {
        let failed = checks.failures.len();
        pass &= failed == 0;
        details.push(format!("{name}: {}/{} hold", checks.total - failed, checks.total));
        details.extend(checks.failures.into_iter().map(|f| format!("  violation {f}")));
    }
    Outcome::new(pass, "gain positivity, theoretical lower bound and 20% claim", details)
}

fn criterion_7() -> Outcome {
    let mut c = Checks::new();
    let lambda: f64 = 0.9;
    let cfg = ClusterConfig::new(Policy::NaiveReplication { d: 2 }, lambda, Family::Exponential, 71)
        .with_servers(sim::MIN_SERVERS);
    let stats = run(&cfg).unwrap();
    for r in 1..=3usize {
        let target = lambda.powi((1 << r) - 1);
        let got = stats.queue_tail(r);
        c.check((got - target).abs() <= TAIL_ABS_TOL, || {
            format!("r={r}: P(Q>=r) {got:.4} vs {target:.4}")
        });
    }
    c.finish("power-of-two queue tail within 0.02 of lambda^(2^r - 1)")
}

fn random_pmf(rng: &mut ChaCha8Rng) -> Pmf {
    let len = rng.random_range(2..=8);
    let w: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = w.iter().sum();
    Pmf::new(w.iter().map(|x| x / total).collect()).unwrap()
}

/// Sort-based Monte Carlo means and standard errors of every rank.
fn order_stat_oracle(pmf: &Pmf, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let cum: Vec<f64> = pmf
        .probs()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let top = *cum.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = vec![0usize; count];
    let mut s1 = vec![0.0; count];
    let mut s2 = vec![0.0; count];
    for _ in 0..ORACLE_SAMPLES {
        for x in draw.iter_mut() {
            let u = rng.random::<f64>() * top;
            *x = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        }
        draw.sort_unstable();
        for (l, &v) in draw.iter().enumerate() {
            let v = v as f64;
            s1[l] += v;
            s2[l] += v * v;
        }
    }
    let n = ORACLE_SAMPLES as f64;
    s1.iter()
        .zip(&s2)
        .map(|(a, b)| {
            let m = a / n;
            (m, ((b / n - m * m).max(0.0) / n).sqrt())
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for i in 0..20 {
        let pmf = random_pmf(&mut rng);
        let count = rng.random_range(2..=8);
        let oracle = order_stat_oracle(&pmf, count, 800 + i);
        let mut total = 0.0;
        for (l, (mc, se)) in oracle.iter().enumerate() {
            let exact = order_stat_expectation(&pmf, count, l + 1).unwrap();
            total += exact;
            c.check((exact - mc).abs() <= ORACLE_SIGMAS * se + EXACT_TOL, || {
                format!("pmf {i} N={count} l={}: {exact:.6} vs {mc:.6} ± {se:.6}", l + 1)
            });
        }
        let mean_total = count as f64 * pmf.mean();
        c.check(
            (total - mean_total).abs() <= SUM_TOL && (sum_order_stats(&pmf, count) - mean_total).abs() <= SUM_TOL,
            || format!("pmf {i}: sum {total} vs N E[Q] {mean_total}"),
        );
    }
    c.finish("order-statistic expectations match the sort oracle")
}

/// Loose Bound I rebuilt from the pmf definition.
fn loose_bound_i_reference(lambda: f64, d: f64, k: usize) -> f64 {
    let x = lambda * d;
    let q_max = ((d - 1.0) / (d * (1.0 - lambda))).ln() / x.ln();
    let q_max = q_max.ceil() as i32;
    let mut mean = 0.0;
    let mut mass = 0.0;
    for i in 0..q_max {
        let p = (1.0 - lambda) * x.powi(i);
        mean += i as f64 * p;
        mass += p;
    }
    mean += q_max as f64 * (1.0 - mass);
    (1..=k).map(|i| 1.0 / i as f64).sum::<f64>() + k as f64 * mean
}

fn criterion_9() -> Outcome {
    let mut c = Checks::new();
    let (d, k) = (1.4, 10);
    for (i, lambda) in [0.8, 0.85, 0.9].into_iter().enumerate() {
        let law = Family::Exponential.unit().unwrap();
        let cfg = ClusterConfig::new(Policy::BatchSampling { n: 14, k }, lambda, Family::Exponential, 90 + i as u64)
            .with_servers(sim::MIN_SERVERS)
            .with_task_service(law);
        let stats = run(&cfg).unwrap();
        let tight = bound_i(lambda, d, k, BoundIVariant::Tight, None).unwrap().value;
        let loose = bound_i(lambda, d, k, BoundIVariant::Loose, None).unwrap().value;
        let b2 = bound_ii(lambda, d, k).unwrap().value;
        c.check(stats.mean <= tight + SIGMAS * stats.std_err && tight + SIGMAS * stats.std_err <= loose, || {
            format!("lambda={lambda}: sim {:.4} ± {:.4}, tight {tight:.4}, loose {loose:.4}", stats.mean, stats.std_err)
        });
        c.check(b2 >= stats.mean, || format!("lambda={lambda}: Bound II {b2:.4} < sim {:.4}", stats.mean));
    }
    let loose = bound_i(0.9, d, k, BoundIVariant::Loose, None).unwrap().value;
    let reference = loose_bound_i_reference(0.9, d, k);
    c.check((loose - reference).abs() <= LOOSE_BOUND_I_TOL, || {
        format!("loose Bound I {loose:.6} vs recomputed {reference:.6}")
    });
    c.check((loose - 31.60).abs() < 0.005, || format!("loose Bound I {loose:.4} not 31.60"));
    c.finish("batch-sampling mean below Bound I and Bound II")
}

fn mc_max(dist: &ServiceDistribution, count: usize, samples: usize, seed: u64) -> (f64, f64) {
    let sampler = dist.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let m = (0..count)
            .map(|_| sampler.sample(&mut rng))
            .fold(f64::NEG_INFINITY, f64::max);
        s1 += m;
        s2 += m * m;
    }
    let n = samples as f64;
    let mean = s1 / n;
    (mean, ((s2 / n - mean * mean).max(0.0) / n).sqrt())
}

fn criterion_10() -> Outcome {
    let mut c = Checks::new();
    let dists = [
        ServiceDistribution::exponential(1.0).unwrap(),
        Family::Exponential.chunk(4).unwrap(),
        Family::ShiftedExponential { shift: 0.1 }.unit().unwrap(),
        Family::ShiftedExponential { shift: 0.1 }.chunk(4).unwrap(),
        ServiceDistribution::shifted_exponential(0.2, 1.0).unwrap(),
    ];
    for (i, dist) in dists.iter().enumerate() {
        let params = dist.subexp_params().unwrap();
        for (j, count) in [10usize, 100, 1000].into_iter().enumerate() {
            let samples = 1_000_000 / count;
            let (mc, se) = mc_max(dist, count, samples, 100 * i as u64 + j as u64);
            let bound = maximal_subexp_bound(count, params, dist.mean().unwrap());
            c.check(mc + SIGMAS * se <= bound, || {
                format!("{dist} N={count}: MC {mc:.4} ± {se:.4} vs bound {bound:.4}")
            });
        }
    }
    c.finish("maximal inequality dominates Monte Carlo E[max]")
}

/// `k`-th smallest of `k + delta` exponentials of rate `k`.
fn redundant_oracle(k: usize, delta: usize, seed: u64) -> (f64, f64) {
    let exp = Family::Exponential.chunk(k).unwrap().sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = vec![0.0; k + delta];
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..ORACLE_SAMPLES {
        for x in draw.iter_mut() {
            *x = exp.sample(&mut rng);
        }
        draw.sort_by(f64::total_cmp);
        let v = draw[k - 1];
        s1 += v;
        s2 += v * v;
    }
    let n = ORACLE_SAMPLES as f64;
    let mean = s1 / n;
    (mean, ((s2 / n - mean * mean) / n).sqrt())
}

fn criterion_11() -> Outcome {
    let mut c = Checks::new();
    let k = 4;
    let plain = run(&low_load(Policy::LeastKOfN { n: 2 * k, k }, 110)).unwrap();
    for delta in [1usize, 2, 4] {
        let red = run(&low_load(Policy::RedundantRequest { k, delta }, 110 + delta as u64)).unwrap();
        let se = combined(&red, &plain);
        c.check(red.mean <= plain.mean + SIGMAS * se, || {
            format!("delta={delta}: redundant {:.4} vs LeastKOfN {:.4} ± {se:.4}", red.mean, plain.mean)
        });
        let closed = redundant_request_latency(k, delta).unwrap();
        let (mc, mc_se) = redundant_oracle(k, delta, 1100 + delta as u64);
        c.check((closed - mc).abs() <= ORACLE_SIGMAS * mc_se, || {
            format!("delta={delta}: closed form {closed:.5} vs oracle {mc:.5} ± {mc_se:.5}")
        });
    }
    c.finish("redundant requests beat LeastKOfN at low load; closed form matches oracle")
}

fn criterion_12() -> Outcome {
    let mut c = Checks::new();
    let laws = [
        (ServiceDistribution::exponential(1.0).unwrap(), 0.5),
        (Family::Exponential.chunk(8).unwrap(), 0.8),
        (Family::ShiftedExponential { shift: 0.1 }.unit().unwrap(), 0.5),
        (ServiceDistribution::shifted_exponential(0.2, 1.0).unwrap(), 0.7),
    ];
    for (i, (law, rho)) in laws.into_iter().enumerate() {
        let mean = law.mean().unwrap();
        let cfg = ResidualConfig {
            arrival_rate: rho / mean,
            service: ResidualService::Random(law),
            seed: 120 + i as u64,
            warmup_jobs: 10_000,
            measured_jobs: 1_000_000,
        };
        let emp = empirical_residual(&cfg).unwrap();
        let theory = law.second_moment().unwrap() / (2.0 * mean);
        c.check((emp - theory).abs() <= RESIDUAL_REL_TOL * theory, || {
            format!("{law}: residual {emp:.5} vs {theory:.5}")
        });
    }
    let k = 8usize;
    let chunk = Family::Exponential.chunk(k).unwrap();
    let m = m_k_bound(&chunk, k).unwrap();
    // (1/s) ln(k^2 / (k - s)) on a uniform grid over (0, k).
    let kf = k as f64;
    let grid_min = (1..4_000_000)
        .map(|i| i as f64 * kf / 4_000_000.0)
        .map(|s| (kf * kf / (kf - s)).ln() / s)
        .fold(f64::INFINITY, f64::min);
    c.check((m.value - grid_min).abs() <= M_K_TOL, || {
        format!("M(8) {:.6} vs grid search {grid_min:.6}", m.value)
    });
    c.check((m.value - 0.5759).abs() <= M_K_TOL, || format!("M(8) {:.6} not 0.5759", m.value));
    let (mc, se) = mc_max(&chunk, k, ORACLE_SAMPLES, 1200);
    c.check(m.value >= mc + SIGMAS * se, || {
        format!("M(8) {:.5} below MC max of residuals {mc:.5} ± {se:.5}", m.value)
    });
    c.finish("empirical residual matches E[X^2]/(2E[X]); M(8) bound")
}

fn criterion_13() -> Outcome {
    let mut c = Checks::new();
    let (k, lambda) = (4usize, 0.5);
    let out = run_detailed(&ClusterConfig::new(Policy::KSplit { k, d: 2 }, lambda, Family::Exponential, 130)).unwrap();
    let sorted = out.sorted_latencies();
    for t in harness::tail_grid(k, lambda).unwrap() {
        let emp = empirical_ccdf(&sorted, t);
        let bound = tail_latency_bound(k, lambda, harness::TAIL_EPSILON, t).unwrap();
        c.check(emp <= bound, || format!("t={t:.4}: P(W>t) {emp:.5} vs bound {bound:.5}"));
    }
    c.finish("empirical latency CCDF below the tail bound")
}

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected = |n: usize| wanted.is_empty() || wanted.contains(&n);
    let start = Instant::now();
    let grid = if selected(5) || selected(6) {
        let t = Instant::now();
        let g = simulate_grid();
        println!("simulated {} figure-grid points in {:.1}s", g.len(), t.elapsed().as_secs_f64());
        g
    } else {
        Vec::new()
    };
    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(|| criterion_5(&grid))),
        (6, Box::new(|| criterion_6(&grid))),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
        (11, Box::new(criterion_11)),
        (12, Box::new(criterion_12)),
        (13, Box::new(criterion_13)),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria.iter().filter(|(n, _)| selected(*n)) {
        let t = Instant::now();
        let outcome = f();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} {} [{:.1}s]", outcome.summary, t.elapsed().as_secs_f64());
        for line in &outcome.details {
            println!("    {line}");
        }
        if !outcome.pass {
            failed.push(*n);
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
