//! Closed-form latency results: the sub-exponential maximal inequality, the
//! mean and tail bounds for the k-split policy, the residual-maximum term
//! `M(k)`, zero-load gains, redundant requests, and the two batch-sampling
//! bounds.
//!
//! Logarithm bases follow the derivation each term comes from: terms that
//! arise from the maximal inequality (`2 b ln k`, `tau sqrt(2 ln k)`) use the
//! natural log, while terms derived from the queue-length cut-off `r`
//! (`lg(4 lg k)`, `lg lg(k/lambda)`) use base 2.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::dist::{Family, ServiceDistribution, SubExpParams};
use crate::error::{invalid, Error, Result};
use crate::meanfield::{batch_sampling_pmf, order_stat_expectation, DoubleExpTailModel, Pmf};
use crate::numeric::{golden_section, harmonic};

/// Base of the logarithms in the cut-off terms.
pub const CUTOFF_LOG_BASE: f64 = 2.0;
/// Base of the logarithms in the maximal-inequality terms.
pub const MAXIMAL_LOG_BASE: f64 = std::f64::consts::E;
/// Relative tolerance of every golden-section minimization in this module.
pub const MINIMIZE_REL_TOL: f64 = 1e-6;

fn lg(x: f64) -> f64 {
    x.log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
    BoundITight,
    BoundILoose,
    BoundII,
    /// Low-arrival regime: the latency is the zero-load order statistic.
    ZeroLoad,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::Phi1 => "Phi1",
            Branch::Phi2 => "Phi2",
            Branch::Phi3 => "Phi3",
            Branch::Phi4 => "Phi4",
            Branch::BoundITight => "BoundI-tight",
            Branch::BoundILoose => "BoundI-loose",
            Branch::BoundII => "BoundII",
            Branch::ZeroLoad => "ZeroLoad",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Inputs echoed back in a [`BoundReport`]; unused ones stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundInputs {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub tau: Option<f64>,
    pub b: Option<f64>,
    pub d: Option<f64>,
    pub delta: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub branch: Branch,
    pub inputs: BoundInputs,
    /// Intermediate quantities keyed by name (`r`, `delta`, `M(k)`, `mu2`, ...).
    pub aux: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(value: f64, branch: Branch, inputs: BoundInputs) -> Self {
        Self {
            value,
            branch,
            inputs,
            aux: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_string(), value);
        self
    }

    pub fn aux(&self, key: &str) -> Option<f64> {
        self.aux.get(key).copied()
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_err: 0.0,
        }
    }

    fn from_samples(sum: f64, sum_sq: f64, n: usize) -> Self {
        let n_f = n as f64;
        let mean = sum / n_f;
        let var = if n > 1 {
            ((sum_sq - n_f * mean * mean) / (n_f - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            std_err: (var / n_f).sqrt(),
        }
    }
}

/// Sample budget and seed for Monte Carlo evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            samples: 200_000,
            seed: 0x5eed,
        }
    }
}

/// Upper bound on `E[max of N i.i.d. (tau^2, b)-sub-exponential draws]`:
/// `max(tau sqrt(2 ln N), 2 b ln N) + mean`.
pub fn maximal_subexp_bound(count: usize, params: SubExpParams, mean: f64) -> f64 {
    let ln_n = (count.max(1) as f64).ln();
    (params.tau() * (2.0 * ln_n).sqrt()).max(2.0 * params.b * ln_n) + mean
}

/// Moment of the residual service time seen at a busy server:
/// `E[R^n] = E[X^(n+1)] / ((n+1) E[X])`.
pub fn residual_moment(dist: &ServiceDistribution, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "moment order must be >= 1"));
    }
    Ok(dist.raw_moment(n + 1)? / ((n + 1) as f64 * dist.mean()?))
}

/// `E[exp(s R)]` for the residual service time, `(X(s) - 1) / (s E[X])`.
pub fn residual_mgf(dist: &ServiceDistribution, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok((dist.mgf(s)? - 1.0) / (s * dist.mean()?))
}

/// Bound on `M(k) = E[max of k residuals]` with its minimizing `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualMaxBound {
    pub value: f64,
    pub s: f64,
}

/// `min_s (1/s) ln(k E[exp(s R)])`, which for a service law of mean `1/k`
/// is `min_s (1/s) ln(k^2 (X(s) - 1) / s)`.
///
/// The objective is scanned on a log grid over the MGF's domain and the best
/// bracket is refined by golden-section search.
pub fn m_k_bound(dist: &ServiceDistribution, k: usize) -> Result<ResidualMaxBound> {
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let s_max = dist.mgf_abscissa();
    if s_max <= 0.0 {
        return Err(Error::MgfDomain {
            s: f64::MIN_POSITIVE,
            dist: dist.to_string(),
        });
    }
    let mean = dist.mean()?;
    if k == 1 {
        // The objective decreases to E[R] as s -> 0.
        return Ok(ResidualMaxBound {
            value: residual_moment(dist, 1)?,
            s: 0.0,
        });
    }
    let k_f = k as f64;
    let objective = |s: f64| match residual_mgf(dist, s) {
        Ok(m) if m > 0.0 => (k_f * m).ln() / s,
        _ => f64::INFINITY,
    };
    let hi = if s_max.is_finite() {
        s_max * (1.0 - 1e-9)
    } else {
        64.0 / mean
    };
    let lo = hi * 1e-6;
    const GRID: usize = 160;
    let ratio = (hi / lo).powf(1.0 / GRID as f64);
    let grid: Vec<f64> = (0..=GRID).map(|i| lo * ratio.powi(i as i32)).collect();
    let values: Vec<f64> = grid.iter().map(|&s| objective(s)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if !values[best].is_finite() {
        return Err(Error::MgfDomain {
            s: grid[best],
            dist: dist.to_string(),
        });
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(GRID)];
    let refined = golden_section(objective, a, b, MINIMIZE_REL_TOL);
    let (s, value) = if refined.value <= values[best] {
        (refined.x, refined.value)
    } else {
        (grid[best], values[best])
    };
    Ok(ResidualMaxBound { value, s })
}

/// Cut-off quantities shared by the mean-latency bounds.
#[derive(Debug, Clone, Copy)]
struct Cutoff {
    /// `lg(4 lg k)`
    lg_four_lg_k: f64,
    /// `lg lg(k/lambda)`
    lglg_k_over_lambda: f64,
    /// `2 lg(k/lambda) / (4 k^4 lg k)`
    overflow: f64,
}

fn cutoff(k: usize, lambda: f64) -> Result<Cutoff> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be >= 2")));
    }
    let k_f = k as f64;
    if !(lambda > 1.0 / k_f && lambda < 1.0) {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} must lie in (1/k, 1) = ({}, 1); use the zero-load result below 1/k",
            1.0 / k_f
        )));
    }
    let lg_k_over_lambda = lg(k_f / lambda);
    if lg_k_over_lambda <= 0.0 {
        return Err(Error::Precondition(format!(
            "lg(k/lambda) = {lg_k_over_lambda} must be positive"
        )));
    }
    Ok(Cutoff {
        lg_four_lg_k: lg(4.0 * lg(k_f)),
        lglg_k_over_lambda: lg(lg_k_over_lambda),
        overflow: 2.0 * lg_k_over_lambda / (4.0 * k_f.powi(4) * lg(k_f)),
    })
}

/// Mean-latency bound for the k-split policy with `(tau^2, b)`
/// sub-exponential chunk service of mean `1/k` and `d = 2`:
///
/// * `Phi1 = 2 b ln k + r/k + 2 lg(k/lambda) / (4 k^4 lg k)` when
///   `2 b^2 ln k >= tau^2 r`,
/// * `Phi2 = tau sqrt(2 ln k) sqrt(r) + r/k + 2 lg(k/lambda) / (4 k^4 lg k)`
///   otherwise,
///
/// with `r = lg(4 lg k) - lg lg(k/lambda) - 1` (cut-off at `delta = 1/k^3`),
/// plus `residual_max`, the bound on `M(k)`.
pub fn mean_latency_bound_general(
    k: usize,
    lambda: f64,
    params: SubExpParams,
    residual_max: f64,
) -> Result<BoundReport> {
    let c = cutoff(k, lambda)?;
    let k_f = k as f64;
    let r = c.lg_four_lg_k - c.lglg_k_over_lambda - 1.0;
    if r <= 0.0 {
        return Err(Error::Precondition(format!("cut-off r = {r} must be positive")));
    }
    let ln_k = k_f.ln();
    let tau = params.tau();
    let use_phi1 = 2.0 * params.b * params.b * ln_k >= params.tau_sq * r;
    let concentration = if use_phi1 {
        2.0 * params.b * ln_k
    } else {
        tau * (2.0 * ln_k).sqrt() * r.sqrt()
    };
    let phi = concentration + r / k_f + c.overflow;
    let inputs = BoundInputs {
        k: Some(k),
        lambda: Some(lambda),
        tau: Some(tau),
        b: Some(params.b),
        d: Some(2.0),
        ..Default::default()
    };
    let branch = if use_phi1 { Branch::Phi1 } else { Branch::Phi2 };
    Ok(BoundReport::new(phi + residual_max, branch, inputs)
        .with("r", r)
        .with("delta", 1.0 / k_f.powi(3))
        .with("phi", phi)
        .with("M(k)", residual_max)
        .with("cutoff_log_base", CUTOFF_LOG_BASE)
        .with("maximal_log_base", MAXIMAL_LOG_BASE))
}

/// [`mean_latency_bound_general`] with parameters and `M(k)` derived from the
/// chunk service law.
pub fn mean_latency_bound_for(
    dist: &ServiceDistribution,
    k: usize,
    lambda: f64,
) -> Result<BoundReport> {
    let params = dist.subexp_params()?;
    let m_k = m_k_bound(dist, k)?;
    Ok(mean_latency_bound_general(k, lambda, params, m_k.value)?.with("s", m_k.s))
}

/// Mean-latency bound for the k-split policy with exponential chunks of
/// mean `1/k` (`Phi3` / `Phi4`); the in-service job is counted inside the
/// cut-off so no separate residual term appears.
pub fn mean_latency_bound_exp(k: usize, lambda: f64) -> Result<BoundReport> {
    let c = cutoff(k, lambda)?;
    let k_f = k as f64;
    let r = c.lg_four_lg_k - c.lglg_k_over_lambda;
    let ln_k = k_f.ln();
    let use_phi3 = 2.0 * ln_k >= r;
    let concentration = if use_phi3 {
        2.0 * ln_k / k_f
    } else {
        (2.0 * ln_k).sqrt() / k_f * r.sqrt()
    };
    let value = concentration + r / k_f + c.overflow;
    let inputs = BoundInputs {
        k: Some(k),
        lambda: Some(lambda),
        tau: Some(1.0 / k_f),
        b: Some(1.0 / k_f),
        d: Some(2.0),
        ..Default::default()
    };
    let branch = if use_phi3 { Branch::Phi3 } else { Branch::Phi4 };
    Ok(BoundReport::new(value, branch, inputs)
        .with("r", r)
        .with("delta", 1.0 / k_f.powi(3))
        .with("cutoff_log_base", CUTOFF_LOG_BASE)
        .with("maximal_log_base", MAXIMAL_LOG_BASE))
}

/// Cut-off `r = lg(lg(epsilon/k) / lg(lambda/k))` of the tail bound.
pub fn tail_cutoff(k: usize, lambda: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("{epsilon} must lie in (0, 1)")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid("lambda", format!("{lambda} must lie in (0, 1)")));
    }
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let k_f = k as f64;
    let r = lg(lg(epsilon / k_f) / lg(lambda / k_f));
    if !(r > 0.0) {
        return Err(Error::Precondition(format!(
            "tail cut-off r = {r} must be positive (needs epsilon < lambda)"
        )));
    }
    Ok(r)
}

/// `P(W > t)` bound for exponential chunks, clamped to `[0, 1]`.
pub fn tail_latency_bound(k: usize, lambda: f64, epsilon: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} must be >= 0")));
    }
    let r = tail_cutoff(k, lambda, epsilon)?;
    let k_f = k as f64;
    let start = r / k_f;
    let p = if t < start {
        1.0
    } else if t <= 2.0 * start {
        k_f * (-(k_f * k_f / (2.0 * r)) * (t - start).powi(2)).exp() + epsilon
    } else {
        k_f * (-(k_f / 2.0) * (t - start)).exp() + epsilon
    };
    Ok(p.min(1.0))
}

/// `E[max of k i.i.d. draws of dist]`: closed form for the exponential
/// families, Monte Carlo otherwise.
pub fn expected_max(dist: &ServiceDistribution, k: usize, mc: MonteCarlo) -> Result<Estimate> {
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let h = harmonic(k);
    match *dist {
        ServiceDistribution::Exponential { rate } => Ok(Estimate::exact(h / rate)),
        ServiceDistribution::ShiftedExponential { shift, rate } => {
            Ok(Estimate::exact(shift + h / rate))
        }
        ServiceDistribution::Weibull { shape: 1.0, scale } => {
            Ok(Estimate::exact(h * scale))
        }
        _ => {
            if k == 1 {
                return Ok(Estimate::exact(dist.mean()?));
            }
            let sampler = dist.sampler();
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..mc.samples {
                let m = (0..k)
                    .map(|_| sampler.sample(&mut rng))
                    .fold(f64::NEG_INFINITY, f64::max);
                sum += m;
                sum_sq += m * m;
            }
            Ok(Estimate::from_samples(sum, sum_sq, mc.samples))
        }
    }
}

/// Zero-load latency `E[max of k chunk service times]` with chunks of mean `1/k`.
pub fn zero_load_latency(family: &Family, k: usize, mc: MonteCarlo) -> Result<Estimate> {
    expected_max(&family.chunk(k)?, k, mc)
}

/// Zero-load gain `E[X_r] - E[max of k chunks]` with mean-one whole-file service.
pub fn zero_load_gain(family: &Family, k: usize, mc: MonteCarlo) -> Result<Estimate> {
    if k == 1 {
        return Ok(Estimate::exact(0.0));
    }
    let lat = zero_load_latency(family, k, mc)?;
    Ok(Estimate {
        value: 1.0 - lat.value,
        std_err: lat.std_err,
    })
}

/// Zero-load gain between an arbitrary whole-file law and chunk law.
pub fn zero_load_gain_between(
    whole: &ServiceDistribution,
    chunk: &ServiceDistribution,
    k: usize,
    mc: MonteCarlo,
) -> Result<Estimate> {
    let lat = expected_max(chunk, k, mc)?;
    Ok(Estimate {
        value: whole.mean()? - lat.value,
        std_err: lat.std_err,
    })
}

/// `(H(k + delta) - H(delta)) / k`: mean latency when a request goes to
/// `k + delta` idle exponential servers and completes at the `k`-th finish.
pub fn redundant_request_latency(k: usize, delta: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    Ok((harmonic(k + delta) - harmonic(delta)) / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundIVariant {
    Tight,
    Loose,
}

/// Batch-sampling mean-latency bound from queue-length order statistics,
/// with unit-mean exponential tasks:
///
/// * tight: `H(k) + sum_{l=1..k} E[Q_(l)] / (k - l + 1)`,
/// * loose: `H(k) + sum_{l=1..k} E[Q_(l)]` (`= H(k) + k E[Q]` when `N = k`).
///
/// Order statistics are over `sample_count` i.i.d. queue lengths
/// (`None` means `k`).
pub fn bound_i(
    lambda: f64,
    d: f64,
    k: usize,
    variant: BoundIVariant,
    sample_count: Option<usize>,
) -> Result<BoundReport> {
    let pmf = batch_sampling_pmf(lambda, d)?.pmf;
    let mut report = bound_i_from_pmf(&pmf, k, variant, sample_count)?;
    report.inputs.lambda = Some(lambda);
    report.inputs.d = Some(d);
    Ok(report)
}

/// [`bound_i`] for an explicit queue-length pmf.
pub fn bound_i_from_pmf(
    pmf: &Pmf,
    k: usize,
    variant: BoundIVariant,
    sample_count: Option<usize>,
) -> Result<BoundReport> {
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let count = sample_count.unwrap_or(k);
    let mut total = 0.0;
    for l in 1..=k {
        let e = order_stat_expectation(pmf, count, l)?;
        total += match variant {
            BoundIVariant::Tight => e / (k - l + 1) as f64,
            BoundIVariant::Loose => e,
        };
    }
    let h = harmonic(k);
    let branch = match variant {
        BoundIVariant::Tight => Branch::BoundITight,
        BoundIVariant::Loose => Branch::BoundILoose,
    };
    let inputs = BoundInputs {
        k: Some(k),
        ..Default::default()
    };
    Ok(BoundReport::new(h + total, branch, inputs)
        .with("H(k)", h)
        .with("order_stat_term", total)
        .with("sample_count", count as f64)
        .with("E[Q]", pmf.mean()))
}

/// Mean and variance of the density obtained by linearly interpolating the
/// pmf atoms at `0..=q_max` and renormalizing.
pub fn interpolated_moments(pmf: &Pmf) -> (f64, f64) {
    let p = pmf.probs();
    if p.len() < 2 {
        return (0.0, 0.0);
    }
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (i, w) in p.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let i = i as f64;
        z += (a + b) / 2.0;
        m1 += i * (a + b) / 2.0 + (a + 2.0 * b) / 6.0;
        m2 += i * i * (a + b) / 2.0 + i * (a + 2.0 * b) / 3.0 + (a + 3.0 * b) / 12.0;
    }
    if z <= 0.0 {
        return (0.0, 0.0);
    }
    let mu = m1 / z;
    (mu, (m2 / z - mu * mu).max(0.0))
}

/// Order-statistic bound on the continuous surrogate of the queue lengths:
/// `H(k) + k min_z (z + (mu2 - z + sqrt((mu2 - z)^2 + sigma2^2)) / 2)`,
/// minimized over `z` in `[-q_max, q_max]`.
pub fn bound_ii(lambda: f64, d: f64, k: usize) -> Result<BoundReport> {
    let bs = batch_sampling_pmf(lambda, d)?;
    let mut report = bound_ii_from_pmf(&bs.pmf, k)?;
    report.inputs.lambda = Some(lambda);
    report.inputs.d = Some(d);
    Ok(report)
}

/// [`bound_ii`] for an explicit queue-length pmf.
pub fn bound_ii_from_pmf(pmf: &Pmf, k: usize) -> Result<BoundReport> {
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let h = harmonic(k);
    let inputs = BoundInputs {
        k: Some(k),
        ..Default::default()
    };
    let q_max = pmf.max_value() as f64;
    if q_max == 0.0 {
        return Ok(BoundReport::new(h, Branch::BoundII, inputs)
            .with("mu2", 0.0)
            .with("sigma2_sq", 0.0)
            .with("z", 0.0));
    }
    let (mu, var) = interpolated_moments(pmf);
    let inner = |z: f64| z + 0.5 * (mu - z + ((mu - z).powi(2) + var).sqrt());
    let m = golden_section(inner, -q_max, q_max, MINIMIZE_REL_TOL);
    Ok(BoundReport::new(h + k as f64 * m.value, Branch::BoundII, inputs)
        .with("mu2", mu)
        .with("sigma2_sq", var)
        .with("z", m.x)
        .with("H(k)", h))
}

/// Upper bound on the coded mean latency used by [`theoretical_gain`]:
/// the exponential bound, the sub-exponential bound plus `M(k)`, or the
/// zero-load latency when `lambda <= 1/k`.
pub fn coded_latency_bound(
    family: &Family,
    k: usize,
    lambda: f64,
    mc: MonteCarlo,
) -> Result<BoundReport> {
    let chunk = family.chunk(k)?;
    if k < 2 || lambda <= 1.0 / k as f64 {
        let lat = expected_max(&chunk, k, mc)?;
        let inputs = BoundInputs {
            k: Some(k),
            lambda: Some(lambda),
            ..Default::default()
        };
        return Ok(BoundReport::new(lat.value, Branch::ZeroLoad, inputs)
            .with("std_err", lat.std_err));
    }
    match family {
        Family::Exponential => mean_latency_bound_exp(k, lambda),
        _ => mean_latency_bound_for(&chunk, k, lambda),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalGain {
    /// Replicated latency estimate minus the coded bound.
    pub value: f64,
    pub std_err: f64,
    /// Monte Carlo estimate of the replicated-system term.
    pub replicated: Estimate,
    pub bound: BoundReport,
}

/// Lower bound on the gain of an `(n = d k, k)` code over `(d, 1)`
/// replication: a Monte Carlo estimate of the replicated latency
/// `E[sum_{j=1}^{Q+1} X_r^j]`, with `Q` the queue seen on arrival drawn from
/// the double-exponential model at load `lambda` and the arriving job
/// counted, minus [`coded_latency_bound`].
pub fn theoretical_gain(
    d: u32,
    k: usize,
    lambda: f64,
    family: &Family,
    mc: MonteCarlo,
) -> Result<TheoreticalGain> {
    let model = DoubleExpTailModel::new(lambda, d, lambda)?;
    let whole = family.unit()?.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..mc.samples {
        let q = model.sample_queue_length(&mut rng);
        let work: f64 = (0..=q).map(|_| whole.sample(&mut rng)).sum();
        sum += work;
        sum_sq += work * work;
    }
    let replicated = Estimate::from_samples(sum, sum_sq, mc.samples);
    let bound = coded_latency_bound(
        family,
        k,
        lambda,
        MonteCarlo {
            seed: mc.seed ^ 0x9e37_79b9_7f4a_7c15,
            ..mc
        },
    )?;
    let bound_err = bound.aux("std_err").unwrap_or(0.0);
    Ok(TheoreticalGain {
        value: replicated.value - bound.value,
        std_err: replicated.std_err.hypot(bound_err),
        replicated,
        bound,
    })
}
