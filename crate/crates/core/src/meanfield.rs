//! Large-system queue-length laws consumed by the bounds: the
//! double-exponential tail of power-of-d dispatch, the stationary pmf under
//! batch sampling, exact order statistics of i.i.d. queue lengths and the
//! state-dependent arrival rate seen by a queue of a given length.

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Tail model `P(Q >= r) <= c_u * load^(d^r)` of a queue under power-of-d
/// dispatch in the large-system limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleExpTailModel {
    /// Arrival intensity per server.
    pub lambda: f64,
    pub d: u32,
    /// Value raised to `d^r`; `lambda / k` for one of the `k` split subsystems.
    pub per_queue_load: f64,
    pub c_u: f64,
}

impl DoubleExpTailModel {
    pub fn new(lambda: f64, d: u32, per_queue_load: f64) -> Result<Self> {
        let m = Self {
            lambda,
            d,
            per_queue_load,
            c_u: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_c_u(mut self, c_u: f64) -> Result<Self> {
        self.c_u = c_u;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(invalid("lambda", format!("{} must lie in (0, 1)", self.lambda)));
        }
        if self.d < 2 {
            return Err(invalid("d", format!("{} must be >= 2", self.d)));
        }
        if !(self.per_queue_load > 0.0 && self.per_queue_load < 1.0) {
            return Err(invalid(
                "per_queue_load",
                format!("{} must lie in (0, 1)", self.per_queue_load),
            ));
        }
        if !(self.c_u > 0.0 && self.c_u.is_finite()) {
            return Err(invalid("c_u", format!("{} must be > 0", self.c_u)));
        }
        Ok(())
    }

    /// `min(1, c_u * load^(d^r))`. At `r = 0` this is the raw tail formula
    /// (`c_u * load`), not the trivial `P(Q >= 0) = 1`; see
    /// [`DoubleExpTailModel::queue_ccdf`] for the probability law.
    pub fn double_exp_ccdf(&self, r: u32) -> f64 {
        let exponent = (self.d as f64).powi(r as i32) * self.per_queue_load.ln();
        // exp underflows to 0 below about -745 anyway; keep it explicit.
        if exponent < -745.0 {
            return 0.0;
        }
        (self.c_u * exponent.exp()).min(1.0)
    }

    /// The law sampled by [`DoubleExpTailModel::sample_queue_length`]:
    /// `1` at `r = 0` and the clamped tail formula for `r >= 1`.
    pub fn queue_ccdf(&self, r: u32) -> f64 {
        if r == 0 {
            1.0
        } else {
            self.double_exp_ccdf(r)
        }
    }

    /// `E[Q] = sum_{r >= 1} P(Q >= r)` under [`DoubleExpTailModel::queue_ccdf`].
    pub fn mean_queue_length(&self) -> f64 {
        let mut total = 0.0;
        for r in 1.. {
            let p = self.queue_ccdf(r);
            if p == 0.0 {
                break;
            }
            total += p;
        }
        total
    }

    /// Inverse-CCDF draw of a queue length.
    pub fn sample_queue_length<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        // u in (0, 1] so that a vanishing tail terminates the scan.
        let u = 1.0 - rng.random::<f64>();
        let mut q = 0;
        while self.queue_ccdf(q + 1) >= u {
            q += 1;
        }
        q
    }
}

/// A probability mass function on `0..=max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Accepts masses that are non-negative and sum to one within `1e-9`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("pmf", "empty"));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(invalid("pmf", format!("mass {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid("pmf", format!("masses sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// All mass at `value`.
    pub fn point_mass(value: usize) -> Self {
        let mut probs = vec![0.0; value + 1];
        probs[value] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_value(&self) -> usize {
        self.probs.len() - 1
    }

    /// `P(Y = m)`, zero outside the support.
    pub fn mass(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    /// `P(Y <= m)`.
    pub fn cdf(&self, m: usize) -> f64 {
        if m >= self.max_value() {
            return 1.0;
        }
        self.probs[..=m].iter().sum::<f64>().min(1.0)
    }

    /// `P(Y >= m)`.
    pub fn ccdf(&self, m: usize) -> f64 {
        if m == 0 {
            1.0
        } else if m > self.max_value() {
            0.0
        } else {
            self.probs[m..].iter().sum::<f64>().min(1.0)
        }
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i as f64 - mu).powi(2) * p)
            .sum()
    }
}

/// Stationary queue-length pmf under batch sampling with probe ratio
/// `d = n / k` in `(1, 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSamplingDist {
    pub lambda: f64,
    pub d: f64,
    pub q_max: usize,
    pub pmf: Pmf,
}

/// `ceil(ln((d-1)/(d(1-lambda))) / ln(lambda d))`.
pub fn batch_sampling_q_max(lambda: f64, d: f64) -> f64 {
    ((d - 1.0) / (d * (1.0 - lambda))).ln() / (lambda * d).ln()
}

/// Builds the batch-sampling pmf: geometric masses `(1-lambda)(lambda d)^i`
/// below `q_max` and the residual mass at `q_max`.
pub fn batch_sampling_pmf(lambda: f64, d: f64) -> Result<BatchSamplingDist> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid("lambda", format!("{lambda} must lie in (0, 1)")));
    }
    if !(d > 1.0 && d < 2.0) {
        return Err(invalid("d", format!("{d} must lie in (1, 2)")));
    }
    let x = lambda * d;
    if (x - 1.0).abs() < 1e-12 {
        return Err(invalid("lambda * d", "must differ from 1"));
    }
    let raw = batch_sampling_q_max(lambda, d);
    if !raw.is_finite() || raw.ceil() <= 0.0 {
        return Err(Error::ModelInconsistency(format!(
            "q_max = ceil({raw}) is not positive for lambda = {lambda}, d = {d}"
        )));
    }
    let q_max = raw.ceil() as usize;
    let mut probs = Vec::with_capacity(q_max + 1);
    let mut term = 1.0 - lambda;
    for _ in 0..q_max {
        probs.push(term);
        term *= x;
    }
    let residual = 1.0 - probs.iter().sum::<f64>();
    if residual < -1e-9 {
        return Err(Error::ModelInconsistency(format!(
            "residual mass at q_max = {q_max} is {residual}"
        )));
    }
    probs.push(residual.max(0.0));
    Ok(BatchSamplingDist {
        lambda,
        d,
        q_max,
        pmf: Pmf::new(probs)?,
    })
}

fn ln_binomial(n: usize, j: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(j as f64 + 1.0) - ln_gamma((n - j) as f64 + 1.0)
}

/// `P(at most l - 1 of N draws fall at or below m - 1)`, i.e. `P(Q_(l) >= m)`.
fn order_stat_ccdf(pmf: &Pmf, count: usize, rank: usize, m: usize) -> f64 {
    let f = pmf.cdf(m - 1);
    if f <= 0.0 {
        return 1.0;
    }
    if f >= 1.0 {
        return 0.0;
    }
    let (ln_f, ln_g) = (f.ln(), (-f).ln_1p());
    (0..rank)
        .map(|j| (ln_binomial(count, j) + j as f64 * ln_f + (count - j) as f64 * ln_g).exp())
        .sum::<f64>()
        .min(1.0)
}

/// Exact `E[Q_(l)]`, the `l`-th smallest of `count` i.i.d. draws from `pmf`.
pub fn order_stat_expectation(pmf: &Pmf, count: usize, rank: usize) -> Result<f64> {
    if count == 0 || rank == 0 || rank > count {
        return Err(Error::RankOutOfRange { rank, count });
    }
    Ok((1..=pmf.max_value())
        .map(|m| order_stat_ccdf(pmf, count, rank, m))
        .sum())
}

/// `sum_l E[Q_(l)]` over all `count` ranks, which is `count * E[Q]`.
pub fn sum_order_stats(pmf: &Pmf, count: usize) -> f64 {
    count as f64 * pmf.mean()
}

/// `lambda_m = lambda [P(Y >= m)^d - P(Y >= m+1)^d] / P(Y = m)`.
pub fn effective_arrival_rate(lambda: f64, d: f64, m: usize, pmf: &Pmf) -> Result<f64> {
    let p = pmf.mass(m);
    if p <= 0.0 {
        return Err(Error::ZeroMass(m));
    }
    Ok(lambda * (pmf.ccdf(m).powf(d) - pmf.ccdf(m + 1).powf(d)) / p)
}
