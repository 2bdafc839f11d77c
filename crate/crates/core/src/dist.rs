//! Service-time laws: sampling, moments, moment generating functions,
//! sub-exponential `(tau^2, b)` parameters and light/heavy tail classes.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp, Pareto, Weibull};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::numeric;

/// Absolute tolerance used when an MGF has to be integrated numerically.
pub const MGF_ABS_TOL: f64 = 1e-9;
/// Mass allowed beyond the upper integration limit of an MGF.
pub const MGF_TAIL_TOL: f64 = 1e-12;

/// Multiplier applied to the Orlicz-norm proxy of a Weibull law to obtain
/// its `tau` and `b`.
pub const WEIBULL_SUBEXP_CONSTANT: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServiceDistribution {
    Exponential { rate: f64 },
    /// `shift + Exp(rate)`.
    ShiftedExponential { shift: f64, rate: f64 },
    /// Density `(m/scale) (x/scale)^(m-1) exp(-(x/scale)^m)`.
    Weibull { shape: f64, scale: f64 },
    /// `P(X > x) = (x_min / x)^tail` for `x >= x_min`.
    Pareto { tail: f64, x_min: f64 },
}

/// A distribution family with its shape parameters but without a time
/// scale; [`Family::chunk`] fixes the scale so the mean is `1/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Exponential,
    /// Shift expressed as a fraction of the mean, `0 <= shift < 1`.
    ShiftedExponential { shift: f64 },
    Weibull { shape: f64 },
    Pareto { tail: f64 },
}

/// The `(tau^2, b)` pair of a sub-exponential law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubExpParams {
    pub tau_sq: f64,
    pub b: f64,
}

impl SubExpParams {
    pub fn new(tau_sq: f64, b: f64) -> Result<Self> {
        if !(tau_sq >= 0.0 && tau_sq.is_finite()) {
            return Err(invalid("tau_sq", format!("{tau_sq} must be finite and >= 0")));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(invalid("b", format!("{b} must be finite and >= 0")));
        }
        Ok(Self { tau_sq, b })
    }

    pub fn tau(&self) -> f64 {
        self.tau_sq.sqrt()
    }
}

/// Tail class of a service law with respect to `d` choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClass {
    /// Finite MGF on some `s > 0`.
    ClassI,
    /// Polynomial tail with exponent above `d/(d-1)`.
    ClassII,
    Unclassified,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be finite and > 0")))
    }
}

impl ServiceDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        let d = Self::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn shifted_exponential(shift: f64, rate: f64) -> Result<Self> {
        let d = Self::ShiftedExponential { shift, rate };
        d.validate()?;
        Ok(d)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        let d = Self::Weibull { shape, scale };
        d.validate()?;
        Ok(d)
    }

    pub fn pareto(tail: f64, x_min: f64) -> Result<Self> {
        let d = Self::Pareto { tail, x_min };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Exponential { rate } => positive("rate", rate),
            Self::ShiftedExponential { shift, rate } => {
                if !(shift >= 0.0 && shift.is_finite()) {
                    return Err(invalid("shift", format!("{shift} must be finite and >= 0")));
                }
                positive("rate", rate)
            }
            Self::Weibull { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)
            }
            Self::Pareto { tail, x_min } => {
                positive("tail", tail)?;
                positive("x_min", x_min)
            }
        }
    }

    /// Smallest value in the support.
    pub fn support_min(&self) -> f64 {
        match *self {
            Self::ShiftedExponential { shift, .. } => shift,
            Self::Pareto { x_min, .. } => x_min,
            _ => 0.0,
        }
    }

    /// `E[X^order]`.
    pub fn raw_moment(&self, order: u32) -> Result<f64> {
        let n = order as i32;
        Ok(match *self {
            Self::Exponential { rate } => factorial(order) / rate.powi(n),
            Self::ShiftedExponential { shift, rate } => (0..=order)
                .map(|j| {
                    binomial(order, j) * shift.powi(n - j as i32) * factorial(j)
                        / rate.powi(j as i32)
                })
                .sum(),
            Self::Weibull { shape, scale } => scale.powi(n) * gamma(1.0 + order as f64 / shape),
            Self::Pareto { tail, x_min } => {
                if tail <= order as f64 {
                    return Err(Error::InfiniteMoment {
                        order,
                        dist: self.to_string(),
                    });
                }
                tail * x_min.powi(n) / (tail - order as f64)
            }
        })
    }

    pub fn mean(&self) -> Result<f64> {
        self.raw_moment(1)
    }

    pub fn second_moment(&self) -> Result<f64> {
        self.raw_moment(2)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        Ok(self.second_moment()? - m * m)
    }

    /// Supremum of the open interval `(0, s_max)` on which the MGF is
    /// finite; `0` when it is infinite for every `s > 0`.
    pub fn mgf_abscissa(&self) -> f64 {
        match *self {
            Self::Exponential { rate } | Self::ShiftedExponential { rate, .. } => rate,
            Self::Weibull { shape, scale } => {
                if shape > 1.0 {
                    f64::INFINITY
                } else if shape == 1.0 {
                    1.0 / scale
                } else {
                    0.0
                }
            }
            Self::Pareto { .. } => 0.0,
        }
    }

    fn check_mgf_domain(&self, s: f64) -> Result<()> {
        let ok = s.is_finite()
            && match *self {
                // Spec'd restriction: the Weibull MGF is only offered for m >= 1.
                Self::Weibull { shape, .. } if shape < 1.0 => s == 0.0,
                _ => s <= 0.0 || s < self.mgf_abscissa(),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::MgfDomain {
                s,
                dist: self.to_string(),
            })
        }
    }

    /// `E[exp(s X)]`, closed form where one exists and quadrature otherwise.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.check_mgf_domain(s)?;
        if s == 0.0 {
            return Ok(1.0);
        }
        match *self {
            Self::Exponential { rate } => Ok(rate / (rate - s)),
            Self::ShiftedExponential { shift, rate } => Ok((s * shift).exp() * rate / (rate - s)),
            Self::Weibull { shape: 1.0, scale } => Ok(1.0 / (1.0 - s * scale)),
            _ => self.mgf_quadrature(s),
        }
    }

    /// `E[exp(s X)]` by numerical integration for every family.
    ///
    /// Uses the substitution `X = S^{-1}(e^{-u})`, `u ~ Exp(1)`, which turns
    /// every family into a smooth integrand on `[0, inf)`.
    pub fn mgf_quadrature(&self, s: f64) -> Result<f64> {
        self.check_mgf_domain(s)?;
        let this = *self;
        numeric::integrate_exp_tail(
            move |u| s * this.inverse_survival_exp(u) - u,
            MGF_ABS_TOL,
            MGF_TAIL_TOL,
        )
        .ok_or(Error::MgfDomain {
            s,
            dist: self.to_string(),
        })
    }

    /// The value `x` with `P(X > x) = e^{-u}`.
    fn inverse_survival_exp(&self, u: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => u / rate,
            Self::ShiftedExponential { shift, rate } => shift + u / rate,
            Self::Weibull { shape, scale } => scale * u.powf(1.0 / shape),
            Self::Pareto { tail, x_min } => x_min * (u / tail).exp(),
        }
    }

    /// Sub-exponential parameters used by the analytic bounds.
    ///
    /// * exponential with rate `r`: `(1/r^2, 1/r)`;
    /// * shift plus exponential: the shift contributes `(1, 0)` and the
    ///   exponential part `(1/r^2, 1/r)`, summed;
    /// * Weibull with `m >= 1`: `tau = b = 6 * scale * sqrt(Gamma(2/m) / (2m))`.
    pub fn subexp_params(&self) -> Result<SubExpParams> {
        match *self {
            Self::Exponential { rate } => SubExpParams::new(1.0 / (rate * rate), 1.0 / rate),
            Self::ShiftedExponential { rate, .. } => {
                SubExpParams::new(1.0 + 1.0 / (rate * rate), 1.0 / rate)
            }
            Self::Weibull { shape, scale } if shape >= 1.0 => {
                let orlicz = (gamma(2.0 / shape) / (2.0 * shape)).sqrt();
                let tau = WEIBULL_SUBEXP_CONSTANT * orlicz * scale;
                SubExpParams::new(tau * tau, tau)
            }
            _ => Err(Error::NotSubExponential(self.to_string())),
        }
    }

    pub fn classify(&self, d: u32) -> Result<TailClass> {
        if d < 2 {
            return Err(invalid("d", format!("{d} must be >= 2")));
        }
        Ok(match *self {
            Self::Exponential { .. } | Self::ShiftedExponential { .. } => TailClass::ClassI,
            Self::Weibull { shape, .. } if shape >= 1.0 => TailClass::ClassI,
            Self::Pareto { tail, .. } if tail > d as f64 / (d as f64 - 1.0) => TailClass::ClassII,
            _ => TailClass::Unclassified,
        })
    }

    pub fn sampler(&self) -> Sampler {
        match *self {
            Self::Exponential { rate } => Sampler::Exp {
                shift: 0.0,
                exp: Exp::new(rate).expect("validated rate"),
            },
            Self::ShiftedExponential { shift, rate } => Sampler::Exp {
                shift,
                exp: Exp::new(rate).expect("validated rate"),
            },
            Self::Weibull { shape, scale } => {
                Sampler::Weibull(Weibull::new(scale, shape).expect("validated weibull"))
            }
            Self::Pareto { tail, x_min } => {
                Sampler::Pareto(Pareto::new(x_min, tail).expect("validated pareto"))
            }
        }
    }

    /// One draw. Prefer [`ServiceDistribution::sampler`] in hot loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

impl fmt::Display for ServiceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential { rate } => write!(f, "Exponential(rate={rate})"),
            Self::ShiftedExponential { shift, rate } => {
                write!(f, "ShiftedExponential(shift={shift}, rate={rate})")
            }
            Self::Weibull { shape, scale } => write!(f, "Weibull(shape={shape}, scale={scale})"),
            Self::Pareto { tail, x_min } => write!(f, "Pareto(tail={tail}, x_min={x_min})"),
        }
    }
}

/// Pre-built sampler for a [`ServiceDistribution`].
#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Exp { shift: f64, exp: Exp<f64> },
    Weibull(Weibull<f64>),
    Pareto(Pareto<f64>),
}

impl Distribution<f64> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Exp { shift, exp } => shift + exp.sample(rng),
            Sampler::Weibull(w) => w.sample(rng),
            Sampler::Pareto(p) => p.sample(rng),
        }
    }
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Exponential => Ok(()),
            Family::ShiftedExponential { shift } => {
                if (0.0..1.0).contains(&shift) {
                    Ok(())
                } else {
                    Err(invalid("shift", format!("{shift} must lie in [0, 1)")))
                }
            }
            Family::Weibull { shape } => positive("shape", shape),
            Family::Pareto { tail } => {
                if tail > 1.0 && tail.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("tail", format!("{tail} must be > 1 for a finite mean")))
                }
            }
        }
    }

    /// The family member with mean exactly `1/k`.
    pub fn chunk(&self, k: usize) -> Result<ServiceDistribution> {
        if k == 0 {
            return Err(invalid("k", "must be >= 1"));
        }
        self.validate()?;
        let k = k as f64;
        Ok(match *self {
            Family::Exponential => ServiceDistribution::Exponential { rate: k },
            Family::ShiftedExponential { shift } => ServiceDistribution::ShiftedExponential {
                shift: shift / k,
                rate: k / (1.0 - shift),
            },
            Family::Weibull { shape } => ServiceDistribution::Weibull {
                shape,
                scale: 1.0 / (k * gamma(1.0 + 1.0 / shape)),
            },
            Family::Pareto { tail } => ServiceDistribution::Pareto {
                tail,
                x_min: (tail - 1.0) / (tail * k),
            },
        })
    }

    /// Mean-one law used for whole-file service.
    pub fn unit(&self) -> Result<ServiceDistribution> {
        self.chunk(1)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::ShiftedExponential { .. } => "shifted-exponential",
            Family::Weibull { .. } => "weibull",
            Family::Pareto { .. } => "pareto",
        }
    }

    /// The family's free shape parameter (shift, Weibull shape, Pareto tail).
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Family::Exponential => None,
            Family::ShiftedExponential { shift } => Some(shift),
            Family::Weibull { shape } => Some(shape),
            Family::Pareto { tail } => Some(tail),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            None => f.write_str(self.name()),
            Some(p) => write!(f, "{}({p})", self.name()),
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).map(|i| f64::from(n - i) / f64::from(i + 1)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = ServiceDistribution::exponential(2.0).unwrap();
        let a = d.sample(&mut rng(7));
        let b = d.sample(&mut rng(7));
        assert_eq!(a, b);
        assert!(a >= 0.0);
    }

    #[test]
    fn support_lower_bounds() {
        let d = ServiceDistribution::shifted_exponential(0.1, 2.0).unwrap();
        let p = ServiceDistribution::pareto(2.5, 0.3).unwrap();
        let mut r = rng(1);
        for _ in 0..10_000 {
            assert!(d.sample(&mut r) >= 0.1);
            assert!(p.sample(&mut r) >= 0.3);
        }
    }

    #[test]
    fn closed_form_moments() {
        let e = ServiceDistribution::exponential(4.0).unwrap();
        assert_eq!(e.mean().unwrap(), 0.25);
        let e5 = ServiceDistribution::exponential(5.0).unwrap();
        assert!((e5.second_moment().unwrap() - 2.0 / 25.0).abs() < 1e-15);
        let s = ServiceDistribution::shifted_exponential(0.1, 2.0).unwrap();
        assert!((s.mean().unwrap() - 0.6).abs() < 1e-15);
        assert!((s.second_moment().unwrap() - (0.01 + 0.1 + 0.5)).abs() < 1e-15);
        let p = ServiceDistribution::pareto(3.0, 1.0).unwrap();
        assert!((p.mean().unwrap() - 1.5).abs() < 1e-15);
        assert!((p.second_moment().unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn pareto_infinite_moments() {
        let p = ServiceDistribution::pareto(1.5, 1.0).unwrap();
        assert!(p.mean().is_ok());
        assert!(matches!(
            p.second_moment(),
            Err(Error::InfiniteMoment { order: 2, .. })
        ));
        let p = ServiceDistribution::pareto(1.0, 1.0).unwrap();
        assert!(p.mean().is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ServiceDistribution::exponential(0.0).is_err());
        assert!(ServiceDistribution::exponential(f64::NAN).is_err());
        assert!(ServiceDistribution::shifted_exponential(-0.1, 1.0).is_err());
        assert!(ServiceDistribution::shifted_exponential(0.0, 1.0).is_ok());
        assert!(ServiceDistribution::weibull(1.0, -1.0).is_err());
        assert!(ServiceDistribution::pareto(0.0, 1.0).is_err());
    }

    #[test]
    fn mgf_exponential_values() {
        let e = ServiceDistribution::exponential(8.0).unwrap();
        assert_eq!(e.mgf(0.0).unwrap(), 1.0);
        assert_eq!(e.mgf(4.0).unwrap(), 2.0);
        assert!(matches!(e.mgf(8.0), Err(Error::MgfDomain { .. })));
        assert!(e.mgf(-3.0).unwrap() < 1.0);
    }

    #[test]
    fn mgf_domains() {
        let w = ServiceDistribution::weibull(0.7, 1.0).unwrap();
        assert!(w.mgf(0.1).is_err());
        assert_eq!(w.mgf(0.0).unwrap(), 1.0);
        let p = ServiceDistribution::pareto(3.0, 1.0).unwrap();
        assert!(p.mgf(0.01).is_err());
        let v = p.mgf(-1.0).unwrap();
        assert!(v > 0.0 && v < (-1.0f64).exp());
        let w1 = ServiceDistribution::weibull(1.0, 0.5).unwrap();
        assert!(w1.mgf(2.0).is_err());
        assert!(w1.mgf(1.9).is_ok());
    }

    #[test]
    fn mgf_quadrature_matches_closed_forms() {
        let cases = [
            (ServiceDistribution::exponential(8.0).unwrap(), vec![-5.0, 1.0, 4.0, 7.5]),
            (
                ServiceDistribution::shifted_exponential(0.05, 2.0 / 0.9).unwrap(),
                vec![-2.0, 0.5, 1.5, 2.0],
            ),
            (ServiceDistribution::weibull(1.0, 0.5).unwrap(), vec![-1.0, 0.5, 1.5]),
        ];
        for (d, grid) in cases {
            for s in grid {
                let closed = d.mgf(s).unwrap();
                let quad = d.mgf_quadrature(s).unwrap();
                assert!(
                    ((quad - closed) / closed).abs() < 1e-6,
                    "{d} s={s}: {quad} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn weibull_shape_two_mgf_against_erf_form() {
        // For shape 2, scale beta: E e^{sX} = 1 + (s beta) sqrt(pi)/2 e^{a^2} (1 + erf(a)), a = s beta / 2.
        let beta = 0.5;
        let s = 1.0;
        let a = s * beta / 2.0;
        let closed = 1.0
            + s * beta * std::f64::consts::PI.sqrt() / 2.0
                * (a * a).exp()
                * (1.0 + statrs::function::erf::erf(a));
        let w = ServiceDistribution::weibull(2.0, beta).unwrap();
        assert!((w.mgf(s).unwrap() - closed).abs() < 1e-6);
    }

    #[test]
    fn chunk_distributions() {
        assert_eq!(
            Family::Exponential.chunk(3).unwrap(),
            ServiceDistribution::Exponential { rate: 3.0 }
        );
        let s = Family::ShiftedExponential { shift: 0.1 }.chunk(2).unwrap();
        match s {
            ServiceDistribution::ShiftedExponential { shift, rate } => {
                assert!((shift - 0.05).abs() < 1e-15);
                assert!((rate - 2.0 / 0.9).abs() < 1e-12);
            }
            other => panic!("unexpected {other}"),
        }
        assert!((s.mean().unwrap() - 0.5).abs() < 1e-12);
        let w = Family::Weibull { shape: 2.0 }.chunk(2).unwrap();
        match w {
            ServiceDistribution::Weibull { scale, .. } => assert!((scale - 0.564_189_58).abs() < 1e-7),
            other => panic!("unexpected {other}"),
        }
        assert!((w.mean().unwrap() - 0.5).abs() < 1e-12);
        assert!(Family::ShiftedExponential { shift: 1.0 }.chunk(2).is_err());
        assert!(Family::Exponential.chunk(0).is_err());
        let p = Family::Pareto { tail: 3.0 }.chunk(4).unwrap();
        assert!((p.mean().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn weibull_shape_one_is_exponential() {
        let w = Family::Weibull { shape: 1.0 }.chunk(4).unwrap();
        match w {
            ServiceDistribution::Weibull { scale, .. } => assert!((scale - 0.25).abs() < 1e-12),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn subexp_parameters() {
        let p = ServiceDistribution::exponential(5.0).unwrap().subexp_params().unwrap();
        assert!((p.tau_sq - 0.04).abs() < 1e-15 && (p.b - 0.2).abs() < 1e-15);

        let s = Family::ShiftedExponential { shift: 0.1 }.chunk(2).unwrap();
        let p = s.subexp_params().unwrap();
        assert!((p.tau_sq - 1.2025).abs() < 1e-12 && (p.b - 0.45).abs() < 1e-12);

        let w = ServiceDistribution::weibull(1.0, 1.0).unwrap();
        let p = w.subexp_params().unwrap();
        assert!((p.b - 6.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((p.tau() - p.b).abs() < 1e-12);

        // Linear in the scale.
        let p2 = ServiceDistribution::weibull(1.0, 0.5).unwrap().subexp_params().unwrap();
        assert!((p2.b - 0.5 * p.b).abs() < 1e-12);

        assert!(ServiceDistribution::pareto(3.0, 1.0).unwrap().subexp_params().is_err());
        assert!(ServiceDistribution::weibull(0.5, 1.0).unwrap().subexp_params().is_err());
    }

    #[test]
    fn classification() {
        let e = ServiceDistribution::exponential(1.0).unwrap();
        assert_eq!(e.classify(2).unwrap(), TailClass::ClassI);
        let p = ServiceDistribution::pareto(3.0, 1.0).unwrap();
        assert_eq!(p.classify(2).unwrap(), TailClass::ClassII);
        let p = ServiceDistribution::pareto(1.5, 1.0).unwrap();
        assert_eq!(p.classify(2).unwrap(), TailClass::Unclassified);
        // threshold for d = 3 is 1.5
        let p = ServiceDistribution::pareto(1.6, 1.0).unwrap();
        assert_eq!(p.classify(3).unwrap(), TailClass::ClassII);
        let w = ServiceDistribution::weibull(0.5, 1.0).unwrap();
        assert_eq!(w.classify(2).unwrap(), TailClass::Unclassified);
        assert!(e.classify(1).is_err());
    }
}
