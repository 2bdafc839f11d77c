//! C ABI over the `eclat` core: service distributions, bounds and the
//! cluster simulator.
//!
//! Every fallible function returns an [`EclatStatus`] and writes its result
//! through an out-pointer. Objects are opaque handles created by
//! `eclat_*_new*` and released by the matching `eclat_*_free`. After a
//! non-`OK` status, [`eclat_last_error`] describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eclat::bounds::{self, BoundIVariant, BoundReport, MonteCarlo};
use eclat::dist::{Family, ServiceDistribution};
use eclat::sim::{self, ClusterConfig, LatencyStats, Policy};
use eclat::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EclatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InfiniteMoment = 3,
    MgfDomain = 4,
    NotSubExponential = 5,
    Precondition = 6,
    ModelInconsistency = 7,
    ZeroMass = 8,
    RankOutOfRange = 9,
    Unstable = 10,
    PolicyMismatch = 11,
    InvalidUtf8 = 12,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EclatFamilyKind {
    Exponential = 0,
    ShiftedExponential = 1,
    Weibull = 2,
    Pareto = 3,
}

/// A service family of mean-one whole files; `param` is the shift, Weibull
/// shape or Pareto tail index (ignored for the exponential).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EclatFamily {
    pub kind: EclatFamilyKind,
    pub param: f64,
}

impl EclatFamily {
    fn to_core(self) -> Family {
        match self.kind {
            EclatFamilyKind::Exponential => Family::Exponential,
            EclatFamilyKind::ShiftedExponential => Family::ShiftedExponential { shift: self.param },
            EclatFamilyKind::Weibull => Family::Weibull { shape: self.param },
            EclatFamilyKind::Pareto => Family::Pareto { tail: self.param },
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EclatPolicyKind {
    /// `a` = d.
    NaiveReplication = 0,
    /// `a` = k, `b` = d.
    KSplit = 1,
    /// `a` = n, `b` = k.
    LeastKOfN = 2,
    /// `a` = n, `b` = k.
    BatchSampling = 3,
    /// `a` = k, `b` = delta.
    RedundantRequest = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EclatPolicy {
    pub kind: EclatPolicyKind,
    pub a: usize,
    pub b: usize,
}

impl EclatPolicy {
    fn to_core(self) -> Policy {
        match self.kind {
            EclatPolicyKind::NaiveReplication => Policy::NaiveReplication { d: self.a },
            EclatPolicyKind::KSplit => Policy::KSplit { k: self.a, d: self.b },
            EclatPolicyKind::LeastKOfN => Policy::LeastKOfN { n: self.a, k: self.b },
            EclatPolicyKind::BatchSampling => Policy::BatchSampling { n: self.a, k: self.b },
            EclatPolicyKind::RedundantRequest => Policy::RedundantRequest { k: self.a, delta: self.b },
        }
    }
}

/// Opaque service distribution.
pub struct EclatDistribution(ServiceDistribution);
/// Opaque bound evaluation.
pub struct EclatBoundReport(BoundReport);
/// Opaque simulation configuration.
pub struct EclatSimConfig(ClusterConfig);
/// Opaque simulation result.
pub struct EclatLatencyStats(LatencyStats);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EclatStatus {
    match e {
        Error::InvalidParameter { .. } => EclatStatus::InvalidParameter,
        Error::InfiniteMoment { .. } => EclatStatus::InfiniteMoment,
        Error::MgfDomain { .. } => EclatStatus::MgfDomain,
        Error::NotSubExponential(_) => EclatStatus::NotSubExponential,
        Error::Precondition(_) => EclatStatus::Precondition,
        Error::ModelInconsistency(_) => EclatStatus::ModelInconsistency,
        Error::ZeroMass(_) => EclatStatus::ZeroMass,
        Error::RankOutOfRange { .. } => EclatStatus::RankOutOfRange,
        Error::Unstable(_) => EclatStatus::Unstable,
        Error::PolicyMismatch { .. } => EclatStatus::PolicyMismatch,
    }
}

enum Fail {
    Core(Error),
    Null,
    Utf8,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EclatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EclatStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            EclatStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            EclatStatus::InvalidUtf8
        }
        Err(_) => {
            set_error("internal panic");
            EclatStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(value);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn get_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

unsafe fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    write(out, Box::into_raw(Box::new(value)))
}

/// Message of the last failure on this thread; empty after success. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn eclat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eclat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_new_exponential(rate: f64, out: *mut *mut EclatDistribution) -> EclatStatus {
    guard(|| boxed(out, EclatDistribution(ServiceDistribution::exponential(rate)?)))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_new_shifted_exponential(
    shift: f64,
    rate: f64,
    out: *mut *mut EclatDistribution,
) -> EclatStatus {
    guard(|| boxed(out, EclatDistribution(ServiceDistribution::shifted_exponential(shift, rate)?)))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_new_weibull(shape: f64, scale: f64, out: *mut *mut EclatDistribution) -> EclatStatus {
    guard(|| boxed(out, EclatDistribution(ServiceDistribution::weibull(shape, scale)?)))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_new_pareto(tail: f64, x_min: f64, out: *mut *mut EclatDistribution) -> EclatStatus {
    guard(|| boxed(out, EclatDistribution(ServiceDistribution::pareto(tail, x_min)?)))
}

/// Mean-`1/k` member of `family`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_new_chunk(family: EclatFamily, k: usize, out: *mut *mut EclatDistribution) -> EclatStatus {
    guard(|| boxed(out, EclatDistribution(family.to_core().chunk(k)?)))
}

/// # Safety
/// `dist` must come from an `eclat_dist_new_*` call and not be freed yet, or be null.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_free(dist: *mut EclatDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// # Safety
/// `dist` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_mean(dist: *const EclatDistribution, out: *mut f64) -> EclatStatus {
    guard(|| write(out, get(dist)?.0.mean()?))
}

/// `E[X^order]`.
///
/// # Safety
/// `dist` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_moment(dist: *const EclatDistribution, order: u32, out: *mut f64) -> EclatStatus {
    guard(|| write(out, get(dist)?.0.raw_moment(order)?))
}

/// `E[exp(s X)]`.
///
/// # Safety
/// `dist` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_mgf(dist: *const EclatDistribution, s: f64, out: *mut f64) -> EclatStatus {
    guard(|| write(out, get(dist)?.0.mgf(s)?))
}

/// Sub-exponential parameters `(tau^2, b)`.
///
/// # Safety
/// `dist` must be a live handle; `tau_sq` and `b` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_dist_subexp_params(
    dist: *const EclatDistribution,
    tau_sq: *mut f64,
    b: *mut f64,
) -> EclatStatus {
    guard(|| {
        let p = get(dist)?.0.subexp_params()?;
        write(tau_sq, p.tau_sq)?;
        write(b, p.b)
    })
}

/// Mean-latency bound for the k-split policy with chunks from `family`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_bound_mean(
    family: EclatFamily,
    k: usize,
    lambda: f64,
    out: *mut *mut EclatBoundReport,
) -> EclatStatus {
    guard(|| {
        let r = bounds::coded_latency_bound(&family.to_core(), k, lambda, MonteCarlo::default())?;
        boxed(out, EclatBoundReport(r))
    })
}

/// Batch-sampling Bound I (`tight != 0` for the tight variant).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_bound_i(
    lambda: f64,
    d: f64,
    k: usize,
    tight: i32,
    out: *mut *mut EclatBoundReport,
) -> EclatStatus {
    let variant = if tight != 0 { BoundIVariant::Tight } else { BoundIVariant::Loose };
    guard(|| boxed(out, EclatBoundReport(bounds::bound_i(lambda, d, k, variant, None)?)))
}

/// Batch-sampling Bound II.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_bound_ii(lambda: f64, d: f64, k: usize, out: *mut *mut EclatBoundReport) -> EclatStatus {
    guard(|| boxed(out, EclatBoundReport(bounds::bound_ii(lambda, d, k)?)))
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn eclat_report_free(report: *mut EclatBoundReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_report_value(report: *const EclatBoundReport, out: *mut f64) -> EclatStatus {
    guard(|| write(out, get(report)?.0.value))
}

/// Branch label as a static string, or null for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn eclat_report_branch(report: *const EclatBoundReport) -> *const c_char {
    let Some(r) = report.as_ref() else {
        return ptr::null();
    };
    let label: &'static CStr = match r.0.branch {
        bounds::Branch::Phi1 => c"Phi1",
        bounds::Branch::Phi2 => c"Phi2",
        bounds::Branch::Phi3 => c"Phi3",
        bounds::Branch::Phi4 => c"Phi4",
        bounds::Branch::BoundITight => c"BoundI-tight",
        bounds::Branch::BoundILoose => c"BoundI-loose",
        bounds::Branch::BoundII => c"BoundII",
        bounds::Branch::ZeroLoad => c"ZeroLoad",
    };
    label.as_ptr()
}

/// Intermediate quantity `key` (for example `"r"` or `"M(k)"`);
/// `INVALID_PARAMETER` if absent.
///
/// # Safety
/// `report` must be a live handle, `key` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_report_aux(
    report: *const EclatBoundReport,
    key: *const c_char,
    out: *mut f64,
) -> EclatStatus {
    guard(|| {
        let r = get(report)?;
        if key.is_null() {
            return Err(Fail::Null);
        }
        let key = CStr::from_ptr(key).to_str().map_err(|_| Fail::Utf8)?;
        let v = r.0.aux(key).ok_or_else(|| {
            Fail::Core(Error::InvalidParameter {
                name: "key",
                reason: format!("no intermediate named `{key}`"),
            })
        })?;
        write(out, v)
    })
}

/// Tail bound `P(W > t)` for exponential chunks.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_tail_latency_bound(k: usize, lambda: f64, epsilon: f64, t: f64, out: *mut f64) -> EclatStatus {
    guard(|| write(out, bounds::tail_latency_bound(k, lambda, epsilon, t)?))
}

/// `(H(k + delta) - H(delta)) / k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_redundant_request_latency(k: usize, delta: usize, out: *mut f64) -> EclatStatus {
    guard(|| write(out, bounds::redundant_request_latency(k, delta)?))
}

/// Zero-load gain of splitting into `k` chunks; Monte Carlo with `seed`
/// where no closed form exists.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_zero_load_gain(family: EclatFamily, k: usize, seed: u64, out: *mut f64) -> EclatStatus {
    guard(|| {
        let mc = MonteCarlo { seed, ..MonteCarlo::default() };
        write(out, bounds::zero_load_gain(&family.to_core(), k, mc)?.value)
    })
}

/// Bound on `M(k)` for a service law of mean `1/k`.
///
/// # Safety
/// `dist` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_m_k_bound(dist: *const EclatDistribution, k: usize, out: *mut f64) -> EclatStatus {
    guard(|| write(out, bounds::m_k_bound(&get(dist)?.0, k)?.value))
}

/// Simulation config with default cluster size and run lengths.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_sim_config_new(
    policy: EclatPolicy,
    lambda: f64,
    family: EclatFamily,
    seed: u64,
    out: *mut *mut EclatSimConfig,
) -> EclatStatus {
    guard(|| {
        let family = family.to_core();
        family.validate()?;
        let policy = policy.to_core();
        policy.validate()?;
        boxed(out, EclatSimConfig(ClusterConfig::new(policy, lambda, family, seed)))
    })
}

/// Sets the cluster size; the warmup resets to its per-server default.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eclat_sim_config_set_servers(config: *mut EclatSimConfig, servers: usize) -> EclatStatus {
    guard(|| {
        let c = &mut get_mut(config)?.0;
        c.servers = servers;
        c.warmup_jobs = sim::WARMUP_PER_SERVER * servers;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eclat_sim_config_set_jobs(
    config: *mut EclatSimConfig,
    warmup_jobs: usize,
    measured_jobs: usize,
) -> EclatStatus {
    guard(|| {
        let c = &mut get_mut(config)?.0;
        c.warmup_jobs = warmup_jobs;
        c.measured_jobs = measured_jobs;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn eclat_sim_config_free(config: *mut EclatSimConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the simulation.
///
/// # Safety
/// `config` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_sim_run(config: *const EclatSimConfig, out: *mut *mut EclatLatencyStats) -> EclatStatus {
    guard(|| {
        let stats = sim::run(&get(config)?.0)?;
        boxed(out, EclatLatencyStats(stats))
    })
}

/// # Safety
/// `stats` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn eclat_stats_free(stats: *mut EclatLatencyStats) {
    if !stats.is_null() {
        drop(Box::from_raw(stats));
    }
}

/// Mean latency and its standard error.
///
/// # Safety
/// `stats` must be a live handle; `mean` and `std_err` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_stats_mean(
    stats: *const EclatLatencyStats,
    mean: *mut f64,
    std_err: *mut f64,
) -> EclatStatus {
    guard(|| {
        let s = &get(stats)?.0;
        write(mean, s.mean)?;
        write(std_err, s.std_err)
    })
}

/// # Safety
/// `stats` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_stats_job_count(stats: *const EclatLatencyStats, out: *mut usize) -> EclatStatus {
    guard(|| write(out, get(stats)?.0.job_count))
}

/// Latency quantile at `p` in {0.5, 0.9, 0.99}.
///
/// # Safety
/// `stats` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_stats_quantile(stats: *const EclatLatencyStats, p: f64, out: *mut f64) -> EclatStatus {
    guard(|| {
        let q = get(stats)?.0.quantile(p).ok_or_else(|| {
            Fail::Core(Error::InvalidParameter {
                name: "p",
                reason: format!("{p} is not a reported quantile level"),
            })
        })?;
        write(out, q)
    })
}

/// Empirical `P(Q >= r)` at arrival epochs.
///
/// # Safety
/// `stats` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eclat_stats_queue_tail(stats: *const EclatLatencyStats, r: usize, out: *mut f64) -> EclatStatus {
    guard(|| write(out, get(stats)?.0.queue_tail(r)))
}
