//! Discrete-event simulation of `L` FCFS servers fed by Poisson job arrivals
//! under the dispatch policies of the latency model.
//!
//! A run is single-threaded and fully determined by its [`ClusterConfig`]:
//! one ChaCha stream drives arrivals, server selection and service times, and
//! simultaneous events are ordered by a global sequence number.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::dist::{Family, Sampler, ServiceDistribution};
use crate::error::{invalid, Error, Result};

/// Minimum cluster size used by [`ClusterConfig::default_servers`].
pub const MIN_SERVERS: usize = 2000;
/// Servers per split factor in [`ClusterConfig::default_servers`].
pub const SERVERS_PER_SPLIT: usize = 200;
/// Warmup jobs per server.
pub const WARMUP_PER_SERVER: usize = 20;
/// Default measured budget, counted in tasks.
pub const MEASURED_TASKS: usize = 1_000_000;
/// Number of contiguous batches behind the batch-means standard error.
pub const STD_ERR_BATCHES: usize = 32;
/// Points on the latency CCDF grid of [`LatencyStats`].
pub const CCDF_POINTS: usize = 64;
/// Quantile levels reported in [`LatencyStats::quantiles`].
pub const QUANTILE_LEVELS: [f64; 3] = [0.5, 0.9, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Whole-file request to the shortest of `d` random queues.
    NaiveReplication { d: usize },
    /// `k` disjoint random batches of `d` servers; one chunk to the shortest
    /// queue of each batch.
    KSplit { k: usize, d: usize },
    /// Chunks to the `k` least-loaded of `n = d k` random servers.
    LeastKOfN { n: usize, k: usize },
    /// Tasks to the `k` least-loaded of `n` probed servers, `1 < n/k < 2`,
    /// with batch arrivals at rate `L lambda / k`.
    BatchSampling { n: usize, k: usize },
    /// Tasks to `k + delta` random servers; done at the `k`-th completion and
    /// the rest are purged.
    RedundantRequest { k: usize, delta: usize },
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Policy::NaiveReplication { d } => {
                if d < 2 {
                    return Err(invalid("d", format!("{d} must be >= 2")));
                }
            }
            Policy::KSplit { k, d } => {
                if k < 1 {
                    return Err(invalid("k", "must be >= 1"));
                }
                if d < 2 {
                    return Err(invalid("d", format!("{d} must be >= 2")));
                }
            }
            Policy::LeastKOfN { n, k } => {
                if k < 1 || n < k {
                    return Err(invalid("n", format!("need 1 <= k <= n, got n={n}, k={k}")));
                }
            }
            Policy::BatchSampling { n, k } => {
                if !(k >= 1 && n > k && n < 2 * k) {
                    return Err(invalid("n", format!("need 1 < n/k < 2, got n={n}, k={k}")));
                }
            }
            Policy::RedundantRequest { k, .. } => {
                if k < 1 {
                    return Err(invalid("k", "must be >= 1"));
                }
            }
        }
        Ok(())
    }

    /// Distinct servers touched by one request.
    pub fn servers_needed(&self) -> usize {
        match *self {
            Policy::NaiveReplication { d } => d,
            Policy::KSplit { k, d } => k * d,
            Policy::LeastKOfN { n, .. } | Policy::BatchSampling { n, .. } => n,
            Policy::RedundantRequest { k, delta } => k + delta,
        }
    }

    /// Tasks enqueued per job.
    pub fn tasks_per_job(&self) -> usize {
        match *self {
            Policy::NaiveReplication { .. } => 1,
            Policy::KSplit { k, .. }
            | Policy::LeastKOfN { k, .. }
            | Policy::BatchSampling { k, .. } => k,
            Policy::RedundantRequest { k, delta } => k + delta,
        }
    }

    /// Task completions that finish a job.
    pub fn required_tasks(&self) -> usize {
        match *self {
            Policy::NaiveReplication { .. } => 1,
            Policy::KSplit { k, .. }
            | Policy::LeastKOfN { k, .. }
            | Policy::BatchSampling { k, .. }
            | Policy::RedundantRequest { k, .. } => k,
        }
    }

    /// Split factor of the default task law: tasks have mean `1 / split`.
    pub fn split(&self) -> usize {
        match *self {
            Policy::NaiveReplication { .. } | Policy::BatchSampling { .. } => 1,
            Policy::KSplit { k, .. }
            | Policy::LeastKOfN { k, .. }
            | Policy::RedundantRequest { k, .. } => k,
        }
    }

    /// Job arrival rate for `servers` servers at intensity `lambda`.
    pub fn arrival_rate(&self, servers: usize, lambda: f64) -> f64 {
        let base = servers as f64 * lambda;
        match *self {
            Policy::BatchSampling { k, .. } => base / k as f64,
            _ => base,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::NaiveReplication { .. } => "naive",
            Policy::KSplit { .. } => "ksplit",
            Policy::LeastKOfN { .. } => "least-k-of-n",
            Policy::BatchSampling { .. } => "batch-sampling",
            Policy::RedundantRequest { .. } => "redundant",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Policy::NaiveReplication { d } => write!(f, "naive(d={d})"),
            Policy::KSplit { k, d } => write!(f, "ksplit(k={k},d={d})"),
            Policy::LeastKOfN { n, k } => write!(f, "least-k-of-n(n={n},k={k})"),
            Policy::BatchSampling { n, k } => write!(f, "batch-sampling(n={n},k={k})"),
            Policy::RedundantRequest { k, delta } => write!(f, "redundant(k={k},delta={delta})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub servers: usize,
    pub lambda: f64,
    pub policy: Policy,
    /// Service family; tasks follow its mean `1 / policy.split()` member.
    pub family: Family,
    /// Explicit task law overriding the family convention.
    pub task_service: Option<ServiceDistribution>,
    pub seed: u64,
    pub warmup_jobs: usize,
    pub measured_jobs: usize,
}

impl ClusterConfig {
    /// Config with default cluster size and run lengths.
    pub fn new(policy: Policy, lambda: f64, family: Family, seed: u64) -> Self {
        let servers = Self::default_servers(&policy);
        Self {
            servers,
            lambda,
            policy,
            family,
            task_service: None,
            seed,
            warmup_jobs: WARMUP_PER_SERVER * servers,
            measured_jobs: Self::default_measured_jobs(&policy),
        }
    }

    /// `max(2000, 200 k)`.
    pub fn default_servers(policy: &Policy) -> usize {
        MIN_SERVERS.max(SERVERS_PER_SPLIT * policy.required_tasks())
    }

    pub fn default_measured_jobs(policy: &Policy) -> usize {
        (MEASURED_TASKS / policy.tasks_per_job()).max(1)
    }

    pub fn with_servers(mut self, servers: usize) -> Self {
        self.servers = servers;
        self
    }

    pub fn with_jobs(mut self, warmup_jobs: usize, measured_jobs: usize) -> Self {
        self.warmup_jobs = warmup_jobs;
        self.measured_jobs = measured_jobs;
        self
    }

    pub fn with_task_service(mut self, dist: ServiceDistribution) -> Self {
        self.task_service = Some(dist);
        self
    }

    /// Law of a single task's service time.
    pub fn task_law(&self) -> Result<ServiceDistribution> {
        match self.task_service {
            Some(d) => {
                d.validate()?;
                Ok(d)
            }
            None => self.family.chunk(self.policy.split()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(invalid("lambda", format!("{} must be positive", self.lambda)));
        }
        if self.lambda >= 1.0 {
            return Err(Error::Unstable(self.lambda));
        }
        let needed = self.policy.servers_needed();
        if self.servers < needed {
            return Err(Error::PolicyMismatch {
                needed,
                available: self.servers,
            });
        }
        if self.measured_jobs < 1 {
            return Err(invalid("measured_jobs", "must be >= 1"));
        }
        self.task_law()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyStats {
    pub mean: f64,
    /// Batch-means standard error of `mean`.
    pub std_err: f64,
    /// `(p, latency quantile)` for each of [`QUANTILE_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
    /// `(t, P(W > t))` on an even grid from 0 to the largest latency.
    pub ccdf: Vec<(f64, f64)>,
    /// `(r, P(Q >= r))` for the queue length seen at measured arrivals.
    pub queue_ccdf: Vec<(usize, f64)>,
    pub job_count: usize,
    pub min: f64,
    pub max: f64,
}

impl LatencyStats {
    pub fn quantile(&self, p: f64) -> Option<f64> {
        self.quantiles
            .iter()
            .find(|(q, _)| (q - p).abs() < 1e-12)
            .map(|&(_, v)| v)
    }

    /// `P(Q >= r)`, zero beyond the largest observed queue.
    pub fn queue_tail(&self, r: usize) -> f64 {
        self.queue_ccdf
            .iter()
            .find(|(i, _)| *i == r)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn from_latencies(latencies: &[f64], queue_hist: &[u64]) -> Self {
        let n = latencies.len();
        let mean = latencies.iter().sum::<f64>() / n as f64;
        let mut sorted = latencies.to_vec();
        sorted.sort_by(f64::total_cmp);
        let min = sorted.first().copied().unwrap_or(f64::NAN);
        let max = sorted.last().copied().unwrap_or(f64::NAN);
        let quantiles = QUANTILE_LEVELS
            .iter()
            .map(|&p| (p, nearest_rank(&sorted, p)))
            .collect();
        let ccdf = (0..=CCDF_POINTS)
            .map(|i| {
                let t = max * i as f64 / CCDF_POINTS as f64;
                (t, empirical_ccdf(&sorted, t))
            })
            .collect();
        let total: u64 = queue_hist.iter().sum();
        let mut tail = total;
        let queue_ccdf = queue_hist
            .iter()
            .enumerate()
            .map(|(r, &c)| {
                let p = tail as f64 / total.max(1) as f64;
                tail -= c;
                (r, p)
            })
            .collect();
        Self {
            mean,
            std_err: batch_means_std_err(latencies),
            quantiles,
            ccdf,
            queue_ccdf,
            job_count: n,
            min,
            max,
        }
    }
}

fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// `P(W > t)` from sorted latencies.
pub fn empirical_ccdf(sorted: &[f64], t: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let at_most = sorted.partition_point(|&x| x <= t);
    (sorted.len() - at_most) as f64 / sorted.len() as f64
}

/// Standard error of the mean of a correlated series from
/// [`STD_ERR_BATCHES`] contiguous batch means; i.i.d. formula for short series.
pub fn batch_means_std_err(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 2 {
        return 0.0;
    }
    let sample_se = |xs: &[f64]| {
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    };
    if n < 4 * STD_ERR_BATCHES {
        return sample_se(series);
    }
    let size = n / STD_ERR_BATCHES;
    let means: Vec<f64> = series
        .chunks_exact(size)
        .take(STD_ERR_BATCHES)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    sample_se(&means)
}

/// Event bookkeeping of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimCounters {
    pub arrivals: u64,
    pub completed: u64,
    pub in_flight: u64,
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub stats: LatencyStats,
    /// Latencies of the measured jobs in arrival order.
    pub latencies: Vec<f64>,
    pub counters: SimCounters,
}

impl SimOutput {
    pub fn sorted_latencies(&self) -> Vec<f64> {
        let mut v = self.latencies.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Runs the simulation and returns its latency statistics.
pub fn run(config: &ClusterConfig) -> Result<LatencyStats> {
    Ok(run_detailed(config)?.stats)
}

/// Runs the simulation and keeps the raw latencies and counters.
pub fn run_detailed(config: &ClusterConfig) -> Result<SimOutput> {
    config.validate()?;
    Engine::new(config)?.run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    Arrival,
    Departure { server: u32, epoch: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Reversed so that BinaryHeap pops the earliest event.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TaskState {
    Queued,
    InService,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    job: u32,
    server: u32,
    state: TaskState,
    service: f64,
}

#[derive(Debug, Clone)]
struct Job {
    arrival: f64,
    remaining: u32,
    /// Index into the measured latency vector, if measured.
    slot: Option<usize>,
    tasks: Vec<u32>,
    longest_service: f64,
}

#[derive(Debug, Default)]
struct Server {
    queue: VecDeque<u32>,
    epoch: u64,
}

struct Slab<T> {
    items: Vec<Option<T>>,
    free: Vec<u32>,
}

impl<T> Slab<T> {
    fn new() -> Self {
        Self {
            items: Vec::new(),
            free: Vec::new(),
        }
    }

    fn insert(&mut self, value: T) -> u32 {
        match self.free.pop() {
            Some(i) => {
                self.items[i as usize] = Some(value);
                i
            }
            None => {
                self.items.push(Some(value));
                (self.items.len() - 1) as u32
            }
        }
    }

    fn get(&self, i: u32) -> &T {
        self.items[i as usize].as_ref().expect("live slab entry")
    }

    fn get_mut(&mut self, i: u32) -> &mut T {
        self.items[i as usize].as_mut().expect("live slab entry")
    }

    fn remove(&mut self, i: u32) -> T {
        let v = self.items[i as usize].take().expect("live slab entry");
        self.free.push(i);
        v
    }
}

struct Engine {
    policy: Policy,
    rng: ChaCha8Rng,
    interarrival: Exp<f64>,
    service: Sampler,
    servers: Vec<Server>,
    tasks: Slab<Task>,
    jobs: Slab<Job>,
    heap: BinaryHeap<Event>,
    seq: u64,
    now: f64,
    warmup: usize,
    measured: usize,
    latencies: Vec<f64>,
    queue_hist: Vec<u64>,
    counters: SimCounters,
    measured_done: usize,
    candidates: Vec<u32>,
    chosen: Vec<u32>,
}

impl Engine {
    fn new(config: &ClusterConfig) -> Result<Self> {
        let rate = config.policy.arrival_rate(config.servers, config.lambda);
        let interarrival = Exp::new(rate).map_err(|e| invalid("lambda", e.to_string()))?;
        Ok(Self {
            policy: config.policy,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            interarrival,
            service: config.task_law()?.sampler(),
            servers: (0..config.servers).map(|_| Server::default()).collect(),
            tasks: Slab::new(),
            jobs: Slab::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            warmup: config.warmup_jobs,
            measured: config.measured_jobs,
            latencies: vec![f64::NAN; config.measured_jobs],
            queue_hist: Vec::new(),
            counters: SimCounters::default(),
            measured_done: 0,
            candidates: Vec::with_capacity(config.policy.servers_needed()),
            chosen: Vec::with_capacity(config.policy.tasks_per_job()),
        })
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.heap.push(Event {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn run(mut self) -> Result<SimOutput> {
        let total = self.warmup + self.measured;
        let first = self.interarrival.sample(&mut self.rng);
        self.schedule(first, EventKind::Arrival);
        while self.measured_done < self.measured {
            let Some(ev) = self.heap.pop() else {
                return Err(Error::ModelInconsistency("event list drained early".into()));
            };
            self.now = ev.time;
            self.counters.events += 1;
            match ev.kind {
                EventKind::Arrival => {
                    let index = self.counters.arrivals as usize;
                    self.arrive(index);
                    if index + 1 < total {
                        let next = self.now + self.interarrival.sample(&mut self.rng);
                        self.schedule(next, EventKind::Arrival);
                    }
                }
                EventKind::Departure { server, epoch } => {
                    if self.servers[server as usize].epoch == epoch {
                        self.depart(server);
                    }
                }
            }
        }
        self.counters.in_flight = self.counters.arrivals - self.counters.completed;
        let stats = LatencyStats::from_latencies(&self.latencies, &self.queue_hist);
        Ok(SimOutput {
            stats,
            latencies: self.latencies,
            counters: self.counters,
        })
    }

    /// Fills `candidates` with `m` distinct uniformly random servers in
    /// random order.
    fn draw_candidates(&mut self, m: usize) {
        self.candidates.clear();
        let l = self.servers.len() as u32;
        while self.candidates.len() < m {
            let s = self.rng.random_range(0..l);
            if !self.candidates.contains(&s) {
                self.candidates.push(s);
            }
        }
    }

    fn queue_len(&self, s: u32) -> usize {
        self.servers[s as usize].queue.len()
    }

    fn shortest(&self, group: &[u32]) -> u32 {
        let mut best = group[0];
        for &s in &group[1..] {
            if self.queue_len(s) < self.queue_len(best) {
                best = s;
            }
        }
        best
    }

    fn select(&mut self) {
        self.draw_candidates(self.policy.servers_needed());
        let mut chosen = std::mem::take(&mut self.chosen);
        chosen.clear();
        match self.policy {
            Policy::NaiveReplication { .. } => chosen.push(self.shortest(&self.candidates)),
            Policy::KSplit { d, .. } => {
                for group in self.candidates.chunks_exact(d) {
                    chosen.push(self.shortest(group));
                }
            }
            Policy::LeastKOfN { k, .. } | Policy::BatchSampling { k, .. } => {
                let mut order = self.candidates.clone();
                // Stable: ties keep their random draw order.
                order.sort_by_key(|&s| self.queue_len(s));
                chosen.extend_from_slice(&order[..k]);
            }
            Policy::RedundantRequest { .. } => chosen.extend_from_slice(&self.candidates),
        }
        self.chosen = chosen;
    }

    fn arrive(&mut self, index: usize) {
        self.counters.arrivals += 1;
        self.select();
        let slot = (index >= self.warmup && index < self.warmup + self.measured)
            .then(|| index - self.warmup);
        if slot.is_some() {
            let q = self.queue_len(self.candidates[0]);
            if self.queue_hist.len() <= q {
                self.queue_hist.resize(q + 1, 0);
            }
            self.queue_hist[q] += 1;
        }
        let job = self.jobs.insert(Job {
            arrival: self.now,
            remaining: self.policy.required_tasks() as u32,
            slot,
            tasks: Vec::with_capacity(self.chosen.len()),
            longest_service: 0.0,
        });
        let chosen = std::mem::take(&mut self.chosen);
        for &s in &chosen {
            let task = self.tasks.insert(Task {
                job,
                server: s,
                state: TaskState::Queued,
                service: 0.0,
            });
            self.jobs.get_mut(job).tasks.push(task);
            self.servers[s as usize].queue.push_back(task);
            if self.servers[s as usize].queue.len() == 1 {
                self.start_service(s);
            }
            debug_assert!(self.work_conserving(s));
        }
        self.chosen = chosen;
    }

    /// A server is idle exactly when its queue is empty.
    fn work_conserving(&self, s: u32) -> bool {
        self.servers[s as usize]
            .queue
            .front()
            .is_none_or(|&t| self.tasks.get(t).state == TaskState::InService)
    }

    fn start_service(&mut self, s: u32) {
        let Some(&task) = self.servers[s as usize].queue.front() else {
            return;
        };
        let service = self.service.sample(&mut self.rng);
        let t = self.tasks.get_mut(task);
        t.state = TaskState::InService;
        t.service = service;
        let server = &mut self.servers[s as usize];
        server.epoch += 1;
        let epoch = server.epoch;
        self.schedule(self.now + service, EventKind::Departure { server: s, epoch });
    }

    fn depart(&mut self, s: u32) {
        let task_id = self.servers[s as usize]
            .queue
            .pop_front()
            .expect("departure from a busy server");
        let task = self.tasks.remove(task_id);
        debug_assert_eq!(task.state, TaskState::InService);
        let job_id = task.job;
        let job = self.jobs.get_mut(job_id);
        job.remaining -= 1;
        job.longest_service = job.longest_service.max(task.service);
        job.tasks.retain(|&t| t != task_id);
        let done = job.remaining == 0;
        self.start_service(s);
        debug_assert!(self.work_conserving(s));
        if done {
            self.complete(job_id);
        }
    }

    fn complete(&mut self, job_id: u32) {
        let job = self.jobs.remove(job_id);
        let latency = self.now - job.arrival;
        debug_assert!(latency + 1e-12 * self.now.max(1.0) >= job.longest_service);
        self.counters.completed += 1;
        if let Some(slot) = job.slot {
            self.latencies[slot] = latency;
            self.measured_done += 1;
        }
        for t in job.tasks {
            self.purge(t);
        }
    }

    fn purge(&mut self, task_id: u32) {
        let task = self.tasks.remove(task_id);
        let s = task.server;
        let queue = &mut self.servers[s as usize].queue;
        match task.state {
            TaskState::InService => {
                debug_assert_eq!(queue.front(), Some(&task_id));
                queue.pop_front();
                // Invalidates the pending departure of the purged task.
                self.servers[s as usize].epoch += 1;
                self.start_service(s);
                debug_assert!(self.work_conserving(s));
            }
            TaskState::Queued => {
                if let Some(pos) = queue.iter().position(|&t| t == task_id) {
                    queue.remove(pos);
                }
            }
        }
    }
}

/// Run lengths shared by both arms of a [`gain_experiment`]; `None` keeps
/// the defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunSizes {
    pub servers: Option<usize>,
    pub warmup_jobs: Option<usize>,
    pub measured_jobs: Option<usize>,
}

impl RunSizes {
    pub fn apply(&self, mut config: ClusterConfig) -> ClusterConfig {
        if let Some(l) = self.servers {
            config.servers = l;
            config.warmup_jobs = WARMUP_PER_SERVER * l;
        }
        if let Some(w) = self.warmup_jobs {
            config.warmup_jobs = w;
        }
        if let Some(m) = self.measured_jobs {
            config.measured_jobs = m;
        }
        config
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainResult {
    /// `mean(naive) - mean(coded)`.
    pub gain: f64,
    pub std_err: f64,
    pub naive: LatencyStats,
    pub coded: LatencyStats,
}

/// Simulated gain of an `(n = d k, k)` code over `(d, 1)` replication: both
/// arms run on the same seed and cluster size.
pub fn gain_experiment(
    k: usize,
    d: usize,
    lambda: f64,
    family: &Family,
    seed: u64,
    sizes: RunSizes,
) -> Result<GainResult> {
    let (naive_cfg, coded_cfg) = gain_configs(k, d, lambda, family, seed, sizes);
    let naive = run(&naive_cfg)?;
    let coded = run(&coded_cfg)?;
    Ok(GainResult {
        gain: naive.mean - coded.mean,
        std_err: naive.std_err.hypot(coded.std_err),
        naive,
        coded,
    })
}

/// The two configurations behind [`gain_experiment`].
pub fn gain_configs(
    k: usize,
    d: usize,
    lambda: f64,
    family: &Family,
    seed: u64,
    sizes: RunSizes,
) -> (ClusterConfig, ClusterConfig) {
    let coded_policy = Policy::LeastKOfN { n: d * k, k };
    let servers = ClusterConfig::default_servers(&coded_policy);
    let measured = ClusterConfig::default_measured_jobs(&coded_policy);
    let base = |policy| {
        sizes.apply(
            ClusterConfig::new(policy, lambda, *family, seed)
                .with_servers(servers)
                .with_jobs(WARMUP_PER_SERVER * servers, measured),
        )
    };
    (base(Policy::NaiveReplication { d }), base(coded_policy))
}

/// Service law of the single-queue residual experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualService {
    Random(ServiceDistribution),
    Constant(f64),
}

impl ResidualService {
    fn mean(&self) -> Result<f64> {
        match self {
            ResidualService::Random(d) => d.mean(),
            ResidualService::Constant(c) => Ok(*c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualConfig {
    /// Arrival rate of the single queue.
    pub arrival_rate: f64,
    pub service: ResidualService,
    pub seed: u64,
    pub warmup_jobs: usize,
    pub measured_jobs: usize,
}

/// Time-average remaining service of the job in service, conditioned on the
/// server being busy, for an M/G/1 FCFS queue.
pub fn empirical_residual(config: &ResidualConfig) -> Result<f64> {
    let mean = config.service.mean()?;
    if !(mean > 0.0) {
        return Err(invalid("service", "mean must be positive"));
    }
    let rho = config.arrival_rate * mean;
    if !(config.arrival_rate > 0.0) {
        return Err(invalid("arrival_rate", "must be positive"));
    }
    if rho >= 1.0 {
        return Err(Error::Unstable(rho));
    }
    if config.measured_jobs == 0 {
        return Err(invalid("measured_jobs", "must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let inter = Exp::new(config.arrival_rate).map_err(|e| invalid("arrival_rate", e.to_string()))?;
    let sampler = match config.service {
        ResidualService::Random(d) => Some(d.sampler()),
        ResidualService::Constant(_) => None,
    };
    let (mut arrival, mut free_at) = (0.0_f64, 0.0_f64);
    let (mut busy, mut area) = (0.0, 0.0);
    for i in 0..config.warmup_jobs + config.measured_jobs {
        arrival += inter.sample(&mut rng);
        let x = match (&sampler, config.service) {
            (Some(s), _) => s.sample(&mut rng),
            (None, ResidualService::Constant(c)) => c,
            (None, ResidualService::Random(_)) => unreachable!(),
        };
        let start = arrival.max(free_at);
        free_at = start + x;
        if i >= config.warmup_jobs {
            // Remaining service falls linearly from x to 0 over the interval.
            busy += x;
            area += x * x / 2.0;
        }
    }
    Ok(area / busy)
}
