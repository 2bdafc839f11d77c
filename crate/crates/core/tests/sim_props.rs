use eclat::dist::{Family, ServiceDistribution};
use eclat::sim::{ClusterConfig, LatencyStats, Policy, run, run_detailed};
use eclat::Error;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x51e),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn policy_strategy() -> impl Strategy<Value = Policy> {
    prop_oneof![
        (2usize..4).prop_map(|d| Policy::NaiveReplication { d }),
        (1usize..5, 2usize..4).prop_map(|(k, d)| Policy::KSplit { k, d }),
        (1usize..5, 1usize..4).prop_map(|(k, d)| Policy::LeastKOfN { n: k * d, k }),
        (2usize..8).prop_map(|k| Policy::BatchSampling { n: k + k / 2 + (k % 2), k }),
        (1usize..5, 0usize..3).prop_map(|(k, delta)| Policy::RedundantRequest { k, delta }),
    ]
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Exponential),
        Just(Family::ShiftedExponential { shift: 0.1 }),
        Just(Family::Weibull { shape: 1.5 }),
        Just(Family::Pareto { tail: 3.0 }),
    ]
}

fn small(policy: Policy, lambda: f64, family: Family, seed: u64) -> ClusterConfig {
    ClusterConfig::new(policy, lambda, family, seed)
        .with_servers(60)
        .with_jobs(500, 3_000)
}

fn check_stats(s: &LatencyStats) {
    assert!(s.min <= s.mean && s.mean <= s.max);
    assert!(s.std_err > 0.0);
    assert!(s.ccdf.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 >= w[0].0));
    assert!(s.queue_ccdf.windows(2).all(|w| w[1].1 <= w[0].1));
    assert_eq!(s.queue_tail(0), 1.0);
    let q: Vec<f64> = s.quantiles.iter().map(|&(_, v)| v).collect();
    assert!(q.windows(2).all(|w| w[0] <= w[1]));
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn runs_conserve_jobs_and_report_consistent_stats(
        policy in policy_strategy(),
        family in family_strategy(),
        lambda in 0.05f64..0.6,
        seed in any::<u64>(),
    ) {
        let out = run_detailed(&small(policy, lambda, family, seed)).unwrap();
        let c = out.counters;
        prop_assert_eq!(c.arrivals, c.completed + c.in_flight);
        prop_assert!(c.completed >= 3_500);
        prop_assert_eq!(out.latencies.len(), 3_000);
        prop_assert_eq!(out.stats.job_count, 3_000);
        check_stats(&out.stats);
    }

    #[test]
    fn latency_never_below_task_service(
        policy in policy_strategy(),
        lambda in 0.05f64..0.6,
        seed in any::<u64>(),
    ) {
        let floor = 0.3;
        let law = ServiceDistribution::shifted_exponential(floor, 5.0).unwrap();
        let cfg = small(policy, lambda * 0.5, Family::Exponential, seed).with_task_service(law);
        let stats = run(&cfg).unwrap();
        prop_assert!(stats.min >= floor);
    }
}

#[test]
fn identical_seeds_reproduce() {
    let cfg = small(Policy::LeastKOfN { n: 6, k: 3 }, 0.7, Family::Weibull { shape: 1.5 }, 9);
    let a = run_detailed(&cfg).unwrap();
    let b = run_detailed(&cfg).unwrap();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed = 10;
    assert_ne!(a.latencies, run_detailed(&other).unwrap().latencies);
}

#[test]
fn least_k_of_n_dominates_k_split() {
    for (k, d) in [(2, 2), (4, 2), (3, 3)] {
        for lambda in [0.3, 0.6, 0.85] {
            let base = |p| {
                ClusterConfig::new(p, lambda, Family::Exponential, 21)
                    .with_jobs(40_000, 100_000 / k)
            };
            let coded = run(&base(Policy::LeastKOfN { n: d * k, k })).unwrap();
            let split = run(&base(Policy::KSplit { k, d })).unwrap();
            let slack = 3.0 * coded.std_err.hypot(split.std_err);
            assert!(
                coded.mean <= split.mean + slack,
                "({k},{d}) lambda={lambda}: {} vs {}",
                coded.mean,
                split.mean
            );
        }
    }
}

#[test]
fn redundancy_helps_at_low_load() {
    let base = |p| ClusterConfig::new(p, 0.01, Family::Exponential, 5).with_jobs(5_000, 40_000);
    let plain = run(&base(Policy::LeastKOfN { n: 4, k: 4 })).unwrap();
    for delta in [1, 2, 4] {
        let red = run(&base(Policy::RedundantRequest { k: 4, delta })).unwrap();
        assert!(red.mean <= plain.mean + 3.0 * red.std_err.hypot(plain.std_err));
    }
}

#[test]
fn power_of_two_queue_tail_is_double_exponential() {
    let lambda: f64 = 0.8;
    let cfg = ClusterConfig::new(Policy::NaiveReplication { d: 2 }, lambda, Family::Exponential, 2)
        .with_jobs(40_000, 300_000);
    let stats = run(&cfg).unwrap();
    for r in 1..=3 {
        let target = lambda.powi((1 << r) - 1);
        assert!((stats.queue_tail(r) - target).abs() <= 0.02, "r={r}");
    }
}

#[test]
fn invalid_configs_rejected() {
    let ok = small(Policy::KSplit { k: 2, d: 2 }, 0.5, Family::Exponential, 1);
    assert!(ok.validate().is_ok());
    assert!(matches!(
        ok.clone().with_servers(3).validate(),
        Err(Error::PolicyMismatch { .. })
    ));
    let mut unstable = ok.clone();
    unstable.lambda = 1.0;
    assert!(matches!(unstable.validate(), Err(Error::Unstable(_))));
    assert!(ok.clone().with_jobs(0, 0).validate().is_err());
    assert!(Policy::BatchSampling { n: 20, k: 10 }.validate().is_err());
    assert!(Policy::NaiveReplication { d: 1 }.validate().is_err());
}
