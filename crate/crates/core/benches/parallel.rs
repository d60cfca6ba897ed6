//! Parallel vs. sequential throughput on the two batch workloads: full
//! protocol trials and the raw counting statistic.
//!
//! Requires the `parallel` feature (on by default):
//! `cargo bench -p qpcsim-core`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qpcsim_core::adversary::{attack_power_with_exec, DigestPolicy, PowerMethod};
use qpcsim_core::exec::ExecMode;
use qpcsim_core::harness::{run_trials_with_exec, ExperimentSpec, Scenario};
use qpcsim_core::protocol::ProtocolConfig;

fn bench_protocol_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol_trials");
    group.sample_size(10);
    for trials in [500u64, 2_000] {
        let config = ProtocolConfig {
            seed: 42,
            ..ProtocolConfig::default()
        };
        let spec = ExperimentSpec::for_scenario(Scenario::AttackPower, config, trials);
        group.bench_with_input(BenchmarkId::new("sequential", trials), &spec, |b, spec| {
            b.iter(|| run_trials_with_exec(spec, ExecMode::Sequential).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", trials), &spec, |b, spec| {
            b.iter(|| run_trials_with_exec(spec, ExecMode::Parallel).unwrap())
        });
    }
    group.finish();
}

fn bench_counting_statistic(c: &mut Criterion) {
    let mut group = c.benchmark_group("counting_statistic");
    group.sample_size(10);
    for trials in [100_000u64, 1_000_000] {
        let method = PowerMethod::MonteCarlo { trials };
        group.bench_with_input(
            BenchmarkId::new("sequential", trials),
            &method,
            |b, &method| {
                b.iter(|| {
                    attack_power_with_exec(
                        4,
                        4,
                        method,
                        &DigestPolicy::UniformUnequal,
                        7,
                        ExecMode::Sequential,
                    )
                    .unwrap()
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("parallel", trials),
            &method,
            |b, &method| {
                b.iter(|| {
                    attack_power_with_exec(
                        4,
                        4,
                        method,
                        &DigestPolicy::UniformUnequal,
                        7,
                        ExecMode::Parallel,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_protocol_trials, bench_counting_statistic);
criterion_main!(benches);
