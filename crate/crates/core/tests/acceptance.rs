//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `--nocapture`) and enforcing its time
//! budget. Tolerances are pinned here, not configurable.

use std::time::{Duration, Instant};

use qpcsim_core::adversary::{
    attack_power, counting_verdict, CountsVector, DigestPolicy, PowerMethod, TpStrategy,
    VerdictKind,
};
use qpcsim_core::bell::{combined_action, BellIndex, PauliCode};
use qpcsim_core::bits::Bits;
use qpcsim_core::countermeasure::false_positive_rate_exhaustive;
use qpcsim_core::decoy::{
    eve_intercept_resend, prepare_decoys, verify_decoys, DecoyPhoton, EveModel, Slot,
};
use qpcsim_core::dense::dense_oracle_apply;
use qpcsim_core::harness::{run_trials, ExperimentSpec, Scenario};
use qpcsim_core::protocol::{
    run_protocol, run_protocol_with_states, AbortReason, ProtocolConfig, Status,
};

fn timed<T>(budget: Duration, label: &str, body: impl FnOnce() -> T) -> T {
    let started = Instant::now();
    let value = body();
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {label} exceeded its {budget:?} budget: took {elapsed:?}"
    );
    println!("[PASS] criterion {label} ({elapsed:?})");
    value
}

fn bits_of(value: u64, len: usize) -> Bits {
    Bits::new(
        (0..len)
            .map(|i| (value >> (len - 1 - i)) & 1 == 1)
            .collect(),
    )
}

/// Criterion 1: the worked example reproduces exactly, in under a second.
#[test]
fn criterion_1_golden_example() {
    timed(Duration::from_secs(1), "1 (golden example)", || {
        let spec =
            ExperimentSpec::for_scenario(Scenario::GoldenExample, ProtocolConfig::default(), 1);
        let report = run_trials(&spec).unwrap();
        let detail = report
            .detail
            .as_ref()
            .expect("golden report carries detail");
        assert_eq!(detail.counts_initial.unwrap(), CountsVector([2, 1, 3, 2]));
        assert_eq!(detail.counts_measured.unwrap(), CountsVector([1, 1, 4, 2]));
        let verdict = detail.verdict.as_ref().unwrap();
        assert_eq!(verdict.kind, VerdictKind::UnequalCertain);
        assert_eq!(verdict.witness, vec![1, 3]);
        assert_eq!(detail.status, "unequal");
        assert_eq!(report.unequal, 1);
        assert_eq!(report.rate, 1.0);
    });
}

/// Criterion 2: the symbolic algebra agrees with the dense amplitude oracle
/// on all 64 (state, code_b, code_c) cases with overlap within 1e-12 of 1.
#[test]
fn criterion_2_algebra_oracle_equivalence() {
    timed(
        Duration::from_secs(1),
        "2 (algebra oracle equivalence)",
        || {
            for state in BellIndex::ALL {
                for code_b in PauliCode::ALL {
                    for code_c in PauliCode::ALL {
                        let (oracle_state, magnitude) =
                            dense_oracle_apply(code_b, code_c, state).unwrap();
                        assert_eq!(oracle_state, combined_action(code_b, code_c, state));
                        assert!(
                            (magnitude - 1.0).abs() <= 1e-12,
                            "overlap {magnitude} for ({code_b},{code_c}) on {state}"
                        );
                    }
                }
            }
        },
    );
}

/// Criterion 3: the counting verdict never fires on equal digests --
/// exhaustively at m=2, k=2 and over 10^4 random trials at m=4, k=4.
#[test]
fn criterion_3_attack_soundness() {
    timed(Duration::from_secs(30), "3 (attack soundness)", || {
        // Exhaustive: every equal digest pair x every initial assignment.
        let mut fired = 0u64;
        for digest in 0..16u64 {
            let bits = bits_of(digest, 4);
            for assignment in 0..256u64 {
                let states: Vec<BellIndex> = (0..4)
                    .map(|i| BellIndex::from_index(((assignment >> (2 * i)) & 3) as usize))
                    .collect();
                let cfg = ProtocolConfig {
                    n: 4,
                    m: 2,
                    seed: assignment,
                    ..ProtocolConfig::default()
                };
                let out = run_protocol_with_states(
                    &cfg,
                    &bits,
                    &bits,
                    &TpStrategy::COUNTING,
                    &EveModel::None,
                    Some(&states),
                )
                .unwrap();
                assert_eq!(out.outcome.status, Status::Equal);
                if out.adversary.verdict.unwrap().kind == VerdictKind::UnequalCertain {
                    fired += 1;
                }
            }
        }
        assert_eq!(fired, 0, "counting verdict fired on equal digests");

        // Monte Carlo: 10^4 equal-digest runs at the default n=8, m=4.
        let config = ProtocolConfig {
            seed: 90_210,
            ..ProtocolConfig::default()
        };
        let spec = ExperimentSpec::for_scenario(Scenario::AttackSoundness, config, 10_000);
        let report = run_trials(&spec).unwrap();
        assert_eq!(report.verdict_unequal, 0);
        assert_eq!(report.rate, 0.0);
        assert_eq!(report.equal, 10_000);
    });
}

/// Criterion 4: the exhaustive detection rate at m=2, k=1 (0.95, computed by
/// the brute-force oracle before the build and frozen here) matches the
/// 10^5-trial Monte Carlo estimate within 0.02.
#[test]
fn criterion_4_attack_power() {
    timed(Duration::from_secs(60), "4 (attack power)", || {
        let exact = attack_power(
            2,
            1,
            PowerMethod::Exhaustive,
            &DigestPolicy::UniformUnequal,
            0,
        )
        .unwrap();
        // Frozen exhaustive value: 14592 of 15360 (digest pair, assignment)
        // cases move the counts.
        assert!((exact - 0.95).abs() < 1e-12, "exhaustive rate {exact}");
        let estimate = attack_power(
            2,
            1,
            PowerMethod::MonteCarlo { trials: 100_000 },
            &DigestPolicy::UniformUnequal,
            424_242,
        )
        .unwrap();
        assert!(
            (estimate - exact).abs() <= 0.02,
            "monte carlo {estimate} vs exhaustive {exact}"
        );
    });
}

/// Criterion 5: hardened mode with k=1 and equal digests fires the verdict
/// with probability exactly 3/4 by mask enumeration, and the 10^4-trial
/// Monte Carlo estimate lies within 3 standard errors of 0.75.
#[test]
fn criterion_5_countermeasure_unsoundness() {
    timed(
        Duration::from_secs(30),
        "5 (countermeasure breaks the attack)",
        || {
            assert_eq!(false_positive_rate_exhaustive(1).unwrap(), 0.75);

            let config = ProtocolConfig {
                n: 5,
                m: 4,
                seed: 5_150,
                ..ProtocolConfig::default()
            };
            let spec = ExperimentSpec::for_scenario(Scenario::Countermeasure, config, 10_000);
            assert!(spec.config.hardened);
            let report = run_trials(&spec).unwrap();
            let three_se = 3.0 * (0.75f64 * 0.25 / 10_000.0).sqrt();
            assert!(
                (report.rate - 0.75).abs() <= three_se,
                "hardened false-positive rate {} vs 0.75 (3se {three_se:.4})",
                report.rate
            );
            // Every one of those runs still compared equal for the players.
            assert_eq!(report.equal, 10_000);
        },
    );
}

/// Criterion 6: hardening changes no comparison outcome (exhaustive at
/// m <= 2), the honest third party passes the adjusted check exactly, and a
/// fully lying one is caught with inconsistency rate exactly 1.
#[test]
fn criterion_6_countermeasure_preserves_correctness_and_detection() {
    timed(
        Duration::from_secs(30),
        "6 (countermeasure preserves behavior)",
        || {
            for m in [1usize, 2] {
                let len = 2 * m;
                for x in 0..(1u64 << len) {
                    for y in 0..(1u64 << len) {
                        let seed = (x << len | y) + 7;
                        let base_cfg = ProtocolConfig {
                            n: m + 1,
                            m,
                            seed,
                            ..ProtocolConfig::default()
                        };
                        let hard_cfg = ProtocolConfig {
                            hardened: true,
                            ..base_cfg.clone()
                        };
                        let xb = bits_of(x, len);
                        let yb = bits_of(y, len);
                        let base =
                            run_protocol(&base_cfg, &xb, &yb, &TpStrategy::Honest, &EveModel::None)
                                .unwrap();
                        let hard =
                            run_protocol(&hard_cfg, &xb, &yb, &TpStrategy::Honest, &EveModel::None)
                                .unwrap();
                        assert_eq!(base.outcome, hard.outcome);
                        assert_eq!(hard.tp_inconsistency_rate, Some(0.0));
                    }
                }
            }

            // A fully tampering third party mismatches every sampling pair.
            let xb: Bits = "01101001".parse().unwrap();
            for seed in 0..50u64 {
                let cfg = ProtocolConfig {
                    hardened: true,
                    seed,
                    ..ProtocolConfig::default()
                };
                let out = run_protocol(
                    &cfg,
                    &xb,
                    &xb,
                    &TpStrategy::Lying {
                        tamper_fraction: 1.0,
                    },
                    &EveModel::None,
                )
                .unwrap();
                assert_eq!(out.outcome.status, Status::Aborted(AbortReason::TpCheating));
                assert_eq!(out.tp_inconsistency_rate, Some(1.0));
            }
        },
    );
}

/// Criterion 7: intercept-resend interception errs decoys at rate
/// 0.25 +- 0.02 over >= 10^4 decoys; the abort rate matches 1-(3/4)^d
/// within 3 standard errors; no eavesdropper means error rate exactly 0.
#[test]
fn criterion_7_eavesdropper_detection() {
    timed(
        Duration::from_secs(30),
        "7 (eavesdropper detection)",
        || {
            use rand_chacha::rand_core::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1_234);
            let prepared = prepare_decoys(20_000, &mut rng);
            let mut flying: Vec<Slot> = prepared.iter().map(|p| Slot::Decoy(*p)).collect();
            eve_intercept_resend(&mut flying, &mut [], &mut rng);
            let received: Vec<DecoyPhoton> = flying
                .iter()
                .map(|s| match s {
                    Slot::Decoy(p) => *p,
                    Slot::Pair(_) => unreachable!(),
                })
                .collect();
            let report = verify_decoys(&received, &prepared, 0.05, &mut rng).unwrap();
            assert!(
                (report.error_rate - 0.25).abs() <= 0.02,
                "decoy error rate {}",
                report.error_rate
            );

            // Abort rate over 10^4 protocol runs, eavesdropper on Bob's forward
            // channel, 8 decoys per transmission. The decoy check itself trips
            // with probability 1 - (3/4)^8; runs that slip through it still
            // carry disturbed pairs, so the sampling check catches most of the
            // remainder and the total abort rate can only sit above the decoy
            // formula.
            let config = ProtocolConfig {
                seed: 8_086,
                ..ProtocolConfig::default()
            };
            let spec = ExperimentSpec::for_scenario(Scenario::DecoyEve, config, 10_000);
            let report = run_trials(&spec).unwrap();
            let expected = 1.0 - 0.75f64.powi(8);
            let three_se = 3.0 * (expected * (1.0 - expected) / 10_000.0).sqrt();
            let decoy_abort_rate = report.aborted_decoy_forward as f64 / report.trials as f64;
            assert!(
                (decoy_abort_rate - expected).abs() <= three_se,
                "decoy abort rate {decoy_abort_rate} vs {expected:.4} (3se {three_se:.4})"
            );
            assert!(
                report.rate >= expected - three_se,
                "total abort rate {} fell below the decoy formula {expected:.4}",
                report.rate
            );

            // Without an eavesdropper the channel is noiseless: zero errors
            // across every decoy of 10^4 honest runs.
            let config = ProtocolConfig {
                seed: 6_502,
                ..ProtocolConfig::default()
            };
            let honest = run_trials(&ExperimentSpec::for_scenario(
                Scenario::AttackSoundness,
                config,
                10_000,
            ))
            .unwrap();
            assert_eq!(honest.decoy_errors, 0);
            assert!(honest.decoy_count >= 10_000);
        },
    );
}

/// Criterion 8: identical specs serialize to byte-identical reports and
/// transcripts.
#[test]
fn criterion_8_determinism() {
    timed(Duration::from_secs(30), "8 (determinism)", || {
        let config = ProtocolConfig {
            seed: 1_701,
            ..ProtocolConfig::default()
        };
        let mut spec = ExperimentSpec::for_scenario(Scenario::AttackPower, config, 2_000);
        spec.per_trial = true;
        let a = run_trials(&spec).unwrap();
        let b = run_trials(&spec).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_text(), b.to_text());

        // Transcripts, dumped twice into separate directories.
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        for (dir, label) in [(&dir_a, "a"), (&dir_b, "b")] {
            let mut golden =
                ExperimentSpec::for_scenario(Scenario::GoldenExample, ProtocolConfig::default(), 1);
            golden.dump_transcripts = Some(dir.path().to_path_buf());
            run_trials(&golden).unwrap_or_else(|e| panic!("golden run {label}: {e}"));
        }
        let ta = std::fs::read(dir_a.path().join("trial_000000.txt")).unwrap();
        let tb = std::fs::read(dir_b.path().join("trial_000000.txt")).unwrap();
        assert!(!ta.is_empty());
        assert_eq!(ta, tb);

        // The lying-third-party and eavesdropper scenarios are deterministic
        // too, including their randomized adversaries.
        for scenario in [Scenario::LyingTp, Scenario::DecoyEve] {
            let config = ProtocolConfig {
                seed: 2_001,
                ..ProtocolConfig::default()
            };
            let s = ExperimentSpec::for_scenario(scenario, config, 500);
            assert_eq!(
                run_trials(&s).unwrap().to_json(),
                run_trials(&s).unwrap().to_json()
            );
        }

        // And the counting verdict itself is a pure function.
        let v1 =
            counting_verdict(&CountsVector([2, 1, 3, 2]), &CountsVector([1, 1, 4, 2])).unwrap();
        let v2 =
            counting_verdict(&CountsVector([2, 1, 3, 2]), &CountsVector([1, 1, 4, 2])).unwrap();
        assert_eq!(v1, v2);
    });
}
