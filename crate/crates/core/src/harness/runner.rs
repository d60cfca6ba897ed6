//! Batch execution of independent protocol trials.
//!
//! Trial i runs under seed `split_seed(master, i)` with its own generator
//! streams, so the batch is reproducible independently of execution order;
//! with the `parallel` feature the trials fan out over rayon and the
//! aggregated report is bit-identical to the sequential one.

use std::fs;
use std::time::Instant;

use rand::Rng;

use crate::bits::Bits;
use crate::error::Result;
use crate::exec::{map_collect, ExecMode};
use crate::harness::report::{ExperimentReport, RunDetail, Tally, TrialRow};
use crate::harness::spec::{ExperimentSpec, InputPolicy, Scenario, ScenarioFamily};
use crate::protocol::{run_protocol_with_states, ProtocolConfig};
use crate::rng::{split_seed, stream, stream_rng};

/// Run every trial of the spec and aggregate. Uses the parallel backend
/// when compiled in.
pub fn run_trials(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_trials_with_exec(spec, ExecMode::auto())
}

/// Always-sequential variant, kept callable alongside the parallel one for
/// benchmarks and equivalence tests.
pub fn run_trials_sequential(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_trials_with_exec(spec, ExecMode::Sequential)
}

pub fn run_trials_with_exec(spec: &ExperimentSpec, exec: ExecMode) -> Result<ExperimentReport> {
    spec.validate()?;
    let started = Instant::now();

    let keep_transcripts = spec.dump_transcripts.is_some();
    let one_trial = spec.trials == 1;
    let results: Vec<Result<(TrialRow, Option<RunDetail>)>> =
        map_collect(spec.trials, exec, |trial| {
            run_one_trial(spec, trial, keep_transcripts, one_trial)
        });

    let mut rows = Vec::with_capacity(results.len());
    let mut detail = None;
    for result in results {
        let (row, row_detail) = result?;
        if row.trial == 0 {
            detail = row_detail;
        }
        rows.push(row);
    }

    if let Some(dir) = &spec.dump_transcripts {
        fs::create_dir_all(dir)?;
        for row in &rows {
            let text = row.transcript.as_deref().expect("transcripts were kept");
            fs::write(dir.join(format!("trial_{:06}.txt", row.trial)), text)?;
        }
    }

    let tally = rows
        .iter()
        .map(tally_of_row)
        .fold(Tally::default(), Tally::merge);
    let mut report = assemble_report(spec, tally, detail);
    if spec.per_trial {
        for row in rows.iter_mut() {
            row.transcript = None;
        }
        report.per_trial = Some(rows);
    }
    report.wall_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

fn tally_of_row(row: &TrialRow) -> Tally {
    let mut tally = Tally {
        decoy_errors: row.decoy_errors,
        decoy_count: row.decoy_count,
        ..Tally::default()
    };
    match row.status.as_str() {
        "equal" => tally.equal = 1,
        "unequal" => tally.unequal = 1,
        "aborted:decoy-forward" => tally.aborted_decoy_forward = 1,
        "aborted:decoy-return" => tally.aborted_decoy_return = 1,
        "aborted:tp-cheating" => tally.aborted_tp_cheating = 1,
        other => unreachable!("unknown status label {other}"),
    }
    match row.verdict {
        Some(crate::adversary::VerdictKind::UnequalCertain) => tally.verdict_unequal = 1,
        Some(crate::adversary::VerdictKind::Inconclusive) => tally.verdict_inconclusive = 1,
        None => {}
    }
    tally
}

fn run_one_trial(
    spec: &ExperimentSpec,
    trial: u64,
    keep_transcript: bool,
    with_detail: bool,
) -> Result<(TrialRow, Option<RunDetail>)> {
    let trial_seed = split_seed(spec.config.seed, trial);
    let config = ProtocolConfig {
        seed: trial_seed,
        ..spec.config.clone()
    };
    let (x, y) = draw_inputs(spec, trial_seed);
    let tp = spec.tp_strategy();
    let out = run_protocol_with_states(&config, &x, &y, &tp, &spec.eve, spec.fixture.as_deref())?;

    let decoys = Tally::from_output(&out);
    let row = TrialRow {
        trial,
        status: out.outcome.status.label(),
        verdict: out.adversary.verdict.as_ref().map(|v| v.kind),
        tp_inconsistency: out.tp_inconsistency_rate,
        decoy_errors: decoys.decoy_errors,
        decoy_count: decoys.decoy_count,
        transcript: keep_transcript.then(|| out.transcript.render()),
    };
    let detail = (with_detail && trial == 0).then(|| RunDetail::from_output(&out));
    Ok((row, detail))
}

fn draw_inputs(spec: &ExperimentSpec, trial_seed: u64) -> (Bits, Bits) {
    let len = spec.config.digest_len();
    let mut rng = stream_rng(trial_seed, stream::INPUTS);
    match &spec.input_policy {
        InputPolicy::Fixed { x, y } => (x.clone(), y.clone()),
        InputPolicy::RandomEqual => {
            let x = Bits::random(len, &mut rng);
            (x.clone(), x)
        }
        InputPolicy::RandomUnequal => {
            let x = Bits::random(len, &mut rng);
            let y = loop {
                let candidate = Bits::random(len, &mut rng);
                if candidate != x {
                    break candidate;
                }
            };
            (x, y)
        }
        InputPolicy::RandomMixed { p_equal } => {
            let equal = rng.gen_bool(*p_equal);
            let x = Bits::random(len, &mut rng);
            if equal {
                let y = x.clone();
                (x, y)
            } else {
                let y = loop {
                    let candidate = Bits::random(len, &mut rng);
                    if candidate != x {
                        break candidate;
                    }
                };
                (x, y)
            }
        }
    }
}

fn assemble_report(
    spec: &ExperimentSpec,
    tally: Tally,
    detail: Option<RunDetail>,
) -> ExperimentReport {
    let trials = spec.trials;
    let hits = match spec.scenario.family() {
        ScenarioFamily::Counting => tally.verdict_unequal,
        ScenarioFamily::Decoy => tally.aborted(),
        ScenarioFamily::Lying => tally.aborted_tp_cheating,
    };
    let rate = hits as f64 / trials as f64;
    let stderr = (rate * (1.0 - rate) / trials as f64).sqrt();
    ExperimentReport {
        scenario: spec.scenario,
        trials,
        seed: spec.config.seed,
        hardened: spec.config.hardened,
        config: spec.config.clone(),
        equal: tally.equal,
        unequal: tally.unequal,
        aborted: tally.aborted(),
        aborted_decoy_forward: tally.aborted_decoy_forward,
        aborted_decoy_return: tally.aborted_decoy_return,
        aborted_tp_cheating: tally.aborted_tp_cheating,
        verdict_unequal: tally.verdict_unequal,
        verdict_inconclusive: tally.verdict_inconclusive,
        rate,
        stderr,
        decoy_errors: tally.decoy_errors,
        decoy_count: tally.decoy_count,
        transcript_dir: spec
            .dump_transcripts
            .as_ref()
            .map(|d| d.display().to_string()),
        detail: if spec.scenario == Scenario::GoldenExample || trials == 1 {
            detail
        } else {
            None
        },
        per_trial: None,
        wall_ms: 0,
    }
}
