//! Experiment reports: aggregation, serialization and comparison tables.
//!
//! A report is a pure function of its spec, so every serialized form
//! (text, csv, json, dumped transcripts) is byte-stable across repeated
//! runs. Wall-clock time is kept on the struct for operators but excluded
//! from all serialized forms.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::adversary::{AttackVerdict, CountsVector, VerdictKind};
use crate::error::{Error, Result};
use crate::harness::spec::{Scenario, ScenarioFamily};
use crate::protocol::{ProtocolConfig, RunOutput, Status};

/// One trial's outcome in compact form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_inconsistency: Option<f64>,
    pub decoy_errors: u64,
    pub decoy_count: u64,
    /// Rendered transcript, kept only while dumping to disk.
    #[serde(skip)]
    pub transcript: Option<String>,
}

/// Commutative tally of trial outcomes; merging partial tallies from any
/// partitioning of the trials yields the same totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub equal: u64,
    pub unequal: u64,
    pub aborted_decoy_forward: u64,
    pub aborted_decoy_return: u64,
    pub aborted_tp_cheating: u64,
    pub verdict_unequal: u64,
    pub verdict_inconclusive: u64,
    pub decoy_errors: u64,
    pub decoy_count: u64,
}

impl Tally {
    pub fn from_output(out: &RunOutput) -> Self {
        let mut tally = Tally::default();
        match out.outcome.status {
            Status::Equal => tally.equal = 1,
            Status::Unequal => tally.unequal = 1,
            Status::Aborted(reason) => match reason {
                crate::protocol::AbortReason::DecoyForward => tally.aborted_decoy_forward = 1,
                crate::protocol::AbortReason::DecoyReturn => tally.aborted_decoy_return = 1,
                crate::protocol::AbortReason::TpCheating => tally.aborted_tp_cheating = 1,
            },
        }
        match out.adversary.verdict.as_ref().map(|v| v.kind) {
            Some(VerdictKind::UnequalCertain) => tally.verdict_unequal = 1,
            Some(VerdictKind::Inconclusive) => tally.verdict_inconclusive = 1,
            None => {}
        }
        for report in [
            out.channels.forward_bob,
            out.channels.forward_charlie,
            out.channels.return_bob,
            out.channels.return_charlie,
        ]
        .into_iter()
        .flatten()
        {
            tally.decoy_errors += report.error_count as u64;
            tally.decoy_count += report.decoy_count as u64;
        }
        tally
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            equal: self.equal + other.equal,
            unequal: self.unequal + other.unequal,
            aborted_decoy_forward: self.aborted_decoy_forward + other.aborted_decoy_forward,
            aborted_decoy_return: self.aborted_decoy_return + other.aborted_decoy_return,
            aborted_tp_cheating: self.aborted_tp_cheating + other.aborted_tp_cheating,
            verdict_unequal: self.verdict_unequal + other.verdict_unequal,
            verdict_inconclusive: self.verdict_inconclusive + other.verdict_inconclusive,
            decoy_errors: self.decoy_errors + other.decoy_errors,
            decoy_count: self.decoy_count + other.decoy_count,
        }
    }

    pub fn aborted(&self) -> u64 {
        self.aborted_decoy_forward + self.aborted_decoy_return + self.aborted_tp_cheating
    }
}

/// Detailed view of a single run, attached to one-trial reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunDetail {
    pub status: String,
    pub per_block_xor: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts_initial: Option<CountsVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts_measured: Option<CountsVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<AttackVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_inconsistency_rate: Option<f64>,
}

impl RunDetail {
    pub fn from_output(out: &RunOutput) -> Self {
        RunDetail {
            status: out.outcome.status.label(),
            per_block_xor: out
                .outcome
                .per_block_xor
                .iter()
                .map(|c| c.to_string())
                .collect(),
            counts_initial: out.adversary.counts_initial,
            counts_measured: out.adversary.counts_measured,
            verdict: out.adversary.verdict.clone(),
            tp_inconsistency_rate: out.tp_inconsistency_rate,
        }
    }
}

/// Aggregated result of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    pub trials: u64,
    pub seed: u64,
    pub hardened: bool,
    pub config: ProtocolConfig,
    pub equal: u64,
    pub unequal: u64,
    pub aborted: u64,
    pub aborted_decoy_forward: u64,
    pub aborted_decoy_return: u64,
    pub aborted_tp_cheating: u64,
    pub verdict_unequal: u64,
    pub verdict_inconclusive: u64,
    /// Headline rate; what it counts depends on the scenario family
    /// (see [`Scenario::rate_label`]).
    pub rate: f64,
    /// Binomial standard error sqrt(rate * (1 - rate) / trials).
    pub stderr: f64,
    pub decoy_errors: u64,
    pub decoy_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<RunDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial: Option<Vec<TrialRow>>,
    /// Wall-clock duration; never serialized (reports are byte-stable).
    #[serde(skip)]
    pub wall_ms: u64,
}

impl ExperimentReport {
    /// The exact column set of the csv form.
    pub const CSV_HEADER: &'static str =
        "scenario,trials,equal,unequal,aborted,verdict_unequal,verdict_inconclusive,rate,stderr,seed";

    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{},{},{},{},{:.6},{:.6},{}\n",
            Self::CSV_HEADER,
            self.scenario,
            self.trials,
            self.equal,
            self.unequal,
            self.aborted,
            self.verdict_unequal,
            self.verdict_inconclusive,
            self.rate,
            self.stderr,
            self.seed
        )
    }

    /// Csv row without the header, for multi-report emission.
    pub fn csv_row(&self) -> String {
        self.to_csv()
            .lines()
            .nth(1)
            .expect("csv body exists")
            .to_string()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mode = if self.hardened {
            "hardened"
        } else {
            "baseline"
        };
        let _ = writeln!(s, "scenario: {} [{mode}]", self.scenario);
        let _ = writeln!(s, "trials: {} (seed {})", self.trials, self.seed);
        let _ = writeln!(
            s,
            "config: n={} m={} k={} decoys={} decoy-threshold={} tp-threshold={} hash={}",
            self.config.n,
            self.config.m,
            self.config.k(),
            self.config.decoys_per_transmission,
            self.config.decoy_threshold,
            self.config.tp_inconsistency_threshold,
            self.config.hash_scheme
        );
        let _ = writeln!(
            s,
            "outcomes: equal={} unequal={} aborted={} (decoy-forward={} decoy-return={} tp-cheating={})",
            self.equal,
            self.unequal,
            self.aborted,
            self.aborted_decoy_forward,
            self.aborted_decoy_return,
            self.aborted_tp_cheating
        );
        let _ = writeln!(
            s,
            "verdicts: unequal-certain={} inconclusive={}",
            self.verdict_unequal, self.verdict_inconclusive
        );
        let _ = writeln!(
            s,
            "{} rate: {:.6} +- {:.6}",
            self.scenario.rate_label(),
            self.rate,
            self.stderr
        );
        if self.decoy_count > 0 {
            let _ = writeln!(
                s,
                "decoys: errors={}/{} (rate {:.6})",
                self.decoy_errors,
                self.decoy_count,
                self.decoy_errors as f64 / self.decoy_count as f64
            );
        }
        if let Some(detail) = &self.detail {
            if let (Some(before), Some(after)) = (&detail.counts_initial, &detail.counts_measured) {
                let _ = writeln!(s, "counts: initial={before} measured={after}");
            }
            if let Some(verdict) = &detail.verdict {
                let witness: Vec<String> = verdict.witness.iter().map(|w| w.to_string()).collect();
                let _ = writeln!(
                    s,
                    "verdict: {:?} witness={{{}}}",
                    verdict.kind,
                    witness.join(",")
                );
            }
            if !detail.per_block_xor.is_empty() {
                let _ = writeln!(s, "per-block-xor: {}", detail.per_block_xor.join(","));
            }
            let _ = writeln!(s, "status: {}", detail.status);
        }
        if let Some(dir) = &self.transcript_dir {
            let _ = writeln!(s, "transcripts: {dir}");
        }
        if let Some(rows) = &self.per_trial {
            let _ = writeln!(s, "per-trial:");
            for row in rows {
                let verdict = match row.verdict {
                    Some(VerdictKind::UnequalCertain) => "unequal-certain",
                    Some(VerdictKind::Inconclusive) => "inconclusive",
                    None => "-",
                };
                let _ = writeln!(
                    s,
                    "  {:>6} {} verdict={} decoy-errors={}/{}",
                    row.trial, row.status, verdict, row.decoy_errors, row.decoy_count
                );
            }
        }
        s
    }
}

/// Output encodings of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::input(format!(
                "unknown format {other:?} (expected text, csv or json)"
            ))),
        }
    }
}

/// Render a report in the chosen format and write it to a file or stdout.
pub fn emit_report(
    report: &ExperimentReport,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<()> {
    let rendered = match format {
        OutputFormat::Text => report.to_text(),
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    write_out(&rendered, out)
}

/// Emit several reports as one artifact: csv shares a single header, json
/// becomes an array, text blocks are separated by blank lines.
pub fn emit_reports(
    reports: &[ExperimentReport],
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::input("no reports to emit"));
    }
    let rendered = match format {
        OutputFormat::Text => {
            let blocks: Vec<String> = reports.iter().map(|r| r.to_text()).collect();
            blocks.join("\n")
        }
        OutputFormat::Csv => {
            let mut s = String::from(ExperimentReport::CSV_HEADER);
            s.push('\n');
            for report in reports {
                s.push_str(&report.csv_row());
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    write_out(&rendered, out)
}

fn write_out(rendered: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, rendered).map_err(Error::from),
        None => std::io::stdout()
            .write_all(rendered.as_bytes())
            .map_err(Error::from),
    }
}

/// Tabulate rates across reports of one scenario family.
pub fn summarize(reports: &[ExperimentReport]) -> Result<String> {
    let first = reports
        .first()
        .ok_or_else(|| Error::input("nothing to summarize"))?;
    let family = first.scenario.family();
    if let Some(other) = reports.iter().find(|r| r.scenario.family() != family) {
        return Err(Error::input(format!(
            "cannot summarize {} together with {}: different rate semantics",
            first.scenario, other.scenario
        )));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:<9} {:>9} {:>10} {:>10}  {}",
        "scenario",
        "mode",
        "trials",
        "rate",
        "stderr",
        label_for(family)
    );
    for report in reports {
        let mode = if report.hardened {
            "hardened"
        } else {
            "baseline"
        };
        let _ = writeln!(
            s,
            "{:<24} {:<9} {:>9} {:>10.6} {:>10.6}  n={} m={} k={}",
            report.scenario.to_string(),
            mode,
            report.trials,
            report.rate,
            report.stderr,
            report.config.n,
            report.config.m,
            report.config.k()
        );
    }
    Ok(s)
}

fn label_for(family: ScenarioFamily) -> &'static str {
    match family {
        ScenarioFamily::Counting => "(rate = counting verdict fired)",
        ScenarioFamily::Decoy => "(rate = run aborted)",
        ScenarioFamily::Lying => "(rate = cheating third party caught)",
    }
}
