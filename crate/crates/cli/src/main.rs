//! Command-line front end for the quantum private comparison simulator.
//!
//! Exit codes: 0 success, 1 input error, 2 i/o error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpcsim_core::adversary::{attack_power_counts, DigestPolicy, PowerMethod, TpStrategy};
use qpcsim_core::decoy::EveModel;
use qpcsim_core::exec::ExecMode;
use qpcsim_core::harness::{
    emit_report, emit_reports, run_trials, summarize, ExperimentReport, ExperimentSpec,
    InputPolicy, OutputFormat, RunDetail, Scenario, SpecBuilder,
};
use qpcsim_core::protocol::{run_protocol, ProtocolConfig};
use qpcsim_core::Error;

#[derive(Parser)]
#[command(
    name = "qpcsim",
    about = "Simulator and attack-evaluation harness for a three-party quantum private comparison protocol",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one protocol run and print its outcome.
    Run(RunArgs),
    /// Reproduce the worked eight-pair example with a counting third party.
    Golden(EvalArgs),
    /// Evaluate the counting attack (soundness on equal inputs, power on
    /// unequal ones).
    AttackEval(AttackEvalArgs),
    /// Compare the counting attack against baseline and hardened runs.
    CountermeasureEval(EvalArgs),
    /// Measure eavesdropper detection through the decoy checks.
    DecoyEval(EvalArgs),
    /// Measure how reliably a lying third party is caught.
    LyingTpEval(LyingArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Flat key = value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; trials derive their own streams from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Total EPR pairs (n = m + k).
    #[arg(long)]
    n: Option<usize>,
    /// Encoded pairs carrying digest blocks.
    #[arg(long)]
    m: Option<usize>,
    /// Sampling pairs guarding against a lying third party.
    #[arg(long)]
    k: Option<usize>,
    /// Decoy photons per transmission.
    #[arg(long)]
    decoys: Option<usize>,
    /// Decoy error rate above which a transmission aborts.
    #[arg(long)]
    decoy_threshold: Option<f64>,
    /// Sampling inconsistency rate above which the third party is indicted.
    #[arg(long)]
    tp_threshold: Option<f64>,
    /// Input digesting: identity or toy-digest.
    #[arg(long)]
    hash: Option<String>,
    /// Mask the sampling pairs (the countermeasure).
    #[arg(long)]
    hardened: bool,
    /// Output format: text, csv or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrialArgs {
    /// Number of independent trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Keep one report row per trial.
    #[arg(long)]
    per_trial: bool,
    /// Write each trial's transcript into this directory.
    #[arg(long)]
    dump_transcripts: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    trials: TrialArgs,
    /// Eavesdropper placement: none, all, forward, forward-bob,
    /// forward-charlie or return.
    #[arg(long)]
    eve: Option<String>,
    /// Subcommand-specific settings routed into the spec builder.
    #[arg(skip)]
    extra_settings: Vec<(&'static str, String)>,
}

#[derive(Args)]
struct AttackEvalArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Input policy: equal, unequal or mixed:P.
    #[arg(long)]
    inputs: Option<String>,
    /// Enumerate the whole space instead of sampling (m <= 3).
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct LyingArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Probability that each published outcome is tampered.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Bob's secret input as a bit string.
    #[arg(long)]
    x: Option<String>,
    /// Charlie's secret input as a bit string.
    #[arg(long)]
    y: Option<String>,
    /// Third-party strategy: honest, counting, counting-restricted or lying.
    #[arg(long, default_value = "honest")]
    tp: String,
    /// Tamper probability for the lying strategy.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Eavesdropper placement (see decoy-eval).
    #[arg(long, default_value = "none")]
    eve: String,
    /// Print the full transcript after the outcome.
    #[arg(long)]
    print_transcript: bool,
    /// Write the transcript into this directory as run.txt.
    #[arg(long)]
    dump_transcripts: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("qpcsim: {err}");
            match err {
                Error::Io(_) => ExitCode::from(2),
                Error::Input(_) | Error::Internal(_) => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => run_single(args),
        Command::Golden(args) => run_eval(args, Scenario::GoldenExample),
        Command::AttackEval(args) => run_attack_eval(args),
        Command::CountermeasureEval(args) => run_countermeasure_eval(args),
        Command::DecoyEval(args) => run_eval(args, Scenario::DecoyEve),
        Command::LyingTpEval(args) => {
            let LyingArgs { mut eval, q } = args;
            if let Some(q) = q {
                eval.extra_settings.push(("tamper_fraction", q.to_string()));
            }
            run_eval(eval, Scenario::LyingTp)
        }
    }
}

impl CommonArgs {
    fn apply(&self, builder: &mut SpecBuilder) -> Result<(), Error> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)?;
            builder.load_str(&text)?;
        }
        let pairs: [(&str, Option<String>); 8] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("n", self.n.map(|v| v.to_string())),
            ("m", self.m.map(|v| v.to_string())),
            ("k", self.k.map(|v| v.to_string())),
            ("decoys", self.decoys.map(|v| v.to_string())),
            (
                "decoy_threshold",
                self.decoy_threshold.map(|v| v.to_string()),
            ),
            (
                "tp_inconsistency_threshold",
                self.tp_threshold.map(|v| v.to_string()),
            ),
            ("hash_scheme", self.hash.clone()),
        ];
        for (key, value) in pairs {
            if let Some(value) = value {
                builder.set(key, &value)?;
            }
        }
        if self.hardened {
            builder.set("hardened", "true")?;
        }
        Ok(())
    }

    fn format(&self) -> Result<OutputFormat, Error> {
        self.format.parse()
    }
}

impl EvalArgs {
    fn build_spec(&self, scenario: Scenario) -> Result<ExperimentSpec, Error> {
        let mut builder = SpecBuilder::new();
        self.common.apply(&mut builder)?;
        if let Some(trials) = self.trials.trials {
            builder.set("trials", &trials.to_string())?;
        }
        if self.trials.per_trial {
            builder.set("per_trial", "true")?;
        }
        if let Some(eve) = &self.eve {
            builder.set("eve", eve)?;
        }
        for (key, value) in &self.extra_settings {
            builder.set(key, value)?;
        }
        let mut spec = builder.build(Some(scenario))?;
        spec.dump_transcripts = self.trials.dump_transcripts.clone();
        Ok(spec)
    }
}

fn run_eval(args: EvalArgs, scenario: Scenario) -> Result<(), Error> {
    let format = args.common.format()?;
    let spec = args.build_spec(scenario)?;
    let report = run_trials(&spec)?;
    emit_report(&report, format, args.common.out.as_deref())
}

fn run_attack_eval(args: AttackEvalArgs) -> Result<(), Error> {
    let AttackEvalArgs {
        mut eval,
        inputs,
        exhaustive,
    } = args;
    if let Some(token) = inputs {
        let policy = match token.as_str() {
            "equal" => "random-equal".to_string(),
            "unequal" => "random-unequal".to_string(),
            other => match other.strip_prefix("mixed:") {
                Some(p) => format!("random-mixed:{p}"),
                None => {
                    return Err(Error::input(format!(
                        "unknown input policy {other:?} (expected equal, unequal or mixed:P)"
                    )))
                }
            },
        };
        eval.extra_settings.push(("input_policy", policy));
    }
    let format = eval.common.format()?;
    let out = eval.common.out.clone();
    let spec = eval.build_spec(Scenario::AttackPower)?;
    let report = if exhaustive {
        exhaustive_power_report(&spec)?
    } else {
        run_trials(&spec)?
    };
    emit_report(&report, format, out.as_deref())
}

/// Exact enumeration presented in the standard report shape: every
/// (digest pair, initial assignment) case is one noiseless honest run whose
/// outcome is unequal, and `verdict_unequal` counts the detected ones.
fn exhaustive_power_report(spec: &ExperimentSpec) -> Result<ExperimentReport, Error> {
    let (m, k) = (spec.config.m, spec.config.k());
    let (detected, cases) = attack_power_counts(
        m,
        k,
        PowerMethod::Exhaustive,
        &DigestPolicy::UniformUnequal,
        spec.config.seed,
        ExecMode::auto(),
    )?;
    let rate = detected as f64 / cases as f64;
    Ok(ExperimentReport {
        scenario: Scenario::AttackPower,
        trials: cases,
        seed: spec.config.seed,
        hardened: false,
        config: spec.config.clone(),
        equal: 0,
        unequal: cases,
        aborted: 0,
        aborted_decoy_forward: 0,
        aborted_decoy_return: 0,
        aborted_tp_cheating: 0,
        verdict_unequal: detected,
        verdict_inconclusive: cases - detected,
        rate,
        stderr: 0.0,
        decoy_errors: 0,
        decoy_count: 0,
        transcript_dir: None,
        detail: None,
        per_trial: None,
        wall_ms: 0,
    })
}

fn run_countermeasure_eval(args: EvalArgs) -> Result<(), Error> {
    let format = args.common.format()?;
    let out = args.common.out.clone();
    let mut hardened = args.build_spec(Scenario::Countermeasure)?;
    let mut baseline = hardened.clone();
    baseline.config.hardened = false;
    if let Some(dir) = &hardened.dump_transcripts {
        baseline.dump_transcripts = Some(dir.join("baseline"));
        hardened.dump_transcripts = Some(dir.join("hardened"));
    }

    let reports = [run_trials(&baseline)?, run_trials(&hardened)?];
    match format {
        OutputFormat::Text => {
            let mut text = summarize(&reports)?;
            text.push('\n');
            for report in &reports {
                text.push_str(&report.to_text());
                text.push('\n');
            }
            match out.as_deref() {
                Some(path) => fs::write(path, text).map_err(Error::from),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        _ => emit_reports(&reports, format, out.as_deref()),
    }
}

fn run_single(args: RunArgs) -> Result<(), Error> {
    let mut builder = SpecBuilder::new();
    args.common.apply(&mut builder)?;
    if let Some(x) = &args.x {
        builder.set("input_x", x)?;
    }
    if let Some(y) = &args.y {
        builder.set("input_y", y)?;
    }
    // Piggyback on the spec machinery for shape and input resolution; the
    // scenario itself is irrelevant for a single run.
    let spec = builder.build(Some(Scenario::AttackSoundness))?;
    let InputPolicy::Fixed { x, y } = spec.input_policy.clone() else {
        return Err(Error::input(
            "run requires --x and --y (or input_x/input_y in the config file)",
        ));
    };

    let tp = parse_tp(&args.tp, args.q)?;
    let eve: EveModel = args.eve.parse()?;
    let config: ProtocolConfig = spec.config.clone();
    let output = run_protocol(&config, &x, &y, &tp, &eve)?;

    if let Some(dir) = &args.dump_transcripts {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("run.txt"), output.transcript.render())?;
    }

    let detail = RunDetail::from_output(&output);
    let rendered = match args.common.format()? {
        OutputFormat::Text => render_run_text(&args, &config, &tp, &x, &y, &detail, &output),
        OutputFormat::Json => {
            let mut value = serde_json::json!({
                "config": config,
                "tp_strategy": tp.label(),
                "eve": args.eve,
                "input_x": x.to_string(),
                "input_y": y.to_string(),
                "detail": detail,
                "channels": output.channels,
            });
            if args.print_transcript {
                value["transcript"] = serde_json::json!(output.transcript.entries());
            }
            let mut s = serde_json::to_string_pretty(&value).expect("run report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            return Err(Error::input(
                "run emits a single-run report; use --format text or json",
            ))
        }
    };
    match args.common.out.as_deref() {
        Some(path) => fs::write(path, rendered).map_err(Error::from),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn render_run_text(
    args: &RunArgs,
    config: &ProtocolConfig,
    tp: &TpStrategy,
    x: &qpcsim_core::bits::Bits,
    y: &qpcsim_core::bits::Bits,
    detail: &RunDetail,
    output: &qpcsim_core::protocol::RunOutput,
) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "run: n={} m={} k={} seed={} hardened={} tp={} eve={}\n",
        config.n,
        config.m,
        config.k(),
        config.seed,
        config.hardened,
        tp.label(),
        args.eve
    ));
    s.push_str(&format!("inputs: x={x} y={y}\n"));
    s.push_str(&format!("status: {}\n", detail.status));
    if !detail.per_block_xor.is_empty() {
        s.push_str(&format!(
            "per-block-xor: {}\n",
            detail.per_block_xor.join(",")
        ));
    }
    if let (Some(before), Some(after)) = (&detail.counts_initial, &detail.counts_measured) {
        s.push_str(&format!("counts: initial={before} measured={after}\n"));
    }
    if let Some(verdict) = &detail.verdict {
        let witness: Vec<String> = verdict.witness.iter().map(|w| w.to_string()).collect();
        s.push_str(&format!(
            "verdict: {:?} witness={{{}}}\n",
            verdict.kind,
            witness.join(",")
        ));
    }
    if let Some(rate) = detail.tp_inconsistency_rate {
        s.push_str(&format!("tp-inconsistency-rate: {rate:.6}\n"));
    }
    for (leg, report) in [
        ("forward-bob", output.channels.forward_bob),
        ("forward-charlie", output.channels.forward_charlie),
        ("return-bob", output.channels.return_bob),
        ("return-charlie", output.channels.return_charlie),
    ] {
        if let Some(r) = report {
            s.push_str(&format!(
                "channel {leg}: errors={}/{} aborted={}\n",
                r.error_count, r.decoy_count, r.aborted
            ));
        }
    }
    if args.print_transcript {
        s.push_str("transcript:\n");
        s.push_str(&output.transcript.render());
    }
    s
}

fn parse_tp(token: &str, q: f64) -> Result<TpStrategy, Error> {
    let tp = match token {
        "honest" => TpStrategy::Honest,
        "counting" => TpStrategy::Counting { encoded_only: false },
        "counting-restricted" => TpStrategy::Counting { encoded_only: true },
        "lying" => TpStrategy::Lying { tamper_fraction: q },
        other => {
            return Err(Error::input(format!(
                "unknown third-party strategy {other:?} (expected honest, counting, counting-restricted or lying)"
            )))
        }
    };
    tp.validate()?;
    Ok(tp)
}
