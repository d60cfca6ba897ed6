//! Experiment descriptions: scenarios, input policies and the builder that
//! assembles them from config files and CLI flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::adversary::TpStrategy;
use crate::bell::BellIndex;
use crate::bits::Bits;
use crate::decoy::{EveModel, LegSet};
use crate::error::{Error, Result};
use crate::protocol::{HashScheme, ProtocolConfig};

/// The worked-example pair sequence: 8 ordered EPR pairs with counts
/// (2,1,3,2) over (phi+, phi-, psi+, psi-).
pub fn golden_fixture_states() -> Vec<BellIndex> {
    [
        "phi+", "phi+", "psi+", "psi-", "phi-", "psi+", "psi+", "psi-",
    ]
    .iter()
    .map(|s| s.parse().expect("fixture states are well-formed"))
    .collect()
}

/// The worked-example digests: H(X) = 00 01 10 11, H(Y) = 10 11 00 11.
pub fn golden_fixture_inputs() -> (Bits, Bits) {
    (
        "00011011".parse().expect("fixture digest is binary"),
        "10110011".parse().expect("fixture digest is binary"),
    )
}

/// What a batch of trials is meant to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Single run of the worked example, counting attacker in place.
    GoldenExample,
    /// Equal inputs, counting attacker: the verdict must never fire.
    AttackSoundness,
    /// Unequal inputs, counting attacker: how often the verdict fires.
    AttackPower,
    /// Hardened runs: the verdict fires on equal inputs too, voiding it.
    Countermeasure,
    /// Intercept-resend eavesdropper against the decoy checks.
    DecoyEve,
    /// Third party publishing tampered outcomes against the sampling check.
    LyingTp,
}

/// Scenarios whose headline rates measure the same quantity and can sit in
/// one comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioFamily {
    /// Counting-verdict rate.
    Counting,
    /// Channel abort rate.
    Decoy,
    /// Third-party indictment rate.
    Lying,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::GoldenExample,
        Scenario::AttackSoundness,
        Scenario::AttackPower,
        Scenario::Countermeasure,
        Scenario::DecoyEve,
        Scenario::LyingTp,
    ];

    pub fn family(&self) -> ScenarioFamily {
        match self {
            Scenario::GoldenExample
            | Scenario::AttackSoundness
            | Scenario::AttackPower
            | Scenario::Countermeasure => ScenarioFamily::Counting,
            Scenario::DecoyEve => ScenarioFamily::Decoy,
            Scenario::LyingTp => ScenarioFamily::Lying,
        }
    }

    /// What the report's headline `rate` counts.
    pub fn rate_label(&self) -> &'static str {
        match self.family() {
            ScenarioFamily::Counting => "verdict-unequal-certain",
            ScenarioFamily::Decoy => "abort",
            ScenarioFamily::Lying => "tp-cheating-detected",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::GoldenExample => "golden-example",
            Scenario::AttackSoundness => "attack-soundness",
            Scenario::AttackPower => "attack-power",
            Scenario::Countermeasure => "countermeasure",
            Scenario::DecoyEve => "decoy-eve",
            Scenario::LyingTp => "lying-tp",
        };
        f.write_str(s)
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .iter()
            .find(|sc| sc.to_string() == s)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown scenario {s:?}")))
    }
}

/// How player inputs are drawn per trial.
#[derive(Debug, Clone, PartialEq)]
pub enum InputPolicy {
    Fixed { x: Bits, y: Bits },
    RandomEqual,
    RandomUnequal,
    RandomMixed { p_equal: f64 },
}

impl fmt::Display for InputPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputPolicy::Fixed { x, y } => write!(f, "fixed({x},{y})"),
            InputPolicy::RandomEqual => f.write_str("random-equal"),
            InputPolicy::RandomUnequal => f.write_str("random-unequal"),
            InputPolicy::RandomMixed { p_equal } => write!(f, "random-mixed:{p_equal}"),
        }
    }
}

/// A fully resolved experiment: scenario, protocol parameters, trial count
/// and adversary knobs. `config.seed` is the master seed; each trial runs
/// under its own split.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub config: ProtocolConfig,
    pub trials: u64,
    pub input_policy: InputPolicy,
    /// Tamper probability for the lying third party (lying-tp scenario).
    pub tamper_fraction: f64,
    pub eve: EveModel,
    /// Keep one report row per trial.
    pub per_trial: bool,
    /// Write each trial's transcript under this directory.
    pub dump_transcripts: Option<PathBuf>,
    /// Injected initial states (the golden fixture).
    pub fixture: Option<Vec<BellIndex>>,
}

impl ExperimentSpec {
    /// A spec with the scenario's default strategy, inputs and adversaries.
    pub fn for_scenario(scenario: Scenario, config: ProtocolConfig, trials: u64) -> Self {
        let mut spec = ExperimentSpec {
            scenario,
            config,
            trials,
            input_policy: InputPolicy::RandomEqual,
            tamper_fraction: 1.0,
            eve: EveModel::None,
            per_trial: false,
            dump_transcripts: None,
            fixture: None,
        };
        match scenario {
            Scenario::GoldenExample => {
                let (x, y) = golden_fixture_inputs();
                spec.trials = 1;
                spec.config.n = 8;
                spec.config.m = 4;
                spec.config.hash_scheme = HashScheme::Identity;
                spec.config.hardened = false;
                spec.input_policy = InputPolicy::Fixed { x, y };
                spec.fixture = Some(golden_fixture_states());
            }
            Scenario::AttackSoundness => spec.input_policy = InputPolicy::RandomEqual,
            Scenario::AttackPower => spec.input_policy = InputPolicy::RandomUnequal,
            Scenario::Countermeasure => {
                spec.input_policy = InputPolicy::RandomEqual;
                spec.config.hardened = true;
            }
            Scenario::DecoyEve => {
                spec.input_policy = InputPolicy::RandomMixed { p_equal: 0.5 };
                spec.eve = EveModel::InterceptResend(LegSet::FORWARD_BOB);
            }
            Scenario::LyingTp => {
                spec.input_policy = InputPolicy::RandomMixed { p_equal: 0.5 };
            }
        }
        spec
    }

    /// The third-party strategy the scenario runs with.
    pub fn tp_strategy(&self) -> TpStrategy {
        match self.scenario {
            Scenario::GoldenExample
            | Scenario::AttackSoundness
            | Scenario::AttackPower
            | Scenario::Countermeasure => TpStrategy::COUNTING,
            Scenario::DecoyEve => TpStrategy::Honest,
            Scenario::LyingTp => TpStrategy::Lying {
                tamper_fraction: self.tamper_fraction,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.tp_strategy().validate()?;
        if self.trials == 0 {
            return Err(Error::input("an experiment needs at least one trial"));
        }
        if self.scenario == Scenario::GoldenExample {
            if self.trials != 1 {
                return Err(Error::input("the golden example is a single fixed trial"));
            }
            if !matches!(self.input_policy, InputPolicy::Fixed { .. }) {
                return Err(Error::input("the golden example requires fixed inputs"));
            }
        }
        if let InputPolicy::Fixed { x, y } = &self.input_policy {
            if self.config.hash_scheme == HashScheme::Identity
                && (x.len() != self.config.digest_len() || y.len() != self.config.digest_len())
            {
                return Err(Error::input(format!(
                    "fixed inputs must be {} bits under the identity hash, got {} and {}",
                    self.config.digest_len(),
                    x.len(),
                    y.len()
                )));
            }
        }
        if let InputPolicy::RandomMixed { p_equal } = self.input_policy {
            if !(0.0..=1.0).contains(&p_equal) {
                return Err(Error::input(format!(
                    "mixed-input equality probability must lie in [0, 1], got {p_equal}"
                )));
            }
        }
        if let Some(fixture) = &self.fixture {
            if fixture.len() != self.config.n {
                return Err(Error::input(format!(
                    "fixture provides {} states but n={}",
                    fixture.len(),
                    self.config.n
                )));
            }
        }
        Ok(())
    }
}

/// Accumulates `key = value` settings from config files and CLI flags (later
/// assignments win) and resolves them into an [`ExperimentSpec`].
#[derive(Debug, Clone, Default)]
pub struct SpecBuilder {
    scenario: Option<Scenario>,
    trials: Option<u64>,
    seed: Option<u64>,
    n: Option<usize>,
    m: Option<usize>,
    k: Option<usize>,
    decoys: Option<usize>,
    decoy_threshold: Option<f64>,
    tp_inconsistency_threshold: Option<f64>,
    hash_scheme: Option<HashScheme>,
    hardened: Option<bool>,
    input_policy: Option<String>,
    input_x: Option<Bits>,
    input_y: Option<Bits>,
    tamper_fraction: Option<f64>,
    eve: Option<EveModel>,
    per_trial: Option<bool>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::input(format!("bad value for {key}: {e}")))
}

impl SpecBuilder {
    pub fn new() -> Self {
        SpecBuilder::default()
    }

    /// Apply one setting. Keys mirror the experiment spec fields.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = Some(parse(key, value)?),
            "trials" => self.trials = Some(parse(key, value)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "n" => self.n = Some(parse(key, value)?),
            "m" => self.m = Some(parse(key, value)?),
            "k" => self.k = Some(parse(key, value)?),
            "decoys_per_transmission" | "decoys" => self.decoys = Some(parse(key, value)?),
            "decoy_threshold" => self.decoy_threshold = Some(parse(key, value)?),
            "tp_inconsistency_threshold" => {
                self.tp_inconsistency_threshold = Some(parse(key, value)?)
            }
            "hash_scheme" => self.hash_scheme = Some(parse(key, value)?),
            "hardened" => self.hardened = Some(parse(key, value)?),
            "input_policy" => self.input_policy = Some(value.to_string()),
            "input_x" => self.input_x = Some(parse(key, value)?),
            "input_y" => self.input_y = Some(parse(key, value)?),
            "tamper_fraction" => self.tamper_fraction = Some(parse(key, value)?),
            "eve" => self.eve = Some(parse(key, value)?),
            "per_trial" => self.per_trial = Some(parse(key, value)?),
            other => return Err(Error::input(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Parse a flat `key = value` config file (blank lines and `#` comments
    /// allowed).
    pub fn load_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::input(format!(
                    "config line {} is not `key = value`: {line:?}",
                    lineno + 1
                )));
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn resolve_shape(&self) -> Result<(usize, usize)> {
        let m = self.m.unwrap_or(4);
        let k = match (self.k, self.n) {
            (Some(k), _) => k,
            (None, Some(n)) => n
                .checked_sub(m)
                .ok_or_else(|| Error::input(format!("n={n} is smaller than m={m}")))?,
            (None, None) => 4,
        };
        let n = m + k;
        if let Some(explicit_n) = self.n {
            if explicit_n != n {
                return Err(Error::input(format!(
                    "inconsistent shape: n={explicit_n} but m+k={n}"
                )));
            }
        }
        Ok((n, m))
    }

    fn resolve_input_policy(&self) -> Result<Option<InputPolicy>> {
        let fixed = match (&self.input_x, &self.input_y) {
            (Some(x), Some(y)) => Some(InputPolicy::Fixed {
                x: x.clone(),
                y: y.clone(),
            }),
            (None, None) => None,
            _ => return Err(Error::input("fixed inputs need both input_x and input_y")),
        };
        let Some(token) = self.input_policy.as_deref() else {
            return Ok(fixed);
        };
        match token {
            "fixed" => fixed
                .map(Some)
                .ok_or_else(|| Error::input("input_policy=fixed needs input_x and input_y")),
            "random-equal" => Ok(Some(InputPolicy::RandomEqual)),
            "random-unequal" => Ok(Some(InputPolicy::RandomUnequal)),
            other => match other.strip_prefix("random-mixed:") {
                Some(p) => Ok(Some(InputPolicy::RandomMixed {
                    p_equal: parse("input_policy", p)?,
                })),
                None => Err(Error::input(format!("unknown input policy {other:?}"))),
            },
        }
    }

    /// Resolve into a spec; `default_scenario` applies when no `scenario`
    /// key was set (CLI subcommands pass their own).
    pub fn build(&self, default_scenario: Option<Scenario>) -> Result<ExperimentSpec> {
        let scenario = self
            .scenario
            .or(default_scenario)
            .ok_or_else(|| Error::input("no scenario selected"))?;
        let (n, m) = self.resolve_shape()?;
        let mut config = ProtocolConfig {
            n,
            m,
            ..ProtocolConfig::default()
        };
        if let Some(d) = self.decoys {
            config.decoys_per_transmission = d;
        }
        if let Some(t) = self.decoy_threshold {
            config.decoy_threshold = t;
        }
        if let Some(t) = self.tp_inconsistency_threshold {
            config.tp_inconsistency_threshold = t;
        }
        if let Some(h) = self.hash_scheme {
            config.hash_scheme = h;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }

        let mut spec = ExperimentSpec::for_scenario(scenario, config, self.trials.unwrap_or(1));
        // Scenario defaults filled in; explicit settings override them.
        if let Some(h) = self.hardened {
            spec.config.hardened = h;
        }
        if let Some(policy) = self.resolve_input_policy()? {
            if scenario != Scenario::GoldenExample {
                spec.input_policy = policy;
            }
        }
        if let Some(q) = self.tamper_fraction {
            spec.tamper_fraction = q;
        }
        if let Some(eve) = self.eve {
            spec.eve = eve;
        }
        if let Some(p) = self.per_trial {
            spec.per_trial = p;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_fixture_matches_the_worked_counts() {
        let states = golden_fixture_states();
        let counts = crate::adversary::CountsVector::from_states(states);
        assert_eq!(counts, crate::adversary::CountsVector([2, 1, 3, 2]));
    }

    #[test]
    fn scenario_round_trip_and_families() {
        for scenario in Scenario::ALL {
            assert_eq!(scenario.to_string().parse::<Scenario>().unwrap(), scenario);
        }
        assert_eq!(Scenario::AttackPower.family(), ScenarioFamily::Counting);
        assert_eq!(Scenario::DecoyEve.family(), ScenarioFamily::Decoy);
        assert!("qkd".parse::<Scenario>().is_err());
    }

    #[test]
    fn golden_spec_is_one_fixed_trial() {
        let spec =
            ExperimentSpec::for_scenario(Scenario::GoldenExample, ProtocolConfig::default(), 1);
        spec.validate().unwrap();
        assert_eq!(spec.trials, 1);
        assert!(spec.fixture.is_some());
        let mut bad = spec.clone();
        bad.trials = 2;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn builder_parses_a_flat_config_file() {
        let mut b = SpecBuilder::new();
        b.load_str(
            "# comparison experiment\n\
             scenario = attack-power\n\
             trials = 500\n\
             seed = 17\n\
             m = 2\n\
             k = 1\n\
             decoys = 4\n\
             hardened = false\n",
        )
        .unwrap();
        let spec = b.build(None).unwrap();
        assert_eq!(spec.scenario, Scenario::AttackPower);
        assert_eq!(spec.trials, 500);
        assert_eq!(spec.config.seed, 17);
        assert_eq!((spec.config.n, spec.config.m, spec.config.k()), (3, 2, 1));
        assert_eq!(spec.config.decoys_per_transmission, 4);
        assert_eq!(spec.input_policy, InputPolicy::RandomUnequal);
    }

    #[test]
    fn builder_rejects_bad_lines_and_keys() {
        let mut b = SpecBuilder::new();
        assert!(b.load_str("no equals sign").is_err());
        assert!(b.set("qubits", "8").is_err());
        assert!(b.set("trials", "many").is_err());
    }

    #[test]
    fn shape_resolution_rules() {
        let mut b = SpecBuilder::new();
        b.set("scenario", "attack-soundness").unwrap();
        assert_eq!(b.build(None).unwrap().config.n, 8);

        b.set("n", "5").unwrap();
        let spec = b.build(None).unwrap();
        assert_eq!((spec.config.n, spec.config.m, spec.config.k()), (5, 4, 1));

        b.set("m", "2").unwrap();
        b.set("k", "3").unwrap();
        assert_eq!(b.build(None).unwrap().config.n, 5);

        b.set("k", "1").unwrap();
        assert!(b.build(None).is_err()); // n=5 but m+k=3
    }

    #[test]
    fn later_settings_override_earlier_ones() {
        let mut b = SpecBuilder::new();
        b.load_str("scenario = countermeasure\ntrials = 100\nhardened = true\n")
            .unwrap();
        b.set("hardened", "false").unwrap();
        let spec = b.build(None).unwrap();
        assert_eq!(spec.scenario, Scenario::Countermeasure);
        assert!(!spec.config.hardened);
    }

    #[test]
    fn fixed_inputs_need_both_halves() {
        let mut b = SpecBuilder::new();
        b.set("scenario", "attack-soundness").unwrap();
        b.set("input_x", "0011").unwrap();
        assert!(b.build(None).is_err());
        b.set("input_y", "0000").unwrap();
        b.set("m", "2").unwrap();
        b.set("k", "1").unwrap();
        let spec = b.build(None).unwrap();
        assert!(matches!(spec.input_policy, InputPolicy::Fixed { .. }));
    }
}
