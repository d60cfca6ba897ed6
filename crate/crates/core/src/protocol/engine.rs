//! The five-step comparison protocol as a deterministic state machine.
//!
//! One run: the third party prepares `n` EPR pairs and sends the halves to
//! Bob and Charlie under decoy protection; after the forward eavesdropping
//! check the players encode their digest blocks on the first `m` pairs,
//! the third party announces the sampling pairs' initial states, the players
//! permute the sequence by their shared secret and return it (again under
//! decoy protection); finally the third party Bell-measures everything and
//! publishes outcomes plus initial states, the players check the sampling
//! pairs against the beforehand announcement and, if the third party holds
//! up, read the comparison result off the encoded pairs.
//!
//! All randomness flows through named ChaCha streams of the configured
//! seed, so a run is a pure function of (config, inputs, strategies) and
//! transcripts are byte-identical across repetitions.

use rand::Rng;
use serde::Serialize;

use crate::adversary::{
    counting_verdict, lying_publish, restricted_counting_verdict, AdversaryReport, CountsVector,
    TpStrategy,
};
use crate::bell::{pauli_action, recover_xor, BellIndex, PauliCode, Side};
use crate::bits::Bits;
use crate::countermeasure::{adjusted_verify_tp, apply_masks, derive_masks, MaskSchedule};
use crate::decoy::{
    eve_intercept_resend, interleave_decoys, prepare_decoys, verify_decoys, DecoyLayout,
    DecoyPhoton, EveModel, Slot, TransmissionReport,
};
use crate::error::{Error, Result};
use crate::protocol::config::{hash_input, ProtocolConfig};
use crate::protocol::ledger::{PairLedger, PairRole};
use crate::protocol::secret::SharedSecret;
use crate::protocol::transcript::{Party, Transcript};
use crate::rng::{stream, stream_rng};

/// Why a run stopped before producing a comparison result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    DecoyForward,
    DecoyReturn,
    TpCheating,
}

impl AbortReason {
    pub fn label(&self) -> &'static str {
        match self {
            AbortReason::DecoyForward => "decoy-forward",
            AbortReason::DecoyReturn => "decoy-return",
            AbortReason::TpCheating => "tp-cheating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Equal,
    Unequal,
    Aborted(AbortReason),
}

impl Status {
    pub fn label(&self) -> String {
        match self {
            Status::Equal => "equal".into(),
            Status::Unequal => "unequal".into(),
            Status::Aborted(reason) => format!("aborted:{}", reason.label()),
        }
    }
}

/// The players' result: equal/unequal plus the recovered per-block code
/// XORs, or an abort. `per_block_xor` is empty exactly when aborted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonOutcome {
    pub status: Status,
    pub per_block_xor: Vec<PauliCode>,
}

impl ComparisonOutcome {
    fn aborted(reason: AbortReason) -> Self {
        ComparisonOutcome {
            status: Status::Aborted(reason),
            per_block_xor: Vec::new(),
        }
    }
}

/// Decoy verification reports for the four channel crossings, in protocol
/// order. Legs the run never reached stay empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChannelReports {
    pub forward_bob: Option<TransmissionReport>,
    pub forward_charlie: Option<TransmissionReport>,
    pub return_bob: Option<TransmissionReport>,
    pub return_charlie: Option<TransmissionReport>,
}

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub outcome: ComparisonOutcome,
    pub transcript: Transcript,
    pub adversary: AdversaryReport,
    pub channels: ChannelReports,
    /// Sampling-pair inconsistency rate seen by the players; empty when the
    /// run aborted before the third party published anything.
    pub tp_inconsistency_rate: Option<f64>,
    pub ledger: Vec<PairLedger>,
}

/// Execute a full run with freshly drawn initial states.
pub fn run_protocol(
    config: &ProtocolConfig,
    input_x: &Bits,
    input_y: &Bits,
    tp_strategy: &TpStrategy,
    eve: &EveModel,
) -> Result<RunOutput> {
    run_protocol_with_states(config, input_x, input_y, tp_strategy, eve, None)
}

/// Execute a full run, optionally injecting the initial Bell states (used by
/// the worked-example fixture and exhaustive sweeps).
pub fn run_protocol_with_states(
    config: &ProtocolConfig,
    input_x: &Bits,
    input_y: &Bits,
    tp_strategy: &TpStrategy,
    eve: &EveModel,
    initial_states: Option<&[BellIndex]>,
) -> Result<RunOutput> {
    let engine = Engine::new(config, input_x, input_y, tp_strategy, eve, initial_states)?;
    Ok(engine.run())
}

/// One flying envelope plus the sender-side decoy bookkeeping.
struct Envelope {
    slots: Vec<Slot>,
    layout: DecoyLayout,
    prepared_decoys: Vec<DecoyPhoton>,
}

struct Engine<'a> {
    config: &'a ProtocolConfig,
    tp: &'a TpStrategy,
    eve: &'a EveModel,
    secret: SharedSecret,
    digest_b: Bits,
    digest_c: Bits,
    masks: Option<MaskSchedule>,
    ledger: Vec<PairLedger>,
    /// True physical state of each pair, by original index.
    states: Vec<BellIndex>,
    transcript: Transcript,
    channels: ChannelReports,
    counts_initial: Option<CountsVector>,
    rng_eve: rand_chacha::ChaCha8Rng,
    rng_verify: rand_chacha::ChaCha8Rng,
}

impl<'a> Engine<'a> {
    fn new(
        config: &'a ProtocolConfig,
        input_x: &Bits,
        input_y: &Bits,
        tp: &'a TpStrategy,
        eve: &'a EveModel,
        initial_states: Option<&[BellIndex]>,
    ) -> Result<Self> {
        config.validate()?;
        tp.validate()?;
        let digest_b = hash_input(input_x, config.hash_scheme, config.m)?;
        let digest_c = hash_input(input_y, config.hash_scheme, config.m)?;

        let secret_material = config
            .shared_secret_override
            .unwrap_or_else(|| stream_rng(config.seed, stream::SECRET).gen::<u64>());
        let secret = SharedSecret::new(secret_material);

        let states: Vec<BellIndex> = match initial_states {
            Some(fixture) => {
                if fixture.len() != config.n {
                    return Err(Error::input(format!(
                        "fixture provides {} initial states but the run needs n={}",
                        fixture.len(),
                        config.n
                    )));
                }
                fixture.to_vec()
            }
            None => {
                let mut rng = stream_rng(config.seed, stream::TP_PREPARE);
                (0..config.n)
                    .map(|_| BellIndex::from_index(rng.gen_range(0..4)))
                    .collect()
            }
        };

        let ledger = states
            .iter()
            .enumerate()
            .map(|(i, &initial)| {
                let role = if i < config.m {
                    PairRole::Encoded
                } else {
                    PairRole::Sampling
                };
                PairLedger::new(i, initial, role)
            })
            .collect();

        Ok(Engine {
            config,
            tp,
            eve,
            secret,
            digest_b,
            digest_c,
            masks: None,
            ledger,
            states,
            transcript: Transcript::new(),
            channels: ChannelReports::default(),
            counts_initial: None,
            rng_eve: stream_rng(config.seed, stream::EVE),
            rng_verify: stream_rng(config.seed, stream::VERIFY),
        })
    }

    fn run(mut self) -> RunOutput {
        // The shared secret travels out of band between the players; the
        // third party never sees this entry.
        self.transcript.record(
            "setup",
            Party::Bob,
            Party::Charlie,
            "shared-secret",
            &format!("secret:{:016x}", self.secret.value()),
        );

        let (mut envelope_b, mut envelope_c) = self.step2_prepare();

        if let Err(reason) = self.step3_check_forward(&mut envelope_b, &mut envelope_c) {
            return self.finish(ComparisonOutcome::aborted(reason), None);
        }

        let (mut return_b, mut return_c, announcement) = self.step4_encode_insert();

        match self.step5_measure_verify(&mut return_b, &mut return_c, &announcement) {
            Err((reason, rate)) => self.finish(ComparisonOutcome::aborted(reason), rate),
            Ok((published_wire, published_initials, rate)) => {
                let outcome = self.derive_result(&published_wire, &published_initials);
                self.finish(outcome, Some(rate))
            }
        }
    }

    /// Prepare the pair sequence and both decoy-laden forward envelopes.
    fn step2_prepare(&mut self) -> (Envelope, Envelope) {
        if matches!(self.tp, TpStrategy::Counting { .. }) {
            self.counts_initial = Some(CountsVector::from_states(self.states.iter().copied()));
        }
        let payload: Vec<usize> = (0..self.config.n).collect();
        let envelope_b = self.make_envelope(&payload, stream::TP_DECOY_BOB);
        let envelope_c = self.make_envelope(&payload, stream::TP_DECOY_CHARLIE);
        self.record_quantum(
            "prepare",
            Party::Tp,
            Party::Bob,
            "quantum-forward",
            &envelope_b.slots,
        );
        self.record_quantum(
            "prepare",
            Party::Tp,
            Party::Charlie,
            "quantum-forward",
            &envelope_c.slots,
        );
        (envelope_b, envelope_c)
    }

    /// Disturb (if an eavesdropper sits on the leg), strip and verify both
    /// forward transmissions.
    fn step3_check_forward(
        &mut self,
        envelope_b: &mut Envelope,
        envelope_c: &mut Envelope,
    ) -> std::result::Result<(), AbortReason> {
        if self.eve.attacks_forward_bob() {
            eve_intercept_resend(&mut envelope_b.slots, &mut self.states, &mut self.rng_eve);
        }
        if self.eve.attacks_forward_charlie() {
            eve_intercept_resend(&mut envelope_c.slots, &mut self.states, &mut self.rng_eve);
        }
        let report_b = self.check_leg(envelope_b, "forward-check", Party::Tp, Party::Bob);
        let report_c = self.check_leg(envelope_c, "forward-check", Party::Tp, Party::Charlie);
        self.channels.forward_bob = Some(report_b);
        self.channels.forward_charlie = Some(report_c);
        if report_b.aborted || report_c.aborted {
            return Err(AbortReason::DecoyForward);
        }
        Ok(())
    }

    /// Encode the digests, announce the sampling initials, mask (hardened),
    /// permute and build the return envelopes.
    fn step4_encode_insert(&mut self) -> (Envelope, Envelope, Vec<BellIndex>) {
        // Beforehand announcement: sampling initials in original order.
        let announcement: Vec<BellIndex> = self.ledger[self.config.m..]
            .iter()
            .map(|p| p.initial)
            .collect();
        self.transcript.record(
            "announce-sampling",
            Party::Tp,
            Party::All,
            "sampling-initials",
            &describe_states(&announcement),
        );

        let blocks_b = self.digest_b.blocks();
        let blocks_c = self.digest_c.blocks();
        for i in 0..self.config.m {
            self.states[i] = pauli_action(blocks_b[i], Side::Bob, self.states[i]);
            self.states[i] = pauli_action(blocks_c[i], Side::Charlie, self.states[i]);
            self.ledger[i].code_b = Some(blocks_b[i]);
            self.ledger[i].code_c = Some(blocks_c[i]);
        }

        if self.config.hardened {
            let schedule = derive_masks(&self.secret, self.config.k());
            apply_masks(&mut self.ledger, &mut self.states, &schedule)
                .expect("schedule length is k by construction");
            self.masks = Some(schedule);
        }

        // The secret insertion permutation, shared by both players.
        let wire_of = self.secret.permutation(self.config.n);
        for (original, &position) in wire_of.iter().enumerate() {
            self.ledger[original].permuted_position = position;
        }
        let mut wire_order = vec![0usize; self.config.n];
        for (original, &position) in wire_of.iter().enumerate() {
            wire_order[position] = original;
        }

        let return_b = self.make_envelope(&wire_order, stream::BOB_DECOY);
        let return_c = self.make_envelope(&wire_order, stream::CHARLIE_DECOY);
        self.record_quantum(
            "return",
            Party::Bob,
            Party::Tp,
            "quantum-return",
            &return_b.slots,
        );
        self.record_quantum(
            "return",
            Party::Charlie,
            Party::Tp,
            "quantum-return",
            &return_c.slots,
        );
        (return_b, return_c, announcement)
    }

    /// Return-leg checks, Bell measurement, publication and the players'
    /// third-party honesty check.
    #[allow(clippy::type_complexity)]
    fn step5_measure_verify(
        &mut self,
        return_b: &mut Envelope,
        return_c: &mut Envelope,
        announcement: &[BellIndex],
    ) -> std::result::Result<(Vec<BellIndex>, Vec<BellIndex>, f64), (AbortReason, Option<f64>)>
    {
        if self.eve.attacks_return_bob() {
            eve_intercept_resend(&mut return_b.slots, &mut self.states, &mut self.rng_eve);
        }
        if self.eve.attacks_return_charlie() {
            eve_intercept_resend(&mut return_c.slots, &mut self.states, &mut self.rng_eve);
        }
        let report_b = self.check_leg(return_b, "return-check", Party::Bob, Party::Tp);
        let report_c = self.check_leg(return_c, "return-check", Party::Charlie, Party::Tp);
        self.channels.return_bob = Some(report_b);
        self.channels.return_charlie = Some(report_c);
        if report_b.aborted || report_c.aborted {
            return Err((AbortReason::DecoyReturn, None));
        }

        // Bell measurement is deterministic here: every pair is in an exact
        // Bell state, only its identity may have drifted under interception.
        let wire_order: Vec<usize> = {
            let mut order = vec![0usize; self.config.n];
            for pair in &self.ledger {
                order[pair.permuted_position] = pair.original_index;
            }
            order
        };
        for pair in self.ledger.iter_mut() {
            pair.measured = Some(self.states[pair.original_index]);
        }
        let true_outcomes_wire: Vec<BellIndex> =
            wire_order.iter().map(|&i| self.states[i]).collect();

        let published_wire = match self.tp {
            TpStrategy::Lying { tamper_fraction } => {
                let mut rng = stream_rng(self.config.seed, stream::TP_LIES);
                lying_publish(&true_outcomes_wire, *tamper_fraction, &mut rng)
            }
            _ => true_outcomes_wire,
        };
        let published_initials: Vec<BellIndex> = self.ledger.iter().map(|p| p.initial).collect();
        self.transcript.record(
            "publish",
            Party::Tp,
            Party::All,
            "measured-outcomes",
            &describe_states(&published_wire),
        );
        self.transcript.record(
            "publish",
            Party::Tp,
            Party::All,
            "initial-states",
            &describe_states(&published_initials),
        );

        // Players check the sampling pairs against the beforehand
        // announcement, mask-adjusted in hardened runs.
        let sampling_positions: Vec<usize> = self.ledger[self.config.m..]
            .iter()
            .map(|p| p.permuted_position)
            .collect();
        let rate = adjusted_verify_tp(
            &published_wire,
            announcement,
            self.masks.as_ref(),
            &sampling_positions,
        )
        .expect("announcement, schedule and positions all have length k");
        self.transcript.record(
            "tp-check",
            Party::Bob,
            Party::Charlie,
            "sampling-consistency",
            &format!("inconsistency-rate:{rate:.6}"),
        );
        if rate > self.config.tp_inconsistency_threshold {
            return Err((AbortReason::TpCheating, Some(rate)));
        }
        Ok((published_wire, published_initials, rate))
    }

    /// Read the per-block code XORs off the encoded pairs and decide
    /// equal/unequal.
    fn derive_result(
        &mut self,
        published_wire: &[BellIndex],
        published_initials: &[BellIndex],
    ) -> ComparisonOutcome {
        let per_block_xor: Vec<PauliCode> = (0..self.config.m)
            .map(|i| {
                let measured = published_wire[self.ledger[i].permuted_position];
                recover_xor(published_initials[i], measured)
            })
            .collect();
        let status = if per_block_xor.iter().all(|code| code.is_identity()) {
            Status::Equal
        } else {
            Status::Unequal
        };
        self.transcript.record(
            "result",
            Party::Bob,
            Party::Charlie,
            "comparison-outcome",
            &status.label(),
        );
        ComparisonOutcome {
            status,
            per_block_xor,
        }
    }

    fn finish(self, outcome: ComparisonOutcome, tp_rate: Option<f64>) -> RunOutput {
        let adversary = self.adversary_report();
        RunOutput {
            outcome,
            transcript: self.transcript,
            adversary,
            channels: self.channels,
            tp_inconsistency_rate: tp_rate,
            ledger: self.ledger,
        }
    }

    /// Post-protocol hook: the counting attacker compares his two vectors.
    fn adversary_report(&self) -> AdversaryReport {
        let TpStrategy::Counting { encoded_only } = *self.tp else {
            return AdversaryReport::inactive(self.tp);
        };
        let counts_initial = self.counts_initial;
        let measured: Option<Vec<BellIndex>> = self.ledger.iter().map(|p| p.measured).collect();
        let counts_measured = measured.map(CountsVector::from_states);
        let verdict = match (&counts_initial, &counts_measured) {
            (Some(before), Some(after)) => {
                if encoded_only {
                    let encoded = CountsVector::from_states(
                        self.ledger[..self.config.m].iter().map(|p| p.initial),
                    );
                    let sampling = CountsVector::from_states(
                        self.ledger[self.config.m..].iter().map(|p| p.initial),
                    );
                    Some(restricted_counting_verdict(&encoded, &sampling, after))
                } else {
                    Some(counting_verdict(before, after).expect("both vectors count n pairs"))
                }
            }
            _ => None,
        };
        AdversaryReport {
            strategy: self.tp.label(),
            counts_initial,
            counts_measured,
            verdict,
        }
    }

    fn make_envelope(&self, payload: &[usize], decoy_stream: u64) -> Envelope {
        let mut rng = stream_rng(self.config.seed, decoy_stream);
        let prepared_decoys = prepare_decoys(self.config.decoys_per_transmission, &mut rng);
        let layout = interleave_decoys(payload.len(), prepared_decoys.len(), &mut rng);
        let slots = layout.assemble(payload, &prepared_decoys);
        Envelope {
            slots,
            layout,
            prepared_decoys,
        }
    }

    /// Strip an envelope, verify its decoys and log the classical exchange.
    fn check_leg(
        &mut self,
        envelope: &Envelope,
        step: &'static str,
        sender: Party,
        receiver: Party,
    ) -> TransmissionReport {
        let (_, received) = envelope
            .layout
            .strip(&envelope.slots)
            .expect("envelope was assembled from this layout");
        let report = verify_decoys(
            &received,
            &envelope.prepared_decoys,
            self.config.decoy_threshold,
            &mut self.rng_verify,
        )
        .expect("prepared and received decoy counts match");
        self.transcript.record(
            step,
            sender,
            receiver,
            "decoy-announce",
            &describe_decoys(envelope.layout.positions(), &envelope.prepared_decoys),
        );
        self.transcript.record(
            step,
            receiver,
            sender,
            "decoy-report",
            &format!(
                "errors:{}/{} aborted:{}",
                report.error_count, report.decoy_count, report.aborted
            ),
        );
        report
    }

    fn record_quantum(
        &mut self,
        step: &'static str,
        sender: Party,
        receiver: Party,
        kind: &'static str,
        slots: &[Slot],
    ) {
        let description = describe_slots(slots);
        self.transcript
            .record(step, sender, receiver, kind, &description);
    }
}

fn describe_slots(slots: &[Slot]) -> String {
    let parts: Vec<String> = slots
        .iter()
        .map(|slot| match slot {
            Slot::Pair(i) => format!("P{i}"),
            Slot::Decoy(p) => format!("D{:?}{}", p.basis, p.bit as u8),
        })
        .collect();
    parts.join(",")
}

fn describe_states(states: &[BellIndex]) -> String {
    let parts: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    parts.join(",")
}

fn describe_decoys(positions: &[usize], decoys: &[DecoyPhoton]) -> String {
    let parts: Vec<String> = positions
        .iter()
        .zip(decoys)
        .map(|(pos, p)| format!("{pos}:{:?}{}", p.basis, p.bit as u8))
        .collect();
    parts.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::VerdictKind;
    use crate::decoy::LegSet;

    pub(crate) fn fixture_states() -> Vec<BellIndex> {
        [
            "phi+", "phi+", "psi+", "psi-", "phi-", "psi+", "psi+", "psi-",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
    }

    fn fixture_inputs() -> (Bits, Bits) {
        ("00011011".parse().unwrap(), "10110011".parse().unwrap())
    }

    fn config(seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            seed,
            ..ProtocolConfig::default()
        }
    }

    #[test]
    fn worked_example_end_to_end() {
        let (x, y) = fixture_inputs();
        let out = run_protocol_with_states(
            &config(1),
            &x,
            &y,
            &TpStrategy::COUNTING,
            &EveModel::None,
            Some(&fixture_states()),
        )
        .unwrap();

        assert_eq!(
            out.adversary.counts_initial.unwrap(),
            CountsVector([2, 1, 3, 2])
        );
        assert_eq!(
            out.adversary.counts_measured.unwrap(),
            CountsVector([1, 1, 4, 2])
        );
        let verdict = out.adversary.verdict.unwrap();
        assert_eq!(verdict.kind, VerdictKind::UnequalCertain);
        assert_eq!(verdict.witness, vec![1, 3]);

        assert_eq!(out.outcome.status, Status::Unequal);
        let expected_blocks: Vec<PauliCode> =
            [(true, false), (true, false), (true, false), (false, false)]
                .iter()
                .map(|&(x, z)| PauliCode::new(x, z))
                .collect();
        assert_eq!(out.outcome.per_block_xor, expected_blocks);

        // Encoded pairs ended in the states the combined codes dictate.
        let measured: Vec<BellIndex> = out.ledger[..4]
            .iter()
            .map(|p| p.measured.unwrap())
            .collect();
        let expected: Vec<BellIndex> = ["psi+", "psi+", "phi+", "psi-"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(measured, expected);

        assert_eq!(out.tp_inconsistency_rate, Some(0.0));
        assert!(!out.channels.forward_bob.unwrap().aborted);
        assert!(!out.channels.return_charlie.unwrap().aborted);
    }

    #[test]
    fn equal_inputs_compare_equal_and_leave_counts_alone() {
        let x: Bits = "01101001".parse().unwrap();
        let out = run_protocol(&config(7), &x, &x, &TpStrategy::COUNTING, &EveModel::None).unwrap();
        assert_eq!(out.outcome.status, Status::Equal);
        assert!(out.outcome.per_block_xor.iter().all(|c| c.is_identity()));
        let verdict = out.adversary.verdict.unwrap();
        assert_eq!(verdict.kind, VerdictKind::Inconclusive);
        assert_eq!(
            out.adversary.counts_initial.unwrap(),
            out.adversary.counts_measured.unwrap()
        );
    }

    #[test]
    fn sampling_pairs_keep_their_states_in_baseline_runs() {
        let x: Bits = "11001010".parse().unwrap();
        let y: Bits = "00111100".parse().unwrap();
        for seed in 0..20 {
            let out =
                run_protocol(&config(seed), &x, &y, &TpStrategy::Honest, &EveModel::None).unwrap();
            for pair in &out.ledger[4..] {
                assert_eq!(pair.role, PairRole::Sampling);
                assert_eq!(pair.measured, Some(pair.initial));
                assert!(pair.code_b.is_none() && pair.code_c.is_none() && pair.mask.is_none());
            }
        }
    }

    #[test]
    fn ledger_permutation_is_a_bijection() {
        let x: Bits = "01101001".parse().unwrap();
        let out = run_protocol(&config(13), &x, &x, &TpStrategy::Honest, &EveModel::None).unwrap();
        let mut positions: Vec<usize> = out.ledger.iter().map(|p| p.permuted_position).collect();
        positions.sort_unstable();
        assert_eq!(positions, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn identical_runs_yield_byte_identical_transcripts() {
        let (x, y) = fixture_inputs();
        let a = run_protocol(&config(99), &x, &y, &TpStrategy::COUNTING, &EveModel::None).unwrap();
        let b = run_protocol(&config(99), &x, &y, &TpStrategy::COUNTING, &EveModel::None).unwrap();
        assert_eq!(a.transcript.render(), b.transcript.render());
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn counting_attacker_leaves_no_trace_in_the_transcript() {
        let (x, y) = fixture_inputs();
        let honest =
            run_protocol(&config(5), &x, &y, &TpStrategy::Honest, &EveModel::None).unwrap();
        let counting =
            run_protocol(&config(5), &x, &y, &TpStrategy::COUNTING, &EveModel::None).unwrap();
        assert_eq!(honest.transcript.render(), counting.transcript.render());
        assert_eq!(honest.outcome, counting.outcome);
    }

    #[test]
    fn lying_tp_with_full_tampering_is_always_caught() {
        let (x, y) = fixture_inputs();
        for seed in 0..10 {
            let out = run_protocol(
                &config(seed),
                &x,
                &y,
                &TpStrategy::Lying {
                    tamper_fraction: 1.0,
                },
                &EveModel::None,
            )
            .unwrap();
            assert_eq!(out.outcome.status, Status::Aborted(AbortReason::TpCheating));
            assert!(out.outcome.per_block_xor.is_empty());
        }
    }

    #[test]
    fn lying_tp_with_zero_tampering_is_never_caught() {
        let (x, y) = fixture_inputs();
        let out = run_protocol(
            &config(3),
            &x,
            &y,
            &TpStrategy::Lying {
                tamper_fraction: 0.0,
            },
            &EveModel::None,
        )
        .unwrap();
        assert_eq!(out.outcome.status, Status::Unequal);
    }

    #[test]
    fn eve_without_decoys_is_never_caught_at_the_decoy_stage() {
        let (x, y) = fixture_inputs();
        let cfg = ProtocolConfig {
            decoys_per_transmission: 0,
            seed: 4,
            ..ProtocolConfig::default()
        };
        let out = run_protocol(
            &cfg,
            &x,
            &y,
            &TpStrategy::Honest,
            &EveModel::InterceptResend(LegSet::FORWARD),
        )
        .unwrap();
        assert!(!out.channels.forward_bob.unwrap().aborted);
        assert!(!out.channels.forward_charlie.unwrap().aborted);
        assert_eq!(out.channels.forward_bob.unwrap().decoy_count, 0);
    }

    #[test]
    fn input_errors_surface_before_any_step_runs() {
        let (x, y) = fixture_inputs();
        let short: Bits = "0001".parse().unwrap();
        assert!(matches!(
            run_protocol(&config(0), &short, &y, &TpStrategy::Honest, &EveModel::None),
            Err(Error::Input(_))
        ));
        let bad_fixture = [BellIndex::PHI_PLUS; 3];
        assert!(matches!(
            run_protocol_with_states(
                &config(0),
                &x,
                &y,
                &TpStrategy::Honest,
                &EveModel::None,
                Some(&bad_fixture)
            ),
            Err(Error::Input(_))
        ));
        let bad_cfg = ProtocolConfig {
            m: 8,
            ..ProtocolConfig::default()
        };
        assert!(matches!(
            run_protocol(&bad_cfg, &x, &y, &TpStrategy::Honest, &EveModel::None),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn hardened_run_masks_sampling_pairs_and_passes_the_adjusted_check() {
        let x: Bits = "01101001".parse().unwrap();
        let cfg = ProtocolConfig {
            hardened: true,
            seed: 21,
            ..ProtocolConfig::default()
        };
        let out = run_protocol(&cfg, &x, &x, &TpStrategy::Honest, &EveModel::None).unwrap();
        assert_eq!(out.outcome.status, Status::Equal);
        assert_eq!(out.tp_inconsistency_rate, Some(0.0));
        for pair in &out.ledger[4..] {
            let mask = pair.mask.expect("hardened sampling pairs carry masks");
            assert_eq!(
                pair.measured,
                Some(pauli_action(mask, Side::Bob, pair.initial))
            );
        }
        for pair in &out.ledger[..4] {
            assert!(pair.mask.is_none());
        }
    }
}
