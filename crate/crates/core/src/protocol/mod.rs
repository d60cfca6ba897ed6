//! The five-step comparison protocol: configuration, per-party knowledge,
//! the deterministic engine, and its audit surfaces (ledger + transcript).

pub mod config;
pub mod engine;
pub mod ledger;
pub mod secret;
pub mod transcript;

pub use config::{hash_input, HashScheme, PlayerInput, ProtocolConfig};
pub use engine::{
    run_protocol, run_protocol_with_states, AbortReason, ChannelReports, ComparisonOutcome,
    RunOutput, Status,
};
pub use ledger::{PairLedger, PairRole};
pub use secret::SharedSecret;
pub use transcript::{Party, Transcript, TranscriptEntry};
