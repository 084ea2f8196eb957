//! The anonymous conference key agreement engine.
//!
//! A run notifies the participants once, then repeats `L` rounds: a GHZ_n
//! state is distributed (with noise), the non-participants measure X, and
//! the public 1/D-biased source decides whether the sender and
//! participants generate a key bit (KeyGen) or test the extracted state
//! (Verification).

pub mod anonymity;
mod config;
pub mod notify;
pub mod oracle;
mod rounds;
mod run;
pub mod transcript;

pub use anonymity::{anonymity_statistics, compare_marginals, AnonymityError, AnonymityReport, Slot};
pub use config::{AnnouncementPolicy, ConfigError, NetworkConfig, PhaseCorrection, Role, Roles};
pub use notify::{notify, NotificationShares};
pub use rounds::{
    extract_with_outcomes, run_extraction, run_keygen_round, run_verification_round, schedule_round,
    verification_verdict, Extraction, KeyBits, RoundType, VerificationOutcome,
};
pub use run::{abort_threshold, accept_key, expected_failure_rate, run_protocol, ProtocolError, RunOutcome};
pub use transcript::{
    Announcement, AnnouncementPayload, Counts, PrivateTranscript, PublicTranscript, RoundRecord, Transcript,
    TranscriptError, Verdict,
};
