//! Dishonest non-participants and the bookkeeping of whether they got away
//! with it.
//!
//! A defecting non-participant measures Z instead of X and announces a
//! random bit. In a KeyGen round this hands it the key bit; in a
//! Verification round it randomizes the checked parity, so the round fails
//! half the time.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::noise::NoiseModel;
use crate::protocol::{run_protocol, NetworkConfig, ProtocolError, RoundType, RunOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AdversaryStrategy {
    #[default]
    Honest,
    /// Defect in every round.
    AlwaysZ,
    /// Defect in each round independently with probability `p_guess`,
    /// committed before anything about the round is learned.
    GuessKeyGen { p_guess: f64 },
}

impl AdversaryStrategy {
    pub fn kind(&self) -> &'static str {
        match self {
            AdversaryStrategy::Honest => "honest",
            AdversaryStrategy::AlwaysZ => "always_z",
            AdversaryStrategy::GuessKeyGen { .. } => "guess_keygen",
        }
    }
}

impl fmt::Display for AdversaryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryStrategy::GuessKeyGen { p_guess } => write!(f, "guess_keygen({p_guess})"),
            other => f.write_str(other.kind()),
        }
    }
}

impl FromStr for AdversaryStrategy {
    type Err = String;

    /// Parses the kind only; `guess_keygen` starts with `p_guess = 0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "honest" => Ok(AdversaryStrategy::Honest),
            "always_z" | "always_Z" => Ok(AdversaryStrategy::AlwaysZ),
            "guess_keygen" => Ok(AdversaryStrategy::GuessKeyGen { p_guess: 0.0 }),
            other => Err(format!("unknown adversary kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryAction {
    MeasureXAnnounceTrue,
    MeasureZAnnounceRandom,
}

/// Decides what a non-participant does this round.
///
/// The round type is public, but none of the modeled strategies condition
/// on it: `GuessKeyGen` draws its private guess every round, which is what
/// exposes it to Verification rounds. A zero-probability guess draws
/// nothing observable and behaves exactly like `Honest`.
pub fn adversary_act<R: Rng + ?Sized>(
    strategy: &AdversaryStrategy,
    round_type: RoundType,
    rng: &mut R,
) -> AdversaryAction {
    let _ = round_type;
    let defect = match *strategy {
        AdversaryStrategy::Honest => false,
        AdversaryStrategy::AlwaysZ => true,
        AdversaryStrategy::GuessKeyGen { p_guess } => rng.random_bool(p_guess),
    };
    if defect {
        AdversaryAction::MeasureZAnnounceRandom
    } else {
        AdversaryAction::MeasureXAnnounceTrue
    }
}

/// Per-round ground truth about one adversary, never part of any transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryEvent {
    pub round: usize,
    pub party: usize,
    pub round_type: RoundType,
    /// Z outcome when the adversary defected.
    pub defected_bit: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DetectionStats {
    pub rounds_defected: usize,
    pub verification_defections: usize,
    /// Failed Verification rounds among those the adversary defected in.
    pub verification_failures_caused: usize,
    /// Key bits learned.
    pub keygen_defections: usize,
    /// Learned bits that equal the sender's key bit.
    pub keygen_bits_matched: usize,
}

impl DetectionStats {
    /// Failure rate among defected Verification rounds.
    pub fn detection_rate(&self) -> Option<f64> {
        (self.verification_defections > 0)
            .then(|| self.verification_failures_caused as f64 / self.verification_defections as f64)
    }
}

/// Tallies the detection statistics of `party` over a finished run.
pub fn detection_stats(outcome: &RunOutcome, party: usize) -> DetectionStats {
    let mut stats = DetectionStats::default();
    for ev in outcome.adversary_log.iter().filter(|e| e.party == party) {
        let Some(bit) = ev.defected_bit else { continue };
        stats.rounds_defected += 1;
        let record = &outcome.transcript.records[ev.round];
        match ev.round_type {
            RoundType::Verification => {
                stats.verification_defections += 1;
                if record.sender_private.verdict == crate::protocol::Verdict::Fail {
                    stats.verification_failures_caused += 1;
                }
            }
            RoundType::KeyGen => {
                stats.keygen_defections += 1;
                if record.key_bit_sender == Some(bit) {
                    stats.keygen_bits_matched += 1;
                }
            }
        }
    }
    stats
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("detection experiments need exactly one adversary, found {0}")]
    AdversaryCount(usize),
    #[error("detection experiments run noiseless")]
    Noisy,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Runs `config` (one adversary, no noise) and reports how often the
/// adversary's defections were caught and what it learned.
pub fn detection_experiment(config: &NetworkConfig) -> Result<DetectionStats, DetectionError> {
    if config.adversaries.len() != 1 {
        return Err(DetectionError::AdversaryCount(config.adversaries.len()));
    }
    if config.noise != NoiseModel::Ideal {
        return Err(DetectionError::Noisy);
    }
    let party = *config.adversaries.keys().next().expect("one adversary");
    let outcome = run_protocol(config)?;
    Ok(detection_stats(&outcome, party))
}
