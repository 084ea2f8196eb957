use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::adversary::AdversaryStrategy;
use crate::noise::{NoiseError, NoiseModel};
use crate::qsim::{PauliBasis, MAX_PURE_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("party count {0} outside 3..=12")]
    PartyCount(usize),
    #[error("party index {party} out of range for {n} parties")]
    PartyIndex { party: usize, n: usize },
    #[error("at least one participant is required")]
    NoParticipants,
    #[error("the sender ({0}) cannot also be a participant")]
    SenderIsParticipant(usize),
    #[error("participant {0} listed twice")]
    DuplicateParticipant(usize),
    #[error("security parameter D = {0} must be at least 2")]
    SecurityParameter(f64),
    #[error("round count L must be at least 1")]
    NoRounds,
    #[error("adversary {0} is not a non-participant")]
    AdversaryRole(usize),
    #[error("guess probability {0} outside [0, 1]")]
    GuessProbability(f64),
    #[error("fixed settings need exactly one X/Y basis per participant ({expected}), got {got:?}")]
    FixedSettings { expected: usize, got: Vec<PauliBasis> },
    #[error("abort threshold {0} outside [0, 1]")]
    AbortThreshold(f64),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Who plays which part in the network. Participants are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Roles {
    n: usize,
    sender: usize,
    participants: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Sender,
    Participant,
    NonParticipant,
}

impl Roles {
    /// Accepts any `n ≥ 2`, so that sub-networks without non-participants
    /// can be built; full protocol runs additionally need `n ≥ 3`.
    pub fn new(n: usize, sender: usize, participants: &[usize]) -> Result<Self, ConfigError> {
        if !(2..=MAX_PURE_QUBITS).contains(&n) {
            return Err(ConfigError::PartyCount(n));
        }
        if sender >= n {
            return Err(ConfigError::PartyIndex { party: sender, n });
        }
        if participants.is_empty() {
            return Err(ConfigError::NoParticipants);
        }
        let mut sorted = participants.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(ConfigError::DuplicateParticipant(w[0]));
            }
        }
        for &p in &sorted {
            if p >= n {
                return Err(ConfigError::PartyIndex { party: p, n });
            }
            if p == sender {
                return Err(ConfigError::SenderIsParticipant(p));
            }
        }
        Ok(Roles {
            n,
            sender,
            participants: sorted,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sender(&self) -> usize {
        self.sender
    }

    pub fn participants(&self) -> &[usize] {
        &self.participants
    }

    /// Number of participants (excluding the sender).
    pub fn m(&self) -> usize {
        self.participants.len()
    }

    pub fn role_of(&self, party: usize) -> Role {
        if party == self.sender {
            Role::Sender
        } else if self.participants.binary_search(&party).is_ok() {
            Role::Participant
        } else {
            Role::NonParticipant
        }
    }

    pub fn non_participants(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&p| self.role_of(p) == Role::NonParticipant)
            .collect()
    }

    /// Sender and participants in ascending party order; this is also the
    /// qubit order of the extracted state.
    pub fn key_parties(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&p| self.role_of(p) != Role::NonParticipant)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnouncementPolicy {
    /// Extraction outcomes are announced in Verification rounds only.
    #[default]
    VerificationOnly,
    EveryRound,
}

impl fmt::Display for AnnouncementPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnnouncementPolicy::VerificationOnly => "verification_only",
            AnnouncementPolicy::EveryRound => "every_round",
        })
    }
}

impl FromStr for AnnouncementPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verification_only" => Ok(AnnouncementPolicy::VerificationOnly),
            "every_round" => Ok(AnnouncementPolicy::EveryRound),
            other => Err(format!("unknown announcement policy `{other}`")),
        }
    }
}

/// How the sender cancels the (−1)^Δ phase of the extracted state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseCorrection {
    /// Fold Δ into the expected verification parity.
    #[default]
    Classical,
    /// Apply Z to the sender's qubit when Δ = 1.
    PauliZ,
}

impl fmt::Display for PhaseCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseCorrection::Classical => "classical",
            PhaseCorrection::PauliZ => "pauli_z",
        })
    }
}

impl FromStr for PhaseCorrection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classical" => Ok(PhaseCorrection::Classical),
            "pauli_z" => Ok(PhaseCorrection::PauliZ),
            other => Err(format!("unknown phase correction `{other}`")),
        }
    }
}

/// Everything needed to run the protocol deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub roles: Roles,
    /// Security parameter; each round is KeyGen with probability 1/D.
    pub d: f64,
    /// Total number of rounds L.
    pub rounds: usize,
    pub policy: AnnouncementPolicy,
    pub noise: NoiseModel,
    pub adversaries: BTreeMap<usize, AdversaryStrategy>,
    pub seed: u64,
    pub phase_correction: PhaseCorrection,
    /// Replays one participant basis pattern in every Verification round.
    pub fixed_settings: Option<Vec<PauliBasis>>,
    /// Maximum tolerated verification failure rate; `None` uses the
    /// noise-derived default.
    pub abort_threshold: Option<f64>,
}

impl NetworkConfig {
    pub fn new(roles: Roles, d: f64, rounds: usize, seed: u64) -> Self {
        NetworkConfig {
            roles,
            d,
            rounds,
            policy: AnnouncementPolicy::default(),
            noise: NoiseModel::Ideal,
            adversaries: BTreeMap::new(),
            seed,
            phase_correction: PhaseCorrection::default(),
            fixed_settings: None,
            abort_threshold: None,
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_adversary(mut self, party: usize, strategy: AdversaryStrategy) -> Self {
        self.adversaries.insert(party, strategy);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.roles.n();
        if n < 3 {
            return Err(ConfigError::PartyCount(n));
        }
        if self.d.is_nan() || self.d < 2.0 {
            return Err(ConfigError::SecurityParameter(self.d));
        }
        if self.rounds == 0 {
            return Err(ConfigError::NoRounds);
        }
        for (&party, strategy) in &self.adversaries {
            if party >= n || self.roles.role_of(party) != Role::NonParticipant {
                return Err(ConfigError::AdversaryRole(party));
            }
            if let AdversaryStrategy::GuessKeyGen { p_guess } = *strategy {
                if !(0.0..=1.0).contains(&p_guess) {
                    return Err(ConfigError::GuessProbability(p_guess));
                }
            }
        }
        if let Some(bases) = &self.fixed_settings {
            if bases.len() != self.roles.m() || bases.contains(&PauliBasis::Z) {
                return Err(ConfigError::FixedSettings {
                    expected: self.roles.m(),
                    got: bases.clone(),
                });
            }
        }
        if let Some(t) = self.abort_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(ConfigError::AbortThreshold(t));
            }
        }
        self.noise.p_mix(n)?;
        Ok(())
    }
}
