use std::collections::BTreeMap;

use thiserror::Error;

use super::config::{AnnouncementPolicy, ConfigError, NetworkConfig};
use super::notify::notify;
use super::rounds::{run_extraction, run_keygen_round, run_verification_round, schedule_round, RoundType};
use super::transcript::{Counts, PrivateHeader, PublicHeader, RoundRecord, SenderPrivate, Transcript, Verdict};
use crate::adversary::{adversary_act, AdversaryEvent};
use crate::noise::calibrate_white_noise;
use crate::qsim::{sample_noisy_state, PureState, SimError};
use crate::seeds::{stream, stream_rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
}

/// Everything a run produces, including ground truth no party would see.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub transcript: Transcript,
    /// What each party learned from the notification step.
    pub notifications: Vec<bool>,
    pub sender_key: Vec<u8>,
    /// One key per participant, in ascending participant order.
    pub participant_keys: Vec<Vec<u8>>,
    pub adversary_log: Vec<AdversaryEvent>,
}

/// Notification, then `L` rounds of distribute → noise → extraction →
/// KeyGen or Verification. Fully determined by `config.seed`.
pub fn run_protocol(config: &NetworkConfig) -> Result<RunOutcome, ProtocolError> {
    config.validate()?;
    let roles = &config.roles;
    let n = roles.n();
    let p_mix = config.noise.p_mix(n).map_err(ConfigError::from)?;
    let ghz = PureState::ghz(n)?;

    let mut public = stream_rng(config.seed, stream::PUBLIC);
    let mut nature = stream_rng(config.seed, stream::NATURE);
    let mut notify_rng = stream_rng(config.seed, stream::NOTIFY);
    let mut adversary_rng = stream_rng(config.seed, stream::ADVERSARY);
    let mut parties: Vec<_> = (0..n)
        .map(|p| stream_rng(config.seed, stream::PARTY_BASE + p as u64))
        .collect();

    let notifications = notify(roles, &mut notify_rng);

    let mut records = Vec::with_capacity(config.rounds);
    let mut sender_key = Vec::new();
    let mut participant_keys = vec![Vec::new(); roles.m()];
    let mut adversary_log = Vec::new();

    for index in 0..config.rounds {
        let round_type = schedule_round(config.d, &mut public);
        let state = sample_noisy_state(&ghz, p_mix, &mut nature)?;
        let actions: BTreeMap<_, _> = config
            .adversaries
            .iter()
            .map(|(&party, strategy)| (party, adversary_act(strategy, round_type, &mut adversary_rng)))
            .collect();
        let announce = config.policy == AnnouncementPolicy::EveryRound || round_type == RoundType::Verification;
        let extraction = run_extraction(&state, roles, announce, &actions, &mut nature, &mut parties)?;
        for &party in config.adversaries.keys() {
            adversary_log.push(AdversaryEvent {
                round: index,
                party,
                round_type,
                defected_bit: extraction.defector_bits.get(&party).copied(),
            });
        }

        let record = match round_type {
            RoundType::KeyGen => {
                let bits = run_keygen_round(&extraction.reduced, roles, &mut nature)?;
                sender_key.push(bits.sender);
                for (key, &b) in participant_keys.iter_mut().zip(&bits.participants) {
                    key.push(b);
                }
                RoundRecord {
                    index,
                    round_type,
                    extraction: extraction.announcements,
                    verification: None,
                    sender_private: SenderPrivate {
                        delta: extraction.announced_delta,
                        sender_basis: None,
                        sender_outcome: None,
                        verdict: Verdict::NotApplicable,
                    },
                    key_bit_sender: Some(bits.sender),
                    key_bits_participants: Some(bits.participants),
                }
            }
            RoundType::Verification => {
                let delta = extraction.announced_delta.expect("verification rounds always announce");
                let outcome = run_verification_round(
                    &extraction.reduced,
                    delta,
                    roles,
                    config.phase_correction,
                    config.fixed_settings.as_deref(),
                    &mut nature,
                    &mut parties,
                )?;
                RoundRecord {
                    index,
                    round_type,
                    extraction: extraction.announcements,
                    verification: Some(outcome.announcements),
                    sender_private: SenderPrivate {
                        delta: Some(delta),
                        sender_basis: Some(outcome.sender_basis),
                        sender_outcome: Some(outcome.sender_outcome),
                        verdict: if outcome.passed { Verdict::Pass } else { Verdict::Fail },
                    },
                    key_bit_sender: None,
                    key_bits_participants: None,
                }
            }
        };
        records.push(record);
    }

    let transcript = Transcript {
        header: PublicHeader {
            n,
            d: config.d,
            rounds: config.rounds,
            policy: config.policy,
            fidelity: config.noise.fidelity(),
        },
        private_header: PrivateHeader {
            sender: roles.sender(),
            participants: roles.participants().to_vec(),
            seed: config.seed,
            correction: config.phase_correction,
            abort_threshold: config.abort_threshold,
        },
        records,
    };

    Ok(RunOutcome {
        transcript,
        notifications,
        sender_key,
        participant_keys,
        adversary_log,
    })
}

/// Honest verification failure rate under white noise of fidelity `f` on
/// `n` parties: (1 − p_mix)/2, independent of the participant set.
pub fn expected_failure_rate(n: usize, fidelity: f64) -> f64 {
    calibrate_white_noise(fidelity, n).map_or(0.5, |p| (1.0 - p) / 2.0)
}

/// Largest failure rate the sender tolerates: `override_threshold` when
/// given, otherwise the noise-expected rate plus three binomial standard
/// deviations.
pub fn abort_threshold(n: usize, fidelity: f64, num_verification: usize, override_threshold: Option<f64>) -> f64 {
    if let Some(t) = override_threshold {
        return t;
    }
    let eta = expected_failure_rate(n, fidelity);
    let sigma = if num_verification == 0 {
        0.0
    } else {
        (eta * (1.0 - eta) / num_verification as f64).sqrt()
    };
    eta + 3.0 * sigma
}

/// Whether the sender keeps the key given the observed counts.
pub fn accept_key(counts: &Counts, n: usize, fidelity: f64, override_threshold: Option<f64>) -> bool {
    if counts.verification == 0 {
        return false;
    }
    let eta = counts.verification_failed as f64 / counts.verification as f64;
    eta <= abort_threshold(n, fidelity, counts.verification, override_threshold) + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Roles;

    #[test]
    fn expected_failure_values() {
        assert_eq!(expected_failure_rate(4, 1.0), 0.0);
        assert!((expected_failure_rate(4, 0.85) - 0.08).abs() < 1e-12);
    }

    #[test]
    fn abort_rule() {
        let clean = Counts {
            keygen: 10,
            verification: 190,
            verification_failed: 0,
        };
        assert!(accept_key(&clean, 4, 1.0, None));
        let one_fail = Counts {
            verification_failed: 1,
            ..clean
        };
        assert!(!accept_key(&one_fail, 4, 1.0, None));
        assert!(accept_key(&one_fail, 4, 1.0, Some(0.01)));
        let none = Counts::default();
        assert!(!accept_key(&none, 4, 1.0, None));
    }

    #[test]
    fn noiseless_run_is_complete() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let cfg = NetworkConfig::new(roles, 20.0, 3000, 11);
        let out = run_protocol(&cfg).unwrap();
        let c = out.transcript.counts();
        assert_eq!(c.total(), 3000);
        assert_eq!(c.verification_failed, 0);
        assert_eq!(out.sender_key.len(), c.keygen);
        for key in &out.participant_keys {
            assert_eq!(key, &out.sender_key);
        }
        assert_eq!(out.notifications, vec![false, true, true, false]);
    }

    #[test]
    fn rejects_invalid_config() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let cfg = NetworkConfig::new(roles, 1.5, 10, 0);
        assert!(matches!(
            run_protocol(&cfg),
            Err(ProtocolError::Config(ConfigError::SecurityParameter(_)))
        ));
    }
}
