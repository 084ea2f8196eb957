//! Single-round building blocks: scheduling, extraction, KeyGen and
//! Verification.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use super::config::{PhaseCorrection, Role, Roles};
use super::transcript::{Announcement, AnnouncementPayload};
use crate::adversary::AdversaryAction;
use crate::qsim::{PauliBasis, PureState, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundType {
    KeyGen,
    Verification,
}

impl RoundType {
    pub fn code(self) -> char {
        match self {
            RoundType::KeyGen => 'K',
            RoundType::Verification => 'V',
        }
    }
}

impl fmt::Display for RoundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoundType::KeyGen => "KeyGen",
            RoundType::Verification => "Verification",
        })
    }
}

/// Draws the round type from the public 1/D-biased source.
pub fn schedule_round<R: Rng + ?Sized>(d: f64, public: &mut R) -> RoundType {
    if public.random_bool(1.0 / d) {
        RoundType::KeyGen
    } else {
        RoundType::Verification
    }
}

/// Result of the non-participants' measurements.
#[derive(Debug, Clone)]
pub struct Extraction {
    /// State of the sender and participants, in ascending party order.
    pub reduced: PureState,
    /// XOR of the bits the non-participants actually measured.
    pub delta: u8,
    /// Extraction announcements of all parties, indexed by party, when the
    /// round calls for them.
    pub announcements: Option<Vec<Announcement>>,
    /// XOR of the non-participants' announced bits, i.e. the Δ the sender
    /// works with.
    pub announced_delta: Option<u8>,
    /// Z outcomes obtained by defecting non-participants.
    pub defector_bits: BTreeMap<usize, u8>,
}

/// Non-participants measure X (or Z when defecting) and, when `announce` is
/// set, everybody publishes one bit: honest non-participants their outcome,
/// everyone else a uniformly random cover bit.
pub fn run_extraction<R: Rng>(
    state: &PureState,
    roles: &Roles,
    announce: bool,
    actions: &BTreeMap<usize, AdversaryAction>,
    nature: &mut R,
    parties: &mut [R],
) -> Result<Extraction, SimError> {
    let n = roles.n();
    if state.num_qubits() != n {
        return Err(SimError::DimensionMismatch {
            left: n,
            right: state.num_qubits(),
        });
    }
    let mut reduced = state.clone();
    let mut measured = vec![None; n];
    let mut delta = 0u8;
    let mut defector_bits = BTreeMap::new();
    // highest index first so that lower qubit indices stay valid
    for &p in roles.non_participants().iter().rev() {
        let action = actions
            .get(&p)
            .copied()
            .unwrap_or(AdversaryAction::MeasureXAnnounceTrue);
        let basis = match action {
            AdversaryAction::MeasureXAnnounceTrue => PauliBasis::X,
            AdversaryAction::MeasureZAnnounceRandom => PauliBasis::Z,
        };
        let (result, rest) = reduced.measure_qubit(p, basis, nature)?;
        reduced = rest;
        measured[p] = Some((result.bit(), action));
        delta ^= result.bit();
        if action == AdversaryAction::MeasureZAnnounceRandom {
            defector_bits.insert(p, result.bit());
        }
    }

    let (announcements, announced_delta) = if announce {
        let mut anns = Vec::with_capacity(n);
        let mut announced = 0u8;
        for (p, rng) in parties.iter_mut().enumerate().take(n) {
            let (bit, truthful) = match measured[p] {
                Some((bit, AdversaryAction::MeasureXAnnounceTrue)) => (bit, true),
                Some((_, AdversaryAction::MeasureZAnnounceRandom)) => (random_bit(rng), false),
                None => (random_bit(rng), false),
            };
            if roles.role_of(p) == Role::NonParticipant {
                announced ^= bit;
            }
            anns.push(Announcement {
                party: p,
                payload: AnnouncementPayload::Extraction { bit },
                truthful,
            });
        }
        (Some(anns), Some(announced))
    } else {
        (None, None)
    };

    Ok(Extraction {
        reduced,
        delta,
        announcements,
        announced_delta,
        defector_bits,
    })
}

/// Extraction with every non-participant's X outcome forced, in ascending
/// party order. Returns the joint probability of the pattern, the reduced
/// state and Δ.
pub fn extract_with_outcomes(
    state: &PureState,
    roles: &Roles,
    outcomes: &[u8],
) -> Result<(f64, PureState, u8), SimError> {
    let non = roles.non_participants();
    if outcomes.len() != non.len() {
        return Err(SimError::LengthMismatch {
            expected: non.len(),
            got: outcomes.len(),
        });
    }
    let mut reduced = state.clone();
    let mut prob = 1.0;
    for (&p, &bit) in non.iter().zip(outcomes).rev() {
        let (branch, rest) = reduced.project_qubit(p, PauliBasis::X, bit)?;
        prob *= branch;
        reduced = rest;
    }
    let delta = outcomes.iter().fold(0, |acc, b| acc ^ b);
    Ok((prob, reduced, delta))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyBits {
    pub sender: u8,
    /// In ascending participant order.
    pub participants: Vec<u8>,
}

/// Sender and participants measure Z. The Δ phase does not affect Z
/// statistics, so no correction is applied and nothing is announced.
pub fn run_keygen_round<R: Rng + ?Sized>(
    reduced: &PureState,
    roles: &Roles,
    nature: &mut R,
) -> Result<KeyBits, SimError> {
    let key_parties = roles.key_parties();
    if reduced.num_qubits() != key_parties.len() {
        return Err(SimError::DimensionMismatch {
            left: key_parties.len(),
            right: reduced.num_qubits(),
        });
    }
    let mut state = reduced.clone();
    let mut sender = 0;
    let mut participants = Vec::with_capacity(roles.m());
    for &p in &key_parties {
        let (result, rest) = state.measure_qubit(0, PauliBasis::Z, nature)?;
        state = rest;
        if p == roles.sender() {
            sender = result.bit();
        } else {
            participants.push(result.bit());
        }
    }
    Ok(KeyBits { sender, participants })
}

/// Pass iff the XOR of all outcome bits equals (k/2 mod 2) ⊕ Δ, where `k` is
/// the (even) number of Y measurements.
pub fn verification_verdict(outcomes: &[u8], y_count: usize, delta: u8) -> bool {
    debug_assert!(y_count.is_multiple_of(2));
    let parity = outcomes.iter().fold(0u8, |acc, b| acc ^ b);
    let expected = ((y_count / 2) % 2) as u8 ^ (delta & 1);
    parity == expected
}

#[derive(Debug, Clone)]
pub struct VerificationOutcome {
    pub passed: bool,
    /// Verification announcements of all parties, indexed by party.
    pub announcements: Vec<Announcement>,
    pub participant_bases: Vec<PauliBasis>,
    pub sender_basis: PauliBasis,
    pub sender_outcome: u8,
    /// Total number of Y measurements including the sender's.
    pub y_count: usize,
}

fn random_bit<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.random::<bool>() as u8
}

fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> PauliBasis {
    if rng.random::<bool>() {
        PauliBasis::Y
    } else {
        PauliBasis::X
    }
}

/// Participants measure random X/Y and announce truthfully; the sender and
/// the non-participants announce two random bits; the sender then measures
/// so that the total Y count is even and checks the parity against Δ.
#[allow(clippy::too_many_arguments)]
pub fn run_verification_round<R: Rng>(
    reduced: &PureState,
    delta: u8,
    roles: &Roles,
    correction: PhaseCorrection,
    fixed_bases: Option<&[PauliBasis]>,
    nature: &mut R,
    parties: &mut [R],
) -> Result<VerificationOutcome, SimError> {
    let n = roles.n();
    let mut remaining = roles.key_parties();
    if reduced.num_qubits() != remaining.len() {
        return Err(SimError::DimensionMismatch {
            left: remaining.len(),
            right: reduced.num_qubits(),
        });
    }
    let mut state = reduced.clone();
    let mut payloads: Vec<Option<(AnnouncementPayload, bool)>> = vec![None; n];
    let mut outcomes = Vec::with_capacity(remaining.len());
    let mut participant_bases = Vec::with_capacity(roles.m());
    let mut y_count = 0;

    for (i, &p) in roles.participants().iter().enumerate() {
        let basis = match fixed_bases {
            Some(b) => b[i],
            None => random_basis(&mut parties[p]),
        };
        let pos = remaining
            .iter()
            .position(|&q| q == p)
            .expect("participant qubit present");
        let (result, rest) = state.measure_qubit(pos, basis, nature)?;
        state = rest;
        remaining.remove(pos);
        outcomes.push(result.bit());
        participant_bases.push(basis);
        if basis == PauliBasis::Y {
            y_count += 1;
        }
        payloads[p] = Some((
            AnnouncementPayload::Verification {
                basis,
                outcome: result.bit(),
            },
            true,
        ));
    }

    // covers for everyone who is not a participant, sender included
    for (p, slot) in payloads.iter_mut().enumerate() {
        if slot.is_none() {
            let rng = &mut parties[p];
            let basis = random_basis(rng);
            let outcome = random_bit(rng);
            *slot = Some((AnnouncementPayload::Verification { basis, outcome }, false));
        }
    }

    let sender_basis = if y_count % 2 == 1 { PauliBasis::Y } else { PauliBasis::X };
    if sender_basis == PauliBasis::Y {
        y_count += 1;
    }
    debug_assert_eq!(remaining, vec![roles.sender()]);
    let effective_delta = match correction {
        PhaseCorrection::Classical => delta,
        PhaseCorrection::PauliZ => {
            if delta & 1 == 1 {
                state.apply_pauli_z(0)?;
            }
            0
        }
    };
    let (result, _) = state.measure_qubit(0, sender_basis, nature)?;
    outcomes.push(result.bit());
    let passed = verification_verdict(&outcomes, y_count, effective_delta);

    let announcements = payloads
        .into_iter()
        .enumerate()
        .map(|(party, slot)| {
            let (payload, truthful) = slot.expect("every party announced");
            Announcement {
                party,
                payload,
                truthful,
            }
        })
        .collect();

    Ok(VerificationOutcome {
        passed,
        announcements,
        participant_bases,
        sender_basis,
        sender_outcome: result.bit(),
        y_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::stream_rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rngs(n: usize, seed: u64) -> (ChaCha8Rng, Vec<ChaCha8Rng>) {
        (
            stream_rng(seed, 1),
            (0..n).map(|p| stream_rng(seed, 16 + p as u64)).collect(),
        )
    }

    #[test]
    fn schedule_is_deterministic_per_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let sa: Vec<_> = (0..1000).map(|_| schedule_round(20.0, &mut a)).collect();
        let sb: Vec<_> = (0..1000).map(|_| schedule_round(20.0, &mut b)).collect();
        assert_eq!(sa, sb);
    }

    #[test]
    fn schedule_fraction_is_one_over_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let draws = 100_000;
        let k = (0..draws)
            .filter(|_| schedule_round(20.0, &mut rng) == RoundType::KeyGen)
            .count();
        let frac = k as f64 / draws as f64;
        assert!(
            (frac - 0.05).abs() <= 4.0 * (0.05 * 0.95 / draws as f64).sqrt(),
            "{frac}"
        );
    }

    #[test]
    fn forced_extraction_single_non_participant() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let ghz = PureState::ghz(4).unwrap();
        let (p, reduced, delta) = extract_with_outcomes(&ghz, &roles, &[1]).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(delta, 1);
        let want = PureState::ghz_with_phase(3, 1).unwrap();
        assert!((reduced.fidelity_with(&want).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forced_extraction_two_non_participants_cancel() {
        let roles = Roles::new(4, 0, &[1]).unwrap();
        let ghz = PureState::ghz(4).unwrap();
        let (_, reduced, delta) = extract_with_outcomes(&ghz, &roles, &[1, 1]).unwrap();
        assert_eq!(delta, 0);
        let want = PureState::ghz(2).unwrap();
        assert!((reduced.fidelity_with(&want).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extraction_without_non_participants_is_identity() {
        let roles = Roles::new(3, 0, &[1, 2]).unwrap();
        let ghz = PureState::ghz(3).unwrap();
        let (mut nature, mut parties) = rngs(3, 0);
        let ex = run_extraction(&ghz, &roles, true, &BTreeMap::new(), &mut nature, &mut parties).unwrap();
        assert_eq!(ex.delta, 0);
        assert_eq!(ex.announced_delta, Some(0));
        assert_eq!(ex.reduced, ghz);
    }

    #[test]
    fn sampled_extraction_matches_announced_parity() {
        let roles = Roles::new(5, 2, &[4]).unwrap();
        let ghz = PureState::ghz(5).unwrap();
        let (mut nature, mut parties) = rngs(5, 1);
        for _ in 0..200 {
            let ex = run_extraction(&ghz, &roles, true, &BTreeMap::new(), &mut nature, &mut parties).unwrap();
            assert_eq!(ex.announced_delta, Some(ex.delta));
            let want = PureState::ghz_with_phase(2, ex.delta).unwrap();
            assert!((ex.reduced.fidelity_with(&want).unwrap() - 1.0).abs() < 1e-12);
            let anns = ex.announcements.unwrap();
            assert_eq!(anns.len(), 5);
            for a in &anns {
                assert_eq!(a.truthful, roles.role_of(a.party) == Role::NonParticipant);
            }
        }
    }

    #[test]
    fn keygen_bits_agree_with_and_without_phase() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut ones = 0;
        for i in 0..2000 {
            let state = PureState::ghz_with_phase(3, (i % 2) as u8).unwrap();
            let bits = run_keygen_round(&state, &roles, &mut rng).unwrap();
            assert!(bits.participants.iter().all(|&b| b == bits.sender));
            ones += bits.sender as usize;
        }
        let freq = ones as f64 / 2000.0;
        assert!((freq - 0.5).abs() < 4.0 * (0.25f64 / 2000.0).sqrt());
    }

    #[test]
    fn verdict_rule_cases() {
        // Δ=0, all X
        assert!(verification_verdict(&[0, 0, 0], 0, 0));
        assert!(!verification_verdict(&[1, 0, 0], 0, 0));
        // Δ=0, two Ys: parity must be 1
        assert!(verification_verdict(&[1, 0, 0], 2, 0));
        // Δ=1, all X: parity must be 1
        assert!(verification_verdict(&[0, 1, 0], 0, 1));
        // four Ys flip back
        assert!(verification_verdict(&[0, 0, 0, 0, 0], 4, 0));
    }

    #[test]
    fn noiseless_verification_always_passes() {
        let roles = Roles::new(5, 3, &[0, 4]).unwrap();
        let (mut nature, mut parties) = rngs(5, 2);
        for correction in [PhaseCorrection::Classical, PhaseCorrection::PauliZ] {
            for i in 0..500 {
                let delta = (i % 2) as u8;
                let state = PureState::ghz_with_phase(3, delta).unwrap();
                let v =
                    run_verification_round(&state, delta, &roles, correction, None, &mut nature, &mut parties).unwrap();
                assert!(v.passed);
                assert_eq!(v.y_count % 2, 0);
                assert_eq!(v.announcements.len(), 5);
            }
        }
    }

    #[test]
    fn fixed_bases_are_respected() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let (mut nature, mut parties) = rngs(4, 3);
        let fixed = [PauliBasis::Y, PauliBasis::X];
        let state = PureState::ghz(3).unwrap();
        let v = run_verification_round(
            &state,
            0,
            &roles,
            PhaseCorrection::Classical,
            Some(&fixed),
            &mut nature,
            &mut parties,
        )
        .unwrap();
        assert_eq!(v.participant_bases, fixed.to_vec());
        assert_eq!(v.sender_basis, PauliBasis::Y);
        assert_eq!(v.y_count, 2);
        assert!(v.passed);
    }
}
