//! Exact predictions for honest runs, computed on the density matrix of the
//! depolarized GHZ state.
//!
//! Measuring the non-participants in X and then the key parties is a
//! measurement of one n-qubit Pauli string, so the Verification pass
//! probability is (1 + sign·Tr(ρP))/2 averaged over the participants'
//! basis choices. KeyGen statistics only involve the Z-diagonal of ρ
//! restricted to the key parties.

use super::config::{Role, Roles};
use crate::qsim::MAX_MIXED_QUBITS;
use crate::qsim::{depolarize_global, MixedState, Pauli, PauliBasis, PureState, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub pass_rate: f64,
    /// Probability that every key party's Z bit agrees.
    pub keygen_agreement: f64,
    /// Mean per-bit disagreement between the sender and one participant.
    pub qber: f64,
}

pub fn noisy_ghz(n: usize, p_mix: f64) -> Result<MixedState, SimError> {
    if n > MAX_MIXED_QUBITS {
        return Err(SimError::QubitCount {
            n,
            min: 1,
            max: MAX_MIXED_QUBITS,
        });
    }
    depolarize_global(&PureState::ghz(n)?, p_mix)
}

/// Full n-party observable for one choice of participant bases, with its
/// expected sign (−1)^(k/2).
pub fn verification_observable(roles: &Roles, participant_bases: &[PauliBasis]) -> (Vec<Pauli>, f64) {
    let mut paulis = vec![Pauli::X; roles.n()];
    let mut y = 0;
    for (&p, &b) in roles.participants().iter().zip(participant_bases) {
        paulis[p] = b.into();
        y += usize::from(b == PauliBasis::Y);
    }
    if y % 2 == 1 {
        paulis[roles.sender()] = Pauli::Y;
        y += 1;
    }
    let sign = if (y / 2) % 2 == 0 { 1.0 } else { -1.0 };
    (paulis, sign)
}

fn all_patterns(m: usize) -> Vec<Vec<PauliBasis>> {
    (0..1usize << m)
        .map(|mask| {
            (0..m)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        PauliBasis::Y
                    } else {
                        PauliBasis::X
                    }
                })
                .collect()
        })
        .collect()
}

pub fn predict(roles: &Roles, p_mix: f64, fixed: Option<&[PauliBasis]>) -> Result<Prediction, SimError> {
    let n = roles.n();
    let rho = noisy_ghz(n, p_mix)?;
    let patterns = match fixed {
        Some(b) => vec![b.to_vec()],
        None => all_patterns(roles.m()),
    };
    let mut pass = 0.0;
    for pattern in &patterns {
        let (obs, sign) = verification_observable(roles, pattern);
        pass += (1.0 + sign * rho.expectation(&obs)?) / 2.0;
    }
    let pass_rate = pass / patterns.len() as f64;

    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let key_parties = roles.key_parties();
    let keygen_agreement = rho.diagonal_probability(|i| {
        let first = bit(i, key_parties[0]);
        key_parties.iter().all(|&q| bit(i, q) == first)
    });
    let s = roles.sender();
    let qber = roles
        .participants()
        .iter()
        .map(|&p| rho.diagonal_probability(|i| bit(i, s) != bit(i, p)))
        .sum::<f64>()
        / roles.m() as f64;
    debug_assert!((0..n).all(|p| roles.role_of(p) != Role::Sender || p == s));
    Ok(Prediction {
        pass_rate,
        keygen_agreement,
        qber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_predictions() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let p = predict(&roles, 1.0, None).unwrap();
        assert!((p.pass_rate - 1.0).abs() < 1e-12);
        assert!((p.keygen_agreement - 1.0).abs() < 1e-12);
        assert!(p.qber.abs() < 1e-12);
    }

    #[test]
    fn white_noise_closed_forms() {
        // pass = (1+p)/2, agreement = p + (1−p)·2^−m, QBER = (1−p)/2
        for (n, sender, parts) in [(4, 0, vec![1, 2]), (4, 2, vec![3]), (5, 1, vec![0, 3, 4])] {
            let roles = Roles::new(n, sender, &parts).unwrap();
            let m = parts.len() as i32;
            for p in [0.0, 0.4, 0.84, 1.0] {
                let pred = predict(&roles, p, None).unwrap();
                assert!((pred.pass_rate - (1.0 + p) / 2.0).abs() < 1e-12);
                assert!((pred.keygen_agreement - (p + (1.0 - p) * 0.5f64.powi(m))).abs() < 1e-12);
                assert!((pred.qber - (1.0 - p) / 2.0).abs() < 1e-12);
            }
        }
    }
}
