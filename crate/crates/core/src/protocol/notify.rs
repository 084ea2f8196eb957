//! Anonymous notification by XOR shares over private pairwise channels.
//!
//! To notify party `j`, every party `i` splits a bit into `n` shares, one per
//! party: honest parties split 0, the sender splits the notification bit for
//! `j`. Each party XORs the shares it received and privately sends the
//! result to `j`, who XORs the `n` bits it receives. Only the sender's
//! contribution survives.

use rand::Rng;

use super::config::{Role, Roles};

/// `shares[target][from][to]`: the bit party `from` sends to party `to`
/// in the instance notifying `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotificationShares {
    n: usize,
    shares: Vec<Vec<Vec<u8>>>,
}

impl NotificationShares {
    pub fn zeros(n: usize) -> Self {
        NotificationShares {
            n,
            shares: vec![vec![vec![0; n]; n]; n],
        }
    }

    /// Honest share generation for `roles`.
    pub fn draw<R: Rng + ?Sized>(roles: &Roles, rng: &mut R) -> Self {
        let n = roles.n();
        let mut out = Self::zeros(n);
        for target in 0..n {
            let notify_bit = u8::from(roles.role_of(target) == Role::Participant);
            for from in 0..n {
                let secret = if from == roles.sender() { notify_bit } else { 0 };
                let row = &mut out.shares[target][from];
                let mut acc = 0u8;
                for bit in row.iter_mut().take(n - 1) {
                    *bit = rng.random::<bool>() as u8;
                    acc ^= *bit;
                }
                row[n - 1] = acc ^ secret;
            }
        }
        out
    }

    pub fn get(&self, target: usize, from: usize, to: usize) -> u8 {
        self.shares[target][from][to]
    }

    pub fn flip(&mut self, target: usize, from: usize, to: usize) {
        self.shares[target][from][to] ^= 1;
    }

    /// Runs both message layers and returns what each party learns.
    pub fn resolve(&self) -> Vec<bool> {
        let n = self.n;
        (0..n)
            .map(|target| {
                // layer 2: each party forwards the XOR of what it received
                let forwarded = (0..n).map(|to| (0..n).fold(0u8, |acc, from| acc ^ self.get(target, from, to)));
                forwarded.fold(0u8, |acc, b| acc ^ b) == 1
            })
            .collect()
    }
}

/// Per-party notification flag: `true` iff the party is a participant.
pub fn notify<R: Rng + ?Sized>(roles: &Roles, rng: &mut R) -> Vec<bool> {
    NotificationShares::draw(roles, rng).resolve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn participants_learn_their_role() {
        let roles = Roles::new(4, 0, &[1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            assert_eq!(notify(&roles, &mut rng), vec![false, true, true, false]);
        }
    }

    #[test]
    fn all_zero_shares_notify_nobody() {
        assert!(NotificationShares::zeros(5).resolve().iter().all(|f| !f));
    }

    #[test]
    fn flipping_a_sender_share_flips_the_flag() {
        let roles = Roles::new(5, 3, &[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let shares = NotificationShares::draw(&roles, &mut rng);
        let base = shares.resolve();
        for target in 0..5 {
            for to in 0..5 {
                let mut flipped = shares.clone();
                flipped.flip(target, roles.sender(), to);
                let got = flipped.resolve();
                for (p, (&a, &b)) in base.iter().zip(&got).enumerate() {
                    assert_eq!(a != b, p == target, "target {target} to {to} party {p}");
                }
            }
        }
    }

    #[test]
    fn individual_shares_are_unbiased() {
        // what any single party sees on the wire is independent of the flag
        let roles = Roles::new(4, 0, &[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trials = 4000;
        let ones = (0..trials)
            .filter(|_| NotificationShares::draw(&roles, &mut rng).get(1, 0, 2) == 1)
            .count();
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 4.0 * (0.25 / trials as f64).sqrt());
    }
}
