//! Reference implementations shared by the integration tests. Nothing here
//! calls into the simulator, so agreement with it is a real check.

#![allow(dead_code)]

use acka_core::protocol::Roles;

/// Real GHZ amplitudes, qubit 0 = most significant index bit.
pub fn ghz_real(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; 1 << n];
    v[0] = std::f64::consts::FRAC_1_SQRT_2;
    v[(1 << n) - 1] = std::f64::consts::FRAC_1_SQRT_2;
    v
}

fn bit(index: usize, n: usize, q: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Contracts the listed qubits of `state` with X eigenbras ⟨±|
/// (`bit` 0 = +, 1 = −). Returns the unnormalized vector on the remaining
/// qubits in ascending order and its squared norm (the branch probability).
pub fn contract_x(state: &[f64], n: usize, measured: &[(usize, u8)]) -> (Vec<f64>, f64) {
    let kept: Vec<usize> = (0..n).filter(|q| measured.iter().all(|(m, _)| m != q)).collect();
    let mut out = vec![0.0; 1 << kept.len()];
    for (index, &amp) in state.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let mut w = amp;
        for &(q, b) in measured {
            let sign = if b == 1 && bit(index, n, q) == 1 { -1.0 } else { 1.0 };
            w *= sign * std::f64::consts::FRAC_1_SQRT_2;
        }
        let mut j = 0;
        for &q in &kept {
            j = (j << 1) | bit(index, n, q);
        }
        out[j] += w;
    }
    let norm = out.iter().map(|a| a * a).sum();
    (out, norm)
}

/// Every role assignment on `n` parties with at least one participant and
/// at least one non-participant.
pub fn all_roles(n: usize) -> Vec<Roles> {
    let mut out = Vec::new();
    for sender in 0..n {
        let others: Vec<usize> = (0..n).filter(|&p| p != sender).collect();
        for mask in 1..(1usize << others.len()) - 1 {
            let parts: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            out.push(Roles::new(n, sender, &parts).unwrap());
        }
    }
    out
}

/// All bit patterns of length `len`, lowest index first.
pub fn patterns(len: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1usize << len).map(move |x| (0..len).map(|i| ((x >> i) & 1) as u8).collect())
}

/// Binomial standard deviation of a sample proportion.
pub fn binom_sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
