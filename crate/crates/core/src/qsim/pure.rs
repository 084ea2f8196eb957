use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::{MeasurementResult, Pauli, PauliBasis, SimError, BRANCH_EPS, MAX_PURE_QUBITS, NORM_TOL};

/// Dense amplitude vector over `num_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the basis-state index, so the
/// qubit order matches party order.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

#[inline]
pub(crate) fn bit_at(index: usize, qubit: usize, num_qubits: usize) -> usize {
    (index >> (num_qubits - 1 - qubit)) & 1
}

impl PureState {
    /// (|0…0⟩ + |1…1⟩)/√2 on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self, SimError> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[dim - 1] += Complex64::new(FRAC_1_SQRT_2, 0.0);
        Ok(PureState { num_qubits: n, amps })
    }

    /// (|0…0⟩ + (−1)^Δ |1…1⟩)/√2 on `n` qubits.
    pub fn ghz_with_phase(n: usize, delta: u8) -> Result<Self, SimError> {
        let mut state = Self::ghz(n)?;
        if delta & 1 == 1 {
            state.apply_pauli_z(0)?;
        }
        Ok(state)
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self, SimError> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(SimError::QubitIndex {
                qubit: index,
                num_qubits: n,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { num_qubits: n, amps })
    }

    /// Wraps an explicit amplitude vector. The length must be a power of two
    /// and the vector must be normalized within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::LengthMismatch {
                expected: len.next_power_of_two(),
                got: len,
            });
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_PURE_QUBITS {
            return Err(SimError::QubitCount {
                n,
                min: 0,
                max: MAX_PURE_QUBITS,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(PureState { num_qubits: n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// True for the 0-qubit remainder left after measuring the final qubit.
    pub fn is_scalar(&self) -> bool {
        self.num_qubits == 0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_index(&self, qubit: usize) -> Result<(), SimError> {
        if qubit >= self.num_qubits {
            Err(SimError::QubitIndex {
                qubit,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub fn apply_pauli_z(&mut self, qubit: usize) -> Result<(), SimError> {
        self.apply_pauli(qubit, Pauli::Z)
    }

    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<(), SimError> {
        self.check_index(qubit)?;
        if pauli == Pauli::I {
            return Ok(());
        }
        let mask = self.mask(qubit);
        if pauli.flips() {
            let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
            for (i, a) in self.amps.iter().enumerate() {
                let b = usize::from(i & mask != 0);
                out[i ^ mask] = pauli.phase(b) * a;
            }
            self.amps = out;
        } else {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *a = -*a;
                }
            }
        }
        Ok(())
    }

    /// Applies a tensor product of Paulis, one per qubit.
    pub fn apply_pauli_string(&mut self, paulis: &[Pauli]) -> Result<(), SimError> {
        if paulis.len() != self.num_qubits {
            return Err(SimError::LengthMismatch {
                expected: self.num_qubits,
                got: paulis.len(),
            });
        }
        let (flip, phases) = string_action(paulis, self.num_qubits);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            out[i ^ flip] = phases(i) * a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<(), SimError> {
        self.check_index(qubit)?;
        let mask = self.mask(qubit);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = h * (a0 + a1);
                self.amps[i | mask] = h * (a0 - a1);
            }
        }
        Ok(())
    }

    /// S† = diag(1, −i).
    pub fn apply_s_dagger(&mut self, qubit: usize) -> Result<(), SimError> {
        self.check_index(qubit)?;
        let mask = self.mask(qubit);
        let minus_i = Complex64::new(0.0, -1.0);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a *= minus_i;
            }
        }
        Ok(())
    }

    /// Maps the +1/−1 eigenstates of `basis` on `qubit` to |0⟩/|1⟩.
    fn rotate_to_computational(&mut self, qubit: usize, basis: PauliBasis) -> Result<(), SimError> {
        match basis {
            PauliBasis::Z => Ok(()),
            PauliBasis::X => self.apply_hadamard(qubit),
            PauliBasis::Y => {
                self.apply_s_dagger(qubit)?;
                self.apply_hadamard(qubit)
            }
        }
    }

    /// Born probability of obtaining `bit` when measuring `qubit` in `basis`.
    pub fn outcome_probability(&self, qubit: usize, basis: PauliBasis, bit: u8) -> Result<f64, SimError> {
        let mut rotated = self.clone();
        rotated.rotate_to_computational(qubit, basis)?;
        Ok(rotated.branch_weight(qubit, bit))
    }

    fn branch_weight(&self, qubit: usize, bit: u8) -> f64 {
        let mask = self.mask(qubit);
        let want = if bit == 0 { 0 } else { mask };
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `qubit` onto the `bit` eigenstate of `basis`, removes it and
    /// renormalizes. Returns the branch probability alongside the reduced
    /// state. Branches with probability below 1e-12 are rejected.
    pub fn project_qubit(&self, qubit: usize, basis: PauliBasis, bit: u8) -> Result<(f64, PureState), SimError> {
        self.check_index(qubit)?;
        let mut rotated = self.clone();
        rotated.rotate_to_computational(qubit, basis)?;
        let prob = rotated.branch_weight(qubit, bit);
        if prob < BRANCH_EPS {
            return Err(SimError::ImpossibleBranch { probability: prob });
        }
        Ok((prob, rotated.collapse(qubit, bit, prob)))
    }

    fn collapse(&self, qubit: usize, bit: u8, prob: f64) -> PureState {
        let n = self.num_qubits;
        let low_bits = n - 1 - qubit;
        let low_mask = (1usize << low_bits) - 1;
        let scale = 1.0 / prob.sqrt();
        let reduced_dim = 1usize << (n - 1);
        let amps = (0..reduced_dim)
            .map(|j| {
                let high = j >> low_bits;
                let low = j & low_mask;
                let full = (((high << 1) | bit as usize) << low_bits) | low;
                self.amps[full] * scale
            })
            .collect();
        PureState {
            num_qubits: n - 1,
            amps,
        }
    }

    /// Samples a measurement of `qubit` in `basis` and returns the outcome
    /// together with the post-measurement state on the remaining qubits.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        basis: PauliBasis,
        rng: &mut R,
    ) -> Result<(MeasurementResult, PureState), SimError> {
        self.check_index(qubit)?;
        let mut rotated = self.clone();
        rotated.rotate_to_computational(qubit, basis)?;
        let p0 = rotated.branch_weight(qubit, 0);
        let draw: f64 = rng.random();
        let bit = if draw < p0 { 0 } else { 1 };
        let prob = if bit == 0 { p0 } else { 1.0 - p0 };
        if prob < BRANCH_EPS {
            return Err(SimError::ImpossibleBranch { probability: prob });
        }
        Ok((MeasurementResult::from_bit(bit), rotated.collapse(qubit, bit, prob)))
    }

    /// ⟨ψ|P|ψ⟩ for a tensor-product Pauli observable.
    pub fn expectation(&self, paulis: &[Pauli]) -> Result<f64, SimError> {
        if paulis.len() != self.num_qubits {
            return Err(SimError::LengthMismatch {
                expected: self.num_qubits,
                got: paulis.len(),
            });
        }
        let (flip, phases) = string_action(paulis, self.num_qubits);
        // ⟨ψ|P|ψ⟩ = Σ_i conj(a[i ⊕ flip]) · phase(i) · a[i]
        let value: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| self.amps[i ^ flip].conj() * phases(i) * a)
            .sum();
        Ok(value.re)
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|².
    pub fn fidelity_with(&self, other: &PureState) -> Result<f64, SimError> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// For a Pauli string, returns the bit-flip mask and a closure computing the
/// phase picked up by basis state |i⟩.
pub(crate) fn string_action(paulis: &[Pauli], n: usize) -> (usize, impl Fn(usize) -> Complex64 + '_) {
    let flip = paulis
        .iter()
        .enumerate()
        .filter(|(_, p)| p.flips())
        .fold(0usize, |m, (q, _)| m | (1 << (n - 1 - q)));
    let phases = move |i: usize| {
        paulis
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I && **p != Pauli::X)
            .fold(Complex64::new(1.0, 0.0), |acc, (q, p)| acc * p.phase(bit_at(i, q, n)))
    };
    (flip, phases)
}

fn check_qubits(n: usize) -> Result<(), SimError> {
    if (1..=MAX_PURE_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(SimError::QubitCount {
            n,
            min: 1,
            max: MAX_PURE_QUBITS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ghz_four_has_two_nonzero_amplitudes() {
        let s = PureState::ghz(4).unwrap();
        assert_eq!(s.amplitudes().len(), 16);
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = if i == 0 || i == 15 { H } else { 0.0 };
            assert!((a - c(want)).norm() < 1e-12, "index {i}");
        }
    }

    #[test]
    fn ghz_one_is_plus_state() {
        let s = PureState::ghz(1).unwrap();
        assert!((s.amplitudes()[0] - c(H)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - c(H)).norm() < 1e-12);
    }

    #[test]
    fn ghz_two_is_bell_phi_plus() {
        let bell = PureState::from_amplitudes(vec![c(H), c(0.0), c(0.0), c(H)]).unwrap();
        let f = PureState::ghz(2).unwrap().fidelity_with(&bell).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_size_errors() {
        assert!(matches!(PureState::ghz(0), Err(SimError::QubitCount { .. })));
        assert!(matches!(PureState::ghz(13), Err(SimError::QubitCount { .. })));
        assert!(PureState::ghz(12).is_ok());
    }

    #[test]
    fn z_measurement_on_ghz_collapses_to_repeated_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ghz = PureState::ghz(4).unwrap();
        for _ in 0..50 {
            let (r, reduced) = ghz.measure_qubit(3, PauliBasis::Z, &mut rng).unwrap();
            let idx = if r.bit() == 0 { 0 } else { 7 };
            let want = PureState::basis_state(3, idx).unwrap();
            assert!((reduced.fidelity_with(&want).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn x_projection_on_ghz_gives_phase_by_outcome() {
        let ghz = PureState::ghz(4).unwrap();
        let (p0, s0) = ghz.project_qubit(3, PauliBasis::X, 0).unwrap();
        let (p1, s1) = ghz.project_qubit(3, PauliBasis::X, 1).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
        // outcome 0: (|000⟩+|111⟩)/√2 exactly, including global phase
        assert!((s0.amplitudes()[0] - c(H)).norm() < 1e-12);
        assert!((s0.amplitudes()[7] - c(H)).norm() < 1e-12);
        // outcome 1: (|000⟩−|111⟩)/√2
        assert!((s1.amplitudes()[0] - c(H)).norm() < 1e-12);
        assert!((s1.amplitudes()[7] - c(-H)).norm() < 1e-12);
    }

    #[test]
    fn impossible_branch_is_rejected() {
        let zero = PureState::basis_state(2, 0).unwrap();
        assert!(matches!(
            zero.project_qubit(0, PauliBasis::Z, 1),
            Err(SimError::ImpossibleBranch { .. })
        ));
    }

    #[test]
    fn measure_out_of_range_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ghz = PureState::ghz(3).unwrap();
        assert!(matches!(
            ghz.measure_qubit(3, PauliBasis::X, &mut rng),
            Err(SimError::QubitIndex {
                qubit: 3,
                num_qubits: 3
            })
        ));
    }

    #[test]
    fn measuring_last_qubit_leaves_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = PureState::ghz(1).unwrap();
        let (_, rest) = s.measure_qubit(0, PauliBasis::Y, &mut rng).unwrap();
        assert!(rest.is_scalar());
        assert!((rest.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_correction_cancels_phase() {
        let mut s = PureState::ghz_with_phase(3, 1).unwrap();
        s.apply_pauli_z(0).unwrap();
        let f = s.fidelity_with(&PureState::ghz(3).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_leaves_all_zero_state_alone() {
        let zero = PureState::basis_state(3, 0).unwrap();
        for q in 0..3 {
            let mut s = zero.clone();
            s.apply_pauli_z(q).unwrap();
            assert_eq!(s, zero);
        }
    }

    #[test]
    fn z_twice_is_identity() {
        let ghz = PureState::ghz(4).unwrap();
        let mut s = ghz.clone();
        s.apply_hadamard(1).unwrap();
        let before = s.clone();
        s.apply_pauli_z(2).unwrap();
        s.apply_pauli_z(2).unwrap();
        assert_eq!(s, before);
        assert!(matches!(s.apply_pauli_z(4), Err(SimError::QubitIndex { .. })));
    }

    #[test]
    fn ghz3_stabilizer_values() {
        use Pauli::*;
        let s = PureState::ghz(3).unwrap();
        assert!((s.expectation(&[X, X, X]).unwrap() - 1.0).abs() < 1e-9);
        assert!((s.expectation(&[Y, Y, X]).unwrap() + 1.0).abs() < 1e-9);
        assert!(s.expectation(&[Z, I, I]).unwrap().abs() < 1e-9);
        assert!(matches!(s.expectation(&[X, X]), Err(SimError::LengthMismatch { .. })));
    }

    #[test]
    fn y_basis_bit_zero_is_plus_i() {
        // |+i⟩ = (|0⟩ + i|1⟩)/√2
        let plus_i = PureState::from_amplitudes(vec![c(H), Complex64::new(0.0, H)]).unwrap();
        let p = plus_i.outcome_probability(0, PauliBasis::Y, 0).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }
}
