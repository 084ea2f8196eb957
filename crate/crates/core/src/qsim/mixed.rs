use num_complex::Complex64;

use super::pure::string_action;
use super::{Pauli, PureState, SimError, MAX_MIXED_QUBITS, NORM_TOL};

/// Dense density operator, row-major, for up to 10 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    num_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl MixedState {
    pub fn from_pure(state: &PureState) -> Result<Self, SimError> {
        let n = state.num_qubits();
        check_qubits(n)?;
        let dim = 1usize << n;
        let amps = state.amplitudes();
        let mut data = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                data.push(a * b.conj());
            }
        }
        Ok(MixedState {
            num_qubits: n,
            dim,
            data,
        })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, SimError> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        let w = 1.0 / dim as f64;
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(w, 0.0);
        }
        Ok(MixedState {
            num_qubits: n,
            dim,
            data,
        })
    }

    /// Validates an explicit row-major matrix: Hermitian and unit trace
    /// within 1e-9, and positive semidefinite down to −1e-9.
    pub fn from_matrix(n: usize, data: Vec<Complex64>) -> Result<Self, SimError> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(SimError::LengthMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let state = MixedState {
            num_qubits: n,
            dim,
            data,
        };
        if !state.is_hermitian(NORM_TOL) {
            return Err(SimError::NotHermitian);
        }
        let tr = state.trace();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized(tr));
        }
        if !state.is_psd(NORM_TOL) {
            return Err(SimError::NotPositive);
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.element(i, i).re).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| (self.element(i, j) - self.element(j, i).conj()).norm() <= tol))
    }

    /// Cholesky of ρ + tol·I; succeeds iff every eigenvalue of ρ exceeds −tol.
    fn is_psd(&self, tol: f64) -> bool {
        let d = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); d * d];
        for k in 0..d {
            let mut diag = self.element(k, k).re + tol;
            for j in 0..k {
                diag -= l[k * d + j].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let lkk = diag.sqrt();
            l[k * d + k] = Complex64::new(lkk, 0.0);
            for i in (k + 1)..d {
                let mut v = self.element(i, k);
                for j in 0..k {
                    v -= l[i * d + j] * l[k * d + j].conj();
                }
                l[i * d + k] = v / lkk;
            }
        }
        true
    }

    /// p_mix·|ψ⟩⟨ψ| + (1 − p_mix)·I/2^n.
    pub fn depolarized(state: &PureState, p_mix: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&p_mix) || p_mix.is_nan() {
            return Err(SimError::ProbabilityRange(p_mix));
        }
        let mut rho = Self::from_pure(state)?;
        let white = (1.0 - p_mix) / rho.dim as f64;
        for (idx, v) in rho.data.iter_mut().enumerate() {
            *v *= p_mix;
            if idx / rho.dim == idx % rho.dim {
                *v += white;
            }
        }
        Ok(rho)
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn fidelity(&self, reference: &PureState) -> Result<f64, SimError> {
        if reference.num_qubits() != self.num_qubits {
            return Err(SimError::DimensionMismatch {
                left: self.num_qubits,
                right: reference.num_qubits(),
            });
        }
        let psi = reference.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            if psi[i].norm_sqr() == 0.0 {
                continue;
            }
            let row: Complex64 = (0..self.dim).map(|j| self.element(i, j) * psi[j]).sum();
            acc += psi[i].conj() * row;
        }
        Ok(acc.re)
    }

    /// Tr(ρP) for a tensor-product Pauli observable.
    pub fn expectation(&self, paulis: &[Pauli]) -> Result<f64, SimError> {
        if paulis.len() != self.num_qubits {
            return Err(SimError::LengthMismatch {
                expected: self.num_qubits,
                got: paulis.len(),
            });
        }
        let (flip, phases) = string_action(paulis, self.num_qubits);
        let value: Complex64 = (0..self.dim).map(|j| self.element(j, j ^ flip) * phases(j)).sum();
        Ok(value.re)
    }

    /// Total weight of the computational basis states selected by `keep`.
    pub fn diagonal_probability(&self, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.dim).filter(|&i| keep(i)).map(|i| self.element(i, i).re).sum()
    }
}

fn check_qubits(n: usize) -> Result<(), SimError> {
    if (1..=MAX_MIXED_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(SimError::QubitCount {
            n,
            min: 1,
            max: MAX_MIXED_QUBITS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_projector_has_unit_fidelity() {
        let ghz = PureState::ghz(4).unwrap();
        let rho = MixedState::from_pure(&ghz).unwrap();
        assert!((rho.fidelity(&ghz).unwrap() - 1.0).abs() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_fidelity_is_one_over_dim() {
        let ghz = PureState::ghz(4).unwrap();
        let rho = MixedState::maximally_mixed(4).unwrap();
        assert!((rho.fidelity(&ghz).unwrap() - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn depolarize_endpoints_and_calibrated_point() {
        let ghz = PureState::ghz(4).unwrap();
        let one = MixedState::depolarized(&ghz, 1.0).unwrap();
        assert_eq!(one, MixedState::from_pure(&ghz).unwrap());
        let zero = MixedState::depolarized(&ghz, 0.0).unwrap();
        assert!((zero.fidelity(&ghz).unwrap() - 1.0 / 16.0).abs() < 1e-12);
        let mid = MixedState::depolarized(&ghz, 0.84).unwrap();
        assert!((mid.fidelity(&ghz).unwrap() - 0.85).abs() < 1e-9);
        assert!(matches!(
            MixedState::depolarized(&ghz, 1.5),
            Err(SimError::ProbabilityRange(_))
        ));
        assert!(matches!(
            MixedState::depolarized(&ghz, -0.1),
            Err(SimError::ProbabilityRange(_))
        ));
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let rho = MixedState::maximally_mixed(3).unwrap();
        let ghz = PureState::ghz(4).unwrap();
        assert!(matches!(rho.fidelity(&ghz), Err(SimError::DimensionMismatch { .. })));
    }

    #[test]
    fn from_matrix_validates() {
        let ghz = PureState::ghz(2).unwrap();
        let rho = MixedState::depolarized(&ghz, 0.3).unwrap();
        let ok = MixedState::from_matrix(2, rho.data.clone()).unwrap();
        assert_eq!(ok, rho);

        // trace 2
        let doubled: Vec<_> = rho.data.iter().map(|v| v * 2.0).collect();
        assert!(matches!(
            MixedState::from_matrix(2, doubled),
            Err(SimError::NotNormalized(_))
        ));

        // diag(1.5, -0.5) is Hermitian with unit trace but not positive
        let bad = vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ];
        assert!(matches!(MixedState::from_matrix(1, bad), Err(SimError::NotPositive)));

        let skew = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.2, 0.0),
            Complex64::new(0.5, 0.0),
        ];
        assert!(matches!(MixedState::from_matrix(1, skew), Err(SimError::NotHermitian)));
    }

    #[test]
    fn mixed_expectation_matches_pure_expectation() {
        use Pauli::*;
        let ghz = PureState::ghz(3).unwrap();
        let rho = MixedState::from_pure(&ghz).unwrap();
        for p in [[X, X, X], [Y, Y, X], [X, Y, Y], [Z, Z, I], [Z, I, I], [Y, X, I]] {
            let a = ghz.expectation(&p).unwrap();
            let b = rho.expectation(&p).unwrap();
            assert!((a - b).abs() < 1e-12, "{p:?}");
        }
        let noisy = MixedState::depolarized(&ghz, 0.6).unwrap();
        assert!((noisy.expectation(&[X, X, X]).unwrap() - 0.6).abs() < 1e-12);
        assert!((noisy.expectation(&[I, I, I]).unwrap() - 1.0).abs() < 1e-12);
    }
}
