//! Dense simulation of small qubit registers.
//!
//! Pure states are amplitude vectors (up to 12 qubits); mixed states are
//! density matrices (up to 10 qubits) and serve as the exact reference for
//! Monte-Carlo estimates. Measurement removes the measured qubit and
//! compacts the remaining indices.

mod mixed;
mod pauli;
mod pure;

pub use mixed::MixedState;
pub use pauli::{MeasurementResult, Pauli, PauliBasis};
pub use pure::PureState;

use rand::Rng;
use thiserror::Error;

pub const MAX_PURE_QUBITS: usize = 12;
pub const MAX_MIXED_QUBITS: usize = 10;

/// Tolerance for algebraic identities (norm, trace, Hermiticity).
pub const NORM_TOL: f64 = 1e-9;
/// Branches below this probability are treated as impossible.
pub const BRANCH_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit state")]
    QubitIndex { qubit: usize, num_qubits: usize },
    #[error("measurement branch has probability {probability:e}, below the 1e-12 cutoff")]
    ImpossibleBranch { probability: f64 },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state is not normalized (norm/trace {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix has a negative eigenvalue")]
    NotPositive,
}

/// Anything with a Pauli-observable expectation value.
pub trait PauliExpectation {
    fn pauli_expectation(&self, paulis: &[Pauli]) -> Result<f64, SimError>;
}

impl PauliExpectation for PureState {
    fn pauli_expectation(&self, paulis: &[Pauli]) -> Result<f64, SimError> {
        self.expectation(paulis)
    }
}

impl PauliExpectation for MixedState {
    fn pauli_expectation(&self, paulis: &[Pauli]) -> Result<f64, SimError> {
        self.expectation(paulis)
    }
}

pub fn prepare_ghz(n: usize) -> Result<PureState, SimError> {
    PureState::ghz(n)
}

pub fn measure_qubit<R: Rng + ?Sized>(
    state: &PureState,
    qubit: usize,
    basis: PauliBasis,
    rng: &mut R,
) -> Result<(MeasurementResult, PureState), SimError> {
    state.measure_qubit(qubit, basis, rng)
}

pub fn apply_pauli_z(state: &PureState, qubit: usize) -> Result<PureState, SimError> {
    let mut out = state.clone();
    out.apply_pauli_z(qubit)?;
    Ok(out)
}

pub fn stabilizer_expectation<S: PauliExpectation + ?Sized>(state: &S, paulis: &[Pauli]) -> Result<f64, SimError> {
    state.pauli_expectation(paulis)
}

pub fn depolarize_global(state: &PureState, p_mix: f64) -> Result<MixedState, SimError> {
    MixedState::depolarized(state, p_mix)
}

pub fn fidelity(state: &MixedState, reference: &PureState) -> Result<f64, SimError> {
    state.fidelity(reference)
}

/// Uniformly random Pauli string on `n` qubits (each factor uniform over
/// I, X, Y, Z).
pub fn random_pauli_string<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Pauli> {
    (0..n).map(|_| Pauli::from_index(rng.random_range(0..4))).collect()
}

/// Draws one pure-state sample of the globally depolarized reference.
///
/// With probability `p_mix` the reference is returned untouched; otherwise a
/// uniformly random Pauli string is applied. Averaged over all 4^n strings
/// the twirl gives I/2^n, so sample averages converge to the
/// [`depolarize_global`] value.
pub fn sample_noisy_state<R: Rng + ?Sized>(
    reference: &PureState,
    p_mix: f64,
    rng: &mut R,
) -> Result<PureState, SimError> {
    if !(0.0..=1.0).contains(&p_mix) || p_mix.is_nan() {
        return Err(SimError::ProbabilityRange(p_mix));
    }
    if rng.random_bool(p_mix) {
        return Ok(reference.clone());
    }
    let paulis = random_pauli_string(reference.num_qubits(), rng);
    let mut out = reference.clone();
    out.apply_pauli_string(&paulis)?;
    Ok(out)
}
