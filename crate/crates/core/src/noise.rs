//! Global white-noise model calibrated to a target GHZ fidelity.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("fidelity {f} unreachable for {n} qubits: white noise reaches [{floor}, 1]")]
    UnreachableFidelity { f: f64, n: usize, floor: f64 },
}

/// Noise applied to every distributed GHZ state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NoiseModel {
    #[default]
    Ideal,
    /// Mix with I/2^n so that the fidelity with GHZ_n equals `f_target`.
    GlobalWhite { f_target: f64 },
}

impl NoiseModel {
    /// Weight of the pure GHZ component for an `n`-party network.
    pub fn p_mix(&self, n: usize) -> Result<f64, NoiseError> {
        match *self {
            NoiseModel::Ideal => Ok(1.0),
            NoiseModel::GlobalWhite { f_target } => calibrate_white_noise(f_target, n),
        }
    }

    pub fn fidelity(&self) -> f64 {
        match *self {
            NoiseModel::Ideal => 1.0,
            NoiseModel::GlobalWhite { f_target } => f_target,
        }
    }

    /// `Ideal` when `f` is exactly 1.
    pub fn from_fidelity(f: f64) -> Self {
        if f == 1.0 {
            NoiseModel::Ideal
        } else {
            NoiseModel::GlobalWhite { f_target: f }
        }
    }
}

/// Inverts F = p + (1 − p)/2^n for the pure-state weight p.
pub fn calibrate_white_noise(f_target: f64, n: usize) -> Result<f64, NoiseError> {
    let floor = 0.5f64.powi(n as i32);
    if f_target.is_nan() || f_target > 1.0 || f_target < floor - 1e-15 {
        return Err(NoiseError::UnreachableFidelity { f: f_target, n, floor });
    }
    Ok(((f_target - floor) / (1.0 - floor)).clamp(0.0, 1.0))
}
