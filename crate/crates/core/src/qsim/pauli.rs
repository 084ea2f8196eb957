use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    pub fn as_char(self) -> char {
        match self {
            PauliBasis::X => 'X',
            PauliBasis::Y => 'Y',
            PauliBasis::Z => 'Z',
        }
    }
}

impl fmt::Display for PauliBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for PauliBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "X" | "x" => Ok(PauliBasis::X),
            "Y" | "y" => Ok(PauliBasis::Y),
            "Z" | "z" => Ok(PauliBasis::Z),
            other => Err(format!("unknown Pauli basis `{other}`")),
        }
    }
}

/// A single-qubit Pauli operator, including the identity. Used to build
/// tensor-product observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl From<PauliBasis> for Pauli {
    fn from(b: PauliBasis) -> Self {
        match b {
            PauliBasis::X => Pauli::X,
            PauliBasis::Y => Pauli::Y,
            PauliBasis::Z => Pauli::Z,
        }
    }
}

impl Pauli {
    /// Flips the computational basis state?
    pub(crate) fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase picked up when acting on |bit⟩: P|b⟩ = phase(b)·|b ⊕ flips⟩.
    pub(crate) fn phase(self, bit: usize) -> Complex64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) => Complex64::new(1.0, 0.0),
            (Pauli::Z, 0) => Complex64::new(1.0, 0.0),
            (Pauli::Z, _) => Complex64::new(-1.0, 0.0),
            // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
            (Pauli::Y, 0) => Complex64::new(0.0, 1.0),
            (Pauli::Y, _) => Complex64::new(0.0, -1.0),
        }
    }

    pub fn from_index(i: usize) -> Pauli {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// Outcome of a projective single-qubit measurement. Bit `b` corresponds to
/// eigenvalue `(-1)^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasurementResult {
    bit: u8,
}

impl MeasurementResult {
    pub fn from_bit(bit: u8) -> Self {
        assert!(bit <= 1, "measurement bit must be 0 or 1");
        MeasurementResult { bit }
    }

    pub fn bit(self) -> u8 {
        self.bit
    }

    pub fn eigenvalue(self) -> i8 {
        if self.bit == 0 {
            1
        } else {
            -1
        }
    }
}
