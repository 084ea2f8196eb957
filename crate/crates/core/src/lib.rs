//! Simulation and security bookkeeping for anonymous conference key
//! agreement over a GHZ-sharing quantum network.
//!
//! * [`qsim`] dense qubit-register simulation
//! * [`protocol`] notification, round scheduling, extraction, KeyGen and
//!   Verification rounds, transcripts
//! * [`noise`] and [`adversary`] white-noise calibration and cheating
//!   non-participants
//! * [`security`] guessing probabilities, entropy and key-rate accounting
//! * [`harness`] configuration files, presets, summaries and sweeps used by
//!   the `acka` binary

pub mod adversary;
pub mod harness;
pub mod noise;
pub mod protocol;
pub mod qsim;
pub mod security;
pub mod seeds;
