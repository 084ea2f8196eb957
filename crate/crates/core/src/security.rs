//! Security figures of merit from round counts and the state fidelity.
//!
//! An adversary who swaps its X measurement for Z gains one key bit when it
//! happens to hit a KeyGen round. With `D` the ratio of all rounds to KeyGen
//! rounds and `η` the Verification failure rate, the chance of hitting a
//! KeyGen round undetected is
//!
//! * `1/D` when no Verification failure is tolerated,
//! * `(1 + η(D − 1))/D` when every failure is blamed on the adversary,
//! * the same with `η` replaced by `η′ = max(0, η − (1 − √F))` once the
//!   failures explained by an imperfect state of fidelity `F` are removed.
//!
//! Removing the adversary's correlations costs a fraction `h(p)` of the raw
//! key, with `h` the binary entropy.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SecurityError {
    #[error("no KeyGen rounds: D is undefined")]
    NoKeyGen,
    #[error("no Verification rounds: failure rate is undefined")]
    NoVerification,
    #[error("{failed} failed Verification rounds exceed the {total} performed")]
    TooManyFailures { failed: usize, total: usize },
    #[error("fidelity {0} outside (0, 1]")]
    Fidelity(f64),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("raw rate {0} must be non-negative")]
    RawRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityInputs {
    pub num_keygen: usize,
    pub num_verification: usize,
    pub num_verification_failed: usize,
    pub fidelity: f64,
    /// Key-relevant events per second.
    pub raw_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub d_eff: f64,
    pub eta: f64,
    pub r_f: f64,
    pub eta_prime: f64,
    pub p_no_fail: f64,
    pub p_worst: f64,
    pub p_corrected: f64,
    pub h_worst: f64,
    pub h_corrected: f64,
    pub effective_key_rate: Option<f64>,
    pub warnings: Vec<String>,
}

/// Rounds per KeyGen round, from observed counts.
pub fn effective_d(num_keygen: usize, num_verification: usize) -> Result<f64, SecurityError> {
    if num_keygen == 0 {
        return Err(SecurityError::NoKeyGen);
    }
    Ok((num_keygen + num_verification) as f64 / num_keygen as f64)
}

pub fn failure_rate(num_failed: usize, num_verification: usize) -> Result<f64, SecurityError> {
    if num_verification == 0 {
        return Err(SecurityError::NoVerification);
    }
    if num_failed > num_verification {
        return Err(SecurityError::TooManyFailures {
            failed: num_failed,
            total: num_verification,
        });
    }
    Ok(num_failed as f64 / num_verification as f64)
}

pub fn guess_prob_no_fail(d: f64) -> f64 {
    (1.0 / d).min(1.0)
}

/// (1 + η(D − 1))/D, clamped to 1.
pub fn guess_prob_worst(d: f64, eta: f64) -> f64 {
    ((1.0 + eta * (d - 1.0)) / d).min(1.0)
}

/// Lower bound 1 − √F on the honest Verification failure rate.
pub fn fidelity_failure_floor(fidelity: f64) -> f64 {
    1.0 - fidelity.sqrt()
}

pub fn corrected_eta(eta: f64, fidelity: f64) -> f64 {
    (eta - fidelity_failure_floor(fidelity)).max(0.0)
}

/// Binary entropy in bits, with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

pub fn build_report(inputs: &SecurityInputs) -> Result<SecurityReport, SecurityError> {
    let f = inputs.fidelity;
    if !(f > 0.0 && f <= 1.0) {
        return Err(SecurityError::Fidelity(f));
    }
    if let Some(r) = inputs.raw_rate {
        if r.is_nan() || r < 0.0 {
            return Err(SecurityError::RawRate(r));
        }
    }
    let d_eff = effective_d(inputs.num_keygen, inputs.num_verification)?;
    let eta = failure_rate(inputs.num_verification_failed, inputs.num_verification)?;
    let mut warnings = Vec::new();
    if d_eff < 2.0 {
        warnings.push(format!(
            "effective D = {d_eff} is below 2, the protocol's minimum security parameter"
        ));
    }
    let r_f = fidelity_failure_floor(f);
    let eta_prime = corrected_eta(eta, f);
    let p_worst = guess_prob_worst(d_eff, eta);
    let p_corrected = guess_prob_worst(d_eff, eta_prime);
    Ok(SecurityReport {
        d_eff,
        eta,
        r_f,
        eta_prime,
        p_no_fail: guess_prob_no_fail(d_eff),
        p_worst,
        p_corrected,
        h_worst: binary_entropy(p_worst),
        h_corrected: binary_entropy(p_corrected),
        effective_key_rate: inputs.raw_rate.map(|r| r / d_eff),
        warnings,
    })
}

/// Field-wise mean over per-configuration reports. The key rate is averaged
/// over the reports that carry one.
pub fn mean_report(reports: &[SecurityReport]) -> Option<SecurityReport> {
    if reports.is_empty() {
        return None;
    }
    let k = reports.len() as f64;
    let mean = |f: fn(&SecurityReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
    let rates: Vec<f64> = reports.iter().filter_map(|r| r.effective_key_rate).collect();
    Some(SecurityReport {
        d_eff: mean(|r| r.d_eff),
        eta: mean(|r| r.eta),
        r_f: mean(|r| r.r_f),
        eta_prime: mean(|r| r.eta_prime),
        p_no_fail: mean(|r| r.p_no_fail),
        p_worst: mean(|r| r.p_worst),
        p_corrected: mean(|r| r.p_corrected),
        h_worst: mean(|r| r.h_worst),
        h_corrected: mean(|r| r.h_corrected),
        effective_key_rate: (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64),
        warnings: Vec::new(),
    })
}

pub const CSV_HEADER: &str = "D_eff,eta,r_f,eta_prime,p_no_fail,p_worst,p_corrected,h_worst,h_corrected,key_rate";

impl SecurityReport {
    fn values(&self) -> [f64; 9] {
        [
            self.d_eff,
            self.eta,
            self.r_f,
            self.eta_prime,
            self.p_no_fail,
            self.p_worst,
            self.p_corrected,
            self.h_worst,
            self.h_corrected,
        ]
    }

    /// One CSV row matching [`CSV_HEADER`]; an absent key rate is an empty
    /// cell.
    pub fn csv_row(&self) -> String {
        let mut row: Vec<String> = self.values().iter().map(|v| format!("{v:.6}")).collect();
        row.push(self.effective_key_rate.map_or_else(String::new, |r| format!("{r:.6}")));
        row.join(",")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let rows = [
            ("effective D", self.d_eff),
            ("failure rate eta", self.eta),
            ("fidelity floor r_f", self.r_f),
            ("corrected eta'", self.eta_prime),
            ("p (no failed Verification)", self.p_no_fail),
            ("p (worst case)", self.p_worst),
            ("p (non-unit fidelity)", self.p_corrected),
            ("h(p worst)", self.h_worst),
            ("h(p corrected)", self.h_corrected),
        ];
        for (label, v) in rows {
            writeln!(out, "{label:<28} {v:>10.6}").unwrap();
        }
        match self.effective_key_rate {
            Some(r) => writeln!(out, "{:<28} {r:>10.6}", "effective key rate (1/s)").unwrap(),
            None => writeln!(out, "{:<28} {:>10}", "effective key rate (1/s)", "n/a").unwrap(),
        }
        for w in &self.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_d_examples() {
        assert_eq!(effective_d(500, 9500).unwrap(), 20.0);
        assert_eq!(effective_d(1, 0).unwrap(), 1.0);
        assert_eq!(effective_d(0, 10), Err(SecurityError::NoKeyGen));
    }

    #[test]
    fn degenerate_d_is_flagged() {
        let r = build_report(&SecurityInputs {
            num_keygen: 1,
            num_verification: 1,
            num_verification_failed: 0,
            fidelity: 1.0,
            raw_rate: None,
        })
        .unwrap();
        assert_eq!(r.d_eff, 2.0);
        assert!(r.warnings.is_empty());
        let r = build_report(&SecurityInputs {
            num_keygen: 3,
            num_verification: 1,
            num_verification_failed: 0,
            fidelity: 1.0,
            raw_rate: None,
        })
        .unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn failure_rate_examples() {
        assert_eq!(failure_rate(0, 1000).unwrap(), 0.0);
        assert_eq!(failure_rate(1000, 1000).unwrap(), 1.0);
        assert!((failure_rate(107, 1000).unwrap() - 0.107).abs() < 1e-15);
        assert_eq!(failure_rate(0, 0), Err(SecurityError::NoVerification));
        assert!(matches!(failure_rate(5, 4), Err(SecurityError::TooManyFailures { .. })));
    }

    #[test]
    fn guessing_probabilities() {
        assert!((guess_prob_no_fail(25.0) - 0.04).abs() < 1e-15);
        assert!((guess_prob_no_fail(20.0) - 0.05).abs() < 1e-15);
        assert!((guess_prob_no_fail(32.0) - 0.03125).abs() < 1e-15);
        assert!((guess_prob_worst(25.0, 0.107) - 0.14272).abs() < 1e-12);
        assert!((guess_prob_worst(25.0, 0.0) - 0.04).abs() < 1e-15);
        assert_eq!(guess_prob_worst(25.0, 1.0), 1.0);
    }

    #[test]
    fn fidelity_floor_and_correction() {
        assert_eq!(fidelity_failure_floor(1.0), 0.0);
        assert!((fidelity_failure_floor(0.85) - 0.07805).abs() < 1e-5);
        assert!((fidelity_failure_floor(0.25) - 0.5).abs() < 1e-15);
        assert!((corrected_eta(0.107, 0.85) - 0.0290).abs() < 1e-4);
        assert_eq!(corrected_eta(0.05, 0.85), 0.0);
        assert_eq!(corrected_eta(0.2, 1.0), 0.2);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.0679) - 0.3582).abs() < 1e-3);
    }

    #[test]
    fn report_for_reference_inputs() {
        // D = 25 from 400 KeyGen out of 10000 rounds, η ≈ 0.107
        let r = build_report(&SecurityInputs {
            num_keygen: 400,
            num_verification: 9600,
            num_verification_failed: 1027,
            fidelity: 0.85,
            raw_rate: Some(0.33),
        })
        .unwrap();
        assert!((r.d_eff - 25.0).abs() < 1e-12);
        assert!((r.eta - 0.107).abs() < 1e-3);
        assert!((r.p_no_fail - 0.04).abs() < 1e-12);
        assert!((r.p_worst - 0.143).abs() < 1e-3);
        assert!((r.p_corrected - 0.068).abs() < 1e-3);
        assert!((r.effective_key_rate.unwrap() - 0.0132).abs() < 1e-12);
    }

    #[test]
    fn key_rate_at_d20() {
        let r = build_report(&SecurityInputs {
            num_keygen: 500,
            num_verification: 9500,
            num_verification_failed: 0,
            fidelity: 1.0,
            raw_rate: Some(0.33),
        })
        .unwrap();
        assert!((r.effective_key_rate.unwrap() - 0.0165).abs() < 1e-12);
        assert_eq!(r.p_worst, r.p_no_fail);
        assert_eq!(r.eta_prime, r.eta);
    }

    #[test]
    fn invalid_inputs() {
        let base = SecurityInputs {
            num_keygen: 10,
            num_verification: 100,
            num_verification_failed: 0,
            fidelity: 0.0,
            raw_rate: None,
        };
        assert_eq!(build_report(&base), Err(SecurityError::Fidelity(0.0)));
        let neg = SecurityInputs {
            fidelity: 0.9,
            raw_rate: Some(-1.0),
            ..base
        };
        assert_eq!(build_report(&neg), Err(SecurityError::RawRate(-1.0)));
    }

    #[test]
    fn csv_row_shape() {
        let r = build_report(&SecurityInputs {
            num_keygen: 500,
            num_verification: 9500,
            num_verification_failed: 0,
            fidelity: 1.0,
            raw_rate: None,
        })
        .unwrap();
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.ends_with(','));
        assert!(row.starts_with("20.000000,0.000000,"));
    }
}
