use std::fmt::Write as _;

use crate::protocol::{
    abort_threshold, accept_key, expected_failure_rate, Counts, PrivateTranscript, PublicTranscript,
};
use crate::security::{build_report, SecurityInputs, SecurityReport};

pub const SUMMARY_MAGIC: &str = "# acka run summary v1";

/// Per-run statistics, recomputable from the transcript files alone.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n: usize,
    pub fidelity: f64,
    pub counts: Counts,
    /// Verification pass probability; `None` without Verification rounds.
    pub pass_rate: Option<f64>,
    /// KeyGen agreement probability; needs the sender-private file.
    pub keygen_agreement: Option<f64>,
    pub expected_failure_rate: f64,
    pub threshold: f64,
    pub accepted: bool,
    /// `None` when D or η is undefined (no KeyGen or no Verification rounds).
    pub security: Option<SecurityReport>,
}

pub const CSV_HEADER: &str =
    "rounds,keygen,verification,verification_failed,pass_rate,keygen_agreement,expected_eta,threshold,accepted";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.6}"))
}

impl RunSummary {
    /// Builds the summary from the public view, plus the sender-private view
    /// when it is available. The abort threshold override lives in the
    /// private header, so public-only summaries use the default rule.
    pub fn from_views(public: &PublicTranscript, private: Option<&PrivateTranscript>) -> Self {
        let counts = public.counts();
        let n = public.header.n;
        let fidelity = public.header.fidelity;
        let tau = private.and_then(|p| p.header.abort_threshold);
        let threshold = abort_threshold(n, fidelity, counts.verification, tau);
        let pass_rate = (counts.verification > 0)
            .then(|| (counts.verification - counts.verification_failed) as f64 / counts.verification as f64);
        let accepted = accept_key(&counts, n, fidelity, tau);
        let security = build_report(&SecurityInputs {
            num_keygen: counts.keygen,
            num_verification: counts.verification,
            num_verification_failed: counts.verification_failed,
            fidelity,
            raw_rate: None,
        })
        .ok();
        RunSummary {
            n,
            fidelity,
            counts,
            pass_rate,
            keygen_agreement: private.and_then(PrivateTranscript::keygen_agreement),
            expected_failure_rate: expected_failure_rate(n, fidelity),
            threshold,
            accepted,
            security,
        }
    }

    pub fn render_text(&self) -> String {
        let c = &self.counts;
        let mut out = String::new();
        writeln!(out, "{SUMMARY_MAGIC}").unwrap();
        let na = |v: Option<f64>| v.map_or_else(|| "unavailable".to_string(), |v| format!("{v:.6}"));
        let rows: [(&str, String); 10] = [
            ("parties", self.n.to_string()),
            ("fidelity", format!("{:.6}", self.fidelity)),
            ("rounds", c.total().to_string()),
            ("keygen rounds (key length)", c.keygen.to_string()),
            ("verification rounds", c.verification.to_string()),
            ("failed verification rounds", c.verification_failed.to_string()),
            ("verification pass rate", na(self.pass_rate)),
            ("keygen agreement", na(self.keygen_agreement)),
            ("expected failure rate", format!("{:.6}", self.expected_failure_rate)),
            ("abort threshold", format!("{:.6}", self.threshold)),
        ];
        for (k, v) in rows {
            writeln!(out, "{k:<28} {v:>10}").unwrap();
        }
        writeln!(
            out,
            "{:<28} {:>10}",
            "key accepted",
            if self.accepted { "yes" } else { "no" }
        )
        .unwrap();
        match &self.security {
            Some(r) => {
                writeln!(out, "security").unwrap();
                for line in r.render_text().lines() {
                    writeln!(out, "  {line}").unwrap();
                }
            }
            None => writeln!(out, "security: unavailable (no KeyGen or no Verification rounds)").unwrap(),
        }
        out
    }

    /// Summary columns only; see [`Self::csv_header`] for the full row.
    fn csv_fields(&self) -> String {
        let c = &self.counts;
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{}",
            c.total(),
            c.keygen,
            c.verification,
            c.verification_failed,
            opt(self.pass_rate),
            opt(self.keygen_agreement),
            self.expected_failure_rate,
            self.threshold,
            u8::from(self.accepted)
        )
    }

    pub fn csv_header() -> String {
        format!("{CSV_HEADER},{}", crate::security::CSV_HEADER)
    }

    pub fn csv_row(&self) -> String {
        let security = match &self.security {
            Some(r) => r.csv_row(),
            None => ",".repeat(crate::security::CSV_HEADER.matches(',').count()),
        };
        format!("{},{security}", self.csv_fields())
    }

    pub fn render_csv(&self) -> String {
        format!("{}\n{}\n", Self::csv_header(), self.csv_row())
    }
}
