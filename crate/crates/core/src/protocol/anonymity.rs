//! Statistics over the public transcript: does any party's announcement
//! stream betray its role?

use thiserror::Error;

use super::transcript::PublicTranscript;

/// Minimum number of announcements per party.
pub const MIN_ANNOUNCEMENTS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnonymityError {
    #[error("party {party} made {count} announcements, need at least {MIN_ANNOUNCEMENTS}")]
    InsufficientData { party: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// The single extraction bit.
    Extraction,
    /// Basis bit of a verification announcement.
    Basis,
    /// Outcome bit of a verification announcement.
    Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotStats {
    pub count: usize,
    pub ones: usize,
}

impl SlotStats {
    pub fn frequency(&self) -> Option<f64> {
        (self.count > 0).then(|| self.ones as f64 / self.count as f64)
    }

    pub fn deviation(&self) -> f64 {
        self.frequency().map_or(0.0, |f| (f - 0.5).abs())
    }

    /// 4σ band of a fair coin for this many samples.
    pub fn tolerance(&self) -> f64 {
        if self.count == 0 {
            f64::INFINITY
        } else {
            4.0 * (0.25 / self.count as f64).sqrt()
        }
    }

    fn push(&mut self, bit: u8) {
        self.count += 1;
        self.ones += bit as usize;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyStats {
    pub party: usize,
    pub extraction: SlotStats,
    pub basis: SlotStats,
    pub outcome: SlotStats,
}

impl PartyStats {
    pub fn slot(&self, slot: Slot) -> &SlotStats {
        match slot {
            Slot::Extraction => &self.extraction,
            Slot::Basis => &self.basis,
            Slot::Outcome => &self.outcome,
        }
    }

    fn slots(&self) -> [(Slot, &SlotStats); 3] {
        [
            (Slot::Extraction, &self.extraction),
            (Slot::Basis, &self.basis),
            (Slot::Outcome, &self.outcome),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymityReport {
    pub parties: Vec<PartyStats>,
    /// Largest |frequency − 0.5| over all parties and slots.
    pub max_deviation: f64,
    /// Party/slot pairs outside their 4σ band.
    pub flagged: Vec<(usize, Slot)>,
}

pub fn anonymity_statistics(transcript: &PublicTranscript) -> Result<AnonymityReport, AnonymityError> {
    let n = transcript.header.n;
    let mut parties: Vec<PartyStats> = (0..n)
        .map(|party| PartyStats {
            party,
            extraction: SlotStats::default(),
            basis: SlotStats::default(),
            outcome: SlotStats::default(),
        })
        .collect();
    for round in &transcript.rounds {
        if let Some(ext) = &round.extraction {
            for (stats, &d) in parties.iter_mut().zip(ext) {
                stats.extraction.push(d & 1);
            }
        }
        if let Some(ver) = &round.verification {
            for (stats, &d) in parties.iter_mut().zip(ver) {
                stats.basis.push((d >> 1) & 1);
                stats.outcome.push(d & 1);
            }
        }
    }
    for p in &parties {
        let count = p.extraction.count + p.basis.count;
        if count < MIN_ANNOUNCEMENTS {
            return Err(AnonymityError::InsufficientData { party: p.party, count });
        }
    }
    let mut max_deviation = 0.0f64;
    let mut flagged = Vec::new();
    for p in &parties {
        for (slot, s) in p.slots() {
            max_deviation = max_deviation.max(s.deviation());
            if s.deviation() > s.tolerance() {
                flagged.push((p.party, slot));
            }
        }
    }
    Ok(AnonymityReport {
        parties,
        max_deviation,
        flagged,
    })
}

/// Largest two-sample z-score between matching party/slot frequencies of
/// two reports, using the fair-coin variance. Values below 4 mean the two
/// public transcripts are statistically indistinguishable.
pub fn compare_marginals(a: &AnonymityReport, b: &AnonymityReport) -> f64 {
    let mut worst = 0.0f64;
    for (pa, pb) in a.parties.iter().zip(&b.parties) {
        for ((_, sa), (_, sb)) in pa.slots().into_iter().zip(pb.slots()) {
            if let (Some(fa), Some(fb)) = (sa.frequency(), sb.frequency()) {
                let se = (0.25 / sa.count as f64 + 0.25 / sb.count as f64).sqrt();
                worst = worst.max((fa - fb).abs() / se);
            }
        }
    }
    worst
}
