//! Round records and their two on-disk views.
//!
//! The public view holds only what every party sees on the broadcast
//! channel. The sender-private view holds Δ, the sender's basis and outcome,
//! the key bits and the truthfulness of each announcement. Both are
//! line-oriented `key=value` text with a fixed field order; see
//! `docs/formats.md`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use super::config::{AnnouncementPolicy, PhaseCorrection};
use super::rounds::RoundType;
use crate::qsim::PauliBasis;

pub const PUBLIC_MAGIC: &str = "# acka public transcript v1";
pub const PRIVATE_MAGIC: &str = "# acka sender-private transcript v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranscriptError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing or malformed header: {0}")]
    Header(String),
    #[error("count mismatch: {0}")]
    CountMismatch(String),
    #[error("public and private transcripts disagree: {0}")]
    Inconsistent(String),
}

fn line_err(line: usize, message: impl Into<String>) -> TranscriptError {
    TranscriptError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnouncementPayload {
    Extraction { bit: u8 },
    Verification { basis: PauliBasis, outcome: u8 },
}

impl AnnouncementPayload {
    /// Packs the payload into one hex digit: the extraction bit, or
    /// `basis << 1 | outcome` with X = 0 and Y = 1.
    pub fn digit(&self) -> u8 {
        match *self {
            AnnouncementPayload::Extraction { bit } => bit,
            AnnouncementPayload::Verification { basis, outcome } => (u8::from(basis == PauliBasis::Y) << 1) | outcome,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Announcement {
    pub party: usize,
    pub payload: AnnouncementPayload,
    /// Sender-view only; never written to the public transcript.
    pub truthful: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "-",
        }
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "-" => Ok(Verdict::NotApplicable),
            other => Err(format!("bad verdict `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderPrivate {
    /// Δ as computed from the non-participants' announcements; absent when
    /// nothing was announced.
    pub delta: Option<u8>,
    pub sender_basis: Option<PauliBasis>,
    pub sender_outcome: Option<u8>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub index: usize,
    pub round_type: RoundType,
    pub extraction: Option<Vec<Announcement>>,
    pub verification: Option<Vec<Announcement>>,
    pub sender_private: SenderPrivate,
    pub key_bit_sender: Option<u8>,
    /// Simulation ground truth, in ascending participant order.
    pub key_bits_participants: Option<Vec<u8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub keygen: usize,
    pub verification: usize,
    pub verification_failed: usize,
}

impl Counts {
    fn tally<'a>(items: impl Iterator<Item = (RoundType, Verdict)> + 'a) -> Self {
        items.fold(Counts::default(), |mut c, (t, v)| {
            match t {
                RoundType::KeyGen => c.keygen += 1,
                RoundType::Verification => {
                    c.verification += 1;
                    if v == Verdict::Fail {
                        c.verification_failed += 1;
                    }
                }
            }
            c
        })
    }

    pub fn total(&self) -> usize {
        self.keygen + self.verification
    }
}

/// Network-level facts that are public anyway.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicHeader {
    pub n: usize,
    pub d: f64,
    pub rounds: usize,
    pub policy: AnnouncementPolicy,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateHeader {
    pub sender: usize,
    pub participants: Vec<usize>,
    pub seed: u64,
    pub correction: PhaseCorrection,
    /// Overrides the default abort threshold when set.
    pub abort_threshold: Option<f64>,
}

/// Full in-memory record of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: PublicHeader,
    pub private_header: PrivateHeader,
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    pub fn counts(&self) -> Counts {
        Counts::tally(self.records.iter().map(|r| (r.round_type, r.sender_private.verdict)))
    }

    pub fn to_public(&self) -> PublicTranscript {
        let digits =
            |anns: &Option<Vec<Announcement>>| anns.as_ref().map(|a| a.iter().map(|x| x.payload.digit()).collect());
        PublicTranscript {
            header: self.header.clone(),
            rounds: self
                .records
                .iter()
                .map(|r| PublicRound {
                    index: r.index,
                    round_type: r.round_type,
                    extraction: digits(&r.extraction),
                    verification: digits(&r.verification),
                    verdict: r.sender_private.verdict,
                })
                .collect(),
        }
    }

    pub fn to_private(&self) -> PrivateTranscript {
        let truth = |anns: &Option<Vec<Announcement>>| anns.as_ref().map(|a| a.iter().map(|x| x.truthful).collect());
        PrivateTranscript {
            header: self.private_header.clone(),
            rounds: self
                .records
                .iter()
                .map(|r| PrivateRound {
                    index: r.index,
                    round_type: r.round_type,
                    sender_private: r.sender_private.clone(),
                    key_bit_sender: r.key_bit_sender,
                    key_bits_participants: r.key_bits_participants.clone(),
                    truth_extraction: truth(&r.extraction),
                    truth_verification: truth(&r.verification),
                })
                .collect(),
        }
    }

    pub fn public_text(&self) -> String {
        self.to_public().render()
    }

    pub fn private_text(&self) -> String {
        self.to_private().render()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicRound {
    pub index: usize,
    pub round_type: RoundType,
    /// One packed digit per party.
    pub extraction: Option<Vec<u8>>,
    pub verification: Option<Vec<u8>>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PublicTranscript {
    pub header: PublicHeader,
    pub rounds: Vec<PublicRound>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateRound {
    pub index: usize,
    pub round_type: RoundType,
    pub sender_private: SenderPrivate,
    pub key_bit_sender: Option<u8>,
    pub key_bits_participants: Option<Vec<u8>>,
    pub truth_extraction: Option<Vec<bool>>,
    pub truth_verification: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateTranscript {
    pub header: PrivateHeader,
    pub rounds: Vec<PrivateRound>,
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn digits_str(d: &Option<Vec<u8>>) -> String {
    match d {
        None => "-".into(),
        Some(ds) => ds
            .iter()
            .map(|&x| char::from_digit(x as u32, 16).expect("digit < 16"))
            .collect(),
    }
}

fn flags_str(d: &Option<Vec<bool>>) -> String {
    match d {
        None => "-".into(),
        Some(fs) => fs.iter().map(|&f| if f { '1' } else { '0' }).collect(),
    }
}

/// Splits a record into values, checking that the keys appear exactly in
/// the order given.
fn fields<'a>(line: &'a str, lineno: usize, keys: &[&str]) -> Result<Vec<&'a str>, TranscriptError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let mut values = Vec::with_capacity(keys.len());
    for (i, part) in parts.iter().enumerate() {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| line_err(lineno, format!("malformed field `{part}`")))?;
        match keys.get(i) {
            Some(&want) if want == k => values.push(v),
            Some(&want) => return Err(line_err(lineno, format!("expected field `{want}`, found `{k}`"))),
            None => return Err(line_err(lineno, format!("unexpected field `{k}`"))),
        }
    }
    if values.len() < keys.len() {
        return Err(line_err(
            lineno,
            format!("record truncated: missing field `{}`", keys[values.len()]),
        ));
    }
    Ok(values)
}

fn parse_num<T: FromStr>(v: &str, what: &str, lineno: usize) -> Result<T, TranscriptError> {
    v.parse().map_err(|_| line_err(lineno, format!("bad {what} `{v}`")))
}

fn parse_round_type(v: &str, lineno: usize) -> Result<RoundType, TranscriptError> {
    match v {
        "K" => Ok(RoundType::KeyGen),
        "V" => Ok(RoundType::Verification),
        other => Err(line_err(lineno, format!("bad round type `{other}`"))),
    }
}

fn parse_digits(v: &str, n: usize, max: u8, lineno: usize) -> Result<Option<Vec<u8>>, TranscriptError> {
    if v == "-" {
        return Ok(None);
    }
    if v.chars().count() != n {
        return Err(line_err(lineno, format!("expected {n} announcement digits, got `{v}`")));
    }
    v.chars()
        .map(|c| match c.to_digit(16) {
            Some(d) if d as u8 <= max => Ok(d as u8),
            _ => Err(line_err(lineno, format!("bad announcement digit `{c}`"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn parse_bits(v: &str, len: Option<usize>, lineno: usize) -> Result<Option<Vec<u8>>, TranscriptError> {
    if v == "-" {
        return Ok(None);
    }
    if let Some(len) = len {
        if v.len() != len {
            return Err(line_err(lineno, format!("expected {len} bits, got `{v}`")));
        }
    }
    v.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(line_err(lineno, format!("bad bit `{c}`"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn parse_opt_bit(v: &str, lineno: usize) -> Result<Option<u8>, TranscriptError> {
    Ok(parse_bits(v, Some(1), lineno)?.map(|b| b[0]))
}

/// Skips the magic line, returns the header line (1-based numbers) and
/// the remaining record lines.
/// Header line plus the numbered non-blank body lines.
type Split<'a> = (&'a str, Vec<(usize, &'a str)>);

fn split_header<'a>(text: &'a str, magic: &str) -> Result<Split<'a>, TranscriptError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == magic => {}
        _ => return Err(TranscriptError::Header(format!("first line must be `{magic}`"))),
    }
    let (_, header) = lines
        .next()
        .ok_or_else(|| TranscriptError::Header("missing header line".into()))?;
    let body = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    Ok((header, body))
}

impl PublicTranscript {
    pub fn counts(&self) -> Counts {
        Counts::tally(self.rounds.iter().map(|r| (r.round_type, r.verdict)))
    }

    pub fn render(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        writeln!(out, "{PUBLIC_MAGIC}").unwrap();
        writeln!(
            out,
            "n={} D={} L={} policy={} fidelity={}",
            h.n, h.d, h.rounds, h.policy, h.fidelity
        )
        .unwrap();
        for r in &self.rounds {
            writeln!(
                out,
                "r={} t={} ext={} ver={} verdict={}",
                r.index,
                r.round_type.code(),
                digits_str(&r.extraction),
                digits_str(&r.verification),
                r.verdict.as_str()
            )
            .unwrap();
        }
        out
    }

    /// Strict parser: any field outside the public schema is an error, so a
    /// file carrying private data never parses as a public transcript.
    pub fn parse(text: &str) -> Result<Self, TranscriptError> {
        let (header_line, body) = split_header(text, PUBLIC_MAGIC)?;
        let hv = fields(header_line, 2, &["n", "D", "L", "policy", "fidelity"])?;
        let header = PublicHeader {
            n: parse_num(hv[0], "party count", 2)?,
            d: parse_num(hv[1], "security parameter", 2)?,
            rounds: parse_num(hv[2], "round count", 2)?,
            policy: hv[3].parse().map_err(|e: String| line_err(2, e))?,
            fidelity: parse_num(hv[4], "fidelity", 2)?,
        };
        let n = header.n;
        let mut rounds = Vec::with_capacity(body.len());
        for (lineno, line) in body {
            let v = fields(line, lineno, &["r", "t", "ext", "ver", "verdict"])?;
            let index: usize = parse_num(v[0], "round index", lineno)?;
            if index != rounds.len() {
                return Err(line_err(
                    lineno,
                    format!("expected round {}, found {index}", rounds.len()),
                ));
            }
            let round_type = parse_round_type(v[1], lineno)?;
            let extraction = parse_digits(v[2], n, 1, lineno)?;
            let verification = parse_digits(v[3], n, 3, lineno)?;
            let verdict: Verdict = v[4].parse().map_err(|e: String| line_err(lineno, e))?;
            match round_type {
                RoundType::KeyGen if verification.is_some() || verdict != Verdict::NotApplicable => {
                    return Err(line_err(lineno, "KeyGen round with verification data"));
                }
                RoundType::Verification
                    if verification.is_none() || extraction.is_none() || verdict == Verdict::NotApplicable =>
                {
                    return Err(line_err(lineno, "Verification round missing announcements or verdict"));
                }
                _ => {}
            }
            rounds.push(PublicRound {
                index,
                round_type,
                extraction,
                verification,
                verdict,
            });
        }
        if rounds.len() != header.rounds {
            return Err(TranscriptError::CountMismatch(format!(
                "header declares {} rounds, file holds {}",
                header.rounds,
                rounds.len()
            )));
        }
        Ok(PublicTranscript { header, rounds })
    }
}

impl PrivateTranscript {
    pub fn render(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        writeln!(out, "{PRIVATE_MAGIC}").unwrap();
        let parts: Vec<String> = h.participants.iter().map(|p| p.to_string()).collect();
        writeln!(
            out,
            "sender={} participants={} seed={} correction={} tau={}",
            h.sender,
            parts.join(","),
            h.seed,
            h.correction,
            opt(h.abort_threshold)
        )
        .unwrap();
        for r in &self.rounds {
            let sp = &r.sender_private;
            let pkeys = r
                .key_bits_participants
                .as_ref()
                .map(|b| b.iter().map(|x| x.to_string()).collect::<String>());
            writeln!(
                out,
                "r={} t={} delta={} sb={} so={} verdict={} key={} pkeys={} text={} tver={}",
                r.index,
                r.round_type.code(),
                opt(sp.delta),
                opt(sp.sender_basis),
                opt(sp.sender_outcome),
                sp.verdict.as_str(),
                opt(r.key_bit_sender),
                opt(pkeys),
                flags_str(&r.truth_extraction),
                flags_str(&r.truth_verification),
            )
            .unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TranscriptError> {
        let (header_line, body) = split_header(text, PRIVATE_MAGIC)?;
        let hv = fields(header_line, 2, &["sender", "participants", "seed", "correction", "tau"])?;
        let participants = hv[1]
            .split(',')
            .map(|p| parse_num(p, "participant", 2))
            .collect::<Result<Vec<usize>, _>>()?;
        let header = PrivateHeader {
            sender: parse_num(hv[0], "sender", 2)?,
            participants,
            seed: parse_num(hv[2], "seed", 2)?,
            correction: hv[3].parse().map_err(|e: String| line_err(2, e))?,
            abort_threshold: match hv[4] {
                "-" => None,
                t => Some(parse_num(t, "abort threshold", 2)?),
            },
        };
        let m = header.participants.len();
        let mut rounds = Vec::with_capacity(body.len());
        for (lineno, line) in body {
            let v = fields(
                line,
                lineno,
                &["r", "t", "delta", "sb", "so", "verdict", "key", "pkeys", "text", "tver"],
            )?;
            let index: usize = parse_num(v[0], "round index", lineno)?;
            if index != rounds.len() {
                return Err(line_err(
                    lineno,
                    format!("expected round {}, found {index}", rounds.len()),
                ));
            }
            let round_type = parse_round_type(v[1], lineno)?;
            let sender_basis = match v[3] {
                "-" => None,
                b => Some(b.parse::<PauliBasis>().map_err(|e| line_err(lineno, e))?),
            };
            let sender_private = SenderPrivate {
                delta: parse_opt_bit(v[2], lineno)?,
                sender_basis,
                sender_outcome: parse_opt_bit(v[4], lineno)?,
                verdict: v[5].parse().map_err(|e: String| line_err(lineno, e))?,
            };
            let to_flags = |b: Option<Vec<u8>>| b.map(|v| v.into_iter().map(|x| x == 1).collect());
            rounds.push(PrivateRound {
                index,
                round_type,
                sender_private,
                key_bit_sender: parse_opt_bit(v[6], lineno)?,
                key_bits_participants: parse_bits(v[7], Some(m), lineno)?,
                truth_extraction: to_flags(parse_bits(v[8], None, lineno)?),
                truth_verification: to_flags(parse_bits(v[9], None, lineno)?),
            });
        }
        Ok(PrivateTranscript { header, rounds })
    }

    /// Checks that this private view belongs to `public`.
    pub fn check_against(&self, public: &PublicTranscript) -> Result<(), TranscriptError> {
        if self.rounds.len() != public.rounds.len() {
            return Err(TranscriptError::Inconsistent(format!(
                "{} private rounds vs {} public rounds",
                self.rounds.len(),
                public.rounds.len()
            )));
        }
        let n = public.header.n;
        if self.header.sender >= n || self.header.participants.iter().any(|&p| p >= n) {
            return Err(TranscriptError::Inconsistent("party index beyond n".into()));
        }
        for (a, b) in self.rounds.iter().zip(&public.rounds) {
            if a.round_type != b.round_type || a.sender_private.verdict != b.verdict {
                return Err(TranscriptError::Inconsistent(format!("round {} differs", a.index)));
            }
        }
        Ok(())
    }

    /// Fraction of KeyGen rounds in which every participant's bit equals
    /// the sender's; `None` without KeyGen rounds.
    pub fn keygen_agreement(&self) -> Option<f64> {
        let (agree, total) = self
            .rounds
            .iter()
            .filter_map(|r| Some((r.key_bit_sender?, r.key_bits_participants.as_ref()?)))
            .fold((0usize, 0usize), |(a, t), (s, ps)| {
                (a + usize::from(ps.iter().all(|&p| p == s)), t + 1)
            });
        (total > 0).then(|| agree as f64 / total as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_public() -> PublicTranscript {
        PublicTranscript {
            header: PublicHeader {
                n: 4,
                d: 20.0,
                rounds: 2,
                policy: AnnouncementPolicy::VerificationOnly,
                fidelity: 0.85,
            },
            rounds: vec![
                PublicRound {
                    index: 0,
                    round_type: RoundType::KeyGen,
                    extraction: None,
                    verification: None,
                    verdict: Verdict::NotApplicable,
                },
                PublicRound {
                    index: 1,
                    round_type: RoundType::Verification,
                    extraction: Some(vec![0, 1, 1, 0]),
                    verification: Some(vec![2, 3, 0, 1]),
                    verdict: Verdict::Fail,
                },
            ],
        }
    }

    #[test]
    fn public_render_is_stable() {
        let text = sample_public().render();
        assert_eq!(
            text,
            "# acka public transcript v1\n\
             n=4 D=20 L=2 policy=verification_only fidelity=0.85\n\
             r=0 t=K ext=- ver=- verdict=-\n\
             r=1 t=V ext=0110 ver=2301 verdict=fail\n"
        );
        assert_eq!(PublicTranscript::parse(&text).unwrap(), sample_public());
    }

    #[test]
    fn truncated_record_names_line() {
        let text = sample_public().render();
        let truncated = text.replace("r=1 t=V ext=0110 ver=2301 verdict=fail", "r=1 t=V ext=0110");
        match PublicTranscript::parse(&truncated) {
            Err(TranscriptError::Line { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("truncated"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn private_fields_rejected_in_public_file() {
        let text = sample_public().render().replace("verdict=fail", "verdict=fail delta=1");
        assert!(matches!(
            PublicTranscript::parse(&text),
            Err(TranscriptError::Line { line: 4, .. })
        ));
    }

    #[test]
    fn round_count_mismatch() {
        let text = sample_public().render().replace("L=2", "L=3");
        assert!(matches!(
            PublicTranscript::parse(&text),
            Err(TranscriptError::CountMismatch(_))
        ));
    }

    #[test]
    fn counts_tally() {
        let c = sample_public().counts();
        assert_eq!(
            c,
            Counts {
                keygen: 1,
                verification: 1,
                verification_failed: 1
            }
        );
    }
}
