//! `key = value` run configuration files.
//!
//! Blank lines and everything after `#` are ignored. Every key may appear at
//! most once; unknown keys are rejected. See `docs/formats.md` for the full
//! key table.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::preset::Preset;
use super::HarnessError;
use crate::adversary::AdversaryStrategy;
use crate::noise::NoiseModel;
use crate::protocol::{AnnouncementPolicy, NetworkConfig, PhaseCorrection, Roles};
use crate::qsim::PauliBasis;

pub const DEFAULT_D: f64 = 20.0;
pub const DEFAULT_ROUNDS: usize = 10_000;
pub const DEFAULT_OUTPUT_DIR: &str = "acka-out";

pub const KEYS: &[&str] = &[
    "preset",
    "n",
    "sender",
    "participants",
    "D",
    "L",
    "noise.F_target",
    "adversary.party",
    "adversary.kind",
    "adversary.p_guess",
    "announcement_policy",
    "phase_correction",
    "abort_threshold",
    "fixed_settings",
    "seed",
    "output_dir",
];

/// A parsed and validated configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfigFile {
    pub config: NetworkConfig,
    pub preset: Option<Preset>,
    pub output_dir: PathBuf,
}

struct Entry {
    line: usize,
    value: String,
}

fn bad(line: usize, key: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

/// Parses a comma-separated X/Y pattern such as `X,Y` or `XY`.
pub fn parse_bases(s: &str) -> Result<Vec<PauliBasis>, String> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| PauliBasis::from_str(&c.to_string()))
        .collect()
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(bad(line, content, "expected `key = value`"));
            };
            let k = k.trim();
            let Some(&key) = KEYS.iter().find(|&&known| known == k) else {
                return Err(HarnessError::UnknownKey {
                    line,
                    key: k.to_string(),
                });
            };
            if let Some(prev) = entries.get(key) {
                return Err(bad(
                    line,
                    key,
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
            entries.insert(
                key,
                Entry {
                    line,
                    value: v.trim().to_string(),
                },
            );
        }
        Self::from_entries(&entries)
    }

    fn from_entries(e: &BTreeMap<&'static str, Entry>) -> Result<Self, HarnessError> {
        fn get<T: FromStr>(e: &BTreeMap<&'static str, Entry>, key: &'static str) -> Result<Option<T>, HarnessError> {
            match e.get(key) {
                None => Ok(None),
                Some(en) => en
                    .value
                    .parse()
                    .map(Some)
                    .map_err(|_| bad(en.line, key, format!("invalid value `{}`", en.value))),
            }
        }
        let line_of = |key: &str| e.get(key).map_or(0, |en| en.line);

        let preset: Option<Preset> = match e.get("preset") {
            None => None,
            Some(en) => Some(en.value.parse().map_err(|m: String| bad(en.line, "preset", m))?),
        };
        let n: Option<usize> = get(e, "n")?;
        let sender: Option<usize> = get(e, "sender")?;
        let participants: Option<Vec<usize>> = match e.get("participants") {
            None => None,
            Some(en) => Some(
                en.value
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(en.line, "participants", format!("invalid party list `{}`", en.value)))?,
            ),
        };

        let roles = match preset {
            Some(p) => {
                for key in ["sender", "participants"] {
                    if e.contains_key(key) {
                        return Err(bad(line_of(key), key, "conflicts with `preset`"));
                    }
                }
                if let Some(n) = n.filter(|&n| n != Preset::N) {
                    return Err(bad(line_of("n"), "n", format!("presets have n = 4, not {n}")));
                }
                p.roles()
            }
            None => {
                let n = n.ok_or(HarnessError::MissingKey("n"))?;
                let sender = sender.ok_or(HarnessError::MissingKey("sender"))?;
                let participants = participants.ok_or(HarnessError::MissingKey("participants"))?;
                Roles::new(n, sender, &participants)?
            }
        };

        let d = get(e, "D")?.unwrap_or(DEFAULT_D);
        let rounds = get(e, "L")?.unwrap_or(DEFAULT_ROUNDS);
        let seed = get(e, "seed")?.unwrap_or(0);
        let mut config = NetworkConfig::new(roles, d, rounds, seed);
        config.noise = NoiseModel::from_fidelity(get(e, "noise.F_target")?.unwrap_or(1.0));
        if let Some(en) = e.get("announcement_policy") {
            config.policy = en
                .value
                .parse::<AnnouncementPolicy>()
                .map_err(|m| bad(en.line, "announcement_policy", m))?;
        }
        if let Some(en) = e.get("phase_correction") {
            config.phase_correction = en
                .value
                .parse::<PhaseCorrection>()
                .map_err(|m| bad(en.line, "phase_correction", m))?;
        }
        config.abort_threshold = get(e, "abort_threshold")?;
        if let Some(en) = e.get("fixed_settings") {
            config.fixed_settings = Some(parse_bases(&en.value).map_err(|m| bad(en.line, "fixed_settings", m))?);
        }

        let party: Option<usize> = get(e, "adversary.party")?;
        let p_guess: Option<f64> = get(e, "adversary.p_guess")?;
        let kind = match e.get("adversary.kind") {
            None => None,
            Some(en) => Some(
                en.value
                    .parse::<AdversaryStrategy>()
                    .map_err(|m| bad(en.line, "adversary.kind", m))?,
            ),
        };
        match (party, kind) {
            (None, None) => {
                if p_guess.is_some() {
                    return Err(bad(
                        line_of("adversary.p_guess"),
                        "adversary.p_guess",
                        "no adversary configured",
                    ));
                }
            }
            (None, Some(_)) => return Err(HarnessError::MissingKey("adversary.party")),
            (Some(party), kind) => {
                let strategy = match (kind.unwrap_or_default(), p_guess) {
                    (AdversaryStrategy::GuessKeyGen { .. }, Some(p_guess)) => {
                        AdversaryStrategy::GuessKeyGen { p_guess }
                    }
                    (AdversaryStrategy::GuessKeyGen { .. }, None) => {
                        return Err(HarnessError::MissingKey("adversary.p_guess"));
                    }
                    (_, Some(_)) => {
                        return Err(bad(
                            line_of("adversary.p_guess"),
                            "adversary.p_guess",
                            "only meaningful for guess_keygen",
                        ));
                    }
                    (s, None) => s,
                };
                config.adversaries.insert(party, strategy);
            }
        }

        config.validate()?;
        let output_dir = e
            .get("output_dir")
            .map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), |en| PathBuf::from(&en.value));
        Ok(RunConfigFile {
            config,
            preset,
            output_dir,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ConfigError;

    #[test]
    fn full_file() {
        let text = "\
# preset A by hand
n = 4
sender = 0
participants = 1, 2   # two participants
D = 25
L = 500
noise.F_target = 0.85
adversary.party = 3
adversary.kind = guess_keygen
adversary.p_guess = 0.25
announcement_policy = every_round
seed = 42
output_dir = /tmp/x
";
        let f = RunConfigFile::parse(text).unwrap();
        let c = &f.config;
        assert_eq!(c.roles, Preset::A.roles());
        assert_eq!((c.d, c.rounds, c.seed), (25.0, 500, 42));
        assert_eq!(c.noise, NoiseModel::GlobalWhite { f_target: 0.85 });
        assert_eq!(c.adversaries[&3], AdversaryStrategy::GuessKeyGen { p_guess: 0.25 });
        assert_eq!(c.policy, AnnouncementPolicy::EveryRound);
        assert_eq!(f.output_dir, PathBuf::from("/tmp/x"));
        assert_eq!(f.preset, None);
    }

    #[test]
    fn preset_and_defaults() {
        let f = RunConfigFile::parse("preset = D\n").unwrap();
        assert_eq!(f.preset, Some(Preset::D));
        assert_eq!(f.config.roles.sender(), 3);
        assert_eq!(f.config.rounds, DEFAULT_ROUNDS);
        assert_eq!(f.config.d, DEFAULT_D);
        assert_eq!(f.config.noise, NoiseModel::Ideal);
        assert_eq!(f.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
    }

    #[test]
    fn misspelled_key_is_named() {
        let err = RunConfigFile::parse("n = 4\nsender = 0\npartcipants = 1,2\n").unwrap_err();
        assert_eq!(
            err,
            HarnessError::UnknownKey {
                line: 3,
                key: "partcipants".into()
            }
        );
        assert!(err.to_string().contains("partcipants"));
    }

    #[test]
    fn rejections() {
        let cases = [
            "preset = A\nsender = 1\n",
            "preset = A\nn = 5\n",
            "preset = Q\n",
            "preset = A\nD = abc\n",
            "preset = A\nseed = 1\nseed = 2\n",
            "preset = A\njust a line\n",
            "preset = A\nadversary.kind = always_z\n",
            "preset = A\nadversary.party = 3\nadversary.kind = guess_keygen\n",
            "preset = A\nadversary.party = 3\nadversary.p_guess = 0.5\n",
            "preset = A\nfixed_settings = XQ\n",
            "n = 4\nsender = 0\n",
        ];
        for c in cases {
            assert!(RunConfigFile::parse(c).is_err(), "{c:?} should fail");
        }
    }

    #[test]
    fn semantic_errors_propagate() {
        let err = RunConfigFile::parse("preset = A\nadversary.party = 1\nadversary.kind = always_z\n").unwrap_err();
        assert_eq!(err, HarnessError::Config(ConfigError::AdversaryRole(1)));
        let err = RunConfigFile::parse("preset = A\nD = 1\n").unwrap_err();
        assert_eq!(err, HarnessError::Config(ConfigError::SecurityParameter(1.0)));
    }

    #[test]
    fn fixed_settings_pattern() {
        let f = RunConfigFile::parse("preset = B\nfixed_settings = X, Y\n").unwrap();
        assert_eq!(f.config.fixed_settings, Some(vec![PauliBasis::X, PauliBasis::Y]));
        assert!(RunConfigFile::parse("preset = E\nfixed_settings = XY\n").is_err());
    }
}
