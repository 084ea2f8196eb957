use std::fmt;
use std::str::FromStr;

use crate::protocol::Roles;

/// The six four-party network configurations.
///
/// | label | sender | participants |
/// |-------|--------|--------------|
/// | A     | 0      | 1, 2         |
/// | B     | 0      | 2, 3         |
/// | C     | 1      | 2, 3         |
/// | D     | 3      | 0, 1         |
/// | E     | 0      | 1            |
/// | F     | 2      | 3            |
///
/// Labels are representative: each one is a distinct role pattern, not a
/// claim about which physical node played which role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Preset {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::A, Preset::B, Preset::C, Preset::D, Preset::E, Preset::F];
    pub const N: usize = 4;

    pub fn label(self) -> char {
        match self {
            Preset::A => 'A',
            Preset::B => 'B',
            Preset::C => 'C',
            Preset::D => 'D',
            Preset::E => 'E',
            Preset::F => 'F',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn sender(self) -> usize {
        match self {
            Preset::A | Preset::B | Preset::E => 0,
            Preset::C => 1,
            Preset::D => 3,
            Preset::F => 2,
        }
    }

    pub fn participants(self) -> &'static [usize] {
        match self {
            Preset::A => &[1, 2],
            Preset::B | Preset::C => &[2, 3],
            Preset::D => &[0, 1],
            Preset::E => &[1],
            Preset::F => &[3],
        }
    }

    pub fn roles(self) -> Roles {
        Roles::new(Self::N, self.sender(), self.participants()).expect("presets are valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Preset::A),
            "B" | "b" => Ok(Preset::B),
            "C" | "c" => Ok(Preset::C),
            "D" | "d" => Ok(Preset::D),
            "E" | "e" => Ok(Preset::E),
            "F" | "f" => Ok(Preset::F),
            other => Err(format!("unknown preset `{other}` (expected one of A-F)")),
        }
    }
}

/// Parses `A,C,E`, a range `A-F`, or a mix of both.
pub fn parse_preset_list(s: &str) -> Result<Vec<Preset>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = item.split_once('-') {
            let (a, b): (Preset, Preset) = (a.parse()?, b.parse()?);
            if a > b {
                return Err(format!("empty preset range `{item}`"));
            }
            out.extend(Preset::ALL[a.index()..=b.index()].iter().copied());
        } else {
            out.push(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err("empty preset list".into());
    }
    out.sort();
    out.dedup();
    Ok(out)
}
