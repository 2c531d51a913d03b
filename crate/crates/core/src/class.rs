//! Diagnostic classes and the recording sets they come from.

use std::fmt;
use std::str::FromStr;

/// The three EEG classes, ordered as they appear in confusion-matrix rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Healthy,
    EpilepsySyndrome,
    Seizure,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::Healthy, Class::EpilepsySyndrome, Class::Seizure];

    pub fn index(self) -> usize {
        match self {
            Class::Healthy => 0,
            Class::EpilepsySyndrome => 1,
            Class::Seizure => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Class> {
        Self::ALL.get(index).copied()
    }

    /// Machine-readable name used in CSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Healthy => "healthy",
            Class::EpilepsySyndrome => "epilepsy_syndrome",
            Class::Seizure => "seizure",
        }
    }

    /// Upper-case caption used in report tables.
    pub fn caption(self) -> &'static str {
        match self {
            Class::Healthy => "HEALTHY",
            Class::EpilepsySyndrome => "EPILEPSY SYNDROME",
            Class::Seizure => "SEIZURE",
        }
    }

    pub fn set_tag(self) -> SetTag {
        match self {
            Class::Healthy => SetTag::A,
            Class::EpilepsySyndrome => SetTag::C,
            Class::Seizure => SetTag::E,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "healthy" => Ok(Class::Healthy),
            "epilepsy_syndrome" => Ok(Class::EpilepsySyndrome),
            "seizure" => Ok(Class::Seizure),
            other => Err(format!("unknown class `{other}`")),
        }
    }
}

/// Recording set of the Bonn corpus used here: A (healthy, eyes open),
/// C (epileptogenic zone, interictal) and E (ictal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetTag {
    A,
    C,
    E,
}

impl SetTag {
    pub const ALL: [SetTag; 3] = [SetTag::A, SetTag::C, SetTag::E];

    pub fn class(self) -> Class {
        match self {
            SetTag::A => Class::Healthy,
            SetTag::C => Class::EpilepsySyndrome,
            SetTag::E => Class::Seizure,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SetTag::A => "A",
            SetTag::C => "C",
            SetTag::E => "E",
        }
    }
}

impl fmt::Display for SetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(SetTag::A),
            "C" | "c" => Ok(SetTag::C),
            "E" | "e" => Ok(SetTag::E),
            other => Err(format!("unknown set tag `{other}` (expected A, C or E)")),
        }
    }
}
