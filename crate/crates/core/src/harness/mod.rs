//! Verification sweeps over `(field, n)` units and their reports.

mod config;
mod report;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundError;
use crate::character::CharacterError;
use crate::counting::CountError;
use crate::field::FieldError;

pub use config::{parse_checks, resolve_workers, FieldSelection, ReportFormat, SweepConfig, WORKERS_ENV};
pub use report::{
    parse_csv, parse_structured, CheckTally, ParsedCsv, ReportRow, RunInfo, SweepReport, Tallies, UnitStatus,
    UnitSummary,
};
pub use sweep::{run_sweep, run_sweep_timed};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed report: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// A named identity or bound. Declaration order is the report column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Lemma21,
    Gauss,
    DavenportHasse,
    Katz,
    Improved,
    ZeroTrace,
    Toric,
    Frobenius,
    SpecialU,
    PrimeDegree,
    Divisibility,
    Partition,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::Lemma21,
        Check::Gauss,
        Check::DavenportHasse,
        Check::Katz,
        Check::Improved,
        Check::ZeroTrace,
        Check::Toric,
        Check::Frobenius,
        Check::SpecialU,
        Check::PrimeDegree,
        Check::Divisibility,
        Check::Partition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Lemma21 => "lemma21",
            Check::Gauss => "gauss",
            Check::DavenportHasse => "davenport-hasse",
            Check::Katz => "katz",
            Check::Improved => "improved",
            Check::ZeroTrace => "zero-trace",
            Check::Toric => "toric",
            Check::Frobenius => "frobenius",
            Check::SpecialU => "special-u",
            Check::PrimeDegree => "prime-degree",
            Check::Divisibility => "divisibility",
            Check::Partition => "partition",
        }
    }

    /// Checks evaluated once per unit rather than per `(a, b)`.
    pub fn is_unit_level(self) -> bool {
        matches!(self, Check::DavenportHasse | Check::Partition)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| HarnessError::UnknownCheck(s.trim().to_string()))
    }
}

/// Outcome of one check on one row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// Passed with deviation within 1 of the radius.
    Tight,
    Fail,
    NotApplicable,
    Budget,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Tight => "tight",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "-",
            Verdict::Budget => "budget",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_checked(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Tight | Verdict::Fail)
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Tight)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "tight" => Ok(Verdict::Tight),
            "FAIL" => Ok(Verdict::Fail),
            "-" | "" => Ok(Verdict::NotApplicable),
            "budget" => Ok(Verdict::Budget),
            other => Err(HarnessError::Parse(format!("unknown verdict `{other}`"))),
        }
    }
}
