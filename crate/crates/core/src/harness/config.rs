use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Check, HarnessError};
use crate::counting::DEFAULT_BUDGET;
use crate::field::FieldSpec;

/// Environment variable consulted for the worker count when none is given.
pub const WORKERS_ENV: &str = "TRACENORM_WORKERS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSelection {
    List(Vec<FieldSpec>),
    /// Every prime power `2 <= q <= max`.
    MaxQ(u64),
}

impl FieldSelection {
    pub fn specs(&self) -> Vec<FieldSpec> {
        match self {
            FieldSelection::List(list) => list.clone(),
            FieldSelection::MaxQ(max) => FieldSpec::up_to(*max),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "structured" | "json" => Ok(ReportFormat::Structured),
            other => Err(HarnessError::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub fields: FieldSelection,
    pub n_min: u32,
    pub n_max: u32,
    pub checks: BTreeSet<Check>,
    /// Upper limit on the enumeration size of any single unit.
    pub budget: u64,
    /// `None` defers to [`WORKERS_ENV`], then to machine parallelism.
    pub workers: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    /// Restrict per-tuple rows to a single `(a, b)`.
    pub tuple: Option<(u32, u32)>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::desk()
    }
}

impl SweepConfig {
    /// q in {2,3,4,5,7,8,9,11,13}, n in 1..=4, every check.
    pub fn desk() -> Self {
        let fields = [2, 3, 4, 5, 7, 8, 9, 11, 13]
            .into_iter()
            .map(|q| FieldSpec::from_order(q).expect("prime power"))
            .collect();
        SweepConfig {
            fields: FieldSelection::List(fields),
            n_min: 1,
            n_max: 4,
            checks: Check::ALL.into_iter().collect(),
            budget: DEFAULT_BUDGET,
            workers: None,
            seed: 0,
            out: None,
            format: ReportFormat::Csv,
            tuple: None,
        }
    }

    pub fn single(field: FieldSpec, n: u32, checks: impl IntoIterator<Item = Check>) -> Self {
        SweepConfig {
            fields: FieldSelection::List(vec![field]),
            n_min: n,
            n_max: n,
            checks: checks.into_iter().collect(),
            ..SweepConfig::desk()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.budget == 0 {
            return Err(HarnessError::InvalidConfig("budget must be positive".into()));
        }
        if self.n_min == 0 {
            return Err(HarnessError::InvalidConfig("n must be at least 1".into()));
        }
        if self.n_min > self.n_max {
            return Err(HarnessError::InvalidConfig(format!(
                "empty n range {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.fields.specs().is_empty() {
            return Err(HarnessError::InvalidConfig("no fields selected".into()));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::InvalidConfig("worker count must be positive".into()));
        }
        if let Some((a, b)) = self.tuple {
            for spec in self.fields.specs() {
                let q = spec.order();
                if a as u64 >= q || b as u64 >= q {
                    return Err(HarnessError::InvalidConfig(format!(
                        "({a}, {b}) is not a pair of elements of GF({q})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        resolve_workers(self.workers)
    }
}

/// Comma-separated check names; `all` selects every check.
pub fn parse_checks(s: &str) -> Result<BTreeSet<Check>, HarnessError> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Check::ALL);
        } else {
            out.insert(part.parse()?);
        }
    }
    Ok(out)
}

pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.filter(|&w| w > 0)
        .or_else(|| {
            std::env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&w: &usize| w > 0)
        })
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
