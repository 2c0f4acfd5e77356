use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Check, HarnessError, SweepConfig, Verdict};
use crate::field::FieldSpec;

pub const REPORT_VERSION: u32 = 1;

const FIXED_COLUMNS: [&str; 8] = ["q", "n", "a", "b", "u", "n_tn", "n_toric", "frob_trace"];

/// One `(q, n, a, b)` tuple, or a unit-level row when `a` and `b` are absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub q: u32,
    pub n: u32,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub u: Option<u32>,
    pub trace_norm: Option<u64>,
    pub toric: Option<u64>,
    pub frobenius_trace: Option<i128>,
    /// Applicable checks only.
    pub verdicts: BTreeMap<Check, Verdict>,
}

impl ReportRow {
    pub fn unit(q: u32, n: u32) -> Self {
        ReportRow {
            q,
            n,
            a: None,
            b: None,
            u: None,
            trace_norm: None,
            toric: None,
            frobenius_trace: None,
            verdicts: BTreeMap::new(),
        }
    }

    pub fn verdict(&self, check: Check) -> Verdict {
        self.verdicts.get(&check).copied().unwrap_or(Verdict::NotApplicable)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    /// Subset of `passed`.
    pub tight: u64,
}

impl CheckTally {
    fn record(&mut self, v: Verdict) {
        if !v.is_checked() {
            return;
        }
        self.checked += 1;
        if v.is_pass() {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if v == Verdict::Tight {
            self.tight += 1;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub tight: u64,
    /// Rows that carry a budget verdict, one per oversized unit.
    pub budget_exceeded: u64,
    pub per_check: BTreeMap<Check, CheckTally>,
}

impl Tallies {
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a ReportRow>) -> Self {
        let mut t = Tallies::default();
        let mut total = CheckTally::default();
        for row in rows {
            if row.verdicts.values().any(|&v| v == Verdict::Budget) {
                t.budget_exceeded += 1;
            }
            for (&check, &v) in &row.verdicts {
                if v.is_checked() {
                    t.per_check.entry(check).or_default().record(v);
                    total.record(v);
                }
            }
        }
        t.checked = total.checked;
        t.passed = total.passed;
        t.failed = total.failed;
        t.tight = total.tight;
        t
    }

    /// Totals agree with the per-check entries and `checked = passed + failed`.
    pub fn consistent(&self) -> bool {
        let sum = |f: fn(&CheckTally) -> u64| self.per_check.values().map(f).sum::<u64>();
        self.checked == self.passed + self.failed
            && self.tight <= self.passed
            && self.checked == sum(|c| c.checked)
            && self.passed == sum(|c| c.passed)
            && self.failed == sum(|c| c.failed)
            && self.tight == sum(|c| c.tight)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum UnitStatus {
    Complete,
    BudgetExceeded { needed: u64, budget: u64 },
}

/// Field data for one `(q, n)` unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub field: FieldSpec,
    pub q: u32,
    pub n: u32,
    pub seed: u64,
    /// Modulus coefficients of `GF(q)` over `GF(p)`, low degree first.
    pub modulus: Vec<u32>,
    pub generator: u32,
    /// Modulus of `GF(q^(n+1))`; absent when the unit was not built.
    pub big_modulus: Option<Vec<u32>>,
    #[serde(flatten)]
    pub status: UnitStatus,
}

/// The nondeterministic part of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunInfo {
    pub started_unix_ms: u64,
    pub wall_ms: u64,
    /// Wall-clock per unit, in unit order.
    pub unit_ms: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: u32,
    pub config: SweepConfig,
    pub units: Vec<UnitSummary>,
    pub rows: Vec<ReportRow>,
    pub tallies: Tallies,
    /// Largest `deviation² / radius²` seen per bound.
    pub max_ratio: BTreeMap<Check, f64>,
    /// Largest rounding residual seen per character-sum check.
    pub max_residual: BTreeMap<Check, f64>,
}

impl SweepReport {
    pub fn budget_exceeded_units(&self) -> usize {
        self.units
            .iter()
            .filter(|u| matches!(u.status, UnitStatus::BudgetExceeded { .. }))
            .count()
    }

    /// 1 on any failure, else 3 if a unit exceeded the budget, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.tallies.failed > 0 {
            1
        } else if self.budget_exceeded_units() > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_csv(&self, run: &RunInfo) -> Result<String, HarnessError> {
        let mut out = String::new();
        writeln!(out, "# tracenorm report v{}", self.version).unwrap();
        writeln!(out, "# run: {}", serde_json::to_string(run)?).unwrap();
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?).unwrap();
        for unit in &self.units {
            writeln!(out, "# unit: {}", serde_json::to_string(unit)?).unwrap();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = FIXED_COLUMNS
            .into_iter()
            .chain(Check::ALL.iter().map(|c| c.name()))
            .collect();
        w.write_record(&header)?;
        for row in &self.rows {
            w.write_record(csv_fields(row))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner().map_err(|e| e.into_error())?).expect("ascii"));
        writeln!(out, "# tallies: {}", serde_json::to_string(&self.tallies)?).unwrap();
        writeln!(out, "# max-ratio: {}", serde_json::to_string(&self.max_ratio)?).unwrap();
        writeln!(out, "# max-residual: {}", serde_json::to_string(&self.max_residual)?).unwrap();
        Ok(out)
    }

    /// A single JSON document whose first line holds the run timing.
    pub fn to_structured(&self, run: &RunInfo) -> Result<String, HarnessError> {
        Ok(format!(
            "{{\"run\":{},\n\"report\":{}}}\n",
            serde_json::to_string(run)?,
            serde_json::to_string_pretty(self)?
        ))
    }

    /// Human-readable summary lines.
    pub fn summary(&self) -> String {
        let t = &self.tallies;
        let mut s = format!(
            "checked={} passed={} failed={} tight={} budget_exceeded={}\n",
            t.checked, t.passed, t.failed, t.tight, t.budget_exceeded
        );
        for (check, c) in &t.per_check {
            write!(
                s,
                "  {check}: checked={} passed={} failed={} tight={}",
                c.checked, c.passed, c.failed, c.tight
            )
            .unwrap();
            if let Some(r) = self.max_ratio.get(check) {
                write!(s, " max_ratio={r:.6}").unwrap();
            }
            if let Some(r) = self.max_residual.get(check) {
                write!(s, " max_residual={r:.3e}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn csv_fields(row: &ReportRow) -> Vec<String> {
    let star = |v: Option<u32>| v.map_or_else(|| "*".to_string(), |v| v.to_string());
    let mut f = vec![
        row.q.to_string(),
        row.n.to_string(),
        star(row.a),
        star(row.b),
        opt(row.u),
        opt(row.trace_norm),
        opt(row.toric),
        opt(row.frobenius_trace),
    ];
    f.extend(Check::ALL.iter().map(|&c| row.verdict(c).to_string()));
    f
}

fn parse_opt<T: std::str::FromStr>(s: &str, none: &str) -> Result<Option<T>, HarnessError> {
    if s == none {
        Ok(None)
    } else {
        s.parse()
            .map(Some)
            .map_err(|_| HarnessError::Parse(format!("bad integer `{s}`")))
    }
}

fn parse_row(rec: &csv::StringRecord) -> Result<ReportRow, HarnessError> {
    if rec.len() != FIXED_COLUMNS.len() + Check::ALL.len() {
        return Err(HarnessError::Parse(format!("row has {} fields", rec.len())));
    }
    let req = |i: usize| -> Result<u32, HarnessError> {
        parse_opt(&rec[i], "")?.ok_or_else(|| HarnessError::Parse("missing q or n".into()))
    };
    let mut verdicts = BTreeMap::new();
    for (i, &check) in Check::ALL.iter().enumerate() {
        let v: Verdict = rec[FIXED_COLUMNS.len() + i].parse()?;
        if v != Verdict::NotApplicable {
            verdicts.insert(check, v);
        }
    }
    Ok(ReportRow {
        q: req(0)?,
        n: req(1)?,
        a: parse_opt(&rec[2], "*")?,
        b: parse_opt(&rec[3], "*")?,
        u: parse_opt(&rec[4], "-")?,
        trace_norm: parse_opt(&rec[5], "-")?,
        toric: parse_opt(&rec[6], "-")?,
        frobenius_trace: parse_opt(&rec[7], "-")?,
        verdicts,
    })
}

/// A CSV report read back from text.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    /// Tallies are recomputed from the rows.
    pub report: SweepReport,
    pub run: Option<RunInfo>,
    /// The tallies as written in the footer.
    pub recorded_tallies: Option<Tallies>,
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv, HarnessError> {
    let mut version = None;
    let mut run = None;
    let mut config = None;
    let mut units = Vec::new();
    let mut recorded_tallies = None;
    let mut max_ratio = BTreeMap::new();
    let mut max_residual = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        let Some(comment) = line.strip_prefix('#') else {
            body.push_str(line);
            body.push('\n');
            continue;
        };
        let comment = comment.trim_start();
        if let Some(v) = comment.strip_prefix("tracenorm report v") {
            version = v.trim().parse().ok();
        } else if let Some(v) = comment.strip_prefix("run: ") {
            run = Some(serde_json::from_str(v)?);
        } else if let Some(v) = comment.strip_prefix("config: ") {
            config = Some(serde_json::from_str(v)?);
        } else if let Some(v) = comment.strip_prefix("unit: ") {
            units.push(serde_json::from_str(v)?);
        } else if let Some(v) = comment.strip_prefix("tallies: ") {
            recorded_tallies = Some(serde_json::from_str(v)?);
        } else if let Some(v) = comment.strip_prefix("max-ratio: ") {
            max_ratio = serde_json::from_str(v)?;
        } else if let Some(v) = comment.strip_prefix("max-residual: ") {
            max_residual = serde_json::from_str(v)?;
        }
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = reader.headers()?.clone();
    let expected: Vec<&str> = FIXED_COLUMNS
        .into_iter()
        .chain(Check::ALL.iter().map(|c| c.name()))
        .collect();
    if header.iter().ne(expected.iter().copied()) {
        return Err(HarnessError::Parse("unexpected header".into()));
    }
    let rows = reader
        .records()
        .map(|r| parse_row(&r?))
        .collect::<Result<Vec<_>, _>>()?;
    let report = SweepReport {
        version: version.ok_or_else(|| HarnessError::Parse("missing version line".into()))?,
        config: config.ok_or_else(|| HarnessError::Parse("missing config line".into()))?,
        units,
        tallies: Tallies::from_rows(&rows),
        rows,
        max_ratio,
        max_residual,
    };
    Ok(ParsedCsv {
        report,
        run,
        recorded_tallies,
    })
}

pub fn parse_structured(text: &str) -> Result<(SweepReport, RunInfo), HarnessError> {
    #[derive(Deserialize)]
    struct Doc {
        run: RunInfo,
        report: SweepReport,
    }
    let doc: Doc = serde_json::from_str(text)?;
    Ok((doc.report, doc.run))
}
