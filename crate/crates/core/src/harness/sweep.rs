use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use super::report::REPORT_VERSION;
use super::{
    Check, HarnessError, ReportRow, RunInfo, SweepConfig, SweepReport, Tallies, UnitStatus, UnitSummary, Verdict,
};
use crate::bounds::{
    divisibility_check, frobenius_bound, improved_bound, katz_bound, prime_degree_interval, special_u, special_u_bound,
    toric_bound, zero_trace_bound, BoundVerdict, Interval,
};
use crate::character::{davenport_hasse_all, CharacterEngine};
use crate::counting::{CountOptions, CountRecord, FiberCounts, ToricCounter, TraceNormTable};
use crate::field::{build_extension, build_field, is_prime, Elem, Field, FieldSpec, Tower, MAX_FIELD_ORDER};

/// Rounding residual accepted for character-sum checks.
const RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Runs every unit of `config` on a pool of `config.workers()` threads.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, HarnessError> {
    run_sweep_timed(config).map(|(report, _)| report)
}

pub fn run_sweep_timed(config: &SweepConfig) -> Result<(SweepReport, RunInfo), HarnessError> {
    config.validate()?;
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64);
    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers()).build()?;

    let mut units = Vec::new();
    let mut rows = Vec::new();
    let mut unit_ms = Vec::new();
    let mut extremes = Extremes::default();
    for spec in config.fields.specs() {
        for n in config.n_min..=config.n_max {
            let unit_clock = Instant::now();
            let outcome = pool.install(|| run_unit(spec, n, config))?;
            unit_ms.push(unit_clock.elapsed().as_millis() as u64);
            units.push(outcome.summary);
            rows.extend(outcome.rows);
            extremes.merge(outcome.extremes);
        }
    }
    let report = SweepReport {
        version: REPORT_VERSION,
        config: config.clone(),
        units,
        tallies: Tallies::from_rows(&rows),
        rows,
        max_ratio: extremes.ratio,
        max_residual: extremes.residual,
    };
    let run = RunInfo {
        started_unix_ms,
        wall_ms: clock.elapsed().as_millis() as u64,
        unit_ms,
    };
    Ok((report, run))
}

#[derive(Default)]
struct Extremes {
    ratio: BTreeMap<Check, f64>,
    residual: BTreeMap<Check, f64>,
}

fn bump(map: &mut BTreeMap<Check, f64>, check: Check, value: f64) {
    // keep the report serializable when a radius is zero
    let value = if value.is_finite() { value } else { f64::MAX };
    let slot = map.entry(check).or_insert(value);
    if value > *slot {
        *slot = value;
    }
}

impl Extremes {
    fn merge(&mut self, other: Extremes) {
        for (c, v) in other.ratio {
            bump(&mut self.ratio, c, v);
        }
        for (c, v) in other.residual {
            bump(&mut self.residual, c, v);
        }
    }
}

struct UnitOutcome {
    summary: UnitSummary,
    rows: Vec<ReportRow>,
    extremes: Extremes,
}

/// Everything shared by the rows of one unit.
struct UnitContext<'a> {
    field: &'a Arc<Field>,
    n: u32,
    checks: &'a BTreeSet<Check>,
    fibers: &'a FiberCounts,
    toric: &'a [u64],
    engine: Option<&'a CharacterEngine>,
    special: Option<Elem>,
    interval: Option<Interval>,
    prime_degree: bool,
}

fn unit_work(q: u64, n: u32, checks: &BTreeSet<Check>) -> u64 {
    let big = q.saturating_pow(n + 1);
    let toric = (q - 1).saturating_pow(n);
    let dh = if checks.contains(&Check::DavenportHasse) {
        big.saturating_mul(q - 1)
    } else {
        0
    };
    big.max(toric).max(dh)
}

fn run_unit(spec: FieldSpec, n: u32, config: &SweepConfig) -> Result<UnitOutcome, HarnessError> {
    let checks = &config.checks;
    let field = Arc::new(build_field(spec, config.seed)?);
    let q = field.order();
    let m = n + 1;
    let mut summary = UnitSummary {
        field: spec,
        q,
        n,
        seed: config.seed,
        modulus: field.modulus().to_vec(),
        generator: field.generator().value(),
        big_modulus: None,
        status: UnitStatus::Complete,
    };

    let needed = unit_work(q as u64, n, checks);
    let big_order = (q as u64).saturating_pow(m);
    if needed > config.budget || big_order > MAX_FIELD_ORDER {
        summary.status = UnitStatus::BudgetExceeded {
            needed: needed.max(big_order),
            budget: config.budget,
        };
        let mut row = ReportRow::unit(q, n);
        row.verdicts = checks.iter().map(|&c| (c, Verdict::Budget)).collect();
        return Ok(UnitOutcome {
            summary,
            rows: vec![row],
            extremes: Extremes::default(),
        });
    }

    let big = Arc::new(build_extension(&field, m, config.seed)?);
    summary.big_modulus = Some(big.modulus().to_vec());
    let tower = Tower::new(field.clone(), big)?;
    let fibers = TraceNormTable::new(&tower)?.fibers(true);

    let counter = ToricCounter::new(field.clone());
    let opts = CountOptions {
        budget: config.budget,
        parallel: false,
    };
    let mut toric = vec![0u64; q as usize];
    let counted = (1..q)
        .into_par_iter()
        .map(|u| counter.count(Elem::from_raw(u), n, opts))
        .collect::<Result<Vec<_>, _>>()?;
    toric[1..].copy_from_slice(&counted);

    let engine = if checks.contains(&Check::Gauss) || checks.contains(&Check::DavenportHasse) {
        Some(CharacterEngine::new(field.clone())?)
    } else {
        None
    };
    let prime_degree = is_prime(m as u64);
    let ctx = UnitContext {
        field: &field,
        n,
        checks,
        fibers: &fibers,
        toric: &toric,
        engine: engine.as_ref(),
        special: special_u(&field, n),
        interval: if prime_degree && m >= 3 && checks.contains(&Check::PrimeDegree) {
            Some(prime_degree_interval(q as u64, m)?)
        } else {
            None
        },
        prime_degree,
    };

    let a_start = u32::from(!checks.contains(&Check::ZeroTrace));
    let tuples: Vec<(u32, u32)> = (a_start..q)
        .flat_map(|a| (1..q).map(move |b| (a, b)))
        .filter(|&t| config.tuple.is_none_or(|f| f == t))
        .collect();
    let results = tuples
        .par_iter()
        .map(|&(a, b)| tuple_row(&ctx, Elem::from_raw(a), Elem::from_raw(b)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut extremes = Extremes::default();
    let mut rows = Vec::with_capacity(results.len() + 1);
    for (row, ex) in results {
        rows.push(row);
        extremes.merge(ex);
    }

    let mut unit_row = ReportRow::unit(q, n);
    if checks.contains(&Check::Partition) {
        let verdict = Verdict::from_bool(fibers.partition_identities().holds());
        unit_row.verdicts.insert(Check::Partition, verdict);
    }
    if let (true, Some(engine)) = (checks.contains(&Check::DavenportHasse), engine.as_ref()) {
        let characters: Vec<_> = engine.characters().collect();
        let results = davenport_hasse_all(&tower, engine, &characters)?;
        let mut ok = true;
        for r in &results {
            ok &= r.holds() && r.residual < RESIDUAL_TOLERANCE;
            bump(&mut extremes.residual, Check::DavenportHasse, r.residual);
        }
        unit_row.verdicts.insert(Check::DavenportHasse, Verdict::from_bool(ok));
    }
    if !unit_row.verdicts.is_empty() {
        rows.push(unit_row);
    }
    Ok(UnitOutcome {
        summary,
        rows,
        extremes,
    })
}

fn bound_verdict(v: &BoundVerdict) -> Verdict {
    match (v.holds, v.tight) {
        (false, _) => Verdict::Fail,
        (true, true) => Verdict::Tight,
        (true, false) => Verdict::Pass,
    }
}

fn tuple_row(ctx: &UnitContext<'_>, a: Elem, b: Elem) -> Result<(ReportRow, Extremes), HarnessError> {
    let field = ctx.field.as_ref();
    let n = ctx.n;
    let mut record = CountRecord::new(field, n, a, b);
    record.trace_norm = Some(ctx.fibers.get(a, b));
    if let Some(u) = record.u {
        record.set_toric(ctx.toric[u as usize]);
    }
    let n_tn = ctx.fibers.get(a, b);
    let mut verdicts = BTreeMap::new();
    let mut ex = Extremes::default();
    let bound = |check: Check, v: BoundVerdict, verdicts: &mut BTreeMap<Check, Verdict>, ex: &mut Extremes| {
        bump(&mut ex.ratio, check, v.ratio());
        verdicts.insert(check, bound_verdict(&v));
    };

    if a.is_zero() {
        if ctx.checks.contains(&Check::ZeroTrace) {
            bound(Check::ZeroTrace, zero_trace_bound(&record)?, &mut verdicts, &mut ex);
        }
    } else {
        let u = field.element(record.u.expect("a, b nonzero") as u64)?;
        for &check in ctx.checks {
            match check {
                Check::Lemma21 => {
                    verdicts.insert(check, Verdict::from_bool(record.lemma21() == Some(true)));
                }
                Check::Katz => bound(check, katz_bound(&record)?, &mut verdicts, &mut ex),
                Check::Improved => bound(check, improved_bound(&record)?, &mut verdicts, &mut ex),
                Check::Toric => bound(check, toric_bound(&record)?, &mut verdicts, &mut ex),
                Check::Frobenius => bound(check, frobenius_bound(&record)?, &mut verdicts, &mut ex),
                Check::SpecialU if ctx.special == Some(u) => {
                    let s = special_u_bound(field, &record)?;
                    bump(&mut ex.ratio, check, s.general.ratio());
                    if let Some(r) = &s.refined {
                        bump(&mut ex.ratio, check, r.ratio());
                    }
                    let tight = s.general.tight || s.refined.as_ref().is_some_and(|r| r.tight);
                    let v = match (s.holds(), tight) {
                        (false, _) => Verdict::Fail,
                        (true, true) => Verdict::Tight,
                        (true, false) => Verdict::Pass,
                    };
                    verdicts.insert(check, v);
                }
                Check::PrimeDegree => {
                    if let Some(interval) = &ctx.interval {
                        verdicts.insert(check, Verdict::from_bool(interval.contains(n_tn)));
                    }
                }
                Check::Divisibility if ctx.prime_degree => {
                    let d = divisibility_check(field, n + 1, a, b, n_tn)?;
                    verdicts.insert(check, Verdict::from_bool(d.holds));
                }
                Check::Gauss => {
                    let engine = ctx.engine.expect("engine built for gauss");
                    let ok = match (engine.closed_form_trace_norm(a, b, n), engine.closed_form_toric(u, n)) {
                        (Ok(tn), Ok(tor)) => {
                            bump(&mut ex.residual, check, tn.residual.max(tor.residual));
                            tn.count == n_tn as i128
                                && tor.count == ctx.toric[u.value() as usize] as i128
                                && tn.residual < RESIDUAL_TOLERANCE
                                && tor.residual < RESIDUAL_TOLERANCE
                        }
                        _ => false,
                    };
                    verdicts.insert(check, Verdict::from_bool(ok));
                }
                _ => {}
            }
        }
    }
    let row = ReportRow {
        q: record.q,
        n,
        a: Some(record.a),
        b: Some(record.b),
        u: record.u,
        trace_norm: record.trace_norm,
        toric: record.toric,
        frobenius_trace: record.frobenius_trace,
        verdicts,
    };
    Ok((row, ex))
}
