//! Exact enumeration counters.
//!
//! * trace/norm fibers `N_m(a, b)` over a tower GF(q) ⊂ GF(q^m);
//! * the toric count `N(u)` of `x_1 + … + x_n + u/(x_1⋯x_n) = 1` over
//!   `(GF(q)*)^n`, with the last coordinate solved from a quadratic;
//! * the Frobenius trace read off the explicit point-count formula.
//!
//! Enumerations fan out over rayon's current pool when
//! [`CountOptions::parallel`] is set; results never depend on scheduling.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{build_extension, embed, Elem, Field, FieldError, Tower};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest field for which the quadratic root table is materialized.
const ROOT_TABLE_MAX_Q: u32 = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("toric count needs u != 0")]
    ZeroU,
    #[error("trace/norm count needs a != 0 and b != 0")]
    ZeroInput,
    #[error("n must be at least 1")]
    ZeroDimension,
    #[error("enumeration needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Maximum candidate evaluations for a single count.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: DEFAULT_BUDGET,
            parallel: true,
        }
    }
}

impl CountOptions {
    pub fn serial() -> Self {
        CountOptions {
            parallel: false,
            ..Self::default()
        }
    }

    fn admit(&self, needed: Option<u64>) -> Result<u64, CountError> {
        match needed {
            Some(n) if n <= self.budget => Ok(n),
            other => Err(CountError::BudgetExceeded {
                needed: other.unwrap_or(u64::MAX),
                budget: self.budget,
            }),
        }
    }
}

/// Sums `count(start, end)` over `[0, total)`, chunked when parallel.
fn sum_ranges<F>(total: u64, parallel: bool, count: F) -> u64
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    if !parallel || total < 4096 {
        return count(0, total);
    }
    let chunks = (rayon::current_num_threads() as u64 * 8).min(total);
    let size = total.div_ceil(chunks);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * size;
            let end = ((c + 1) * size).min(total);
            if start < end {
                count(start, end)
            } else {
                0
            }
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Trace and norm

/// Relative trace of every big-field element, built by additivity over the
/// base-`p` digits of the encoding.
pub struct TraceNormTable<'t> {
    tower: &'t Tower,
    trace: Vec<Elem>,
}

impl<'t> TraceNormTable<'t> {
    pub fn new(tower: &'t Tower) -> Result<Self, CountError> {
        let big = tower.big();
        let p = big.characteristic() as usize;
        let size = big.order() as usize;
        let mut trace = vec![Elem::ZERO; size];
        let mut place = 1usize;
        let mut basis_trace = Elem::ZERO;
        for v in 1..size {
            if v == place * p {
                place *= p;
            }
            if v == place {
                basis_trace = crate::field::trace_rel(tower, big.element(v as u64)?)?;
            }
            // v = (v - p^i) + p^i digit-wise, where p^i is the leading place
            trace[v] = tower.sub().add(trace[v - place], basis_trace);
        }
        Ok(TraceNormTable { tower, trace })
    }

    pub fn tower(&self) -> &Tower {
        self.tower
    }

    #[inline]
    pub fn trace(&self, x: Elem) -> Elem {
        self.trace[x.value() as usize]
    }

    #[inline]
    pub fn norm(&self, x: Elem) -> Elem {
        match self.tower.big().log(x) {
            None => Elem::ZERO,
            Some(j) => self.tower.norm_from_log(j),
        }
    }

    /// `N_m(a, b)` by enumerating all of GF(q^m).
    pub fn count(&self, a: Elem, b: Elem, parallel: bool) -> u64 {
        let total = self.tower.big().order() as u64;
        sum_ranges(total, parallel, |start, end| {
            (start..end)
                .filter(|&v| {
                    let x = Elem::from_raw(v as u32);
                    self.trace(x) == a && self.norm(x) == b
                })
                .count() as u64
        })
    }

    /// All fibers at once: one pass over GF(q^m).
    pub fn fibers(&self, parallel: bool) -> FiberCounts {
        let q = self.tower.sub().order() as usize;
        let total = self.tower.big().order() as u64;
        let chunk = |start: u64, end: u64| {
            let mut counts = vec![0u64; q * q];
            for v in start..end {
                let x = Elem::from_raw(v as u32);
                let (t, n) = (self.trace(x), self.norm(x));
                counts[t.value() as usize * q + n.value() as usize] += 1;
            }
            counts
        };
        let counts = if parallel && total >= 4096 {
            let chunks = (rayon::current_num_threads() as u64 * 4).min(total);
            let size = total.div_ceil(chunks);
            (0..chunks)
                .into_par_iter()
                .map(|c| chunk(c * size, ((c + 1) * size).min(total)))
                .reduce(
                    || vec![0u64; q * q],
                    |mut acc, part| {
                        acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                        acc
                    },
                )
        } else {
            chunk(0, total)
        };
        FiberCounts {
            q: q as u32,
            m: self.tower.degree(),
            counts,
        }
    }
}

/// `N_m(a, b)` for a single pair, by enumeration of GF(q^m).
pub fn count_trace_norm(tower: &Tower, a: Elem, b: Elem, opts: CountOptions) -> Result<u64, CountError> {
    opts.admit(Some(tower.big().order() as u64))?;
    Ok(TraceNormTable::new(tower)?.count(a, b, opts.parallel))
}

/// Fiber sizes `N_m(a, b)` for every `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCounts {
    q: u32,
    m: u32,
    counts: Vec<u64>,
}

/// Outcome of the three partition identities of the fiber table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionCheck {
    /// `Σ_{b≠0} N(a, b) = q^(m-1) - [a = 0]` for every `a`.
    pub over_b: bool,
    /// `Σ_a N(a, b) = (q^m - 1)/(q - 1)` for every `b ≠ 0`.
    pub over_a: bool,
    /// `Σ_{a, b≠0} N(a, b) = q^m - 1`.
    pub total: bool,
}

impl PartitionCheck {
    pub fn holds(&self) -> bool {
        self.over_b && self.over_a && self.total
    }
}

impl FiberCounts {
    pub fn get(&self, a: Elem, b: Elem) -> u64 {
        self.counts[a.value() as usize * self.q as usize + b.value() as usize]
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn partition_identities(&self) -> PartitionCheck {
        let q = self.q as u64;
        let qm = q.pow(self.m);
        let row = |a: u64| (1..q).map(|b| self.counts[(a * q + b) as usize]).sum::<u64>();
        let col = |b: u64| (0..q).map(|a| self.counts[(a * q + b) as usize]).sum::<u64>();
        PartitionCheck {
            over_b: (0..q).all(|a| row(a) == qm / q - u64::from(a == 0)),
            over_a: (1..q).all(|b| col(b) == (qm - 1) / (q - 1)),
            total: (0..q).map(row).sum::<u64>() == qm - 1,
        }
    }
}

// ---------------------------------------------------------------------------
// Toric hypersurface

/// Point counter for `Y_u: x_1 + … + x_n + u/(x_1⋯x_n) = 1` over one field.
pub struct ToricCounter {
    field: Arc<Field>,
    /// `roots[b*q + c] = #{x ≠ 0 : x² + b x + c = 0}`.
    roots: Option<Vec<u8>>,
}

impl ToricCounter {
    pub fn new(field: Arc<Field>) -> Self {
        let q = field.order();
        let roots = (q <= ROOT_TABLE_MAX_Q).then(|| {
            let mut table = vec![0u8; q as usize * q as usize];
            for x in field.nonzero() {
                let x2 = field.mul(x, x);
                for b in field.elements() {
                    // x is a root of x² + b x + c exactly for c = -(x² + b x)
                    let c = field.neg(field.add(x2, field.mul(b, x)));
                    table[b.value() as usize * q as usize + c.value() as usize] += 1;
                }
            }
            table
        });
        ToricCounter { field, roots }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    fn quadratic_roots(&self, b: Elem, c: Elem) -> u64 {
        let f = &*self.field;
        match &self.roots {
            Some(t) => t[b.value() as usize * f.order() as usize + c.value() as usize] as u64,
            None => f
                .nonzero()
                .filter(|&x| f.add(f.mul(x, f.add(x, b)), c).is_zero())
                .count() as u64,
        }
    }

    /// Visits every tuple in `(GF(q)*)^len` with its coordinate sum and the
    /// discrete log of its product, and adds up what `visit` returns.
    fn enumerate<V>(&self, len: u32, parallel: bool, visit: V) -> u64
    where
        V: Fn(Elem, u64) -> u64 + Sync,
    {
        let f = &*self.field;
        let base = f.order() as u64 - 1;
        let len = len as usize;
        let total = base.pow(len as u32);
        sum_ranges(total, parallel, |start, end| {
            let mut digits = vec![0u64; len];
            let mut t = start;
            for d in digits.iter_mut().rev() {
                *d = t % base;
                t /= base;
            }
            let mut sums = vec![Elem::ZERO; len + 1];
            let mut logs = vec![0u64; len + 1];
            let refresh = |from: usize, digits: &[u64], sums: &mut [Elem], logs: &mut [u64]| {
                for i in from..len {
                    sums[i + 1] = f.add(sums[i], f.exp(digits[i]));
                    logs[i + 1] = (logs[i] + digits[i]) % base;
                }
            };
            refresh(0, &digits, &mut sums, &mut logs);
            let mut acc = 0u64;
            for idx in start..end {
                acc += visit(sums[len], logs[len]);
                if idx + 1 == end {
                    break;
                }
                let mut pos = len;
                loop {
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < base {
                        break;
                    }
                    digits[pos] = 0;
                }
                refresh(pos, &digits, &mut sums, &mut logs);
            }
            acc
        })
    }

    /// `N(u)` with the last coordinate solved from
    /// `x_n² - (1 - s) x_n + u/P = 0`, `s` and `P` the sum and product of
    /// the other coordinates. Costs `(q-1)^(n-1)` evaluations.
    pub fn count(&self, u: Elem, n: u32, opts: CountOptions) -> Result<u64, CountError> {
        let lu = self.check(u, n)?;
        let base = self.field.order() as u64 - 1;
        opts.admit(base.checked_pow(n - 1))?;
        let f = &*self.field;
        Ok(self.enumerate(n - 1, opts.parallel, |s, lp| {
            let b = f.sub(s, Elem::ONE);
            let c = f.exp(lu + base - lp);
            self.quadratic_roots(b, c)
        }))
    }

    /// `N(u)` by testing all `(q-1)^n` tuples. Slow cross-check.
    pub fn count_naive(&self, u: Elem, n: u32, opts: CountOptions) -> Result<u64, CountError> {
        let lu = self.check(u, n)?;
        let base = self.field.order() as u64 - 1;
        opts.admit(base.checked_pow(n))?;
        let f = &*self.field;
        Ok(self.enumerate(n, opts.parallel, |s, lp| {
            u64::from(f.add(s, f.exp(lu + base - lp)) == Elem::ONE)
        }))
    }

    /// `N(u)` as the number of `(x_1, …, x_{n+1})` with all coordinates
    /// nonzero, `Σ x_i = 1` and `Π x_i = u`. Costs `(q-1)^(n+1)`.
    pub fn count_system(&self, u: Elem, n: u32, opts: CountOptions) -> Result<u64, CountError> {
        let lu = self.check(u, n)?;
        let base = self.field.order() as u64 - 1;
        opts.admit(base.checked_pow(n + 1))?;
        Ok(self.enumerate(n + 1, opts.parallel, |s, lp| u64::from(s == Elem::ONE && lp == lu)))
    }

    fn check(&self, u: Elem, n: u32) -> Result<u64, CountError> {
        if n == 0 {
            return Err(CountError::ZeroDimension);
        }
        self.field.element(u.value() as u64)?;
        self.field.log(u).map(u64::from).ok_or(CountError::ZeroU)
    }
}

/// `N(u)` over `(GF(q)*)^n`.
pub fn count_toric(field: &Arc<Field>, u: Elem, n: u32, opts: CountOptions) -> Result<u64, CountError> {
    ToricCounter::new(field.clone()).count(u, n, opts)
}

/// `#Y_u(GF(q^r))`: the toric count over the degree-`r` extension, with `u`
/// pushed through the embedding.
pub fn count_toric_ext(
    base: &Arc<Field>,
    u: Elem,
    n: u32,
    r: u32,
    seed: u64,
    opts: CountOptions,
) -> Result<u64, CountError> {
    if u.is_zero() {
        return Err(CountError::ZeroU);
    }
    if n == 0 {
        return Err(CountError::ZeroDimension);
    }
    let big_order = (base.order() as u64).checked_pow(r).ok_or(CountError::BudgetExceeded {
        needed: u64::MAX,
        budget: opts.budget,
    })?;
    opts.admit((big_order - 1).checked_pow(n - 1))?;
    if r == 1 {
        return count_toric(base, u, n, opts);
    }
    let ext = Arc::new(build_extension(base, r, seed)?);
    let tower = embed(base.clone(), ext.clone())?;
    count_toric(&ext, tower.forward(u), n, opts)
}

// ---------------------------------------------------------------------------
// Main terms, Frobenius trace, and the reduction identity

pub fn binomial(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn ipow(base: i128, e: u32) -> i128 {
    base.checked_pow(e).expect("integer overflow in exact count arithmetic")
}

/// `(q^n - 1)/(q - 1)`.
pub fn main_term_trace_norm(q: u64, n: u32) -> i128 {
    (ipow(q as i128, n) - 1) / (q as i128 - 1)
}

/// `((q-1)^n - (-1)^n)/q`, an integer since `(q-1)^n ≡ (-1)^n mod q`.
pub fn main_term_toric(q: u64, n: u32) -> i128 {
    let q = q as i128;
    let num = ipow(q - 1, n) - ipow(-1, n);
    debug_assert_eq!(num % q, 0);
    num / q
}

/// Inverts `N(u) = Σ_{j=2}^n (-1)^(j-n) C(n,j) q^(j-1) + (-1)^(n-1) n + (-1)^(n-1) T`.
pub fn frobenius_trace(q: u64, n: u32, n_toric: u64) -> i128 {
    let q = q as i128;
    let known: i128 = (2..=n).map(|j| ipow(-1, n - j) * binomial(n, j) * ipow(q, j - 1)).sum();
    ipow(-1, n - 1) * (n_toric as i128 - known) - n as i128
}

/// Both forms of the reduction of `N_{n+1}(a, b)` to `N(u)`:
/// `N_{n+1} = (q^n-1)/(q-1) + (-1)^n (N(u) - ((q-1)^n - (-1)^n)/q)` and
/// `q(q-1) N_{n+1} = q^(n+1) - 1 + (-1)^n (q(q-1) N(u) - (q-1)^(n+1))`.
pub fn lemma21_holds(q: u64, n: u32, n_trace_norm: u64, n_toric: u64) -> bool {
    let sign = ipow(-1, n);
    let (nt, nu) = (n_trace_norm as i128, n_toric as i128);
    let first = nt == main_term_trace_norm(q, n) + sign * (nu - main_term_toric(q, n));
    let qi = q as i128;
    let scale = qi * (qi - 1);
    let second = scale * nt == ipow(qi, n + 1) - 1 + sign * (scale * nu - ipow(qi - 1, n + 1));
    first && second
}

/// One `(q, n, a, b)` datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub q: u32,
    pub n: u32,
    pub a: u32,
    pub b: u32,
    /// `b / a^(n+1)` when `a, b ≠ 0`.
    pub u: Option<u32>,
    /// `N_{n+1}(a, b)`.
    pub trace_norm: Option<u64>,
    /// `N(u)`.
    pub toric: Option<u64>,
    pub main_term_trace_norm: i128,
    pub main_term_toric: i128,
    pub frobenius_trace: Option<i128>,
}

impl CountRecord {
    pub fn new(field: &Field, n: u32, a: Elem, b: Elem) -> Self {
        let u = if a.is_zero() || b.is_zero() {
            None
        } else {
            field.div(b, field.pow(a, n as u64 + 1)).map(|u| u.value())
        };
        let q = field.order();
        CountRecord {
            q,
            n,
            a: a.value(),
            b: b.value(),
            u,
            trace_norm: None,
            toric: None,
            main_term_trace_norm: main_term_trace_norm(q as u64, n),
            main_term_toric: main_term_toric(q as u64, n),
            frobenius_trace: None,
        }
    }

    pub fn set_toric(&mut self, count: u64) {
        self.toric = Some(count);
        self.frobenius_trace = Some(frobenius_trace(self.q as u64, self.n, count));
    }

    /// The reduction identity on the stored counts, if both are present.
    pub fn lemma21(&self) -> Option<bool> {
        Some(lemma21_holds(self.q as u64, self.n, self.trace_norm?, self.toric?))
    }
}

/// Computes `N_{n+1}(a, b)` over the tower and `N(u)` over `(GF(q)*)^n` by
/// separate enumerations and checks the reduction identity between them.
pub fn lemma21_check(
    tower: &Tower,
    toric: &ToricCounter,
    a: Elem,
    b: Elem,
    opts: CountOptions,
) -> Result<(bool, CountRecord), CountError> {
    if a.is_zero() || b.is_zero() {
        return Err(CountError::ZeroInput);
    }
    let n = tower
        .degree()
        .checked_sub(1)
        .filter(|&n| n >= 1)
        .ok_or(CountError::ZeroDimension)?;
    let field = tower.sub();
    let mut record = CountRecord::new(field, n, a, b);
    record.trace_norm = Some(count_trace_norm(tower, a, b, opts)?);
    let u = field.element(record.u.expect("a, b nonzero") as u64)?;
    record.set_toric(toric.count(u, n, opts)?);
    Ok((record.lemma21().expect("both counts set"), record))
}
