//! Bound and divisibility predicates over count records.
//!
//! Radii have the shape `A + B·√q` with integer `A, B`. Centers are rational
//! and are cleared by multiplying through by their denominator, so every
//! verdict reduces to the sign of some `X + Y·√q`, which is decided by
//! comparing squares of integers. No verdict depends on floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::CountRecord;
use crate::field::{is_prime, Elem, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("bound needs a != 0 and b != 0")]
    ZeroInput,
    #[error("the a = 0 bound needs a = 0 and b != 0")]
    NotZeroTrace,
    #[error("record is missing the {0} count")]
    MissingCount(&'static str),
    #[error("u = {u} is not (n+1)^-(n+1) = {special}")]
    NotSpecialU { u: u32, special: u32 },
    #[error("characteristic {p} divides n + 1 = {degree}")]
    CharacteristicDividesDegree { p: u32, degree: u32 },
    #[error("{0} is not an odd prime")]
    NotPrime(u32),
    #[error("n must be at least 1")]
    ZeroDimension,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundName {
    Katz,
    Improved,
    ZeroTrace,
    Toric,
    Frobenius,
    SpecialU,
    SpecialUEven,
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundName::Katz => "katz",
            BoundName::Improved => "improved",
            BoundName::ZeroTrace => "zero-trace",
            BoundName::Toric => "toric",
            BoundName::Frobenius => "frobenius",
            BoundName::SpecialU => "special-u",
            BoundName::SpecialUEven => "special-u-even",
        })
    }
}

/// `rational + surd·√q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radius {
    pub rational: BigInt,
    pub surd: BigInt,
}

impl Radius {
    /// `c · q^(e/2)`.
    pub fn half_power(c: u64, q: u64, e: u32) -> Self {
        let q = BigInt::from(q);
        let c = BigInt::from(c);
        if e.is_multiple_of(2) {
            Radius {
                rational: c * q.pow(e / 2),
                surd: BigInt::zero(),
            }
        } else {
            Radius {
                rational: BigInt::zero(),
                surd: c * q.pow((e - 1) / 2),
            }
        }
    }

    pub fn plus(mut self, other: Radius) -> Self {
        self.rational += other.rational;
        self.surd += other.surd;
        self
    }

    pub fn to_f64(&self, q: u64) -> f64 {
        self.rational.to_f64().unwrap_or(f64::INFINITY)
            + self.surd.to_f64().unwrap_or(f64::INFINITY) * (q as f64).sqrt()
    }

    /// Exact `self <= other`.
    pub fn le(&self, other: &Radius, q: u64) -> bool {
        surd_nonneg(&(&other.rational - &self.rational), &(&other.surd - &self.surd), q)
    }
}

/// Decides `a + b·√q >= 0` exactly.
pub fn surd_nonneg(a: &BigInt, b: &BigInt, q: u64) -> bool {
    let q = BigInt::from(q);
    match (a.is_negative(), b.is_negative()) {
        (false, false) => true,
        (true, true) => false,
        // a >= 0 > b: need a >= |b|√q
        (false, true) => a * a >= b * b * q,
        // b >= 0 > a: need b√q >= |a|
        (true, false) => b * b * q >= a * a,
    }
}

/// One bound evaluated on one observed count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundVerdict {
    pub name: BoundName,
    pub q: u64,
    /// Center is `center_num / scale`.
    pub center_num: BigInt,
    pub scale: BigInt,
    pub radius: Radius,
    /// `|scale·N - center_num|`, i.e. the deviation times `scale`.
    pub deviation: BigInt,
    pub holds: bool,
    /// Deviation within 1 of the radius (threshold `max(radius - 1, 0)`).
    pub tight: bool,
}

impl BoundVerdict {
    fn evaluate(name: BoundName, q: u64, observed: i128, center_num: BigInt, scale: BigInt, radius: Radius) -> Self {
        let deviation = (&scale * BigInt::from(observed) - &center_num).abs();
        let (a, b) = (&scale * &radius.rational, &scale * &radius.surd);
        let holds = surd_nonneg(&(&a - &deviation), &b, q);
        let near = surd_nonneg(&(&deviation - &a + &scale), &-b, q);
        BoundVerdict {
            name,
            q,
            center_num,
            scale,
            radius,
            deviation,
            holds,
            tight: holds && near,
        }
    }

    pub fn deviation_f64(&self) -> f64 {
        self.deviation.to_f64().unwrap_or(f64::INFINITY) / self.scale.to_f64().unwrap_or(1.0)
    }

    /// `deviation² / radius²`, for reporting only.
    pub fn ratio(&self) -> f64 {
        let d = self.deviation_f64();
        let r = self.radius.to_f64(self.q);
        if r == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (d * d) / (r * r)
        }
    }
}

fn big_pow(q: u64, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

fn nonzero_pair(record: &CountRecord) -> Result<(), BoundError> {
    if record.a == 0 || record.b == 0 {
        Err(BoundError::ZeroInput)
    } else if record.n == 0 {
        Err(BoundError::ZeroDimension)
    } else {
        Ok(())
    }
}

fn trace_norm_count(record: &CountRecord) -> Result<i128, BoundError> {
    record
        .trace_norm
        .map(|c| c as i128)
        .ok_or(BoundError::MissingCount("trace/norm"))
}

fn toric_count(record: &CountRecord) -> Result<i128, BoundError> {
    record.toric.map(|c| c as i128).ok_or(BoundError::MissingCount("toric"))
}

/// `|N_{n+1}(a,b) - (q^(n+1) - 1)/(q(q-1))| <= (n+1) q^((n-1)/2)`.
pub fn katz_bound(record: &CountRecord) -> Result<BoundVerdict, BoundError> {
    nonzero_pair(record)?;
    let (q, n) = (record.q as u64, record.n);
    Ok(BoundVerdict::evaluate(
        BoundName::Katz,
        q,
        trace_norm_count(record)?,
        big_pow(q, n + 1) - BigInt::one(),
        BigInt::from(q * (q - 1)),
        Radius::half_power(n as u64 + 1, q, n - 1),
    ))
}

/// `|N_{n+1}(a,b) - (q^n - 1)/(q - 1)| <= n q^((n-1)/2)`.
pub fn improved_bound(record: &CountRecord) -> Result<BoundVerdict, BoundError> {
    nonzero_pair(record)?;
    let (q, n) = (record.q as u64, record.n);
    Ok(BoundVerdict::evaluate(
        BoundName::Improved,
        q,
        trace_norm_count(record)?,
        (big_pow(q, n) - BigInt::one()) / BigInt::from(q - 1),
        BigInt::one(),
        Radius::half_power(n as u64, q, n - 1),
    ))
}

/// `|N_{n+1}(0,b) - (q^n - 1)/(q - 1)| <= (d - 1) q^((n-1)/2)` with
/// `d = gcd(n + 1, q - 1)`.
pub fn zero_trace_bound(record: &CountRecord) -> Result<BoundVerdict, BoundError> {
    if record.a != 0 || record.b == 0 {
        return Err(BoundError::NotZeroTrace);
    }
    if record.n == 0 {
        return Err(BoundError::ZeroDimension);
    }
    let (q, n) = (record.q as u64, record.n);
    let d = (n as u64 + 1).gcd(&(q - 1));
    Ok(BoundVerdict::evaluate(
        BoundName::ZeroTrace,
        q,
        trace_norm_count(record)?,
        (big_pow(q, n) - BigInt::one()) / BigInt::from(q - 1),
        BigInt::one(),
        Radius::half_power(d - 1, q, n - 1),
    ))
}

fn toric_center(q: u64, n: u32) -> BigInt {
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    (big_pow(q - 1, n) - BigInt::from(sign)) / BigInt::from(q)
}

/// `|N(u) - ((q-1)^n - (-1)^n)/q| <= n q^((n-1)/2)`.
pub fn toric_bound(record: &CountRecord) -> Result<BoundVerdict, BoundError> {
    nonzero_pair(record)?;
    let (q, n) = (record.q as u64, record.n);
    Ok(BoundVerdict::evaluate(
        BoundName::Toric,
        q,
        toric_count(record)?,
        toric_center(q, n),
        BigInt::one(),
        Radius::half_power(n as u64, q, n - 1),
    ))
}

/// `|T(u)| <= n q^((n-1)/2)` for the Frobenius trace.
pub fn frobenius_bound(record: &CountRecord) -> Result<BoundVerdict, BoundError> {
    nonzero_pair(record)?;
    let (q, n) = (record.q as u64, record.n);
    let t = record
        .frobenius_trace
        .ok_or(BoundError::MissingCount("frobenius trace"))?;
    Ok(BoundVerdict::evaluate(
        BoundName::Frobenius,
        q,
        t,
        BigInt::zero(),
        BigInt::one(),
        Radius::half_power(n as u64, q, n - 1),
    ))
}

/// `(n+1)^-(n+1)` in the field, or `None` when `p | n + 1`.
pub fn special_u(field: &Field, n: u32) -> Option<Elem> {
    let base = field.from_int(n as i64 + 1);
    field.inv(field.pow(base, n as u64 + 1))
}

/// Radius at the special parameter: `(n-1) q^((n-1)/2)`.
pub fn special_u_radius(q: u64, n: u32) -> Radius {
    Radius::half_power(n as u64 - 1, q, n - 1)
}

/// Radius at the special parameter for even `n`: `(n-2) q^((n-1)/2) + q^((n-2)/2)`.
pub fn special_u_even_radius(q: u64, n: u32) -> Option<Radius> {
    (n.is_multiple_of(2) && n >= 2)
        .then(|| Radius::half_power(n as u64 - 2, q, n - 1).plus(Radius::half_power(1, q, n - 2)))
}

/// Verdicts at `u = (n+1)^-(n+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialUVerdict {
    pub general: BoundVerdict,
    /// Present for even `n`.
    pub refined: Option<BoundVerdict>,
}

impl SpecialUVerdict {
    pub fn holds(&self) -> bool {
        self.general.holds && self.refined.as_ref().is_none_or(|v| v.holds)
    }
}

pub fn special_u_bound(field: &Field, record: &CountRecord) -> Result<SpecialUVerdict, BoundError> {
    nonzero_pair(record)?;
    let (q, n) = (record.q as u64, record.n);
    let special = special_u(field, n).ok_or(BoundError::CharacteristicDividesDegree {
        p: field.characteristic(),
        degree: n + 1,
    })?;
    let u = record.u.ok_or(BoundError::ZeroInput)?;
    if u != special.value() {
        return Err(BoundError::NotSpecialU {
            u,
            special: special.value(),
        });
    }
    let observed = toric_count(record)?;
    let general = BoundVerdict::evaluate(
        BoundName::SpecialU,
        q,
        observed,
        toric_center(q, n),
        BigInt::one(),
        special_u_radius(q, n),
    );
    let refined = special_u_even_radius(q, n).map(|r| {
        BoundVerdict::evaluate(
            BoundName::SpecialUEven,
            q,
            observed,
            toric_center(q, n),
            BigInt::one(),
            r,
        )
    });
    Ok(SpecialUVerdict { general, refined })
}

/// Whether the improved bound implies the classical one: the centers differ
/// by exactly `1/q`, so this needs `n q^((n-1)/2) + gap <= (n+1) q^((n-1)/2)`.
pub fn improved_implies_katz(q: u64, n: u32) -> bool {
    let scale = BigInt::from(q * (q - 1));
    let katz_center = big_pow(q, n + 1) - BigInt::one();
    let improved_center = (big_pow(q, n) - BigInt::one()) * BigInt::from(q);
    let gap = (katz_center - improved_center).abs();
    // scale·(n+1)·r - scale·n·r - gap >= 0 with r = q^((n-1)/2)
    let r = Radius::half_power(1, q, n - 1);
    surd_nonneg(&(&scale * &r.rational - gap), &(&scale * &r.surd), q)
}

/// `ℓ ⌈(C - (ℓ-1) q^((ℓ-2)/2))/ℓ⌉ <= N_ℓ(a,b) <= ℓ ⌊(C + (ℓ-1) q^((ℓ-2)/2))/ℓ⌋`
/// with `C = (q^(ℓ-1) - 1)/(q - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub low: BigInt,
    pub high: BigInt,
}

impl Interval {
    pub fn contains(&self, n: u64) -> bool {
        let n = BigInt::from(n);
        self.low <= n && n <= self.high
    }
}

/// Endpoints of the interval for `N_ℓ(a,b)`, exact.
///
/// For odd `ℓ` the radius is `B√q` with `B = (ℓ-1) q^((ℓ-3)/2)`, and
/// `⌊C ± B√q⌋` is `C ± ⌊√(B²q)⌋` (respectively `C - ⌊√(B²q)⌋` is the ceiling
/// of `C - B√q`), so both endpoints come from one integer square root.
pub fn prime_degree_interval(q: u64, ell: u32) -> Result<Interval, BoundError> {
    if ell < 3 || !is_prime(ell as u64) {
        return Err(BoundError::NotPrime(ell));
    }
    let center = (big_pow(q, ell - 1) - BigInt::one()) / BigInt::from(q - 1);
    let b = BigInt::from(ell - 1) * big_pow(q, (ell - 3) / 2);
    let floor_radius = (&b * &b * BigInt::from(q)).sqrt();
    let l = BigInt::from(ell);
    let low_real_ceil = &center - &floor_radius;
    let high_real_floor = &center + &floor_radius;
    Ok(Interval {
        low: &l * low_real_ceil.div_ceil(&l),
        high: &l * high_real_floor.div_floor(&l),
    })
}

/// `R` and whether `N ≡ R (mod ℓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Divisibility {
    /// Number of `c` with `ℓc = a` and `c^ℓ = b`; 0 or 1.
    pub fixed_points: u32,
    pub holds: bool,
}

pub fn divisibility_check(field: &Field, ell: u32, a: Elem, b: Elem, count: u64) -> Result<Divisibility, BoundError> {
    if !is_prime(ell as u64) {
        return Err(BoundError::NotPrime(ell));
    }
    if a.is_zero() || b.is_zero() {
        return Err(BoundError::ZeroInput);
    }
    let fixed_points = match field.inv(field.from_int(ell as i64)) {
        // ℓ = p: ℓc = 0 never equals a ≠ 0
        None => 0,
        Some(inv) => {
            let c = field.mul(a, inv);
            u32::from(field.pow(c, ell as u64) == b)
        }
    };
    Ok(Divisibility {
        fixed_points,
        holds: (count as i128 - fixed_points as i128) % ell as i128 == 0,
    })
}
