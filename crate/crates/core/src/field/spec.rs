use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{is_prime, FieldError};

/// A field named as `p^k`.
///
/// Parsing accepts `"p^k"`, a bare prime power such as `"9"`, and more
/// generally `"b^e"` whenever `b^e` is a prime power (so `"4^1"` names GF(4)).
/// The parsed value is always normalized to prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
}

impl FieldSpec {
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    /// Normalizes a prime power `q` into `p^k`.
    pub fn from_order(q: u64) -> Result<Self, FieldError> {
        if q < 2 {
            return Err(FieldError::NotPrimePower(q));
        }
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
        let (mut rest, mut k) = (q, 0u32);
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest != 1 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(FieldError::NotPrimePower(q));
        }
        Ok(FieldSpec { p: p as u32, k })
    }

    /// All prime powers `2 <= q <= max_q` in increasing order.
    pub fn up_to(max_q: u64) -> Vec<Self> {
        (2..=max_q).filter_map(|q| Self::from_order(q).ok()).collect()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadSpec(s.to_string());
        let t = s.trim();
        let q = match t.split_once('^') {
            Some((b, e)) => {
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                let e: u32 = e.trim().parse().map_err(|_| bad())?;
                if e == 0 {
                    return Err(bad());
                }
                b.checked_pow(e).ok_or_else(bad)?
            }
            None => t.parse().map_err(|_| bad())?,
        };
        Self::from_order(q).map_err(|_| bad())
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = FieldError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FieldSpec> for String {
    fn from(s: FieldSpec) -> String {
        s.to_string()
    }
}
