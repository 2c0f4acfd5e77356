//! Finite fields GF(p^k) backed by discrete-log tables, and towers
//! GF(q) ⊂ GF(q^m) with relative trace and norm.
//!
//! An element is encoded as an integer in `[0, q)` whose base-`p` digits are
//! its coefficients in the polynomial basis of the stored modulus (digit `i`
//! is the coefficient of `x^i`). The encoding does not depend on the choice
//! of primitive element, so it is stable across reseeded builds that happen
//! to pick the same modulus.

pub mod poly;
mod spec;
mod tower;

use std::fmt;

use thiserror::Error;

pub use spec::FieldSpec;
pub use tower::{embed, norm_of_base_element, norm_rel, trace_rel, Tower};

use poly::Poly;

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {order} exceeds the table limit {limit}")]
    TableLimitExceeded { order: u64, limit: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("no irreducible polynomial of degree {degree} over GF({p}) found")]
    SearchExhausted { p: u32, degree: u32 },
    #[error("GF({big}) does not contain a subfield of order {sub}")]
    NotASubfieldCardinality { sub: u32, big: u32 },
    #[error("minimal polynomial of the subfield generator has no root in GF({big})")]
    RootNotFound { big: u32 },
    #[error("element {0} of the big field is not in the image of the subfield")]
    NotInSubfieldImage(u32),
    #[error("value {value} is not an element of GF({q})")]
    InvalidElement { value: u64, q: u32 },
    #[error("invalid field spec {0:?}: expected p^k or a prime power")]
    BadSpec(String),
}

/// A field element in canonical encoding. Only meaningful together with the
/// [`Field`] that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub(crate) fn from_raw(v: u32) -> Elem {
        Elem(v)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// GF(p^k) with a fixed modulus, primitive element and full log/exp tables.
///
/// Immutable after construction; share it behind an `Arc`.
#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    modulus: Poly,
    generator: Elem,
    seed: u64,
    /// `exp[j] = g^j` for `j in [0, q-1)`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0] = NO_LOG`.
    log: Vec<u32>,
    /// Zech logarithms `log(1 + g^j)`, only for non-prime odd-characteristic fields.
    zech: Vec<u32>,
    minus_one: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Starting offset of a seeded search over `range` candidates. Seed 0 starts
/// at the canonical first candidate.
fn seeded_offset(seed: u64, salt: u64, range: u64) -> u64 {
    if seed == 0 || range == 0 {
        0
    } else {
        splitmix64(seed ^ salt.wrapping_mul(0x2545_f491_4f6c_dd1d)) % range
    }
}

/// GF(p) with the smallest primitive root as generator.
pub fn build_prime_field(p: u32) -> Result<Field, FieldError> {
    build_prime_field_with_limit(p, MAX_FIELD_ORDER)
}

pub fn build_prime_field_with_limit(p: u32, limit: u64) -> Result<Field, FieldError> {
    if !is_prime(p as u64) {
        return Err(FieldError::NotPrime(p as u64));
    }
    if p as u64 > limit {
        return Err(FieldError::TableLimitExceeded { order: p as u64, limit });
    }
    Field::construct(p, 1, 0)
}

/// The field of order `|base|^degree`, built directly over the prime field
/// of `base` by a seeded search for an irreducible modulus and a primitive
/// element. Deterministic for a fixed seed.
pub fn build_extension(base: &Field, degree: u32, seed: u64) -> Result<Field, FieldError> {
    build_extension_with_limit(base, degree, seed, MAX_FIELD_ORDER)
}

pub fn build_extension_with_limit(base: &Field, degree: u32, seed: u64, limit: u64) -> Result<Field, FieldError> {
    if degree == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let k = base
        .k
        .checked_mul(degree)
        .ok_or(FieldError::TableLimitExceeded { order: u64::MAX, limit })?;
    let order = (base.p as u64)
        .checked_pow(k)
        .filter(|&o| o <= limit.min(MAX_FIELD_ORDER))
        .ok_or(FieldError::TableLimitExceeded {
            order: (base.p as u64).saturating_pow(k),
            limit: limit.min(MAX_FIELD_ORDER),
        })?;
    debug_assert!(order <= u32::MAX as u64);
    Field::construct(base.p, k, seed)
}

/// Builds GF(p^k) from a spec, seeded.
pub fn build_field(spec: FieldSpec, seed: u64) -> Result<Field, FieldError> {
    let prime = build_prime_field(spec.p)?;
    if spec.k == 1 {
        Ok(prime)
    } else {
        build_extension(&prime, spec.k, seed)
    }
}

impl Field {
    fn construct(p: u32, k: u32, seed: u64) -> Result<Self, FieldError> {
        let q64 = (p as u64).pow(k);
        let q = q64 as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            find_irreducible(p, k as usize, seed)?
        };

        // Primitive element search over nonzero encodings.
        let order = q64 - 1;
        let factors = prime_factors(order);
        let offset = seeded_offset(seed, 2, order);
        let mut generator = None;
        for i in 0..order {
            let c = 1 + (offset + i) % order;
            let cp = decode_digits(c as u32, p, k);
            let primitive = factors.iter().all(|&r| {
                let pw = poly::pow_poly_mod(&cp, order / r, &modulus, p);
                pw != [1]
            });
            if primitive {
                generator = Some((c as u32, cp));
                break;
            }
        }
        let (gen, gen_poly) = generator.expect("a finite field always has a primitive element");

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![NO_LOG; q as usize];
        let mut cur: Poly = vec![1];
        for j in 0..order as u32 {
            let v = encode_digits(&cur, p);
            debug_assert_eq!(log[v as usize], NO_LOG, "generator order too small");
            exp.push(v);
            log[v as usize] = j;
            cur = poly::mul_mod(&cur, &gen_poly, &modulus, p);
        }
        debug_assert_eq!(encode_digits(&cur, p), 1);

        let minus_one = Elem(p - 1);
        let mut field = Field {
            p,
            k,
            q,
            modulus,
            generator: Elem(gen),
            seed,
            exp,
            log,
            zech: Vec::new(),
            minus_one,
        };
        if p != 2 && k > 1 {
            field.zech = (0..order as u32)
                .map(|j| {
                    let v = field.exp[j as usize];
                    let bumped = v - v % p + (v % p + 1) % p;
                    field.log[bumped as usize]
                })
                .collect();
        }
        Ok(field)
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, k: self.k }
    }

    /// Monic modulus over GF(p), ascending coefficients.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn element(&self, value: u64) -> Result<Elem, FieldError> {
        if value < self.q as u64 {
            Ok(Elem(value as u32))
        } else {
            Err(FieldError::InvalidElement { value, q: self.q })
        }
    }

    /// Image of the integer `n` under Z → GF(p) ⊂ GF(q).
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + '_ {
        (1..self.q).map(Elem)
    }

    /// Coefficient vector of length `k` (ascending powers of `x`).
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        let mut out = decode_digits(a.0, self.p, self.k);
        out.resize(self.k as usize, 0);
        out
    }

    /// Discrete log to the stored generator, in `[0, q-1)`.
    #[inline]
    pub fn log(&self, a: Elem) -> Option<u32> {
        match self.log[a.0 as usize] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    /// `g^j` for any exponent.
    #[inline]
    pub fn exp(&self, j: u64) -> Elem {
        Elem(self.exp[(j % (self.q as u64 - 1)) as usize])
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let order = self.q - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + order - la };
        match self.zech[d as usize] {
            NO_LOG => Elem::ZERO,
            z => {
                let e = la as u64 + z as u64;
                Elem(self.exp[(e % order as u64) as usize])
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.0 == 0 {
            a
        } else if self.k == 1 {
            Elem(self.p - a.0)
        } else {
            self.mul(a, self.minus_one)
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let s = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        Elem(self.exp[(s % (self.q as u64 - 1)) as usize])
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        let l = self.log(a)?;
        let order = self.q - 1;
        Some(Elem(self.exp[((order - l) % order) as usize]))
    }

    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        Some(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        match self.log(a) {
            None => Elem::ZERO,
            Some(l) => {
                let order = self.q as u64 - 1;
                let r = ((l as u128 * (e % order) as u128) % order as u128) as u64;
                Elem(self.exp[r as usize])
            }
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: Elem) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = self.q as u64 - 1;
        Some(n / num_integer::gcd(l, n))
    }

    /// Multiplication straight from the modulus, bypassing the tables.
    pub fn mul_by_polynomials(&self, a: Elem, b: Elem) -> Elem {
        let pa = decode_digits(a.0, self.p, self.k);
        let pb = decode_digits(b.0, self.p, self.k);
        Elem(encode_digits(&poly::mul_mod(&pa, &pb, &self.modulus, self.p), self.p))
    }

    /// Addition by base-`p` digits, bypassing the Zech table.
    pub fn add_by_digits(&self, a: Elem, b: Elem) -> Elem {
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        for _ in 0..self.k {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place = place.wrapping_mul(self.p);
        }
        Elem(out)
    }
}

fn find_irreducible(p: u32, degree: usize, seed: u64) -> Result<Poly, FieldError> {
    let count = (p as u64).pow(degree as u32);
    let offset = seeded_offset(seed, 1, count);
    (0..count)
        .map(|i| poly::monic_from_index((offset + i) % count, degree, p))
        .find(|f| poly::is_irreducible(f, p))
        .ok_or(FieldError::SearchExhausted {
            p,
            degree: degree as u32,
        })
}

fn decode_digits(mut v: u32, p: u32, k: u32) -> Poly {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    poly::trim(&mut out);
    out
}

fn encode_digits(f: &[u32], p: u32) -> u32 {
    f.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}
