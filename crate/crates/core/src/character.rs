//! Additive and multiplicative characters, Gauss sums, and the Gauss-sum
//! closed forms for the toric count and the trace/norm count.
//!
//! Character values are floating point. Every [`ComplexValue`] carries a
//! running absolute error bound, and an integer is only ever read off a sum
//! when that bound is below one half.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{trace_rel, Elem, Field, FieldError, Tower};

/// Error attached to a freshly evaluated root of unity.
const ROOT_ERROR: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharacterError {
    #[error("multiplicative character evaluated at zero")]
    ZeroArgument,
    #[error("cannot round {value} to an integer: error bound {error_bound}, residual {residual}")]
    RoundingFailure {
        value: f64,
        residual: f64,
        error_bound: f64,
    },
    #[error("rounded sum {total} is not divisible by {modulus}")]
    NotDivisible { total: i128, modulus: i128 },
    #[error("character index {index} out of range for a group of order {order}")]
    BadIndex { index: u32, order: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A complex number together with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue {
    pub value: Complex64,
    pub error: f64,
}

impl ComplexValue {
    pub const ZERO: ComplexValue = ComplexValue::exact(0.0);
    pub const ONE: ComplexValue = ComplexValue::exact(1.0);

    pub const fn exact(re: f64) -> Self {
        ComplexValue {
            value: Complex64::new(re, 0.0),
            error: 0.0,
        }
    }

    /// `exp(2πi · num/den)`.
    pub fn root_of_unity(num: u64, den: u64) -> Self {
        let r = num % den;
        if r == 0 {
            return Self::ONE;
        }
        let theta = TAU * r as f64 / den as f64;
        ComplexValue {
            value: Complex64::new(theta.cos(), theta.sin()),
            error: ROOT_ERROR,
        }
    }

    pub fn conj(self) -> Self {
        ComplexValue {
            value: self.value.conj(),
            error: self.error,
        }
    }

    pub fn norm(self) -> f64 {
        self.value.norm()
    }

    pub fn pow(self, e: u32) -> Self {
        (0..e).fold(Self::ONE, |acc, _| acc * self)
    }

    /// Distance to `other`, and the combined error bound of both operands.
    pub fn distance(self, other: ComplexValue) -> (f64, f64) {
        ((self.value - other.value).norm(), self.error + other.error)
    }

    /// Reads off the integer this value approximates.
    ///
    /// Fails unless the error bound is below 1/2 and the distance to the
    /// nearest integer is within that bound.
    pub fn round_integer(self) -> Result<Rounded, CharacterError> {
        let nearest = self.value.re.round();
        let residual = (self.value - Complex64::new(nearest, 0.0)).norm();
        if self.error >= 0.5 || residual > self.error {
            return Err(CharacterError::RoundingFailure {
                value: self.value.re,
                residual,
                error_bound: self.error,
            });
        }
        Ok(Rounded {
            value: nearest as i128,
            residual,
            error_bound: self.error,
        })
    }
}

impl Add for ComplexValue {
    type Output = ComplexValue;
    fn add(self, rhs: ComplexValue) -> ComplexValue {
        let value = self.value + rhs.value;
        ComplexValue {
            value,
            error: self.error + rhs.error + f64::EPSILON * value.norm(),
        }
    }
}

impl Mul for ComplexValue {
    type Output = ComplexValue;
    fn mul(self, rhs: ComplexValue) -> ComplexValue {
        let (na, nb) = (self.value.norm(), rhs.value.norm());
        ComplexValue {
            value: self.value * rhs.value,
            error: na * rhs.error + nb * self.error + self.error * rhs.error + 4.0 * f64::EPSILON * na * nb,
        }
    }
}

impl Neg for ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue {
            value: -self.value,
            error: self.error,
        }
    }
}

impl std::iter::Sum for ComplexValue {
    fn sum<I: Iterator<Item = ComplexValue>>(iter: I) -> Self {
        iter.fold(ComplexValue::ZERO, |a, b| a + b)
    }
}

/// An integer read off a floating-point sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rounded {
    pub value: i128,
    pub residual: f64,
    pub error_bound: f64,
}

/// `χ_k(g^j) = exp(2πi·k·j/(q-1))` for the field's stored generator `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiplicativeCharacter {
    index: u32,
    group_order: u32,
}

impl MultiplicativeCharacter {
    pub fn new(index: u32, group_order: u32) -> Result<Self, CharacterError> {
        if index >= group_order {
            return Err(CharacterError::BadIndex {
                index,
                order: group_order,
            });
        }
        Ok(MultiplicativeCharacter { index, group_order })
    }

    pub fn trivial(group_order: u32) -> Self {
        MultiplicativeCharacter { index: 0, group_order }
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// `χ^e` for any integer exponent; `e = -1` is the conjugate.
    pub fn pow(&self, e: i64) -> Self {
        let n = self.group_order as i64;
        MultiplicativeCharacter {
            index: (self.index as i64 * e.rem_euclid(n)).rem_euclid(n) as u32,
            group_order: self.group_order,
        }
    }

    pub fn conj(&self) -> Self {
        self.pow(-1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.group_order, other.group_order);
        MultiplicativeCharacter {
            index: (self.index + other.index) % self.group_order,
            group_order: self.group_order,
        }
    }
}

/// Character data for one field: absolute traces, the canonical additive
/// character, and all `q-1` Gauss sums.
#[derive(Clone, Debug)]
pub struct CharacterEngine {
    field: Arc<Field>,
    abs_trace: Vec<u32>,
    gauss: Vec<ComplexValue>,
}

impl CharacterEngine {
    pub fn new(field: Arc<Field>) -> Result<Self, CharacterError> {
        let prime = Arc::new(crate::field::build_prime_field(field.characteristic())?);
        let tower = Tower::new(prime, field.clone())?;
        let abs_trace = field
            .elements()
            .map(|x| trace_rel(&tower, x).map(|t| t.value()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut engine = CharacterEngine {
            field,
            abs_trace,
            gauss: Vec::new(),
        };
        let order = engine.group_order();
        engine.gauss = (0..order)
            .map(|k| {
                engine.compute_gauss_sum(MultiplicativeCharacter {
                    index: k,
                    group_order: order,
                })
            })
            .collect();
        Ok(engine)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn group_order(&self) -> u32 {
        self.field.order() - 1
    }

    pub fn character(&self, index: u32) -> Result<MultiplicativeCharacter, CharacterError> {
        MultiplicativeCharacter::new(index, self.group_order())
    }

    pub fn characters(&self) -> impl Iterator<Item = MultiplicativeCharacter> + '_ {
        let order = self.group_order();
        (0..order).map(move |index| MultiplicativeCharacter {
            index,
            group_order: order,
        })
    }

    /// `Tr_{F_q/F_p}(x)` as an integer in `[0, p)`.
    pub fn absolute_trace(&self, x: Elem) -> u32 {
        self.abs_trace[x.value() as usize]
    }

    /// Canonical additive character `ψ(x) = exp(2πi·Tr(x)/p)`.
    pub fn additive(&self, x: Elem) -> ComplexValue {
        ComplexValue::root_of_unity(self.absolute_trace(x) as u64, self.field.characteristic() as u64)
    }

    pub fn multiplicative(&self, chi: MultiplicativeCharacter, x: Elem) -> Result<ComplexValue, CharacterError> {
        let j = self.field.log(x).ok_or(CharacterError::ZeroArgument)?;
        Ok(self.chi_at_log(chi, j as u64))
    }

    fn chi_at_log(&self, chi: MultiplicativeCharacter, j: u64) -> ComplexValue {
        let n = self.group_order() as u64;
        ComplexValue::root_of_unity((chi.index as u64 * (j % n)) % n, n)
    }

    fn compute_gauss_sum(&self, chi: MultiplicativeCharacter) -> ComplexValue {
        (0..self.group_order() as u64)
            .map(|j| self.additive(self.field.exp(j)) * self.chi_at_log(chi, j))
            .sum()
    }

    /// `G(χ) = Σ_{x ≠ 0} ψ(x) χ(x)`.
    pub fn gauss_sum(&self, chi: MultiplicativeCharacter) -> ComplexValue {
        self.gauss[chi.index as usize]
    }

    /// `Σ_χ G(χ)^(n+1) G(χ̄^(n+1)) χ̄(w)` for nonzero `w`.
    fn twisted_gauss_moment(&self, w: Elem, n: u32) -> Result<ComplexValue, CharacterError> {
        let lw = self.field.log(w).ok_or(CharacterError::ZeroArgument)? as u64;
        let e = n as i64 + 1;
        Ok(self
            .characters()
            .map(|chi| {
                let bar = chi.conj();
                self.gauss_sum(chi).pow(n + 1) * self.gauss_sum(bar.pow(e)) * self.chi_at_log(bar, lw)
            })
            .sum())
    }

    /// `(-1)^(n+1)` as an element of the field.
    fn sign_element(&self, n: u32) -> Elem {
        let minus_one = self.field.neg(Elem::ONE);
        self.field.pow(minus_one, n as u64 + 1)
    }

    /// `N(u)` from `q(q-1)N(u) = (q-1)^(n+1) + Σ_χ G(χ)^(n+1) G(χ̄^(n+1)) χ̄((-1)^(n+1) u)`.
    pub fn closed_form_toric(&self, u: Elem, n: u32) -> Result<ClosedForm, CharacterError> {
        if u.is_zero() {
            return Err(CharacterError::ZeroArgument);
        }
        let w = self.field.mul(self.sign_element(n), u);
        let moment = self.twisted_gauss_moment(w, n)?.round_integer()?;
        let q = self.field.order() as i128;
        let total = (q - 1).pow(n + 1) + moment.value;
        divide_out(total, q * (q - 1), moment)
    }

    /// `N_{n+1}(a, b)` from
    /// `q(q-1)N = q^(n+1) - 1 + (-1)^n Σ_χ G(χ)^(n+1) G(χ̄^(n+1)) χ̄((-1)^(n+1) b/a^(n+1))`.
    pub fn closed_form_trace_norm(&self, a: Elem, b: Elem, n: u32) -> Result<ClosedForm, CharacterError> {
        if a.is_zero() || b.is_zero() {
            return Err(CharacterError::ZeroArgument);
        }
        let f = &self.field;
        let ratio = f.div(b, f.pow(a, n as u64 + 1)).ok_or(CharacterError::ZeroArgument)?;
        let w = f.mul(self.sign_element(n), ratio);
        let moment = self.twisted_gauss_moment(w, n)?.round_integer()?;
        let q = f.order() as i128;
        let sign = if n.is_multiple_of(2) { 1 } else { -1 };
        let total = q.pow(n + 1) - 1 + sign * moment.value;
        divide_out(total, q * (q - 1), moment)
    }
}

fn divide_out(total: i128, modulus: i128, moment: Rounded) -> Result<ClosedForm, CharacterError> {
    if total % modulus != 0 {
        return Err(CharacterError::NotDivisible { total, modulus });
    }
    Ok(ClosedForm {
        count: total / modulus,
        residual: moment.residual,
        error_bound: moment.error_bound,
    })
}

/// A count recovered from a character-sum identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    pub count: i128,
    /// Distance of the floating character sum from the integer it rounded to.
    pub residual: f64,
    pub error_bound: f64,
}

/// Both sides of the lifting identity
/// `Σ_{x ∈ GF(q^m)*} ψ(Tr x) χ(Norm x) = (-1)^(m-1) G(χ)^m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DavenportHasse {
    pub character: MultiplicativeCharacter,
    pub lhs: ComplexValue,
    pub rhs: ComplexValue,
    pub residual: f64,
    pub error_bound: f64,
}

impl DavenportHasse {
    pub fn holds(&self) -> bool {
        self.residual <= self.error_bound
    }
}

/// Checks the lifting identity for one character of the subfield.
/// `engine` must be the character engine of `tower.sub()`.
pub fn davenport_hasse_check(
    tower: &Tower,
    engine: &CharacterEngine,
    chi: MultiplicativeCharacter,
) -> Result<DavenportHasse, CharacterError> {
    Ok(davenport_hasse_all(tower, engine, &[chi])?.remove(0))
}

/// Checks the lifting identity for each listed character, sharing one pass
/// over the big field.
pub fn davenport_hasse_all(
    tower: &Tower,
    engine: &CharacterEngine,
    characters: &[MultiplicativeCharacter],
) -> Result<Vec<DavenportHasse>, CharacterError> {
    assert!(
        Arc::ptr_eq(tower.sub(), engine.field()) || tower.sub().spec() == engine.field().spec(),
        "engine does not belong to the subfield"
    );
    let big = tower.big();
    let sub = tower.sub();
    let m = tower.degree();
    // (ψ(Tr x), log Norm x) for every x ≠ 0
    let terms: Vec<(ComplexValue, u64)> = (0..big.order() as u64 - 1)
        .map(|j| {
            let x = big.exp(j);
            let tr = trace_rel(tower, x)?;
            let norm = tower.norm_from_log(j as u32);
            let ln = sub.log(norm).expect("norm of a unit is a unit") as u64;
            Ok((engine.additive(tr), ln))
        })
        .collect::<Result<_, FieldError>>()?;

    characters
        .iter()
        .map(|&chi| {
            let lhs: ComplexValue = terms.iter().map(|&(psi, ln)| psi * engine.chi_at_log(chi, ln)).sum();
            let g = engine.gauss_sum(chi).pow(m);
            let rhs = if m % 2 == 1 { g } else { -g };
            let (residual, error_bound) = lhs.distance(rhs);
            if error_bound >= 0.5 {
                return Err(CharacterError::RoundingFailure {
                    value: lhs.value.re,
                    residual,
                    error_bound,
                });
            }
            Ok(DavenportHasse {
                character: chi,
                lhs,
                rhs,
                residual,
                error_bound,
            })
        })
        .collect()
}
