use std::sync::Arc;

use super::{Elem, Field, FieldError};

/// A verified embedding GF(q) → GF(q^m).
///
/// The sub generator `g` is sent to a root `r` of its minimal polynomial over
/// GF(p); every `g^j` then maps to `r^j`. The image is the set of big-field
/// elements whose discrete log is a multiple of `(q^m - 1)/(q - 1)`, which
/// gives the inverse lookup for free.
#[derive(Clone, Debug)]
pub struct Tower {
    sub: Arc<Field>,
    big: Arc<Field>,
    degree: u32,
    image_of_generator: Elem,
    /// `(q^m - 1)/(q - 1)`
    step: u64,
    forward: Vec<Elem>,
    /// `preimage[i]` is the sub element mapping to `g_big^(i * step)`.
    preimage: Vec<Elem>,
}

/// Embeds `sub` into `big`. Any root of the minimal polynomial is a valid
/// image; the first one in encoding order is taken.
pub fn embed(sub: Arc<Field>, big: Arc<Field>) -> Result<Tower, FieldError> {
    Tower::new(sub, big)
}

impl Tower {
    pub fn new(sub: Arc<Field>, big: Arc<Field>) -> Result<Self, FieldError> {
        let not_sub = FieldError::NotASubfieldCardinality {
            sub: sub.order(),
            big: big.order(),
        };
        if sub.characteristic() != big.characteristic() || !big.degree().is_multiple_of(sub.degree()) {
            return Err(not_sub);
        }
        let degree = big.degree() / sub.degree();
        let q = sub.order() as u64;
        let big_order = big.order() as u64 - 1;
        let step = big_order / (q - 1);

        let minpoly = minimal_polynomial(&sub, sub.generator());
        let root = big
            .elements()
            .find(|&x| {
                let value = minpoly
                    .iter()
                    .rev()
                    .fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, x), big.from_int(c as i64)));
                value.is_zero()
            })
            .ok_or(FieldError::RootNotFound { big: big.order() })?;

        let root_log = big
            .log(root)
            .expect("root of a minimal polynomial of a unit is nonzero") as u64;
        let mut forward = vec![Elem::ZERO; q as usize];
        let mut preimage = vec![Elem::ZERO; (q - 1) as usize];
        for j in 0..q - 1 {
            let x = sub.exp(j);
            let l = (root_log * j) % big_order;
            debug_assert_eq!(l % step, 0);
            forward[x.value() as usize] = big.exp(l);
            preimage[(l / step) as usize] = x;
        }

        Ok(Tower {
            sub,
            big,
            degree,
            image_of_generator: root,
            step,
            forward,
            preimage,
        })
    }

    pub fn sub(&self) -> &Arc<Field> {
        &self.sub
    }

    pub fn big(&self) -> &Arc<Field> {
        &self.big
    }

    /// Relative degree `m`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn image_of_generator(&self) -> Elem {
        self.image_of_generator
    }

    #[inline]
    pub fn forward(&self, v: Elem) -> Elem {
        self.forward[v.value() as usize]
    }

    /// Inverse of [`forward`](Self::forward), defined exactly on the image.
    #[inline]
    pub fn lift_back(&self, x: Elem) -> Result<Elem, FieldError> {
        match self.big.log(x) {
            None => Ok(Elem::ZERO),
            Some(l) if (l as u64).is_multiple_of(self.step) => Ok(self.preimage[(l as u64 / self.step) as usize]),
            Some(_) => Err(FieldError::NotInSubfieldImage(x.value())),
        }
    }

    /// Norm of `g_big^j` without leaving the log domain: it is
    /// `g_big^(j * step)`, i.e. `preimage[j mod (q-1)]`.
    #[inline]
    pub fn norm_from_log(&self, j: u32) -> Elem {
        self.preimage[(j as u64 % (self.sub.order() as u64 - 1)) as usize]
    }

    /// Relative trace, left in the big field.
    pub(crate) fn trace_in_big(&self, a: Elem) -> Elem {
        let q = self.sub.order() as u64;
        let mut acc = Elem::ZERO;
        let mut conj = a;
        for _ in 0..self.degree {
            acc = self.big.add(acc, conj);
            conj = self.big.pow(conj, q);
        }
        acc
    }
}

/// Minimal polynomial of `a` over GF(p), as integer coefficients in `[0, p)`.
fn minimal_polynomial(field: &Field, a: Elem) -> Vec<u32> {
    let p = field.characteristic() as u64;
    let mut conjugates = vec![a];
    let mut c = field.pow(a, p);
    while c != a {
        conjugates.push(c);
        c = field.pow(c, p);
    }
    // product of (x - c) with coefficients in the field
    let mut coeffs = vec![Elem::ONE];
    for &c in &conjugates {
        let mut next = vec![Elem::ZERO; coeffs.len() + 1];
        for (i, &co) in coeffs.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], co);
            next[i] = field.sub(next[i], field.mul(co, c));
        }
        coeffs = next;
    }
    coeffs
        .into_iter()
        .map(|c| {
            assert!(c.value() < field.characteristic(), "minimal polynomial left GF(p)");
            c.value()
        })
        .collect()
}

/// `Tr(α) = α + α^q + … + α^(q^(m-1))`, mapped back into the subfield.
pub fn trace_rel(tower: &Tower, alpha: Elem) -> Result<Elem, FieldError> {
    tower.lift_back(tower.trace_in_big(alpha))
}

/// `Norm(α) = α^((q^m - 1)/(q - 1))`, mapped back into the subfield.
pub fn norm_rel(tower: &Tower, alpha: Elem) -> Result<Elem, FieldError> {
    tower.lift_back(tower.big.pow(alpha, tower.step))
}

/// Norm of an embedded subfield element: `v^m`.
pub fn norm_of_base_element(tower: &Tower, v: Elem) -> Elem {
    tower.sub.pow(v, tower.degree as u64)
}
