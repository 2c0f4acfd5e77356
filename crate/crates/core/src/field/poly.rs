//! Dense polynomials over a prime field GF(p).
//!
//! Coefficients are stored in ascending order (`c[i]` is the coefficient of
//! `x^i`) and kept trimmed, so the zero polynomial is the empty vector.

/// Polynomial over GF(p) with ascending coefficients in `[0, p)`.
pub type Poly = Vec<u32>;

#[inline]
fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

/// Modular inverse in GF(p) by Fermat.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p as u64 - 2, p)
}

pub fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn trim(f: &mut Poly) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(f: &[u32]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

pub fn sub(f: &[u32], g: &[u32], p: u32) -> Poly {
    let len = f.len().max(g.len());
    let mut out: Poly = (0..len)
        .map(|i| {
            let a = f.get(i).copied().unwrap_or(0);
            let b = g.get(i).copied().unwrap_or(0);
            (a + p - b) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub fn mul(f: &[u32], g: &[u32], p: u32) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + a as u64 * b as u64) % p as u64;
        }
    }
    let mut out: Poly = out.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Remainder of `f` modulo a nonzero `m`.
pub fn rem(f: &[u32], m: &[u32], p: u32) -> Poly {
    let dm = degree(m).expect("division by the zero polynomial");
    let mut r: Poly = f.to_vec();
    trim(&mut r);
    let lead_inv = inv_mod(m[dm], p);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let factor = mulmod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (i, &c) in m.iter().enumerate().take(dm + 1) {
            let t = mulmod(factor, c, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

pub fn mul_mod(f: &[u32], g: &[u32], m: &[u32], p: u32) -> Poly {
    rem(&mul(f, g, p), m, p)
}

/// `f^e mod m` by square-and-multiply.
pub fn pow_poly_mod(f: &[u32], mut e: u64, m: &[u32], p: u32) -> Poly {
    let mut acc: Poly = rem(&[1], m, p);
    let mut base = rem(f, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &base, m, p);
        }
        base = mul_mod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

pub fn gcd(f: &[u32], g: &[u32], p: u32) -> Poly {
    let mut a: Poly = f.to_vec();
    let mut b: Poly = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&mut a, p);
    a
}

pub fn make_monic(f: &mut Poly, p: u32) {
    if let Some(d) = degree(f) {
        let inv = inv_mod(f[d], p);
        for c in f.iter_mut() {
            *c = mulmod(*c, inv, p);
        }
    }
}

/// Monic polynomial of degree `d` whose low coefficients are the base-`p`
/// digits of `index` (`index < p^d`).
pub fn monic_from_index(index: u64, d: usize, p: u32) -> Poly {
    let mut out = Vec::with_capacity(d + 1);
    let mut t = index;
    for _ in 0..d {
        out.push((t % p as u64) as u32);
        t /= p as u64;
    }
    out.push(1);
    out
}

/// Ben-Or irreducibility test: `f` of degree `d` is irreducible iff
/// `gcd(x^(p^i) - x, f) = 1` for every `1 <= i <= d/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = match degree(f) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let x: Poly = vec![0, 1];
    let mut frob = rem(&x, f, p);
    for _ in 1..=d / 2 {
        frob = pow_poly_mod(&frob, p as u64, f, p);
        let g = gcd(&sub(&frob, &x, p), f, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Irreducibility by exhaustive trial division with every monic polynomial
/// of degree `1..=d/2`. Exponential in `d`; meant for desk-scale checks.
pub fn is_irreducible_exhaustive(f: &[u32], p: u32) -> bool {
    let d = match degree(f) {
        None | Some(0) => return false,
        Some(d) => d,
    };
    for e in 1..=d / 2 {
        let count = (p as u64).pow(e as u32);
        for idx in 0..count {
            let g = monic_from_index(idx, e, p);
            if rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}
