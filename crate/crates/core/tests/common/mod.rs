//! Slow reference implementations for tests: schoolbook GF(p)[x] arithmetic
//! and brute-force counts. Nothing here calls library field arithmetic.
#![allow(dead_code)]

use std::collections::HashMap;

use num_complex::Complex64;
use tracenorm::{Elem as LibElem, Field};

pub type Elem = Vec<u64>;

/// GF(p)[x] / (modulus), elements as coefficient vectors of length `d`.
#[derive(Clone, Debug)]
pub struct Gf {
    pub p: u64,
    pub d: usize,
    /// Monic, low degree first, length `d + 1`.
    pub modulus: Vec<u64>,
    pub size: u64,
}

fn poly_rem(p: u64, mut a: Vec<u64>, m: &[u64]) -> Vec<u64> {
    let dm = m.len() - 1;
    let lead_inv = modpow(m[dm], p - 2, p);
    while a.len() > dm {
        let top = a.pop().unwrap();
        if top == 0 {
            continue;
        }
        let c = top * lead_inv % p;
        let shift = a.len() - dm;
        for (i, &mi) in m[..dm].iter().enumerate() {
            a[shift + i] = (a[shift + i] + p * p - c * mi % p) % p;
        }
    }
    a
}

pub fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Monic polynomial of degree `d` whose lower coefficients are the base-`p`
/// digits of `index`.
pub fn monic(index: u64, d: usize, p: u64) -> Vec<u64> {
    let mut f = digits(index, d, p);
    f.push(1);
    f
}

pub fn digits(mut v: u64, d: usize, p: u64) -> Vec<u64> {
    (0..d)
        .map(|_| {
            let r = v % p;
            v /= p;
            r
        })
        .collect()
}

/// No monic factor of degree 1..=d/2, by trial division.
pub fn is_irreducible_naive(p: u64, f: &[u64]) -> bool {
    let d = f.len() - 1;
    for e in 1..=d / 2 {
        for idx in 0..p.pow(e as u32) {
            let g = monic(idx, e, p);
            if poly_rem(p, f.to_vec(), &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    d >= 1
}

impl Gf {
    pub fn new(p: u64, modulus: Vec<u64>) -> Self {
        let d = modulus.len() - 1;
        Gf {
            p,
            d,
            size: p.pow(d as u32),
            modulus,
        }
    }

    /// GF(p^d) from the first irreducible monic polynomial in index order.
    pub fn first(p: u64, d: usize) -> Self {
        let f = (0..p.pow(d as u32))
            .map(|i| monic(i, d, p))
            .find(|f| is_irreducible_naive(p, f))
            .expect("an irreducible exists");
        Gf::new(p, f)
    }

    pub fn elem(&self, idx: u64) -> Elem {
        digits(idx, self.d, self.p)
    }

    pub fn index(&self, e: &[u64]) -> u64 {
        e.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn constant(&self, c: u64) -> Elem {
        let mut e = vec![0; self.d];
        e[0] = c % self.p;
        e
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let mut prod = vec![0u64; 2 * self.d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(self.p, prod, &self.modulus);
        r.resize(self.d, 0);
        r
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Elem {
        let mut base = a.to_vec();
        let mut r = self.constant(1);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: &[u64]) -> Elem {
        assert!(!self.is_zero(a));
        self.pow(a, self.size - 2)
    }

    pub fn order(&self, a: &[u64]) -> u64 {
        let one = self.constant(1);
        let mut x = a.to_vec();
        let mut k = 1;
        while x != one {
            x = self.mul(&x, a);
            k += 1;
        }
        k
    }

    /// Evaluates a polynomial with GF(p) coefficients at `x`.
    pub fn eval(&self, f: &[u64], x: &[u64]) -> Elem {
        f.iter().rev().fold(vec![0; self.d], |acc, &c| {
            self.add(&self.mul(&acc, x), &self.constant(c))
        })
    }

    /// `Σ x^(p^i)`, the absolute trace, as an integer mod p.
    pub fn absolute_trace(&self, x: &[u64]) -> u64 {
        let mut t = vec![0; self.d];
        let mut y = x.to_vec();
        for _ in 0..self.d {
            t = self.add(&t, &y);
            y = self.pow(&y, self.p);
        }
        assert!(t[1..].iter().all(|&c| c == 0), "trace lies in GF(p)");
        t[0]
    }
}

/// The library field's elements realized inside an oracle field: the
/// library element with digits `c_i` is `Σ c_i θ^i` for `θ` the first root
/// of the library modulus in `big`.
pub struct Embedding {
    pub image: Vec<Elem>,
    pub preimage: HashMap<Elem, u32>,
}

impl Embedding {
    pub fn new(sub: &Field, big: &Gf) -> Self {
        let p = sub.characteristic() as u64;
        let k = sub.degree() as usize;
        let modulus: Vec<u64> = sub.modulus().iter().map(|&c| c as u64).collect();
        let theta = if k == 1 {
            big.constant(0)
        } else {
            (0..big.size)
                .map(|i| big.elem(i))
                .find(|x| big.is_zero(&big.eval(&modulus, x)))
                .expect("library modulus splits in the big field")
        };
        let image: Vec<Elem> = (0..sub.order() as u64)
            .map(|v| {
                let c = digits(v, k, p);
                if k == 1 {
                    big.constant(c[0])
                } else {
                    big.eval(&c, &theta)
                }
            })
            .collect();
        let preimage = image.iter().enumerate().map(|(v, e)| (e.clone(), v as u32)).collect();
        Embedding { image, preimage }
    }
}

/// `counts[a * q + b] = N_m(a, b)`, labels in the library encoding of `sub`.
pub fn trace_norm_fibers(sub: &Field, m: u32) -> Vec<u64> {
    let p = sub.characteristic() as u64;
    let q = sub.order() as u64;
    let big = Gf::first(p, sub.degree() as usize * m as usize);
    let emb = Embedding::new(sub, &big);
    let norm_exp = (big.size - 1) / (q - 1);
    let mut counts = vec![0u64; (q * q) as usize];
    for idx in 0..big.size {
        let x = big.elem(idx);
        let mut tr = vec![0; big.d];
        let mut y = x.clone();
        for _ in 0..m {
            tr = big.add(&tr, &y);
            y = big.pow(&y, q);
        }
        let nm = if big.is_zero(&x) {
            vec![0; big.d]
        } else {
            big.pow(&x, norm_exp)
        };
        let a = emb.preimage[&tr] as u64;
        let b = emb.preimage[&nm] as u64;
        counts[(a * q + b) as usize] += 1;
    }
    counts
}

/// The library field's own encoding, with arithmetic redone from its modulus.
pub fn same_encoding(field: &Field) -> Gf {
    let p = field.characteristic() as u64;
    if field.degree() == 1 {
        // modulus x: constants only
        Gf::new(p, vec![0, 1])
    } else {
        Gf::new(p, field.modulus().iter().map(|&c| c as u64).collect())
    }
}

/// `#{x ∈ (GF(q)*)^n : x_1 + … + x_n + u/(x_1⋯x_n) = 1}` by full enumeration.
pub fn toric_count(gf: &Gf, u: u64, n: u32) -> u64 {
    let nonzero: Vec<Elem> = (1..gf.size).map(|i| gf.elem(i)).collect();
    let u = gf.elem(u);
    let one = gf.constant(1);
    let mut count = 0;
    let mut idx = vec![0usize; n as usize];
    loop {
        let mut sum = vec![0; gf.d];
        let mut prod = gf.constant(1);
        for &i in &idx {
            sum = gf.add(&sum, &nonzero[i]);
            prod = gf.mul(&prod, &nonzero[i]);
        }
        let total = gf.add(&sum, &gf.mul(&u, &gf.inv(&prod)));
        if total == one {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return count;
            }
            idx[k] += 1;
            if idx[k] < nonzero.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Discrete logs to the library generator, computed by powering in `gf`.
pub fn dlogs(gf: &Gf, generator: u64) -> HashMap<Elem, u64> {
    let g = gf.elem(generator);
    let mut x = gf.constant(1);
    let mut out = HashMap::new();
    for j in 0..gf.size - 1 {
        out.insert(x.clone(), j);
        x = gf.mul(&x, &g);
    }
    assert_eq!(out.len() as u64, gf.size - 1, "generator is primitive");
    out
}

pub fn root_of_unity(num: u64, den: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (num % den) as f64 / den as f64)
}

/// `G(χ_j) = Σ_{x≠0} χ_j(x) ψ(x)` with `χ_j(g^i) = e^(2πi ij/(q-1))`.
pub fn gauss_sum(gf: &Gf, generator: u64, j: u64) -> Complex64 {
    let logs = dlogs(gf, generator);
    let q1 = gf.size - 1;
    (1..gf.size)
        .map(|i| {
            let x = gf.elem(i);
            root_of_unity(j * logs[&x] % q1, q1) * root_of_unity(gf.absolute_trace(&x), gf.p)
        })
        .sum()
}

/// A field isomorphism between two constructions of GF(q), found by sending
/// the first construction's modulus root to a root in the second.
pub fn isomorphism(from: &Field, to: &Field) -> Vec<LibElem> {
    let k = from.degree() as usize;
    let p = from.characteristic() as u64;
    if k == 1 {
        return to.elements().collect();
    }
    let gf = same_encoding(to);
    let modulus: Vec<u64> = from.modulus().iter().map(|&c| c as u64).collect();
    let theta = (0..gf.size)
        .map(|i| gf.elem(i))
        .find(|x| gf.is_zero(&gf.eval(&modulus, x)))
        .unwrap();
    (0..from.order() as u64)
        .map(|v| {
            let c = digits(v, k, p);
            to.element(gf.index(&gf.eval(&c, &theta))).unwrap()
        })
        .collect()
}
