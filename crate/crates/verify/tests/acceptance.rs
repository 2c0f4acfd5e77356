//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Library results are compared against the
//! schoolbook oracles in `common`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{dlogs, gauss_sum, isomorphism, same_encoding, toric_count, trace_norm_fibers, Embedding, Gf};
use num_bigint::BigInt;
use num_complex::Complex64;
use tracenorm::bounds::{
    divisibility_check, frobenius_bound, improved_bound, katz_bound, prime_degree_interval, special_u, special_u_bound,
    toric_bound,
};
use tracenorm::character::{davenport_hasse_all, CharacterEngine};
use tracenorm::counting::{CountOptions, CountRecord, FiberCounts, ToricCounter, TraceNormTable};
use tracenorm::field::{build_extension, build_field, embed, Field, FieldSpec, Tower};

const DESK: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];
const RESIDUAL: f64 = 1e-6;
const OTHER_SEED: u64 = 0x5eed_0042;

fn field(q: u64, seed: u64) -> Arc<Field> {
    Arc::new(build_field(FieldSpec::from_order(q).unwrap(), seed).unwrap())
}

fn tower(sub: &Arc<Field>, m: u32, seed: u64) -> Tower {
    let big = Arc::new(build_extension(sub, m, seed).unwrap());
    embed(sub.clone(), big).unwrap()
}

fn library_fibers(sub: &Arc<Field>, m: u32, seed: u64) -> FiberCounts {
    TraceNormTable::new(&tower(sub, m, seed)).unwrap().fibers(true)
}

fn ipow(b: i128, e: u32) -> i128 {
    b.pow(e)
}

fn binom(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Everything the count-level criteria need for one `(q, n)`: library counts
/// and oracle counts side by side, labels in the library encoding.
struct Unit {
    q: u64,
    n: u32,
    field: Arc<Field>,
    gf: Gf,
    /// `N_{n+1}(a, b)` from the library, indexed `a * q + b`.
    fibers: Vec<u64>,
    oracle_fibers: Vec<u64>,
    library_fiber_table: FiberCounts,
    /// `N(u)`, indexed by `u`; entry 0 unused.
    toric: Vec<u64>,
    oracle_toric: Vec<u64>,
}

impl Unit {
    fn build(q: u64, n: u32, seed: u64) -> Unit {
        let field = field(q, seed);
        let gf = same_encoding(&field);
        let table = library_fibers(&field, n + 1, seed);
        let fibers = flatten(&field, &table);
        let oracle_fibers = trace_norm_fibers(&field, n + 1);
        let counter = ToricCounter::new(field.clone());
        let mut toric = vec![0];
        let mut oracle_toric = vec![0];
        for u in 1..q {
            toric.push(
                counter
                    .count(field.element(u).unwrap(), n, CountOptions::default())
                    .unwrap(),
            );
            oracle_toric.push(toric_count(&gf, u, n));
        }
        Unit {
            q,
            n,
            field,
            gf,
            fibers,
            oracle_fibers,
            library_fiber_table: table,
            toric,
            oracle_toric,
        }
    }

    fn n_tn(&self, a: u64, b: u64) -> u64 {
        self.fibers[(a * self.q + b) as usize]
    }

    /// `b / a^(n+1)` computed in the oracle field.
    fn u_of(&self, a: u64, b: u64) -> u64 {
        let gf = &self.gf;
        let an = gf.pow(&gf.elem(a), self.n as u64 + 1);
        gf.index(&gf.mul(&gf.elem(b), &gf.inv(&an)))
    }

    fn record(&self, a: u64, b: u64) -> CountRecord {
        let f = &self.field;
        let mut r = CountRecord::new(f, self.n, f.element(a).unwrap(), f.element(b).unwrap());
        r.trace_norm = Some(self.n_tn(a, b));
        r.set_toric(self.toric[self.u_of(a, b) as usize]);
        r
    }

    fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (1..self.q).flat_map(move |a| (1..self.q).map(move |b| (a, b)))
    }
}

fn flatten(field: &Field, table: &FiberCounts) -> Vec<u64> {
    let mut out = Vec::new();
    for a in field.elements() {
        for b in field.elements() {
            out.push(table.get(a, b));
        }
    }
    out
}

/// `|N - num/den| <= c q^(e/2)`, squared into integers.
fn within(n: i128, num: i128, den: i128, c: i128, q: i128, e: u32) -> bool {
    let dev = (den * n - num).abs();
    dev * dev <= den * den * c * c * q.pow(e)
}

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(failures: &mut Vec<String>, cond: bool, what: impl FnOnce() -> String) {
    if !cond && failures.len() < 20 {
        failures.push(what());
    } else if !cond {
        failures.push(String::new());
    }
}

fn verdict(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        let shown: Vec<_> = failures.iter().filter(|s| !s.is_empty()).cloned().collect();
        Err(format!(
            "{} failure(s) over {summary}: {}",
            failures.len(),
            shown.join("; ")
        ))
    }
}

fn criterion_1(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    let mut tuples = 0;
    for unit in units {
        let (q, n) = (unit.q as i128, unit.n);
        check(&mut failures, unit.fibers == unit.oracle_fibers, || {
            format!("q={q} m={} fibers differ from oracle", n + 1)
        });
        check(&mut failures, unit.toric == unit.oracle_toric, || {
            format!("q={q} n={n} toric counts differ from oracle")
        });
        let sign = ipow(-1, n);
        for (a, b) in unit.pairs() {
            tuples += 1;
            let nt = unit.oracle_fibers[(a * unit.q + b) as usize] as i128;
            let nu = unit.oracle_toric[unit.u_of(a, b) as usize] as i128;
            // q(q-1)N_{n+1} = q^(n+1) - 1 + (-1)^n (q(q-1)N(u) - (q-1)^(n+1))
            let lhs = q * (q - 1) * nt;
            let rhs = ipow(q, n + 1) - 1 + sign * (q * (q - 1) * nu - ipow(q - 1, n + 1));
            check(&mut failures, lhs == rhs, || {
                format!("q={q} n={n} (a,b)=({a},{b}): {lhs} != {rhs}")
            });
            check(&mut failures, unit.record(a, b).lemma21() == Some(true), || {
                format!("q={q} n={n} (a,b)=({a},{b}): library identity check rejects")
            });
        }
    }
    verdict(failures, format!("{tuples} tuples over {} (q, n) units", units.len()))
}

fn criterion_2(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0f64;
    let mut evaluations = 0;
    for unit in units {
        let engine = CharacterEngine::new(unit.field.clone()).unwrap();
        let f = &unit.field;
        for u in 1..unit.q {
            evaluations += 1;
            match engine.closed_form_toric(f.element(u).unwrap(), unit.n) {
                Ok(cf) => {
                    worst = worst.max(cf.residual);
                    check(
                        &mut failures,
                        cf.residual < RESIDUAL && cf.count == unit.oracle_toric[u as usize] as i128,
                        || {
                            format!(
                                "q={} n={} u={u}: toric closed form {} (residual {:e})",
                                unit.q, unit.n, cf.count, cf.residual
                            )
                        },
                    );
                }
                Err(e) => check(&mut failures, false, || format!("q={} n={} u={u}: {e}", unit.q, unit.n)),
            }
        }
        for (a, b) in unit.pairs() {
            evaluations += 1;
            let expected = unit.oracle_fibers[(a * unit.q + b) as usize] as i128;
            match engine.closed_form_trace_norm(f.element(a).unwrap(), f.element(b).unwrap(), unit.n) {
                Ok(cf) => {
                    worst = worst.max(cf.residual);
                    check(&mut failures, cf.residual < RESIDUAL && cf.count == expected, || {
                        format!(
                            "q={} n={} (a,b)=({a},{b}): closed form {} vs {expected}",
                            unit.q, unit.n, cf.count
                        )
                    });
                }
                Err(e) => check(&mut failures, false, || {
                    format!("q={} n={} (a,b)=({a},{b}): {e}", unit.q, unit.n)
                }),
            }
        }
    }
    verdict(
        failures,
        format!("{evaluations} closed forms, max residual {worst:.2e}"),
    )
}

/// Left side of the lifting identity summed in oracle arithmetic.
fn oracle_lifted_sums(sub: &Field, m: u32) -> Vec<Complex64> {
    let p = sub.characteristic() as u64;
    let q = sub.order() as u64;
    let big = Gf::first(p, sub.degree() as usize * m as usize);
    let emb = Embedding::new(sub, &big);
    let small = same_encoding(sub);
    let logs = dlogs(&small, sub.generator().value() as u64);
    let norm_exp = (big.size - 1) / (q - 1);
    let terms: Vec<(Complex64, u64)> = (1..big.size)
        .map(|i| {
            let x = big.elem(i);
            let mut tr = vec![0; big.d];
            let mut y = x.clone();
            for _ in 0..m {
                tr = big.add(&tr, &y);
                y = big.pow(&y, q);
            }
            let t = emb.preimage[&tr] as u64;
            let nm = emb.preimage[&big.pow(&x, norm_exp)] as u64;
            let psi = common::root_of_unity(small.absolute_trace(&small.elem(t)), p);
            (psi, logs[&small.elem(nm)])
        })
        .collect();
    (0..q - 1)
        .map(|j| {
            terms
                .iter()
                .map(|&(psi, l)| psi * common::root_of_unity(j * l % (q - 1), q - 1))
                .sum()
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0f64;
    let mut characters = 0;
    for q in [2u64, 3, 4, 5, 7, 9] {
        let sub = field(q, 0);
        let engine = CharacterEngine::new(sub.clone()).unwrap();
        let small = same_encoding(&sub);
        let generator = sub.generator().value() as u64;
        for m in [2u32, 3, 4] {
            if q.pow(m) > 1_000_000 {
                continue;
            }
            let t = tower(&sub, m, 0);
            let chars: Vec<_> = engine.characters().collect();
            let results = davenport_hasse_all(&t, &engine, &chars).unwrap();
            let oracle = oracle_lifted_sums(&sub, m);
            for (j, r) in results.iter().enumerate() {
                characters += 1;
                let g = gauss_sum(&small, generator, j as u64);
                let rhs = if m % 2 == 1 { g.powu(m) } else { -g.powu(m) };
                let res_oracle = (oracle[j] - rhs).norm();
                worst = worst.max(r.residual).max(res_oracle);
                check(&mut failures, r.residual < RESIDUAL, || {
                    format!("q={q} m={m} chi_{j}: residual {:e}", r.residual)
                });
                check(&mut failures, (r.lhs.value - oracle[j]).norm() < RESIDUAL, || {
                    format!("q={q} m={m} chi_{j}: lifted sum differs from oracle")
                });
                check(&mut failures, res_oracle < RESIDUAL, || {
                    format!("q={q} m={m} chi_{j}: oracle residual {res_oracle:e}")
                });
            }
        }
    }
    verdict(failures, format!("{characters} characters, max residual {worst:.2e}"))
}

fn criterion_4(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    let mut tuples = 0;
    for unit in units {
        let (q, n) = (unit.q as i128, unit.n);
        for (a, b) in unit.pairs() {
            tuples += 1;
            let count = unit.oracle_fibers[(a * unit.q + b) as usize] as i128;
            let improved = within(count, q.pow(n) - 1, q - 1, n as i128, q, n - 1);
            let katz = within(count, q.pow(n + 1) - 1, q * (q - 1), n as i128 + 1, q, n - 1);
            let r = unit.record(a, b);
            let lib_improved = improved_bound(&r).unwrap();
            let lib_katz = katz_bound(&r).unwrap();
            check(&mut failures, improved && katz, || {
                format!("q={q} n={n} (a,b)=({a},{b}) N={count} outside a bound")
            });
            check(
                &mut failures,
                lib_improved.holds == improved && lib_katz.holds == katz,
                || format!("q={q} n={n} (a,b)=({a},{b}): library verdict disagrees with exact comparison"),
            );
        }
    }
    // q = 2, n = 1: N_2(1, 1) = 2, center 1, radius 1
    let unit = units.iter().find(|u| u.q == 2 && u.n == 1).unwrap();
    let pinned = improved_bound(&unit.record(1, 1)).unwrap();
    check(
        &mut failures,
        unit.n_tn(1, 1) == 2 && pinned.deviation == BigInt::from(1) && pinned.holds && pinned.tight,
        || {
            format!(
                "q=2 n=1 regression: N={} deviation={} tight={}",
                unit.n_tn(1, 1),
                pinned.deviation,
                pinned.tight
            )
        },
    );
    verdict(failures, format!("{tuples} tuples, q=2 n=1 tight at deviation 1"))
}

fn criterion_5(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    let mut values = 0;
    let mut special = 0;
    for unit in units {
        let (q, n) = (unit.q as i128, unit.n);
        let sign = ipow(-1, n - 1);
        for u in 1..unit.q {
            values += 1;
            let count = unit.oracle_toric[u as usize] as i128;
            // N(u) = Σ_{j=2}^n (-1)^(n-j) C(n,j) q^(j-1) + (-1)^(n-1) n + (-1)^(n-1) T
            let known: i128 = (2..=n)
                .map(|j| ipow(-1, n - j) * binom(n as i128, j as i128) * q.pow(j - 1))
                .sum();
            let t = sign * (count - known) - n as i128;
            let bound = t * t <= (n as i128).pow(2) * q.pow(n - 1);
            let main = ((q - 1).pow(n) - ipow(-1, n)) / q;
            let toric_ok = within(count, main * q, q, n as i128, q, n - 1);
            let f = &unit.field;
            let mut r = CountRecord::new(f, n, f.element(1).unwrap(), f.element(u).unwrap());
            r.set_toric(unit.toric[u as usize]);
            check(&mut failures, bound && toric_ok, || {
                format!("q={q} n={n} u={u}: T={t} N={count}")
            });
            check(&mut failures, r.frobenius_trace == Some(t), || {
                format!("q={q} n={n} u={u}: library T differs")
            });
            let lib = frobenius_bound(&r).unwrap().holds && toric_bound(&r).unwrap().holds;
            check(&mut failures, lib == (bound && toric_ok), || {
                format!("q={q} n={n} u={u}: library verdict disagrees")
            });
        }
        // u = (n+1)^-(n+1) when p ∤ n+1
        let gf = &unit.gf;
        let np1 = (n as u64 + 1) % gf.p;
        let lib_u = special_u(&unit.field, n);
        if np1 == 0 {
            check(&mut failures, lib_u.is_none(), || {
                format!("q={q} n={n}: special u defined with p | n+1")
            });
            continue;
        }
        let u = gf.index(&gf.inv(&gf.pow(&gf.constant(np1), n as u64 + 1)));
        check(&mut failures, lib_u.map(|e| e.value() as u64) == Some(u), || {
            format!("q={q} n={n}: special u mismatch")
        });
        special += 1;
        let count = unit.oracle_toric[u as usize] as i128;
        let main = ((q - 1).pow(n) - ipow(-1, n)) / q;
        // (n-1) q^((n-1)/2), and for even n also (n-2) q^((n-1)/2) + q^((n-2)/2)
        let general = within(count, main, 1, n as i128 - 1, q, n - 1);
        let refined = if n % 2 == 0 {
            let dev = (count - main).abs();
            let rest = dev - q.pow((n - 2) / 2);
            rest <= 0 || rest * rest <= (n as i128 - 2).pow(2) * q.pow(n - 1)
        } else {
            true
        };
        let f = &unit.field;
        let mut r = CountRecord::new(f, n, f.element(1).unwrap(), f.element(u).unwrap());
        r.set_toric(unit.toric[u as usize]);
        let lib = special_u_bound(f, &r).unwrap();
        check(&mut failures, general && refined, || {
            format!("q={q} n={n} special u={u}: N={count} main={main}")
        });
        check(
            &mut failures,
            lib.holds() == (general && refined) && lib.refined.is_some() == (n % 2 == 0),
            || format!("q={q} n={n} special u={u}: library verdict disagrees"),
        );
    }
    verdict(failures, format!("{values} values of u, {special} special-u cases"))
}

/// Multiples of ℓ within `C ∓ (ℓ-1) q^((ℓ-2)/2)`, `C = (q^(ℓ-1)-1)/(q-1)`, by scanning.
fn interval_by_scan(q: i128, ell: u32) -> (i128, i128) {
    let l = ell as i128;
    let c = (q.pow(ell - 1) - 1) / (q - 1);
    let r2 = (l - 1) * (l - 1) * q.pow(ell - 2);
    let inside = |x: i128| (x - c) * (x - c) <= r2;
    let (mut low, mut high) = ((c / l) * l, (c / l) * l);
    while inside(low - l) {
        low -= l;
    }
    while !inside(low) {
        low += l;
    }
    while inside(high + l) {
        high += l;
    }
    while !inside(high) {
        high -= l;
    }
    (low, high)
}

fn criterion_6(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    let mut tuples = 0;
    let cases: Vec<(u64, u32)> = DESK.iter().map(|&q| (q, 3)).chain([(3, 5)]).collect();
    for (q, ell) in cases {
        let unit = units.iter().find(|u| u.q == q && u.n == ell - 1).unwrap();
        let gf = &unit.gf;
        let (low, high) = interval_by_scan(q as i128, ell);
        let lib = prime_degree_interval(q, ell).unwrap();
        check(
            &mut failures,
            lib.low == BigInt::from(low) && lib.high == BigInt::from(high),
            || {
                format!(
                    "q={q} l={ell}: library interval [{}, {}] vs [{low}, {high}]",
                    lib.low, lib.high
                )
            },
        );
        let ell_c = gf.constant(ell as u64 % gf.p);
        for (a, b) in unit.pairs() {
            tuples += 1;
            let count = unit.oracle_fibers[(a * q + b) as usize];
            let c = count as i128;
            check(&mut failures, low <= c && c <= high, || {
                format!("q={q} l={ell} (a,b)=({a},{b}): N={count} outside [{low}, {high}]")
            });
            let fixed = (0..q)
                .filter(|&c| {
                    let x = gf.elem(c);
                    gf.index(&gf.mul(&ell_c, &x)) == a && gf.index(&gf.pow(&x, ell as u64)) == b
                })
                .count() as u64;
            check(&mut failures, count % ell as u64 == fixed, || {
                format!("q={q} l={ell} (a,b)=({a},{b}): N={count} mod {ell} != R={fixed}")
            });
            let f = &unit.field;
            let d = divisibility_check(f, ell, f.element(a).unwrap(), f.element(b).unwrap(), unit.n_tn(a, b)).unwrap();
            check(&mut failures, d.fixed_points as u64 == fixed && d.holds, || {
                format!("q={q} l={ell} (a,b)=({a},{b}): library R differs")
            });
        }
    }
    verdict(failures, format!("{tuples} tuples"))
}

fn criterion_7(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    for unit in units {
        let q = unit.q;
        let m = unit.n + 1;
        let qm = q.pow(m);
        let at = |a: u64, b: u64| unit.fibers[(a * q + b) as usize];
        for a in 0..q {
            let row: u64 = (1..q).map(|b| at(a, b)).sum();
            check(&mut failures, row == qm / q - u64::from(a == 0), || {
                format!("q={q} m={m} a={a}: row sum {row}")
            });
        }
        for b in 1..q {
            let col: u64 = (0..q).map(|a| at(a, b)).sum();
            check(&mut failures, col == (qm - 1) / (q - 1), || {
                format!("q={q} m={m} b={b}: column sum {col}")
            });
        }
        let zero: u64 = (0..q).map(|a| at(a, 0)).sum();
        check(&mut failures, zero == 1 && at(0, 0) == 1, || {
            format!("q={q} m={m}: norm-zero fiber {zero}")
        });
        check(
            &mut failures,
            unit.library_fiber_table.partition_identities().holds(),
            || format!("q={q} m={m}: library partition check rejects"),
        );
    }
    verdict(failures, format!("{} (q, m) units", units.len()))
}

fn criterion_8(units: &[Unit]) -> Outcome {
    let mut failures = Vec::new();
    let mut changed = 0;
    for unit in units {
        let other = Unit::build(unit.q, unit.n, OTHER_SEED);
        let (q, n) = (unit.q, unit.n);
        let t0 = tower(&unit.field, n + 1, 0);
        let t1 = tower(&other.field, n + 1, OTHER_SEED);
        if t0.big().modulus() != t1.big().modulus() || t0.big().generator() != t1.big().generator() {
            changed += 1;
        }
        let phi: Vec<u64> = isomorphism(&unit.field, &other.field)
            .iter()
            .map(|e| e.value() as u64)
            .collect();
        for a in 0..q {
            for b in 0..q {
                let (x, y) = (unit.n_tn(a, b), other.n_tn(phi[a as usize], phi[b as usize]));
                check(&mut failures, x == y, || {
                    format!("q={q} m={} (a,b)=({a},{b}): {x} vs {y}", n + 1)
                });
            }
        }
        for u in 1..q {
            let (x, y) = (unit.toric[u as usize], other.toric[phi[u as usize] as usize]);
            check(&mut failures, x == y, || format!("q={q} n={n} u={u}: {x} vs {y}"));
        }
        check(&mut failures, other.fibers == other.oracle_fibers, || {
            format!("q={q} m={}: reseeded fibers differ from oracle", n + 1)
        });
    }
    check(&mut failures, changed > 0, || {
        "no unit changed representation under the second seed".into()
    });
    verdict(
        failures,
        format!(
            "{} units, {changed} with a different big-field modulus or generator",
            units.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let mut fields = 0;
    let mut worst = 0f64;
    for q in FieldSpec::up_to(64) {
        fields += 1;
        let q = q.order();
        let engine = CharacterEngine::new(field(q, 0)).unwrap();
        for chi in engine.characters() {
            let g = engine.gauss_sum(chi);
            if chi.is_trivial() {
                let r = g.round_integer();
                check(&mut failures, matches!(r, Ok(ref r) if r.value == -1), || {
                    format!("q={q}: G(chi_0) = {:?}", g.value)
                });
            } else {
                let dev = (g.value.norm_sqr() - q as f64).abs();
                worst = worst.max(dev);
                check(&mut failures, dev < RESIDUAL, || {
                    format!("q={q} chi_{}: |G|^2 off by {dev:e}", chi.index())
                });
            }
        }
    }
    verdict(
        failures,
        format!("{fields} fields q <= 64, max ||G|^2 - q| {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let units: Vec<Unit> = DESK
        .iter()
        .flat_map(|&q| {
            (1..=4u32)
                .filter(move |&n| q.pow(n + 1) <= 10_000_000)
                .map(move |n| (q, n))
        })
        .map(|(q, n)| Unit::build(q, n, 0))
        .collect();
    println!(
        "built {} (q, n) units with library and oracle counts ({:.1?})",
        units.len(),
        start.elapsed()
    );

    let criteria: Vec<Criterion> = vec![
        (
            "reduction identity, independent enumerations",
            Box::new(|| criterion_1(&units)),
        ),
        (
            "closed forms round to the enumerated counts",
            Box::new(|| criterion_2(&units)),
        ),
        ("lifting identity for every character", Box::new(criterion_3)),
        ("fiber bounds in exact arithmetic", Box::new(|| criterion_4(&units))),
        ("Frobenius trace and special-u radii", Box::new(|| criterion_5(&units))),
        (
            "prime-degree interval and divisibility",
            Box::new(|| criterion_6(&units)),
        ),
        ("partition identities", Box::new(|| criterion_7(&units))),
        ("representation independence", Box::new(|| criterion_8(&units))),
        ("Gauss sum unit properties", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({:.1?})", i + 1, t.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({:.1?})", i + 1, t.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1?})",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
