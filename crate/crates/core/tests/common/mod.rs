//! Oracles and checkers shared by the integration tests. The brute-force oracles do not
//! call into the library's density or discriminant code; `residue_search` decides
//! symbols with `hilbert_int`, which `brute_hilbert` checks separately.
#![allow(dead_code)]

use std::collections::BTreeSet;

use conicpencil::exactnum::{hilbert_int, valuation_i128};
use conicpencil::pencil::NormFormSystem;
use conicpencil::quadform::{rho_table, BinaryForm};
use conicpencil::{Place, Rational};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = (n as f64).sqrt() as i64;
        (r.saturating_sub(1)..=r + 1).any(|x| x * x == n)
    }
}

pub fn random_nonsquare(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let a = rng.gen_range(-bound..=bound);
        if a != 0 && !is_square(a) {
            return a;
        }
    }
}

fn valuation(mut n: i128, p: i128) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Divides out squares of `p`, leaving valuation 0 or 1.
fn reduce_at(mut n: i128, p: i128) -> i128 {
    while n % (p * p) == 0 {
        n /= p * p;
    }
    n
}

/// `(a, b)_p` from the existence of a primitive zero of `z² − a x² − b y²` mod `p^N`.
///
/// With `a, b` of valuation at most one every primitive zero has gradient valuation at
/// most `val_p(2) + 1 = e`, so a zero mod `p^{2e+1}` lifts by Hensel's lemma.
pub fn brute_hilbert(a: i64, b: i64, p: u64) -> i8 {
    let p = p as i128;
    let (a, b) = (reduce_at(a as i128, p), reduce_at(b as i128, p));
    let e = if p == 2 { 2 } else { 1 };
    let m = p.pow(2 * e + 1);
    let mut square = vec![false; m as usize];
    let mut unit_square = vec![false; m as usize];
    for z in 0..m {
        let s = (z * z % m) as usize;
        square[s] = true;
        if z % p != 0 {
            unit_square[s] = true;
        }
    }
    let (am, bm) = (a.rem_euclid(m), b.rem_euclid(m));
    for x in 0..m {
        let ax = am * (x * x % m) % m;
        for y in 0..m {
            let v = ((ax + bm * (y * y % m)) % m) as usize;
            let primitive_xy = x % p != 0 || y % p != 0;
            if (primitive_xy && square[v]) || unit_square[v] {
                return 1;
            }
        }
    }
    -1
}

/// `(a, b)_∞`.
pub fn real_hilbert(a: i64, b: i64) -> i8 {
    if a < 0 && b < 0 {
        -1
    } else {
        1
    }
}

/// `#{(x, y) mod q : x² − a y² ≡ A}` by direct enumeration.
pub fn brute_rho(a: i64, q: u64, big_a: i64) -> u64 {
    let q = q as i128;
    let target = (big_a as i128).rem_euclid(q);
    let mut count = 0;
    for x in 0..q {
        for y in 0..q {
            if (x * x - a as i128 * y * y).rem_euclid(q) == target {
                count += 1;
            }
        }
    }
    count
}

/// All integer solutions of `x² − a y² = n` for `a < 0`.
pub fn definite_solutions(a: i64, n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let r = (n as f64).sqrt() as i64 + 1;
    for x in -r..=r {
        for y in -r..=r {
            if x * x - a * y * y == n {
                out.push((x, y));
            }
        }
    }
    out
}

/// Discriminant of `p4 t⁴ + p3 t³ + p2 t² + p1 t + p0` by the classical sixteen-term formula.
pub fn explicit_quartic_discriminant(p: &[Rational; 5]) -> Rational {
    let (a, b, c, d, e) = (&p[4], &p[3], &p[2], &p[1], &p[0]);
    let k = |n: i64| int(n);
    k(256) * a * a * a * e * e * e - k(192) * a * a * b * d * e * e - k(128) * a * a * c * c * e * e
        + k(144) * a * a * c * d * d * e
        - k(27) * a * a * d * d * d * d
        + k(144) * a * b * b * c * e * e
        - k(6) * a * b * b * d * d * e
        - k(80) * a * b * c * c * d * e
        + k(18) * a * b * c * d * d * d
        + k(16) * a * c * c * c * c * e
        - k(4) * a * c * c * c * d * d
        - k(27) * b * b * b * b * e * e
        + k(18) * b * b * b * c * d * e
        - k(4) * b * b * b * d * d * d
        - k(4) * b * b * c * c * c * e
        + b * b * c * c * d * d
}

/// Sign bit and odd-exponent primes of a nonzero rational, by trial division.
pub fn square_class_bits(x: &Rational) -> (bool, BTreeSet<u64>) {
    assert!(!x.is_zero());
    let mut primes = BTreeSet::new();
    for part in [x.numer(), x.denom()] {
        let mut n: u128 = part.magnitude().try_into().expect("small rationals");
        let mut d = 2u128;
        while d * d <= n {
            let mut odd = false;
            while n % d == 0 {
                n /= d;
                odd = !odd;
            }
            if odd && !primes.insert(d as u64) {
                primes.remove(&(d as u64));
            }
            d += 1;
        }
        if n > 1 && !primes.insert(n as u64) {
            primes.remove(&(n as u64));
        }
    }
    (x < &Rational::zero(), primes)
}

/// Rank over `F₂` of the square classes of `xs`.
pub fn square_class_rank(xs: &[Rational]) -> usize {
    let bits: Vec<(bool, BTreeSet<u64>)> = xs.iter().map(square_class_bits).collect();
    let mut coords: Vec<u64> = bits.iter().flat_map(|(_, ps)| ps.iter().copied()).collect();
    coords.sort_unstable();
    coords.dedup();
    let mut rows: Vec<Vec<bool>> = bits
        .iter()
        .map(|(neg, ps)| {
            let mut v = vec![*neg];
            v.extend(coords.iter().map(|p| ps.contains(p)));
            v
        })
        .collect();
    let width = coords.len() + 1;
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && rows[i][col] {
                let src = rows[rank].clone();
                for (x, y) in rows[i].iter_mut().zip(src) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Outcome of the exhaustive residue search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Residues {
    Soluble,
    Insoluble,
    /// Some residue class stays undetermined at the deepest level.
    Undecided,
}

/// Levels by which an undetermined residue class may be refined.
const EXTRA_LEVELS: u32 = 8;

/// Exhaustive search over every `u mod p^k` for a residue class on which all the
/// symbols `(a_i, f_i(u))_p` are determined and equal to `+1`.
///
/// Scaling `u` by `p²` preserves every square class, so a `Q_p`-solution has a
/// representative with some coordinate of valuation at most one; if all such classes
/// are determined and rejected the system is insoluble. A class where some `f_i(u)` is
/// not yet determined is split into its `p^s` lifts, at most `EXTRA_LEVELS` times.
pub fn residue_search(system: &NormFormSystem, p: u64, k: u32) -> Residues {
    let pp = p as i128;
    let s = system.s();
    let m = pp.pow(k);
    let total = (m as u128).pow(s as u32);
    let mut pending = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let u: Vec<i128> = (0..s)
            .map(|_| {
                let x = (rest % m as u128) as i128;
                rest /= m as u128;
                x
            })
            .collect();
        if u.iter().all(|&x| x % (pp * pp) == 0) {
            continue;
        }
        match classify(system, p, k, &u) {
            Some(true) => return Residues::Soluble,
            Some(false) => {}
            None => pending.push(u),
        }
    }
    for level in k + 1..=k + EXTRA_LEVELS {
        if pending.is_empty() {
            return Residues::Insoluble;
        }
        let step = pp.pow(level - 1);
        let mut next = Vec::new();
        for u in pending {
            for idx in 0..(p as u128).pow(s as u32) {
                let mut rest = idx;
                let child: Vec<i128> = u
                    .iter()
                    .map(|&x| {
                        let d = (rest % p as u128) as i128;
                        rest /= p as u128;
                        x + d * step
                    })
                    .collect();
                match classify(system, p, level, &child) {
                    Some(true) => return Residues::Soluble,
                    Some(false) => {}
                    None => next.push(child),
                }
            }
        }
        pending = next;
    }
    if pending.is_empty() {
        Residues::Insoluble
    } else {
        Residues::Undecided
    }
}

/// Whether every lift of `u mod p^k` solves the system (`Some(true)`), none does
/// (`Some(false)`), or the class is not yet determined.
fn classify(system: &NormFormSystem, p: u64, k: u32, u: &[i128]) -> Option<bool> {
    let pp = p as i128;
    let m = pp.pow(k);
    let unit_digits = if p == 2 { 3 } else { 1 };
    let mut verdict = Some(true);
    for i in 0..system.r() {
        let c: i128 = system.forms()[i].iter().zip(u).map(|(&f, &x)| f as i128 * x).sum::<i128>().rem_euclid(m);
        if c == 0 || k - valuation(c, pp) < unit_digits {
            verdict = None;
            continue;
        }
        if hilbert_int(system.a()[i] as i128, c, Place::Finite(p)) == -1 {
            return Some(false);
        }
    }
    verdict
}

/// Random system with `s = 2`, small nonsquare `a_i` and pairwise non-proportional forms.
pub fn random_system(rng: &mut ChaCha8Rng, r: usize, a_bound: i64, f_bound: i64) -> NormFormSystem {
    loop {
        let a: Vec<i64> = (0..r).map(|_| random_nonsquare(rng, a_bound)).collect();
        let f: Vec<Vec<i64>> = (0..r)
            .map(|_| vec![rng.gen_range(-f_bound..=f_bound), rng.gen_range(-f_bound..=f_bound)])
            .collect();
        if let Ok(sys) = NormFormSystem::new(a, f) {
            return sys;
        }
    }
}

/// Sign of `x + y√a` for `a > 0`.
pub fn sign_of(x: i128, y: i128, a: i128) -> i32 {
    match (x.signum(), y.signum()) {
        (0, 0) => 0,
        (sx, sy) if sx >= 0 && sy >= 0 => 1,
        (sx, sy) if sx <= 0 && sy <= 0 => -1,
        (sx, _) => {
            let (xx, ayy) = (x * x, a * y * y);
            if xx > ayy {
                sx as i32
            } else {
                -sx as i32
            }
        }
    }
}

/// `x + y√a >= √m` for `x + y√a > 0`, decided on `(x + y√a)² − m = (x² + a y² − m) + 2xy√a`.
pub fn at_least_root(x: i128, y: i128, a: i128, m: i128) -> bool {
    sign_of(x * x + a * y * y - m, 2 * x * y, a) >= 0
}

/// Brings a solution into `√|n| <= x + y√a < ε√|n|`, `ε = t + u√a`, by sign change and
/// powers of `ε`.
pub fn reduce(mut x: i128, mut y: i128, a: i128, n: i128, t: i128, u: i128) -> (i128, i128) {
    if sign_of(x, y, a) < 0 {
        x = -x;
        y = -y;
    }
    let m = n.abs();
    loop {
        if !at_least_root(x, y, a, m) {
            (x, y) = (x * t + a * y * u, x * u + y * t);
        } else if at_least_root(x * t - a * y * u, y * t - x * u, a, m) {
            (x, y) = (x * t - a * y * u, y * t - x * u);
        } else {
            return (x, y);
        }
    }
}

pub fn indefinite_solutions(a: i64, n: i64, ymax: i64) -> Vec<(i128, i128)> {
    let mut out = Vec::new();
    for y in -ymax..=ymax {
        let x2 = n as i128 + a as i128 * (y as i128) * (y as i128);
        if x2 < 0 {
            continue;
        }
        let r = (x2 as f64).sqrt() as i128;
        for x in [r - 1, r, r + 1] {
            if x >= 0 && x * x == x2 {
                out.push((x, y as i128));
                if x != 0 {
                    out.push((-x, y as i128));
                }
            }
        }
    }
    out
}

/// `x + y√a = √m` exactly.
pub fn is_root(x: i128, y: i128, a: i128, m: i128) -> bool {
    sign_of(x * x + a * y * y - m, 2 * x * y, a) == 0
}

/// Every `(k, A, ℓ)` with `k >= val_p(4a)`, `A ≢ 0 mod p^k` and `p^{k+1} <= 10⁵` where
/// `ρ(p^{k+1}; A + ℓp^k) ≠ p ρ(p^k; A)`, as `(p, a, k, A)`.
pub fn scaling_failures(p: u64, a: i64) -> (usize, Vec<(u64, i64, u32, u64)>) {
    let form = BinaryForm::new(a).unwrap();
    let v = valuation_i128(4 * a as i128, p);
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut k = v.max(1);
    while p.pow(k + 1) <= 100_000 {
        let lower = rho_table(&form, p, k).unwrap();
        let upper = rho_table(&form, p, k + 1).unwrap();
        let pk = p.pow(k);
        for big_a in 1..pk {
            for l in 0..p {
                checked += 1;
                if upper[(big_a + l * pk) as usize] != p * lower[big_a as usize] {
                    failures.push((p, a, k, big_a));
                }
            }
        }
        k += 1;
    }
    (checked, failures)
}
