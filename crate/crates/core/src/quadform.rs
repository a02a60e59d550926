//! The norm forms `x² − a y²`: automorphs, fundamental domains, representation
//! numbers `R(n)` and local densities `ρ(q; A)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{factorize, is_prime, legendre_residue, valuation_i128};
use crate::{Error, Result};

/// Prime powers up to this size are handled by direct residue enumeration.
pub const RHO_DIRECT_CAP: u64 = 1_000_000;

/// Largest admissible number of `y` values scanned for one representation query.
const ENUMERATION_LIMIT: u128 = 100_000_000;

/// `w(d)`: the number of automorphs of a positive definite form of discriminant `d`.
pub fn w(d: i64) -> Result<u32> {
    match d {
        -4 => Ok(4),
        d if d < -4 => Ok(2),
        d => Err(Error::InvalidDiscriminant(d)),
    }
}

fn is_square_i64(n: i64) -> bool {
    n >= 0 && {
        let r = (n as u64).sqrt();
        r * r == n as u64
    }
}

/// Minimal positive solution of `t² − a u² = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    pub t: BigInt,
    pub u: BigInt,
}

impl PellSolution {
    fn as_i128(&self) -> Result<(i128, i128)> {
        match (self.t.to_i128(), self.u.to_i128()) {
            (Some(t), Some(u)) if t < (1 << 62) => Ok((t, u)),
            _ => Err(Error::Overflow(format!("Pell generator t = {} is too large", self.t))),
        }
    }

    /// `t + u√a` as a float.
    pub fn value_f64(&self, a: i64) -> f64 {
        self.t.to_f64().unwrap_or(f64::INFINITY) + self.u.to_f64().unwrap_or(f64::INFINITY) * (a as f64).sqrt()
    }
}

/// The fundamental unit `x + y√a > 1` of `Z[√a]` and its norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub x: BigInt,
    pub y: BigInt,
    pub norm: i8,
}

/// Continued fraction of `√a`: stops at the first convergent of norm ±1.
pub fn fundamental_unit(a: i64) -> Result<FundamentalUnit> {
    if a <= 0 || is_square_i64(a) {
        return Err(Error::NotPositiveNonSquare(a));
    }
    let a0 = (a as u64).sqrt() as i64;
    let big_a = BigInt::from(a);
    // Standard recurrence m, d, c for the expansion of √a.
    let (mut m, mut d, mut c) = (0i64, 1i64, a0);
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::from(a0));
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        let norm = &p * &p - &big_a * &q * &q;
        if norm.is_one() || norm == -BigInt::one() {
            return Ok(FundamentalUnit {
                x: p,
                y: q,
                norm: if norm.is_one() { 1 } else { -1 },
            });
        }
        m = d * c - m;
        d = (a - m * m) / d;
        c = (a0 + m) / d;
        let p_next = BigInt::from(c) * &p + &p_prev;
        let q_next = BigInt::from(c) * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

/// Generator of the proper automorphs of `x² − a y²` modulo `±1`.
pub fn pell_fundamental(a: i64) -> Result<PellSolution> {
    let eta = fundamental_unit(a)?;
    if eta.norm == 1 {
        return Ok(PellSolution { t: eta.x, u: eta.y });
    }
    // (x + y√a)² = x² + a y² + 2xy√a.
    Ok(PellSolution {
        t: &eta.x * &eta.x + BigInt::from(a) * &eta.y * &eta.y,
        u: BigInt::from(2) * &eta.x * &eta.y,
    })
}

/// The form `x² − a y²` with `a` a nonzero non-square integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryForm {
    a: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutomorphKind {
    Finite { order: u32 },
    Infinite { generator: PellSolution },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphGroup {
    pub form: BinaryForm,
    pub kind: AutomorphKind,
}

impl BinaryForm {
    pub fn new(a: i64) -> Result<Self> {
        if a == 0 || is_square_i64(a) {
            return Err(Error::InvalidForm(format!("a = {a} must be a nonzero non-square")));
        }
        if a.unsigned_abs() > 1 << 40 {
            return Err(Error::InvalidForm(format!("a = {a} is out of range")));
        }
        Ok(BinaryForm { a })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn discriminant(&self) -> i64 {
        4 * self.a
    }

    pub fn is_definite(&self) -> bool {
        self.a < 0
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        x * x - self.a as i128 * y * y
    }

    pub fn automorphs(&self) -> Result<AutomorphGroup> {
        let kind = if self.a < 0 {
            AutomorphKind::Finite {
                order: w(self.discriminant())?,
            }
        } else {
            AutomorphKind::Infinite {
                generator: pell_fundamental(self.a)?,
            }
        };
        Ok(AutomorphGroup { form: *self, kind })
    }

    fn pell(&self) -> Result<(i128, i128)> {
        pell_fundamental(self.a)?.as_i128()
    }

    /// Whether `(x, y)` is the chosen representative of its automorph orbit.
    ///
    /// For `a < 0`: `x > 0, y >= 0` when `a = −1`, else `x > 0` or `x = 0, y > 0`.
    /// For `a > 0`: `x + y√a > 0` and `√|n| <= x + y√a < (t + u√a)√|n|`, which
    /// amounts to `x, y >= 0` with `(x + y√a)(t − u√a)` not in the closed first quadrant.
    pub fn in_fundamental_domain(&self, x: i128, y: i128) -> Result<bool> {
        if x == 0 && y == 0 {
            return Ok(false);
        }
        if self.a < 0 {
            return Ok(if self.a == -1 {
                x > 0 && y >= 0
            } else {
                x > 0 || (x == 0 && y > 0)
            });
        }
        let (t, u) = self.pell()?;
        Ok(in_hyperbolic_domain(self.a as i128, t, u, x, y))
    }

    /// One representative per automorph orbit of solutions of `x² − a y² = n`.
    pub fn primary_representatives(&self, n: i64) -> Result<Vec<(i64, i64)>> {
        if n == 0 || (self.a < 0 && n < 0) {
            return Ok(Vec::new());
        }
        let a = self.a as i128;
        let n = n as i128;
        let mut out = Vec::new();
        if self.a < 0 {
            let ymax = (n / -a).sqrt();
            for y in -ymax..=ymax {
                let x2 = n + a * y * y;
                if let Some(x) = exact_sqrt(x2) {
                    let xs = if x == 0 { vec![0] } else { vec![x, -x] };
                    for x in xs {
                        if self.in_fundamental_domain(x, y)? {
                            out.push((x as i64, y as i64));
                        }
                    }
                }
            }
            return Ok(out);
        }
        let (t, u) = self.pell()?;
        let eps = t as f64 + u as f64 * (a as f64).sqrt();
        let bound = (eps + 1.0) * (n.unsigned_abs() as f64).sqrt() / (2.0 * (a as f64).sqrt());
        let ymax = bound.floor() as u128 + 1;
        if ymax > ENUMERATION_LIMIT {
            return Err(Error::Overflow(format!("y-range {ymax} for n = {n} is too long")));
        }
        for y in 0..=ymax as i128 {
            if let Some(x) = exact_sqrt(n + a * y * y) {
                if in_hyperbolic_domain(a, t, u, x, y) {
                    out.push((x as i64, y as i64));
                }
            }
        }
        Ok(out)
    }

    /// `R(n)`: number of automorph orbits on solutions of `x² − a y² = n`; zero for `n = 0`.
    pub fn representation_count(&self, n: i64) -> Result<u64> {
        Ok(self.primary_representatives(n)?.len() as u64)
    }
}

fn exact_sqrt(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let r = v.sqrt();
    (r * r == v).then_some(r)
}

fn in_hyperbolic_domain(a: i128, t: i128, u: i128, x: i128, y: i128) -> bool {
    if x < 0 || y < 0 || (x == 0 && y == 0) {
        return false;
    }
    let xs = x * t - a * y * u;
    let ys = y * t - x * u;
    !(xs >= 0 && ys >= 0)
}

pub fn representation_count(form: &BinaryForm, n: i64) -> Result<u64> {
    form.representation_count(n)
}

pub fn primary_representatives(form: &BinaryForm, n: i64) -> Result<Vec<(i64, i64)>> {
    form.primary_representatives(n)
}

/// `R(n)` for all `|n| <= bound`, built by one sweep over the fundamental domain.
#[derive(Debug, Clone)]
pub struct RepresentationTable {
    bound: i64,
    counts: Vec<u32>,
}

impl RepresentationTable {
    pub fn new(form: &BinaryForm, bound: i64) -> Result<Self> {
        let bound = bound.max(0);
        let mut counts = vec![0u32; 2 * bound as usize + 1];
        let a = form.a as i128;
        let nb = bound as i128;
        let mut record = |n: i128| counts[(n + nb) as usize] += 1;
        if a < 0 {
            let ymax = (nb / -a).sqrt();
            for y in -ymax..=ymax {
                let rest = nb + a * y * y;
                let xmax = rest.sqrt();
                for x in -xmax..=xmax {
                    if form.in_fundamental_domain(x, y)? {
                        record(form.eval(x, y));
                    }
                }
            }
        } else {
            let (t, u) = form.pell()?;
            let eps = t as f64 + u as f64 * (a as f64).sqrt();
            let ymax = ((eps + 1.0) * (nb as f64).sqrt() / (2.0 * (a as f64).sqrt())).floor() as u128 + 1;
            if ymax > ENUMERATION_LIMIT {
                return Err(Error::Overflow(format!("y-range {ymax} for bound {bound} is too long")));
            }
            for y in 0..=ymax as i128 {
                let ay2 = a * y * y;
                let lo = (ay2 - nb).max(0);
                let mut x = lo.sqrt();
                if x * x < lo {
                    x += 1;
                }
                let xmax = (ay2 + nb).sqrt();
                while x <= xmax {
                    if in_hyperbolic_domain(a, t, u, x, y) {
                        record(x * x - ay2);
                    }
                    x += 1;
                }
            }
        }
        counts[bound as usize] = 0;
        Ok(RepresentationTable { bound, counts })
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// `R(n)`; panics if `|n|` exceeds the table bound.
    pub fn get(&self, n: i64) -> u32 {
        assert!(n.abs() <= self.bound, "{n} outside representation table bound {}", self.bound);
        self.counts[(n + self.bound) as usize]
    }
}

/// `ρ(q; A) = #{(x, y) mod q : x² − a y² ≡ A}`, assembled by CRT from prime powers.
pub fn rho(form: &BinaryForm, q: u64, big_a: &BigInt) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidForm("modulus must be positive".into()));
    }
    let mut total = 1u64;
    for (p, k) in factorize(&BigInt::from(q))? {
        let pk = p.pow(k);
        let a_mod = big_a.mod_floor_u64(pk);
        total *= rho_prime_power(form, p, k, a_mod)?;
    }
    Ok(total)
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: u64) -> u64 {
        let r = self % BigInt::from(m);
        let r = if r.is_negative() { r + BigInt::from(m) } else { r };
        r.to_u64().unwrap()
    }
}

fn p_power(p: u64, k: u32) -> Option<u64> {
    p.checked_pow(k)
}

/// `ρ(p^k; A)` for `0 <= A < p^k`.
///
/// Direct enumeration while `p^k <= RHO_DIRECT_CAP`; beyond that the Hensel scaling
/// identity `ρ(p^{k+1}; A) = p ρ(p^k; A mod p^k)` reduces `k` when it applies. That
/// needs `k >= val_p(4a) + val_p(A)`: with `k >= val_p(4a)` alone it fails at `p = 2`,
/// e.g. `ρ(8; 2) = 16` but `ρ(4; 2) = 4` for `x² + y²`.
pub fn rho_prime_power(form: &BinaryForm, p: u64, k: u32, big_a: u64) -> Result<u64> {
    if k == 0 {
        return Ok(1);
    }
    let Some(m) = p_power(p, k).filter(|&m| m <= RHO_DIRECT_CAP) else {
        let threshold = hensel_threshold(form, p);
        let below = p.checked_pow(k - 1);
        return match below {
            Some(m1) if big_a % m1 != 0 && k - 1 >= threshold + valuation_i128((big_a % m1) as i128, p) => {
                Ok(p * rho_prime_power(form, p, k - 1, big_a % m1)?)
            }
            _ => Err(Error::EnumerationCap { p, k, cap: RHO_DIRECT_CAP }),
        };
    };
    let hist = scaled_square_histogram(form.a, m);
    Ok(rho_from_histogram(&hist, m, big_a % m))
}

/// `val_p(4a)`.
pub fn hensel_threshold(form: &BinaryForm, p: u64) -> u32 {
    valuation_i128(4 * form.a as i128, p)
}

/// `hist[w] = #{y mod m : a y² ≡ w}`.
fn scaled_square_histogram(a: i64, m: u64) -> Vec<u32> {
    let mut hist = vec![0u32; m as usize];
    let am = (a as i128).rem_euclid(m as i128) as u128;
    let m128 = m as u128;
    for y in 0..m as u128 {
        hist[(am * (y * y % m128) % m128) as usize] += 1;
    }
    hist
}

fn rho_from_histogram(hist: &[u32], m: u64, big_a: u64) -> u64 {
    let m128 = m as u128;
    let mut count = 0u64;
    for x in 0..m128 {
        let v = (x * x % m128 + m128 - big_a as u128) % m128;
        count += hist[v as usize] as u64;
    }
    count
}

/// Class of `A mod p^k` under multiplication by unit squares; `ρ(p^k; ·)` is constant on classes.
fn unit_square_class(p: u64, k: u32, big_a: u64) -> (u32, u64) {
    if big_a == 0 {
        return (k, 0);
    }
    let mut v = 0;
    let mut u = big_a;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    let j = k - v;
    if p == 2 {
        (v, u % (1 << j.min(3)))
    } else {
        (v, legendre_residue(u % p, p) as u64)
    }
}

/// The full table `A ↦ ρ(p^k; A)` for `A mod p^k`.
pub fn rho_table(form: &BinaryForm, p: u64, k: u32) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = p_power(p, k)
        .filter(|&m| m <= RHO_DIRECT_CAP)
        .ok_or(Error::EnumerationCap { p, k, cap: RHO_DIRECT_CAP })?;
    let hist = scaled_square_histogram(form.a, m);
    let mut cache: HashMap<(u32, u64), u64> = HashMap::new();
    Ok((0..m)
        .map(|big_a| {
            *cache
                .entry(unit_square_class(p, k, big_a))
                .or_insert_with(|| rho_from_histogram(&hist, m, big_a))
        })
        .collect())
}
