//! Local solubility of norm-form systems, with witnesses, and local isotropy of
//! diagonal quaternary quadratic forms.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{hilbert, hilbert_parts, is_prime, primes_up_to, unit_residue, valuation, valuation_i128, Place};
use crate::pencil::NormFormSystem;
use crate::{Error, Rational, Result};

/// Default bound below which every prime is checked.
pub const DEFAULT_PRIME_BOUND: u64 = 100;

/// Largest modulus `p^depth` handled by the residue search.
const MAX_MODULUS: u128 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalWitness {
    /// A rational point with `f_i(u) > 0` on the definite indices and `f_i(u) ≠ 0` elsewhere.
    Real { u: Vec<Rational> },
    /// A residue vector `u mod p^precision`; every lift solves the system over `Q_p`.
    Padic { p: u64, precision: u32, u: Vec<u64> },
}

impl LocalWitness {
    pub fn place(&self) -> Place {
        match self {
            LocalWitness::Real { .. } => Place::Infinite,
            LocalWitness::Padic { p, .. } => Place::Finite(*p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceVerdict {
    pub place: Place,
    pub soluble: bool,
    pub witness: Option<LocalWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub soluble: bool,
    pub bad_places: Vec<Place>,
    /// One verdict per checked place, in place order.
    pub verdicts: Vec<PlaceVerdict>,
}

/// Strict homogeneous inequality `Σ c_j u_j > 0` over the first `len` variables.
type Row = Vec<Rational>;

/// Fourier–Motzkin elimination for strict homogeneous systems.
///
/// Returns a rational point satisfying every row strictly, or `None`.
fn strict_feasible(rows: &[Row], s: usize) -> Option<Vec<Rational>> {
    // levels[j] holds the system in variables 0..=j.
    let mut levels: Vec<Vec<Row>> = vec![Vec::new(); s];
    levels[s - 1] = rows.to_vec();
    for j in (0..s).rev() {
        let current = &levels[j];
        let mut next = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for row in current {
            match row[j].numer().sign() {
                num_bigint::Sign::Plus => pos.push(row),
                num_bigint::Sign::Minus => neg.push(row),
                num_bigint::Sign::NoSign => next.push(row[..j].to_vec()),
            }
        }
        // c·x + cp x_j > 0 and d·x + cn x_j > 0 (cn < 0) give (c/cp − d/cn)·x > 0.
        for p in &pos {
            for n in &neg {
                let row: Row = (0..j).map(|k| &p[k] / &p[j] - &n[k] / &n[j]).collect();
                next.push(row);
            }
        }
        if j == 0 {
            if !next.is_empty() {
                return None;
            }
        } else {
            dedup_rows(&mut next);
            levels[j - 1] = next;
        }
    }
    // Back-substitute from x_0 upward.
    let mut x: Vec<Rational> = Vec::with_capacity(s);
    for j in 0..s {
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for row in &levels[j] {
            let rest: Rational = (0..j).map(|k| &row[k] * &x[k]).fold(Rational::zero(), |a, b| a + b);
            if row[j].is_zero() {
                continue;
            }
            let bound = -rest / &row[j];
            if row[j].is_positive() {
                lower = Some(lower.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                upper = Some(upper.map_or(bound.clone(), |u| u.min(bound)));
            }
        }
        let v = match (lower, upper) {
            (Some(l), Some(u)) => (l + u) / Rational::from_integer(2.into()),
            (Some(l), None) => l + Rational::one(),
            (None, Some(u)) => u - Rational::one(),
            (None, None) => Rational::zero(),
        };
        x.push(v);
    }
    Some(x)
}

fn dedup_rows(rows: &mut Vec<Row>) {
    // Normalize each row by its first nonzero entry's absolute value.
    for row in rows.iter_mut() {
        if let Some(first) = row.iter().find(|c| !c.is_zero()).cloned() {
            let s = first.abs();
            for c in row.iter_mut() {
                *c = &*c / &s;
            }
        }
    }
    rows.sort_by(|a, b| a.cmp(b));
    rows.dedup();
}

/// Real solubility: some `u ∈ R^s` has `f_i(u) > 0` for `a_i < 0` and `f_i(u) ≠ 0` for all `i`.
pub fn real_soluble(system: &NormFormSystem) -> PlaceVerdict {
    let s = system.s();
    let as_row = |i: usize| -> Row { system.forms()[i].iter().map(|&c| Rational::from_integer(c.into())).collect() };
    let rows: Vec<Row> = system.minus_indices().into_iter().map(as_row).collect();
    let Some(base) = strict_feasible(&rows, s) else {
        return PlaceVerdict {
            place: Place::Infinite,
            soluble: false,
            witness: None,
        };
    };
    let u = avoid_hyperplanes(system, base);
    PlaceVerdict {
        place: Place::Infinite,
        soluble: true,
        witness: Some(LocalWitness::Real { u }),
    }
}

/// Moves a point of the open cone off the hyperplanes `f_i = 0`.
fn avoid_hyperplanes(system: &NormFormSystem, base: Vec<Rational>) -> Vec<Rational> {
    let ok = |u: &[Rational]| {
        (0..system.r()).all(|i| {
            let v = system.eval_rational(i, u);
            !v.is_zero() && (system.a()[i] > 0 || v.is_positive())
        })
    };
    if ok(&base) {
        return base;
    }
    let s = system.s();
    // Moment-curve directions: a nonzero linear form vanishes at most s − 1 of them.
    for k in 1..=(system.r() + s + 1) as i64 {
        let d: Vec<Rational> = (0..s as u32).map(|j| Rational::from_integer(BigInt::from(k).pow(j))).collect();
        let mut t = Rational::one();
        for _ in 0..200 {
            let u: Vec<Rational> = base.iter().zip(&d).map(|(b, dj)| b + &t * dj).collect();
            if ok(&u) {
                return u;
            }
            t /= Rational::from_integer(2.into());
        }
    }
    unreachable!("an open cone always contains points off finitely many hyperplanes")
}

/// `max_i val_p(4 a_i)`.
pub fn hensel_bound(system: &NormFormSystem, p: u64) -> u32 {
    system
        .a()
        .iter()
        .map(|&a| valuation_i128(4 * a as i128, p))
        .max()
        .unwrap_or(0)
}

/// Default search depth `max_i val_p(4a_i) + 2`.
pub fn default_depth(system: &NormFormSystem, p: u64) -> u32 {
    hensel_bound(system, p) + 2
}

struct PadicSearch<'a> {
    system: &'a NormFormSystem,
    p: u64,
    depth: u32,
    /// Per form: (val_p(a_i), unit residue of a_i).
    a_data: Vec<(u32, u64)>,
    /// Digits needed past the valuation for the unit class to be determined.
    unit_digits: u32,
}

enum Status {
    Rejected,
    /// Not decidable at this precision.
    Short,
    Undetermined,
    Accepted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Found,
    Refuted,
    Inconclusive,
}

impl PadicSearch<'_> {
    fn status(&self, u: &[i128], level: u32) -> Status {
        let m = (self.p as i128).pow(level);
        // u and p² u give the same classes, so only u with min val <= 1 are searched.
        if level >= 2 && u.iter().all(|&x| x % (self.p as i128 * self.p as i128) == 0) {
            return Status::Rejected;
        }
        let mut all = true;
        for i in 0..self.system.r() {
            let c = self.system.forms()[i]
                .iter()
                .zip(u)
                .map(|(&k, &x)| (k as i128).rem_euclid(m) * x % m)
                .sum::<i128>()
                .rem_euclid(m);
            if c == 0 {
                all = false;
                continue;
            }
            let v = valuation_i128(c, self.p);
            if level - v < self.unit_digits {
                all = false;
                continue;
            }
            let unit = c / (self.p as i128).pow(v);
            let res_mod = if self.p == 2 { 8 } else { self.p as i128 };
            let (alpha, ures) = self.a_data[i];
            if hilbert_parts(self.p, alpha, ures, v, unit.rem_euclid(res_mod) as u64) == -1 {
                return Status::Rejected;
            }
        }
        if all {
            Status::Accepted
        } else if level == self.depth {
            Status::Short
        } else {
            Status::Undetermined
        }
    }

    /// Extends `u` (known mod p^level) digit by digit.
    fn dfs(&self, u: &mut Vec<i128>, level: u32) -> Outcome {
        if level > 0 {
            match self.status(u, level) {
                Status::Rejected => return Outcome::Refuted,
                Status::Accepted => return Outcome::Found,
                Status::Short => return Outcome::Inconclusive,
                Status::Undetermined => {}
            }
        }
        let s = u.len();
        let scale = (self.p as i128).pow(level);
        let count = (self.p as u128).pow(s as u32);
        let base = u.clone();
        let mut outcome = Outcome::Refuted;
        for idx in 0..count {
            let mut rest = idx;
            for j in 0..s {
                u[j] = base[j] + (rest % self.p as u128) as i128 * scale;
                rest /= self.p as u128;
            }
            match self.dfs(u, level + 1) {
                Outcome::Found => return Outcome::Found,
                Outcome::Inconclusive => outcome = Outcome::Inconclusive,
                Outcome::Refuted => {}
            }
        }
        u.copy_from_slice(&base);
        outcome
    }
}

/// Extra digits tried beyond the requested depth before giving up.
const MAX_EXTRA_DEPTH: u32 = 8;

fn search(system: &NormFormSystem, p: u64, depth: u32, start: Option<(&[u64], u32)>) -> Result<PlaceVerdict> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let bound = hensel_bound(system, p) + 1;
    if depth < bound {
        return Err(Error::DepthTooSmall { p, depth, bound });
    }
    let a_data: Vec<(u32, u64)> = system
        .a()
        .iter()
        .map(|&a| unit_residue(&BigInt::from(a), p))
        .collect();
    let verdict = |soluble, witness| PlaceVerdict {
        place: Place::Finite(p),
        soluble,
        witness,
    };
    for d in depth..=depth + MAX_EXTRA_DEPTH {
        if (p as u128).checked_pow(d).map_or(true, |m| m > MAX_MODULUS) {
            return Err(Error::Undecided { p, depth: d - 1 });
        }
        let searcher = PadicSearch {
            system,
            p,
            depth: d,
            a_data: a_data.clone(),
            unit_digits: if p == 2 { 3 } else { 1 },
        };
        let (mut u, level) = match start {
            Some((prefix, level)) => (prefix.iter().map(|&x| x as i128).collect(), level),
            None => (vec![0i128; system.s()], 0),
        };
        match searcher.dfs(&mut u, level) {
            Outcome::Found => {
                let w = LocalWitness::Padic {
                    p,
                    precision: d,
                    u: u.iter().map(|&x| x as u64).collect(),
                };
                return Ok(verdict(true, Some(w)));
            }
            Outcome::Refuted => return Ok(verdict(false, None)),
            Outcome::Inconclusive => {}
        }
    }
    Err(Error::Undecided { p, depth: depth + MAX_EXTRA_DEPTH })
}

/// Search for `u mod p^depth` with every `f_i(u) ≢ 0 mod p^depth` and every
/// `(a_i, f_i(u))_p = +1`, the symbols being determined by `u mod p^depth`.
pub fn padic_soluble(system: &NormFormSystem, p: u64, depth: u32) -> Result<PlaceVerdict> {
    search(system, p, depth, None)
}

/// Re-runs the search one digit deeper inside the residue class of `witness`.
pub fn lift_witness(system: &NormFormSystem, witness: &LocalWitness) -> Result<PlaceVerdict> {
    match witness {
        LocalWitness::Padic { p, precision, u } => search(system, *p, precision + 1, Some((u, *precision))),
        LocalWitness::Real { .. } => Err(Error::InvalidSystem("only p-adic witnesses lift".into())),
    }
}

/// Checks `∞`, every prime `<= prime_bound`, and every bad prime of the system.
///
/// `depth` overrides the default `max_i val_p(4a_i) + 2` (raised to the Hensel bound if lower).
pub fn everywhere_locally_soluble(system: &NormFormSystem, prime_bound: u64, depth: Option<u32>) -> Result<LocalReport> {
    let mut primes = primes_up_to(prime_bound.max(2));
    primes.extend(system.bad_primes()?);
    primes.sort_unstable();
    primes.dedup();
    let finite: Vec<PlaceVerdict> = primes
        .par_iter()
        .map(|&p| {
            let d = depth.map_or(default_depth(system, p), |d| d.max(hensel_bound(system, p) + 1));
            padic_soluble(system, p, d)
        })
        .collect::<Result<_>>()?;
    let mut verdicts = vec![real_soluble(system)];
    verdicts.extend(finite);
    let bad_places: Vec<Place> = verdicts.iter().filter(|v| !v.soluble).map(|v| v.place).collect();
    Ok(LocalReport {
        soluble: bad_places.is_empty(),
        bad_places,
        verdicts,
    })
}

/// Whether `x` is a nonzero square in `Q_p`.
pub fn is_padic_square(x: &Rational, p: u64) -> Result<bool> {
    let v = valuation(x, p)?;
    if v % 2 != 0 {
        return Ok(false);
    }
    let n = x.numer() * x.denom();
    let (_, res) = unit_residue(&n, p);
    Ok(if p == 2 {
        res == 1
    } else {
        crate::exactnum::legendre(&BigInt::from(res), p)? == 1
    })
}

/// Whether `Σ c_i x_i² = 0` has a nontrivial solution over `Q_v`.
///
/// At a prime, a quaternary form is anisotropic exactly when its discriminant is a
/// square and its Hasse invariant `∏_{i<j} (c_i, c_j)` equals `−(−1, −1)`.
pub fn diagonal_quadric_soluble(coeffs: &[Rational; 4], v: Place) -> Result<bool> {
    if coeffs.iter().any(Zero::is_zero) {
        return Err(Error::InvalidForm("diagonal coefficients must be nonzero".into()));
    }
    match v {
        Place::Infinite => {
            let pos = coeffs.iter().filter(|c| c.is_positive()).count();
            Ok(pos != 0 && pos != 4)
        }
        Place::Finite(p) => {
            let d: Rational = coeffs.iter().fold(Rational::one(), |acc, c| acc * c);
            if !is_padic_square(&d, p)? {
                return Ok(true);
            }
            let mut hasse = 1i8;
            for i in 0..4 {
                for j in i + 1..4 {
                    hasse *= hilbert(&coeffs[i], &coeffs[j], v)?;
                }
            }
            let minus_one = -Rational::one();
            Ok(hasse == hilbert(&minus_one, &minus_one, v)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn sys(a: &[i64], f: &[&[i64]]) -> NormFormSystem {
        NormFormSystem::new(a.to_vec(), f.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Every value of x² + y² over Q_3 has even valuation, and these eight forms
    /// cannot all have even valuation at once.
    fn insoluble_at_3() -> NormFormSystem {
        let f: [&[i64]; 8] = [&[1, 0], &[0, 1], &[1, 1], &[1, -1], &[1, 2], &[1, 4], &[3, 1], &[1, 3]];
        sys(&[-1; 8], &f)
    }

    #[test]
    fn real_examples() {
        let v = real_soluble(&sys(&[-1, -2], &[&[1, 0], &[0, 1]]));
        assert!(v.soluble);
        assert!(NormFormSystem::new(vec![-1, -2], vec![vec![1, 0], vec![-1, 0]]).is_err());
        assert!(real_soluble(&sys(&[2], &[&[1, 0]])).soluble);
        // u1 > 0, u2 > 0, −u1 − u2 > 0 is infeasible; drop the last and it is feasible.
        assert!(!real_soluble(&sys(&[-1, -1, -1], &[&[1, 0], &[0, 1], &[-1, -1]])).soluble);
        let v = real_soluble(&sys(&[-1, -1, 3], &[&[1, -1], &[1, 1], &[1, 0]]));
        let Some(LocalWitness::Real { u }) = v.witness else { panic!() };
        assert!(u[0] > u[1].abs());
    }

    #[test]
    fn padic_examples() {
        let s = sys(&[-1], &[&[1, 0]]);
        assert!(padic_soluble(&s, 5, 2).unwrap().soluble);
        assert!(padic_soluble(&s, 3, 2).unwrap().soluble);
        assert!(padic_soluble(&s, 2, 4).unwrap().soluble);
        assert!(matches!(padic_soluble(&s, 2, 2), Err(Error::DepthTooSmall { .. })));
        // Solutions need val_3(u1 + u2) = 1, one digit past the default depth.
        let s = sys(&[-1, -1], &[&[-3, -3], &[-3, -2]]);
        let v = padic_soluble(&s, 3, 2).unwrap();
        assert!(matches!(v.witness, Some(LocalWitness::Padic { precision: 3, .. })));
        assert!(!padic_soluble(&insoluble_at_3(), 3, 2).unwrap().soluble);
    }

    #[test]
    fn witnesses_lift() {
        let s = sys(&[-1, 2], &[&[1, 0], &[0, 1]]);
        for p in [2u64, 3, 5, 7] {
            let v = padic_soluble(&s, p, default_depth(&s, p)).unwrap();
            let w = v.witness.unwrap();
            assert!(lift_witness(&s, &w).unwrap().soluble);
        }
    }

    #[test]
    fn everywhere_examples() {
        let r = everywhere_locally_soluble(&sys(&[-1, 2], &[&[1, 0], &[0, 1]]), 30, None).unwrap();
        assert!(r.soluble);
        let r = everywhere_locally_soluble(&sys(&[5, 5], &[&[1, 0], &[0, 1]]), 30, None).unwrap();
        assert!(r.soluble);
        let r = everywhere_locally_soluble(&insoluble_at_3(), 30, None).unwrap();
        assert!(!r.soluble);
        assert!(r.bad_places.contains(&Place::Finite(3)));
    }

    #[test]
    fn quaternary_examples() {
        let c = |v: [i64; 4]| v.map(int);
        assert!(!diagonal_quadric_soluble(&c([1, 1, 1, 1]), Place::Infinite).unwrap());
        for v in [Place::Infinite, Place::Finite(2), Place::Finite(3), Place::Finite(5)] {
            assert!(diagonal_quadric_soluble(&c([1, -1, 1, -1]), v).unwrap());
        }
        // x² + y² + z² + w² is anisotropic over Q_2 (the quaternions ramify at 2).
        assert!(!diagonal_quadric_soluble(&c([1, 1, 1, 1]), Place::Finite(2)).unwrap());
        assert!(diagonal_quadric_soluble(&c([1, 1, 1, 1]), Place::Finite(3)).unwrap());
    }
}
