//! Exact arithmetic substrate: valuations, square classes, Legendre and Hilbert
//! symbols, and F₂-linear algebra over `Q*/Q*²`.

mod f2;
mod square_class;
mod symbols;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Integer, Rational, Result};

pub use f2::{f2_independent, kernel_basis, F2Vector, Independence};
pub use square_class::{squarefree_class, SquareClass};
pub use symbols::{hilbert, hilbert_int, hilbert_parts, legendre, unit_residue};
pub(crate) use symbols::legendre_residue;

/// A place of `Q`: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl Place {
    /// Checked constructor for a finite place.
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "oo" | "∞") {
            return Ok(Place::Infinite);
        }
        let p: u64 = s.parse().map_err(|_| Error::Parse(format!("invalid place {s:?}")))?;
        Place::prime(p)
    }
}

pub fn is_prime(p: u64) -> bool {
    num_prime::nt_funcs::is_prime64(p)
}

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    num_prime::nt_funcs::primes(limit)
}

/// Prime factorization of `|n|` for `n != 0`.
pub fn factorize(n: &Integer) -> Result<BTreeMap<u64, u32>> {
    let m = n.abs();
    let small = m
        .to_u128()
        .ok_or_else(|| Error::TooLargeToFactor(n.to_string()))?;
    let mut out = BTreeMap::new();
    if small <= 1 {
        return Ok(out);
    }
    for (p, e) in num_prime::nt_funcs::factorize128(small) {
        let p = u64::try_from(p).map_err(|_| Error::PrimeTooLarge(p.to_string()))?;
        out.insert(p, e as u32);
    }
    Ok(out)
}

/// Distinct primes dividing the numerator or denominator of `x`.
pub fn prime_support(x: &Rational) -> Result<Vec<u64>> {
    let mut ps: Vec<u64> = factorize(x.numer())?.into_keys().collect();
    ps.extend(factorize(x.denom())?.into_keys());
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

pub(crate) fn int_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `val_p(x)` for nonzero rational `x`.
pub fn valuation(x: &Rational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64)
}

/// `val_p(n)` for a nonzero machine integer; `u32::MAX` for zero.
pub fn valuation_i128(mut n: i128, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Parses `"n"`, `"n/d"` or a decimal-free signed integer fraction.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders a rational as `"n"` or `"n/d"`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Smallest `D > 0` with `D * x` integral for all given rationals.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
