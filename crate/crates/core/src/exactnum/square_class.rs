use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factorize;
use crate::{Error, Integer, Rational, Result};

/// An element of `Q*/Q*²`: a sign bit and the set of primes with odd exponent.
///
/// Coordinates are taken on the basis `{−1, 2, 3, 5, 7, …}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SquareClass {
    pub negative: bool,
    pub primes: BTreeSet<u64>,
}

impl SquareClass {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    pub fn from_i64(n: i64) -> Result<Self> {
        squarefree_class(&Rational::from_integer(BigInt::from(n)))
    }

    /// Group law: symmetric difference of exponent vectors.
    pub fn mul(&self, other: &Self) -> Self {
        SquareClass {
            negative: self.negative ^ other.negative,
            primes: self
                .primes
                .symmetric_difference(&other.primes)
                .copied()
                .collect(),
        }
    }

    /// The squarefree integer representing this class.
    pub fn representative(&self) -> Integer {
        let mut n = BigInt::one();
        for &p in &self.primes {
            n *= p;
        }
        if self.negative {
            -n
        } else {
            n
        }
    }

    pub fn representative_rational(&self) -> Rational {
        Rational::from_integer(self.representative())
    }

    /// `Some(n)` when the squarefree representative fits in `i64`.
    pub fn representative_i64(&self) -> Option<i64> {
        let mut n: i64 = 1;
        for &p in &self.primes {
            n = n.checked_mul(i64::try_from(p).ok()?)?;
        }
        Some(if self.negative { -n } else { n })
    }

    /// Coordinates with `0` standing for the sign basis vector `−1`.
    pub(crate) fn coordinates(&self) -> BTreeSet<u64> {
        let mut c = self.primes.clone();
        if self.negative {
            c.insert(0);
        }
        c
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// The class of `x` in `Q*/Q*²`.
pub fn squarefree_class(x: &Rational) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    let mut primes = BTreeSet::new();
    for n in [x.numer(), x.denom()] {
        for (p, e) in factorize(n)? {
            if e % 2 == 1 {
                primes.insert(p);
            }
        }
    }
    Ok(SquareClass {
        negative: x.is_negative(),
        primes,
    })
}
