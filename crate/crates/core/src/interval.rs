//! Certified real intervals in fixed-point binary arithmetic.
//!
//! An [`Interval`] with precision `p` holds integers `lo <= hi` and encloses the
//! real numbers in `[lo / 2^p, hi / 2^p]`. Every operation rounds outward, so the
//! true value of any expression built from exact inputs stays inside the result.

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_rat(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

fn ceil_rat(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    pub const DEFAULT_PRECISION: u32 = 128;

    /// Smallest interval at precision `prec` containing `[lo, hi]`.
    pub fn from_bounds(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        let scale = Rational::from_integer(pow2(prec));
        Interval {
            lo: floor_rat(&(lo * &scale)),
            hi: ceil_rat(&(hi * &scale)),
            prec,
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Self::from_bounds(q, q, prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> Rational {
        Rational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn upper(&self) -> Rational {
        Rational::new(self.hi.clone(), pow2(self.prec))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower() <= q && q <= &self.upper()
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = Rational::new(&self.lo + &self.hi, pow2(self.prec + 1));
        rational_to_f64(&mid)
    }

    /// Half-width, rounded up to the next `f64`.
    pub fn radius_f64(&self) -> f64 {
        let w = Rational::new(&self.hi - &self.lo, pow2(self.prec + 1));
        let f = rational_to_f64(&w);
        if f == 0.0 {
            0.0
        } else {
            f * (1.0 + f64::EPSILON) + f64::MIN_POSITIVE
        }
    }

    fn check_prec(&self, other: &Self) {
        assert_eq!(self.prec, other.prec, "interval precision mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_prec(other);
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_prec(other);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let scale = pow2(self.prec);
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Interval {
            lo: div_floor(min, &scale),
            hi: div_ceil(max, &scale),
            prec: self.prec,
        }
    }

    /// Panics if `other` contains zero.
    pub fn div(&self, other: &Self) -> Self {
        self.check_prec(other);
        assert!(
            other.lo.sign() == other.hi.sign() && other.lo.sign() != Sign::NoSign,
            "interval division by an interval containing zero"
        );
        let scale = pow2(self.prec);
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let num = a * &scale;
                let f = div_floor(&num, b);
                let c = div_ceil(&num, b);
                lo = Some(match lo {
                    Some(x) if x <= f => x,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(x) if x >= c => x,
                    _ => c,
                });
            }
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec: self.prec,
        }
    }

    /// Panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.lo.is_negative(), "square root of a negative interval");
        let scale = pow2(self.prec);
        let lo = (&self.lo * &scale).sqrt();
        let hi_sq = &self.hi * &scale;
        let mut hi = hi_sq.sqrt();
        if &hi * &hi < hi_sq {
            hi += 1;
        }
        Interval {
            lo,
            hi,
            prec: self.prec,
        }
    }

    /// Panics unless the interval is strictly positive.
    pub fn ln(&self) -> Self {
        assert!(self.lo.is_positive(), "logarithm of a non-positive interval");
        let (lo, _) = ln_bounds(&self.lower(), self.prec + 16);
        let (_, hi) = ln_bounds(&self.upper(), self.prec + 16);
        Self::from_bounds(&lo, &hi, self.prec)
    }

    pub fn pi(prec: u32) -> Self {
        let (lo, hi) = pi_bounds(prec + 16);
        Self::from_bounds(&lo, &hi, prec)
    }
}

fn rational_to_f64(q: &Rational) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let shift = (n.bits() as i64 - 60).max(0) - (d.bits() as i64 - 60).max(0);
    let nb = n >> ((n.bits() as i64 - 60).max(0) as usize);
    let db = d >> ((d.bits() as i64 - 60).max(0) as usize);
    nb.to_f64().unwrap_or(f64::NAN) / db.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Lower and upper bounds on `atanh(z)` for rational `0 <= z < 1/2`, within `2^-bits`.
fn atanh_bounds(z: &Rational, bits: u32) -> (Rational, Rational) {
    let eps = Rational::new(BigInt::one(), pow2(bits));
    let z2 = z * z;
    let mut term = z.clone();
    let mut sum = Rational::zero();
    let mut k: u64 = 0;
    loop {
        let t = &term / Rational::from_integer(BigInt::from(2 * k + 1));
        sum += &t;
        term = &term * &z2;
        k += 1;
        // Remaining terms are bounded by the geometric tail of z^(2k+1).
        let tail = &term / (Rational::one() - &z2);
        if tail < eps || term.is_zero() {
            return (sum.clone(), sum + tail);
        }
    }
}

/// Bounds on `ln(y)` for rational `y > 0`.
fn ln_bounds(y: &Rational, bits: u32) -> (Rational, Rational) {
    // y = 2^k m with 1 <= m < 2.
    let mut k: i64 = y.numer().bits() as i64 - y.denom().bits() as i64;
    let two = Rational::from_integer(BigInt::from(2));
    let mut m = if k >= 0 {
        y / Rational::from_integer(pow2(k as u32))
    } else {
        y * Rational::from_integer(pow2((-k) as u32))
    };
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < Rational::one() {
        m *= &two;
        k -= 1;
    }
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let (a_lo, a_hi) = atanh_bounds(&z, bits + 2);
    let third = Rational::new(BigInt::one(), BigInt::from(3));
    let extra = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let (l2_lo, l2_hi) = atanh_bounds(&third, bits + 2 + extra);
    let (l2_lo, l2_hi) = (&two * l2_lo, &two * l2_hi);
    let kq = Rational::from_integer(BigInt::from(k));
    let (klo, khi) = if k >= 0 {
        (&kq * &l2_lo, &kq * &l2_hi)
    } else {
        (&kq * &l2_hi, &kq * &l2_lo)
    };
    (klo + &two * a_lo, khi + &two * a_hi)
}

/// Bounds on `atan(1/n)` for integer `n >= 2`.
fn atan_inv_bounds(n: u64, bits: u32) -> (Rational, Rational) {
    let eps = Rational::new(BigInt::one(), pow2(bits));
    let x = Rational::new(BigInt::one(), BigInt::from(n));
    let x2 = &x * &x;
    let mut power = x.clone();
    let mut sum = Rational::zero();
    let mut k: u64 = 0;
    loop {
        let t = &power / Rational::from_integer(BigInt::from(2 * k + 1));
        if k % 2 == 0 {
            sum += &t;
        } else {
            sum -= &t;
        }
        power = &power * &x2;
        k += 1;
        let next = &power / Rational::from_integer(BigInt::from(2 * k + 1));
        if next < eps {
            // Alternating series: the next term bounds the error and has known sign.
            return if k % 2 == 0 {
                (sum.clone(), sum + next)
            } else {
                (&sum - next, sum)
            };
        }
    }
}

/// Machin's formula π = 16 atan(1/5) − 4 atan(1/239).
fn pi_bounds(bits: u32) -> (Rational, Rational) {
    let (a_lo, a_hi) = atan_inv_bounds(5, bits + 5);
    let (b_lo, b_hi) = atan_inv_bounds(239, bits + 3);
    let s = Rational::from_integer(BigInt::from(16));
    let f = Rational::from_integer(BigInt::from(4));
    (&s * a_lo - &f * b_hi, &s * a_hi - &f * b_lo)
}
