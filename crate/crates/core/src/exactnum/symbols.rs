use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{int_valuation, is_prime, Place};
use crate::{Error, Integer, Rational, Result};

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol of a residue `0 <= r < p` for an odd prime `p` (unchecked).
pub(crate) fn legendre_residue(r: u64, p: u64) -> i8 {
    if r % p == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// `(a/p)` for an odd prime `p`.
pub fn legendre(a: &Integer, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    Ok(legendre_residue(r, p))
}

/// For nonzero `n` and prime `p`, returns `(val_p(n), u mod m)` where `n = p^val · u`
/// and `m = 8` if `p = 2`, else `m = p`.
pub fn unit_residue(n: &Integer, p: u64) -> (u32, u64) {
    let v = int_valuation(n, p);
    let unit = n / BigInt::from(p).pow(v);
    let m = if p == 2 { 8 } else { p };
    (v, unit.mod_floor(&BigInt::from(m)).to_u64().unwrap())
}

fn unit_residue_i128(mut n: i128, p: u64) -> (u32, u64) {
    let pi = p as i128;
    let mut v = 0;
    while n % pi == 0 {
        n /= pi;
        v += 1;
    }
    let m = if p == 2 { 8 } else { pi };
    (v, n.rem_euclid(m) as u64)
}

/// Hilbert symbol at a finite prime from valuation/unit data:
/// `a = p^alpha u`, `b = p^beta w` with `u_res`, `w_res` the unit residues
/// (mod 8 when `p = 2`, mod `p` otherwise).
pub fn hilbert_parts(p: u64, alpha: u32, u_res: u64, beta: u32, w_res: u64) -> i8 {
    if p == 2 {
        let eps = |u: u64| ((u - 1) / 2) % 2;
        let omega = |u: u64| ((u * u - 1) / 8) % 2;
        let e = eps(u_res) * eps(w_res)
            + (alpha as u64 % 2) * omega(w_res)
            + (beta as u64 % 2) * omega(u_res);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s: i8 = 1;
        if (alpha % 2 == 1) && (beta % 2 == 1) && ((p - 1) / 2) % 2 == 1 {
            s = -s;
        }
        if beta % 2 == 1 {
            s *= legendre_residue(u_res, p);
        }
        if alpha % 2 == 1 {
            s *= legendre_residue(w_res, p);
        }
        s
    }
}

/// Hilbert symbol `(a, b)_v` for nonzero machine integers.
pub fn hilbert_int(a: i128, b: i128, v: Place) -> i8 {
    debug_assert!(a != 0 && b != 0);
    match v {
        Place::Infinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = unit_residue_i128(a, p);
            let (beta, w) = unit_residue_i128(b, p);
            hilbert_parts(p, alpha, u, beta, w)
        }
    }
}

/// Hilbert symbol `(a, b)_v`: `+1` iff `z² = a x² + b y²` has a nontrivial solution in `Q_v`.
pub fn hilbert(a: &Rational, b: &Rational, v: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    // n/d and n·d share a square class.
    let ai = a.numer() * a.denom();
    let bi = b.numer() * b.denom();
    Ok(match v {
        Place::Infinite => {
            if ai.is_negative() && bi.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let (alpha, u) = unit_residue(&ai, p);
            let (beta, w) = unit_residue(&bi, p);
            hilbert_parts(p, alpha, u, beta, w)
        }
    })
}
