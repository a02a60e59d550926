//! Dense univariate polynomials over a [`Field`], with resultants, principal
//! subresultant coefficients, Euclidean gcd and Lagrange interpolation.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Field;

/// Coefficients are stored low degree first, with no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Field> {
    coeffs: Vec<T>,
}

impl<T: Field> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `x - root`.
    pub fn linear_root(root: T) -> Self {
        Self::new(vec![-root, T::one()])
    }

    /// `leading · ∏ (x − r)`.
    pub fn from_roots(leading: T, roots: &[T]) -> Self {
        roots
            .iter()
            .fold(Self::constant(leading), |acc, r| &acc * &Self::linear_root(r.clone()))
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// Coefficients padded with zeros to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<T> {
        (0..len).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + T::one();
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - d];
        for i in (0..quot.len()).rev() {
            let c = rem[i + d].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].clone() - c.clone() * dc.clone();
                }
            }
            quot[i] = c;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd by the Euclidean algorithm (zero if both inputs vanish).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.leading();
            a.scale(&(T::one() / l))
        }
    }

    /// `x^deg · p(1/x)` for a formal degree `deg >= degree()`.
    pub fn reversed(&self, deg: usize) -> Self {
        Self::new((0..=deg).rev().map(|i| self.coeff(i)).collect())
    }
}

impl<T: Field> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Field> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Field> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Field> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

/// Determinant by Gaussian elimination with first-nonzero pivoting.
pub fn determinant<T: Field>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return T::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / p.clone();
            for c in col..n {
                let v = m[col][c].clone() * factor.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
    }
    det
}

/// Rows of the `j`-th subresultant matrix of `f`, `g` with formal degrees `m`, `n`,
/// restricted to its leading `m + n − 2j` columns (highest powers first).
fn subresultant_matrix<T: Field>(f: &Poly<T>, m: usize, g: &Poly<T>, n: usize, j: usize) -> Vec<Vec<T>> {
    let width = m + n - j;
    let size = m + n - 2 * j;
    let mut rows = Vec::with_capacity(size);
    let mut push_shifts = |p: &Poly<T>, deg: usize, count: usize| {
        for s in (0..count).rev() {
            // Row for x^s · p: coefficient of x^k sits in column width − 1 − k.
            let mut row = vec![T::zero(); width];
            for k in 0..=deg {
                row[width - 1 - (k + s)] = p.coeff(k);
            }
            row.truncate(size);
            rows.push(row);
        }
    };
    push_shifts(f, m, n - j);
    push_shifts(g, n, m - j);
    rows
}

/// Resultant of `f` and `g` taken with formal degrees `m`, `n` (Sylvester determinant).
pub fn resultant_formal<T: Field>(f: &Poly<T>, m: usize, g: &Poly<T>, n: usize) -> T {
    if m == 0 && n == 0 {
        return T::one();
    }
    determinant(subresultant_matrix(f, m, g, n, 0))
}

/// Resultant with the actual degrees; zero if either input is zero.
pub fn resultant<T: Field>(f: &Poly<T>, g: &Poly<T>) -> T {
    match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => resultant_formal(f, m, g, n),
        _ => T::zero(),
    }
}

/// Principal subresultant coefficient `psc_j(f, g)` for formal degrees `m`, `n`, `j < min(m, n)`.
pub fn principal_subresultant<T: Field>(f: &Poly<T>, m: usize, g: &Poly<T>, n: usize, j: usize) -> T {
    assert!(j < m.min(n) || (j == 0 && m.min(n) == 0));
    determinant(subresultant_matrix(f, m, g, n, j))
}

/// Discriminant `(−1)^{n(n−1)/2} Res(f, f′) / lc(f)`; zero for constants.
pub fn discriminant<T: Field>(f: &Poly<T>) -> T {
    let Some(n) = f.degree() else { return T::zero() };
    if n == 0 {
        return T::zero();
    }
    let r = resultant_formal(f, n, &f.derivative(), n - 1) / f.leading();
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// The unique polynomial of degree `< xs.len()` through the given points.
pub fn interpolate<T: Field>(xs: &[T], ys: &[T]) -> Poly<T> {
    assert_eq!(xs.len(), ys.len());
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::constant(T::one());
        let mut denom = T::one();
        for (k, xk) in xs.iter().enumerate() {
            if k != i {
                basis = &basis * &Poly::linear_root(xk.clone());
                denom = denom * (xi.clone() - xk.clone());
            }
        }
        acc = &acc + &basis.scale(&(yi.clone() / denom));
    }
    acc
}
