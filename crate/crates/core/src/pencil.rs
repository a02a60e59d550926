//! Conic bundle data over the pencil `P(t) = ∏ (t − e_i)`: validation, the map δ,
//! the Brauer group `Ker δ / ⟨(1,…,1)⟩`, and the associated norm-form systems.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{kernel_basis, squarefree_class, F2Vector, SquareClass};
use crate::quadform::BinaryForm;
use crate::{Error, Rational, Result};

/// Degenerate points `e_i` with component fields `Q(√a_i)`, and optional torsor twists `λ_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicBundleData {
    pub e: Vec<Rational>,
    pub a: Vec<SquareClass>,
    pub lambda: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub r: usize,
    pub faddeev_holds: bool,
    /// Class of `∏ a_i`.
    pub product_class: SquareClass,
    pub warnings: Vec<String>,
}

impl ConicBundleData {
    pub fn new(e: Vec<Rational>, a: Vec<SquareClass>) -> Self {
        ConicBundleData { e, a, lambda: None }
    }

    /// Builds the data from rational `a_i`, reducing each to its square class.
    pub fn from_rationals(e: Vec<Rational>, a: &[Rational]) -> Result<Self> {
        let a = a.iter().map(squarefree_class).collect::<Result<_>>()?;
        Ok(Self::new(e, a))
    }

    pub fn with_lambda(mut self, lambda: Vec<Rational>) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn r(&self) -> usize {
        self.e.len()
    }

    /// Class of `∏ a_i`.
    pub fn product_class(&self) -> SquareClass {
        self.a.iter().fold(SquareClass::trivial(), |acc, c| acc.mul(c))
    }

    /// Structural checks; a failed Faddeev check is reported, not raised.
    pub fn validate(&self) -> Result<ValidationReport> {
        let r = self.e.len();
        if r == 0 {
            return Err(Error::InvalidBundle("at least one degenerate point is required".into()));
        }
        if self.a.len() != r {
            return Err(Error::InvalidBundle(format!("{} points but {} field classes", r, self.a.len())));
        }
        for i in 0..r {
            for j in i + 1..r {
                if self.e[i] == self.e[j] {
                    return Err(Error::InvalidBundle(format!(
                        "repeated degenerate point e_{} = e_{} = {}",
                        i + 1,
                        j + 1,
                        self.e[i]
                    )));
                }
            }
        }
        for (i, c) in self.a.iter().enumerate() {
            if c.is_trivial() {
                return Err(Error::InvalidBundle(format!("a_{} is a square", i + 1)));
            }
        }
        if let Some(l) = &self.lambda {
            if l.len() != r {
                return Err(Error::InvalidBundle(format!("{} twists for {} points", l.len(), r)));
            }
            if let Some(i) = l.iter().position(Zero::is_zero) {
                return Err(Error::InvalidBundle(format!("lambda_{} = 0", i + 1)));
            }
        }
        let product_class = self.product_class();
        let faddeev_holds = product_class.is_trivial();
        let mut warnings = Vec::new();
        if !faddeev_holds {
            warnings.push(format!(
                "product of the a_i has class {product_class}; (1,...,1) is not in the kernel of delta"
            ));
        }
        Ok(ValidationReport {
            r,
            faddeev_holds,
            product_class,
            warnings,
        })
    }

    /// `δ(n)`: the class of `∏ a_i^{n_i}`.
    pub fn delta(&self, n: &[bool]) -> Result<SquareClass> {
        if n.len() != self.a.len() {
            return Err(Error::InvalidBrauerElement(format!(
                "vector of length {} for r = {}",
                n.len(),
                self.a.len()
            )));
        }
        Ok(self
            .a
            .iter()
            .zip(n)
            .filter(|(_, &bit)| bit)
            .fold(SquareClass::trivial(), |acc, (c, _)| acc.mul(c)))
    }

    pub fn brauer_group(&self) -> Result<BrauerGroupDescription> {
        let report = self.validate()?;
        if !report.faddeev_holds {
            return Err(Error::FaddeevFailure(report.product_class.to_string()));
        }
        let kernel = kernel_basis(&self.a);
        let r = self.r();
        let ones = vec![true; r];
        // Extend {(1,…,1)} by kernel vectors; the ones that enlarge the span give the quotient.
        let mut span = F2Span::default();
        span.insert(&ones);
        let mut quotient_basis = Vec::new();
        for v in &kernel {
            if span.insert(v) {
                quotient_basis.push(BrauerElement { n: v.clone() }.canonical());
            }
        }
        let quotient_rank = quotient_basis.len();
        Ok(BrauerGroupDescription {
            kernel_dim: kernel.len(),
            kernel_basis: kernel,
            quotient_rank,
            quotient_basis,
            weak_approximation: quotient_rank == 0,
        })
    }

    /// The torsor system `x_i² − a_i y_i² = μ_i (u − e_i v)` with `μ_i = 1/λ_i`.
    ///
    /// Each equation is multiplied by the least `D_i²` making its right side integral
    /// (absorbed by `x_i, y_i ↦ D_i x_i, D_i y_i`); the `D_i` are recorded.
    pub fn torsor_system(&self) -> Result<TorsorSystem> {
        self.validate()?;
        let r = self.r();
        let ones = vec![Rational::one(); r];
        let lambda = self.lambda.as_ref().unwrap_or(&ones);
        let mut a = Vec::with_capacity(r);
        let mut forms = Vec::with_capacity(r);
        let mut clearing = Vec::with_capacity(r);
        for i in 0..r {
            let ai = self.a[i]
                .representative_i64()
                .ok_or_else(|| Error::Overflow(format!("a_{} does not fit in 64 bits", i + 1)))?;
            let mu = lambda[i].recip();
            let coeffs = [mu.clone(), -&mu * &self.e[i]];
            let d = least_square_clearing(&coeffs);
            let d2 = Rational::from_integer(&d * &d);
            let row = coeffs
                .iter()
                .map(|c| {
                    (c * &d2)
                        .to_integer()
                        .to_i64()
                        .ok_or_else(|| Error::Overflow(format!("coefficient of f_{} too large", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            a.push(ai);
            forms.push(row);
            clearing.push(d);
        }
        Ok(TorsorSystem {
            system: NormFormSystem::new(a, forms)?,
            clearing,
        })
    }
}

/// Least `D > 0` with `D² c` integral for every `c`.
fn least_square_clearing(coeffs: &[Rational]) -> BigInt {
    let mut d = BigInt::one();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        // For denominator ∏ p^k, the least D has p^{ceil(k/2)}.
        let den = c.denom();
        let mut need = BigInt::one();
        if let Ok(f) = crate::exactnum::factorize(den) {
            for (p, k) in f {
                need *= BigInt::from(p).pow(k.div_ceil(2));
            }
        } else {
            need = den.clone();
        }
        d = num_integer::Integer::lcm(&d, &need);
    }
    d
}

/// Incremental F₂ span membership for bit vectors.
#[derive(Default)]
struct F2Span {
    rows: BTreeMap<usize, F2Vector>,
}

impl F2Span {
    /// Adds `v`; returns whether the span grew.
    fn insert(&mut self, v: &[bool]) -> bool {
        let mut v = v.to_vec();
        while let Some(lead) = v.iter().position(|&b| b) {
            match self.rows.get(&lead) {
                Some(row) => v.iter_mut().zip(row).for_each(|(x, y)| *x ^= *y),
                None => {
                    self.rows.insert(lead, v);
                    return true;
                }
            }
        }
        false
    }
}

/// `Σ n_i (a_i, t − e_i)`, taken modulo the class of `(1,…,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrauerElement {
    pub n: F2Vector,
}

impl BrauerElement {
    /// Checks `δ(n)` is trivial.
    pub fn new(data: &ConicBundleData, n: F2Vector) -> Result<Self> {
        let d = data.delta(&n)?;
        if !d.is_trivial() {
            return Err(Error::InvalidBrauerElement(format!(
                "{} has delta = {d}, not trivial",
                format_f2(&n)
            )));
        }
        Ok(BrauerElement { n })
    }

    /// The representative of `{n, n + (1,…,1)}` of lower weight; ties go to the
    /// lexicographically smaller bit string.
    pub fn canonical(&self) -> Self {
        let flipped: F2Vector = self.n.iter().map(|b| !b).collect();
        let w = |v: &F2Vector| v.iter().filter(|&&b| b).count();
        let key = |v: &F2Vector| (w(v), format_f2(v));
        if key(&flipped) < key(&self.n) {
            BrauerElement { n: flipped }
        } else {
            self.clone()
        }
    }

    /// Zero in the quotient.
    pub fn is_trivial(&self) -> bool {
        self.n.iter().all(|&b| b) || self.n.iter().all(|&b| !b)
    }

    pub fn add(&self, other: &Self) -> Self {
        BrauerElement {
            n: self.n.iter().zip(&other.n).map(|(a, b)| a ^ b).collect(),
        }
    }
}

pub fn format_f2(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_f2(s: &str) -> Result<F2Vector> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("invalid F2 vector {s:?}"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrauerGroupDescription {
    /// A basis of `Ker δ`.
    pub kernel_basis: Vec<F2Vector>,
    pub kernel_dim: usize,
    /// Generators of `Ker δ / ⟨(1,…,1)⟩`, canonically represented.
    pub quotient_basis: Vec<BrauerElement>,
    pub quotient_rank: usize,
    /// The quotient is trivial, so the surface satisfies weak approximation.
    pub weak_approximation: bool,
}

/// `x_i² − a_i y_i² = f_i(u_1, …, u_s)` with integer linear forms `f_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormFormSystem {
    a: Vec<i64>,
    forms: Vec<Vec<i64>>,
}

impl NormFormSystem {
    pub fn new(a: Vec<i64>, forms: Vec<Vec<i64>>) -> Result<Self> {
        let r = a.len();
        if r == 0 || forms.len() != r {
            return Err(Error::InvalidSystem(format!("{} forms for {} norm equations", forms.len(), r)));
        }
        let s = forms[0].len();
        if s < 2 {
            return Err(Error::InvalidSystem(format!("need at least 2 variables, got {s}")));
        }
        for (i, &ai) in a.iter().enumerate() {
            BinaryForm::new(ai).map_err(|e| Error::InvalidSystem(format!("a_{}: {e}", i + 1)))?;
        }
        for (i, f) in forms.iter().enumerate() {
            if f.len() != s {
                return Err(Error::InvalidSystem(format!("f_{} has {} coefficients, expected {s}", i + 1, f.len())));
            }
            if f.iter().all(|&c| c == 0) {
                return Err(Error::InvalidSystem(format!("f_{} is identically zero", i + 1)));
            }
            if f.iter().any(|c| c.unsigned_abs() > 1 << 40) {
                return Err(Error::InvalidSystem(format!("f_{} has a coefficient out of range", i + 1)));
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                if proportional(&forms[i], &forms[j]) {
                    return Err(Error::InvalidSystem(format!("f_{} and f_{} are proportional", i + 1, j + 1)));
                }
            }
        }
        Ok(NormFormSystem { a, forms })
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    pub fn s(&self) -> usize {
        self.forms[0].len()
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn forms(&self) -> &[Vec<i64>] {
        &self.forms
    }

    pub fn binary_form(&self, i: usize) -> BinaryForm {
        BinaryForm::new(self.a[i]).expect("validated at construction")
    }

    /// `f_i(u)`.
    pub fn eval(&self, i: usize, u: &[i64]) -> i128 {
        self.forms[i].iter().zip(u).map(|(&c, &x)| c as i128 * x as i128).sum()
    }

    /// `f_i(u)` for rational `u`.
    pub fn eval_rational(&self, i: usize, u: &[Rational]) -> Rational {
        self.forms[i]
            .iter()
            .zip(u)
            .map(|(&c, x)| x * BigInt::from(c))
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Indices with `a_i < 0` (positive definite forms).
    pub fn minus_indices(&self) -> Vec<usize> {
        (0..self.r()).filter(|&i| self.a[i] < 0).collect()
    }

    /// Indices with `a_i > 0` (indefinite forms).
    pub fn plus_indices(&self) -> Vec<usize> {
        (0..self.r()).filter(|&i| self.a[i] > 0).collect()
    }

    /// The system with equations listed in the order `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(
            perm.iter().map(|&i| self.a[i]).collect(),
            perm.iter().map(|&i| self.forms[i].clone()).collect(),
        )
    }

    /// Primes dividing `2`, some `a_i`, or some coefficient of some `f_i`.
    pub fn bad_primes(&self) -> Result<Vec<u64>> {
        let mut ps = vec![2u64];
        for &ai in &self.a {
            ps.extend(crate::exactnum::factorize(&BigInt::from(ai))?.into_keys());
        }
        for f in &self.forms {
            for &c in f {
                if c != 0 {
                    ps.extend(crate::exactnum::factorize(&BigInt::from(c))?.into_keys());
                }
            }
        }
        ps.sort_unstable();
        ps.dedup();
        Ok(ps)
    }
}

fn proportional(f: &[i64], g: &[i64]) -> bool {
    (0..f.len()).all(|i| (0..f.len()).all(|j| f[i] as i128 * g[j] as i128 == f[j] as i128 * g[i] as i128))
}

/// A torsor system together with the per-equation clearing factors `D_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsorSystem {
    pub system: NormFormSystem,
    pub clearing: Vec<BigInt>,
}

/// One factor `(u − e v)(u − e′ v) = c (x² − a y²)` of an intersection of quadrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadricFactor {
    pub e: (Rational, Rational),
    pub a: SquareClass,
    pub c: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadricIntersection {
    pub factors: Vec<QuadricFactor>,
    /// The combined conic bundle data: each factor contributes two points with its field.
    pub bundle: ConicBundleData,
    /// No degenerate point is shared between factors.
    pub disjoint_points: bool,
}

/// The variety `(u − e_{2i−1} v)(u − e_{2i} v) = c_i (x_i² − a_i y_i²)`, `i = 1..n`.
pub fn quadric_intersection_system(e: &[Rational], a: &[Rational], c: &[Rational]) -> Result<QuadricIntersection> {
    let n = a.len();
    if e.len() != 2 * n || c.len() != n || n == 0 {
        return Err(Error::InvalidBundle(format!(
            "need 2n points and n fields and constants, got {}, {}, {}",
            e.len(),
            a.len(),
            c.len()
        )));
    }
    let mut factors = Vec::with_capacity(n);
    let mut points: Vec<(Rational, SquareClass)> = Vec::new();
    let mut disjoint = true;
    for i in 0..n {
        let class = squarefree_class(&a[i])?;
        if class.is_trivial() {
            return Err(Error::InvalidBundle(format!("a_{} is a square", i + 1)));
        }
        if c[i].is_zero() {
            return Err(Error::InvalidBundle(format!("c_{} = 0", i + 1)));
        }
        let pair = (e[2 * i].clone(), e[2 * i + 1].clone());
        if pair.0 == pair.1 {
            return Err(Error::InvalidBundle(format!("factor {} has a repeated point {}", i + 1, pair.0)));
        }
        for pt in [&pair.0, &pair.1] {
            match points.iter().find(|(q, _)| q == pt) {
                Some((_, other)) if *other != class => {
                    return Err(Error::InvalidBundle(format!(
                        "point {pt} is shared by factors with different fields ({other} and {class})"
                    )));
                }
                Some(_) => disjoint = false,
                None => points.push((pt.clone(), class.clone())),
            }
        }
        factors.push(QuadricFactor {
            e: pair,
            a: class,
            c: c[i].clone(),
        });
    }
    let bundle = ConicBundleData::new(
        points.iter().map(|(q, _)| q.clone()).collect(),
        points.into_iter().map(|(_, c)| c).collect(),
    );
    Ok(QuadricIntersection {
        factors,
        bundle,
        disjoint_points: disjoint,
    })
}
