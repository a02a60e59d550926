//! Conic bundles `f x² + g y² + h z² = 0` over the projective line and the del Pezzo
//! surfaces of degree 2 and 1 built from them.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{f2_independent, format_rational, squarefree_class, Independence, SquareClass};
use crate::pencil::ConicBundleData;
use crate::poly::{determinant, discriminant, interpolate, principal_subresultant, resultant};
use crate::{Error, Rational, RationalPoly, Result};

/// `leading · ∏ (t − root)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPolynomial {
    pub leading: Rational,
    pub roots: Vec<Rational>,
}

impl SplitPolynomial {
    pub fn new(leading: Rational, roots: Vec<Rational>) -> Result<Self> {
        if leading.is_zero() {
            return Err(Error::InvalidPolynomial("leading coefficient is zero".into()));
        }
        Ok(SplitPolynomial { leading, roots })
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn to_poly(&self) -> RationalPoly {
        RationalPoly::from_roots(self.leading.clone(), &self.roots)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.roots.iter().fold(self.leading.clone(), |acc, r| acc * (t - r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FghBundle {
    pub data: ConicBundleData,
    pub degrees: [usize; 3],
    /// `F(0)G(0)H(0) ≠ 0` for the reversed polynomials.
    pub smooth_at_infinity: bool,
}

/// The conic bundle `f x² + g y² + h z² = 0`, glued at infinity through `T = 1/t`.
///
/// At a root of `f` the fibre splits over `Q(√(−g h))`, and cyclically.
pub fn bundle_from_fgh(f: &SplitPolynomial, g: &SplitPolynomial, h: &SplitPolynomial) -> Result<FghBundle> {
    let degrees = [f.degree(), g.degree(), h.degree()];
    if degrees[0] % 2 != degrees[1] % 2 || degrees[1] % 2 != degrees[2] % 2 {
        return Err(Error::InvalidPolynomial(format!(
            "degrees {degrees:?} do not have the same parity"
        )));
    }
    let all: Vec<&Rational> = f.roots.iter().chain(&g.roots).chain(&h.roots).collect();
    for (i, x) in all.iter().enumerate() {
        if all[i + 1..].contains(x) {
            return Err(Error::InvalidPolynomial(format!("repeated root {}", format_rational(x))));
        }
    }
    let polys = [f, g, h];
    let mut e = Vec::new();
    let mut a = Vec::new();
    for k in 0..3 {
        let (u, w) = (polys[(k + 1) % 3], polys[(k + 2) % 3]);
        for root in &polys[k].roots {
            e.push(root.clone());
            a.push(squarefree_class(&-(u.eval(root) * w.eval(root)))?);
        }
    }
    // The reversed polynomial T^deg f(1/T) takes the value lc(f) at T = 0.
    let smooth_at_infinity = polys.iter().all(|p| !p.leading.is_zero());
    Ok(FghBundle {
        data: ConicBundleData::new(e, a),
        degrees,
        smooth_at_infinity,
    })
}

/// Three split quadratics with six distinct roots and independent coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp2Data {
    pub f: SplitPolynomial,
    pub g: SplitPolynomial,
    pub h: SplitPolynomial,
}

impl Dp2Data {
    pub fn new(f: SplitPolynomial, g: SplitPolynomial, h: SplitPolynomial) -> Result<Self> {
        if [&f, &g, &h].iter().any(|p| p.degree() != 2) {
            return Err(Error::InvalidPolynomial("f, g, h must be quadratics".into()));
        }
        let data = Dp2Data { f, g, h };
        bundle_from_fgh(&data.f, &data.g, &data.h)?;
        if determinant(data.coefficient_rows().to_vec()).is_zero() {
            return Err(Error::InvalidPolynomial("f, g, h are linearly dependent".into()));
        }
        Ok(data)
    }

    /// Rows `(f_k, g_k, h_k)` for `k = 0, 1, 2`.
    fn coefficient_rows(&self) -> [Vec<Rational>; 3] {
        let c = [self.f.to_poly(), self.g.to_poly(), self.h.to_poly()];
        [0, 1, 2].map(|k| c.iter().map(|p| p.coeff(k)).collect())
    }

    pub fn bundle(&self) -> Result<FghBundle> {
        bundle_from_fgh(&self.f, &self.g, &self.h)
    }
}

/// `coefficient · x^i y^j z^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TernaryTerm {
    pub exponents: [u32; 3],
    pub coefficient: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationQuartic {
    pub terms: Vec<TernaryTerm>,
    pub smooth: bool,
    /// Which elimination conditions failed, if any.
    pub singular_reasons: Vec<String>,
}

/// `(f₁x² + g₁y² + h₁z²)² − 4(f₀x² + g₀y² + h₀z²)(f₂x² + g₂y² + h₂z²)`.
///
/// The quartic is `q(x², y², z²)` for a ternary quadratic form `q`. A singular point
/// with no zero coordinate is a kernel vector of `q`; one with a single zero
/// coordinate is a kernel vector of a binary restriction; one with two zero
/// coordinates is a vanishing diagonal coefficient. So the curve is smooth iff
/// `det q`, the three principal 2×2 minors and the diagonal are all nonzero.
pub fn dp2_ramification_quartic(data: &Dp2Data) -> Result<RamificationQuartic> {
    let [l0, l1, l2] = data.coefficient_rows();
    let two = Rational::from_integer(2.into());
    let m: Vec<Vec<Rational>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| &l1[i] * &l1[j] - &two * (&l0[i] * &l2[j] + &l2[i] * &l0[j]))
                .collect()
        })
        .collect();
    let mut terms = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let mut exponents = [0u32; 3];
            exponents[i] += 2;
            exponents[j] += 2;
            let coefficient = if i == j { m[i][j].clone() } else { &two * &m[i][j] };
            if !coefficient.is_zero() {
                terms.push(TernaryTerm { exponents, coefficient });
            }
        }
    }
    terms.sort_by(|a, b| b.exponents.cmp(&a.exponents));
    let names = ["x", "y", "z"];
    let mut reasons = Vec::new();
    for i in 0..3 {
        if m[i][i].is_zero() {
            reasons.push(format!("vanishing {}^4 coefficient", names[i]));
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let minor = &m[i][i] * &m[j][j] - &m[i][j] * &m[i][j];
        if minor.is_zero() {
            reasons.push(format!("singular restriction to the {}{}-plane", names[i], names[j]));
        }
    }
    if determinant(m).is_zero() {
        reasons.push("singular ternary form".into());
    }
    Ok(RamificationQuartic {
        terms,
        smooth: reasons.is_empty(),
        singular_reasons: reasons,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub labels: Vec<String>,
    pub classes: Vec<SquareClass>,
    /// Indices into `classes` whose product is a square.
    pub certificate: Option<Vec<usize>>,
}

fn minimality(labels: Vec<String>, classes: Vec<SquareClass>) -> MinimalityReport {
    let Independence { independent, certificate } = f2_independent(&classes);
    MinimalityReport {
        minimal: independent,
        labels,
        classes,
        certificate,
    }
}

/// Independence of `−1, a, b, c` and the fifteen differences `e_i − e_j`.
pub fn dp2_minimality(data: &Dp2Data) -> Result<MinimalityReport> {
    let mut labels = vec!["-1".to_string(), "a".into(), "b".into(), "c".into()];
    let mut classes = vec![
        SquareClass::from_i64(-1)?,
        squarefree_class(&data.f.leading)?,
        squarefree_class(&data.g.leading)?,
        squarefree_class(&data.h.leading)?,
    ];
    let e: Vec<&Rational> = data.f.roots.iter().chain(&data.g.roots).chain(&data.h.roots).collect();
    for i in 0..6 {
        for j in i + 1..6 {
            labels.push(format!("e{}-e{}", i + 1, j + 1));
            classes.push(squarefree_class(&(e[i] - e[j]))?);
        }
    }
    Ok(minimality(labels, classes))
}

/// `p₀ + p₁t + … + p₄t⁴`, read as a binary quartic form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quartic {
    pub p: [Rational; 5],
}

impl Quartic {
    pub fn new(p: [Rational; 5]) -> Self {
        Quartic { p }
    }

    pub fn from_poly(q: &RationalPoly) -> Self {
        Quartic {
            p: [0, 1, 2, 3, 4].map(|i| q.coeff(i)),
        }
    }

    pub fn to_poly(&self) -> RationalPoly {
        RationalPoly::new(self.p.to_vec())
    }
}

/// The degree-6 discriminant form `D_4`, normalized so that `D_4(t⁴ + a) = 256a³`.
///
/// With `p₄ ≠ 0` this is `Res(q, q′)/p₄`; with `p₄ = 0 ≠ p₀` the chart `t ↦ 1/t`
/// is used; with `p₀ = p₄ = 0` the form is `xy(p₃x² + p₂xy + p₁y²)`.
pub fn quartic_discriminant(q: &Quartic) -> Rational {
    let [p0, p1, p2, p3, p4] = &q.p;
    if !p4.is_zero() {
        discriminant(&q.to_poly())
    } else if !p0.is_zero() {
        discriminant(&q.to_poly().reversed(4))
    } else {
        let four = Rational::from_integer(4.into());
        let outer = p3 * p1;
        &outer * &outer * (p2 * p2 - four * p3 * p1)
    }
}

/// Eight distinct parameters and two nonzero scalars.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp1Data {
    pub e: Vec<Rational>,
    pub c1: Rational,
    pub c2: Rational,
}

impl Dp1Data {
    pub fn new(e: Vec<Rational>, c1: Rational, c2: Rational) -> Result<Self> {
        if e.len() != 8 {
            return Err(Error::InvalidPolynomial(format!("need 8 parameters, got {}", e.len())));
        }
        for i in 0..8 {
            if e[i + 1..].contains(&e[i]) {
                return Err(Error::InvalidPolynomial(format!("repeated parameter {}", format_rational(&e[i]))));
            }
        }
        if c1.is_zero() || c2.is_zero() {
            return Err(Error::InvalidPolynomial("c1 and c2 must be nonzero".into()));
        }
        Ok(Dp1Data { e, c1, c2 })
    }

    /// `c₁² ∏_{i≤4} (t − e_i)/(e₈ − e_i)`.
    pub fn p(&self) -> RationalPoly {
        let denom = self.e[..4].iter().fold(Rational::one(), |acc, ei| acc * (&self.e[7] - ei));
        RationalPoly::from_roots(&self.c1 * &self.c1 / denom, &self.e[..4])
    }

    /// `c₂² ∏_{j≥5} (t − e_j)`.
    pub fn q(&self) -> RationalPoly {
        RationalPoly::from_roots(&self.c2 * &self.c2, &self.e[4..])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp1Condition {
    pub holds: bool,
    /// `D(x, 1) = D_4(x·p + q)`, low degree first.
    pub pencil_discriminant: Vec<Rational>,
    pub failures: Vec<String>,
}

fn sample_points(n: usize) -> Vec<Rational> {
    (0..n as i64).map(|k| Rational::from_integer(k.into())).collect()
}

/// `x ↦ D_4(x·p + q)` as a polynomial of degree ≤ 6.
pub fn pencil_discriminant(p: &RationalPoly, q: &RationalPoly) -> RationalPoly {
    let xs = sample_points(7);
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| quartic_discriminant(&Quartic::from_poly(&(&p.scale(x) + q))))
        .collect();
    interpolate(&xs, &ys)
}

/// `x ↦ psc₁(P, P′)` for `P = x·p + q`, formal degrees 4 and 3; degree ≤ 5.
fn pencil_first_subresultant(p: &RationalPoly, q: &RationalPoly) -> RationalPoly {
    let xs = sample_points(6);
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let member = &p.scale(x) + q;
            principal_subresultant(&member, 4, &member.derivative(), 3, 1)
        })
        .collect();
    interpolate(&xs, &ys)
}

/// `t⁴ · P(k + 1/t)`.
fn moebius(poly: &RationalPoly, k: &Rational) -> RationalPoly {
    let shifted = poly_compose_shift(poly, k);
    shifted.reversed(4)
}

/// `P(t + k)` by Horner's rule.
fn poly_compose_shift(poly: &RationalPoly, k: &Rational) -> RationalPoly {
    let t_plus_k = RationalPoly::new(vec![k.clone(), Rational::one()]);
    poly.coeffs()
        .iter()
        .rev()
        .fold(RationalPoly::zero(), |acc, c| &(&acc * &t_plus_k) + &RationalPoly::constant(c.clone()))
}

/// The pencil `r·p + s·q` has exactly six singular members, each with a single double root.
///
/// `D(r, s)` must be nonzero at `(1:0)` and `(0:1)` and squarefree, and `D` must share no
/// root with the first subresultant coefficient of `(P, P′)`. The latter is evaluated
/// after a substitution `t ↦ k + 1/t` that keeps every singular member of degree 4.
pub fn dp1_condition(data: &Dp1Data) -> Dp1Condition {
    let (p, q) = (data.p(), data.q());
    let d = pencil_discriminant(&p, &q);
    let mut failures = Vec::new();
    if quartic_discriminant(&Quartic::from_poly(&p)).is_zero() {
        failures.push("D vanishes at (1:0)".to_string());
    }
    if quartic_discriminant(&Quartic::from_poly(&q)).is_zero() {
        failures.push("D vanishes at (0:1)".to_string());
    }
    if failures.is_empty() {
        if d.degree() != Some(6) {
            failures.push("D has degree below 6".into());
        } else if discriminant(&d).is_zero() {
            failures.push("D not squarefree".into());
        } else {
            let k = (0i64..)
                .map(|k| Rational::from_integer(k.into()))
                .find(|k| {
                    let (pk, qk) = (p.eval(k), q.eval(k));
                    pk.is_zero() || !d.eval(&(-qk / pk)).is_zero()
                })
                .expect("D has finitely many roots");
            let s1 = pencil_first_subresultant(&moebius(&p, &k), &moebius(&q, &k));
            if resultant(&d, &s1).is_zero() {
                failures.push("some singular member has more than one double root".into());
            }
        }
    }
    Dp1Condition {
        holds: failures.is_empty(),
        pencil_discriminant: d.padded(7),
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dp1Minimality {
    pub report: MinimalityReport,
    /// The seven-fibre bundle left after contracting a component over `e₈`.
    pub contracted: ConicBundleData,
}

/// Independence of the sixteen classes `e_i − e_j`, `i ≤ 4 < j`, together with the
/// fibre fields `a_i = ∏_{j≥5} (e_i − e_j)` and `a_j = ∏_{i≤4} (e_j − e_i)/(e₈ − e_i)`.
pub fn dp1_minimality(data: &Dp1Data) -> Result<Dp1Minimality> {
    let e = &data.e;
    let mut labels = Vec::new();
    let mut classes = Vec::new();
    for i in 0..4 {
        for j in 4..8 {
            labels.push(format!("e{}-e{}", i + 1, j + 1));
            classes.push(squarefree_class(&(&e[i] - &e[j]))?);
        }
    }
    let mut fibre = Vec::with_capacity(7);
    for i in 0..4 {
        let v = e[4..].iter().fold(Rational::one(), |acc, ej| acc * (&e[i] - ej));
        fibre.push(squarefree_class(&v)?);
    }
    for j in 4..7 {
        let v = e[..4]
            .iter()
            .fold(Rational::one(), |acc, ei| acc * (&e[j] - ei) / (&e[7] - ei));
        fibre.push(squarefree_class(&v)?);
    }
    Ok(Dp1Minimality {
        report: minimality(labels, classes),
        contracted: ConicBundleData::new(e[..7].to_vec(), fibre),
    })
}
