//! Counting primary solutions `N(B)` of a norm-form system in a congruence class and
//! a box, and the singular-series prediction `β_∞ ∏ β_p`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{factorize, is_prime, primes_up_to, valuation_i128, Place};
use crate::localsolve::hensel_bound;
use crate::pencil::NormFormSystem;
use crate::quadform::{pell_fundamental, rho_table, w, RepresentationTable};
use crate::scalar::Real;
use crate::{Error, Integer, Rational, Result};

pub const DEFAULT_PRIME_CUTOFF: u64 = 100;
/// Stabilization is sought for `k0 <= k <= k0 + DEFAULT_EXTRA_K`.
pub const DEFAULT_EXTRA_K: u32 = 4;
/// Largest number of residue vectors `t mod p^k` summed in one `G(p^k)`.
pub const DEFAULT_RESIDUE_CAP: u128 = 200_000_000;

/// A counting problem: the system, the congruence `u ≡ uM mod M`, the box
/// `|u − B·uInf|_∞ < εB`, and the values of `B` to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountJob {
    pub system: NormFormSystem,
    pub modulus: u64,
    pub u_mod: Vec<i64>,
    pub u_inf: Vec<Rational>,
    pub epsilon: Rational,
    pub schedule: Vec<u64>,
}

/// Which of the side conditions on a job hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobCheck {
    /// `val_p(M) >= max_i val_p(4a_i)` at every `p | M`.
    pub modulus_depth_ok: bool,
    /// `f_i(uM) ≢ 0 mod p^{val_p(M)}` at every `p | M`.
    pub residues_nonzero_ok: bool,
    /// `f_i(uInf) > 0` for every definite index.
    pub real_signs_ok: bool,
    /// Every scheduled `B` is `C²` with `C ≡ 1 mod M`.
    pub schedule_ok: bool,
    pub problems: Vec<String>,
}

impl JobCheck {
    pub fn all_ok(&self) -> bool {
        self.modulus_depth_ok && self.residues_nonzero_ok && self.real_signs_ok && self.schedule_ok
    }
}

impl CountJob {
    pub fn new(
        system: NormFormSystem,
        modulus: u64,
        u_mod: Vec<i64>,
        u_inf: Vec<Rational>,
        epsilon: Rational,
        schedule: Vec<u64>,
    ) -> Result<Self> {
        let s = system.s();
        if modulus == 0 {
            return Err(Error::InvalidJob("modulus M must be positive".into()));
        }
        if u_mod.len() != s || u_inf.len() != s {
            return Err(Error::InvalidJob(format!("uM and uInf must have {s} entries")));
        }
        if !epsilon.is_positive() {
            return Err(Error::InvalidJob("epsilon must be positive".into()));
        }
        if schedule.contains(&0) {
            return Err(Error::InvalidJob("B values must be positive".into()));
        }
        Ok(CountJob {
            system,
            modulus,
            u_mod,
            u_inf,
            epsilon,
            schedule,
        })
    }

    pub fn check(&self) -> Result<JobCheck> {
        let mut c = JobCheck {
            modulus_depth_ok: true,
            residues_nonzero_ok: true,
            real_signs_ok: true,
            schedule_ok: true,
            problems: Vec::new(),
        };
        for (p, m) in factorize(&BigInt::from(self.modulus))? {
            let bound = hensel_bound(&self.system, p);
            if m < bound {
                c.modulus_depth_ok = false;
                c.problems.push(format!("val_{p}(M) = {m} < max val_{p}(4a_i) = {bound}"));
            }
            let pm = (p as i128).pow(m);
            for i in 0..self.system.r() {
                if self.system.eval(i, &self.u_mod).rem_euclid(pm) == 0 {
                    c.residues_nonzero_ok = false;
                    c.problems.push(format!("f_{}(uM) = 0 mod {p}^{m}", i + 1));
                }
            }
        }
        for i in self.system.minus_indices() {
            if !self.system.eval_rational(i, &self.u_inf).is_positive() {
                c.real_signs_ok = false;
                c.problems.push(format!("f_{}(uInf) <= 0 for a definite form", i + 1));
            }
        }
        for &b in &self.schedule {
            let root = num_integer::Roots::sqrt(&b);
            if root * root != b || root % self.modulus != 1 % self.modulus {
                c.schedule_ok = false;
                c.problems.push(format!("B = {b} is not C² with C ≡ 1 mod {}", self.modulus));
            }
        }
        Ok(c)
    }

    /// The job with its equations reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(CountJob {
            system: self.system.permuted(perm)?,
            ..self.clone()
        })
    }

    /// Integer ranges `[lo, hi]` of each coordinate in the box, before the congruence.
    fn box_ranges(&self, b: u64) -> Vec<(i64, i64)> {
        let b = Rational::from_integer(b.into());
        let half = &self.epsilon * &b;
        self.u_inf
            .iter()
            .map(|c| {
                let centre = c * &b;
                // Strict: lo is the least integer > centre − half, hi the greatest < centre + half.
                let lo: BigInt = (&centre - &half).floor().to_integer() + 1;
                let hi: BigInt = (&centre + &half).ceil().to_integer() - 1;
                (lo.to_i64().unwrap_or(i64::MAX), hi.to_i64().unwrap_or(i64::MIN))
            })
            .collect()
    }
}

/// `meas K = (2εB/M)^s`.
pub fn region_measure(job: &CountJob, b: u64) -> Rational {
    let side = Rational::from_integer(2.into()) * &job.epsilon * Rational::from_integer(b.into())
        / Rational::from_integer(job.modulus.into());
    num_traits::pow(side, job.system.s())
}

/// Coordinates `u_j ≡ uM_j mod M` inside `[lo, hi]`.
fn congruent_values(lo: i64, hi: i64, residue: i64, m: u64) -> Vec<i64> {
    let m = m as i64;
    if lo > hi {
        return Vec::new();
    }
    let first = lo + (residue - lo).rem_euclid(m);
    (0..).map(|k| first + k * m).take_while(|&v| v <= hi).collect()
}

/// `N(B) = Σ ∏ R_i(f_i(u))` over `u` in the box and congruence class.
pub fn enumerate_n(job: &CountJob, b: u64) -> Result<Integer> {
    let sys = &job.system;
    let coords: Vec<Vec<i64>> = job
        .box_ranges(b)
        .iter()
        .zip(&job.u_mod)
        .map(|(&(lo, hi), &res)| congruent_values(lo, hi, res, job.modulus))
        .collect();
    if coords.iter().any(Vec::is_empty) {
        return Ok(Integer::zero());
    }
    let tables = (0..sys.r())
        .map(|i| {
            let bound: i128 = sys.forms()[i]
                .iter()
                .zip(&coords)
                .map(|(&c, vals)| {
                    let m = vals[0].unsigned_abs().max(vals[vals.len() - 1].unsigned_abs()) as i128;
                    c.unsigned_abs() as i128 * m
                })
                .sum();
            let bound = i64::try_from(bound).map_err(|_| Error::Overflow("box too large".into()))?;
            RepresentationTable::new(&sys.binary_form(i), bound)
        })
        .collect::<Result<Vec<_>>>()?;
    let definite: Vec<bool> = sys.a().iter().map(|&a| a < 0).collect();
    let s = sys.s();
    let total: u128 = coords[0]
        .par_iter()
        .map(|&u0| {
            let mut u = vec![u0; s];
            let mut idx = vec![0usize; s];
            let mut acc: u128 = 0;
            loop {
                for j in 1..s {
                    u[j] = coords[j][idx[j]];
                }
                let mut prod: u128 = 1;
                for i in 0..sys.r() {
                    let v = sys.eval(i, &u) as i64;
                    let rep = if definite[i] && v <= 0 { 0 } else { tables[i].get(v) };
                    prod *= rep as u128;
                    if prod == 0 {
                        break;
                    }
                }
                acc += prod;
                // Odometer over coordinates 1..s.
                let mut j = s - 1;
                loop {
                    if j == 0 {
                        return acc;
                    }
                    idx[j] += 1;
                    if idx[j] < coords[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j -= 1;
                }
            }
        })
        .sum();
    Ok(Integer::from(total))
}

/// How the indefinite factors of `β_∞` are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IndefiniteFactor {
    /// `log ε / (2√a)` with `ε = t + u√a` the automorph generator. Equals
    /// `log η / √a` when the fundamental unit `η` has norm −1.
    #[default]
    AutomorphGenerator,
    /// `log η / √a` with `η` the fundamental unit of `Z[√a]`, whatever its norm.
    FieldUnit,
}

/// `β_∞ = meas K · ∏_{a_i<0} π/(w(4a_i)√|a_i|) · ∏_{a_j>0} (indefinite factor)`.
pub fn beta_infinity<R: Real>(job: &CountJob, b: u64, normalization: IndefiniteFactor) -> Result<R> {
    let q = |n: i64| Rational::from_integer(n.into());
    let mut acc = R::from_rational(&region_measure(job, b));
    for &a in job.system.a() {
        if a < 0 {
            let denom = R::from_rational(&q(w(4 * a)? as i64)).mul(&R::from_rational(&q(-a)).sqrt());
            acc = acc.mul(&R::pi().div(&denom));
        } else {
            let sqrt_a = R::from_rational(&q(a)).sqrt();
            let factor = match normalization {
                IndefiniteFactor::AutomorphGenerator => {
                    let g = pell_fundamental(a)?;
                    let eps = R::from_rational(&Rational::from_integer(g.t))
                        .add(&R::from_rational(&Rational::from_integer(g.u)).mul(&sqrt_a));
                    eps.ln().div(&R::from_rational(&q(2)).mul(&sqrt_a))
                }
                IndefiniteFactor::FieldUnit => {
                    let e = crate::quadform::fundamental_unit(a)?;
                    let eta = R::from_rational(&Rational::from_integer(e.x))
                        .add(&R::from_rational(&Rational::from_integer(e.y)).mul(&sqrt_a));
                    eta.ln().div(&sqrt_a)
                }
            };
            acc = acc.mul(&factor);
        }
    }
    Ok(acc)
}

/// `G(p^k) = Σ_{t mod p^k} ∏ ρ_i(p^k; g_i(t))` with `g_i(t) = f_i(uM + M t)`.
pub fn g_count(job: &CountJob, p: u64, k: u32, residue_cap: u128) -> Result<Integer> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Ok(Integer::one());
    }
    let sys = &job.system;
    let s = sys.s();
    let m = p.checked_pow(k).ok_or(Error::EnumerationCap { p, k, cap: u64::MAX })?;
    if (m as u128).checked_pow(s as u32).map_or(true, |n| n > residue_cap) {
        return Err(Error::EnumerationCap {
            p,
            k,
            cap: residue_cap.min(u64::MAX as u128) as u64,
        });
    }
    let tables = (0..sys.r())
        .map(|i| rho_table(&sys.binary_form(i), p, k))
        .collect::<Result<Vec<_>>>()?;
    let mi = m as i128;
    let consts: Vec<i128> = (0..sys.r()).map(|i| sys.eval(i, &job.u_mod).rem_euclid(mi)).collect();
    let coeffs: Vec<Vec<i128>> = sys
        .forms()
        .iter()
        .map(|f| f.iter().map(|&c| (c as i128 * job.modulus as i128).rem_euclid(mi)).collect())
        .collect();
    let r = sys.r();
    let partial: Vec<BigInt> = (0..m)
        .into_par_iter()
        .map(|t0| {
            let vals: Vec<i128> = (0..r).map(|i| (consts[i] + coeffs[i][0] * t0 as i128) % mi).collect();
            let mut acc = BigInt::zero();
            let mut small: u128 = 0;
            let mut t = vec![0u64; s];
            loop {
                let mut prod: u128 = 1;
                for i in 0..r {
                    let v: i128 = (1..s).fold(vals[i], |acc, j| (acc + coeffs[i][j] * t[j] as i128) % mi);
                    prod = prod.saturating_mul(tables[i][v as usize] as u128);
                }
                if prod == u128::MAX {
                    // Fall back to exact big products.
                    let mut big = BigInt::one();
                    for i in 0..r {
                        let v: i128 = (1..s).fold(vals[i], |acc, j| (acc + coeffs[i][j] * t[j] as i128) % mi);
                        big *= tables[i][v as usize];
                    }
                    acc += big;
                } else if let Some(n) = small.checked_add(prod) {
                    small = n;
                } else {
                    acc += small;
                    small = prod;
                }
                let mut j = s - 1;
                loop {
                    if j == 0 {
                        acc += small;
                        return acc;
                    }
                    t[j] += 1;
                    if t[j] < m {
                        break;
                    }
                    t[j] = 0;
                    j -= 1;
                }
            }
        })
        .collect();
    Ok(partial.into_iter().fold(BigInt::zero(), |a, b| a + b))
}

/// How a value of `β_p` was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaMethod {
    /// `p | M`: `p^{−(s+r)m} G(p^m)`, with `m = val_p(M)`.
    Modulus { m: u32 },
    /// `G(p^{k+1}) = p^{s+r} G(p^k)` observed at this `k`.
    Stabilized { k: u32 },
    /// `r <= s` and some `r × r` minor of the coefficients of the `g_i` is a `p`-adic
    /// unit, so `t ↦ g(t)` is equidistributed and `β_p = 1`.
    UnitMinor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaP {
    pub p: u64,
    pub value: Rational,
    pub method: BetaMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    pub prime_cutoff: u64,
    pub extra_k: u32,
    pub residue_cap: u128,
    /// Use the unit-minor shortcut where it applies.
    pub unit_minor_shortcut: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            prime_cutoff: DEFAULT_PRIME_CUTOFF,
            extra_k: DEFAULT_EXTRA_K,
            residue_cap: DEFAULT_RESIDUE_CAP,
            unit_minor_shortcut: true,
        }
    }
}

/// Whether some `r × r` minor of the coefficient matrix is prime to `p` (requires `r <= s`).
fn has_unit_minor(rows: &[Vec<i64>], p: u64) -> bool {
    let r = rows.len();
    let s = rows[0].len();
    if r > s {
        return false;
    }
    // Rank of the matrix over F_p equals r.
    let pi = p as i128;
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|row| row.iter().map(|&c| (c as i128).rem_euclid(pi)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..s {
        let Some(piv) = (rank..r).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = mod_inverse(m[rank][col], pi);
        for i in 0..r {
            if i != rank && m[i][col] != 0 {
                let f = m[i][col] * inv % pi;
                for j in 0..s {
                    m[i][j] = (m[i][j] - f * m[rank][j]).rem_euclid(pi);
                }
            }
        }
        rank += 1;
    }
    rank == r
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    let (mut old_r, mut r) = (a, p);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p)
}

fn p_pow(p: u64, e: u32) -> Rational {
    Rational::from_integer(BigInt::from(p).pow(e))
}

/// `β_p = lim p^{−(s+r)k} G(p^k)`, exactly.
pub fn beta_p(job: &CountJob, p: u64, opts: &CountOptions) -> Result<BetaP> {
    let sys = &job.system;
    let sr = (sys.s() + sys.r()) as u32;
    let m = valuation_i128(job.modulus as i128, p);
    if m > 0 {
        let g = g_count(job, p, m, opts.residue_cap)?;
        return Ok(BetaP {
            p,
            value: Rational::from_integer(g) / p_pow(p, sr * m),
            method: BetaMethod::Modulus { m },
        });
    }
    if opts.unit_minor_shortcut {
        let scaled: Vec<Vec<i64>> = sys
            .forms()
            .iter()
            .map(|f| f.iter().map(|&c| ((c as i128 * job.modulus as i128) % p as i128) as i64).collect())
            .collect();
        if has_unit_minor(&scaled, p) {
            return Ok(BetaP {
                p,
                value: Rational::one(),
                method: BetaMethod::UnitMinor,
            });
        }
    }
    let k0 = hensel_bound(sys, p) + 1;
    let k_max = k0 + opts.extra_k;
    let ratio = BigInt::from(p).pow(sr);
    let mut prev = g_count(job, p, k0, opts.residue_cap)?;
    let mut diagnostics = Vec::new();
    for k in k0..k_max {
        let next = g_count(job, p, k + 1, opts.residue_cap)?;
        if next == &prev * &ratio {
            return Ok(BetaP {
                p,
                value: Rational::from_integer(prev) / p_pow(p, sr * k),
                method: BetaMethod::Stabilized { k },
            });
        }
        diagnostics.push(format!("G({p}^{}) / {p}^{}G({p}^{k}) = {}", k + 1, sr, Rational::new(next.clone(), &prev * &ratio)));
        prev = next;
    }
    Err(Error::NoStabilization {
        p,
        k_max,
        diagnostics: diagnostics.join("; "),
    })
}

/// A float with its working precision and, when tracked, a bound on its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedFloat {
    pub value: f64,
    pub precision_bits: u32,
    pub error_bound: Option<f64>,
}

impl TaggedFloat {
    pub fn from_real<R: Real>(x: &R) -> Self {
        TaggedFloat {
            value: x.to_f64(),
            precision_bits: R::precision_bits(),
            error_bound: x.error_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub b: u64,
    /// `β_∞ / B^s`.
    pub beta_inf_per_bs: TaggedFloat,
    pub predicted: TaggedFloat,
    pub empirical: Integer,
    /// `empirical / predicted`; absent when the prediction is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Predicted,
    /// Some local density vanishes, so the prediction is zero.
    ZeroDensity { place: Place },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub verdict: Verdict,
    pub beta_p: Vec<BetaP>,
    /// `∏_{p <= cutoff} β_p`.
    pub euler_product: Rational,
    pub prime_cutoff: u64,
    /// Factors for `p > cutoff` are `1 + O(p^{-2})` and are not estimated.
    pub tail_unestimated: bool,
    pub reports: Vec<DensityReport>,
}

/// `β_∞ ∏_{p <= cutoff} β_p` against `N(B)` for every `B` in the schedule.
pub fn predict_and_compare<R: Real>(job: &CountJob, opts: &CountOptions) -> Result<Prediction> {
    let check = job.check()?;
    if !check.modulus_depth_ok || !check.residues_nonzero_ok {
        return Err(Error::InvalidJob(check.problems.join("; ")));
    }
    let primes = primes_up_to(opts.prime_cutoff);
    let betas: Vec<BetaP> = primes.par_iter().map(|&p| beta_p(job, p, opts)).collect::<Result<_>>()?;
    let euler_product = betas.iter().fold(Rational::one(), |acc, b| acc * &b.value);
    let zero_at = if !check.real_signs_ok {
        Some(Place::Infinite)
    } else {
        betas.iter().find(|b| b.value.is_zero()).map(|b| Place::Finite(b.p))
    };
    let s = job.system.s();
    let mut reports = Vec::with_capacity(job.schedule.len());
    for &b in &job.schedule {
        let empirical = enumerate_n(job, b)?;
        let bs = R::from_rational(&Rational::from_integer(BigInt::from(b).pow(s as u32)));
        let binf: R = beta_infinity(job, b, IndefiniteFactor::AutomorphGenerator)?;
        let (predicted, ratio) = if zero_at.is_some() {
            (R::from_rational(&Rational::zero()), None)
        } else {
            let pred = binf.mul(&R::from_rational(&euler_product));
            let ratio = empirical.to_f64().map(|e| e / pred.to_f64());
            (pred, ratio)
        };
        reports.push(DensityReport {
            b,
            beta_inf_per_bs: TaggedFloat::from_real(&binf.div(&bs)),
            predicted: TaggedFloat::from_real(&predicted),
            empirical,
            ratio,
        });
    }
    Ok(Prediction {
        verdict: match zero_at {
            Some(place) => Verdict::ZeroDensity { place },
            None => Verdict::Predicted,
        },
        beta_p: betas,
        euler_product,
        prime_cutoff: opts.prime_cutoff,
        tail_unestimated: true,
        reports,
    })
}

/// `C²` for the `C ≡ 1 mod M` nearest to `√target`.
pub fn nearest_admissible_b(target: u64, modulus: u64) -> u64 {
    let root = num_integer::Roots::sqrt(&target).max(1);
    let c = root - (root - 1) % modulus;
    let up = c + modulus;
    let best = if up * up - target < target.abs_diff(c * c) { up } else { c };
    best * best
}

/// `gcd` of all coefficients of all forms, exposed for diagnostics.
pub fn content(system: &NormFormSystem) -> u64 {
    system
        .forms()
        .iter()
        .flatten()
        .fold(0u64, |g, &c| g.gcd(&c.unsigned_abs()))
}

/// Groups `β_p` values by method.
pub fn beta_summary(betas: &[BetaP]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for b in betas {
        let key = match b.method {
            BetaMethod::Modulus { .. } => "modulus",
            BetaMethod::Stabilized { .. } => "stabilized",
            BetaMethod::UnitMinor => "unit-minor",
        };
        *out.entry(key.to_string()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::interval::Interval;

    fn job(a: &[i64], f: &[&[i64]], m: u64, u_mod: &[i64], u_inf: &[Rational], eps: Rational) -> CountJob {
        let sys = NormFormSystem::new(a.to_vec(), f.iter().map(|r| r.to_vec()).collect()).unwrap();
        CountJob::new(sys, m, u_mod.to_vec(), u_inf.to_vec(), eps, vec![]).unwrap()
    }

    fn circle_job() -> CountJob {
        job(&[-1], &[&[1, 0]], 1, &[0, 0], &[int(1), int(0)], rat(1, 2))
    }

    #[test]
    fn measure_examples() {
        assert_eq!(region_measure(&circle_job(), 100), int(10000));
        let j = job(&[-1], &[&[1, 0]], 2, &[1, 0], &[int(1), int(0)], rat(1, 4));
        assert_eq!(region_measure(&j, 16), int(16));
        let j = job(&[-1], &[&[1, 0, 0]], 1, &[0, 0, 0], &[int(1), int(0), int(0)], int(1));
        assert_eq!(region_measure(&j, 1), int(8));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_n(&circle_job(), 4).unwrap(), BigInt::from(9));
        let j = job(&[-1], &[&[1, 0]], 1, &[0, 0], &[rat(1, 2), rat(1, 2)], rat(1, 4));
        assert_eq!(enumerate_n(&j, 1).unwrap(), BigInt::zero());
        let j = job(&[-1], &[&[1, 0]], 1, &[0, 0], &[int(-1), int(0)], rat(1, 2));
        for b in [4, 16, 100] {
            assert_eq!(enumerate_n(&j, b).unwrap(), BigInt::zero());
        }
    }

    #[test]
    fn beta_infinity_examples() {
        let v: f64 = beta_infinity(&circle_job(), 10, IndefiniteFactor::default()).unwrap();
        assert!((v - 100.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-9);
        let j = job(&[2], &[&[1, 0]], 1, &[0, 0], &[int(1), int(0)], rat(1, 2));
        let v: Interval = beta_infinity(&j, 10, IndefiniteFactor::default()).unwrap();
        let expected = 100.0 * (1.0 + 2f64.sqrt()).ln() / 2f64.sqrt();
        assert!((v.midpoint_f64() - expected).abs() < 1e-12);
        assert!(v.radius_f64() < 1e-20);
        // Norm −1 unit: both normalizations agree.
        let u: f64 = beta_infinity(&j, 10, IndefiniteFactor::FieldUnit).unwrap();
        assert!((u - expected).abs() < 1e-9);
    }

    #[test]
    fn g_examples() {
        let j = circle_job();
        assert_eq!(g_count(&j, 3, 1, DEFAULT_RESIDUE_CAP).unwrap(), BigInt::from(27));
        assert_eq!(g_count(&j, 5, 1, DEFAULT_RESIDUE_CAP).unwrap(), BigInt::from(125));
        let opts = CountOptions {
            unit_minor_shortcut: false,
            ..Default::default()
        };
        for p in [2, 3, 5] {
            let b = beta_p(&j, p, &opts).unwrap();
            assert_eq!(b.value, Rational::one());
            assert!(matches!(b.method, BetaMethod::Stabilized { .. }));
        }
    }

    #[test]
    fn modulus_beta_bound() {
        // x² + y² = u1 with u ≡ (1, 0) mod 4: 1 is a sum of two squares mod 4.
        let j = job(&[-1], &[&[1, 0]], 4, &[1, 0], &[int(1), int(0)], rat(1, 2));
        assert!(j.check().unwrap().modulus_depth_ok);
        let b = beta_p(&j, 2, &CountOptions::default()).unwrap();
        assert!(b.value >= rat(1, 4));
        assert_eq!(b.method, BetaMethod::Modulus { m: 2 });
    }

    #[test]
    fn admissible_b() {
        assert_eq!(nearest_admissible_b(100, 1), 100);
        assert_eq!(nearest_admissible_b(100, 12), 169);
        assert_eq!(nearest_admissible_b(1000, 1), 1024);
        let mut j = circle_job();
        j.schedule = vec![9, 10];
        assert!(!j.check().unwrap().schedule_ok);
    }
}
