//! Local invariants of `Σ n_i (a_i, t − e_i)` at fibre parameters, the Brauer–Manin
//! pairing on adelic fibre points, and residue-class obstruction scans.
//!
//! The fibre over `t` is taken to be the conic whose class is `Σ_i (a_i, t − e_i)`,
//! the class with the prescribed residues `a_i` at the `e_i` (for the Châtelet
//! surface `x² − a y² = ∏ (t − e_i)` it is exactly the fibre). So `t_v` carries
//! `Q_v`-points iff the invariant of `(1, …, 1)` vanishes there, and on such
//! parameters `n` and `n + (1, …, 1)` have the same invariant.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{format_rational, hilbert, prime_support, valuation, Place};
use crate::pencil::{format_f2, BrauerElement, ConicBundleData};
use crate::{Error, Rational, Result};

pub const DEFAULT_RESOLUTION: u32 = 3;
pub const DEFAULT_RESOLUTION_AT_2: u32 = 4;

pub fn default_resolution(p: u64) -> u32 {
    if p == 2 {
        DEFAULT_RESOLUTION_AT_2
    } else {
        DEFAULT_RESOLUTION
    }
}

/// How many times a non-constant scan ball may be split before giving up.
const MAX_REFINEMENT: u32 = 6;

/// Extra `p`-adic digits beyond `val_p(x)` that fix the square class of `x`.
fn square_digits(p: u64) -> i64 {
    if p == 2 {
        3
    } else {
        1
    }
}

fn check_parameter(data: &ConicBundleData, t: &Rational) -> Result<()> {
    if data.e.contains(t) {
        return Err(Error::DegenerateParameter(format_rational(t)));
    }
    Ok(())
}

/// `(a_i, t − e_i)_v` as an `F₂` bit, for every `i`.
fn symbol_bits(data: &ConicBundleData, t: &Rational, v: Place) -> Result<Vec<bool>> {
    check_parameter(data, t)?;
    data.a
        .iter()
        .zip(&data.e)
        .map(|(a, e)| Ok(hilbert(&a.representative_rational(), &(t - e), v)? == -1))
        .collect()
}

fn pair_bits(n: &[bool], bits: &[bool]) -> bool {
    n.iter().zip(bits).fold(false, |acc, (&x, &y)| acc ^ (x & y))
}

/// `Σ n_i ι((a_i, t − e_i)_v)` with `ι(+1) = 0`, `ι(−1) = 1`.
pub fn local_invariant(data: &ConicBundleData, n: &BrauerElement, t: &Rational, v: Place) -> Result<bool> {
    if n.n.len() != data.r() {
        return Err(Error::InvalidBrauerElement(format!("length {} for r = {}", n.n.len(), data.r())));
    }
    Ok(pair_bits(&n.n, &symbol_bits(data, t, v)?))
}

/// Whether the fibre over `t` has a point over `Q_v`.
pub fn fibre_soluble(data: &ConicBundleData, t: &Rational, v: Place) -> Result<bool> {
    Ok(!symbol_bits(data, t, v)?.into_iter().fold(false, |acc, b| acc ^ b))
}

/// Local invariants of a global parameter, keyed by place; only nonzero entries are kept.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InvariantVector {
    pub entries: BTreeMap<Place, bool>,
}

impl InvariantVector {
    pub fn total(&self) -> bool {
        self.entries.values().fold(false, |acc, &b| acc ^ b)
    }
}

/// Places where some `(a_i, t − e_i)_v` can be nontrivial for this particular `t`.
pub fn contributing_places(data: &ConicBundleData, t: &Rational) -> Result<BTreeSet<Place>> {
    check_parameter(data, t)?;
    let mut out = BTreeSet::from([Place::Infinite, Place::Finite(2)]);
    for (a, e) in data.a.iter().zip(&data.e) {
        out.extend(a.primes.iter().map(|&p| Place::Finite(p)));
        out.extend(prime_support(&(t - e))?.into_iter().map(Place::Finite));
    }
    Ok(out)
}

/// Every local invariant of `n` at the global parameter `t`.
pub fn global_invariants(data: &ConicBundleData, n: &BrauerElement, t: &Rational) -> Result<InvariantVector> {
    let mut entries = BTreeMap::new();
    for v in contributing_places(data, t)? {
        if local_invariant(data, n, t, v)? {
            entries.insert(v, true);
        }
    }
    Ok(InvariantVector { entries })
}

/// Places of bad reduction of the pencil: `∞`, `2`, primes of the `a_i`, of the
/// differences `e_i − e_j` and of the denominators of the `e_i`.
pub fn bad_places(data: &ConicBundleData) -> Result<BTreeSet<Place>> {
    let mut out = BTreeSet::from([Place::Infinite, Place::Finite(2)]);
    for (i, a) in data.a.iter().enumerate() {
        out.extend(a.primes.iter().map(|&p| Place::Finite(p)));
        let e = &data.e[i];
        out.extend(prime_support(&Rational::from_integer(e.denom().clone()))?.into_iter().map(Place::Finite));
        for f in &data.e[i + 1..] {
            out.extend(prime_support(&(e - f))?.into_iter().map(Place::Finite));
        }
    }
    Ok(out)
}

/// A `v`-adic parameter: `value + O(p^precision)` at finite places, exact when `precision` is absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalParameter {
    pub value: Rational,
    pub precision: Option<i64>,
}

/// Fibre parameters `t_v` at the places of a finite support.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AdelicFiberPoint {
    pub t: BTreeMap<Place, LocalParameter>,
}

impl AdelicFiberPoint {
    /// The same exact rational at every listed place.
    pub fn global(t: &Rational, places: impl IntoIterator<Item = Place>) -> Self {
        AdelicFiberPoint {
            t: places
                .into_iter()
                .map(|v| {
                    (
                        v,
                        LocalParameter {
                            value: t.clone(),
                            precision: None,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn support(&self) -> BTreeSet<Place> {
        self.t.keys().copied().collect()
    }

    pub fn set(&mut self, v: Place, value: Rational, precision: Option<i64>) {
        self.t.insert(v, LocalParameter { value, precision });
    }

    /// Checks each parameter avoids the `e_i` and fixes every `t_v − e_i` up to squares.
    pub fn validate(&self, data: &ConicBundleData) -> Result<()> {
        for (&v, param) in &self.t {
            check_parameter(data, &param.value)?;
            if let (Place::Finite(p), Some(given)) = (v, param.precision) {
                for e in &data.e {
                    let needed = valuation(&(&param.value - e), p)? + square_digits(p);
                    if given < needed {
                        return Err(Error::InsufficientPrecision {
                            place: v.to_string(),
                            needed,
                            given,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Σ_v inv_v(n, t_v)` over the support. Every `t_v` must have a soluble fibre. Bad
/// places outside the support are accepted only when the invariant of `n` vanishes
/// on every soluble default-resolution cell there.
pub fn pairing(data: &ConicBundleData, point: &AdelicFiberPoint, n: &BrauerElement) -> Result<bool> {
    point.validate(data)?;
    let support = point.support();
    for v in bad_places(data)? {
        if support.contains(&v) {
            continue;
        }
        let scan = scan_place(data, std::slice::from_ref(n), v, resolution_for(v))?;
        if scan.cells.iter().any(|c| c.values[0]) {
            return Err(Error::SupportTooSmall(v.to_string()));
        }
    }
    let mut acc = false;
    for (&v, param) in &point.t {
        if !fibre_soluble(data, &param.value, v)? {
            return Err(Error::InsolubleFibre {
                place: v.to_string(),
                t: format_rational(&param.value),
            });
        }
        acc ^= local_invariant(data, n, &param.value, v)?;
    }
    Ok(acc)
}

fn resolution_for(v: Place) -> u32 {
    match v {
        Place::Finite(p) => default_resolution(p),
        Place::Infinite => 0,
    }
}

/// An open set of parameters at one place on which every invariant is constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCell {
    pub id: String,
    pub representative: Rational,
    /// One bit per generator.
    pub values: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceScan {
    pub place: Place,
    pub resolution: u32,
    /// Cells whose fibres have local points.
    pub cells: Vec<ScanCell>,
    /// Balls that contain some `e_i` and are left out.
    pub skipped: Vec<String>,
    /// Cells whose fibres have no local point.
    pub insoluble: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationRow {
    /// Invariant pattern per place, one character per generator.
    pub pattern: BTreeMap<Place, String>,
    /// Number of cell choices realizing this pattern.
    pub cell_count: u128,
    /// The pattern pairs to zero with every generator.
    pub allowed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionTable {
    pub generators: Vec<String>,
    pub places: Vec<PlaceScan>,
    pub rows: Vec<CombinationRow>,
    pub total_combinations: u128,
    pub excluded_combinations: u128,
    /// Bad places absent from the support; their contribution is not accounted for.
    pub unsupported_bad_places: Vec<Place>,
    /// Supported places where no cell has a soluble fibre.
    pub insoluble_places: Vec<Place>,
}

/// A `p`-adic ball `centre + p^radius Z_p`.
struct Ball {
    centre: Rational,
    radius: i64,
}

impl Ball {
    fn label(&self, p: u64) -> String {
        format!("t = {} mod {p}^{}", format_rational(&self.centre), self.radius)
    }

    fn contains(&self, x: &Rational, p: u64) -> Result<bool> {
        let d = x - &self.centre;
        Ok(d.is_zero() || valuation(&d, p)? >= self.radius)
    }

    fn child(&self, p: u64, j: u64) -> Rational {
        &self.centre + Rational::from_integer(BigInt::from(j)) * p_power(p, self.radius)
    }
}

fn p_power(p: u64, e: i64) -> Rational {
    let pe = Rational::from_integer(BigInt::from(p).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        pe
    } else {
        pe.recip()
    }
}

/// Balls covering `Q_p` minus small neighbourhoods of the `e_i` and of `∞`.
///
/// Integral `t` is cut mod `p^res`. Parameters with `val(t) = −k` are cut as
/// `p^{−k}·w`, `w` a unit mod `p^res`, for `k` up to the point where every
/// `t − e_i` is `t` times a square; beyond that the invariant of a `δ`-trivial
/// `n` is `(∏ a_i^{n_i}, t)_p = 0`.
fn balls(data: &ConicBundleData, p: u64, res: u32) -> Result<Vec<Ball>> {
    let min_val = data
        .e
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| valuation(e, p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min();
    let k_max = min_val.map_or(0, |m| (square_digits(p) - m - 1).max(0));
    let pr = p.pow(res);
    let mut out = Vec::new();
    for u in 0..pr {
        out.push(Ball {
            centre: Rational::from_integer(u.into()),
            radius: res as i64,
        });
    }
    for k in 1..=k_max {
        for u in (0..pr).filter(|u| u % p != 0) {
            out.push(Ball {
                centre: Rational::from_integer(u.into()) * p_power(p, -k),
                radius: res as i64 - k,
            });
        }
    }
    Ok(out)
}

/// Open intervals between consecutive `e_i`, with two sample points each.
fn real_cells(data: &ConicBundleData) -> Vec<(String, Rational, Rational)> {
    let mut e = data.e.clone();
    e.sort();
    e.dedup();
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    let four = Rational::from_integer(4.into());
    let mut out = Vec::new();
    let first = &e[0];
    out.push((format!("(-inf, {})", format_rational(first)), first - &one, first - &two));
    for w in e.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let mid = (lo + hi) / &two;
        let quarter = (lo * Rational::from_integer(3.into()) + hi) / &four;
        out.push((format!("({}, {})", format_rational(lo), format_rational(hi)), mid, quarter));
    }
    let last = &e[e.len() - 1];
    out.push((format!("({}, inf)", format_rational(last)), last + &one, last + &two));
    out
}

fn scan_place(data: &ConicBundleData, gens: &[BrauerElement], v: Place, res: u32) -> Result<PlaceScan> {
    // Generator bits followed by the fibre's own invariant.
    let eval = |t: &Rational| -> Result<Vec<bool>> {
        let bits = symbol_bits(data, t, v)?;
        let mut out: Vec<bool> = gens.iter().map(|g| pair_bits(&g.n, &bits)).collect();
        out.push(bits.iter().fold(false, |acc, &b| acc ^ b));
        Ok(out)
    };
    let split = |cells: Vec<ScanCell>| {
        let (mut soluble, mut insoluble) = (Vec::new(), Vec::new());
        for mut c in cells {
            if c.values.pop() == Some(true) {
                insoluble.push(c.id);
            } else {
                soluble.push(c);
            }
        }
        (soluble, insoluble)
    };
    let coarse = |cell: String| Error::ResolutionTooCoarse {
        place: v.to_string(),
        resolution: res,
        cell,
    };
    match v {
        Place::Infinite => {
            let cells = real_cells(data)
                .into_par_iter()
                .map(|(id, rep, other)| {
                    let values = eval(&rep)?;
                    if eval(&other)? != values {
                        return Err(coarse(id));
                    }
                    Ok(ScanCell {
                        id,
                        representative: rep,
                        values,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (cells, insoluble) = split(cells);
            Ok(PlaceScan {
                place: v,
                resolution: res,
                cells,
                skipped: Vec::new(),
                insoluble,
            })
        }
        Place::Finite(p) => {
            let all = balls(data, p, res)?;
            let (mut kept, mut skipped) = (Vec::new(), Vec::new());
            for ball in all {
                let mut hit = false;
                for e in &data.e {
                    hit |= ball.contains(e, p)?;
                }
                if hit {
                    skipped.push(ball.label(p));
                } else {
                    kept.push(ball);
                }
            }
            // A ball whose invariants move one digit deeper is split into its `p`
            // children, at most `MAX_REFINEMENT` times.
            let mut cells = Vec::new();
            let mut depth = 0;
            while !kept.is_empty() {
                let checked = kept
                    .into_par_iter()
                    .map(|ball| {
                        let values = eval(&ball.centre)?;
                        for j in 1..p {
                            if eval(&ball.child(p, j))? != values {
                                return Ok(Err(ball));
                            }
                        }
                        Ok(Ok(ScanCell {
                            id: ball.label(p),
                            representative: ball.centre,
                            values,
                        }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                kept = Vec::new();
                for c in checked {
                    match c {
                        Ok(cell) => cells.push(cell),
                        Err(ball) if depth >= MAX_REFINEMENT => return Err(coarse(ball.label(p))),
                        Err(ball) => {
                            for j in 0..p {
                                let child = Ball {
                                    centre: ball.child(p, j),
                                    radius: ball.radius + 1,
                                };
                                let mut hit = false;
                                for e in &data.e {
                                    hit |= child.contains(e, p)?;
                                }
                                if hit {
                                    skipped.push(child.label(p));
                                } else {
                                    kept.push(child);
                                }
                            }
                        }
                    }
                }
                depth += 1;
            }
            let (cells, insoluble) = split(cells);
            Ok(PlaceScan {
                place: v,
                resolution: res,
                cells,
                skipped,
                insoluble,
            })
        }
    }
}

/// Steps a mixed-radix counter; false once it wraps around.
fn advance<T>(idx: &mut [usize], radices: &[Vec<T>]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < radices[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Tabulates, over the support, which cell combinations pair to zero with every
/// generator of `Br X / Br Q`. `resolution` overrides the per-prime default.
pub fn obstruction_scan(
    data: &ConicBundleData,
    support: &BTreeSet<Place>,
    resolution: Option<u32>,
) -> Result<ObstructionTable> {
    let gens = data.brauer_group()?.quotient_basis;
    let places = support
        .iter()
        .map(|&v| scan_place(data, &gens, v, resolution.map_or(resolution_for(v), |r| if v.is_infinite() { 0 } else { r })))
        .collect::<Result<Vec<_>>>()?;

    // Per place: distinct invariant patterns and how many cells realize each.
    let patterns: Vec<Vec<(Vec<bool>, u128)>> = places
        .iter()
        .map(|ps| {
            let mut m: BTreeMap<Vec<bool>, u128> = BTreeMap::new();
            for c in &ps.cells {
                *m.entry(c.values.clone()).or_insert(0) += 1;
            }
            m.into_iter().collect()
        })
        .collect();
    let mut rows = Vec::new();
    let mut idx = vec![0usize; places.len()];
    let (mut total, mut excluded) = (0u128, 0u128);
    if patterns.iter().all(|p| !p.is_empty()) {
        loop {
            let mut sum = vec![false; gens.len()];
            let mut count = 1u128;
            let mut pattern = BTreeMap::new();
            for (k, ps) in places.iter().enumerate() {
                let (vals, c) = &patterns[k][idx[k]];
                for (s, &b) in sum.iter_mut().zip(vals) {
                    *s ^= b;
                }
                count = count.saturating_mul(*c);
                pattern.insert(ps.place, format_f2(vals));
            }
            let allowed = sum.iter().all(|&b| !b);
            total = total.saturating_add(count);
            if !allowed {
                excluded = excluded.saturating_add(count);
            }
            rows.push(CombinationRow {
                pattern,
                cell_count: count,
                allowed,
            });
            if !advance(&mut idx, &patterns) {
                break;
            }
        }
    }
    let unsupported_bad_places = bad_places(data)?.into_iter().filter(|v| !support.contains(v)).collect();
    let insoluble_places = places.iter().filter(|ps| ps.cells.is_empty()).map(|ps| ps.place).collect();
    Ok(ObstructionTable {
        generators: gens.iter().map(|g| format_f2(&g.n)).collect(),
        places,
        rows,
        total_combinations: total,
        excluded_combinations: excluded,
        unsupported_bad_places,
        insoluble_places,
    })
}
