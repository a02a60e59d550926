mod common;

use std::collections::BTreeSet;

use common::{int, random_nonsquare, rat};
use conicpencil::brauermanin::{
    bad_places, contributing_places, fibre_soluble, global_invariants, local_invariant, obstruction_scan, pairing,
    AdelicFiberPoint,
};
use conicpencil::Error;
use conicpencil::exactnum::valuation;
use conicpencil::pencil::{BrauerElement, ConicBundleData};
use conicpencil::{Place, Rational, SquareClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pencil(rng: &mut ChaCha8Rng, r: usize) -> ConicBundleData {
    loop {
        let mut e: Vec<i64> = Vec::new();
        while e.len() < r {
            let x = rng.gen_range(-8..=8);
            if !e.contains(&x) {
                e.push(x);
            }
        }
        let mut a: Vec<i64> = (0..r - 1).map(|_| random_nonsquare(rng, 15)).collect();
        let class = a.iter().fold(SquareClass::trivial(), |c, &x| c.mul(&SquareClass::from_i64(x).unwrap()));
        let Some(last) = class.representative_i64() else { continue };
        if last == 1 {
            continue;
        }
        a.push(last);
        let e: Vec<Rational> = e.into_iter().map(int).collect();
        let a: Vec<Rational> = a.into_iter().map(int).collect();
        return ConicBundleData::from_rationals(e, &a).unwrap();
    }
}

fn random_t(rng: &mut ChaCha8Rng, data: &ConicBundleData) -> Rational {
    loop {
        let t = rat(rng.gen_range(-200..=200), rng.gen_range(1..=30));
        if !data.e.contains(&t) {
            return t;
        }
    }
}

/// Generators of the quotient together with `(1, …, 1)`.
fn elements(data: &ConicBundleData) -> Vec<BrauerElement> {
    let mut out = data.brauer_group().unwrap().quotient_basis;
    out.push(BrauerElement::new(data, vec![true; data.r()]).unwrap());
    out
}

#[test]
fn invariants_of_global_parameters_sum_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let r = rng.gen_range(2..=5);
        let data = random_pencil(&mut rng, r);
        for n in elements(&data) {
            for _ in 0..10 {
                let t = random_t(&mut rng, &data);
                let mut total = false;
                for v in contributing_places(&data, &t).unwrap() {
                    total ^= local_invariant(&data, &n, &t, v).unwrap();
                }
                assert!(!total);
                assert!(!global_invariants(&data, &n, &t).unwrap().total());
                for p in [101u64, 103, 107] {
                    if !contributing_places(&data, &t).unwrap().contains(&Place::Finite(p)) {
                        assert!(!local_invariant(&data, &n, &t, Place::Finite(p)).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn local_invariant_is_linear_in_the_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..30 {
        let data = random_pencil(&mut rng, 4);
        let kernel = data.brauer_group().unwrap().kernel_basis;
        for x in &kernel {
            for y in &kernel {
                let (nx, ny) = (BrauerElement { n: x.clone() }, BrauerElement { n: y.clone() });
                let sum = nx.add(&ny);
                let t = random_t(&mut rng, &data);
                for v in [Place::Infinite, Place::Finite(2), Place::Finite(3), Place::Finite(5)] {
                    assert_eq!(
                        local_invariant(&data, &sum, &t, v).unwrap(),
                        local_invariant(&data, &nx, &t, v).unwrap() ^ local_invariant(&data, &ny, &t, v).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn local_invariant_is_constant_on_small_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..30 {
        let data = random_pencil(&mut rng, 4);
        let elems = elements(&data);
        for p in [2u64, 3, 5, 7] {
            let t = random_t(&mut rng, &data);
            let deepest = data.e.iter().map(|e| valuation(&(&t - e), p).unwrap()).max().unwrap();
            // Each (t' − e_i)/(t − e_i) lies in 1 + p³Z_p.
            let k = deepest + 3;
            let step = if k >= 0 {
                Rational::from_integer(num_traits::pow(conicpencil::Integer::from(p), k as usize))
            } else {
                Rational::new(1.into(), num_traits::pow(conicpencil::Integer::from(p), (-k) as usize))
            };
            let moved = &t + step * int(rng.gen_range(-50..=50));
            for n in &elems {
                assert_eq!(
                    local_invariant(&data, n, &t, Place::Finite(p)).unwrap(),
                    local_invariant(&data, n, &moved, Place::Finite(p)).unwrap()
                );
            }
        }
    }
}

#[test]
fn all_ones_pairs_to_zero_at_every_adelic_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut rejected = 0;
    for _ in 0..20 {
        let data = random_pencil(&mut rng, 4);
        let ones = BrauerElement::new(&data, vec![true; 4]).unwrap();
        let mut point = AdelicFiberPoint::default();
        let mut insoluble = AdelicFiberPoint::default();
        for v in bad_places(&data).unwrap() {
            let (good, bad) = loop {
                let t = random_t(&mut rng, &data);
                if fibre_soluble(&data, &t, v).unwrap() {
                    break (t, None);
                }
                // Keep one insoluble local parameter to check it is refused.
                let good = loop {
                    let u = random_t(&mut rng, &data);
                    if fibre_soluble(&data, &u, v).unwrap() {
                        break u;
                    }
                };
                break (good, Some(t));
            };
            point.set(v, good.clone(), None);
            insoluble.set(v, bad.unwrap_or(good), None);
        }
        assert!(!pairing(&data, &point, &ones).unwrap());
        if insoluble != point {
            assert!(matches!(pairing(&data, &insoluble, &ones), Err(Error::InsolubleFibre { .. })));
            rejected += 1;
        }
    }
    assert!(rejected > 0);
}

fn chatelet() -> ConicBundleData {
    ConicBundleData::from_rationals((0..4).map(int).collect(), &[int(5), int(5), int(5), int(5)]).unwrap()
}

#[test]
fn excluded_count_is_invariant_under_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let mut cases = vec![chatelet()];
    while cases.len() < 4 {
        let d = random_pencil(&mut rng, 4);
        if d.brauer_group().unwrap().quotient_rank > 0 {
            cases.push(d);
        }
    }
    for data in cases {
        let support: BTreeSet<Place> = bad_places(&data).unwrap().into_iter().filter(|v| match v {
            Place::Finite(p) => *p <= 7,
            Place::Infinite => true,
        }).collect();
        let base = obstruction_scan(&data, &support, Some(2)).unwrap();
        for perm in [[1usize, 0, 2, 3], [3, 2, 1, 0], [2, 0, 3, 1]] {
            let e: Vec<Rational> = perm.iter().map(|&i| data.e[i].clone()).collect();
            let a: Vec<SquareClass> = perm.iter().map(|&i| data.a[i].clone()).collect();
            let moved = obstruction_scan(&ConicBundleData::new(e, a), &support, Some(2)).unwrap();
            assert_eq!(moved.total_combinations, base.total_combinations);
            assert_eq!(moved.excluded_combinations, base.excluded_combinations);
        }
    }
}

#[test]
fn rows_of_global_points_are_allowed() {
    // The cells containing a global t must form an allowed combination.
    let data = chatelet();
    let support = bad_places(&data).unwrap();
    let table = obstruction_scan(&data, &support, None).unwrap();
    let gens = data.brauer_group().unwrap().quotient_basis;
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let mut checked = 0;
    while checked < 20 {
        let t = random_t(&mut rng, &data);
        let places = contributing_places(&data, &t).unwrap();
        if !places.is_subset(&support) || !support.iter().all(|&v| fibre_soluble(&data, &t, v).unwrap()) {
            continue;
        }
        checked += 1;
        let pattern: Vec<String> = support
            .iter()
            .map(|&v| gens.iter().map(|g| if local_invariant(&data, g, &t, v).unwrap() { '1' } else { '0' }).collect())
            .collect();
        let row = table
            .rows
            .iter()
            .find(|r| r.pattern.values().cloned().collect::<Vec<_>>() == pattern)
            .expect("pattern realized by some cell");
        assert!(row.allowed);
    }
}
