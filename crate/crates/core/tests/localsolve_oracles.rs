mod common;

use common::{int, random_system, residue_search, Residues};
use conicpencil::exactnum::{factorize, is_prime};
use conicpencil::localsolve::{
    default_depth, diagonal_quadric_soluble, everywhere_locally_soluble, lift_witness, padic_soluble, real_soluble,
    LocalWitness,
};
use conicpencil::pencil::NormFormSystem;
use conicpencil::{Integer, Place, Rational, SquareClass};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn witnesses_survive_one_more_digit() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut lifted = 0;
    for _ in 0..40 {
        let r = rng.gen_range(1..=3);
        let sys = random_system(&mut rng, r, 12, 4);
        for p in [2u64, 3, 5, 7, 11, 13] {
            let v = padic_soluble(&sys, p, default_depth(&sys, p)).unwrap();
            if let Some(w) = &v.witness {
                let next = lift_witness(&sys, w).unwrap();
                assert!(next.soluble, "{sys:?} at {p}: {w:?}");
                lifted += 1;
            }
        }
    }
    assert!(lifted > 100);
}

fn coefficient_primes(sys: &NormFormSystem) -> Vec<u64> {
    let mut out = vec![2];
    for &a in sys.a() {
        out.extend(factorize(&Integer::from(a)).unwrap().into_keys());
    }
    for f in sys.forms() {
        for &c in f {
            if c != 0 {
                out.extend(factorize(&Integer::from(c)).unwrap().into_keys());
            }
        }
    }
    out
}

#[test]
fn good_primes_beyond_the_bound_are_soluble() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 20 {
        let r = rng.gen_range(1..=3);
        let sys = random_system(&mut rng, r, 30, 9);
        let bad = coefficient_primes(&sys);
        let p = loop {
            let p = rng.gen_range(101u64..400);
            if is_prime(p) && !bad.contains(&p) {
                break p;
            }
        };
        let v = padic_soluble(&sys, p, default_depth(&sys, p)).unwrap();
        assert!(v.soluble, "{sys:?} at {p}");
        checked += 1;
    }
}

fn sign_condition(sys: &NormFormSystem, u: &[Rational]) -> bool {
    (0..sys.r()).all(|i| {
        let v = sys.eval_rational(i, u);
        if sys.a()[i] < 0 {
            v.is_positive()
        } else {
            !v.is_zero()
        }
    })
}

#[test]
fn real_solubility_agrees_with_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let r = rng.gen_range(1..=4);
        let sys = random_system(&mut rng, r, 6, 3);
        let verdict = real_soluble(&sys);
        let sampled = (0..4000).any(|_| {
            let u: Vec<Rational> = (0..sys.s()).map(|_| Rational::new(rng.gen_range(-1000i64..=1000).into(), 1000.into())).collect();
            sign_condition(&sys, &u)
        });
        assert_eq!(verdict.soluble, sampled, "{sys:?}");
        if let Some(LocalWitness::Real { u }) = &verdict.witness {
            assert!(sign_condition(&sys, u));
        }
    }
}

fn reduce_at(mut n: i128, p: i128) -> i128 {
    while n % (p * p) == 0 {
        n /= p * p;
    }
    n
}

/// Isotropy of `Σ c_i x_i²` over `Q_p` from a primitive zero mod `p^{2e+1}`,
/// `e = val_p(2) + 1`, after scaling each `c_i` to valuation at most one.
fn brute_isotropic(c: [i64; 4], p: u64) -> bool {
    let pp = p as i128;
    let c = c.map(|x| reduce_at(x as i128, pp));
    let e = if p == 2 { 2 } else { 1 };
    let m = pp.pow(2 * e + 1);
    // For each pair of variables: values reached, and values reached by a primitive pair.
    let half = |c1: i128, c2: i128| {
        let mut all = vec![false; m as usize];
        let mut prim = vec![false; m as usize];
        for x in 0..m {
            for y in 0..m {
                let v = (c1 * x * x + c2 * y * y).rem_euclid(m) as usize;
                all[v] = true;
                if x % pp != 0 || y % pp != 0 {
                    prim[v] = true;
                }
            }
        }
        (all, prim)
    };
    let (all1, prim1) = half(c[0], c[1]);
    let (all2, prim2) = half(c[2], c[3]);
    (0..m as usize).any(|v| {
        let w = ((m as usize) - v) % m as usize;
        (prim1[v] && all2[w]) || (all1[v] && prim2[w])
    })
}

#[test]
fn quaternary_forms_agree_with_residue_search_and_reciprocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut insoluble_somewhere = 0;
    let mut square_discriminants = 0;
    for i in 0..50 {
        // Coefficients with prime factors at most 13 keep the residue search small.
        let mut c: [i64; 4] = std::array::from_fn(|_| loop {
            let x = rng.gen_range(-30i64..=30);
            if x != 0 && factorize(&Integer::from(x)).unwrap().keys().all(|&p| p <= 13) {
                break x;
            }
        });
        if i % 2 == 0 {
            // Make the discriminant a square.
            let d = SquareClass::from_i64(c[0] * c[1] * c[2]).unwrap();
            c[3] = d.representative_i64().unwrap();
        }
        let coeffs = c.map(int);
        let mut places = vec![Place::Infinite, Place::Finite(2)];
        for &x in &c {
            places.extend(factorize(&Integer::from(x)).unwrap().into_keys().map(Place::Finite));
        }
        places.sort();
        places.dedup();
        let mut bad = 0;
        for &v in &places {
            let got = diagonal_quadric_soluble(&coeffs, v).unwrap();
            let expected = match v {
                Place::Infinite => c.iter().any(|&x| x > 0) && c.iter().any(|&x| x < 0),
                Place::Finite(p) => brute_isotropic(c, p),
            };
            assert_eq!(got, expected, "{c:?} at {v}");
            bad += usize::from(!got);
        }
        // Good primes never obstruct.
        for p in [31u64, 37, 41] {
            assert!(diagonal_quadric_soluble(&coeffs, Place::Finite(p)).unwrap());
        }
        // With square discriminant, anisotropy at v means the Hasse invariant differs
        // from (−1, −1)_v; reciprocity for both makes the count even.
        if SquareClass::from_i64(c.iter().product()).unwrap().is_trivial() {
            assert_eq!(bad % 2, 0, "{c:?}");
            square_discriminants += 1;
        }
        insoluble_somewhere += usize::from(bad > 0);
    }
    assert!(insoluble_somewhere > 0);
    assert!(square_discriminants >= 25);
}

#[test]
fn report_covers_infinity_small_primes_and_bad_primes() {
    let sys = NormFormSystem::new(vec![-1, 202], vec![vec![1, 0], vec![3, 7]]).unwrap();
    let report = everywhere_locally_soluble(&sys, 20, None).unwrap();
    let places: Vec<Place> = report.verdicts.iter().map(|v| v.place).collect();
    assert_eq!(places[0], Place::Infinite);
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 101] {
        assert!(places.contains(&Place::Finite(p)), "{p}");
    }
    assert!(places.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(report.soluble, report.bad_places.is_empty());
}

#[test]
fn padic_verdicts_match_residue_search_including_insoluble_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut insoluble = 0;
    for _ in 0..80 {
        let sys = random_system(&mut rng, 6, 3, 2);
        for (p, k) in [(2u64, 4u32), (3, 4), (5, 3), (7, 3)] {
            let v = padic_soluble(&sys, p, default_depth(&sys, p)).unwrap();
            let expected = match residue_search(&sys, p, k) {
                Residues::Soluble => true,
                Residues::Insoluble => false,
                Residues::Undecided => panic!("{sys:?} undecided at {p}"),
            };
            assert_eq!(v.soluble, expected, "{sys:?} at {p}");
            insoluble += usize::from(!expected);
        }
    }
    assert!(insoluble >= 5, "{insoluble}");
}
