mod common;

use common::{brute_rho, definite_solutions, int, rat};
use conicpencil::counting::{
    beta_infinity, beta_p, enumerate_n, g_count, predict_and_compare, BetaMethod, CountJob, CountOptions,
    IndefiniteFactor, DEFAULT_RESIDUE_CAP,
};
use conicpencil::pencil::NormFormSystem;
use conicpencil::quadform::BinaryForm;
use conicpencil::{Integer, Rational};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn job(a: Vec<i64>, f: Vec<Vec<i64>>, modulus: u64, u_mod: Vec<i64>, u_inf: Vec<Rational>, eps: Rational) -> CountJob {
    let sys = NormFormSystem::new(a, f).unwrap();
    CountJob::new(sys, modulus, u_mod, u_inf, eps, vec![]).unwrap()
}

fn orbit_count(a: i64, n: i64) -> u64 {
    if n == 0 || (a < 0 && n < 0) {
        return 0;
    }
    if a < 0 {
        let w = if a == -1 { 4 } else { 2 };
        definite_solutions(a, n).len() as u64 / w
    } else {
        BinaryForm::new(a).unwrap().representation_count(n).unwrap()
    }
}

/// `N(B)` straight from the definition, for `s = 2`.
fn brute_n(job: &CountJob, b: u64) -> u64 {
    let b_r = int(b as i64);
    let radius = &job.epsilon * &b_r;
    let centre: Vec<Rational> = job.u_inf.iter().map(|x| x * &b_r).collect();
    let lo = |j: usize| (&centre[j] - &radius).floor().to_integer().to_i64().unwrap();
    let hi = |j: usize| (&centre[j] + &radius).ceil().to_integer().to_i64().unwrap();
    let m = job.modulus as i64;
    let mut total = 0;
    for u1 in lo(0)..=hi(0) {
        for u2 in lo(1)..=hi(1) {
            let u = [u1, u2];
            let inside = (0..2).all(|j| (int(u[j]) - &centre[j]).abs() < radius);
            let congruent = (0..2).all(|j| (u[j] - job.u_mod[j]).rem_euclid(m) == 0);
            if inside && congruent {
                total += (0..job.system.r())
                    .map(|i| orbit_count(job.system.a()[i], job.system.eval(i, &u) as i64))
                    .product::<u64>();
            }
        }
    }
    total
}

fn random_job(rng: &mut ChaCha8Rng) -> CountJob {
    loop {
        let r = rng.gen_range(1..=2);
        let a: Vec<i64> = (0..r).map(|_| [-1i64, -2, -5, 2, 3, 6][rng.gen_range(0..6)]).collect();
        let f: Vec<Vec<i64>> = (0..r).map(|_| vec![rng.gen_range(-3..=3), rng.gen_range(-3..=3)]).collect();
        let Ok(sys) = NormFormSystem::new(a, f) else { continue };
        let u_inf = vec![rat(rng.gen_range(-4..=4), 4), rat(rng.gen_range(-4..=4), 4)];
        if let Ok(j) = CountJob::new(sys, 1, vec![0, 0], u_inf, rat(1, 4), vec![]) {
            return j;
        }
    }
}

#[test]
fn enumeration_matches_the_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let j = random_job(&mut rng);
        for b in [4u64, 16, 36] {
            assert_eq!(enumerate_n(&j, b).unwrap(), Integer::from(brute_n(&j, b)), "{j:?} at B = {b}");
        }
    }
    let with_modulus = job(vec![-1, 3], vec![vec![1, 0], vec![0, 1]], 12, vec![1, 1], vec![int(1), int(1)], rat(1, 2));
    for b in [1u64, 169, 625] {
        assert_eq!(enumerate_n(&with_modulus, b).unwrap(), Integer::from(brute_n(&with_modulus, b)));
    }
}

#[test]
fn enumeration_is_monotone_in_the_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let j = random_job(&mut rng);
        let mut prev = Integer::from(0);
        for eps in [rat(1, 8), rat(1, 4), rat(1, 3), rat(1, 2)] {
            let mut wider = j.clone();
            wider.epsilon = eps;
            let n = enumerate_n(&wider, 64).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }
}

/// `G(p^k)` from its definition with brute-force local densities.
fn brute_g(job: &CountJob, p: u64, k: u32) -> u64 {
    let q = p.pow(k) as i64;
    let m = job.modulus as i64;
    let mut total = 0;
    for t1 in 0..q {
        for t2 in 0..q {
            let u = [job.u_mod[0] + m * t1, job.u_mod[1] + m * t2];
            total += (0..job.system.r())
                .map(|i| brute_rho(job.system.a()[i], q as u64, job.system.eval(i, &u) as i64))
                .product::<u64>();
        }
    }
    total
}

#[test]
fn local_counts_match_the_definition_and_stabilize() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let opts = CountOptions {
        unit_minor_shortcut: false,
        ..CountOptions::default()
    };
    for _ in 0..15 {
        let j = random_job(&mut rng);
        for (p, k) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1)] {
            assert_eq!(g_count(&j, p, k, DEFAULT_RESIDUE_CAP).unwrap(), Integer::from(brute_g(&j, p, k)));
        }
        let sr = (j.system.s() + j.system.r()) as u32;
        for p in [3u64, 5, 7] {
            let b = beta_p(&j, p, &opts).unwrap();
            if let BetaMethod::Stabilized { k } = b.method {
                // One level past the detected stabilization still scales exactly.
                let g0 = g_count(&j, p, k, DEFAULT_RESIDUE_CAP).unwrap();
                let g2 = g_count(&j, p, k + 2, DEFAULT_RESIDUE_CAP).unwrap();
                assert_eq!(g2, &g0 * Integer::from(p).pow(2 * sr));
                assert_eq!(b.value, Rational::new(g0, Integer::from(p).pow(k * sr)));
            }
        }
    }
}

#[test]
fn unit_minor_shortcut_agrees_with_stabilization() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let plain = CountOptions {
        unit_minor_shortcut: false,
        ..CountOptions::default()
    };
    let mut compared = 0;
    for _ in 0..15 {
        let j = random_job(&mut rng);
        for p in [3u64, 5, 7, 11] {
            let fast = beta_p(&j, p, &CountOptions::default()).unwrap();
            if fast.method == BetaMethod::UnitMinor {
                assert_eq!(beta_p(&j, p, &plain).unwrap().value, fast.value, "{j:?} at {p}");
                compared += 1;
            }
        }
    }
    assert!(compared > 10);
}

#[test]
fn rescaling_maps_solutions_to_solutions() {
    // x² + y² = u₁, x² − 3y² = u₂ with u ≡ (1, 1) mod 12; C = 13 ≡ 1 mod 12.
    let j = job(vec![-1, 3], vec![vec![1, 0], vec![0, 1]], 12, vec![1, 1], vec![int(1), int(1)], rat(1, 2));
    let (b, c) = (169i64, 13i64);
    let mut witnesses = 0;
    for u1 in (b / 2 + 1..3 * b / 2).filter(|u| (u - 1) % 12 == 0) {
        for u2 in (b / 2 + 1..3 * b / 2).filter(|u| (u - 1) % 12 == 0) {
            let (Some(s1), Some(s2)) = (solution(-1, u1), solution(3, u2)) else { continue };
            let scaled_u = [c * c * u1, c * c * u2];
            let big_b = c * c * b;
            for (j_idx, &(x, y), a) in [(0usize, &s1, -1i64), (1, &s2, 3)] {
                let (cx, cy) = (c * x, c * y);
                assert_eq!(cx * cx - a * cy * cy, scaled_u[j_idx]);
                assert_eq!((scaled_u[j_idx] - 1).rem_euclid(12), 0);
                assert!(2 * (scaled_u[j_idx] - big_b).abs() < big_b);
            }
            witnesses += 1;
        }
    }
    assert!(witnesses > 3);
    assert!(enumerate_n(&j, b as u64).unwrap() > Integer::from(0));
}

fn solution(a: i64, n: i64) -> Option<(i64, i64)> {
    (0..=n).find_map(|y| {
        let x2 = n + a * y * y;
        let x = (x2.max(0) as f64).sqrt().round() as i64;
        (x2 >= 0 && x * x == x2).then_some((x, y))
    })
}

#[test]
fn prediction_is_invariant_under_permutation() {
    let mut base = job(vec![-1, 2], vec![vec![1, 0], vec![0, 1]], 1, vec![0, 0], vec![int(1), int(1)], rat(1, 2));
    base.schedule = vec![36, 100];
    let swapped = base.permuted(&[1, 0]).unwrap();
    let opts = CountOptions {
        prime_cutoff: 30,
        ..CountOptions::default()
    };
    let p = predict_and_compare::<f64>(&base, &opts).unwrap();
    let q = predict_and_compare::<f64>(&swapped, &opts).unwrap();
    assert_eq!(p.euler_product, q.euler_product);
    for (x, y) in p.reports.iter().zip(&q.reports) {
        assert_eq!(x.empirical, y.empirical);
        assert!((x.predicted.value - y.predicted.value).abs() <= 1e-9 * x.predicted.value);
    }
}

/// For `a = 3` the fundamental unit `2 + √3` has norm +1 and is the automorph generator,
/// so the two normalizations of the indefinite factor differ by 2; the count decides.
#[test]
fn indefinite_normalization_is_fixed_by_the_count() {
    let mut j = job(vec![3], vec![vec![1, 0]], 1, vec![0, 0], vec![int(1), int(0)], rat(1, 2));
    j.schedule = vec![1024];
    let opts = CountOptions {
        prime_cutoff: 50,
        ..CountOptions::default()
    };
    let pred = predict_and_compare::<f64>(&j, &opts).unwrap();
    let ratio = pred.reports[0].ratio.unwrap();
    assert!((ratio - 1.0).abs() < 0.07, "automorph generator ratio {ratio}");
    let euler = pred.euler_product.to_f64().unwrap();
    let field: f64 = beta_infinity(&j, 1024, IndefiniteFactor::FieldUnit).unwrap();
    let field_ratio = pred.reports[0].empirical.to_f64().unwrap() / (field * euler);
    assert!((field_ratio - 0.5).abs() < 0.04, "field unit ratio {field_ratio}");
}
