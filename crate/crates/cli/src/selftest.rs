//! Built-in oracle suite: Hilbert reciprocity, CRT multiplicativity of local
//! densities, stabilization of `G(p^k)`, and the quartic discriminant against gcds.

use conicpencil::counting::{g_count, CountJob, DEFAULT_RESIDUE_CAP};
use conicpencil::delpezzo::{quartic_discriminant, Quartic};
use conicpencil::exactnum::{factorize, hilbert_int, Place};
use conicpencil::pencil::NormFormSystem;
use conicpencil::quadform::{rho, BinaryForm};
use conicpencil::{Integer, Rational, RationalPoly};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Deliberate corruption used to check that the suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Flip every Hilbert symbol at the prime 2.
    Hilbert,
}

pub struct Config {
    pub quick: bool,
    pub seed: u64,
    pub fault: Option<Fault>,
}

struct Case {
    name: &'static str,
    passed: usize,
    failed: usize,
    /// The first few failing inputs.
    samples: Vec<String>,
}

impl Case {
    fn new(name: &'static str) -> Self {
        Case {
            name,
            passed: 0,
            failed: 0,
            samples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.samples.len() < 10 {
                self.samples.push(what());
            }
        }
    }
}

fn symbol(a: i128, b: i128, v: Place, fault: Option<Fault>) -> i8 {
    let s = hilbert_int(a, b, v);
    match (fault, v) {
        (Some(Fault::Hilbert), Place::Finite(2)) => -s,
        _ => s,
    }
}

fn reciprocity(rng: &mut ChaCha8Rng, n: usize, fault: Option<Fault>) -> Case {
    let mut case = Case::new("hilbert-reciprocity");
    for _ in 0..n {
        let pick = |rng: &mut ChaCha8Rng| loop {
            let x: i64 = rng.gen_range(-10_000..=10_000);
            if x != 0 {
                break x;
            }
        };
        let (a, b) = (pick(rng), pick(rng));
        let mut places = vec![Place::Infinite, Place::Finite(2)];
        for x in [a, b] {
            let f = factorize(&Integer::from(x)).expect("small integers factor");
            places.extend(f.into_keys().filter(|&p| p != 2).map(Place::Finite));
        }
        places.sort();
        places.dedup();
        let product: i8 = places.iter().map(|&v| symbol(a as i128, b as i128, v, fault)).product();
        case.record(product == 1, || format!("({a}, {b})"));
    }
    case
}

fn crt(rng: &mut ChaCha8Rng, n: usize) -> Case {
    let mut case = Case::new("density-crt");
    let forms = [-1i64, -2, -5, 2, 3, 7];
    for _ in 0..n {
        let a = forms[rng.gen_range(0..forms.len())];
        let form = BinaryForm::new(a).expect("nonsquare");
        let (q1, q2) = loop {
            let q1: u64 = rng.gen_range(2..60);
            let q2: u64 = rng.gen_range(2..60);
            if num_integer::gcd(q1, q2) == 1 {
                break (q1, q2);
            }
        };
        let big_a = Integer::from(rng.gen_range(-500i64..500));
        let lhs = rho(&form, q1 * q2, &big_a).expect("valid modulus");
        let rhs = rho(&form, q1, &big_a).expect("valid modulus") * rho(&form, q2, &big_a).expect("valid modulus");
        case.record(lhs == rhs, || format!("a = {a}, q = {q1}·{q2}, A = {big_a}"));
    }
    case
}

fn stabilization(primes: &[u64]) -> Case {
    let mut case = Case::new("g-stabilization");
    let system = NormFormSystem::new(vec![-1], vec![vec![1, 0]]).expect("valid system");
    let job = CountJob::new(
        system,
        1,
        vec![0, 0],
        vec![Rational::one(), Rational::zero()],
        Rational::new(1.into(), 2.into()),
        vec![],
    )
    .expect("valid job");
    for &p in primes {
        let k = if p == 2 { 3 } else { 1 };
        let g0 = g_count(&job, p, k, DEFAULT_RESIDUE_CAP).expect("within cap");
        let g1 = g_count(&job, p, k + 1, DEFAULT_RESIDUE_CAP).expect("within cap");
        case.record(g1 == g0 * Integer::from(p).pow(3), || format!("p = {p}"));
    }
    case
}

/// A binary quartic has a repeated root iff its polynomial has one or it loses two degrees.
fn repeated_root(q: &RationalPoly) -> bool {
    match q.degree() {
        None => true,
        Some(d) if d <= 2 => true,
        Some(_) => q.gcd(&q.derivative()).degree().is_some_and(|d| d > 0),
    }
}

fn discriminants(rng: &mut ChaCha8Rng, n: usize) -> Case {
    let mut case = Case::new("quartic-discriminant");
    for i in 0..n {
        let p: [Rational; 5] = if i % 3 == 0 {
            // Force a square factor.
            let r: i64 = rng.gen_range(-3..=3);
            let lin = RationalPoly::new(vec![Rational::from_integer((-r).into()), Rational::one()]);
            let rest = RationalPoly::new((0..3).map(|_| Rational::from_integer(rng.gen_range(-3i64..=3).into())).collect());
            Quartic::from_poly(&(&(&lin * &lin) * &rest)).p
        } else {
            std::array::from_fn(|_| Rational::from_integer(rng.gen_range(-4i64..=4).into()))
        };
        let q = Quartic::new(p);
        let zero = quartic_discriminant(&q).is_zero();
        case.record(zero == repeated_root(&q.to_poly()), || format!("{:?}", q.p));
    }
    case
}

pub fn run(cfg: &Config) -> (bool, Value) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = if cfg.quick { 1 } else { 5 };
    let primes: &[u64] = if cfg.quick { &[2, 3, 5] } else { &[2, 3, 5, 7, 11, 13] };
    let cases = [
        reciprocity(&mut rng, 100 * scale, cfg.fault),
        crt(&mut rng, 20 * scale),
        stabilization(primes),
        discriminants(&mut rng, 40 * scale),
    ];
    let ok = cases.iter().all(|c| c.failed == 0);
    let rendered: Vec<Value> = cases
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed,
                "failed": c.failed,
                "failures": c.samples,
            })
        })
        .collect();
    (
        ok,
        json!({
            "all_passed": ok,
            "quick": cfg.quick,
            "seed": cfg.seed,
            "cases": rendered,
        }),
    )
}
