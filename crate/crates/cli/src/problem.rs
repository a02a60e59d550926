//! Problem files: TOML with a `kind`, one payload table named after the kind, and
//! an optional `[options]` table. Rationals are integers or `"num/den"` strings.

use std::fmt;

use conicpencil::counting::CountJob;
use conicpencil::delpezzo::{Dp1Data, Dp2Data, SplitPolynomial};
use conicpencil::exactnum::{format_rational, parse_rational};
use conicpencil::pencil::{quadric_intersection_system, ConicBundleData, NormFormSystem, QuadricIntersection};
use conicpencil::{Place, Rational};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub struct Rat(pub Rational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"num/den\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

fn rationals(v: &[Rat]) -> Vec<Rational> {
    v.iter().map(|r| r.0.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Pencil,
    System,
    CountJob,
    Dp2,
    Dp1,
    QuadricIntersection,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Pencil => "pencil",
            Kind::System => "system",
            Kind::CountJob => "count-job",
            Kind::Dp2 => "dp2",
            Kind::Dp1 => "dp1",
            Kind::QuadricIntersection => "quadric-intersection",
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PencilPayload {
    pub e: Vec<Rat>,
    pub a: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Rat>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemPayload {
    pub a: Vec<i64>,
    pub f: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CountJobPayload {
    pub a: Vec<i64>,
    pub f: Vec<Vec<i64>>,
    #[serde(default = "one")]
    pub modulus: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_mod: Option<Vec<i64>>,
    pub u_inf: Vec<Rat>,
    pub epsilon: Rat,
    pub schedule: Vec<u64>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SplitPayload {
    pub leading: Rat,
    pub roots: Vec<Rat>,
}

impl SplitPayload {
    fn build(&self) -> conicpencil::Result<SplitPolynomial> {
        SplitPolynomial::new(self.leading.0.clone(), rationals(&self.roots))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Dp2Payload {
    pub f: SplitPayload,
    pub g: SplitPayload,
    pub h: SplitPayload,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Dp1Payload {
    pub e: Vec<Rat>,
    pub c1: Rat,
    pub c2: Rat,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QuadricPayload {
    pub e: Vec<Rat>,
    pub a: Vec<Rat>,
    pub c: Vec<Rat>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_cutoff: Option<u64>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub prime_bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const PRIME_CUTOFF_RANGE: (u64, u64) = (2, 10_000);
pub const PRIME_BOUND_RANGE: (u64, u64) = (2, 10_000);
pub const DEPTH_RANGE: (u32, u32) = (1, 40);
pub const RESOLUTION_RANGE: (u32, u32) = (1, 8);
pub const EXTRA_K_RANGE: (u32, u32) = (1, 12);

fn in_range<T: PartialOrd + fmt::Display + Copy>(name: &str, v: Option<T>, (lo, hi): (T, T)) -> Result<(), String> {
    match v {
        Some(x) if x < lo || x > hi => Err(format!("option {name} = {x} outside [{lo}, {hi}]")),
        _ => Ok(()),
    }
}

impl Options {
    pub fn check(&self) -> Result<(), String> {
        in_range("prime_cutoff", self.prime_cutoff, PRIME_CUTOFF_RANGE)?;
        in_range("L", self.prime_bound, PRIME_BOUND_RANGE)?;
        in_range("depth", self.depth, DEPTH_RANGE)?;
        in_range("resolution", self.resolution, RESOLUTION_RANGE)?;
        in_range("extra_k", self.extra_k, EXTRA_K_RANGE)?;
        self.support_places()?;
        Ok(())
    }

    pub fn support_places(&self) -> Result<Option<Vec<Place>>, String> {
        self.support
            .as_ref()
            .map(|s| s.iter().map(|p| p.parse::<Place>().map_err(|e| e.to_string())).collect())
            .transpose()
    }

    /// Fields of `over` win.
    pub fn merged(&self, over: &Options) -> Options {
        Options {
            prime_cutoff: over.prime_cutoff.or(self.prime_cutoff),
            prime_bound: over.prime_bound.or(self.prime_bound),
            depth: over.depth.or(self.depth),
            resolution: over.resolution.or(self.resolution),
            extra_k: over.extra_k.or(self.extra_k),
            support: over.support.clone().or_else(|| self.support.clone()),
            seed: over.seed.or(self.seed),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemPayload>,
    #[serde(default, rename = "count-job", skip_serializing_if = "Option::is_none")]
    pub count_job: Option<CountJobPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dp2: Option<Dp2Payload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dp1: Option<Dp1Payload>,
    #[serde(default, rename = "quadric-intersection", skip_serializing_if = "Option::is_none")]
    pub quadric_intersection: Option<QuadricPayload>,
    #[serde(default)]
    pub options: Options,
}

/// The payload of a problem, resolved by kind.
pub enum Payload<'a> {
    Pencil(&'a PencilPayload),
    System(&'a SystemPayload),
    CountJob(&'a CountJobPayload),
    Dp2(&'a Dp2Payload),
    Dp1(&'a Dp1Payload),
    QuadricIntersection(&'a QuadricPayload),
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let file: ProblemFile = toml::from_str(text).map_err(|e| e.to_string())?;
        let present = [
            (Kind::Pencil, file.pencil.is_some()),
            (Kind::System, file.system.is_some()),
            (Kind::CountJob, file.count_job.is_some()),
            (Kind::Dp2, file.dp2.is_some()),
            (Kind::Dp1, file.dp1.is_some()),
            (Kind::QuadricIntersection, file.quadric_intersection.is_some()),
        ];
        for (kind, has) in present {
            if kind == file.kind && !has {
                return Err(format!("kind = \"{kind}\" requires a [{kind}] table"));
            }
            if kind != file.kind && has {
                return Err(format!("table [{kind}] does not match kind = \"{}\"", file.kind));
            }
        }
        file.options.check()?;
        Ok(file)
    }

    pub fn payload(&self) -> Payload<'_> {
        // `parse` guarantees the table for `kind` is present.
        match self.kind {
            Kind::Pencil => Payload::Pencil(self.pencil.as_ref().expect("checked at parse")),
            Kind::System => Payload::System(self.system.as_ref().expect("checked at parse")),
            Kind::CountJob => Payload::CountJob(self.count_job.as_ref().expect("checked at parse")),
            Kind::Dp2 => Payload::Dp2(self.dp2.as_ref().expect("checked at parse")),
            Kind::Dp1 => Payload::Dp1(self.dp1.as_ref().expect("checked at parse")),
            Kind::QuadricIntersection => {
                Payload::QuadricIntersection(self.quadric_intersection.as_ref().expect("checked at parse"))
            }
        }
    }
}

impl PencilPayload {
    pub fn build(&self) -> conicpencil::Result<ConicBundleData> {
        let data = ConicBundleData::from_rationals(rationals(&self.e), &rationals(&self.a))?;
        Ok(match &self.lambda {
            Some(l) => data.with_lambda(rationals(l)),
            None => data,
        })
    }
}

impl SystemPayload {
    pub fn build(&self) -> conicpencil::Result<NormFormSystem> {
        NormFormSystem::new(self.a.clone(), self.f.clone())
    }
}

impl CountJobPayload {
    pub fn build(&self) -> conicpencil::Result<CountJob> {
        let system = NormFormSystem::new(self.a.clone(), self.f.clone())?;
        let u_mod = self.u_mod.clone().unwrap_or_else(|| vec![0; system.s()]);
        CountJob::new(
            system,
            self.modulus,
            u_mod,
            rationals(&self.u_inf),
            self.epsilon.0.clone(),
            self.schedule.clone(),
        )
    }
}

impl Dp2Payload {
    pub fn build(&self) -> conicpencil::Result<Dp2Data> {
        Dp2Data::new(self.f.build()?, self.g.build()?, self.h.build()?)
    }
}

impl Dp1Payload {
    pub fn build(&self) -> conicpencil::Result<Dp1Data> {
        Dp1Data::new(rationals(&self.e), self.c1.0.clone(), self.c2.0.clone())
    }
}

impl QuadricPayload {
    pub fn build(&self) -> conicpencil::Result<QuadricIntersection> {
        quadric_intersection_system(&rationals(&self.e), &rationals(&self.a), &rationals(&self.c))
    }
}
