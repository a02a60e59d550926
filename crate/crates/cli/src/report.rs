//! JSON renderings of module results. Exact values are strings; floats travel with
//! their precision tag.

use conicpencil::brauermanin::ObstructionTable;
use conicpencil::counting::{BetaMethod, DensityReport, JobCheck, Prediction, TaggedFloat, Verdict};
use conicpencil::delpezzo::{Dp1Condition, Dp1Minimality, FghBundle, MinimalityReport, RamificationQuartic};
use conicpencil::exactnum::format_rational;
use conicpencil::localsolve::{LocalReport, LocalWitness};
use conicpencil::pencil::{format_f2, BrauerGroupDescription, ConicBundleData, NormFormSystem, QuadricIntersection, TorsorSystem, ValidationReport};
use conicpencil::{Integer, Place, Rational, SquareClass};
use serde_json::{json, Value};

pub const SCHEMA: &str = "conicpencil.report.v1";

pub fn rat(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn int(n: &Integer) -> Value {
    Value::String(n.to_string())
}

pub fn class(c: &SquareClass) -> Value {
    Value::String(c.representative().to_string())
}

pub fn place(v: Place) -> Value {
    Value::String(v.to_string())
}

fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn tagged(x: &TaggedFloat) -> Value {
    json!({
        "value": x.value,
        "precision_bits": x.precision_bits,
        "error_bound": x.error_bound,
    })
}

pub fn bundle(d: &ConicBundleData) -> Value {
    json!({
        "e": rats(&d.e),
        "a": d.a.iter().map(class).collect::<Vec<_>>(),
        "lambda": d.lambda.as_deref().map(rats),
    })
}

pub fn validation(v: &ValidationReport) -> Value {
    json!({
        "r": v.r,
        "faddeev_holds": v.faddeev_holds,
        "product_class": class(&v.product_class),
        "warnings": v.warnings,
    })
}

pub fn brauer(b: &BrauerGroupDescription) -> Value {
    json!({
        "kernel_basis": b.kernel_basis.iter().map(|v| format_f2(v)).collect::<Vec<_>>(),
        "kernel_dim": b.kernel_dim,
        "quotient_basis": b.quotient_basis.iter().map(|g| format_f2(&g.n)).collect::<Vec<_>>(),
        "quotient_rank": b.quotient_rank,
        "weak_approximation": b.weak_approximation,
    })
}

pub fn system(s: &NormFormSystem) -> Value {
    json!({ "a": s.a(), "f": s.forms() })
}

pub fn torsor(t: &TorsorSystem) -> Value {
    json!({
        "system": system(&t.system),
        "clearing": t.clearing.iter().map(int).collect::<Vec<_>>(),
    })
}

pub fn local(r: &LocalReport) -> Value {
    let verdicts: Vec<Value> = r
        .verdicts
        .iter()
        .map(|v| {
            let witness = v.witness.as_ref().map(|w| match w {
                LocalWitness::Real { u } => json!({ "u": rats(u) }),
                LocalWitness::Padic { precision, u, .. } => json!({
                    "precision": precision,
                    "u_mod_p_precision": u.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                }),
            });
            json!({ "place": place(v.place), "soluble": v.soluble, "witness": witness })
        })
        .collect();
    json!({
        "soluble": r.soluble,
        "bad_places": r.bad_places.iter().map(|&v| place(v)).collect::<Vec<_>>(),
        "verdicts": verdicts,
    })
}

pub fn job_check(c: &JobCheck) -> Value {
    json!({
        "all_ok": c.all_ok(),
        "modulus_depth_ok": c.modulus_depth_ok,
        "residues_nonzero_ok": c.residues_nonzero_ok,
        "real_signs_ok": c.real_signs_ok,
        "schedule_ok": c.schedule_ok,
        "problems": c.problems,
    })
}

pub fn counts(rows: &[(u64, Integer)]) -> Value {
    Value::Array(rows.iter().map(|(b, n)| json!({ "B": b, "N": int(n) })).collect())
}

fn density(r: &DensityReport) -> Value {
    json!({
        "B": r.b,
        "beta_inf_per_Bs": tagged(&r.beta_inf_per_bs),
        "predicted": tagged(&r.predicted),
        "empirical": int(&r.empirical),
        "ratio": r.ratio,
    })
}

pub fn prediction(p: &Prediction) -> Value {
    let verdict = match &p.verdict {
        Verdict::Predicted => json!({ "kind": "predicted" }),
        Verdict::ZeroDensity { place: v } => json!({ "kind": "zero-density", "place": place(*v) }),
    };
    let beta_p: Vec<Value> = p
        .beta_p
        .iter()
        .map(|b| {
            let method = match b.method {
                BetaMethod::Modulus { m } => json!({ "kind": "modulus", "m": m }),
                BetaMethod::Stabilized { k } => json!({ "kind": "stabilized", "k": k }),
                BetaMethod::UnitMinor => json!({ "kind": "unit-minor" }),
            };
            json!({ "p": b.p, "value": rat(&b.value), "method": method })
        })
        .collect();
    json!({
        "verdict": verdict,
        "prime_cutoff": p.prime_cutoff,
        "beta_p": beta_p,
        "euler_product": rat(&p.euler_product),
        "tail_unestimated": p.tail_unestimated,
        "reports": p.reports.iter().map(density).collect::<Vec<_>>(),
    })
}

pub fn scan(t: &ObstructionTable) -> Value {
    let places: Vec<Value> = t
        .places
        .iter()
        .map(|ps| {
            json!({
                "place": place(ps.place),
                "resolution": ps.resolution,
                "cells": ps.cells.iter().map(|c| json!({
                    "id": c.id,
                    "representative": rat(&c.representative),
                    "invariants": format_f2(&c.values),
                })).collect::<Vec<_>>(),
                "skipped": ps.skipped,
                "insoluble": ps.insoluble,
            })
        })
        .collect();
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            let pattern: serde_json::Map<String, Value> =
                r.pattern.iter().map(|(v, s)| (v.to_string(), Value::String(s.clone()))).collect();
            json!({
                "pattern": pattern,
                "cell_count": r.cell_count.to_string(),
                "allowed": r.allowed,
            })
        })
        .collect();
    json!({
        "generators": t.generators,
        "places": places,
        "rows": rows,
        "total_combinations": t.total_combinations.to_string(),
        "excluded_combinations": t.excluded_combinations.to_string(),
        "unsupported_bad_places": t.unsupported_bad_places.iter().map(|&v| place(v)).collect::<Vec<_>>(),
        "insoluble_places": t.insoluble_places.iter().map(|&v| place(v)).collect::<Vec<_>>(),
    })
}

pub fn fgh(b: &FghBundle) -> Value {
    json!({
        "bundle": bundle(&b.data),
        "degrees": b.degrees,
        "smooth_at_infinity": b.smooth_at_infinity,
    })
}

pub fn quartic(q: &RamificationQuartic) -> Value {
    json!({
        "terms": q.terms.iter().map(|t| json!({
            "exponents": t.exponents,
            "coefficient": rat(&t.coefficient),
        })).collect::<Vec<_>>(),
        "smooth": q.smooth,
        "singular_reasons": q.singular_reasons,
    })
}

pub fn minimality(m: &MinimalityReport) -> Value {
    json!({
        "minimal": m.minimal,
        "classes": m.labels.iter().zip(&m.classes).map(|(l, c)| json!({ "label": l, "class": class(c) })).collect::<Vec<_>>(),
        "certificate": m.certificate.as_ref().map(|c| c.iter().map(|&i| m.labels[i].clone()).collect::<Vec<_>>()),
    })
}

pub fn dp1_condition(c: &Dp1Condition) -> Value {
    json!({
        "holds": c.holds,
        "pencil_discriminant": rats(&c.pencil_discriminant),
        "failures": c.failures,
    })
}

pub fn dp1_minimality(m: &Dp1Minimality) -> Value {
    json!({
        "minimality": minimality(&m.report),
        "contracted_bundle": bundle(&m.contracted),
    })
}

pub fn quadric(q: &QuadricIntersection) -> Value {
    json!({
        "factors": q.factors.iter().map(|f| json!({
            "e": [rat(&f.e.0), rat(&f.e.1)],
            "a": class(&f.a),
            "c": rat(&f.c),
        })).collect::<Vec<_>>(),
        "bundle": bundle(&q.bundle),
        "disjoint_points": q.disjoint_points,
    })
}
