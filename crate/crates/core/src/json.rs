//! JSON encodings with exact rationals.
//!
//! Rationals are written as strings `"p/q"` (or `"p"` for integers). On input,
//! JSON integers and `[num, den]` pairs are accepted as well.

use crate::approx::{ApproxCertificate, ApproxRequest, Approximation, Target};
use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar, Vector};
use crate::ma::{AffineMap, LebesguePiece, Measure};
use crate::plfunc::{AffinePiece, PeriodicDecomposition, PeriodicPLFunction, TransversalityReport};
use crate::polyhedra::{AffineLatticeFrame, Polytope};
use crate::skeleton::{Gluing, SkeletonFace, SkeletonSpec};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

fn bad(what: &str, v: &Value) -> Error {
    let mut shown = v.to_string();
    if shown.len() > 80 {
        shown.truncate(80);
        shown.push('…');
    }
    Error::Invalid(format!("expected {what}, found {shown}"))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Invalid(format!("missing field \"{key}\"")))
}

pub fn rational(x: &Scalar) -> Value {
    Value::String(x.to_string())
}

pub fn parse_rational(v: &Value) -> Result<Scalar> {
    let big = |s: &str| s.trim().parse::<BigInt>().map_err(|_| bad("a rational", v));
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| Scalar::from_integer(i.into()))
            .ok_or_else(|| bad("an integer or a \"p/q\" string", v)),
        Value::String(s) => {
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (big(a)?, big(b)?),
                None => (big(s)?, BigInt::from(1)),
            };
            if den.is_zero() {
                return Err(bad("a nonzero denominator", v));
            }
            Ok(Scalar::new(num, den))
        }
        Value::Array(a) if a.len() == 2 => {
            let num = parse_rational(&a[0])?;
            let den = parse_rational(&a[1])?;
            if den.is_zero() || !num.is_integer() || !den.is_integer() {
                return Err(bad("a [num, den] pair of integers", v));
            }
            Ok(num / den)
        }
        _ => Err(bad("a rational", v)),
    }
}

pub fn vector(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn parse_vector(v: &Value) -> Result<Vector> {
    v.as_array()
        .ok_or_else(|| bad("an array of rationals", v))?
        .iter()
        .map(parse_rational)
        .collect()
}

pub fn matrix(m: &[Vector]) -> Value {
    Value::Array(m.iter().map(|r| vector(r)).collect())
}

pub fn parse_matrix(v: &Value) -> Result<Matrix> {
    v.as_array()
        .ok_or_else(|| bad("an array of rows", v))?
        .iter()
        .map(parse_vector)
        .collect()
}

fn parse_usize(v: &Value) -> Result<usize> {
    v.as_u64()
        .and_then(|x| x.to_usize())
        .ok_or_else(|| bad("a nonnegative integer", v))
}

fn parse_bool(v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| bad("a boolean", v))
}

pub fn polytope(p: &Polytope) -> Value {
    json!({ "vertices": matrix(p.vertices()), "dim": p.dim() })
}

pub fn parse_polytope(v: &Value) -> Result<Polytope> {
    let pts = parse_matrix(field(v, "vertices").map_err(|_| bad("a polytope {\"vertices\": ...}", v))?)?;
    if pts.is_empty() {
        return Err(Error::EmptyInput("polytope without vertices".into()));
    }
    let n = pts[0].len();
    if let Some(p) = pts.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    Polytope::hull(&pts)
}

pub fn frame(f: &AffineLatticeFrame) -> Value {
    json!({ "basepoint": vector(f.basepoint()), "basis": matrix(f.basis()) })
}

pub fn parse_frame(v: &Value) -> Result<AffineLatticeFrame> {
    AffineLatticeFrame::new(
        parse_vector(field(v, "basepoint")?)?,
        parse_matrix(field(v, "basis")?)?,
    )
}

pub fn cocycle(c: &Cocycle) -> Value {
    json!({
        "n": c.n(),
        "periods": matrix(c.periods()),
        "b": matrix(c.b()),
        "z0": vector(c.z0()),
        "polarized": c.is_polarized(),
    })
}

pub fn parse_cocycle(v: &Value) -> Result<Cocycle> {
    let periods = parse_matrix(field(v, "periods")?)?;
    if let Some(n) = v.get("n") {
        let n = parse_usize(n)?;
        if n != periods.len() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: periods.len(),
            });
        }
    }
    let polarized = match v.get("polarized") {
        Some(p) => parse_bool(p)?,
        None => true,
    };
    Cocycle::new(
        periods,
        parse_matrix(field(v, "b")?)?,
        parse_vector(field(v, "z0")?)?,
        polarized,
    )
}

fn piece(p: &AffinePiece) -> Value {
    json!({ "m": vector(&p.m), "c": rational(&p.c) })
}

fn parse_piece(v: &Value) -> Result<AffinePiece> {
    Ok(AffinePiece::new(
        parse_vector(field(v, "m")?)?,
        parse_rational(field(v, "c")?)?,
    ))
}

pub fn function(f: &PeriodicPLFunction) -> Value {
    json!({
        "cocycle": cocycle(f.cocycle()),
        "pieces": f.pieces().iter().map(piece).collect::<Vec<_>>(),
    })
}

pub fn parse_function(v: &Value) -> Result<PeriodicPLFunction> {
    let c = parse_cocycle(field(v, "cocycle")?)?;
    let pieces = field(v, "pieces")?
        .as_array()
        .ok_or_else(|| bad("an array of pieces", v))?
        .iter()
        .map(parse_piece)
        .collect::<Result<_>>()?;
    PeriodicPLFunction::new(c, pieces)
}

pub fn decomposition(d: &PeriodicDecomposition) -> Value {
    json!({
        "cocycle": cocycle(d.cocycle()),
        "cells": d.cells().iter().map(polytope).collect::<Vec<_>>(),
    })
}

pub fn parse_decomposition(v: &Value) -> Result<PeriodicDecomposition> {
    let c = parse_cocycle(field(v, "cocycle")?)?;
    let cells = parse_polytopes(field(v, "cells")?)?;
    PeriodicDecomposition::new(c, cells)
}

pub fn parse_polytopes(v: &Value) -> Result<Vec<Polytope>> {
    v.as_array()
        .ok_or_else(|| bad("an array of polytopes", v))?
        .iter()
        .map(parse_polytope)
        .collect()
}

pub fn measure(mu: &Measure) -> Result<Value> {
    let pieces = mu
        .pieces
        .iter()
        .map(|p| {
            json!({
                "support": polytope(&p.support),
                "frame": frame(&p.frame),
                "density": rational(&p.density),
            })
        })
        .collect::<Vec<_>>();
    Ok(json!({
        "atoms": mu.atoms.iter().map(|(x, m)| json!({ "at": vector(x), "mass": rational(m) })).collect::<Vec<_>>(),
        "pieces": pieces,
        "total": rational(&mu.total_mass()?),
    }))
}

pub fn parse_measure(v: &Value) -> Result<Measure> {
    let list = |key: &str| -> Result<Vec<Value>> {
        match v.get(key) {
            None => Ok(Vec::new()),
            Some(a) => a.as_array().cloned().ok_or_else(|| bad("an array", a)),
        }
    };
    let atoms = list("atoms")?
        .iter()
        .map(|a| Ok((parse_vector(field(a, "at")?)?, parse_rational(field(a, "mass")?)?)))
        .collect::<Result<Vec<_>>>()?;
    let pieces = list("pieces")?
        .iter()
        .map(|p| {
            Ok(LebesguePiece {
                support: parse_polytope(field(p, "support")?)?,
                frame: parse_frame(field(p, "frame")?)?,
                density: parse_rational(field(p, "density")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = Measure { atoms, pieces };
    if !mu.is_nonnegative() {
        return Err(Error::Invalid("negative mass or density".into()));
    }
    Ok(mu)
}

pub fn affine_map(m: &AffineMap) -> Value {
    json!({ "L": matrix(m.linear()), "t": vector(m.offset()) })
}

pub fn parse_affine_map(v: &Value, source_dim: usize) -> Result<AffineMap> {
    AffineMap::new(parse_matrix(field(v, "L")?)?, parse_vector(field(v, "t")?)?, source_dim)
}

pub fn transversality(r: &TransversalityReport) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "sigma": row.sigma,
                "cell": row.cell,
                "shift": row.shift,
                "face": polytope(&row.face),
                "intersection_dim": row.intersection_dim,
                "expected": row.expected,
                "definition_ok": row.definition_ok,
                "criterion_ok": row.criterion_ok,
            })
        })
        .collect();
    json!({
        "ok": r.ok,
        "criterion_ok": r.criterion_ok,
        "sigma": r.sigma.iter().map(polytope).collect::<Vec<_>>(),
        "rows": rows,
    })
}

/// Certificate with exact rationals; stage timings only when asked for.
pub fn certificate(c: &ApproxCertificate, timings: bool) -> Value {
    let stages: Vec<Value> = c
        .stages
        .iter()
        .map(|s| {
            let mut o = Map::new();
            o.insert("name".into(), json!(s.name));
            o.insert("error".into(), rational(&s.error));
            if timings {
                o.insert("seconds".into(), json!(s.seconds));
            }
            Value::Object(o)
        })
        .collect();
    json!({
        "sup_error_bound": rational(&c.sup_error_bound),
        "strictly_convex": c.strictly_convex,
        "periodic": c.periodic,
        "transversal": c.transversal.ok,
        "transversality": transversality(&c.transversal),
        "retries_used": c.retries_used,
        "k": c.k,
        "stages": stages,
    })
}

pub fn approximation(a: &Approximation, timings: bool) -> Value {
    json!({
        "function": function(&a.function),
        "decomposition": decomposition(&a.decomposition),
        "certificate": certificate(&a.certificate, timings),
    })
}

/// `{"cocycle": ...}` or `{"function": ...}`, with optional `sigma`, `epsilon`,
/// `seed` and `max_retries`.
pub fn parse_approx_request(v: &Value) -> Result<ApproxRequest> {
    let target = match (v.get("function"), v.get("cocycle")) {
        (Some(f), _) => Target::Function(parse_function(f)?),
        (None, Some(c)) => Target::Canonical(parse_cocycle(c)?),
        (None, None) => return Err(Error::Invalid("missing field \"cocycle\" or \"function\"".into())),
    };
    let sigma = match v.get("sigma") {
        Some(s) => parse_polytopes(s)?,
        None => Vec::new(),
    };
    Ok(ApproxRequest {
        target,
        sigma,
        epsilon: v.get("epsilon").map(parse_rational).transpose()?.unwrap_or_else(|| Scalar::new(1.into(), 4.into())),
        seed: v.get("seed").map(|s| s.as_u64().ok_or_else(|| bad("a seed", s))).transpose()?.unwrap_or(0),
        max_retries: v.get("max_retries").map(parse_usize).transpose()?.unwrap_or(50),
    })
}

pub fn skeleton_spec(s: &SkeletonSpec) -> Value {
    let faces: Vec<Value> = s
        .faces()
        .iter()
        .map(|f| {
            json!({
                "id": f.id,
                "carrier": polytope(&f.carrier),
                "frame": frame(&f.frame),
                "e": f.e,
                "degH": rational(&f.deg_h),
                "f_aff": affine_map(&f.f_aff),
                "abelian_nondegenerate": f.abelian_nondegenerate,
                "boundary": f.boundary_ids,
            })
        })
        .collect();
    let gluing: Vec<Value> = s
        .gluing()
        .iter()
        .map(|g| json!({ "a": g.a, "b": g.b, "map": affine_map(&g.map) }))
        .collect();
    json!({ "cocycle": cocycle(s.cocycle()), "d": s.d(), "faces": faces, "gluing": gluing })
}

pub fn parse_skeleton_spec(v: &Value) -> Result<SkeletonSpec> {
    let c = parse_cocycle(field(v, "cocycle")?)?;
    let d = parse_usize(field(v, "d")?)?;
    let faces_json = field(v, "faces")?
        .as_array()
        .ok_or_else(|| Error::InvalidSpec("\"faces\" must be an array".into()))?;
    let mut faces = Vec::with_capacity(faces_json.len());
    for f in faces_json {
        let carrier = parse_polytope(field(f, "carrier")?)?;
        let r = carrier.ambient_dim();
        let frame = match f.get("frame") {
            Some(fr) => parse_frame(fr)?,
            None => carrier.affine_data().1,
        };
        let boundary_ids = match f.get("boundary") {
            Some(b) => b
                .as_array()
                .ok_or_else(|| bad("an array of ids", b))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("a face id", x)))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        faces.push(SkeletonFace {
            id: field(f, "id")?.as_str().ok_or_else(|| bad("a face id", f))?.to_string(),
            e: parse_usize(field(f, "e")?)?,
            deg_h: parse_rational(field(f, "degH")?)?,
            f_aff: parse_affine_map(field(f, "f_aff")?, r)?,
            abelian_nondegenerate: parse_bool(field(f, "abelian_nondegenerate")?)?,
            carrier,
            frame,
            boundary_ids,
        });
    }
    let r = faces.first().map(|f| f.carrier.ambient_dim()).unwrap_or(0);
    let gluing = match v.get("gluing") {
        None => Vec::new(),
        Some(g) => g
            .as_array()
            .ok_or_else(|| bad("an array of gluings", g))?
            .iter()
            .map(|g| {
                Ok(Gluing {
                    a: field(g, "a")?.as_str().ok_or_else(|| bad("a face id", g))?.to_string(),
                    b: field(g, "b")?.as_str().ok_or_else(|| bad("a face id", g))?.to_string(),
                    map: parse_affine_map(field(g, "map")?, r)?,
                })
            })
            .collect::<Result<_>>()?,
    };
    SkeletonSpec::new(c, d, faces, gluing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::tangent_pl;
    use crate::linalg::{frac, q, qvec};

    #[test]
    fn rational_forms() {
        assert_eq!(parse_rational(&json!("3/6")).unwrap(), frac(1, 2));
        assert_eq!(parse_rational(&json!(-4)).unwrap(), q(-4));
        assert_eq!(parse_rational(&json!([2, 3])).unwrap(), frac(2, 3));
        assert_eq!(parse_rational(&json!("7")).unwrap(), q(7));
        assert!(parse_rational(&json!("1/0")).is_err());
        assert!(parse_rational(&json!(0.5)).is_err());
        assert_eq!(rational(&frac(-3, 9)), json!("-1/3"));
    }

    #[test]
    fn round_trips() {
        let c = Cocycle::new(
            vec![qvec(&[2, 1]), qvec(&[0, 1])],
            vec![vec![frac(1, 2), q(0)], vec![q(0), q(1)]],
            vec![frac(1, 3), q(0)],
            true,
        )
        .unwrap();
        assert_eq!(parse_cocycle(&cocycle(&c)).unwrap(), c);
        let f = tangent_pl(&c, 2).unwrap().function;
        let back = parse_function(&function(&f)).unwrap();
        assert_eq!(back.pieces(), f.pieces());
        let p = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), vec![frac(1, 2), q(3)]]).unwrap();
        assert_eq!(parse_polytope(&polytope(&p)).unwrap(), p);
        let mu = Measure {
            atoms: vec![(qvec(&[1, 1]), frac(2, 3))],
            pieces: vec![LebesguePiece {
                support: p,
                frame: AffineLatticeFrame::standard(2),
                density: q(2),
            }],
        };
        let j = measure(&mu).unwrap();
        assert_eq!(j["total"], json!("11/3"));
        assert_eq!(parse_measure(&j).unwrap(), mu);
    }

    #[test]
    fn skeleton_spec_format() {
        let v = json!({
            "cocycle": {"n": 1, "periods": [["1"]], "b": [["1"]], "z0": ["1/2"], "polarized": true},
            "d": 1,
            "faces": [{
                "id": "edge",
                "carrier": {"vertices": [["0"], ["1"]]},
                "frame": {"basepoint": ["0"], "basis": [["1"]]},
                "e": 0, "degH": "1",
                "f_aff": {"L": [[1]], "t": ["0"]},
                "abelian_nondegenerate": true,
                "boundary": []
            }],
            "gluing": []
        });
        let s = parse_skeleton_spec(&v).unwrap();
        assert_eq!(s.faces().len(), 1);
        let again = parse_skeleton_spec(&skeleton_spec(&s)).unwrap();
        assert_eq!(again.faces(), s.faces());
    }
}
