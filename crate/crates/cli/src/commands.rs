use crate::io::{emit, emit_bytes, parse_point, parse_scalar, read_json, CliError, CliResult};
use crate::{plot, Command};
use serde_json::{json, Value};
use std::path::Path;
use std::process::ExitCode;
use tropma_core::approx::{approximate, tangent_pl, Target};
use tropma_core::cocycle::Cocycle;
use tropma_core::json as j;
use tropma_core::ma::{ma_pl, ma_quadratic_restricted, AffineMap, Region};
use tropma_core::plfunc::{check_cocycle_rule, linearity_cells, periodicity_report, PeriodicPLFunction};
use tropma_core::polyhedra::AffineLatticeFrame;
use tropma_core::skeleton::{
    assemble_measure, canonical_subset, check_nondegenerate, face_measure, vertex_degree, Metric,
    SkeletonSpec,
};

pub fn run(cmd: Command) -> CliResult<ExitCode> {
    match cmd {
        Command::Validate { io, at } => {
            let v = read_json(&io.input)?;
            emit(io.out.as_deref(), &validate(&v, at.as_deref())?)?;
        }
        Command::Approximate {
            io,
            eps,
            seed,
            max_retries,
            sigma,
            timings,
        } => {
            let v = read_json(&io.input)?;
            let mut req = if v.get("periods").is_some() {
                j::parse_approx_request(&json!({ "cocycle": v }))?
            } else if v.get("pieces").is_some() {
                j::parse_approx_request(&json!({ "function": v }))?
            } else {
                j::parse_approx_request(&v)?
            };
            if let Some(e) = eps {
                req.epsilon = parse_scalar(&e)?;
            }
            if let Some(s) = seed {
                req.seed = s;
            }
            if let Some(r) = max_retries {
                req.max_retries = r;
            }
            if let Some(p) = sigma {
                let s = read_json(&p)?;
                req.sigma = j::parse_polytopes(s.get("sigma").unwrap_or(&s))?;
            }
            let n = match &req.target {
                Target::Canonical(c) => c.n(),
                Target::Function(f) => f.n(),
            };
            if let Some(s) = req.sigma.iter().find(|s| s.ambient_dim() != n) {
                return Err(tropma_core::Error::DimensionMismatch {
                    expected: n,
                    got: s.ambient_dim(),
                }
                .into());
            }
            let a = approximate(&req)?;
            emit(io.out.as_deref(), &j::approximation(&a, timings))?;
        }
        Command::Ma {
            io,
            k,
            region,
            fundamental: _,
        } => {
            let mut v = read_json(&io.input)?;
            if let Some(f) = v.get("function") {
                v = f.clone();
            }
            let region = match region {
                Some(p) => Region::Polytope(j::parse_polytope(&read_json(&p)?)?),
                None => Region::FundamentalDomain,
            };
            let mu = if v.get("periods").is_some() {
                let c = j::parse_cocycle(&v)?;
                match k {
                    Some(k) => ma_pl(&tangent_pl(&c, k)?.function, &region)?,
                    None => {
                        let support = match &region {
                            Region::Polytope(p) => p.clone(),
                            Region::FundamentalDomain => c.fundamental_polytope(),
                        };
                        let n = c.n();
                        ma_quadratic_restricted(&c, &AffineMap::identity(n), &support, &AffineLatticeFrame::standard(n))?
                    }
                }
            } else {
                if k.is_some() {
                    return Err(CliError::Usage("--k applies to cocycle input only".into()));
                }
                ma_pl(&j::parse_function(&v)?, &region)?
            };
            emit(io.out.as_deref(), &j::measure(&mu)?)?;
        }
        Command::SkeletonMeasure { io, metric, glued } => {
            let spec = j::parse_skeleton_spec(&read_json(&io.input)?)?;
            let out = if glued {
                if metric != "canonical" {
                    return Err(CliError::Usage("--glued uses the canonical metric".into()));
                }
                let cs = canonical_subset(&spec)?;
                json!({ "faces": cs.faces, "measure": j::measure(&cs.measure)? })
            } else {
                let m = parse_metric(&metric, &spec)?;
                assembled_report(&spec, &metric, &m)?
            };
            emit(io.out.as_deref(), &out)?;
        }
        Command::Degree {
            io,
            metric,
            face,
            at,
        } => {
            let spec = j::parse_skeleton_spec(&read_json(&io.input)?)?;
            let Metric::Pl(f) = parse_metric(&metric, &spec)? else {
                return Err(CliError::Usage("degree needs a piecewise-linear metric".into()));
            };
            let fc = spec
                .face(&face)
                .ok_or_else(|| CliError::Usage(format!("no face with id {face}")))?;
            let points = match at {
                Some(p) => vec![parse_point(&p)?],
                None => face_measure(&spec, fc, &Metric::Pl(f.clone()))?
                    .atoms
                    .into_iter()
                    .map(|(x, _)| x)
                    .collect(),
            };
            let mut total = tropma_core::linalg::q(0);
            let mut rows = Vec::new();
            for p in &points {
                let d = vertex_degree(&spec, fc, &f, p)?;
                total += &d;
                rows.push(json!({ "at": j::vector(p), "degree": j::rational(&d) }));
            }
            emit(
                io.out.as_deref(),
                &json!({ "face": face, "vertices": rows, "total": j::rational(&total) }),
            )?;
        }
        Command::MassCheck { io, metric, measure } => {
            let spec = j::parse_skeleton_spec(&read_json(&io.input)?)?;
            let metrics = if metric.is_empty() && measure.is_empty() {
                vec!["canonical".to_string()]
            } else {
                metric
            };
            let mut entries = Vec::new();
            let mut totals = Vec::new();
            for name in &metrics {
                let m = parse_metric(name, &spec)?;
                let rep = assembled_report(&spec, name, &m)?;
                totals.push(j::parse_rational(&rep["total"])?);
                entries.push(json!({ "source": name, "total": rep["total"], "faces": rep["faces"] }));
            }
            for p in &measure {
                let mu = j::parse_measure(&read_json(p)?)?;
                let t = mu.total_mass().map_err(CliError::from)?;
                entries.push(json!({ "source": p.display().to_string(), "total": j::rational(&t) }));
                totals.push(t);
            }
            let pass = totals.windows(2).all(|w| w[0] == w[1]);
            emit(
                io.out.as_deref(),
                &json!({ "verdict": if pass { "PASS" } else { "FAIL" }, "entries": entries }),
            )?;
            if !pass {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Plot { io, sigma, measure } => {
            let v = read_json(&io.input)?;
            let sigma = match sigma {
                Some(p) => {
                    let s = read_json(&p)?;
                    j::parse_polytopes(s.get("sigma").unwrap_or(&s))?
                }
                None => Vec::new(),
            };
            let mu = measure
                .map(|p| read_json(&p).and_then(|m| Ok(j::parse_measure(&m)?)))
                .transpose()?;
            let d = if let Some(d) = v.get("decomposition") {
                j::parse_decomposition(d)?
            } else if v.get("cells").is_some() {
                j::parse_decomposition(&v)?
            } else if v.get("periods").is_some() {
                tangent_pl(&j::parse_cocycle(&v)?, 1)?.cells.decomposition
            } else {
                linearity_cells(&j::parse_function(&v)?)?.decomposition
            };
            let svg = plot::render(&d, &sigma, mu.as_ref())?;
            emit_bytes(io.out.as_deref(), svg.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_metric(s: &str, spec: &SkeletonSpec) -> CliResult<Metric> {
    if s == "canonical" {
        return Ok(Metric::Canonical);
    }
    if let Some(k) = s.strip_prefix("k=") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Usage(format!("bad metric level {s}")))?;
        return Ok(Metric::Pl(tangent_pl(spec.cocycle(), k)?.function));
    }
    let f = j::parse_function(&read_json(Path::new(s))?)?;
    if f.cocycle() != spec.cocycle() {
        return Err(tropma_core::Error::Invalid(format!("metric {s} has a different cocycle than the spec")).into());
    }
    Ok(Metric::Pl(f))
}

fn assembled_report(spec: &SkeletonSpec, name: &str, m: &Metric) -> CliResult<Value> {
    let a = assemble_measure(spec, m)?;
    let faces: Vec<Value> = a
        .faces
        .iter()
        .map(|f| {
            json!({
                "id": f.id,
                "nondegenerate": f.nondegenerate,
                "r": f.density.as_ref().map(j::rational),
                "mass": j::rational(&f.mass),
            })
        })
        .collect();
    Ok(json!({
        "metric": name,
        "total": j::rational(&a.measure.total_mass()?),
        "faces": faces,
        "measure": j::measure(&a.measure)?,
    }))
}

fn function_report(f: &PeriodicPLFunction, at: Option<&str>) -> CliResult<Value> {
    let cells = linearity_cells(f)?;
    let per = periodicity_report(&cells.decomposition);
    let mut out = json!({
        "kind": "function",
        "pieces": f.pieces().len(),
        "cocycle_rule": check_cocycle_rule(f),
        "cells": cells.decomposition.cells().len(),
        "strictly_convex": cells.strictly_convex,
        "periodic": per.is_periodic(),
        "strictly_periodic": per.is_strictly_periodic(),
    });
    if let Some(p) = at {
        let w = parse_point(p)?;
        if w.len() != f.n() {
            return Err(tropma_core::Error::DimensionMismatch { expected: f.n(), got: w.len() }.into());
        }
        out["at"] = j::vector(&w);
        out["value"] = j::rational(&f.value(&w)?);
        out["phi"] = j::rational(&f.periodic_part(&w)?);
    }
    Ok(out)
}

fn cocycle_report(c: &Cocycle, at: Option<&str>) -> CliResult<Value> {
    let mut out = json!({
        "kind": "cocycle",
        "n": c.n(),
        "polarized": c.is_polarized(),
        "positive_definite": c.is_positive_definite(),
        "covolume": j::rational(&c.covolume()),
        "det_b": j::rational(&c.det_b()),
        "z0": j::vector(c.z0()),
    });
    if let Some(p) = at {
        let w = parse_point(p)?;
        if w.len() != c.n() {
            return Err(tropma_core::Error::DimensionMismatch { expected: c.n(), got: w.len() }.into());
        }
        out["at"] = j::vector(&w);
        out["canonical_value"] = j::rational(&c.canonical_value(&w)?);
    }
    Ok(out)
}

fn validate(v: &Value, at: Option<&str>) -> CliResult<Value> {
    if v.get("faces").is_some() {
        let spec = j::parse_skeleton_spec(v)?;
        let faces: Vec<Value> = spec
            .faces()
            .iter()
            .map(|f| {
                json!({
                    "id": f.id,
                    "dim": f.dim(),
                    "e": f.e,
                    "nondegenerate": check_nondegenerate(f),
                    "weight": j::rational(&spec.weight(f)),
                })
            })
            .collect();
        let cs = canonical_subset(&spec)?;
        return Ok(json!({
            "kind": "skeleton_spec",
            "d": spec.d(),
            "faces": faces,
            "gluing": spec.gluing().len(),
            "canonical_subset": cs.faces,
        }));
    }
    if v.get("pieces").is_some() && v.get("cocycle").is_some() {
        let f = j::parse_function(v)?;
        return function_report(&f, at);
    }
    if v.get("cells").is_some() {
        let d = j::parse_decomposition(v)?;
        let per = periodicity_report(&d);
        return Ok(json!({
            "kind": "decomposition",
            "cells": d.cells().len(),
            "periodic": per.is_periodic(),
            "strictly_periodic": per.is_strictly_periodic(),
            "volume_ok": per.volume_ok,
            "interiors_disjoint": per.interiors_disjoint,
            "face_to_face": per.face_to_face,
        }));
    }
    if v.get("atoms").is_some() || v.get("pieces").is_some() {
        let mu = j::parse_measure(v)?;
        return Ok(json!({
            "kind": "measure",
            "atoms": mu.atoms.len(),
            "pieces": mu.pieces.len(),
            "total": j::rational(&mu.total_mass()?),
        }));
    }
    if v.get("periods").is_some() {
        return cocycle_report(&j::parse_cocycle(v)?, at);
    }
    if v.get("vertices").is_some() {
        let p = j::parse_polytope(v)?;
        return Ok(json!({
            "kind": "polytope",
            "polytope": j::polytope(&p),
            "normalized_volume": j::rational(&p.normalized_volume()),
        }));
    }
    if v.get("cocycle").is_some() || v.get("function").is_some() {
        let req = j::parse_approx_request(v)?;
        if !(req.epsilon > tropma_core::linalg::q(0)) {
            return Err(tropma_core::Error::NonPositiveEpsilon.into());
        }
        return Ok(json!({
            "kind": "approx_request",
            "epsilon": j::rational(&req.epsilon),
            "sigma": req.sigma.len(),
            "seed": req.seed,
            "max_retries": req.max_retries,
        }));
    }
    Err(tropma_core::Error::Invalid("unrecognized input".into()).into())
}
