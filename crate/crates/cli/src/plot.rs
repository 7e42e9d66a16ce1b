//! Deterministic SVG rendering of planar decompositions.
//!
//! Coordinates are printed with six decimals.

use std::fmt::Write;
use tropma_core::linalg::{self, frac, Scalar, Vector};
use tropma_core::ma::Measure;
use tropma_core::plfunc::PeriodicDecomposition;
use tropma_core::polyhedra::Polytope;
use tropma_core::{Error, Result};

const SIZE: f64 = 480.0;
const PAD: f64 = 10.0;

struct View {
    lo: (f64, f64),
    hi: (f64, f64),
    scale: f64,
}

impl View {
    fn map(&self, p: &[Scalar]) -> (f64, f64) {
        let (x, y) = (linalg::to_f64(&p[0]), linalg::to_f64(&p[1]));
        (
            PAD + (x - self.lo.0) * self.scale,
            PAD + (self.hi.1 - y) * self.scale,
        )
    }

    fn points(&self, pts: &[Vector]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.map(p);
                format!("{x:.6},{y:.6}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Vertices of a planar polygon in counterclockwise order.
fn boundary_order(p: &Polytope) -> Vec<Vector> {
    let c = p.barycenter();
    let mut vs: Vec<(f64, Vector)> = p
        .vertices()
        .iter()
        .map(|v| {
            let dx = linalg::to_f64(&(&v[0] - &c[0]));
            let dy = linalg::to_f64(&(&v[1] - &c[1]));
            (dy.atan2(dx), v.clone())
        })
        .collect();
    vs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    vs.into_iter().map(|(_, v)| v).collect()
}

fn shape(out: &mut String, view: &View, p: &Polytope, style: &str) {
    match p.dim() {
        0 => {
            let (x, y) = view.map(&p.vertices()[0]);
            let _ = writeln!(out, r#"<circle cx="{x:.6}" cy="{y:.6}" r="2.500000" {style}/>"#);
        }
        1 => {
            let _ = writeln!(out, r#"<polyline points="{}" {style}/>"#, view.points(p.vertices()));
        }
        _ => {
            let _ = writeln!(out, r#"<polygon points="{}" {style}/>"#, view.points(&boundary_order(p)));
        }
    }
}

pub fn render(d: &PeriodicDecomposition, sigma: &[Polytope], mu: Option<&Measure>) -> Result<String> {
    if d.n() != 2 {
        return Err(Error::Invalid("plot supports 2-D only".into()));
    }
    if sigma.iter().any(|s| s.ambient_dim() != 2) {
        return Err(Error::Invalid("plot supports 2-D only".into()));
    }
    let c = d.cocycle();
    let (mut lo, mut hi) = c.fundamental_polytope().bounding_box();
    for s in sigma {
        let (a, b) = s.bounding_box();
        for i in 0..2 {
            lo[i] = lo[i].clone().min(a[i].clone());
            hi[i] = hi[i].clone().max(b[i].clone());
        }
    }
    // half an extent of margin on each side
    for i in 0..2 {
        let m = (&hi[i] - &lo[i]) * frac(1, 2);
        lo[i] -= &m;
        hi[i] += &m;
    }
    let (lx, ly) = (linalg::to_f64(&lo[0]), linalg::to_f64(&lo[1]));
    let (hx, hy) = (linalg::to_f64(&hi[0]), linalg::to_f64(&hi[1]));
    let scale = SIZE / (hx - lx).max(hy - ly);
    let view = View {
        lo: (lx, ly),
        hi: (hx, hy),
        scale,
    };
    let w = (hx - lx) * scale + 2.0 * PAD;
    let h = (hy - ly) * scale + 2.0 * PAD;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.6}" height="{h:.6}" viewBox="0 0 {w:.6} {h:.6}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.6}" height="{h:.6}" fill="white"/>"#);
    let _ = writeln!(out, r#"<g id="measure-pieces">"#);
    if let Some(mu) = mu {
        let dmax = mu
            .pieces
            .iter()
            .map(|p| linalg::to_f64(&p.density))
            .fold(0.0, f64::max);
        for p in mu.pieces.iter().filter(|p| p.support.ambient_dim() == 2) {
            let op = 0.1 + 0.5 * linalg::to_f64(&p.density) / dmax.max(f64::MIN_POSITIVE);
            shape(&mut out, &view, &p.support, &format!(r##"fill="#3060c0" fill-opacity="{op:.6}" stroke="none""##));
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="cells">"#);
    for (i, k) in d.translates_near(&lo, &hi) {
        let cell = d.cells()[i].translate(&c.lattice_point(&k));
        shape(&mut out, &view, &cell, r##"fill="none" stroke="#404040" stroke-width="1""##);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="fundamental-domain">"#);
    shape(
        &mut out,
        &view,
        &c.fundamental_polytope(),
        r##"fill="none" stroke="#909090" stroke-width="1" stroke-dasharray="4 3""##,
    );
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="sigma">"#);
    for s in sigma {
        shape(&mut out, &view, s, r##"fill="#d03030" fill-opacity="0.2" stroke="#d03030" stroke-width="2""##);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="atoms">"#);
    if let Some(mu) = mu {
        let mmax = mu.atoms.iter().map(|(_, m)| linalg::to_f64(m)).fold(0.0, f64::max);
        for (p, m) in mu.atoms.iter().filter(|(p, _)| p.len() == 2) {
            // disc area proportional to mass
            let r = 8.0 * (linalg::to_f64(m) / mmax.max(f64::MIN_POSITIVE)).sqrt();
            let (x, y) = view.map(p);
            let _ = writeln!(out, r##"<circle cx="{x:.6}" cy="{y:.6}" r="{r:.6}" fill="#208040"/>"##);
        }
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}
