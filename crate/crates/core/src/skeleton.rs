//! Skeleton faces of a polystable model, their Monge–Ampère measures and vertex degrees.
//!
//! All carriers live in one chart space `ℝʳ`; `f_aff` sends the chart into `N_ℝ`.

use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::linalg::{self, Scalar, Vector};
use crate::ma::{
    ma_quadratic_restricted, pushforward, subdifferential, AffineMap, Measure, PushMap,
};
use crate::plfunc::{linearity_cells, AffinePiece, ConvexPL, PeriodicPLFunction};
use crate::polyhedra::{AffineLatticeFrame, Halfspace, Polytope};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonFace {
    pub id: String,
    pub carrier: Polytope,
    /// Lattice frame of the affine hull of the carrier.
    pub frame: AffineLatticeFrame,
    /// Dimension of the stratum.
    pub e: usize,
    /// Degree of the stratum closure.
    pub deg_h: Scalar,
    pub f_aff: AffineMap,
    /// Whether the abelian part of the stratum has full dimension.
    pub abelian_nondegenerate: bool,
    pub boundary_ids: Vec<String>,
}

impl SkeletonFace {
    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    /// `f_aff` in frame coordinates: `y ↦ f_aff(basepoint + Σ yᵢ bᵢ)`.
    pub fn linearization(&self) -> AffineMap {
        let m = self.f_aff.on_directions(self.frame.basis());
        AffineMap::new(m, self.f_aff.apply(self.frame.basepoint()), self.frame.dim())
            .expect("shapes agree")
    }
}

/// Identification of `a` with `b` by a unimodular affine map of the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub a: String,
    pub b: String,
    pub map: AffineMap,
}

#[derive(Clone, Debug)]
pub struct SkeletonSpec {
    cocycle: Cocycle,
    d: usize,
    chart_dim: usize,
    faces: Vec<SkeletonFace>,
    gluing: Vec<Gluing>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl SkeletonSpec {
    /// Validates shapes, dimension bounds, integrality and the gluing maps.
    /// Faces are stored in id order.
    pub fn new(
        cocycle: Cocycle,
        d: usize,
        mut faces: Vec<SkeletonFace>,
        gluing: Vec<Gluing>,
    ) -> Result<Self> {
        faces.sort_by(|x, y| x.id.cmp(&y.id));
        if faces.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(invalid("duplicate face id"));
        }
        let r = faces.first().map(|f| f.carrier.ambient_dim()).unwrap_or(0);
        let n = cocycle.n();
        let by_id: BTreeMap<&str, &SkeletonFace> =
            faces.iter().map(|f| (f.id.as_str(), f)).collect();
        for f in &faces {
            let id = &f.id;
            if f.carrier.ambient_dim() != r || f.frame.ambient_dim() != r {
                return Err(invalid(format!("face {id}: carriers must share one chart dimension")));
            }
            if f.e > d {
                return Err(invalid(format!("face {id}: stratum dimension exceeds d")));
            }
            if f.dim() + f.e > d {
                return Err(invalid(format!("face {id}: dim + e exceeds d")));
            }
            if f.deg_h.is_negative() {
                return Err(invalid(format!("face {id}: negative degree")));
            }
            if f.f_aff.source_dim() != r || f.f_aff.target_dim() != n {
                return Err(invalid(format!("face {id}: f_aff has the wrong shape")));
            }
            f.carrier
                .lattice_volume(&f.frame)
                .map_err(|_| invalid(format!("face {id}: frame does not span the carrier")))?;
            let integral = f
                .f_aff
                .on_directions(f.frame.basis())
                .iter()
                .flatten()
                .all(|x| x.is_integer());
            if !integral {
                return Err(invalid(format!("face {id}: f_aff does not map the frame lattice into N")));
            }
            for b in &f.boundary_ids {
                let Some(g) = by_id.get(b.as_str()) else {
                    return Err(invalid(format!("face {id}: unknown boundary face {b}")));
                };
                if !g.carrier.is_face_of(&f.carrier) || g.carrier == f.carrier {
                    return Err(invalid(format!("face {id}: {b} is not a proper face")));
                }
            }
        }
        for g in &gluing {
            let (Some(fa), Some(fb)) = (by_id.get(g.a.as_str()), by_id.get(g.b.as_str())) else {
                return Err(invalid(format!("gluing {}–{}: unknown face", g.a, g.b)));
            };
            let m = &g.map;
            if m.source_dim() != r || m.target_dim() != r {
                return Err(invalid("gluing map must be an affine map of the chart"));
            }
            let unimodular = m.linear().iter().flatten().all(|x| x.is_integer())
                && linalg::det(m.linear()).abs().is_one();
            if !unimodular {
                return Err(invalid(format!("gluing {}–{}: linear part is not unimodular", g.a, g.b)));
            }
            if m.image(&fa.carrier) != fb.carrier {
                return Err(invalid(format!("gluing {}–{}: carriers do not correspond", g.a, g.b)));
            }
        }
        Ok(SkeletonSpec {
            cocycle,
            d,
            chart_dim: r,
            faces,
            gluing,
        })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn chart_dim(&self) -> usize {
        self.chart_dim
    }

    pub fn faces(&self) -> &[SkeletonFace] {
        &self.faces
    }

    pub fn gluing(&self) -> &[Gluing] {
        &self.gluing
    }

    pub fn face(&self, id: &str) -> Option<&SkeletonFace> {
        self.faces
            .binary_search_by(|f| f.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.faces[i])
    }

    /// `d!/e! · deg_H`.
    pub fn weight(&self, face: &SkeletonFace) -> Scalar {
        linalg::factorial(self.d) / linalg::factorial(face.e) * &face.deg_h
    }
}

#[derive(Clone, Debug)]
pub enum Metric {
    Canonical,
    Pl(PeriodicPLFunction),
}

/// Rank of `f_aff` on the carrier equals its dimension, and the abelian flag is set.
pub fn check_nondegenerate(face: &SkeletonFace) -> bool {
    face.abelian_nondegenerate && face.linearization().rank() == face.dim()
}

/// `f ∘ A` for an affine map `A` into `N_ℝ`.
struct Pullback<'a> {
    f: &'a PeriodicPLFunction,
    map: AffineMap,
}

impl Pullback<'_> {
    fn pull(&self, p: &AffinePiece) -> AffinePiece {
        let k = self.map.source_dim();
        let m = linalg::vec_mat(&p.m, self.map.linear(), k);
        AffinePiece::new(m, linalg::dot(&p.m, self.map.offset()) + &p.c)
    }
}

impl ConvexPL for Pullback<'_> {
    fn ambient_dim(&self) -> usize {
        self.map.source_dim()
    }

    fn active_pieces(&self, y: &[Scalar]) -> Result<(Scalar, Vec<AffinePiece>)> {
        let (v, act) = self.f.active_pieces(&self.map.apply(y))?;
        let mut pulled: Vec<AffinePiece> = act.iter().map(|p| self.pull(p)).collect();
        pulled.sort();
        pulled.dedup();
        Ok((v, pulled))
    }
}

fn in_frame_coords(face: &SkeletonFace) -> Polytope {
    let ys: Vec<Vector> = face
        .carrier
        .vertices()
        .iter()
        .map(|v| face.frame.coords(v).expect("frame spans carrier"))
        .collect();
    Polytope::hull(&ys).expect("nonempty")
}

/// Vertices of the pullback complex on the carrier, in frame coordinates.
fn pullback_vertices(f: &PeriodicPLFunction, face: &SkeletonFace) -> Result<Vec<Vector>> {
    let lin = face.linearization();
    let carrier_y = in_frame_coords(face);
    let k = lin.source_dim();
    let c = f.cocycle();
    let d = linearity_cells(f)?.decomposition;
    let (lo, hi) = lin.image(&carrier_y).bounding_box();
    let base = carrier_y.halfspaces();
    let preimages: Vec<Vector> = d
        .translates_near(&lo, &hi)
        .into_par_iter()
        .flat_map_iter(|(i, kk)| {
            let cell = d.cells()[i].translate(&c.lattice_point(&kk));
            let mut ineqs = base.clone();
            for h in cell.halfspaces() {
                ineqs.push(Halfspace::new(
                    linalg::vec_mat(&h.normal, lin.linear(), k),
                    &h.offset - linalg::dot(&h.normal, lin.offset()),
                ));
            }
            Polytope::from_halfspaces(k, &ineqs, &[])
                .ok()
                .flatten()
                .map(|p| p.vertices().to_vec())
                .unwrap_or_default()
        })
        .collect();
    let mut out = preimages;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Monge–Ampère measure of the metric restricted to one face, scaled by `d!/e!·deg_H`.
/// Degenerate faces give the zero measure.
pub fn face_measure(spec: &SkeletonSpec, face: &SkeletonFace, metric: &Metric) -> Result<Measure> {
    if !check_nondegenerate(face) {
        return Ok(Measure::zero());
    }
    let w = spec.weight(face);
    match metric {
        Metric::Canonical => Ok(ma_quadratic_restricted(
            spec.cocycle(),
            &face.f_aff,
            &face.carrier,
            &face.frame,
        )?
        .scaled(&w)),
        Metric::Pl(f) => {
            if f.n() != spec.cocycle().n() {
                return Err(Error::DimensionMismatch {
                    expected: spec.cocycle().n(),
                    got: f.n(),
                });
            }
            let pb = Pullback {
                f,
                map: face.linearization(),
            };
            let carrier_y = in_frame_coords(face);
            let atoms = pullback_vertices(f, face)?
                .into_par_iter()
                .filter(|y| carrier_y.relint_contains(y))
                .map(|y| {
                    let s = subdifferential(&pb, &y)?;
                    Ok((face.frame.point(&y), s.mass()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Measure {
                atoms,
                pieces: Vec::new(),
            }
            .consolidate()
            .scaled(&w))
        }
    }
}

/// One face's share of an assembled measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceContribution {
    pub id: String,
    pub nondegenerate: bool,
    /// The constant density `r_σ`, for the canonical metric.
    pub density: Option<Scalar>,
    pub mass: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembled {
    pub measure: Measure,
    pub faces: Vec<FaceContribution>,
}

/// Sum of the face measures, faces taken in id order.
pub fn assemble_measure(spec: &SkeletonSpec, metric: &Metric) -> Result<Assembled> {
    let parts = spec
        .faces()
        .par_iter()
        .map(|face| face_measure(spec, face, metric))
        .collect::<Result<Vec<_>>>()?;
    let mut measure = Measure::zero();
    let mut faces = Vec::with_capacity(parts.len());
    for (face, mu) in spec.faces().iter().zip(parts) {
        let density = matches!(metric, Metric::Canonical).then(|| {
            mu.pieces
                .first()
                .map(|p| p.density.clone())
                .unwrap_or_else(Scalar::zero)
        });
        faces.push(FaceContribution {
            id: face.id.clone(),
            nondegenerate: check_nondegenerate(face),
            density,
            mass: mu.total_mass()?,
        });
        measure = measure.plus(mu);
    }
    Ok(Assembled { measure, faces })
}

/// `d!/e! · deg_H · MA(f ∘ f_aff)({ξ})` at a vertex `ξ` in the relative interior
/// of the carrier, provided the face meets the cell through `f_aff(ξ)` transversally.
pub fn vertex_degree(
    spec: &SkeletonSpec,
    face: &SkeletonFace,
    metric: &PeriodicPLFunction,
    xi: &[Scalar],
) -> Result<Scalar> {
    if !face.carrier.relint_contains(xi) {
        return Err(Error::Invalid("point is not in the relative interior of the face".into()));
    }
    let lin = face.linearization();
    let y = face.frame.coords(xi).expect("relint point lies in the hull");
    let omega = lin.apply(&y);
    let n = spec.cocycle().n();
    let d = linearity_cells(metric)?.decomposition;
    let sigma = d
        .cells_containing(&omega)
        .into_iter()
        .flat_map(|(_, _, cell)| cell.faces())
        .filter(|s| s.relint_contains(&omega))
        .min_by_key(|s| s.dim())
        .ok_or_else(|| Error::Uncovered("point outside the decomposition".into()))?;
    let mut span: Vec<Vector> = linalg::transpose(lin.linear(), lin.source_dim());
    span.extend(sigma.directions().iter().cloned());
    if face.dim() + sigma.dim() != n || linalg::rank(&span, n) != n {
        return Err(Error::NonTransversalVertex);
    }
    let pb = Pullback { f: metric, map: lin };
    let s = subdifferential(&pb, &y)?;
    if s.dual.dim() < face.dim() {
        return Err(Error::NotAVertex);
    }
    Ok(spec.weight(face) * s.mass())
}

/// Non-degenerate faces and their measures pushed to one representative per gluing class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSubset {
    pub faces: Vec<String>,
    pub measure: Measure,
}

fn inverse_map(m: &AffineMap) -> AffineMap {
    let inv = linalg::inverse(m.linear()).expect("unimodular");
    let t = linalg::neg(&linalg::mat_vec(&inv, m.offset()));
    AffineMap::new(inv, t, m.source_dim()).expect("square")
}

/// Glues the canonical face measures along the identifications of the spec.
pub fn canonical_subset(spec: &SkeletonSpec) -> Result<CanonicalSubset> {
    let faces = spec.faces();
    let index: BTreeMap<&str, usize> = faces.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect();
    let mut adj: Vec<Vec<(usize, AffineMap)>> = vec![Vec::new(); faces.len()];
    for g in spec.gluing() {
        let (a, b) = (index[g.a.as_str()], index[g.b.as_str()]);
        // maps pointing from a face towards its neighbour
        adj[a].push((b, g.map.clone()));
        adj[b].push((a, inverse_map(&g.map)));
    }
    // to_rep[i]: chart map sending face i onto its class representative
    let mut to_rep: Vec<Option<(usize, AffineMap)>> = vec![None; faces.len()];
    for root in 0..faces.len() {
        if to_rep[root].is_some() {
            continue;
        }
        to_rep[root] = Some((root, AffineMap::identity(spec.chart_dim())));
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let (_, to_root) = to_rep[i].clone().expect("visited");
            for (j, m) in &adj[i] {
                // j → i → root
                let cand = to_root.compose(&inverse_map(m))?;
                match &to_rep[*j] {
                    Some((_, existing)) => {
                        let agree = faces[*j]
                            .carrier
                            .vertices()
                            .iter()
                            .all(|v| existing.apply(v) == cand.apply(v));
                        if !agree {
                            return Err(Error::InconsistentGluing(format!(
                                "{} and {} are identified by maps that disagree",
                                faces[i].id, faces[*j].id
                            )));
                        }
                    }
                    None => {
                        to_rep[*j] = Some((root, cand));
                        queue.push_back(*j);
                    }
                }
            }
        }
    }
    let mut ids = Vec::new();
    let mut measure = Measure::zero();
    for (face, rep) in faces.iter().zip(&to_rep) {
        if !check_nondegenerate(face) {
            continue;
        }
        ids.push(face.id.clone());
        let (r, map) = rep.as_ref().expect("every face is visited");
        let mu = face_measure(spec, face, &Metric::Canonical)?;
        let pushed = pushforward(
            &mu,
            &[PushMap {
                source: face.carrier.clone(),
                map: map.clone(),
                target_frame: faces[*r].frame.clone(),
            }],
        )?;
        measure = measure.plus(pushed);
    }
    Ok(CanonicalSubset {
        faces: ids,
        measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::tangent_pl;
    use crate::linalg::{frac, q, qvec};

    fn unit_face(id: &str, n: usize, e: usize, flag: bool) -> SkeletonFace {
        let carrier = Polytope::axis_box(&linalg::zeros(n), &vec![q(1); n]).unwrap();
        SkeletonFace {
            id: id.into(),
            carrier,
            frame: AffineLatticeFrame::standard(n),
            e,
            deg_h: q(1),
            f_aff: AffineMap::identity(n),
            abelian_nondegenerate: flag,
            boundary_ids: Vec::new(),
        }
    }

    fn point_face(id: &str, x: i64) -> SkeletonFace {
        let p = vec![q(x)];
        SkeletonFace {
            id: id.into(),
            carrier: Polytope::hull(&[p.clone()]).unwrap(),
            frame: AffineLatticeFrame::new(p, Vec::new()).unwrap(),
            e: 1,
            deg_h: q(1),
            f_aff: AffineMap::identity(1),
            abelian_nondegenerate: false,
            boundary_ids: Vec::new(),
        }
    }

    pub(crate) fn tate_spec() -> SkeletonSpec {
        SkeletonSpec::new(Cocycle::standard(1), 1, vec![unit_face("edge", 1, 0, true)], Vec::new()).unwrap()
    }

    pub(crate) fn two_tate_spec() -> SkeletonSpec {
        SkeletonSpec::new(Cocycle::standard(2), 2, vec![unit_face("square", 2, 0, true)], Vec::new()).unwrap()
    }

    #[test]
    fn nondegeneracy() {
        assert!(check_nondegenerate(&unit_face("a", 2, 0, true)));
        assert!(!check_nondegenerate(&unit_face("a", 2, 0, false)));
        let mut squash = unit_face("a", 2, 0, true);
        squash.f_aff = AffineMap::new(vec![qvec(&[1, 1]), qvec(&[1, 1])], qvec(&[0, 0]), 2).unwrap();
        assert!(!check_nondegenerate(&squash));
    }

    #[test]
    fn canonical_totals() {
        let t = assemble_measure(&tate_spec(), &Metric::Canonical).unwrap();
        assert_eq!(t.measure.total_mass().unwrap(), q(1));
        assert_eq!(t.faces[0].density, Some(q(1)));
        let s = assemble_measure(&two_tate_spec(), &Metric::Canonical).unwrap();
        assert_eq!(s.measure.total_mass().unwrap(), q(2));
        assert_eq!(s.faces[0].density, Some(q(2)));
    }

    #[test]
    fn degenerate_faces_carry_nothing() {
        let spec = SkeletonSpec::new(
            Cocycle::standard(2),
            2,
            vec![unit_face("a", 2, 0, false)],
            Vec::new(),
        )
        .unwrap();
        let mu = assemble_measure(&spec, &Metric::Canonical).unwrap();
        assert_eq!(mu.measure, Measure::zero());
    }

    #[test]
    fn pl_face_measure() {
        let spec = tate_spec();
        let f = tangent_pl(spec.cocycle(), 2).unwrap().function;
        let mu = face_measure(&spec, &spec.faces()[0], &Metric::Pl(f)).unwrap();
        assert_eq!(
            mu.atoms,
            vec![(vec![frac(1, 4)], frac(1, 2)), (vec![frac(3, 4)], frac(1, 2))]
        );
    }

    #[test]
    fn metric_independence() {
        for spec in [tate_spec(), two_tate_spec()] {
            let canon = assemble_measure(&spec, &Metric::Canonical).unwrap().measure.total_mass().unwrap();
            for k in [1, 2, 3] {
                let f = tangent_pl(spec.cocycle(), k).unwrap().function;
                let pl = assemble_measure(&spec, &Metric::Pl(f)).unwrap();
                assert_eq!(pl.measure.total_mass().unwrap(), canon, "k={k}");
            }
        }
    }

    #[test]
    fn diagonal_face() {
        // a segment along the diagonal of the square torus, f_aff(y) = (y, y)
        let seg = Polytope::hull(&[qvec(&[0]), qvec(&[1])]).unwrap();
        let face = SkeletonFace {
            id: "diag".into(),
            carrier: seg,
            frame: AffineLatticeFrame::standard(1),
            e: 0,
            deg_h: q(1),
            f_aff: AffineMap::new(vec![qvec(&[1]), qvec(&[1])], qvec(&[0, 0]), 1).unwrap(),
            abelian_nondegenerate: true,
            boundary_ids: Vec::new(),
        };
        let spec = SkeletonSpec::new(Cocycle::standard(2), 1, vec![face], Vec::new()).unwrap();
        let canon = assemble_measure(&spec, &Metric::Canonical).unwrap();
        assert_eq!(canon.faces[0].density, Some(q(2)));
    }

    #[test]
    fn vertex_degrees() {
        let spec = tate_spec();
        let face = &spec.faces()[0];
        let f1 = tangent_pl(spec.cocycle(), 1).unwrap().function;
        assert_eq!(vertex_degree(&spec, face, &f1, &[frac(1, 2)]).unwrap(), q(1));
        assert_eq!(vertex_degree(&spec, face, &f1, &[frac(1, 3)]).unwrap_err(), Error::NonTransversalVertex);
        let f3 = tangent_pl(spec.cocycle(), 3).unwrap().function;
        for x in [frac(1, 6), frac(1, 2), frac(5, 6)] {
            assert_eq!(vertex_degree(&spec, face, &f3, &[x]).unwrap(), frac(1, 3));
        }
        let sq = two_tate_spec();
        let g = tangent_pl(sq.cocycle(), 1).unwrap().function;
        assert_eq!(vertex_degree(&sq, &sq.faces()[0], &g, &[frac(1, 2), frac(1, 2)]).unwrap(), q(2));
        // a point on an edge of the complex is not transversal for a 2-face
        assert_eq!(
            vertex_degree(&sq, &sq.faces()[0], &g, &[frac(1, 2), frac(1, 4)]).unwrap_err(),
            Error::NonTransversalVertex
        );
    }

    #[test]
    fn glued_circle() {
        let mut edge = unit_face("edge", 1, 0, true);
        edge.boundary_ids = vec!["v0".into(), "v1".into()];
        let shift = AffineMap::new(vec![qvec(&[1])], qvec(&[1]), 1).unwrap();
        let spec = SkeletonSpec::new(
            Cocycle::standard(1),
            1,
            vec![edge, point_face("v0", 0), point_face("v1", 1)],
            vec![Gluing { a: "v0".into(), b: "v1".into(), map: shift }],
        )
        .unwrap();
        let cs = canonical_subset(&spec).unwrap();
        assert_eq!(cs.faces, vec!["edge".to_string()]);
        assert_eq!(cs.measure.total_mass().unwrap(), q(1));
    }

    #[test]
    fn glued_faces_add_densities() {
        let a = unit_face("a", 1, 0, true);
        let mut b = unit_face("b", 1, 0, true);
        b.carrier = b.carrier.translate(&qvec(&[2]));
        b.frame = b.frame.with_basepoint(qvec(&[2]));
        let back = AffineMap::new(vec![qvec(&[1])], qvec(&[-2]), 1).unwrap();
        let spec = SkeletonSpec::new(
            Cocycle::standard(1),
            1,
            vec![a, b],
            vec![Gluing { a: "b".into(), b: "a".into(), map: back }],
        )
        .unwrap();
        let cs = canonical_subset(&spec).unwrap();
        assert_eq!(cs.measure.pieces.len(), 1);
        assert_eq!(cs.measure.pieces[0].density, q(2));
        assert_eq!(cs.measure.total_mass().unwrap(), q(2));
    }

    #[test]
    fn inconsistent_gluing() {
        let faces = vec![point_face("p", 0), point_face("r", 1)];
        let plus = AffineMap::new(vec![qvec(&[1])], qvec(&[1]), 1).unwrap();
        let spec = SkeletonSpec::new(
            Cocycle::standard(1),
            1,
            faces,
            vec![
                Gluing { a: "p".into(), b: "r".into(), map: plus.clone() },
                Gluing { a: "r".into(), b: "p".into(), map: plus },
            ],
        );
        // the second map sends r to 2, not to p
        assert!(matches!(spec, Err(Error::InvalidSpec(_))));
        let seg = |lo: i64| {
            let mut f = unit_face(&format!("s{lo}"), 1, 0, true);
            f.carrier = f.carrier.translate(&qvec(&[lo]));
            f.frame = f.frame.with_basepoint(qvec(&[lo]));
            f
        };
        let shift = AffineMap::new(vec![qvec(&[1])], qvec(&[1]), 1).unwrap();
        // also sends [0, 1] onto [1, 2], but reversed
        let mirror = AffineMap::new(vec![qvec(&[-1])], qvec(&[2]), 1).unwrap();
        let spec = SkeletonSpec::new(
            Cocycle::standard(1),
            1,
            vec![seg(0), seg(1)],
            vec![
                Gluing { a: "s0".into(), b: "s1".into(), map: shift },
                Gluing { a: "s0".into(), b: "s1".into(), map: mirror },
            ],
        )
        .unwrap();
        assert!(matches!(canonical_subset(&spec), Err(Error::InconsistentGluing(_))));
    }

    #[test]
    fn validation() {
        let mut f = unit_face("a", 1, 2, true);
        assert!(SkeletonSpec::new(Cocycle::standard(1), 1, vec![f.clone()], Vec::new()).is_err());
        f.e = 0;
        f.boundary_ids = vec!["missing".into()];
        assert!(SkeletonSpec::new(Cocycle::standard(1), 1, vec![f], Vec::new()).is_err());
    }
}
