//! Exact rational polytopes with paired V- and H-representations.

mod dd;
pub mod lattice;

use crate::error::{Error, Result};
use crate::linalg::{self, factorial, primitive_integer, to_rational_vec, Matrix, Scalar, Vector};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

/// The set `{x : normal·x ≤ offset}` (or `=` when used as an equation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: Scalar,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: Scalar) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset − normal·x`; nonnegative inside.
    pub fn slack(&self, x: &[Scalar]) -> Scalar {
        &self.offset - linalg::dot(&self.normal, x)
    }

    /// Rescales to a primitive integer normal, keeping the orientation.
    fn normalized(self) -> Self {
        let ints = primitive_integer(&self.normal);
        // primitive_integer scales by a positive factor, recover it from a nonzero entry
        let Some(i) = ints.iter().position(|x| !x.is_zero()) else {
            return self;
        };
        let factor = linalg::from_int(&ints[i]) / &self.normal[i];
        Halfspace {
            normal: to_rational_vec(&ints),
            offset: self.offset * factor,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<Vector>,
    // reduced row echelon basis of the linear hull
    directions: Matrix,
    equations: Vec<Halfspace>,
    facets: Vec<Halfspace>,
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

impl Hash for Polytope {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient_dim.hash(state);
        self.vertices.hash(state);
    }
}

impl Polytope {
    /// Convex hull of a nonempty set of points.
    pub fn hull(points: &[Vector]) -> Result<Polytope> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyInput("hull of no points".into()));
        };
        let n = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        let mut pts: Vec<Vector> = points.to_vec();
        pts.sort();
        pts.dedup();
        Ok(Self::hull_sorted(pts, n))
    }

    fn hull_sorted(pts: Vec<Vector>, n: usize) -> Polytope {
        let p0 = pts[0].clone();
        let diffs: Matrix = pts[1..].iter().map(|p| linalg::sub(p, &p0)).collect();
        let (directions, piv) = linalg::rref(&diffs, n);
        let k = piv.len();
        let mut equations: Vec<Halfspace> = linalg::nullspace(&directions, n)
            .into_iter()
            .map(|a| {
                let a = to_rational_vec(&primitive_integer(&a));
                let off = linalg::dot(&a, &p0);
                Halfspace::new(a, off)
            })
            .collect();
        equations.sort();
        if k == 0 {
            return Polytope {
                ambient_dim: n,
                vertices: vec![p0],
                directions,
                equations,
                facets: Vec::new(),
                incidence: Vec::new(),
            };
        }
        let coords: Vec<Vector> = pts
            .iter()
            .map(|p| piv.iter().map(|&j| &p[j] - &p0[j]).collect())
            .collect();
        let rows: Matrix = coords
            .iter()
            .map(|y| {
                let mut r = vec![Scalar::one()];
                r.extend(y.iter().cloned());
                r
            })
            .collect();
        let rays = dd::extreme_rays(&rows, k + 1).expect("affinely spanning points");
        let mut local: Vec<(Vector, Scalar)> = Vec::new();
        let mut facets: Vec<Halfspace> = Vec::new();
        for r in rays {
            let c = &r[1..];
            if linalg::is_zero_vec(c) {
                continue;
            }
            let mut normal = linalg::zeros(n);
            let mut offset = r[0].clone();
            for (cj, &j) in c.iter().zip(&piv) {
                normal[j] = -cj.clone();
                offset -= cj * &p0[j];
            }
            local.push((c.to_vec(), r[0].clone()));
            facets.push(Halfspace::new(normal, offset).normalized());
        }
        // a point is a vertex iff its tight facet normals have rank k
        let tight: Vec<Vec<usize>> = coords
            .iter()
            .map(|y| {
                (0..local.len())
                    .filter(|&h| (&local[h].1 + linalg::dot(&local[h].0, y)).is_zero())
                    .collect()
            })
            .collect();
        let mut keep = Vec::new();
        for (i, t) in tight.iter().enumerate() {
            let normals: Matrix = t.iter().map(|&h| local[h].0.clone()).collect();
            if linalg::rank(&normals, k) == k {
                keep.push(i);
            }
        }
        let vertices: Vec<Vector> = keep.iter().map(|&i| pts[i].clone()).collect();
        let mut order: Vec<usize> = (0..facets.len()).collect();
        order.sort_by(|&a, &b| facets[a].cmp(&facets[b]));
        let facets: Vec<Halfspace> = order.iter().map(|&h| facets[h].clone()).collect();
        let incidence: Vec<Vec<usize>> = facets
            .iter()
            .map(|f| {
                (0..vertices.len())
                    .filter(|&v| f.slack(&vertices[v]).is_zero())
                    .collect()
            })
            .collect();
        let out = Polytope {
            ambient_dim: n,
            vertices,
            directions,
            equations,
            facets,
            incidence,
        };
        debug_assert!(out.representations_agree());
        out
    }

    fn representations_agree(&self) -> bool {
        let k = self.dim();
        self.vertices.iter().all(|v| {
            self.facets.iter().all(|f| !f.slack(v).is_negative())
                && self.equations.iter().all(|e| e.slack(v).is_zero())
        }) && self.incidence.iter().all(|inc| inc.len() >= k)
    }

    /// The polytope `{x : ineqs hold, eqs hold}`; `None` when empty.
    ///
    /// Fails with [`Error::Unbounded`] if the constraints do not bound a polytope.
    pub fn from_halfspaces(
        n: usize,
        ineqs: &[Halfspace],
        eqs: &[Halfspace],
    ) -> Result<Option<Polytope>> {
        let mut rows: Matrix = Vec::with_capacity(1 + ineqs.len() + 2 * eqs.len());
        let mut homog = |h: &Halfspace, sign: i64| -> Result<()> {
            if h.normal.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: h.normal.len(),
                });
            }
            let s = linalg::q(sign);
            let mut r = vec![&h.offset * &s];
            r.extend(h.normal.iter().map(|a| -(a * &s)));
            rows.push(r);
            Ok(())
        };
        for h in ineqs {
            homog(h, 1)?;
        }
        for h in eqs {
            homog(h, 1)?;
            homog(h, -1)?;
        }
        let mut t_row = linalg::zeros(n + 1);
        t_row[0] = Scalar::one();
        rows.insert(0, t_row);
        let Some(rays) = dd::extreme_rays(&rows, n + 1) else {
            return Err(Error::Unbounded);
        };
        let mut points = Vec::new();
        for r in rays {
            if r[0].is_zero() {
                return Err(Error::Unbounded);
            }
            let t = r[0].clone();
            points.push(r[1..].iter().map(|x| x / &t).collect::<Vector>());
        }
        if points.is_empty() {
            return Ok(None);
        }
        Ok(Some(Polytope::hull(&points)?))
    }

    /// Axis-parallel box `∏ [lo_i, hi_i]`.
    pub fn axis_box(lo: &[Scalar], hi: &[Scalar]) -> Result<Polytope> {
        let n = lo.len();
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            hs.push(Halfspace::new(linalg::unit(n, i), hi[i].clone()));
            hs.push(Halfspace::new(linalg::neg(&linalg::unit(n, i)), -lo[i].clone()));
        }
        Polytope::from_halfspaces(n, &hs, &[])?.ok_or_else(|| Error::EmptyInput("empty box".into()))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Equations cutting out the affine hull.
    pub fn equations(&self) -> &[Halfspace] {
        &self.equations
    }

    /// Vertex indices on each facet, aligned with [`Polytope::facets`].
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Reduced basis of the linear hull `𝕃_P`.
    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    /// All inequalities and equations, the latter split into two inequalities.
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        let mut out = self.facets.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(Halfspace::new(linalg::neg(&e.normal), -e.offset.clone()));
        }
        out
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    pub fn relint_contains(&self, x: &[Scalar]) -> bool {
        self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|f| f.slack(x).is_positive())
    }

    pub fn intersect(&self, other: &Polytope) -> Option<Polytope> {
        assert_eq!(self.ambient_dim, other.ambient_dim, "ambient dimensions differ");
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Polytope::from_halfspaces(self.ambient_dim, &ineqs, &eqs).expect("intersection of polytopes is bounded")
    }

    /// Intersection with extra inequalities.
    pub fn cut(&self, extra: &[Halfspace]) -> Option<Polytope> {
        let mut ineqs = self.facets.clone();
        ineqs.extend(extra.iter().cloned());
        Polytope::from_halfspaces(self.ambient_dim, &ineqs, &self.equations).expect("cut of a polytope is bounded")
    }

    pub fn translate(&self, t: &[Scalar]) -> Polytope {
        let shift = |h: &Halfspace| Halfspace::new(h.normal.clone(), &h.offset + linalg::dot(&h.normal, t));
        Polytope {
            ambient_dim: self.ambient_dim,
            vertices: self.vertices.iter().map(|v| linalg::add(v, t)).collect(),
            directions: self.directions.clone(),
            equations: self.equations.iter().map(shift).collect(),
            facets: self.facets.iter().map(shift).collect(),
            incidence: self.incidence.clone(),
        }
    }

    /// Image under `x ↦ a·x + t` where `a` has one row per output coordinate.
    pub fn map_affine(&self, a: &[Vector], t: &[Scalar]) -> Polytope {
        let pts: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| linalg::add(&linalg::mat_vec(a, v), t))
            .collect();
        Polytope::hull(&pts).expect("nonempty")
    }

    pub fn barycenter(&self) -> Vector {
        let k = linalg::q(self.vertices.len() as i64);
        let mut s = linalg::zeros(self.ambient_dim);
        for v in &self.vertices {
            s = linalg::add(&s, v);
        }
        linalg::scale(&s, &k.recip())
    }

    pub fn bounding_box(&self) -> (Vector, Vector) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..self.ambient_dim {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }

    fn set_dim(&self, set: &[usize]) -> usize {
        let base = &self.vertices[set[0]];
        let diffs: Matrix = set[1..].iter().map(|&i| linalg::sub(&self.vertices[i], base)).collect();
        linalg::rank(&diffs, self.ambient_dim)
    }

    /// Vertex index sets of all nonempty faces, including the polytope itself,
    /// sorted by dimension and then lexicographically.
    pub fn face_vertex_sets(&self) -> Vec<Vec<usize>> {
        let full: Vec<usize> = (0..self.vertices.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        let mut queue = vec![full];
        while let Some(s) = queue.pop() {
            for inc in &self.incidence {
                let t: Vec<usize> = s.iter().copied().filter(|v| inc.binary_search(v).is_ok()).collect();
                if !t.is_empty() && t.len() < s.len() && seen.insert(t.clone()) {
                    queue.push(t);
                }
            }
        }
        let mut out: Vec<(usize, Vec<usize>)> = seen.into_iter().map(|s| (self.set_dim(&s), s)).collect();
        out.sort();
        out.into_iter().map(|(_, s)| s).collect()
    }

    pub fn faces(&self) -> Vec<Polytope> {
        self.face_vertex_sets()
            .into_iter()
            .map(|s| self.sub_polytope(&s))
            .collect()
    }

    /// Hull of a subset of the vertices.
    pub fn sub_polytope(&self, set: &[usize]) -> Polytope {
        let pts: Vec<Vector> = set.iter().map(|&i| self.vertices[i].clone()).collect();
        Polytope::hull(&pts).expect("nonempty")
    }

    /// Whether `self` is a (nonempty) face of `other`.
    pub fn is_face_of(&self, other: &Polytope) -> bool {
        if self.ambient_dim != other.ambient_dim || !self.vertices.iter().all(|v| other.contains(v)) {
            return false;
        }
        // the smallest face of `other` containing a relative interior point
        let p = self.barycenter();
        let mut set: Vec<usize> = (0..other.vertices.len()).collect();
        for (f, inc) in other.facets.iter().zip(&other.incidence) {
            if f.slack(&p).is_zero() {
                set.retain(|v| inc.binary_search(v).is_ok());
            }
        }
        set.len() == self.vertices.len() && set.iter().all(|&i| self.vertices.binary_search(&other.vertices[i]).is_ok())
    }

    /// Triangulation without new vertices, as lists of vertex indices.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let full: Vec<usize> = (0..self.vertices.len()).collect();
        self.triangulate_set(&full, self.dim())
    }

    fn triangulate_set(&self, set: &[usize], d: usize) -> Vec<Vec<usize>> {
        if d == 0 {
            return vec![vec![set[0]]];
        }
        let apex = set[0];
        let mut sub_faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for inc in &self.incidence {
            let t: Vec<usize> = set.iter().copied().filter(|v| inc.binary_search(v).is_ok()).collect();
            if t.len() >= d && !t.contains(&apex) && self.set_dim(&t) == d - 1 {
                sub_faces.insert(t);
            }
        }
        let mut out = Vec::new();
        for f in sub_faces {
            for mut s in self.triangulate_set(&f, d - 1) {
                s.push(apex);
                out.push(s);
            }
        }
        out
    }

    /// Dimension and saturated lattice frame of the affine hull.
    pub fn affine_data(&self) -> (usize, AffineLatticeFrame) {
        let basis = lattice::saturated_basis(&self.directions, self.ambient_dim);
        (
            self.dim(),
            AffineLatticeFrame {
                basepoint: self.vertices[0].clone(),
                basis,
            },
        )
    }

    /// Volume in the coordinates of `frame`, whose lattice has covolume one.
    pub fn lattice_volume(&self, frame: &AffineLatticeFrame) -> Result<Scalar> {
        let k = self.dim();
        if frame.basis.len() != k || frame.ambient_dim() != self.ambient_dim {
            return Err(Error::FrameMismatch);
        }
        if !self.equations.iter().all(|e| e.slack(&frame.basepoint).is_zero()) {
            return Err(Error::FrameMismatch);
        }
        let mut joint = frame.basis.clone();
        joint.extend(self.directions.iter().cloned());
        if linalg::rank(&joint, self.ambient_dim) != k {
            return Err(Error::FrameMismatch);
        }
        if k == 0 {
            return Ok(Scalar::one());
        }
        let ys: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| frame.coords(v).ok_or(Error::FrameMismatch))
            .collect::<Result<_>>()?;
        let mut total = Scalar::zero();
        for s in self.triangulate() {
            let m: Matrix = s[1..].iter().map(|&i| linalg::sub(&ys[i], &ys[s[0]])).collect();
            total += linalg::det(&m).abs();
        }
        Ok(total / factorial(k))
    }

    /// Lattice volume with respect to the saturated frame of the affine hull.
    pub fn normalized_volume(&self) -> Scalar {
        let (_, frame) = self.affine_data();
        self.lattice_volume(&frame).expect("own frame spans the hull")
    }
}

/// An affine subspace with a chosen lattice basis of its direction space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineLatticeFrame {
    basepoint: Vector,
    basis: Vec<Vector>,
}

impl AffineLatticeFrame {
    /// Checks independence, integrality and saturation of the basis.
    pub fn new(basepoint: Vector, basis: Vec<Vector>) -> Result<Self> {
        let n = basepoint.len();
        if let Some(b) = basis.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if linalg::rank(&basis, n) != basis.len() {
            return Err(Error::InvalidFrame("basis vectors are dependent".into()));
        }
        if !lattice::is_saturated(&basis, n) {
            return Err(Error::InvalidFrame(
                "basis is not a lattice basis of its span intersected with the ambient lattice".into(),
            ));
        }
        Ok(AffineLatticeFrame { basepoint, basis })
    }

    /// The origin with the standard basis of `ℤⁿ`.
    pub fn standard(n: usize) -> Self {
        AffineLatticeFrame {
            basepoint: linalg::zeros(n),
            basis: linalg::identity(n),
        }
    }

    pub fn basepoint(&self) -> &[Scalar] {
        &self.basepoint
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basepoint.len()
    }

    /// Coordinates `y` with `x = basepoint + Σ yᵢ·basisᵢ`, if `x` lies in the subspace.
    pub fn coords(&self, x: &[Scalar]) -> Option<Vector> {
        let n = self.ambient_dim();
        let rhs = linalg::sub(x, &self.basepoint);
        if self.basis.is_empty() {
            return linalg::is_zero_vec(&rhs).then(Vec::new);
        }
        let bt = linalg::transpose(&self.basis, n);
        linalg::solve(&bt, &rhs, self.basis.len())
    }

    pub fn point(&self, y: &[Scalar]) -> Vector {
        let n = self.ambient_dim();
        linalg::add(&self.basepoint, &linalg::vec_mat(y, &self.basis, n))
    }

    pub fn with_basepoint(&self, basepoint: Vector) -> Self {
        AffineLatticeFrame {
            basepoint,
            basis: self.basis.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, q, qvec};
    use proptest::prelude::*;

    fn square(s: i64) -> Polytope {
        Polytope::hull(&[qvec(&[0, 0]), qvec(&[s, 0]), qvec(&[0, s]), qvec(&[s, s])]).unwrap()
    }

    #[test]
    fn hull_drops_interior_point() {
        let p = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), vec![frac(1, 2), frac(1, 4)]]).unwrap();
        assert_eq!(p.vertices(), &[qvec(&[0, 0]), qvec(&[0, 1]), qvec(&[1, 0])]);
        assert_eq!(p.facets().len(), 3);
    }

    #[test]
    fn single_point_is_zero_dimensional() {
        let p = Polytope::hull(&[qvec(&[0, 0])]).unwrap();
        assert_eq!(p.dim(), 0);
        assert_eq!(p.equations().len(), 2);
    }

    #[test]
    fn square_halfspaces_match_brute_force() {
        let p = square(2);
        assert_eq!(p.facets().len(), 4);
        // brute force: lines through vertex pairs with all vertices on one side
        let vs = p.vertices();
        let mut count = 0;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let d = linalg::sub(&vs[j], &vs[i]);
                let nrm = vec![d[1].clone(), -d[0].clone()];
                let vals: Vec<Scalar> = vs.iter().map(|v| linalg::dot(&nrm, &linalg::sub(v, &vs[i]))).collect();
                if vals.iter().all(|x| !x.is_negative()) || vals.iter().all(|x| !x.is_positive()) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 4);
    }

    #[test]
    fn intersect_examples() {
        let a = Polytope::axis_box(&qvec(&[0, 0]), &qvec(&[1, 1])).unwrap();
        let b = Polytope::axis_box(&[frac(1, 2), q(0)], &[frac(3, 2), q(1)]).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c, Polytope::axis_box(&[frac(1, 2), q(0)], &qvec(&[1, 1])).unwrap());

        let s1 = Polytope::hull(&[qvec(&[0]), qvec(&[1])]).unwrap();
        let s2 = Polytope::hull(&[qvec(&[2]), qvec(&[3])]).unwrap();
        assert!(s1.intersect(&s2).is_none());

        let tri = Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])]).unwrap();
        let diag = Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 2])]).unwrap();
        let seg = tri.intersect(&diag).unwrap();
        assert_eq!(seg.vertices(), &[qvec(&[0, 0]), qvec(&[1, 1])]);
    }

    #[test]
    fn affine_data_examples() {
        let seg = Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 2])]).unwrap();
        let (d, f) = seg.affine_data();
        assert_eq!(d, 1);
        assert_eq!(f.basis(), &[qvec(&[1, 1])]);
        assert_eq!(seg.lattice_volume(&f).unwrap(), q(2));

        let pt = Polytope::hull(&[qvec(&[3, 1])]).unwrap();
        let (d, f) = pt.affine_data();
        assert_eq!((d, f.dim()), (0, 0));
        assert_eq!(pt.lattice_volume(&f).unwrap(), q(1));

        let tri = Polytope::hull(&[qvec(&[0, 0, 0]), qvec(&[2, 0, 0]), qvec(&[0, 2, 0])]).unwrap();
        let (d, f) = tri.affine_data();
        assert_eq!(d, 2);
        assert_eq!(f.basis(), &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]);
    }

    #[test]
    fn volumes() {
        assert_eq!(square(1).lattice_volume(&AffineLatticeFrame::standard(2)).unwrap(), q(1));
        let simplex = Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])]).unwrap();
        // oracle: |det(2e1, 2e2)| / 2!
        let oracle = linalg::det(&[qvec(&[2, 0]), qvec(&[0, 2])]) / factorial(2);
        assert_eq!(simplex.normalized_volume(), oracle);
        let seg = Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 2])]).unwrap();
        assert_eq!(
            seg.lattice_volume(&AffineLatticeFrame::standard(2)),
            Err(Error::FrameMismatch)
        );
    }

    #[test]
    fn face_counts() {
        let seg = Polytope::hull(&[qvec(&[0]), qvec(&[1])]).unwrap();
        assert_eq!(seg.faces().len(), 3);
        assert_eq!(square(1).faces().len(), 9);
        let cube = Polytope::axis_box(&qvec(&[0, 0, 0]), &qvec(&[1, 1, 1])).unwrap();
        let faces = cube.faces();
        assert_eq!(faces.len(), 27);
        // oracle: faces of the cube are products of {0},{1},[0,1] per coordinate
        let by_dim = |d: usize| faces.iter().filter(|f| f.dim() == d).count();
        assert_eq!((by_dim(0), by_dim(1), by_dim(2), by_dim(3)), (8, 12, 6, 1));
    }

    #[test]
    fn face_relation() {
        let sq = square(1);
        let edge = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0])]).unwrap();
        let half = Polytope::hull(&[qvec(&[0, 0]), vec![frac(1, 2), q(0)]]).unwrap();
        assert!(edge.is_face_of(&sq));
        assert!(sq.is_face_of(&sq));
        assert!(!half.is_face_of(&sq));
    }

    #[test]
    fn unbounded_rejected() {
        let h = [Halfspace::new(qvec(&[1]), q(1))];
        assert_eq!(Polytope::from_halfspaces(1, &h, &[]), Err(Error::Unbounded));
    }

    #[test]
    fn frame_saturation_checked() {
        assert!(AffineLatticeFrame::new(qvec(&[0, 0]), vec![qvec(&[2, 0])]).is_err());
        assert!(AffineLatticeFrame::new(qvec(&[0, 0]), vec![qvec(&[1, 1])]).is_ok());
    }

    fn points(dim: usize) -> impl Strategy<Value = Vec<Vector>> {
        prop::collection::vec(prop::collection::vec(-3i64..4, dim), 1..7)
            .prop_map(|ps| ps.iter().map(|p| qvec(p)).collect())
    }

    /// Products of elementary shears and a sign flip.
    fn unimodular() -> impl Strategy<Value = Vec<Vector>> {
        (prop::collection::vec((0usize..2, -2i64..3), 0..4), prop::bool::ANY).prop_map(|(ops, flip)| {
            let mut m = vec![qvec(&[1, 0]), qvec(&[0, 1])];
            for (i, s) in ops {
                let add = linalg::scale(&m[1 - i], &q(s));
                m[i] = linalg::add(&m[i], &add);
            }
            if flip {
                m.swap(0, 1);
            }
            m
        })
    }

    proptest! {
        #[test]
        fn volume_is_unimodular_invariant(ps in points(2), a in unimodular(), t in prop::collection::vec(-3i64..4, 2)) {
            let p = Polytope::hull(&ps).unwrap();
            let image = p.map_affine(&a, &qvec(&t));
            prop_assert_eq!(image.dim(), p.dim());
            prop_assert_eq!(image.normalized_volume(), p.normalized_volume());
        }

        #[test]
        fn intersection_is_idempotent_and_commutative(ps in points(3), qs in points(3)) {
            let (p, r) = (Polytope::hull(&ps).unwrap(), Polytope::hull(&qs).unwrap());
            let pp = p.intersect(&p).unwrap();
            prop_assert_eq!(pp.vertices(), p.vertices());
            let pr = p.intersect(&r).map(|x| x.vertices().to_vec());
            let rp = r.intersect(&p).map(|x| x.vertices().to_vec());
            prop_assert_eq!(pr, rp);
        }

        #[test]
        fn faces_meet_in_faces(ps in points(3)) {
            let p = Polytope::hull(&ps).unwrap();
            let faces = p.faces();
            for f in &faces {
                prop_assert!(f.is_face_of(&p));
                for g in &faces {
                    if let Some(h) = f.intersect(g) {
                        prop_assert!(h.is_face_of(&p));
                    }
                }
            }
        }
    }
}
