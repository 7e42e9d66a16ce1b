//! Real Monge–Ampère measures of piecewise-linear and quadratic convex functions.
//!
//! Normalization is Alexandrov's throughout: a PL vertex carries the lattice
//! volume of its subdifferential and a quadratic `½ωᵀHω` has density `det H`.

use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Scalar, Vector};
use crate::plfunc::{linearity_cells, ConvexPL, PeriodicPLFunction};
use crate::polyhedra::{AffineLatticeFrame, Polytope};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

/// `y ↦ Ly + t`, with `L` stored as rows in the target space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: Matrix,
    offset: Vector,
    source_dim: usize,
}

impl AffineMap {
    pub fn new(linear: Matrix, offset: Vector, source_dim: usize) -> Result<Self> {
        if linear.len() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: offset.len(),
                got: linear.len(),
            });
        }
        if let Some(r) = linear.iter().find(|r| r.len() != source_dim) {
            return Err(Error::DimensionMismatch {
                expected: source_dim,
                got: r.len(),
            });
        }
        Ok(AffineMap {
            linear,
            offset,
            source_dim,
        })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: linalg::identity(n),
            offset: linalg::zeros(n),
            source_dim: n,
        }
    }

    pub fn linear(&self) -> &[Vector] {
        &self.linear
    }

    pub fn offset(&self) -> &[Scalar] {
        &self.offset
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, y: &[Scalar]) -> Vector {
        linalg::add(&linalg::mat_vec(&self.linear, y), &self.offset)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.linear, self.source_dim)
    }

    /// Linear part restricted to the span of `dirs`, as a target × dirs matrix.
    pub fn on_directions(&self, dirs: &[Vector]) -> Matrix {
        let cols = linalg::transpose(dirs, self.source_dim);
        linalg::mat_mul(&self.linear, &cols, dirs.len())
    }

    pub fn image(&self, p: &Polytope) -> Polytope {
        p.map_affine(&self.linear, &self.offset)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        if inner.target_dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                got: inner.target_dim(),
            });
        }
        AffineMap::new(
            linalg::mat_mul(&self.linear, &inner.linear, inner.source_dim),
            self.apply(&inner.offset),
            inner.source_dim,
        )
    }
}

/// Constant density with respect to the lattice volume of `frame` on `support`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LebesguePiece {
    pub support: Polytope,
    pub frame: AffineLatticeFrame,
    pub density: Scalar,
}

impl LebesguePiece {
    pub fn mass(&self) -> Result<Scalar> {
        Ok(&self.density * self.support.lattice_volume(&self.frame)?)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Measure {
    pub atoms: Vec<(Vector, Scalar)>,
    pub pieces: Vec<LebesguePiece>,
}

impl Measure {
    pub fn zero() -> Self {
        Measure::default()
    }

    pub fn total_mass(&self) -> Result<Scalar> {
        let mut t: Scalar = self.atoms.iter().map(|(_, m)| m.clone()).sum();
        for p in &self.pieces {
            t += p.mass()?;
        }
        Ok(t)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|(_, m)| !m.is_negative())
            && self.pieces.iter().all(|p| !p.density.is_negative())
    }

    pub fn scaled(mut self, s: &Scalar) -> Self {
        for (_, m) in &mut self.atoms {
            *m *= s;
        }
        for p in &mut self.pieces {
            p.density *= s;
        }
        self.consolidate()
    }

    pub fn plus(mut self, other: Measure) -> Self {
        self.atoms.extend(other.atoms);
        self.pieces.extend(other.pieces);
        self.consolidate()
    }

    /// Merges atoms at equal points and pieces with equal support and frame,
    /// dropping zero masses. Atoms end up in lexicographic order.
    pub fn consolidate(mut self) -> Self {
        self.atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut atoms: Vec<(Vector, Scalar)> = Vec::with_capacity(self.atoms.len());
        for (p, m) in self.atoms {
            match atoms.last_mut() {
                Some((q, acc)) if *q == p => *acc += m,
                _ => atoms.push((p, m)),
            }
        }
        atoms.retain(|(_, m)| !m.is_zero());
        let mut pieces: Vec<LebesguePiece> = Vec::with_capacity(self.pieces.len());
        for p in self.pieces {
            match pieces
                .iter_mut()
                .find(|q| q.support == p.support && q.frame == p.frame)
            {
                Some(q) => q.density += p.density,
                None => pieces.push(p),
            }
        }
        pieces.retain(|p| !p.density.is_zero());
        Measure { atoms, pieces }
    }
}

/// The dual polytope `{u : f(ω) − f(at) ≥ ⟨ω − at, u⟩ ∀ω}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdifferential {
    pub at: Vector,
    pub dual: Polytope,
}

impl Subdifferential {
    /// Lattice volume of the dual when it is full-dimensional, zero otherwise.
    pub fn mass(&self) -> Scalar {
        let n = self.dual.ambient_dim();
        if self.dual.dim() < n {
            return Scalar::zero();
        }
        self.dual
            .lattice_volume(&AffineLatticeFrame::standard(n))
            .expect("full-dimensional")
    }

    /// Tests the defining inequality for every dual vertex at every point.
    pub fn certify<F: ConvexPL>(&self, f: &F, points: &[Vector]) -> Result<bool> {
        let (f0, _) = f.active_pieces(&self.at)?;
        for w in points {
            let (fw, _) = f.active_pieces(w)?;
            let dw = linalg::sub(w, &self.at);
            if self
                .dual
                .vertices()
                .iter()
                .any(|u| &fw - &f0 < linalg::dot(&dw, u))
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Hull of the slopes of the pieces active at `ξ`.
pub fn subdifferential<F: ConvexPL>(f: &F, xi: &[Scalar]) -> Result<Subdifferential> {
    let (_, act) = f.active_pieces(xi)?;
    let slopes: Vec<Vector> = act.into_iter().map(|p| p.m).collect();
    Ok(Subdifferential {
        at: xi.to_vec(),
        dual: Polytope::hull(&slopes)?,
    })
}

#[derive(Clone, Debug)]
pub enum Region {
    /// Closed polytope.
    Polytope(Polytope),
    /// Half-open parallelepiped `{Σ tᵢλᵢ : 0 ≤ tᵢ < 1}`.
    FundamentalDomain,
}

impl Region {
    fn contains(&self, c: &Cocycle, x: &[Scalar]) -> bool {
        match self {
            Region::Polytope(p) => p.contains(x),
            Region::FundamentalDomain => c.in_fundamental_domain(x),
        }
    }

    fn bounding_box(&self, c: &Cocycle) -> (Vector, Vector) {
        match self {
            Region::Polytope(p) => p.bounding_box(),
            Region::FundamentalDomain => c.fundamental_polytope().bounding_box(),
        }
    }
}

/// Dirac atoms at the vertices of the cell complex of `f` inside `region`.
pub fn ma_pl(f: &PeriodicPLFunction, region: &Region) -> Result<Measure> {
    let c = f.cocycle();
    if let Region::Polytope(p) = region {
        if p.ambient_dim() != c.n() {
            return Err(Error::DimensionMismatch {
                expected: c.n(),
                got: p.ambient_dim(),
            });
        }
    }
    let d = linearity_cells(f)?.decomposition;
    let (lo, hi) = region.bounding_box(c);
    let mut verts: Vec<Vector> = d
        .translates_near(&lo, &hi)
        .into_iter()
        .flat_map(|(i, k)| {
            let t = c.lattice_point(&k);
            d.cells()[i]
                .vertices()
                .iter()
                .map(move |v| linalg::add(v, &t))
                .collect::<Vec<_>>()
        })
        .filter(|v| region.contains(c, v))
        .collect();
    verts.sort();
    verts.dedup();
    let atoms = verts
        .into_par_iter()
        .map(|v| {
            let s = subdifferential(f, &v)?;
            let neighbours: Vec<Vector> = d
                .cells_containing(&v)
                .into_iter()
                .flat_map(|(_, _, cell)| cell.vertices().to_vec())
                .collect();
            if !s.certify(f, &neighbours)? {
                return Err(Error::Invalid("subdifferential certificate failed".into()));
            }
            let m = s.mass();
            Ok((v, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Measure {
        atoms,
        pieces: Vec::new(),
    }
    .consolidate())
}

/// Monge–Ampère measure of `q ∘ A` on `support`, measured in `frame`.
pub fn ma_quadratic_restricted(
    c: &Cocycle,
    a: &AffineMap,
    support: &Polytope,
    frame: &AffineLatticeFrame,
) -> Result<Measure> {
    if !c.is_positive_definite() {
        return Err(Error::Unpolarized);
    }
    if a.target_dim() != c.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            got: a.target_dim(),
        });
    }
    if frame.ambient_dim() != a.source_dim() || support.ambient_dim() != a.source_dim() {
        return Err(Error::FrameMismatch);
    }
    // validates that the frame spans the support
    support.lattice_volume(frame)?;
    let m = a.on_directions(frame.basis());
    let k = frame.dim();
    let hess = linalg::mat_mul(
        &linalg::transpose(&m, k),
        &linalg::mat_mul(c.b(), &m, k),
        k,
    );
    let density = if linalg::rank(&m, k) < k {
        Scalar::zero()
    } else {
        linalg::det(&hess)
    };
    Ok(Measure {
        atoms: Vec::new(),
        pieces: vec![LebesguePiece {
            support: support.clone(),
            frame: frame.clone(),
            density,
        }],
    })
}

/// One branch of a pushforward: points of `source` are sent through `map`,
/// and images of pieces are measured in `target_frame`.
#[derive(Clone, Debug)]
pub struct PushMap {
    pub source: Polytope,
    pub map: AffineMap,
    pub target_frame: AffineLatticeFrame,
}

/// Pushes atoms and pieces along the first map whose source covers them.
pub fn pushforward(mu: &Measure, maps: &[PushMap]) -> Result<Measure> {
    let mut uncovered = Vec::new();
    let mut out = Measure::zero();
    for (p, m) in &mu.atoms {
        match maps.iter().find(|pm| pm.source.contains(p)) {
            Some(pm) => out.atoms.push((pm.map.apply(p), m.clone())),
            None => uncovered.push(format!("atom at {}", fmt_point(p))),
        }
    }
    for piece in &mu.pieces {
        let covering = maps.iter().find(|pm| {
            piece.support.vertices().iter().all(|v| pm.source.contains(v))
        });
        let Some(pm) = covering else {
            uncovered.push(format!(
                "piece with vertices {}",
                piece.support.vertices().iter().map(|v| fmt_point(v)).collect::<Vec<_>>().join(" ")
            ));
            continue;
        };
        let image = pm.map.image(&piece.support);
        if image.dim() != piece.support.dim() {
            return Err(Error::Invalid("pushforward map is not injective on a piece".into()));
        }
        let src = piece.support.lattice_volume(&piece.frame)?;
        let dst = image.lattice_volume(&pm.target_frame)?;
        out.pieces.push(LebesguePiece {
            support: image,
            frame: pm.target_frame.clone(),
            density: &piece.density * src / dst,
        });
    }
    if !uncovered.is_empty() {
        return Err(Error::Uncovered(uncovered.join(", ")));
    }
    Ok(out.consolidate())
}

fn fmt_point(p: &[Scalar]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::tangent_pl;
    use crate::linalg::{frac, q, qvec};
    use crate::plfunc::{AffinePiece, FinitePL};
    use proptest::prelude::*;

    fn seg(a: Scalar, b: Scalar) -> Polytope {
        Polytope::hull(&[vec![a], vec![b]]).unwrap()
    }

    #[test]
    fn conic_subdifferential() {
        let f = FinitePL::new(vec![
            AffinePiece::new(qvec(&[0]), q(0)),
            AffinePiece::new(qvec(&[1]), q(0)),
        ])
        .unwrap();
        let s = subdifferential(&f, &[q(0)]).unwrap();
        assert_eq!(s.dual, seg(q(0), q(1)));
        assert_eq!(s.mass(), q(1));
        assert!(s.certify(&f, &[vec![q(-3)], vec![q(5)]]).unwrap());
        let inner = subdifferential(&f, &[q(2)]).unwrap();
        assert_eq!(inner.dual.dim(), 0);
        assert_eq!(inner.mass(), q(0));
    }

    #[test]
    fn tate_atoms() {
        let c = Cocycle::standard(1);
        let t1 = tangent_pl(&c, 1).unwrap().function;
        let s = subdifferential(&t1, &[frac(1, 2)]).unwrap();
        assert_eq!(s.dual, seg(q(0), q(1)));
        let mu = ma_pl(&t1, &Region::FundamentalDomain).unwrap();
        assert_eq!(mu.atoms, vec![(vec![frac(1, 2)], q(1))]);
        let t3 = tangent_pl(&c, 3).unwrap().function;
        let mu = ma_pl(&t3, &Region::FundamentalDomain).unwrap();
        assert_eq!(mu.atoms.len(), 3);
        assert!(mu.atoms.iter().all(|(_, m)| *m == frac(1, 3)));
        let t5 = tangent_pl(&c, 5).unwrap().function;
        assert_eq!(ma_pl(&t5, &Region::FundamentalDomain).unwrap().total_mass().unwrap(), q(1));
        // closed region counts both ends of a period
        let closed = Region::Polytope(seg(frac(1, 2), frac(3, 2)));
        assert_eq!(ma_pl(&t1, &closed).unwrap().total_mass().unwrap(), q(2));
    }

    #[test]
    fn mass_is_stable_under_refinement() {
        let c = Cocycle::new(
            vec![qvec(&[2, 1]), qvec(&[0, 1])],
            vec![vec![frac(1, 2), q(0)], vec![q(0), q(1)]],
            vec![frac(1, 3), q(0)],
            true,
        )
        .unwrap();
        let expect = c.det_b() * c.covolume();
        for k in 1..=3 {
            let f = tangent_pl(&c, k).unwrap().function;
            let mu = ma_pl(&f, &Region::FundamentalDomain).unwrap();
            assert_eq!(mu.total_mass().unwrap(), expect, "k={k}");
        }
    }

    #[test]
    fn quadratic_densities() {
        let c1 = Cocycle::standard(1);
        let mu = ma_quadratic_restricted(&c1, &AffineMap::identity(1), &seg(q(0), q(1)), &AffineLatticeFrame::standard(1)).unwrap();
        assert_eq!(mu.pieces[0].density, q(1));
        assert_eq!(mu.total_mass().unwrap(), q(1));
        let c2 = Cocycle::standard(2);
        let diag = AffineMap::new(vec![qvec(&[1]), qvec(&[1])], qvec(&[0, 0]), 1).unwrap();
        let mu = ma_quadratic_restricted(&c2, &diag, &seg(q(0), q(1)), &AffineLatticeFrame::standard(1)).unwrap();
        assert_eq!(mu.pieces[0].density, q(2));
        let flat = AffineMap::new(vec![qvec(&[1, 1]), qvec(&[1, 1])], qvec(&[0, 0]), 2).unwrap();
        let sq = Polytope::axis_box(&qvec(&[0, 0]), &qvec(&[1, 1])).unwrap();
        let mu = ma_quadratic_restricted(&c2, &flat, &sq, &AffineLatticeFrame::standard(2)).unwrap();
        assert_eq!(mu.total_mass().unwrap(), q(0));
    }

    #[test]
    fn quadratic_on_fundamental_domain() {
        let c = Cocycle::new(
            vec![qvec(&[1, 1]), qvec(&[0, 3])],
            vec![qvec(&[2, 1]), qvec(&[1, 1])],
            vec![q(1), frac(3, 2)],
            true,
        )
        .unwrap();
        let mu = ma_quadratic_restricted(&c, &AffineMap::identity(2), &c.fundamental_polytope(), &AffineLatticeFrame::standard(2)).unwrap();
        assert_eq!(mu.total_mass().unwrap(), c.det_b() * c.covolume());
    }

    #[test]
    fn pushforward_examples() {
        let unit = AffineLatticeFrame::standard(1);
        let mu = Measure {
            atoms: vec![(vec![q(0)], q(1)), (vec![q(1)], q(1))],
            pieces: Vec::new(),
        };
        let fold = PushMap {
            source: seg(q(0), q(1)),
            map: AffineMap::new(vec![qvec(&[0])], qvec(&[0]), 1).unwrap(),
            target_frame: unit.clone(),
        };
        let out = pushforward(&mu, &[fold]).unwrap();
        assert_eq!(out.atoms, vec![(vec![q(0)], q(2))]);

        let mu = Measure {
            atoms: Vec::new(),
            pieces: vec![LebesguePiece {
                support: seg(q(0), q(2)),
                frame: unit.clone(),
                density: q(1),
            }],
        };
        let half = PushMap {
            source: seg(q(0), q(2)),
            map: AffineMap::new(vec![vec![frac(1, 2)]], qvec(&[0]), 1).unwrap(),
            target_frame: unit.clone(),
        };
        let out = pushforward(&mu, &[half.clone()]).unwrap();
        assert_eq!(out.pieces[0].density, q(2));
        assert_eq!(out.pieces[0].support, seg(q(0), q(1)));
        assert_eq!(out.total_mass().unwrap(), q(2));
        let same = PushMap {
            source: seg(q(0), q(2)),
            map: AffineMap::identity(1),
            target_frame: unit,
        };
        assert_eq!(pushforward(&mu, &[same]).unwrap(), mu);

        let stray = Measure {
            atoms: vec![(vec![q(5)], q(1))],
            pieces: Vec::new(),
        };
        assert!(matches!(pushforward(&stray, &[half]), Err(Error::Uncovered(_))));
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(Measure::zero().total_mass().unwrap(), q(0));
        let mu = Measure {
            atoms: vec![(qvec(&[3, 3]), frac(3, 2))],
            pieces: vec![LebesguePiece {
                support: Polytope::axis_box(&qvec(&[0, 0]), &qvec(&[1, 1])).unwrap(),
                frame: AffineLatticeFrame::standard(2),
                density: frac(1, 2),
            }],
        };
        assert_eq!(mu.total_mass().unwrap(), q(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pushforward_conserves_mass(
            masses in proptest::collection::vec((-4i64..4, -4i64..4, 1i64..9), 0..5),
            dens in 1i64..7,
            a in -3i64..4, bb in -3i64..4,
            t0 in -5i64..5, t1 in -5i64..5,
        ) {
            // [[1, a], [0, 1]]·[[1, 0], [b, 1]] is unimodular
            let l = vec![vec![q(1 + a * bb), q(a)], vec![q(bb), q(1)]];
            let src = Polytope::axis_box(&qvec(&[-4, -4]), &qvec(&[4, 4])).unwrap();
            let mu = Measure {
                atoms: masses.iter().map(|&(x, y, m)| (qvec(&[x, y]), frac(m, 3))).collect(),
                pieces: vec![LebesguePiece {
                    support: Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 1])]).unwrap(),
                    frame: AffineLatticeFrame::standard(2),
                    density: frac(dens, 5),
                }],
            }.consolidate();
            let pm = PushMap {
                source: src,
                map: AffineMap::new(l, qvec(&[t0, t1]), 2).unwrap(),
                target_frame: AffineLatticeFrame::standard(2),
            };
            let out = pushforward(&mu, &[pm]).unwrap();
            prop_assert_eq!(out.total_mass().unwrap(), mu.total_mass().unwrap());
            prop_assert!(out.is_nonnegative());
        }
    }
}
