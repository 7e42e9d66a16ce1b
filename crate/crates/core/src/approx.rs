//! Strictly convex, periodic, Σ-transversal piecewise-linear approximations.

use crate::cocycle::{integer_box, Cocycle};
use crate::error::{Error, Result};
use crate::linalg::{self, frac, q, Matrix, Scalar, Vector};
use crate::plfunc::{
    check_transversal, close_under_faces, linearity_cells, orbit_equivalent, periodicity_report,
    translate_piece, AffinePiece, LinearityCells, PeriodicDecomposition, PeriodicPLFunction,
    TransversalityReport,
};
use crate::polyhedra::Polytope;
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::time::Instant;

/// Tangent of the canonical function at `ω₀`.
pub fn tangent_piece(c: &Cocycle, omega0: &[Scalar]) -> AffinePiece {
    let m = c.canonical_gradient(omega0);
    let cc = c.quadratic(omega0) - linalg::dot(&m, omega0);
    AffinePiece::new(m, cc)
}

/// Tangent envelope of the canonical function with its cells and exact gap.
#[derive(Clone, Debug)]
pub struct TangentApprox {
    pub function: PeriodicPLFunction,
    pub cells: LinearityCells,
    /// `sup (q − f)`, attained at a cell vertex.
    pub sup_error: Scalar,
}

/// Tangents of the canonical function at the points of `(1/k)Λ` in the fundamental domain.
pub fn tangent_pl(c: &Cocycle, k: usize) -> Result<TangentApprox> {
    if !c.is_positive_definite() {
        return Err(Error::Unpolarized);
    }
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let n = c.n();
    let kk = q(k as i64);
    let pieces: Vec<AffinePiece> = integer_box(&vec![(0, k as i64 - 1); n])
        .into_iter()
        .map(|j| {
            let t: Vector = j.iter().map(|&x| q(x) / &kk).collect();
            tangent_piece(c, &linalg::vec_mat(&t, c.periods(), n))
        })
        .collect();
    let function = PeriodicPLFunction::new(c.clone(), pieces)?;
    let cells = linearity_cells(&function)?;
    let sup_error = cells
        .decomposition
        .cells()
        .iter()
        .zip(&cells.cell_to_piece)
        .flat_map(|(cell, &pi)| {
            let p = &function.pieces()[pi];
            cell.vertices().iter().map(move |v| c.quadratic(v) - p.value(v))
        })
        .max()
        .unwrap_or_else(Scalar::zero);
    Ok(TangentApprox {
        function,
        cells,
        sup_error,
    })
}

/// Output of barycentric strictification.
#[derive(Clone, Debug)]
pub struct Strictified {
    pub function: PeriodicPLFunction,
    pub decomposition: PeriodicDecomposition,
    /// The drop at top-dimensional barycenters, which equals `sup (f_in − f_out)`.
    pub delta_used: Scalar,
}

const STRICTIFY_HALVINGS: usize = 24;

/// Lowers `f` at the barycenters of the faces of its cells of linearity.
pub fn barycentric_strictify(f: &PeriodicPLFunction, delta: &Scalar) -> Result<Strictified> {
    let cells = linearity_cells(f)?;
    barycentric_strictify_on(f, &cells.decomposition, delta)
}

/// Complete flags of faces, as chains of vertex index sets from a vertex up to the cell.
fn flags(cell: &Polytope) -> Vec<Vec<Vec<usize>>> {
    let sets = cell.face_vertex_sets();
    let dims: Vec<usize> = sets.iter().map(|s| cell.sub_polytope(s).dim()).collect();
    fn extend(
        chain: &mut Vec<usize>,
        sets: &[Vec<usize>],
        dims: &[usize],
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let top = *chain.last().expect("nonempty");
        if dims[top] == 0 {
            out.push(chain.iter().rev().map(|&i| sets[i].clone()).collect());
            return;
        }
        for i in 0..sets.len() {
            if dims[i] + 1 == dims[top] && sets[i].iter().all(|v| sets[top].contains(v)) {
                chain.push(i);
                extend(chain, sets, dims, out);
                chain.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut vec![sets.len() - 1], &sets, &dims, &mut out);
    out
}

/// [`barycentric_strictify`] on an explicitly given decomposition on which `f` is cellwise affine.
pub fn barycentric_strictify_on(
    f: &PeriodicPLFunction,
    d: &PeriodicDecomposition,
    delta: &Scalar,
) -> Result<Strictified> {
    if !delta.is_positive() {
        return Err(Error::Invalid("delta must be positive".into()));
    }
    let c = f.cocycle();
    let n = c.n();
    // each simplex: its n+1 points, point i being the barycenter of an i-dimensional face
    let mut simplices: Vec<Vec<Vector>> = Vec::new();
    for cell in d.cells() {
        for flag in flags(cell) {
            simplices.push(
                flag.iter()
                    .map(|s| cell.sub_polytope(s).barycenter())
                    .collect(),
            );
        }
    }
    let mut points: Vec<(Vector, usize)> = simplices
        .iter()
        .flat_map(|s| s.iter().cloned().enumerate().map(|(i, p)| (p, i)))
        .collect();
    points.sort();
    points.dedup();
    let values: Vec<Scalar> = points
        .par_iter()
        .map(|(p, _)| f.value(p))
        .collect::<Result<_>>()?;
    let base: HashMap<Vector, (Scalar, usize)> = points
        .into_iter()
        .zip(values)
        .map(|((p, d), v)| (p, (v, d)))
        .collect();
    let four = BigInt::from(4);
    let mut dt = delta.clone();
    for _ in 0..=STRICTIFY_HALVINGS {
        let intended = |p: &Vector| -> Scalar {
            let (v, dim) = &base[p];
            let drop = &dt / linalg::from_int(&four.pow((n - dim) as u32));
            v - drop
        };
        let mut pieces = Vec::with_capacity(simplices.len());
        for s in &simplices {
            let a: Matrix = s
                .iter()
                .map(|p| {
                    let mut r = p.clone();
                    r.push(Scalar::one());
                    r
                })
                .collect();
            let rhs: Vector = s.iter().map(&intended).collect();
            let sol = linalg::solve(&a, &rhs, n + 1).expect("simplex is full-dimensional");
            pieces.push(AffinePiece::new(sol[..n].to_vec(), sol[n].clone()));
        }
        let distinct = (0..pieces.len()).all(|i| {
            (0..i).all(|j| pieces[i] != pieces[j] && !orbit_equivalent(c, &pieces[j], &pieces[i]))
        });
        let g = PeriodicPLFunction::new(c.clone(), pieces)?;
        let ok = distinct
            && base
                .keys()
                .collect::<Vec<_>>()
                .par_iter()
                .all(|p| g.value(p).map(|v| v == intended(p)).unwrap_or(false));
        if ok {
            let cells = simplices
                .iter()
                .map(|s| Polytope::hull(s))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Strictified {
                function: g,
                decomposition: PeriodicDecomposition::new(c.clone(), cells)?,
                delta_used: dt,
            });
        }
        dt /= q(2);
    }
    Err(Error::StrictificationFailed)
}

/// Conditions I and II over subsets of the representative pieces, for every
/// polytope in the face closure of Σ. Returns the first failing condition.
pub fn genericity_violation(pieces: &[AffinePiece], sigma: &[Polytope]) -> Option<String> {
    let n = pieces.first()?.m.len();
    // rank conditions are unchanged by a common positive scaling
    let all: Vector = pieces.iter().flat_map(|p| p.m.iter().chain([&p.c]).cloned()).collect();
    let den = linalg::from_int(&linalg::lcm_of_denominators(&all));
    let ints: Vec<Vec<BigInt>> = pieces
        .iter()
        .map(|p| p.m.iter().chain([&p.c]).map(|x| (x * &den).to_integer()).collect())
        .collect();
    for s in close_under_faces(sigma) {
        let eqs: Vec<Vec<BigInt>> = s
            .equations()
            .iter()
            .map(|e| {
                let mut r = e.normal.clone();
                r.push(e.offset.clone());
                linalg::primitive_integer(&r)
            })
            .collect();
        let codim = eqs.len();
        for p in 1..=(n + 1).saturating_sub(codim) {
            // condition I drops the constant column
            let cols = if codim + p <= n { n } else { n + 1 };
            let failed = (0..pieces.len())
                .combinations(p + 1)
                .collect::<Vec<_>>()
                .par_iter()
                .find_map_first(|idx| {
                    let p0 = &ints[idx[0]];
                    let mut rows: Vec<Vec<BigInt>> = idx[1..]
                        .iter()
                        .map(|&j| ints[j][..cols].iter().zip(p0).map(|(a, b)| a - b).collect())
                        .collect();
                    rows.extend(eqs.iter().map(|e| e[..cols].to_vec()));
                    if linalg::integer_rank(&rows, cols) == codim + p {
                        None
                    } else if cols == n {
                        Some("genericity condition I".to_string())
                    } else {
                        Some("genericity condition II".to_string())
                    }
                });
            if failed.is_some() {
                return failed;
            }
        }
    }
    None
}

/// Exact `sup |f − g|` from the common refinement of the two cell complexes.
pub fn certified_distance(
    f: &PeriodicPLFunction,
    fcells: &LinearityCells,
    g: &PeriodicPLFunction,
    gcells: &LinearityCells,
) -> Scalar {
    let c = f.cocycle();
    let gd = &gcells.decomposition;
    fcells
        .decomposition
        .cells()
        .par_iter()
        .zip(fcells.cell_to_piece.par_iter())
        .map(|(cell, &fi)| {
            let fp = &f.pieces()[fi];
            let (lo, hi) = cell.bounding_box();
            let mut worst = Scalar::zero();
            for (gi, k) in gd.translates_near(&lo, &hi) {
                let moved = gd.cells()[gi].translate(&c.lattice_point(&k));
                let Some(common) = cell.intersect(&moved) else {
                    continue;
                };
                let gp = translate_piece(c, &g.pieces()[gcells.cell_to_piece[gi]], &k);
                for v in common.vertices() {
                    let diff = (fp.value(v) - gp.value(v)).abs();
                    if diff > worst {
                        worst = diff;
                    }
                }
            }
            worst
        })
        .max()
        .unwrap_or_else(Scalar::zero)
}

/// Result of the generic perturbation stage.
#[derive(Clone, Debug)]
pub struct Perturbed {
    pub function: PeriodicPLFunction,
    pub cells: LinearityCells,
    pub certificate: ApproxCertificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub name: String,
    pub error: Scalar,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxCertificate {
    pub sup_error_bound: Scalar,
    pub strictly_convex: bool,
    pub transversal: TransversalityReport,
    /// Tiling that is face to face with every cell disjoint from its nonzero translates.
    pub periodic: bool,
    pub retries_used: usize,
    pub k: Option<usize>,
    pub stages: Vec<StageReport>,
}

impl ApproxCertificate {
    pub fn all_pass(&self, epsilon: &Scalar) -> bool {
        self.strictly_convex && self.periodic && self.transversal.ok && &self.sup_error_bound <= epsilon
    }
}

// numerator range for the uniform draws
const DRAW_BITS: u32 = 16;

fn draw(rng: &mut ChaCha8Rng, radius: &Scalar) -> Scalar {
    let big = 1i64 << DRAW_BITS;
    let u = rng.gen_range(-big..=big);
    radius * frac(u, big)
}

/// Randomly perturbs the representatives of a strictly convex `f` until the
/// envelope is strictly convex, strictly periodic, Σ-transversal, generic and
/// within `tolerance` of `f`.
pub fn perturb_generic(
    f: &PeriodicPLFunction,
    sigma: &[Polytope],
    tolerance: &Scalar,
    seed: u64,
    max_retries: usize,
) -> Result<Perturbed> {
    if !tolerance.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let c = f.cocycle();
    let n = c.n();
    let fcells = linearity_cells(f)?;
    let reps: Vec<AffinePiece> = fcells
        .cell_to_piece
        .iter()
        .map(|&i| f.pieces()[i].clone())
        .collect();
    // slopes move values by at most |Δm|_∞ · ‖ω‖₁ on the representative cells
    let reach = fcells
        .decomposition
        .cells()
        .iter()
        .flat_map(|cell| cell.vertices().iter())
        .map(|v| v.iter().map(|x| x.abs()).sum::<Scalar>())
        .max()
        .unwrap_or_else(Scalar::zero)
        + q(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("no draws attempted");
    for attempt in 0..max_retries {
        let radius = tolerance / linalg::from_int(&(BigInt::one() << (attempt + 1)));
        let m_radius = &radius / (q(2) * &reach);
        let c_radius = &radius / q(2);
        let pieces: Vec<AffinePiece> = reps
            .iter()
            .map(|p| {
                let m: Vector = p.m.iter().map(|x| x + draw(&mut rng, &m_radius)).collect();
                let cc = &p.c + draw(&mut rng, &c_radius);
                AffinePiece::new(m, cc)
            })
            .collect();
        let g = PeriodicPLFunction::new(c.clone(), pieces)?;
        let gcells = linearity_cells(&g)?;
        if !gcells.strictly_convex || gcells.cell_to_piece.len() != reps.len() {
            last = "strict convexity".into();
            continue;
        }
        if !periodicity_report(&gcells.decomposition).is_strictly_periodic() {
            last = "periodicity".into();
            continue;
        }
        let dist = certified_distance(f, &fcells, &g, &gcells);
        if &dist >= tolerance {
            last = "sup error".into();
            continue;
        }
        let report = check_transversal(&gcells.decomposition, sigma);
        if !report.ok {
            last = "transversality".into();
            continue;
        }
        if let Some(cond) = genericity_violation(g.pieces(), sigma) {
            last = cond;
            continue;
        }
        debug_assert_eq!(gcells.decomposition.n(), n);
        let certificate = ApproxCertificate {
            sup_error_bound: dist,
            strictly_convex: true,
            transversal: report,
            periodic: true,
            retries_used: attempt,
            k: None,
            stages: Vec::new(),
        };
        return Ok(Perturbed {
            function: g,
            cells: gcells,
            certificate,
        });
    }
    Err(Error::RetriesExhausted {
        retries: max_retries,
        condition: last,
    })
}

#[derive(Clone, Debug)]
pub enum Target {
    Canonical(Cocycle),
    Function(PeriodicPLFunction),
}

#[derive(Clone, Debug)]
pub struct ApproxRequest {
    pub target: Target,
    pub sigma: Vec<Polytope>,
    pub epsilon: Scalar,
    pub seed: u64,
    pub max_retries: usize,
}

#[derive(Clone, Debug)]
pub struct Approximation {
    pub function: PeriodicPLFunction,
    pub decomposition: PeriodicDecomposition,
    pub certificate: ApproxCertificate,
}

/// Smallest `k` with `gap(1)/k² ≤ bound`.
fn tangent_resolution(gap1: &Scalar, bound: &Scalar) -> usize {
    let ratio = gap1 / bound;
    let mut k = linalg::sqrt_upper(&ratio);
    while k > BigInt::one() && linalg::from_int(&((&k - 1) * (&k - 1))) >= ratio {
        k -= 1;
    }
    use num_traits::ToPrimitive;
    k.to_usize().unwrap_or(usize::MAX).max(1)
}

/// Tangent envelope, barycentric strictification and generic perturbation,
/// each allotted a third of the error budget.
pub fn approximate(req: &ApproxRequest) -> Result<Approximation> {
    if !req.epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let third = &req.epsilon / q(3);
    let mut stages = Vec::new();
    let clock = Instant::now();
    let (f1, cells1, k) = match &req.target {
        Target::Canonical(c) => {
            let gap1 = tangent_pl(c, 1)?.sup_error;
            let mut k = tangent_resolution(&gap1, &third);
            let t = loop {
                let t = tangent_pl(c, k)?;
                if t.sup_error <= third {
                    break t;
                }
                k += 1;
            };
            stages.push(StageReport {
                name: "tangent".into(),
                error: t.sup_error.clone(),
                seconds: clock.elapsed().as_secs_f64(),
            });
            (t.function, t.cells, Some(k))
        }
        Target::Function(f) => (f.clone(), linearity_cells(f)?, None),
    };
    let clock = Instant::now();
    let already = cells1.strictly_convex && periodicity_report(&cells1.decomposition).is_strictly_periodic();
    let f2 = if already {
        stages.push(StageReport {
            name: "strictify".into(),
            error: Scalar::zero(),
            seconds: clock.elapsed().as_secs_f64(),
        });
        f1
    } else {
        let s = barycentric_strictify_on(&f1, &cells1.decomposition, &third)?;
        stages.push(StageReport {
            name: "strictify".into(),
            error: s.delta_used.clone(),
            seconds: clock.elapsed().as_secs_f64(),
        });
        s.function
    };
    let clock = Instant::now();
    let p = perturb_generic(&f2, &req.sigma, &third, req.seed, req.max_retries)?;
    stages.push(StageReport {
        name: "perturb".into(),
        error: p.certificate.sup_error_bound.clone(),
        seconds: clock.elapsed().as_secs_f64(),
    });
    let mut certificate = p.certificate;
    certificate.sup_error_bound = stages.iter().map(|s| s.error.clone()).sum();
    certificate.k = k;
    certificate.stages = stages;
    Ok(Approximation {
        function: p.function,
        decomposition: p.cells.decomposition,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;
    use crate::plfunc::{check_cocycle_rule, check_periodic_strict};

    #[test]
    fn tangent_gaps() {
        let tate = Cocycle::standard(1);
        let t1 = tangent_pl(&tate, 1).unwrap();
        assert_eq!(t1.sup_error, frac(1, 8));
        assert_eq!(
            t1.cells.decomposition.cells(),
            &[Polytope::hull(&[vec![frac(-1, 2)], vec![frac(1, 2)]]).unwrap()]
        );
        assert_eq!(tangent_pl(&tate, 2).unwrap().sup_error, frac(1, 32));
        assert_eq!(tangent_pl(&Cocycle::standard(2), 1).unwrap().sup_error, frac(1, 4));
        // exact quadratic scaling of the gap
        for k in 1..=4 {
            let t = tangent_pl(&tate, k).unwrap();
            assert_eq!(t.sup_error, frac(1, 8) / q((k * k) as i64));
            assert!(check_cocycle_rule(&t.function));
        }
    }

    #[test]
    fn resolution_choice() {
        assert_eq!(tangent_resolution(&frac(1, 8), &frac(1, 12)), 2);
        assert_eq!(tangent_resolution(&frac(1, 4), &frac(1, 192)), 7);
        assert_eq!(tangent_resolution(&frac(1, 8), &frac(1, 8)), 1);
    }

    #[test]
    fn strictify_tate() {
        let t = tangent_pl(&Cocycle::standard(1), 1).unwrap();
        let s = barycentric_strictify(&t.function, &frac(1, 10)).unwrap();
        assert_eq!(s.decomposition.cells().len(), 2);
        assert!(check_periodic_strict(&s.decomposition));
        let cells = linearity_cells(&s.function).unwrap();
        assert!(cells.strictly_convex);
        assert!(check_cocycle_rule(&s.function));
        // within δ of the input
        for num in -12..12 {
            let w = vec![frac(num, 7)];
            let d = t.function.value(&w).unwrap() - s.function.value(&w).unwrap();
            assert!(!d.is_negative() && d <= s.delta_used);
        }
    }

    #[test]
    fn strictify_duplicated_piece() {
        let p = AffinePiece::new(qvec(&[0]), q(0));
        let f = PeriodicPLFunction::new(Cocycle::standard(1), vec![p.clone(), p]).unwrap();
        let s = barycentric_strictify(&f, &frac(1, 16)).unwrap();
        assert!(linearity_cells(&s.function).unwrap().strictly_convex);
    }

    #[test]
    fn strictify_square() {
        let t = tangent_pl(&Cocycle::standard(2), 1).unwrap();
        let s = barycentric_strictify(&t.function, &frac(1, 12)).unwrap();
        assert_eq!(s.decomposition.cells().len(), 8);
        assert!(check_periodic_strict(&s.decomposition));
        assert!(linearity_cells(&s.function).unwrap().strictly_convex);
    }

    #[test]
    fn perturb_without_sigma() {
        let t = tangent_pl(&Cocycle::standard(1), 2).unwrap();
        let p = perturb_generic(&t.function, &[], &frac(1, 12), 1, 10).unwrap();
        assert_eq!(p.certificate.retries_used, 0);
        assert!(p.certificate.sup_error_bound < frac(1, 12));
    }

    #[test]
    fn perturb_avoids_sigma_point() {
        let t = tangent_pl(&Cocycle::standard(1), 1).unwrap();
        let s = barycentric_strictify(&t.function, &frac(1, 12)).unwrap();
        let origin = Polytope::hull(&[qvec(&[0])]).unwrap();
        let unperturbed = linearity_cells(&s.function).unwrap();
        assert!(!check_transversal(&unperturbed.decomposition, &[origin.clone()]).ok);
        let p = perturb_generic(&s.function, &[origin.clone()], &frac(1, 12), 3, 20).unwrap();
        for cell in p.cells.decomposition.cells() {
            for v in cell.vertices() {
                assert!(p.function.cocycle().lattice_coords(v).is_none());
            }
        }
    }

    #[test]
    fn condition_one_detects_equal_slopes() {
        let seg = Polytope::hull(&[qvec(&[0]), qvec(&[1])]).unwrap();
        let a = AffinePiece::new(vec![frac(1, 3)], q(0));
        let b = AffinePiece::new(vec![frac(1, 3)], frac(1, 5));
        assert_eq!(genericity_violation(&[a.clone(), b], &[seg.clone()]).as_deref(), Some("genericity condition I"));
        let b = AffinePiece::new(vec![frac(2, 3)], frac(1, 5));
        assert_eq!(genericity_violation(&[a, b], &[seg]), None);
    }

    #[test]
    fn approximate_tate() {
        let req = ApproxRequest {
            target: Target::Canonical(Cocycle::standard(1)),
            sigma: Vec::new(),
            epsilon: frac(1, 4),
            seed: 7,
            max_retries: 50,
        };
        let a = approximate(&req).unwrap();
        assert_eq!(a.certificate.k, Some(2));
        assert!(a.certificate.all_pass(&frac(1, 4)));
        assert!(check_cocycle_rule(&a.function));
        // determinism
        let b = approximate(&req).unwrap();
        assert_eq!(a.function, b.function);
        assert_eq!(approximate(&ApproxRequest { epsilon: q(0), ..req }).unwrap_err(), Error::NonPositiveEpsilon);
    }
}
