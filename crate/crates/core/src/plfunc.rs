//! Piecewise-linear convex functions satisfying a cocycle rule, and periodic
//! polytopal decompositions.

use crate::cocycle::{integer_box, Cocycle, LatticeCoords};
use crate::error::{Error, Result};
use crate::linalg::{self, frac, q, Matrix, Scalar, Vector};
use crate::polyhedra::{Halfspace, Polytope};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashSet};

/// The affine function `ω ↦ ⟨m,ω⟩ + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePiece {
    pub m: Vector,
    pub c: Scalar,
}

impl AffinePiece {
    pub fn new(m: Vector, c: Scalar) -> Self {
        AffinePiece { m, c }
    }

    pub fn value(&self, omega: &[Scalar]) -> Scalar {
        linalg::dot(&self.m, omega) + &self.c
    }
}

/// The piece whose graph is the cocycle translate of `p` by `λ`:
/// slope `m + b(·,λ)`, constant `c − ⟨m,λ⟩ + z_λ(0) − b(λ,λ)`.
pub fn translate_piece(cocycle: &Cocycle, p: &AffinePiece, k: &[i64]) -> AffinePiece {
    if k.iter().all(|&x| x == 0) {
        return p.clone();
    }
    let lam = cocycle.lattice_point(k);
    let blam = linalg::mat_vec(cocycle.b(), &lam);
    let m = linalg::add(&p.m, &blam);
    let c = &p.c - linalg::dot(&p.m, &lam) + cocycle.constant_at(k) - linalg::dot(&blam, &lam);
    AffinePiece { m, c }
}

/// A convex function that is locally the maximum of finitely many affine pieces.
pub trait ConvexPL: Sync {
    fn ambient_dim(&self) -> usize;

    /// The value at `ω` and the distinct affine pieces attaining it.
    fn active_pieces(&self, omega: &[Scalar]) -> Result<(Scalar, Vec<AffinePiece>)>;
}

/// Maximum of a finite list of affine pieces, without periodicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePL {
    n: usize,
    pieces: Vec<AffinePiece>,
}

impl FinitePL {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let n = pieces
            .first()
            .ok_or_else(|| Error::EmptyInput("no pieces".into()))?
            .m
            .len();
        if let Some(p) = pieces.iter().find(|p| p.m.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.m.len(),
            });
        }
        Ok(FinitePL { n, pieces })
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }
}

impl ConvexPL for FinitePL {
    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn active_pieces(&self, omega: &[Scalar]) -> Result<(Scalar, Vec<AffinePiece>)> {
        let vals: Vec<Scalar> = self.pieces.iter().map(|p| p.value(omega)).collect();
        let best = vals.iter().max().expect("nonempty").clone();
        let mut act: Vec<AffinePiece> = self
            .pieces
            .iter()
            .zip(&vals)
            .filter(|(_, v)| **v == best)
            .map(|(p, _)| p.clone())
            .collect();
        act.sort();
        act.dedup();
        Ok((best, act))
    }
}

#[derive(Clone, Debug)]
struct EnvelopeData {
    gram: Matrix,
    gram_inv: Matrix,
    // P·b, so that P·b·ω is the ω-dependent part of the linear term
    pb: Matrix,
    // P·(ℓ − m_p) per piece
    shift: Vec<Vector>,
}

/// One translate attaining the envelope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgmaxEntry {
    pub piece: usize,
    pub shift: LatticeCoords,
    pub translated: AffinePiece,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Scalar,
    pub argmax: Vec<ArgmaxEntry>,
}

/// The envelope `sup{translate_piece(p, λ)}` over representatives `p` and `λ ∈ Λ`.
#[derive(Clone, Debug)]
pub struct PeriodicPLFunction {
    cocycle: Cocycle,
    pieces: Vec<AffinePiece>,
    env: Option<EnvelopeData>,
}

impl PartialEq for PeriodicPLFunction {
    fn eq(&self, other: &Self) -> bool {
        self.cocycle == other.cocycle && self.pieces == other.pieces
    }
}

impl Eq for PeriodicPLFunction {}

impl PeriodicPLFunction {
    pub fn new(cocycle: Cocycle, pieces: Vec<AffinePiece>) -> Result<Self> {
        let n = cocycle.n();
        if pieces.is_empty() {
            return Err(Error::EmptyInput("no representative pieces".into()));
        }
        if let Some(p) = pieces.iter().find(|p| p.m.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.m.len(),
            });
        }
        let env = cocycle.is_positive_definite().then(|| {
            let p = cocycle.periods();
            let pb = linalg::mat_mul(p, cocycle.b(), n);
            let gram = linalg::mat_mul(&pb, &linalg::transpose(p, n), n);
            let gram_inv = linalg::inverse(&gram).expect("positive definite");
            let shift = pieces
                .iter()
                .map(|pc| linalg::mat_vec(p, &linalg::sub(cocycle.linear_part(), &pc.m)))
                .collect();
            EnvelopeData {
                gram,
                gram_inv,
                pb,
                shift,
            }
        });
        Ok(PeriodicPLFunction {
            cocycle,
            pieces,
            env,
        })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn n(&self) -> usize {
        self.cocycle.n()
    }

    /// Exact envelope value with every attaining translate.
    pub fn evaluate(&self, omega: &[Scalar]) -> Result<Evaluation> {
        let env = self.env.as_ref().ok_or(Error::EnvelopeDiverges)?;
        let n = self.n();
        if omega.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: omega.len(),
            });
        }
        let half = frac(1, 2);
        let pbw = linalg::mat_vec(&env.pb, omega);
        struct Prep {
            base: Scalar,
            w: Vector,
            kstar: Vector,
            gstar: Scalar,
        }
        let preps: Vec<Prep> = self
            .pieces
            .iter()
            .zip(&env.shift)
            .map(|(p, s)| {
                let base = p.value(omega);
                let w = linalg::add(s, &pbw);
                let kstar = linalg::mat_vec(&env.gram_inv, &w);
                let gstar = &base + &half * linalg::dot(&w, &kstar);
                Prep { base, w, kstar, gstar }
            })
            .collect();
        // translate (p, k) has value base_p + w_p·k − ½kᵀGk at ω; scores are
        // kept as integers over a common denominator
        let half_gram: Matrix = env.gram.iter().map(|r| linalg::scale(r, &half)).collect();
        let all: Vector = preps
            .iter()
            .flat_map(|p| std::iter::once(&p.base).chain(&p.w))
            .chain(half_gram.iter().flatten())
            .cloned()
            .collect();
        let den = linalg::from_int(&linalg::lcm_of_denominators(&all));
        let to_int = |x: &Scalar| (x * &den).to_integer();
        let hg: Vec<Vec<BigInt>> = half_gram.iter().map(|r| r.iter().map(to_int).collect()).collect();
        let int_preps: Vec<(BigInt, Vec<BigInt>)> = preps
            .iter()
            .map(|p| (to_int(&p.base), p.w.iter().map(to_int).collect()))
            .collect();
        let score = |pi: usize, k: &[i64]| -> BigInt {
            let (base, w) = &int_preps[pi];
            let mut v = base.clone();
            for i in 0..n {
                v += &w[i] * k[i];
                for j in 0..n {
                    v -= &hg[i][j] * (k[i] * k[j]);
                }
            }
            v
        };
        let mut value0: Option<BigInt> = None;
        for (pi, pr) in preps.iter().enumerate() {
            let k: LatticeCoords = pr
                .kstar
                .iter()
                .map(|x| linalg::floor(&(x + &half)).to_i64().expect("fits"))
                .collect();
            let v = score(pi, &k);
            if value0.as_ref().is_none_or(|b| &v > b) {
                value0 = Some(v);
            }
        }
        let value0 = value0.expect("nonempty");
        let value0_q = linalg::from_int(&value0) / &den;
        let mut best = value0;
        let mut argmax: Vec<(usize, LatticeCoords)> = Vec::new();
        for (pi, pr) in preps.iter().enumerate() {
            if pr.gstar < value0_q {
                continue;
            }
            let two_r = q(2) * (&pr.gstar - &value0_q);
            let ranges: Vec<(i64, i64)> = (0..n)
                .map(|i| {
                    let r = linalg::sqrt_upper(&(&two_r * &env.gram_inv[i][i]))
                        .to_i64()
                        .expect("fits");
                    let lo = linalg::ceil(&pr.kstar[i]).to_i64().expect("fits") - r;
                    let hi = linalg::floor(&pr.kstar[i]).to_i64().expect("fits") + r;
                    (lo, hi)
                })
                .collect();
            for k in integer_box(&ranges) {
                let v = score(pi, &k);
                if v > best {
                    best = v;
                    argmax.clear();
                    argmax.push((pi, k));
                } else if v == best {
                    argmax.push((pi, k));
                }
            }
        }
        let best = linalg::from_int(&best) / &den;
        argmax.sort();
        let argmax = argmax
            .into_iter()
            .map(|(piece, shift)| ArgmaxEntry {
                translated: translate_piece(&self.cocycle, &self.pieces[piece], &shift),
                piece,
                shift,
            })
            .collect();
        Ok(Evaluation {
            value: best,
            argmax,
        })
    }

    pub fn value(&self, omega: &[Scalar]) -> Result<Scalar> {
        Ok(self.evaluate(omega)?.value)
    }

    /// The periodic part `φ = f − q`, invariant under Λ.
    pub fn periodic_part(&self, omega: &[Scalar]) -> Result<Scalar> {
        Ok(self.value(omega)? - self.cocycle.canonical_value(omega)?)
    }

    /// Same representatives over a different cocycle.
    pub fn with_cocycle(&self, cocycle: Cocycle) -> Result<Self> {
        PeriodicPLFunction::new(cocycle, self.pieces.clone())
    }
}

impl ConvexPL for PeriodicPLFunction {
    fn ambient_dim(&self) -> usize {
        self.n()
    }

    fn active_pieces(&self, omega: &[Scalar]) -> Result<(Scalar, Vec<AffinePiece>)> {
        let ev = self.evaluate(omega)?;
        let mut act: Vec<AffinePiece> = ev.argmax.into_iter().map(|a| a.translated).collect();
        act.sort();
        act.dedup();
        Ok((ev.value, act))
    }
}

/// Deterministic sample points `Σ tᵢλᵢ` with `tᵢ` from a fixed rational set.
pub(crate) fn sample_points(c: &Cocycle) -> Vec<Vector> {
    let ts = [q(0), frac(1, 3), frac(1, 2), frac(5, 7)];
    let n = c.n();
    let idx = integer_box(&vec![(0, ts.len() as i64 - 1); n]);
    idx.into_iter()
        .map(|ix| {
            let t: Vector = ix.iter().map(|&i| ts[i as usize].clone()).collect();
            linalg::vec_mat(&t, c.periods(), n)
        })
        .collect()
}

/// Whether the envelope of `f` satisfies the cocycle rule of its own cocycle.
pub fn check_cocycle_rule(f: &PeriodicPLFunction) -> bool {
    check_cocycle_rule_against(f, f.cocycle())
}

/// Whether `f(ω+λ) = f(ω) + z_λ(ω)` holds for the cocycle `c` at sample points
/// and all `λ` in the `{−1,0,1}ⁿ` box of period coordinates.
pub fn check_cocycle_rule_against(f: &PeriodicPLFunction, c: &Cocycle) -> bool {
    if c.n() != f.n() || c.periods() != f.cocycle().periods() || c.b() != f.cocycle().b() {
        return false;
    }
    let lams = integer_box(&vec![(-1, 1); c.n()]);
    sample_points(c).par_iter().all(|w| {
        let Ok(fw) = f.value(w) else {
            return false;
        };
        lams.iter().all(|k| {
            let shifted = linalg::add(w, &c.lattice_point(k));
            f.value(&shifted)
                .map(|v| v == &fw + c.z_value(k, w))
                .unwrap_or(false)
        })
    })
}

/// A Λ-periodic polytopal decomposition given by representatives of its maximal cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicDecomposition {
    cocycle: Cocycle,
    cells: Vec<Polytope>,
}

impl PeriodicDecomposition {
    pub fn new(cocycle: Cocycle, cells: Vec<Polytope>) -> Result<Self> {
        let n = cocycle.n();
        if let Some(c) = cells.iter().find(|c| c.ambient_dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.ambient_dim(),
            });
        }
        Ok(PeriodicDecomposition { cocycle, cells })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn cells(&self) -> &[Polytope] {
        &self.cells
    }

    pub fn n(&self) -> usize {
        self.cocycle.n()
    }

    /// Translates `(cell index, λ)` whose bounding boxes meet the box `[lo, hi]`.
    pub fn translates_near(&self, lo: &[Scalar], hi: &[Scalar]) -> Vec<(usize, LatticeCoords)> {
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            let (clo, chi) = c.bounding_box();
            let a = linalg::sub(lo, &chi);
            let b = linalg::sub(hi, &clo);
            for k in self.cocycle.lattice_points_in_box(&a, &b) {
                out.push((i, k));
            }
        }
        out
    }

    /// All translated cells containing `ω`.
    pub fn cells_containing(&self, omega: &[Scalar]) -> Vec<(usize, LatticeCoords, Polytope)> {
        self.translates_near(omega, omega)
            .into_iter()
            .filter_map(|(i, k)| {
                let t = self.cells[i].translate(&self.cocycle.lattice_point(&k));
                t.contains(omega).then_some((i, k, t))
            })
            .collect()
    }
}

/// Maximal domains of linearity of an envelope.
#[derive(Clone, Debug)]
pub struct LinearityCells {
    pub decomposition: PeriodicDecomposition,
    /// Index into the representatives for each cell.
    pub cell_to_piece: Vec<usize>,
    pub strictly_convex: bool,
}

pub(crate) fn orbit_equivalent(c: &Cocycle, p: &AffinePiece, other: &AffinePiece) -> bool {
    let n = c.n();
    let dm = linalg::sub(&other.m, &p.m);
    let Some(lam) = linalg::solve(c.b(), &dm, n) else {
        return false;
    };
    match c.lattice_coords(&lam) {
        Some(k) => &translate_piece(c, p, &k) == other,
        None => false,
    }
}

/// The region where representative `i` attains the envelope, or `None` if empty.
fn piece_cell(f: &PeriodicPLFunction, i: usize) -> Result<Option<Polytope>> {
    let c = f.cocycle();
    let n = c.n();
    let p = &f.pieces()[i];
    let mut competitors: BTreeSet<(usize, LatticeCoords)> = BTreeSet::new();
    for s in 0..n {
        for sign in [-1, 1] {
            let mut k = vec![0; n];
            k[s] = sign;
            competitors.insert((i, k));
        }
    }
    // per other piece, the translate whose slope is closest to m_p
    let bpt = linalg::mat_mul(c.b(), &linalg::transpose(c.periods(), n), n);
    for (j, other) in f.pieces().iter().enumerate() {
        if j == i {
            continue;
        }
        let kf = linalg::solve(&bpt, &linalg::sub(&p.m, &other.m), n).expect("b is invertible");
        let k: LatticeCoords = kf
            .iter()
            .map(|x| linalg::floor(&(x + frac(1, 2))).to_i64().expect("fits"))
            .collect();
        competitors.insert((j, k));
    }
    loop {
        let mut hs = Vec::with_capacity(competitors.len());
        for (j, k) in &competitors {
            let t = translate_piece(c, &f.pieces()[*j], k);
            let normal = linalg::sub(&t.m, &p.m);
            let offset = &p.c - &t.c;
            if linalg::is_zero_vec(&normal) {
                if offset.is_negative() {
                    return Ok(None);
                }
                continue;
            }
            hs.push(Halfspace::new(normal, offset));
        }
        let Some(poly) = Polytope::from_halfspaces(n, &hs, &[])? else {
            return Ok(None);
        };
        let evals: Vec<Evaluation> = poly
            .vertices()
            .par_iter()
            .map(|v| f.evaluate(v))
            .collect::<Result<_>>()?;
        let mut grew = false;
        for (v, ev) in poly.vertices().iter().zip(evals) {
            if ev.value > p.value(v) {
                for a in ev.argmax {
                    grew |= competitors.insert((a.piece, a.shift));
                }
            }
        }
        if !grew {
            return Ok(Some(poly));
        }
    }
}

/// Computes the cells of linearity of `f` over representatives of the Λ-orbits of pieces.
pub fn linearity_cells(f: &PeriodicPLFunction) -> Result<LinearityCells> {
    let c = f.cocycle();
    if !c.is_positive_definite() {
        return Err(Error::EnvelopeDiverges);
    }
    let n = c.n();
    let mut order: Vec<usize> = (0..f.pieces().len()).collect();
    order.sort_by(|&a, &b| f.pieces()[a].cmp(&f.pieces()[b]));
    let mut kept: Vec<usize> = Vec::new();
    let mut strictly_convex = true;
    for &i in &order {
        let p = &f.pieces()[i];
        if kept.iter().any(|&j| &f.pieces()[j] == p) {
            strictly_convex = false;
            continue;
        }
        if kept.iter().any(|&j| orbit_equivalent(c, &f.pieces()[j], p)) {
            continue;
        }
        kept.push(i);
    }
    let cells: Vec<Option<Polytope>> = kept
        .par_iter()
        .map(|&i| piece_cell(f, i))
        .collect::<Result<_>>()?;
    let mut out_cells = Vec::new();
    let mut cell_to_piece = Vec::new();
    for (i, cell) in kept.into_iter().zip(cells) {
        match cell {
            Some(poly) if poly.dim() == n => {
                out_cells.push(poly);
                cell_to_piece.push(i);
            }
            _ => strictly_convex = false,
        }
    }
    Ok(LinearityCells {
        decomposition: PeriodicDecomposition::new(c.clone(), out_cells)?,
        cell_to_piece,
        strictly_convex,
    })
}

/// The individual conditions making up periodicity of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicityReport {
    /// All cells are full-dimensional and their volumes sum to the covolume of Λ.
    pub volume_ok: bool,
    /// Distinct translates have disjoint interiors.
    pub interiors_disjoint: bool,
    /// Any two translates meet in a common face.
    pub face_to_face: bool,
    /// Every cell is disjoint from its nonzero translates.
    pub translates_disjoint: bool,
}

impl PeriodicityReport {
    /// Translates tile `N_ℝ` face to face.
    pub fn is_periodic(&self) -> bool {
        self.volume_ok && self.interiors_disjoint && self.face_to_face
    }

    /// Tiling plus disjointness of each cell from its nonzero translates.
    pub fn is_strictly_periodic(&self) -> bool {
        self.is_periodic() && self.translates_disjoint
    }
}

pub fn periodicity_report(d: &PeriodicDecomposition) -> PeriodicityReport {
    let n = d.n();
    let c = d.cocycle();
    let volume_ok = d.cells.iter().all(|x| x.dim() == n) && {
        let frame = crate::polyhedra::AffineLatticeFrame::standard(n);
        let total: Scalar = d
            .cells
            .iter()
            .map(|x| x.lattice_volume(&frame).expect("full-dimensional"))
            .sum();
        total == c.covolume()
    };
    let mut jobs = Vec::new();
    for a in 0..d.cells.len() {
        let (alo, ahi) = d.cells[a].bounding_box();
        for b in a..d.cells.len() {
            let (blo, bhi) = d.cells[b].bounding_box();
            for k in c.lattice_points_in_box(&linalg::sub(&alo, &bhi), &linalg::sub(&ahi, &blo)) {
                if a == b && k.iter().all(|&x| x == 0) {
                    continue;
                }
                jobs.push((a, b, k));
            }
        }
    }
    // (interiors disjoint, face to face, translates disjoint) per pair
    let flags: Vec<(bool, bool, bool)> = jobs
        .par_iter()
        .map(|(a, b, k)| {
            let ca = &d.cells[*a];
            let cb = d.cells[*b].translate(&c.lattice_point(k));
            match ca.intersect(&cb) {
                None => (true, true, true),
                Some(i) => {
                    let f2f = i.is_face_of(ca) && i.is_face_of(&cb);
                    (i.dim() < n, f2f, a != b)
                }
            }
        })
        .collect();
    PeriodicityReport {
        volume_ok,
        interiors_disjoint: flags.iter().all(|f| f.0),
        face_to_face: flags.iter().all(|f| f.1),
        translates_disjoint: flags.iter().all(|f| f.2),
    }
}

/// Whether the Λ-translates of the cells form a face-to-face tiling.
pub fn check_periodic(d: &PeriodicDecomposition) -> bool {
    periodicity_report(d).is_periodic()
}

/// [`check_periodic`] plus disjointness of every cell from its nonzero translates.
pub fn check_periodic_strict(d: &PeriodicDecomposition) -> bool {
    periodicity_report(d).is_strictly_periodic()
}

/// Adds all faces of the given polytopes, removing duplicates and keeping first-seen order.
pub fn close_under_faces(sigma: &[Polytope]) -> Vec<Polytope> {
    let mut seen: HashSet<Polytope> = HashSet::new();
    let mut out = Vec::new();
    for s in sigma {
        for f in std::iter::once(s.clone()).chain(s.faces().into_iter().rev()) {
            if seen.insert(f.clone()) {
                out.push(f);
            }
        }
    }
    out
}

/// A face of a translated cell meeting a polytope of Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalityRow {
    /// Index into [`TransversalityReport::sigma`].
    pub sigma: usize,
    pub cell: usize,
    pub shift: LatticeCoords,
    pub face: Polytope,
    pub intersection_dim: usize,
    /// `dim face + dim σ − n`.
    pub expected: i64,
    pub definition_ok: bool,
    pub criterion_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalityReport {
    /// Every row satisfies the dimension count.
    pub ok: bool,
    /// Every row satisfies the linear-hull criterion, which implies `ok`.
    pub criterion_ok: bool,
    /// Σ after closing under faces.
    pub sigma: Vec<Polytope>,
    /// One row per meeting pair `(σ, face)`.
    pub rows: Vec<TransversalityRow>,
}

impl TransversalityReport {
    pub fn violations(&self) -> impl Iterator<Item = &TransversalityRow> {
        self.rows.iter().filter(|r| !r.definition_ok)
    }

    /// The criterion verdict implies the definition verdict.
    ///
    /// The criterion is only sufficient over the whole face-closed family: a
    /// single row can pass it while failing the dimension count, e.g. a
    /// segment ending on a cell vertex.
    pub fn criterion_consistent(&self) -> bool {
        !self.criterion_ok || self.ok
    }
}

fn boxes_meet(a: &(Vector, Vector), b: &(Vector, Vector)) -> bool {
    a.0.iter().zip(&b.1).all(|(lo, hi)| lo <= hi) && b.0.iter().zip(&a.1).all(|(lo, hi)| lo <= hi)
}

/// Checks `dim(σ ∩ F) = dim F + dim σ − n` for every face `F` of every cell
/// translate meeting some `σ` in the face closure of Σ, together with the
/// linear-hull criterion on the same pairs.
pub fn check_transversal(d: &PeriodicDecomposition, sigma: &[Polytope]) -> TransversalityReport {
    let n = d.n() as i64;
    let closed = close_under_faces(sigma);
    let cell_faces: Vec<Vec<Polytope>> = d.cells.iter().map(|c| c.faces()).collect();
    let rows: Vec<Vec<TransversalityRow>> = closed
        .par_iter()
        .enumerate()
        .map(|(si, s)| {
            let sbox = s.bounding_box();
            let mut rows = Vec::new();
            for (ci, k) in d.translates_near(&sbox.0, &sbox.1) {
                let lam = d.cocycle.lattice_point(&k);
                let cell = d.cells[ci].translate(&lam);
                if s.intersect(&cell).is_none() {
                    continue;
                }
                for face in &cell_faces[ci] {
                    let face = face.translate(&lam);
                    if !boxes_meet(&sbox, &face.bounding_box()) {
                        continue;
                    }
                    let Some(inter) = s.intersect(&face) else {
                        continue;
                    };
                    let expected = face.dim() as i64 + s.dim() as i64 - n;
                    let definition_ok = inter.dim() as i64 == expected;
                    let criterion_ok = if expected >= 0 {
                        let mut dirs = s.directions().to_vec();
                        dirs.extend(face.directions().iter().cloned());
                        linalg::rank(&dirs, n as usize) as i64 == n
                    } else {
                        // the affine hulls meet here, so the criterion fails
                        false
                    };
                    rows.push(TransversalityRow {
                        sigma: si,
                        cell: ci,
                        shift: k.clone(),
                        face,
                        intersection_dim: inter.dim(),
                        expected,
                        definition_ok,
                        criterion_ok,
                    });
                }
            }
            rows
        })
        .collect();
    let rows: Vec<TransversalityRow> = rows.into_iter().flatten().collect();
    TransversalityReport {
        ok: rows.iter().all(|r| r.definition_ok),
        criterion_ok: rows.iter().all(|r| r.criterion_ok),
        sigma: closed,
        rows,
    }
}
