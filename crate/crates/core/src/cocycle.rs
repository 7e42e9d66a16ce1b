//! Quadratic cocycle data `(Λ, b, z_λ(0))` and the canonical quadratic function.

use crate::error::{Error, Result};
use crate::linalg::{self, frac, q, Matrix, Scalar, Vector};
use crate::polyhedra::Polytope;
use num_traits::{Signed, Zero};

/// Integer coordinates of a lattice element with respect to the period basis.
pub type LatticeCoords = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    periods: Matrix,
    b: Matrix,
    z0: Vector,
    polarized: bool,
    // ℓ as a covector: ℓ·λᵢ = z0ᵢ − ½b(λᵢ,λᵢ)
    linear: Vector,
    // rows of P⁻ᵀ: t = P⁻ᵀω are the period-basis coordinates of ω
    coord_map: Matrix,
}

impl Cocycle {
    /// Validates and builds cocycle data. `periods` holds λ₁..λₙ as rows.
    ///
    /// With `polarized` set, `b` must be positive definite.
    pub fn new(periods: Matrix, b: Matrix, z0: Vector, polarized: bool) -> Result<Cocycle> {
        let n = periods.len();
        if n == 0 {
            return Err(Error::InvalidCocycle("dimension must be at least 1".into()));
        }
        let square = |m: &Matrix| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&periods) || !square(&b) || z0.len() != n {
            return Err(Error::InvalidCocycle("shape mismatch".into()));
        }
        if linalg::det(&periods).is_zero() {
            return Err(Error::InvalidCocycle("periods are linearly dependent".into()));
        }
        if !linalg::is_symmetric(&b) {
            return Err(Error::InvalidCocycle("b is not symmetric".into()));
        }
        for (i, lam) in periods.iter().enumerate() {
            if linalg::mat_vec(&b, lam).iter().any(|x| !x.is_integer()) {
                return Err(Error::InvalidCocycle(format!(
                    "b(·,λ{}) is not integral",
                    i + 1
                )));
            }
        }
        if polarized && !linalg::is_positive_definite(&b) {
            return Err(Error::InvalidCocycle("b is not positive definite".into()));
        }
        let half = frac(1, 2);
        let rhs: Vector = periods
            .iter()
            .zip(&z0)
            .map(|(lam, z)| z - &half * linalg::bilinear(&b, lam, lam))
            .collect();
        let linear = linalg::solve(&periods, &rhs, n).expect("periods are independent");
        let coord_map = linalg::inverse(&linalg::transpose(&periods, n)).expect("invertible");
        Ok(Cocycle {
            periods,
            b,
            z0,
            polarized,
            linear,
            coord_map,
        })
    }

    /// Principal polarization on `ℤⁿ` with `b = I` and `z_{eᵢ}(0) = 1/2`.
    pub fn standard(n: usize) -> Cocycle {
        Cocycle::new(
            linalg::identity(n),
            linalg::identity(n),
            vec![frac(1, 2); n],
            true,
        )
        .expect("valid")
    }

    pub fn n(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[Vector] {
        &self.periods
    }

    pub fn b(&self) -> &[Vector] {
        &self.b
    }

    pub fn z0(&self) -> &[Scalar] {
        &self.z0
    }

    pub fn is_polarized(&self) -> bool {
        self.polarized
    }

    /// Whether `b` is positive definite, regardless of the flag.
    pub fn is_positive_definite(&self) -> bool {
        linalg::is_positive_definite(&self.b)
    }

    /// The linear form `ℓ` with `ℓ(λ) = z_λ(0) − ½b(λ,λ)`.
    pub fn linear_part(&self) -> &[Scalar] {
        &self.linear
    }

    /// Same lattice and form with replaced base constants.
    pub fn with_z0(&self, z0: Vector) -> Result<Cocycle> {
        Cocycle::new(self.periods.clone(), self.b.clone(), z0, self.polarized)
    }

    pub fn lattice_point(&self, k: &[i64]) -> Vector {
        let kq: Vector = k.iter().map(|&x| q(x)).collect();
        linalg::vec_mat(&kq, &self.periods, self.n())
    }

    /// Coordinates `t` with `ω = Σ tᵢλᵢ`.
    pub fn period_coords(&self, omega: &[Scalar]) -> Vector {
        linalg::mat_vec(&self.coord_map, omega)
    }

    /// Integer coordinates of `v` if it lies in Λ.
    pub fn lattice_coords(&self, v: &[Scalar]) -> Option<LatticeCoords> {
        use num_traits::ToPrimitive;
        self.period_coords(v)
            .iter()
            .map(|t| if t.is_integer() { t.to_integer().to_i64() } else { None })
            .collect()
    }

    /// Splits `ω = ω₀ + λ` with `ω₀` in the half-open fundamental parallelepiped.
    pub fn reduce(&self, omega: &[Scalar]) -> (Vector, LatticeCoords) {
        use num_traits::ToPrimitive;
        let t = self.period_coords(omega);
        let k: LatticeCoords = t
            .iter()
            .map(|x| linalg::floor(x).to_i64().expect("coordinate fits in i64"))
            .collect();
        let w0 = linalg::sub(omega, &self.lattice_point(&k));
        (w0, k)
    }

    pub fn in_fundamental_domain(&self, omega: &[Scalar]) -> bool {
        self.period_coords(omega)
            .iter()
            .all(|t| !t.is_negative() && t < &q(1))
    }

    /// Closure of the fundamental parallelepiped at the origin.
    pub fn fundamental_polytope(&self) -> Polytope {
        let n = self.n();
        let pts: Vec<Vector> = (0..1usize << n)
            .map(|mask| {
                let k: LatticeCoords = (0..n).map(|i| ((mask >> i) & 1) as i64).collect();
                self.lattice_point(&k)
            })
            .collect();
        Polytope::hull(&pts).expect("nonempty")
    }

    /// `|det(λ₁..λₙ)|`.
    pub fn covolume(&self) -> Scalar {
        linalg::det(&self.periods).abs()
    }

    pub fn det_b(&self) -> Scalar {
        linalg::det(&self.b)
    }

    /// `z_λ(0) = ℓ(λ) + ½b(λ,λ)`.
    pub fn constant_at(&self, k: &[i64]) -> Scalar {
        let lam = self.lattice_point(k);
        linalg::dot(&self.linear, &lam) + frac(1, 2) * linalg::bilinear(&self.b, &lam, &lam)
    }

    /// `z_λ(ω) = z_λ(0) + b(λ,ω)`.
    pub fn z_value(&self, k: &[i64], omega: &[Scalar]) -> Scalar {
        let lam = self.lattice_point(k);
        self.constant_at(k) + linalg::bilinear(&self.b, &lam, omega)
    }

    /// `q(ω) = ½b(ω,ω) + ℓ(ω)`, normalized by `q(0) = 0`.
    pub fn canonical_value(&self, omega: &[Scalar]) -> Result<Scalar> {
        if !self.is_positive_definite() {
            return Err(Error::Unpolarized);
        }
        Ok(self.quadratic(omega))
    }

    pub(crate) fn quadratic(&self, omega: &[Scalar]) -> Scalar {
        frac(1, 2) * linalg::bilinear(&self.b, omega, omega) + linalg::dot(&self.linear, omega)
    }

    /// Gradient `bω + ℓ` of the canonical function.
    pub fn canonical_gradient(&self, omega: &[Scalar]) -> Vector {
        linalg::add(&linalg::mat_vec(&self.b, omega), &self.linear)
    }

    /// Lattice points `λ = Σ kᵢλᵢ` with `lo ≤ λ ≤ hi` componentwise.
    pub fn lattice_points_in_box(&self, lo: &[Scalar], hi: &[Scalar]) -> Vec<LatticeCoords> {
        use num_traits::ToPrimitive;
        let n = self.n();
        let mut ranges = Vec::with_capacity(n);
        for row in &self.coord_map {
            let mut mn = Scalar::zero();
            let mut mx = Scalar::zero();
            for ((r, l), h) in row.iter().zip(lo).zip(hi) {
                let (a, b) = (r * l, r * h);
                if a < b {
                    mn += &a;
                    mx += &b;
                } else {
                    mn += &b;
                    mx += &a;
                }
            }
            let a = linalg::ceil(&mn).to_i64().expect("fits");
            let b = linalg::floor(&mx).to_i64().expect("fits");
            if a > b {
                return Vec::new();
            }
            ranges.push((a, b));
        }
        integer_box(&ranges)
            .into_iter()
            .filter(|k| {
                let lam = self.lattice_point(k);
                lam.iter().zip(lo).zip(hi).all(|((x, l), h)| l <= x && x <= h)
            })
            .collect()
    }
}

/// All integer vectors in `∏ [aᵢ, bᵢ]`, lexicographically ordered.
pub fn integer_box(ranges: &[(i64, i64)]) -> Vec<LatticeCoords> {
    let mut out: Vec<LatticeCoords> = vec![Vec::new()];
    for &(a, b) in ranges {
        let mut next = Vec::with_capacity(out.len() * (b - a + 1).max(0) as usize);
        for prefix in &out {
            for x in a..=b {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;
    use proptest::prelude::*;

    fn tate() -> Cocycle {
        Cocycle::standard(1)
    }

    #[test]
    fn constant_examples() {
        let c = tate();
        assert_eq!(c.constant_at(&[0]), q(0));
        // recursion oracle: z_{2λ}(0) = 2z_λ(0) + b(λ,λ)
        assert_eq!(c.constant_at(&[2]), q(2) * frac(1, 2) + q(1));
        // solve 0 = z_λ(0) + z_{−λ}(0) + b(λ,−λ) for z_{−λ}(0)
        let oracle = q(0) - c.constant_at(&[1]) + q(1);
        assert_eq!(c.constant_at(&[-1]), oracle);
        assert_eq!(oracle, frac(1, 2));
    }

    #[test]
    fn z_value_examples() {
        let c = tate();
        assert_eq!(c.z_value(&[0], &[frac(5, 3)]), q(0));
        assert_eq!(c.z_value(&[1], &[q(3)]), frac(7, 2));
    }

    #[test]
    fn canonical_examples() {
        let c = tate();
        let w = frac(2, 5);
        assert_eq!(c.canonical_value(&[w.clone()]).unwrap(), &w * &w / q(2));
        assert_eq!(
            c.canonical_value(&[&w + q(1)]).unwrap() - c.canonical_value(&[w.clone()]).unwrap(),
            c.z_value(&[1], &[w])
        );
        assert_eq!(c.canonical_value(&[q(0)]).unwrap(), q(0));
        assert_eq!(Cocycle::standard(2).canonical_value(&qvec(&[1, 1])).unwrap(), q(1));
    }

    #[test]
    fn validation() {
        // b·λ not integral
        let bad = Cocycle::new(vec![qvec(&[1])], vec![vec![frac(1, 2)]], vec![q(0)], true);
        assert!(matches!(bad, Err(Error::InvalidCocycle(_))));
        // indefinite b needs the flag off
        let b = vec![qvec(&[1, 2]), qvec(&[2, 1])];
        assert!(Cocycle::new(linalg::identity(2), b.clone(), qvec(&[0, 0]), true).is_err());
        let unpol = Cocycle::new(linalg::identity(2), b, qvec(&[0, 0]), false).unwrap();
        assert_eq!(unpol.canonical_value(&qvec(&[0, 0])), Err(Error::Unpolarized));
        assert!(Cocycle::new(vec![qvec(&[1, 1]), qvec(&[2, 2])], linalg::identity(2), qvec(&[0, 0]), true).is_err());
    }

    #[test]
    fn box_points() {
        let c = Cocycle::new(
            vec![qvec(&[1, 1]), qvec(&[0, 2])],
            linalg::identity(2),
            qvec(&[1, 2]),
            true,
        )
        .unwrap();
        let pts = c.lattice_points_in_box(&qvec(&[-1, -1]), &qvec(&[1, 1]));
        // brute force over a generous coordinate range
        let mut oracle = Vec::new();
        for k in integer_box(&[(-5, 5), (-5, 5)]) {
            let l = c.lattice_point(&k);
            if l.iter().all(|x| x >= &q(-1) && x <= &q(1)) {
                oracle.push(k);
            }
        }
        assert_eq!(pts, oracle);
    }

    #[test]
    fn reduction_lands_in_domain() {
        let c = Cocycle::new(
            vec![qvec(&[2, 1]), qvec(&[0, 1])],
            linalg::identity(2),
            qvec(&[1, 1]),
            true,
        )
        .unwrap();
        let w = vec![frac(-7, 3), frac(11, 5)];
        let (w0, k) = c.reduce(&w);
        assert!(c.in_fundamental_domain(&w0));
        assert_eq!(linalg::add(&w0, &c.lattice_point(&k)), w);
    }

    fn small_cocycle() -> impl Strategy<Value = Cocycle> {
        // b = AᵀA + I is positive definite; integral periods keep b·λ integral
        (
            prop::collection::vec(-2i64..=2, 4),
            prop::collection::vec(-3i64..=3, 2),
            prop::collection::vec(1i64..=3, 1),
        )
            .prop_filter_map("dependent periods", |(a, z, s)| {
                let a = [[a[0], a[1]], [a[2], a[3]]];
                let b: Matrix = (0..2)
                    .map(|i| {
                        (0..2)
                            .map(|j| {
                                let v = a[0][i] * a[0][j] + a[1][i] * a[1][j] + i64::from(i == j);
                                q(v)
                            })
                            .collect()
                    })
                    .collect();
                let periods = vec![qvec(&[s[0], 0]), qvec(&[1, 1])];
                let z0 = vec![frac(z[0], 2), frac(z[1], 3)];
                Cocycle::new(periods, b, z0, true).ok()
            })
    }

    proptest! {
        #[test]
        fn cocycle_identity(
            c in small_cocycle(),
            l in prop::collection::vec(-3i64..=3, 2),
            v in prop::collection::vec(-3i64..=3, 2),
            w in prop::collection::vec((-20i64..=20, 1i64..=7), 2),
        ) {
            let omega: Vector = w.iter().map(|&(a, d)| frac(a, d)).collect();
            let lv: LatticeCoords = l.iter().zip(&v).map(|(a, b)| a + b).collect();
            let nu = c.lattice_point(&v);
            let lhs = c.z_value(&lv, &omega);
            let rhs = c.z_value(&l, &linalg::add(&omega, &nu)) + c.z_value(&v, &omega);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn constants_are_quadratic(c in small_cocycle(), l in prop::collection::vec(-3i64..=3, 2), k in -4i64..=4) {
            let lam = c.lattice_point(&l);
            let kl: LatticeCoords = l.iter().map(|x| k * x).collect();
            let expected = q(k) * c.constant_at(&l) + q(k * (k - 1)) / q(2) * linalg::bilinear(c.b(), &lam, &lam);
            prop_assert_eq!(c.constant_at(&kl), expected);
        }

        #[test]
        fn canonical_satisfies_rule(c in small_cocycle(), l in prop::collection::vec(-3i64..=3, 2), w in prop::collection::vec((-20i64..=20, 1i64..=7), 2)) {
            let omega: Vector = w.iter().map(|&(a, d)| frac(a, d)).collect();
            let shifted = linalg::add(&omega, &c.lattice_point(&l));
            prop_assert_eq!(
                c.canonical_value(&shifted).unwrap(),
                c.canonical_value(&omega).unwrap() + c.z_value(&l, &omega)
            );
        }
    }
}
