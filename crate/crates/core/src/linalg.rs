//! Exact rational linear algebra on dense row-major matrices.
//!
//! Everything here works over `BigRational`; no routine ever rounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Scalar = BigRational;
pub type Vector = Vec<Scalar>;
pub type Matrix = Vec<Vector>;

pub fn q(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_int(n: &BigInt) -> Scalar {
    BigRational::from_integer(n.clone())
}

pub fn qvec(xs: &[i64]) -> Vector {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Scalar::one();
    v
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| unit(n, i)).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Scalar], s: &Scalar) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Scalar]) -> Vector {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Scalar]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn mat_vec(m: &[Vector], v: &[Scalar]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `vᵀ m`, i.e. the row vector `v` times the matrix.
pub fn vec_mat(v: &[Scalar], m: &[Vector], cols: usize) -> Vector {
    let mut out = zeros(cols);
    for (vi, row) in v.iter().zip(m) {
        if vi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += vi * r;
        }
    }
    out
}

pub fn transpose(m: &[Vector], cols: usize) -> Matrix {
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &[Vector], b: &[Vector], b_cols: usize) -> Matrix {
    a.iter().map(|row| vec_mat(row, b, b_cols)).collect()
}

/// Symmetric bilinear form `xᵀ m y`.
pub fn bilinear(m: &[Vector], x: &[Scalar], y: &[Scalar]) -> Scalar {
    dot(x, &mat_vec(m, y))
}

/// Reduced row echelon form. Returns the nonzero reduced rows and their pivot columns.
pub fn rref(rows: &[Vector], cols: usize) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vector], cols: usize) -> usize {
    rref(rows, cols).1.len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[Vector], cols: usize) -> Matrix {
    let (r, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(cols);
            v[f] = Scalar::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &[Vector], b: &[Scalar], cols: usize) -> Option<Vector> {
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = zeros(cols);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[cols].clone();
    }
    Some(x)
}

pub fn det(m: &[Vector]) -> Scalar {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut d = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            let pivot_row = a[c].clone();
            for (x, p) in a[i].iter_mut().zip(&pivot_row).skip(c) {
                *x -= &f * p;
            }
        }
    }
    d
}

pub fn inverse(m: &[Vector]) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Sylvester's criterion on leading principal minors.
pub fn is_positive_definite(m: &[Vector]) -> bool {
    let n = m.len();
    (1..=n).all(|k| {
        let minor: Matrix = m[..k].iter().map(|row| row[..k].to_vec()).collect();
        det(&minor).is_positive()
    })
}

pub fn is_symmetric(m: &[Vector]) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].len() == n && (0..i).all(|j| m[i][j] == m[j][i]))
}

pub fn lcm_of_denominators(v: &[Scalar]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales `v` by a positive factor to a coprime integer vector.
pub fn primitive_integer(v: &[Scalar]) -> Vec<BigInt> {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * from_int(&l)).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect())
        .collect();
    if let Some(a) = small {
        if let Some(r) = bareiss_rank_i128(a, cols) {
            return r;
        }
    }
    bareiss_rank_big(rows.to_vec(), cols)
}

/// `None` on overflow.
fn bareiss_rank_i128(mut a: Vec<Vec<i128>>, cols: usize) -> Option<usize> {
    let n = a.len();
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..n {
            for j in c + 1..cols {
                let x = a[i][j].checked_mul(a[r][c])?;
                let y = a[i][c].checked_mul(a[r][j])?;
                a[i][j] = x.checked_sub(y)? / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
    }
    Some(r)
}

fn bareiss_rank_big(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let n = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..n {
            for j in c + 1..cols {
                a[i][j] = (&a[i][j] * &a[r][c] - &a[i][c] * &a[r][j]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn to_rational_vec(v: &[BigInt]) -> Vector {
    v.iter().map(from_int).collect()
}

/// Integer floor of a rational.
pub fn floor(x: &Scalar) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Scalar) -> BigInt {
    x.ceil().to_integer()
}

/// An integer upper bound for `sqrt(x)` when `x ≥ 0`.
pub fn sqrt_upper(x: &Scalar) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let c = ceil(x);
    let s = c.sqrt();
    if &s * &s >= c {
        s
    } else {
        s + 1
    }
}

pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

pub fn factorial(n: usize) -> Scalar {
    (1..=n).fold(Scalar::one(), |acc, k| acc * q(k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn integer_rank_matches_rational(
            rows in prop::collection::vec(prop::collection::vec(-4i64..5, 4), 1..5),
            big in prop::bool::ANY,
        ) {
            // a huge common factor forces the BigInt path
            let f = if big { BigInt::from(10).pow(30) } else { BigInt::one() };
            let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x) * &f).collect()).collect();
            let rats: Matrix = rows.iter().map(|r| qvec(r)).collect();
            prop_assert_eq!(integer_rank(&ints, 4), rank(&rats, 4));
        }
    }

    #[test]
    fn det_and_inverse_agree() {
        let m = vec![qvec(&[2, 1, 0]), qvec(&[1, 3, 1]), qvec(&[0, 1, 4])];
        assert_eq!(det(&m), q(18));
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv, 3), identity(3));
    }

    #[test]
    fn nullspace_of_plane() {
        let ns = nullspace(&[qvec(&[1, 1, 1])], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(dot(&v, &qvec(&[1, 1, 1])).is_zero());
        }
    }

    #[test]
    fn inconsistent_system() {
        let a = vec![qvec(&[1, 1]), qvec(&[2, 2])];
        assert!(solve(&a, &qvec(&[1, 3]), 2).is_none());
        assert_eq!(solve(&a, &qvec(&[1, 2]), 2), Some(qvec(&[1, 0])));
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![frac(1, 2), frac(-3, 4)];
        assert_eq!(primitive_integer(&v), vec![BigInt::from(2), BigInt::from(-3)]);
    }

    #[test]
    fn sqrt_bound_is_upper() {
        for n in 0..50i64 {
            let x = frac(n, 3);
            let s = sqrt_upper(&x);
            assert!(from_int(&(&s * &s)) >= x);
        }
    }

    #[test]
    fn sylvester() {
        assert!(is_positive_definite(&[qvec(&[2, 1]), qvec(&[1, 2])]));
        assert!(!is_positive_definite(&[qvec(&[1, 2]), qvec(&[2, 1])]));
    }
}
