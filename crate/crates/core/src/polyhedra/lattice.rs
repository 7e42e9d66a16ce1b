//! Integer lattice helpers: saturation of rational subspaces and Hermite normal form.

use crate::linalg::{self, from_int, primitive_integer, Vector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-style Hermite normal form of an integer matrix, zero rows dropped.
pub fn hermite_normal_form(mut a: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let m = a.len();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        while let Some(p) = (r..m)
            .filter(|&i| !a[i][c].is_zero())
            .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()))
        {
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].div_floor(&a[r][c]);
                let pivot = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot = a[r].clone();
        for row in a.iter_mut().take(r) {
            let f = row[c].div_floor(&pivot[c]);
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &f * y;
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Lattice basis (in Hermite normal form) of `span(rows) ∩ ℤⁿ`.
pub fn saturated_basis(rows: &[Vector], n: usize) -> Vec<Vector> {
    let (reduced, _) = linalg::rref(rows, n);
    let k = reduced.len();
    if k == 0 {
        return Vec::new();
    }
    let mut b: Vec<Vec<BigInt>> = reduced.iter().map(|r| primitive_integer(r)).collect();
    // unimodular column operations B ← B·W, tracking W⁻¹
    let mut winv: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for i in 0..k {
        loop {
            let p = (i..n)
                .filter(|&j| !b[i][j].is_zero())
                .min_by(|&x, &y| b[i][x].abs().cmp(&b[i][y].abs()))
                .expect("rows are independent");
            if p != i {
                for row in b.iter_mut() {
                    row.swap(i, p);
                }
                winv.swap(i, p);
            }
            let mut done = true;
            for j in i + 1..n {
                if b[i][j].is_zero() {
                    continue;
                }
                let f = b[i][j].div_floor(&b[i][i]);
                for row in b.iter_mut() {
                    let t = &f * &row[i];
                    row[j] -= t;
                }
                let src = winv[j].clone();
                for (x, y) in winv[i].iter_mut().zip(&src) {
                    *x += &f * y;
                }
                if !b[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
    }
    winv.truncate(k);
    hermite_normal_form(winv, n)
        .into_iter()
        .map(|r| linalg::to_rational_vec(&r))
        .collect()
}

/// Whether integer vectors `basis` span a saturated sublattice of ℤⁿ.
pub fn is_saturated(basis: &[Vector], n: usize) -> bool {
    if basis.iter().flatten().any(|x| !x.is_integer()) {
        return false;
    }
    let sat = saturated_basis(basis, n);
    if sat.len() != basis.len() {
        return false;
    }
    // coordinates of each basis vector with respect to the saturated basis
    let st = linalg::transpose(&sat, n);
    let mut t = Vec::with_capacity(basis.len());
    for v in basis {
        match linalg::solve(&st, v, sat.len()) {
            Some(c) => t.push(c),
            None => return false,
        }
    }
    linalg::det(&t).abs() == from_int(&BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn hnf_of_small_matrix() {
        let h = hermite_normal_form(ints(&[&[2, 4], &[3, 5]]), 2);
        assert_eq!(h, ints(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn saturation_of_diagonal() {
        assert_eq!(saturated_basis(&[qvec(&[2, 2])], 2), vec![qvec(&[1, 1])]);
    }

    #[test]
    fn saturation_of_plane_in_space() {
        let b = saturated_basis(&[qvec(&[2, 0, 0]), qvec(&[0, 2, 0])], 3);
        assert_eq!(b, vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]);
    }

    #[test]
    fn saturation_of_skew_plane() {
        // span{(2,1,0),(0,1,2)} ∩ ℤ³ has index-free basis
        let b = saturated_basis(&[qvec(&[2, 1, 0]), qvec(&[0, 1, 2])], 3);
        assert_eq!(b.len(), 2);
        assert!(is_saturated(&b, 3));
        // (1,1,1) is half the sum of the inputs, so they span an index-2 sublattice
        assert!(!is_saturated(&[qvec(&[2, 1, 0]), qvec(&[0, 1, 2])], 3));
    }

    #[test]
    fn non_saturated_detected() {
        assert!(!is_saturated(&[qvec(&[2, 0])], 2));
        assert!(is_saturated(&[qvec(&[1, 1])], 2));
        assert!(is_saturated(&[qvec(&[1, 2]), qvec(&[0, 1])], 2));
    }
}
