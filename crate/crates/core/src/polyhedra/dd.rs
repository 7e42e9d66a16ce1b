//! Double description: extreme rays of pointed polyhedral cones.
//!
//! The cone is `{y : a·y ≥ 0 for every row a}`. Rows are inserted one at a
//! time; adjacency of rays is decided combinatorially from zero sets, which is
//! exact for pointed cones and needs no perturbation.

use crate::linalg::{self, primitive_integer, to_rational_vec, Vector};
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(bits: usize) -> Self {
        ZeroSet(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset_of(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: Vector,
    zeros: ZeroSet,
}

fn normalize(v: &[linalg::Scalar]) -> Vector {
    to_rational_vec(&primitive_integer(v))
}

/// Extreme rays (as primitive integer vectors) of `{y : rows·y ≥ 0}`.
///
/// Returns `None` when the rows do not have full column rank, i.e. the cone
/// has a nontrivial lineality space.
pub(crate) fn extreme_rays(rows: &[Vector], dim: usize) -> Option<Vec<Vector>> {
    if dim == 0 {
        return Some(Vec::new());
    }
    // greedy choice of an initial basis of rows
    let mut basis_idx = Vec::with_capacity(dim);
    let mut basis_rows: Vec<Vector> = Vec::with_capacity(dim);
    for (i, r) in rows.iter().enumerate() {
        if linalg::is_zero_vec(r) {
            continue;
        }
        basis_rows.push(r.clone());
        if linalg::rank(&basis_rows, dim) == basis_rows.len() {
            basis_idx.push(i);
            if basis_idx.len() == dim {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    if basis_idx.len() < dim {
        return None;
    }
    let inv = linalg::inverse(&basis_rows)?;
    let m = rows.len();
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vector = inv.iter().map(|row| row[j].clone()).collect();
            let mut zeros = ZeroSet::new(m);
            for (i, &bi) in basis_idx.iter().enumerate() {
                if i != j {
                    zeros.insert(bi);
                }
            }
            Ray {
                v: normalize(&col),
                zeros,
            }
        })
        .collect();

    for (t, row) in rows.iter().enumerate() {
        if basis_idx.contains(&t) {
            continue;
        }
        let vals: Vec<linalg::Scalar> = rays.iter().map(|r| linalg::dot(row, &r.v)).collect();
        if vals.iter().all(|s| !s.is_negative()) {
            for (r, s) in rays.iter_mut().zip(&vals) {
                if s.is_zero() {
                    r.zeros.insert(t);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == n || !common.is_subset_of(&r.zeros));
                if !adjacent {
                    continue;
                }
                let v: Vector = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(rn, rp)| &vals[p] * rn - &vals[n] * rp)
                    .collect();
                let mut zeros = common;
                zeros.insert(t);
                fresh.push(Ray {
                    v: normalize(&v),
                    zeros,
                });
            }
        }
        let mut next = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, s) in rays.into_iter().zip(&vals) {
            if s.is_negative() {
                continue;
            }
            if s.is_zero() {
                r.zeros.insert(t);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }
    Some(rays.into_iter().map(|r| r.v).collect())
}
