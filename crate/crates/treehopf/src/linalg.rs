//! Exact dense linear algebra over rationals: incremental row spaces,
//! solving, inversion, kernels. Dimensions stay small (a few hundred),
//! so plain Gaussian elimination with exact arithmetic is enough.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::Rational;

/// An incrementally built row space in echelon form. Rows are kept with
/// a leading 1 in their pivot column.
pub(crate) struct Echelon {
    cols: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "column count mismatch");
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, r) in v.iter_mut().zip(row.iter()) {
                    *x -= &c * r;
                }
            }
        }
        v
    }

    /// Inserts `v` when independent of the current rows; returns whether
    /// it was inserted.
    pub fn insert(&mut self, v: Vec<Rational>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = v[p].clone();
        for x in v.iter_mut() {
            *x /= &lead;
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    #[cfg(test)]
    pub fn contains(&self, v: Vec<Rational>) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

/// Row-reduces `rows` in place to reduced echelon form; returns the
/// pivot columns.
pub(crate) fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let lead = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &lead;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub(crate) fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    rref(&mut rows).len()
}

/// Basis of the right kernel `{x : A x = 0}` of a rows-by-cols matrix.
pub(crate) fn kernel(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    debug_assert!(rows.iter().all(|r| r.len() == cols));
    let pivots = rref(&mut rows);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (row, &p) in rows.iter().zip(pivots.iter()) {
            x[p] = -row[free].clone();
        }
        basis.push(x);
    }
    basis
}

/// Solves `A x = b` for square or rectangular `A` (rows-by-cols);
/// returns one solution or `None` when inconsistent.
pub(crate) fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last().is_some_and(|&p| p == cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &p) in aug.iter().zip(pivots.iter()) {
        x[p] = row[cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, or `None` when singular.
pub(crate) fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Matrix-vector product.
pub(crate) fn mat_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            let mut acc = Rational::zero();
            for (c, v) in row.iter().zip(x.iter()) {
                acc += c * v;
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn echelon_tracks_rank() {
        let mut e = Echelon::new(3);
        assert!(e.insert(vec![rat(1), rat(2), rat(3)]));
        assert!(e.insert(vec![rat(0), rat(1), rat(1)]));
        assert!(!e.insert(vec![rat(1), rat(3), rat(4)]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(vec![rat(2), rat(5), rat(7)]));
        assert!(!e.contains(vec![rat(0), rat(0), rat(1)]));
    }

    #[test]
    fn solve_and_invert() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = solve(&a, &[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        let inv = invert(&a).unwrap();
        assert_eq!(mat_vec(&inv, &[rat(3), rat(2)]), vec![rat(1), rat(1)]);
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[rat(0), rat(1)]).is_none());
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3]]);
        let k = kernel(a.clone(), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }
}
