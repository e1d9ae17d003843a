//! Dense rational matrices with fraction-free Gauss-Jordan elimination.
//!
//! Rows are scaled to integers first; elimination then runs over `BigInt`
//! with `row_r <- p * row_r - a * row_pivot` followed by division by the row
//! content, so no fractions appear until the nullspace vectors are read off.
//! Pivots are taken in column order from the first eligible row, which makes
//! every returned basis deterministic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{format_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Q>,
}

/// Reduced row echelon form over the integers: each pivot column is zero
/// outside its pivot row.
#[derive(Clone, Debug)]
pub struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let n = rows.len();
        RationalMatrix { rows: n, cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Q) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn echelon(&self) -> Echelon {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows).map(|r| integer_row(self.row(r))).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            let pivot = pivot_row[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == next || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x * &pivot - &factor * y;
                }
                normalize_content(row);
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Echelon { rows, pivots, cols: self.cols }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{v : M v = 0}`, one vector per free column in ascending order.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        self.echelon().nullspace()
    }

    /// All solutions of `M x = b`: a particular solution (free variables set
    /// to zero) plus the nullspace, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[Q]) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
        assert_eq!(rhs.len(), self.rows);
        let mut augmented = RationalMatrix::zeros(self.rows, self.cols + 1);
        for (r, b) in rhs.iter().enumerate() {
            for c in 0..self.cols {
                augmented.set(r, c, self.get(r, c).clone());
            }
            augmented.set(r, self.cols, b.clone());
        }
        let ech = augmented.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut particular = vec![Q::zero(); self.cols];
        for (row, &col) in ech.rows.iter().zip(&ech.pivots) {
            particular[col] = Q::new(row[self.cols].clone(), row[col].clone());
        }
        Some((particular, self.nullspace()))
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&j| {
                let mut v = vec![Q::zero(); self.cols];
                v[j] = Q::one();
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = -Q::new(row[j].clone(), row[pc].clone());
                }
                v
            })
            .collect()
    }
}

fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut out: Vec<BigInt> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    normalize_content(&mut out);
    out
}

fn normalize_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in row.iter_mut() {
        *x = &*x / &g;
    }
}

/// Renders a vector as reduced-fraction strings.
pub fn format_vector(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

/// True when `v` is a rational multiple of `w` (both nonzero).
pub fn proportional(v: &[Q], w: &[Q]) -> bool {
    let Some(k) = w.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if v[k].is_zero() {
        return false;
    }
    let ratio = &v[k] / &w[k];
    v.iter().zip(w).all(|(a, b)| *a == b * &ratio)
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(format_q).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn nullspace_examples() {
        assert!(RationalMatrix::identity(3).nullspace().is_empty());
        assert_eq!(RationalMatrix::zeros(2, 3).nullspace().len(), 3);
        let m = RationalMatrix::from_rows(vec![qs(&[1, -1])], 2);
        assert_eq!(m.nullspace(), vec![qs(&[1, 1])]);
    }

    #[test]
    fn nullspace_with_fractions() {
        let m = RationalMatrix::from_rows(
            vec![vec![frac(1, 2), frac(1, 3), q(1)], vec![q(1), frac(2, 3), q(2)]],
            3,
        );
        assert_eq!(m.rank(), 1);
        let basis = m.nullspace();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert_eq!(basis[0], vec![frac(-2, 3), q(1), q(0)]);
    }

    #[test]
    fn solve_unique_and_inconsistent() {
        let m = RationalMatrix::from_rows(vec![qs(&[1, 1]), qs(&[8, 2])], 2);
        let (x, kernel) = m.solve(&qs(&[-1, -8])).unwrap();
        assert!(kernel.is_empty());
        assert_eq!(x, qs(&[-1, 0]));
        let singular = RationalMatrix::from_rows(vec![qs(&[1, 1]), qs(&[2, 2])], 2);
        assert!(singular.solve(&qs(&[1, 3])).is_none());
    }
}
