//! Exact Gaussian elimination over the rationals.
//!
//! Pivots are always the first nonzero entry in column order, never chosen by
//! magnitude, so verdicts and solved coordinates are reproducible bit for bit.

use crate::poly::{rone, rzero, Coeff, Rat};

/// Dense rational matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![rzero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = rone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        QMatrix { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            // First nonzero entry in this column at or below row r.
            let Some(p) = (r..self.rows).find(|&i| !self[(i, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = {
                let piv = self[(r, col)].clone();
                rone() / piv
            };
            for j in col..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, col)].is_zero() {
                    let factor = self[(i, col)].clone();
                    for j in 0..self.cols {
                        let v = &self[(i, j)] - &factor * &self[(r, j)];
                        self[(i, j)] = v;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A basis of the right null space, read off the reduced echelon form:
    /// one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut vec = vec![rzero(); self.cols];
            vec[free] = rone();
            for (row, &pc) in pivots.iter().enumerate() {
                vec[pc] = -m[(row, free)].clone();
            }
            basis.push(vec);
        }
        basis
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Outcome of solving `A x = b` through a precomputed [`SolveOperator`].
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// The right-hand side is outside the column space; the offending
    /// consistency row is reported.
    Inconsistent { row: usize },
    /// `A` has a nontrivial kernel; `gap` is its dimension.
    Underdetermined { gap: usize },
}

/// A factored linear system `A x = b` with `A` over the rationals.
///
/// Row reduction is carried out once; afterwards any number of right-hand
/// sides can be solved by matrix application alone, with entries in any
/// module over the rationals (rationals, polynomials). This is what makes
/// symbolic strong differences cheap: the system matrix depends only on the
/// diagram, never on the data.
#[derive(Debug, Clone)]
pub struct SolveOperator {
    pub in_dim: usize,  // rows of A (right-hand side length)
    pub out_dim: usize, // cols of A (solution length)
    rank: usize,
    /// `solution * b` yields the unique solution when consistent.
    solution: QMatrix,
    /// Rows that must annihilate `b` for the system to be consistent.
    consistency: QMatrix,
}

impl SolveOperator {
    /// Factors `a`. Fails with `Underdetermined` when the columns of `a` are
    /// linearly dependent (no unique solutions exist).
    pub fn new(a: &QMatrix) -> Result<Self, SolveError> {
        let n = a.rows;
        let m = a.cols;
        // Augment with the identity to track the row transform: T * A = R.
        let mut aug = QMatrix::zero(n, m + n);
        for i in 0..n {
            for j in 0..m {
                aug[(i, j)] = a[(i, j)].clone();
            }
            aug[(i, m + i)] = rone();
        }
        let pivots = aug.rref();
        let rank = pivots.iter().filter(|&&c| c < m).count();
        if rank < m {
            return Err(SolveError::Underdetermined { gap: m - rank });
        }
        // With full column rank the first m rows of R form the identity, so
        // rows 0..m of T solve and rows m..n of T must kill b.
        let mut solution = QMatrix::zero(m, n);
        for i in 0..m {
            for j in 0..n {
                solution[(i, j)] = aug[(i, m + j)].clone();
            }
        }
        let mut consistency = QMatrix::zero(n - m, n);
        for i in m..n {
            for j in 0..n {
                consistency[(i - m, j)] = aug[(i, m + j)].clone();
            }
        }
        Ok(SolveOperator { in_dim: n, out_dim: m, rank, solution, consistency })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Solves for a right-hand side with entries in any rational module.
    pub fn apply<S: Coeff>(&self, b: &[S]) -> Result<Vec<S>, SolveError> {
        assert_eq!(b.len(), self.in_dim, "right-hand side length mismatch");
        for i in 0..self.consistency.rows {
            let mut acc = b[0].zero_like();
            for (c, bj) in self.consistency.row(i).iter().zip(b) {
                if !c.is_zero() {
                    acc = acc.add(&bj.scale(c));
                }
            }
            if !acc.is_zero() {
                return Err(SolveError::Inconsistent { row: i });
            }
        }
        let mut out = Vec::with_capacity(self.out_dim);
        for i in 0..self.out_dim {
            let mut acc = b[0].zero_like();
            for (c, bj) in self.solution.row(i).iter().zip(b) {
                if !c.is_zero() {
                    acc = acc.add(&bj.scale(c));
                }
            }
            out.push(acc);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rint, Poly};

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rint(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_rank_and_pivots() {
        let mut a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        let pivots = a.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn rref_exact_fractions() {
        let mut a = QMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 4), rat(1, 5)],
        ]);
        let pivots = a.rref();
        assert_eq!(pivots.len(), 2);
        assert_eq!(a[(0, 0)], rint(1));
        assert_eq!(a[(1, 1)], rint(1));
        assert_eq!(a[(0, 1)], rint(0));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = m(&[&[1, 2], &[2, 4]]);
        let basis = a.nullspace_basis();
        assert_eq!(basis.len(), 1);
        // A * v = 0
        assert_eq!(&a[(0, 0)] * &basis[0][0] + &a[(0, 1)] * &basis[0][1], rint(0));
    }

    #[test]
    fn solve_unique() {
        // x + y = 3, x - y = 1, 2x = 4 (consistent, overdetermined)
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let op = SolveOperator::new(&a).unwrap();
        let sol = op.apply(&[rint(3), rint(1), rint(4)]).unwrap();
        assert_eq!(sol, vec![rint(2), rint(1)]);
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let op = SolveOperator::new(&a).unwrap();
        let err = op.apply(&[rint(1), rint(1), rint(3)]).unwrap_err();
        assert!(matches!(err, SolveError::Inconsistent { .. }));
    }

    #[test]
    fn solve_underdetermined() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            SolveOperator::new(&a).unwrap_err(),
            SolveError::Underdetermined { gap: 1 }
        );
    }

    #[test]
    fn solve_polynomial_rhs() {
        // The same operator applies to module-valued right-hand sides.
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let op = SolveOperator::new(&a).unwrap();
        let x = Poly::var(0, 1);
        let b = vec![
            x.scale(&rint(3)),
            x.clone(),
            x.scale(&rint(4)),
        ];
        let sol = op.apply(&b).unwrap();
        assert_eq!(sol, vec![x.scale(&rint(2)), x]);
    }
}
