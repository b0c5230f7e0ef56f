//! Exact linear algebra over the rationals: reduced row echelon form,
//! null spaces, span membership, and a small harness for turning linear
//! constraints on polynomial-valued objects into coefficient matrices.

use num_traits::{One, Zero};

use crate::poly::{Monomial, MultiPoly, Scalar};

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Scalar>>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![vec![Scalar::zero(); cols]; rows],
        }
    }

    pub fn from_rows(data: Vec<Vec<Scalar>>) -> Self {
        let rows = data.len();
        let cols = data.first().map(|r| r.len()).unwrap_or(0);
        assert!(data.iter().all(|r| r.len() == cols));
        QMatrix { rows, cols, data }
    }

    pub fn from_columns(cols: &[Vec<Scalar>]) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map(|c| c.len()).unwrap_or(0);
        let mut m = QMatrix::zeros(nrows, ncols);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows);
            for (i, v) in col.iter().enumerate() {
                m.data[i][j] = v.clone();
            }
        }
        m
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().chain(b.iter()).cloned().collect())
            .collect();
        QMatrix::from_rows(data)
    }

    /// In-place Gauss-Jordan elimination; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.data[r][col].is_zero()) else {
                continue;
            };
            self.data.swap(row, p);
            let inv = {
                let pv = self.data[row][col].clone();
                Scalar::one() / pv
            };
            for v in self.data[row].iter_mut() {
                *v = &*v * &inv;
            }
            for r in 0..self.rows {
                if r != row && !self.data[r][col].is_zero() {
                    let factor = self.data[r][col].clone();
                    for c in 0..self.cols {
                        let delta = &factor * &self.data[row][c];
                        self.data[r][c] = &self.data[r][c] - &delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right null space, as column vectors.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Scalar::zero(); self.cols];
            v[fc] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.data[r][fc].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `self * x = b`, if consistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let bcol = QMatrix::from_columns(&[b.to_vec()]);
        let mut aug = self.hstack(&bcol);
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column: inconsistent
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.data[r][self.cols].clone();
        }
        Some(x)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

/// Coordinate frame for vectors of polynomials: each distinct
/// (component index, monomial) pair becomes one coordinate.
#[derive(Clone, Debug, Default)]
pub struct CoordFrame {
    keys: Vec<(usize, Monomial)>,
}

impl CoordFrame {
    /// Build the frame spanning every key appearing in `vecs`.
    pub fn spanning(vec_sets: &[&[Vec<MultiPoly>]]) -> CoordFrame {
        let mut keys: Vec<(usize, Monomial)> = Vec::new();
        for set in vec_sets {
            for vec in set.iter() {
                for (pos, p) in vec.iter().enumerate() {
                    for (m, _) in p.terms() {
                        let key = (pos, m.clone());
                        if !keys.contains(&key) {
                            keys.push(key);
                        }
                    }
                }
            }
        }
        keys.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        CoordFrame { keys }
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn coords(&self, vec: &[MultiPoly]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.keys.len()];
        for (pos, p) in vec.iter().enumerate() {
            for (m, c) in p.terms() {
                let idx = self
                    .keys
                    .iter()
                    .position(|k| k.0 == pos && &k.1 == m)
                    .expect("vector outside coordinate frame");
                out[idx] = c.clone();
            }
        }
        out
    }

    /// Matrix whose columns are the coordinates of `vecs`.
    pub fn matrix(&self, vecs: &[Vec<MultiPoly>]) -> QMatrix {
        let cols: Vec<Vec<Scalar>> = vecs.iter().map(|v| self.coords(v)).collect();
        if cols.is_empty() {
            QMatrix::zeros(self.dim(), 0)
        } else {
            QMatrix::from_columns(&cols)
        }
    }
}

/// Null space of a residual map: `residuals[i]` is the (polynomial-valued)
/// residual of the i-th generator under some linear constraint system; the
/// result is a basis of coefficient combinations with vanishing residual.
pub fn nullspace_of_residuals(residuals: &[Vec<MultiPoly>]) -> Vec<Vec<Scalar>> {
    if residuals.is_empty() {
        return Vec::new();
    }
    let frame = CoordFrame::spanning(&[residuals]);
    let m = frame.matrix(residuals);
    if m.rows == 0 {
        // no constraints at all: everything is in the kernel
        return (0..residuals.len())
            .map(|i| {
                let mut v = vec![Scalar::zero(); residuals.len()];
                v[i] = Scalar::one();
                v
            })
            .collect();
    }
    m.nullspace()
}

/// Rank of the span of polynomial vectors.
pub fn rank_of(vecs: &[Vec<MultiPoly>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    let frame = CoordFrame::spanning(&[vecs]);
    frame.matrix(vecs).rank()
}

/// Is `v` in the rational span of `basis`?
pub fn in_span(basis: &[Vec<MultiPoly>], v: &[MultiPoly]) -> bool {
    if v.iter().all(|p| p.is_zero()) {
        return true;
    }
    let owned = vec![v.to_vec()];
    let frame = CoordFrame::spanning(&[basis, &owned]);
    let m = frame.matrix(basis);
    m.solve(&frame.coords(v)).is_some()
}

/// Is every vector of `sub` in the span of `sup`?
pub fn span_contained(sub: &[Vec<MultiPoly>], sup: &[Vec<MultiPoly>]) -> bool {
    sub.iter().all(|v| in_span(sup, v))
}
