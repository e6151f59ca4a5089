//! Dense exact-rational matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, value: &Rational) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = value.clone();
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry convenience constructor. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| rational::int(x)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == QMatrix::identity(self.rows)
    }

    /// `M^T = -M` (plain matrix skewness).
    pub fn is_skew(&self) -> bool {
        self.is_square() && self.transpose() == -self
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.transpose() == *self
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Sub-block starting at `(r0, c0)` with the given extent.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let mut b = QMatrix::zeros(nr, nc);
        for r in 0..nr {
            for c in 0..nc {
                b.data[r * nc + c] = self.get(r0 + r, c0 + c).clone();
            }
        }
        b
    }

    /// `[[tl, tr], [bl, br]]`. Panics if the blocks do not tile.
    pub fn from_blocks(tl: &QMatrix, tr: &QMatrix, bl: &QMatrix, br: &QMatrix) -> Self {
        assert!(tl.rows == tr.rows && bl.rows == br.rows, "block rows do not tile");
        assert!(tl.cols == bl.cols && tr.cols == br.cols, "block columns do not tile");
        let rows = tl.rows + bl.rows;
        let cols = tl.cols + tr.cols;
        let mut m = QMatrix::zeros(rows, cols);
        for (blk, r0, c0) in [(tl, 0, 0), (tr, 0, tl.cols), (bl, tl.rows, 0), (br, tl.rows, tl.cols)] {
            for r in 0..blk.rows {
                for c in 0..blk.cols {
                    m.data[(r0 + r) * cols + c0 + c] = blk.get(r, c).clone();
                }
            }
        }
        m
    }

    /// Block-diagonal sum of square blocks.
    pub fn block_diag(blocks: &[QMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = QMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            assert!(b.is_square(), "block_diag requires square blocks");
            for r in 0..b.rows {
                for c in 0..b.cols {
                    m.data[(off + r) * n + off + c] = b.get(r, c).clone();
                }
            }
            off += b.rows;
        }
        m
    }

    /// Entries where `self` and `other` differ, as `(row, col, self - other)`.
    pub fn diff_entries(&self, other: &QMatrix) -> Vec<(usize, usize, Rational)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = self.get(r, c) - other.get(r, c);
                if !d.is_zero() {
                    out.push((r, c, d));
                }
            }
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(p, row);
            let inv = m.get(row, col).recip();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for c in col..m.cols {
                    if m.get(row, c).is_zero() {
                        continue;
                    }
                    let v = m.get(r, c) - &f * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = QMatrix::from_blocks(
            self,
            &QMatrix::identity(n),
            &QMatrix::zeros(0, n),
            &QMatrix::zeros(0, n),
        );
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det *= &pivot;
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col) / &pivot;
                for c in col..n {
                    let v = m.get(r, c) - &f * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// Determinants of the leading `k x k` submatrices, `k = 1..=n`.
    pub fn leading_principal_minors(&self) -> Vec<Rational> {
        (1..=self.rows).map(|k| self.block(0, 0, k, k).determinant()).collect()
    }

    /// Sylvester's criterion on a symmetric matrix.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric() && self.leading_principal_minors().iter().all(rational::is_positive)
    }

    pub fn pow(&self, k: u32) -> QMatrix {
        let mut acc = QMatrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(rational::format).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        out.data[r * rhs.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;

    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;

    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference shape mismatch"
        );
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;

    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}
