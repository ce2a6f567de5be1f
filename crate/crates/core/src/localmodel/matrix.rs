//! Dense matrices over `F_q`. Vectors are coordinate rows; a matrix acts on
//! a vector `x` as the column product `A x`.

use crate::ffield::{FieldDesc, FieldElem};

pub type Vector = Vec<FieldElem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldDesc, n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, field: &FieldDesc, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = field.add(out.get(i, j), field.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, field: &FieldDesc, x: &[FieldElem]) -> Vector {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(field.zero(), |acc, (&a, &b)| {
                        field.add(acc, field.mul(a, b))
                    })
            })
            .collect()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, field: &FieldDesc, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        let ay = self.apply(field, y);
        dot(field, x, &ay)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn neg(&self, field: &FieldDesc) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| field.neg(e)).collect(),
        }
    }

    pub fn add(&self, field: &FieldDesc, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn rank(&self, field: &FieldDesc) -> usize {
        rref(field, self.row_vectors()).0.len()
    }

    pub fn inverse(&self, field: &FieldDesc) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug: Vec<Vector> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
                r
            })
            .collect();
        let (red, pivots) = rref(field, aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_rows(
            &red.iter().map(|r| r[n..].to_vec()).collect::<Vec<_>>(),
        ))
    }

    /// Basis of `{x : A x = 0}`.
    pub fn nullspace(&self, field: &FieldDesc) -> Vec<Vector> {
        let (red, pivots) = rref(field, self.row_vectors());
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![field.zero(); self.cols];
                v[fc] = field.one();
                for (r, &pc) in red.iter().zip(&pivots) {
                    v[pc] = field.neg(r[fc]);
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A x = b`, if one exists.
    pub fn solve(&self, field: &FieldDesc, b: &[FieldElem]) -> Option<Vector> {
        let aug: Vec<Vector> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i]);
                r
            })
            .collect();
        let (red, pivots) = rref(field, aug);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![field.zero(); self.cols];
        for (r, &pc) in red.iter().zip(&pivots) {
            x[pc] = r[self.cols];
        }
        Some(x)
    }
}

pub fn dot(field: &FieldDesc, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
    x.iter().zip(y).fold(field.zero(), |acc, (&a, &b)| {
        field.add(acc, field.mul(a, b))
    })
}

/// Reduced row-echelon form of the span of `rows`; returns the nonzero rows
/// and their pivot columns.
pub fn rref(field: &FieldDesc, mut rows: Vec<Vector>) -> (Vec<Vector>, Vec<usize>) {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][c]).unwrap();
        for e in rows[r].iter_mut() {
            *e = field.mul(*e, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c];
            for (e, &pe) in row.iter_mut().zip(&pivot_row) {
                *e = field.sub(*e, field.mul(factor, pe));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Residue of `v` after elimination against RREF rows with the given pivots;
/// zero iff `v` lies in their span.
pub fn reduce(field: &FieldDesc, basis: &[Vector], pivots: &[usize], v: &[FieldElem]) -> Vector {
    let mut out = v.to_vec();
    for (row, &pc) in basis.iter().zip(pivots) {
        let factor = out[pc];
        if factor.is_zero() {
            continue;
        }
        for (e, &be) in out.iter_mut().zip(row) {
            *e = field.sub(*e, field.mul(factor, be));
        }
    }
    out
}

pub fn in_span(field: &FieldDesc, basis: &[Vector], pivots: &[usize], v: &[FieldElem]) -> bool {
    reduce(field, basis, pivots, v).iter().all(|e| e.is_zero())
}
