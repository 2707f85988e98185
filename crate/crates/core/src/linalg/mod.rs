//! Exact linear algebra over ℚ.

pub mod funcspan;
mod sparse;
mod upoly;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};

use crate::symexpr::Rational;

pub use sparse::{SparseEliminator, SparseRow};
pub use upoly::UPoly;

/// Dense rational matrix, row-major.
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
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Build from row vectors; all rows must have length `cols`.
    pub fn from_rows(rows: &[Vec<Rational>], cols: usize) -> Self {
        let mut m = QMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row");
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|v| Rational::from_integer((*v).into())).collect())
            .collect();
        QMatrix::from_rows(&rows, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, q: &Rational) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * q).collect(),
        }
    }

    pub fn add(&self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &QMatrix) -> QMatrix {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| x * &self[(i, j)])
                    .sum()
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> QMatrix {
        let mut acc = QMatrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = &m[(r, j)] * &f;
                    if !v.is_zero() {
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace `{x : A x = 0}`, one vector per free
    /// column in increasing column order.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for f in 0..self.cols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[(i, f)].clone();
            }
            out.push(v);
        }
        out
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Solve `A x = b`; `None` if inconsistent. Free variables are set to 0.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|q| q.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Subspace of ℚ^n stored as a reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Subspace { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Subspace::span(dim, &QMatrix::identity(dim).row_vecs())
    }

    pub fn span(dim: usize, vectors: &[Vec<Rational>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(dim);
        }
        let (r, pivots) = QMatrix::from_rows(vectors, dim).rref();
        Subspace {
            dim,
            basis: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect(),
        }
    }

    /// Span of the given basis indices (coordinate subspace).
    pub fn coordinate(dim: usize, indices: &[usize]) -> Self {
        let vs: Vec<Vec<Rational>> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![Rational::zero(); dim];
                v[i] = Rational::one();
                v
            })
            .collect();
        Subspace::span(dim, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Coefficients of `v` in the stored basis.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if self.basis.is_empty() {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        QMatrix::from_rows(&self.basis, self.dim).transpose().solve(v)
    }

    pub fn contains_space(&self, o: &Subspace) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(o.basis.iter().cloned());
        Subspace::span(self.dim, &vs)
    }

    pub fn intersection(&self, o: &Subspace) -> Subspace {
        if self.is_zero() || o.is_zero() {
            return Subspace::zero(self.dim);
        }
        // Solve Σ a_i u_i − Σ b_j w_j = 0.
        let k = self.basis.len();
        let mut cols = self.basis.clone();
        cols.extend(o.basis.iter().map(|w| w.iter().map(|x| -x.clone()).collect()));
        let m = QMatrix::from_rows(&cols, self.dim).transpose();
        let vs: Vec<Vec<Rational>> = m
            .nullspace()
            .into_iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); self.dim];
                for (a, u) in c[..k].iter().zip(&self.basis) {
                    for (x, y) in v.iter_mut().zip(u) {
                        *x += a * y;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.dim, &vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{int, rat};

    #[test]
    fn rref_and_nullspace() {
        let m = QMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Zero::is_zero));
        assert_eq!(ns[0], vec![int(-1), int(-1), int(1)]);
    }

    #[test]
    fn inverse_and_det() {
        let m = QMatrix::from_i64(&[&[2, 1], &[5, 3]]);
        assert_eq!(m.det(), int(1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(2));
        assert!(QMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert_eq!(QMatrix::from_i64(&[&[0, 1], &[1, 0]]).det(), int(-1));
    }

    #[test]
    fn solve_consistency() {
        let m = QMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        assert_eq!(m.solve(&[int(3), int(1)]).unwrap(), vec![int(2), int(1)]);
        let s = QMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[int(1), int(3)]).is_none());
    }

    #[test]
    fn subspace_operations() {
        let a = Subspace::coordinate(3, &[0, 1]);
        let b = Subspace::span(3, &[vec![int(0), int(1), int(1)], vec![int(0), int(0), int(1)]]);
        assert_eq!(a.intersection(&b), Subspace::coordinate(3, &[1]));
        assert_eq!(a.sum(&b).dim(), 3);
        assert!(a.contains(&[rat(1, 2), int(7), int(0)]));
        assert!(!a.contains(&[int(0), int(0), int(1)]));
    }
}
