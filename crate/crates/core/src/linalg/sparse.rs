//! Sparse incremental Gauss–Jordan elimination.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::symexpr::Rational;

/// Sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow = Vec<(usize, Rational)>;

/// `a + f * b` for sparse rows.
fn axpy(a: &SparseRow, f: &Rational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, f * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + f * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn coeff(row: &SparseRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|k| &row[k].1)
}

/// Maintains the reduced row-echelon form of all rows added so far.
#[derive(Clone, Debug)]
pub struct SparseEliminator {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl SparseEliminator {
    pub fn new(cols: usize) -> Self {
        SparseEliminator {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.pivots.len() == self.cols
    }

    /// Reduce `row` against the current pivots.
    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let hits: Vec<(usize, Rational)> = row
            .iter()
            .filter(|(c, _)| self.pivots.contains_key(c))
            .cloned()
            .collect();
        for (c, v) in hits {
            // Pivot rows are fully reduced, so eliminating one pivot column
            // never reintroduces another.
            row = axpy(&row, &-v, &self.pivots[&c]);
        }
        row
    }

    /// Add a row; returns true if the rank increased.
    pub fn add_row(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(row.iter().all(|(c, v)| *c < self.cols && !v.is_zero()));
        if self.is_full_rank() {
            return false;
        }
        let mut row = self.reduce(row);
        let Some((p, lead)) = row.first().cloned() else {
            return false;
        };
        if !lead.is_one() {
            let inv = lead.recip();
            for (_, v) in row.iter_mut() {
                *v *= &inv;
            }
        }
        for other in self.pivots.values_mut() {
            if let Some(f) = coeff(other, p).cloned() {
                *other = axpy(other, &-f, &row);
            }
        }
        self.pivots.insert(p, row);
        true
    }

    /// Pivot rows in increasing pivot order.
    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseRow)> {
        self.pivots.iter()
    }

    /// Nullspace basis: one vector per free column, in increasing order.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|c| !self.pivots.contains_key(c)) {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (p, row) in &self.pivots {
                if let Some(x) = coeff(row, f) {
                    v[*p] = -x.clone();
                }
            }
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMatrix;
    use crate::symexpr::int;

    fn row(v: &[i64]) -> SparseRow {
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x != 0)
            .map(|(i, x)| (i, int(*x)))
            .collect()
    }

    #[test]
    fn agrees_with_dense() {
        let rows: [&[i64]; 4] = [&[0, 2, 4, 0, 1], &[1, 1, 0, 0, 0], &[1, 3, 4, 0, 1], &[0, 0, 0, 3, 3]];
        let mut e = SparseEliminator::new(5);
        for r in rows {
            e.add_row(row(r));
        }
        let dense = QMatrix::from_i64(&rows);
        assert_eq!(e.rank(), dense.rank());
        assert_eq!(e.nullspace(), dense.nullspace());
    }
}
