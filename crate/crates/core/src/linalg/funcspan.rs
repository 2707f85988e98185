//! Rational linear relations among vectors of functions.
//!
//! A vector of functions `v = (v^0, …, v^{m-1})` is compared componentwise.
//! For each component all entries are brought to a common denominator; the
//! numerators are then polynomials in independent kernels (trigonometric
//! kernels in reduced form), so linear relations over ℚ are exactly linear
//! relations among their coefficient vectors.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::QMatrix;
use crate::symexpr::{Monomial, Poly, RatExpr, Rational};

/// Matrix whose column `k` holds the kernel-monomial coefficients of
/// `columns[k]`; `columns[k]` is a combination `Σ c_j columns[j]` over ℚ
/// exactly when the same relation holds between matrix columns.
pub fn coefficient_matrix(columns: &[Vec<RatExpr>]) -> QMatrix {
    let ncols = columns.len();
    let ncomp = columns.first().map_or(0, Vec::len);
    assert!(columns.iter().all(|c| c.len() == ncomp), "ragged function vectors");
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for a in 0..ncomp {
        let mut den = Poly::one();
        for c in columns {
            let d = c[a].den();
            if !d.is_one() {
                den = den.lcm(d);
            }
        }
        let mut table: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
        for (k, c) in columns.iter().enumerate() {
            let e = &c[a];
            if e.is_zero() {
                continue;
            }
            let scale = den.div_exact(e.den()).expect("lcm is divisible by each denominator");
            let num = e.num().mul(&scale);
            for (m, q) in num.terms() {
                table
                    .entry(m.clone())
                    .or_insert_with(|| vec![Rational::zero(); ncols])[k] += q;
            }
        }
        rows.extend(table.into_values());
    }
    QMatrix::from_rows(&rows, ncols)
}

/// True if the function vectors are linearly independent over ℚ.
pub fn independent(vectors: &[Vec<RatExpr>]) -> bool {
    vectors.is_empty() || coefficient_matrix(vectors).rank() == vectors.len()
}

/// Rational coefficients `c` with `Σ c_k basis[k] = target`, if they exist.
pub fn express(basis: &[Vec<RatExpr>], target: &[RatExpr]) -> Option<Vec<Rational>> {
    if basis.is_empty() {
        return target.iter().all(RatExpr::is_zero).then(Vec::new);
    }
    let mut cols = basis.to_vec();
    cols.push(target.to_vec());
    let m = coefficient_matrix(&cols);
    let n = basis.len();
    let a = QMatrix::from_rows(&m.row_vecs().iter().map(|r| r[..n].to_vec()).collect::<Vec<_>>(), n);
    let b = m.col(n);
    a.solve(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{canonicalize, int, parse_expr};

    fn e(s: &str) -> RatExpr {
        canonicalize(&parse_expr(s).unwrap()).unwrap()
    }

    #[test]
    fn trig_dependence_is_detected() {
        let a = vec![e("sin(x)^2")];
        let b = vec![e("cos(x)^2")];
        let one = vec![e("1")];
        assert!(!independent(&[a.clone(), b.clone(), one.clone()]));
        assert_eq!(express(&[a, one], &b).unwrap(), vec![int(-1), int(1)]);
    }

    #[test]
    fn rational_functions() {
        let a = vec![e("1/r"), e("0")];
        let b = vec![e("1/r^2"), e("x")];
        assert!(independent(&[a.clone(), b.clone()]));
        let t = vec![e("(2*r + 3)/r^2"), e("3*x")];
        assert_eq!(express(&[a, b.clone()], &t).unwrap(), vec![int(2), int(3)]);
        assert!(express(&[b], &[e("1/r"), e("0")]).is_none());
    }
}
