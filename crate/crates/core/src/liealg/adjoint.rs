//! Closed-form adjoint exponentials `Ad(exp(q X_i)) = exp(−q ad X_i)`.
//!
//! The minimal polynomial of `A = −ad X_i` is factored into rational linear
//! factors and `x² + c` factors (`c > 0`); anything else is rejected. The
//! Jordan–Chevalley split `A = S + N` comes from Newton's iteration on the
//! squarefree part, the spectral idempotents of `S` from the Chinese
//! remainder theorem, and
//!
//! ```text
//! exp(qA) = Σ_j exp_j(qS) E_j · Σ_{k<n} q^k N^k / k!
//! ```
//!
//! with `exp_j = e^{λq}` on a linear factor and `cos(ωq) + sin(ωq) S/ω`
//! (`ω = √c`) on a quadratic one.
//!
//! Matrices are stored in the row convention: row `j` holds the
//! coefficients of `Ad X_j`, so a coefficient row vector maps as `a ↦ a·M`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{LieAlgebra, LieError};
use crate::linalg::{QMatrix, UPoly};
use crate::symexpr::{Atom, Bindings, CompiledExprs, KernelError, RatExpr, Rational, Symbol};

/// `Ad(exp(q X_i))` as a matrix of expressions in `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMap {
    pub generator: usize,
    pub param: Symbol,
    pub matrix: Vec<Vec<RatExpr>>,
}

impl AdjointMap {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// `a ↦ a·M` for a row of expressions.
    pub fn apply(&self, a: &[RatExpr]) -> Vec<RatExpr> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut acc = RatExpr::zero();
                for (j, aj) in a.iter().enumerate() {
                    if !aj.is_zero() && !self.matrix[j][k].is_zero() {
                        acc = &acc + &(aj * &self.matrix[j][k]);
                    }
                }
                acc
            })
            .collect()
    }

    /// The matrix with `q` replaced by `value`.
    pub fn at(&self, value: &RatExpr) -> Result<Vec<Vec<RatExpr>>, KernelError> {
        let b = Bindings::new().with(Atom::Sym(self.param.clone()), value.clone());
        self.matrix
            .iter()
            .map(|row| row.iter().map(|e| e.substitute(&b)).collect())
            .collect()
    }

    /// Numeric matrix at `q`.
    pub fn eval_f64(&self, q: f64) -> Vec<Vec<f64>> {
        let flat: Vec<RatExpr> = self.matrix.iter().flatten().cloned().collect();
        let c = CompiledExprs::new(&[Atom::Sym(self.param.clone())], &flat).expect("entries depend on q only");
        let v = c.eval(&[q]).expect("entries are entire functions of q");
        v.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }
}

/// Product of expression matrices.
pub fn expr_matmul(a: &[Vec<RatExpr>], b: &[Vec<RatExpr>]) -> Vec<Vec<RatExpr>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = RatExpr::zero();
                    for (k, bk) in b.iter().enumerate() {
                        if !a[i][k].is_zero() && !bk[j].is_zero() {
                            acc = &acc + &(&a[i][k] * &bk[j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Monic minimal polynomial of a square matrix (Krylov on matrix powers).
pub fn minimal_polynomial(a: &QMatrix) -> UPoly {
    let n = a.rows();
    let flat = |m: &QMatrix| -> Vec<Rational> { m.row_vecs().into_iter().flatten().collect() };
    let mut powers = vec![QMatrix::identity(n)];
    loop {
        let next = &powers[powers.len() - 1] * a;
        let cols: Vec<Vec<Rational>> = powers.iter().map(flat).collect();
        let basis = QMatrix::from_rows(&cols, n * n).transpose();
        if let Some(c) = basis.solve(&flat(&next)) {
            let mut coeffs: Vec<Rational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(Rational::one());
            return UPoly::new(coeffs);
        }
        powers.push(next);
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Factor {
    /// `x − λ`.
    Linear(Rational),
    /// `x² + c`, `c > 0`.
    Quadratic(Rational),
}

impl Factor {
    fn poly(&self) -> UPoly {
        match self {
            Factor::Linear(l) => UPoly::linear(l.clone()),
            Factor::Quadratic(c) => UPoly::quadratic(c.clone()),
        }
    }
}

fn divide_out(p: &mut UPoly, f: &UPoly) -> u32 {
    let mut k = 0;
    loop {
        let (q, r) = p.div_rem(f);
        if !r.is_zero() {
            return k;
        }
        *p = q;
        k += 1;
    }
}

/// Factor into supported factors with multiplicities, or `None`.
fn factor(p: &UPoly) -> Option<Vec<(Factor, u32)>> {
    let mut rest = p.monic();
    let mut out = Vec::new();
    for r in rest.rational_roots() {
        let k = divide_out(&mut rest, &UPoly::linear(r.clone()));
        out.push((Factor::Linear(r), k));
    }
    if rest.degree() == Some(0) {
        return Some(out);
    }
    // What is left must be a product of x² + c: an even polynomial whose
    // square-root substitution has negative rational roots.
    let c = rest.coeffs();
    if c.iter().skip(1).step_by(2).any(|x| !x.is_zero()) {
        return None;
    }
    let half = UPoly::new(c.iter().step_by(2).cloned().collect());
    for y in half.rational_roots() {
        if !y.is_negative() {
            return None;
        }
        let f = UPoly::quadratic(-y.clone());
        let k = divide_out(&mut rest, &f);
        out.push((Factor::Quadratic(-y), k));
    }
    (rest.degree() == Some(0)).then_some(out)
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| Rational::new(n, d))
}

fn factorial(k: u32) -> Rational {
    Rational::from_integer((1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

/// Closed form of `Ad(exp(q X_i)) = exp(−q ad X_i)`, row convention.
pub fn adjoint_exp(g: &LieAlgebra, i: usize, q: &str) -> Result<AdjointMap, LieError> {
    if i >= g.dim() {
        return Err(LieError::Index(i));
    }
    let n = g.dim();
    let a = g.ad_basis(i).scale(&-Rational::one());
    let p = minimal_polynomial(&a);
    let factors = factor(&p).ok_or_else(|| LieError::UnsupportedMinimalPolynomial {
        generator: g.names()[i].clone(),
        poly: format!("{p:?}"),
    })?;

    // Jordan–Chevalley: S is a root of the squarefree part.
    let sqfree = factors.iter().fold(UPoly::one(), |acc, (f, _)| acc.mul(&f.poly()));
    let dsq = sqfree.derivative();
    let mut s = a.clone();
    loop {
        let v = sqfree.eval_matrix(&s);
        if v.is_zero() {
            break;
        }
        let inv = dsq
            .eval_matrix(&s)
            .inverse()
            .expect("derivative of a squarefree polynomial is invertible at a semisimple approximant");
        s = s.sub(&(&v * &inv));
    }
    let nil = a.sub(&s);

    let qv = RatExpr::sym(q);
    let mut semisimple: Vec<(RatExpr, QMatrix)> = Vec::new();
    for (j, (f, _)) in factors.iter().enumerate() {
        let others = factors
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .fold(UPoly::one(), |acc, (_, (g, _))| acc.mul(&g.poly()));
        let (_, _, t) = f.poly().ext_gcd(&others);
        let e = t.mul(&others).rem(&sqfree).eval_matrix(&s);
        match f {
            Factor::Linear(l) => semisimple.push((RatExpr::exp(&qv.scale(l)), e)),
            Factor::Quadratic(c) => {
                let omega = match rational_sqrt(c) {
                    Some(w) => RatExpr::constant(w),
                    None => RatExpr::constant(c.clone())
                        .pow_rational(&Rational::new(1.into(), 2.into()))
                        .expect("square root of a positive rational"),
                };
                let arg = &omega * &qv;
                semisimple.push((RatExpr::cos(&arg), e.clone()));
                let inv_w = omega.inv().expect("omega is nonzero");
                semisimple.push((&RatExpr::sin(&arg) * &inv_w, &s * &e));
            }
        }
    }
    let mut nilpotent: Vec<(RatExpr, QMatrix)> = Vec::new();
    let mut nk = QMatrix::identity(n);
    let mut k = 0u32;
    while !nk.is_zero() {
        let coeff = qv.powi(k as i64).expect("nonnegative power").scale(&factorial(k).recip());
        nilpotent.push((coeff, nk.clone()));
        nk = &nk * &nil;
        k += 1;
    }

    let mut col = vec![vec![RatExpr::zero(); n]; n];
    for (fa, ma) in &semisimple {
        for (fb, mb) in &nilpotent {
            let f = fa * fb;
            let m = ma * mb;
            for r in 0..n {
                for c in 0..n {
                    if !m[(r, c)].is_zero() {
                        col[r][c] = &col[r][c] + &f.scale(&m[(r, c)]);
                    }
                }
            }
        }
    }
    // Transpose into the row convention.
    let matrix = (0..n).map(|r| (0..n).map(|c| col[c][r].clone()).collect()).collect();
    Ok(AdjointMap {
        generator: i,
        param: Symbol::new(q),
        matrix,
    })
}

/// Partial sum `Σ_{k ≤ order} (−q)^k ad^k / k!` of the Lie series, row convention.
pub fn lie_series(g: &LieAlgebra, i: usize, q: &str, order: u32) -> Vec<Vec<RatExpr>> {
    let n = g.dim();
    let a = g.ad_basis(i).scale(&-Rational::one());
    let qv = RatExpr::sym(q);
    let mut out = vec![vec![RatExpr::zero(); n]; n];
    let mut ak = QMatrix::identity(n);
    for k in 0..=order {
        let coeff = qv.powi(k as i64).expect("nonnegative power").scale(&factorial(k).recip());
        for r in 0..n {
            for c in 0..n {
                if !ak[(c, r)].is_zero() {
                    out[r][c] = &out[r][c] + &coeff.scale(&ak[(c, r)]);
                }
            }
        }
        ak = &ak * &a;
    }
    out
}

/// Degree-`order` Taylor polynomial of `e` in `q` about `q = 0`.
pub fn taylor(e: &RatExpr, q: &str, order: u32) -> Result<RatExpr, KernelError> {
    let qa = Atom::sym(q);
    let at_zero = Bindings::new().with(qa.clone(), RatExpr::zero());
    let qv = RatExpr::atom(qa.clone());
    let mut d = e.clone();
    let mut acc = RatExpr::zero();
    for k in 0..=order {
        let c = d.substitute(&at_zero)?;
        if !c.is_zero() {
            acc = &acc + &(&c * &qv.powi(k as i64)?).scale(&factorial(k).recip());
        }
        d = d.diff(&qa);
    }
    Ok(acc)
}
