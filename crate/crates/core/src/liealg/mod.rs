//! Finite-dimensional Lie algebras over ℚ given by structure constants.
//!
//! An algebra is built either from vector fields ([`structure_constants`],
//! brackets expanded exactly in the basis) or directly from constants.
//! Analysis covers the derived series, the Killing form, the radical (by
//! Cartan's criterion), Levi splits, and adjoint matrices and their
//! exponentials ([`adjoint_exp`]).
//!
//! Subspaces of the algebra are [`Subspace`]s of coefficient vectors with
//! respect to the ordered basis.

mod adjoint;
mod table;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::jets::{BundleVectorField, JetError};
use crate::linalg::{funcspan, QMatrix, Subspace};
use crate::symexpr::Rational;

pub use adjoint::{adjoint_exp, expr_matmul, lie_series, minimal_polynomial, taylor, AdjointMap};
pub use table::{combination_text, commutator_table_latex, commutator_table_text, structure_json};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("basis vector fields are linearly dependent")]
    DependentBasis,
    #[error("[{i}, {j}] = {bracket} is not in the span of the basis")]
    NonClosure { i: String, j: String, bracket: String },
    #[error("structure constants are inconsistent: {0}")]
    Inconsistent(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator index {0} out of range")]
    Index(usize),
    #[error("unsupported minimal polynomial {poly} of ad {generator}: roots must be rational or ±i√c with rational c > 0")]
    UnsupportedMinimalPolynomial { generator: String, poly: String },
    #[error("radical verification failed: {0}")]
    RadicalCheck(String),
    #[error(transparent)]
    Field(#[from] JetError),
}

/// Lie algebra with ordered basis `X_1..X_m` and `[X_i, X_j] = c_{ij}^k X_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    names: Vec<String>,
    fields: Vec<BundleVectorField>,
    c: Vec<Vec<Vec<Rational>>>,
}

/// Structure constants of the span of `basis`.
pub fn structure_constants(basis: &[BundleVectorField]) -> Result<LieAlgebra, LieError> {
    let comps: Vec<Vec<_>> = basis.iter().map(BundleVectorField::components).collect();
    if !funcspan::independent(&comps) {
        return Err(LieError::DependentBasis);
    }
    let m = basis.len();
    let names = default_names(basis);
    let mut c = vec![vec![vec![Rational::zero(); m]; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let b = basis[i].bracket(&basis[j])?;
            let coeffs = if b.is_zero() {
                vec![Rational::zero(); m]
            } else {
                funcspan::express(&comps, &b.components()).ok_or_else(|| LieError::NonClosure {
                    i: names[i].clone(),
                    j: names[j].clone(),
                    bracket: field_text(&b),
                })?
            };
            for k in 0..m {
                c[j][i][k] = -coeffs[k].clone();
                c[i][j][k] = coeffs[k].clone();
            }
        }
    }
    Ok(LieAlgebra {
        names,
        fields: basis.to_vec(),
        c,
    })
}

fn default_names(basis: &[BundleVectorField]) -> Vec<String> {
    let given: Vec<&str> = basis.iter().map(|f| f.name.as_str()).collect();
    let unique = given.iter().enumerate().all(|(i, n)| !n.is_empty() && !given[..i].contains(n));
    if unique {
        given.iter().map(|s| s.to_string()).collect()
    } else {
        (1..=basis.len()).map(|i| format!("X{i}")).collect()
    }
}

fn field_text(f: &BundleVectorField) -> String {
    let ch = f.chart();
    let mut parts = Vec::new();
    if !f.xi.is_zero() {
        parts.push(format!("({})*d_{}", f.xi, ch.param()));
    }
    for (e, c) in f.eta.iter().zip(ch.coords()) {
        if !e.is_zero() {
            parts.push(format!("({e})*d_{c}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn unit(m: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); m];
    v[i] = Rational::one();
    v
}

impl LieAlgebra {
    /// Abstract algebra from `c[i][j][k]`; antisymmetry and Jacobi are checked.
    pub fn from_constants(names: Vec<String>, c: Vec<Vec<Vec<Rational>>>) -> Result<Self, LieError> {
        let m = names.len();
        if c.len() != m || c.iter().any(|r| r.len() != m || r.iter().any(|v| v.len() != m)) {
            return Err(LieError::DimensionMismatch {
                expected: m,
                got: c.len(),
            });
        }
        let g = LieAlgebra {
            names,
            fields: Vec::new(),
            c,
        };
        g.check_axioms()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Realizing vector fields (empty for abstract algebras).
    pub fn fields(&self) -> &[BundleVectorField] {
        &self.fields
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.dim());
        self.names = names;
        self
    }

    /// `c_{ij}^k`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    /// Coefficients of `[X_i, X_j]`.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &[Rational] {
        &self.c[i][j]
    }

    pub fn constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.c
    }

    /// Antisymmetry and the Jacobi identity, exactly.
    pub fn check_axioms(&self) -> Result<(), LieError> {
        let m = self.dim();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        return Err(LieError::Inconsistent(format!("antisymmetry fails at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let ei = unit(m, i);
                    let ej = unit(m, j);
                    let ek = unit(m, k);
                    let a = self.bracket(&self.bracket(&ei, &ej), &ek);
                    let b = self.bracket(&self.bracket(&ej, &ek), &ei);
                    let c = self.bracket(&self.bracket(&ek, &ei), &ej);
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(LieError::Inconsistent(format!("Jacobi identity fails at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `[u, v]` for coefficient vectors.
    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let m = self.dim();
        let mut out = vec![Rational::zero(); m];
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let f = ui * vj;
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    if !c.is_zero() {
                        *o += &f * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad v` acting on column coefficient vectors:
    /// `[v, X_j] = Σ_k A[k][j] X_k`.
    pub fn ad_matrix(&self, v: &[Rational]) -> QMatrix {
        let m = self.dim();
        let mut a = QMatrix::zeros(m, m);
        for j in 0..m {
            let col = self.bracket(v, &unit(m, j));
            for (k, x) in col.into_iter().enumerate() {
                a[(k, j)] = x;
            }
        }
        a
    }

    pub fn ad_basis(&self, i: usize) -> QMatrix {
        self.ad_matrix(&unit(self.dim(), i))
    }

    /// Span of all `[u, v]`, `u ∈ a`, `v ∈ b`.
    pub fn bracket_space(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for u in a.basis() {
            for v in b.basis() {
                let w = self.bracket(u, v);
                if w.iter().any(|x| !x.is_zero()) {
                    vs.push(w);
                }
            }
        }
        Subspace::span(self.dim(), &vs)
    }

    pub fn full(&self) -> Subspace {
        Subspace::full(self.dim())
    }

    /// Coordinate subspace spanned by the given basis elements.
    pub fn span_of(&self, indices: &[usize]) -> Subspace {
        Subspace::coordinate(self.dim(), indices)
    }

    /// `𝔤 ⊇ 𝔤^{(1)} ⊇ …`, ending at the first repeated term (or zero).
    pub fn derived_series(&self) -> Vec<Subspace> {
        derived_chain(self, self.full())
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(Subspace::is_zero)
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> bool {
        s.contains_space(&self.bracket_space(s, s))
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        s.contains_space(&self.bracket_space(&self.full(), s))
    }

    /// True if the subalgebra `s` is solvable.
    pub fn is_solvable_subspace(&self, s: &Subspace) -> bool {
        derived_chain(self, s.clone()).last().is_some_and(Subspace::is_zero)
    }

    /// `K_{ij} = tr(ad X_i ad X_j)`.
    pub fn killing_form(&self) -> QMatrix {
        let m = self.dim();
        let ads: Vec<QMatrix> = (0..m).map(|i| self.ad_basis(i)).collect();
        let mut k = QMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let t = (&ads[i] * &ads[j]).trace();
                k[(i, j)] = t.clone();
                k[(j, i)] = t;
            }
        }
        k
    }

    pub fn is_semisimple(&self) -> bool {
        self.dim() > 0 && !self.killing_form().det().is_zero()
    }

    /// Radical as the Killing-orthogonal complement of `[𝔤, 𝔤]`, checked to
    /// be a solvable ideal.
    pub fn radical(&self) -> Result<Subspace, LieError> {
        let m = self.dim();
        let k = self.killing_form();
        let d = self.bracket_space(&self.full(), &self.full());
        let rows: Vec<Vec<Rational>> = d.basis().iter().map(|w| k.mul_vec(w)).collect();
        let r = if rows.is_empty() {
            self.full()
        } else {
            Subspace::span(m, &QMatrix::from_rows(&rows, m).nullspace())
        };
        if !self.is_ideal(&r) {
            return Err(LieError::RadicalCheck("Killing complement of the derived algebra is not an ideal".into()));
        }
        if !self.is_solvable_subspace(&r) {
            return Err(LieError::RadicalCheck("Killing complement of the derived algebra is not solvable".into()));
        }
        Ok(r)
    }

    /// Structure constants with respect to an independent, closed set of
    /// coefficient vectors.
    pub fn subalgebra(&self, basis: &[Vec<Rational>], names: Vec<String>) -> Result<LieAlgebra, LieError> {
        let m = self.dim();
        let d = basis.len();
        if names.len() != d {
            return Err(LieError::DimensionMismatch {
                expected: d,
                got: names.len(),
            });
        }
        if Subspace::span(m, basis).dim() != d {
            return Err(LieError::DependentBasis);
        }
        let cols = QMatrix::from_rows(basis, m).transpose();
        let mut c = vec![vec![vec![Rational::zero(); d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                let b = self.bracket(&basis[i], &basis[j]);
                let x = cols.solve(&b).ok_or_else(|| LieError::NonClosure {
                    i: names[i].clone(),
                    j: names[j].clone(),
                    bracket: combination_text(&b, &self.names),
                })?;
                c[i][j] = x;
            }
        }
        let fields = if self.fields.is_empty() {
            Vec::new()
        } else {
            let chart = self.fields[0].chart().clone();
            basis
                .iter()
                .zip(&names)
                .map(|(v, n)| {
                    let terms: Vec<_> = v
                        .iter()
                        .zip(&self.fields)
                        .filter(|(q, _)| !q.is_zero())
                        .map(|(q, f)| (crate::symexpr::RatExpr::constant(q.clone()), f))
                        .collect();
                    BundleVectorField::combination(&chart, n, &terms)
                })
                .collect()
        };
        Ok(LieAlgebra { names, fields, c })
    }

    /// Levi split check: `r` a solvable ideal, `h` a subalgebra with
    /// nondegenerate Killing form, `r ∩ h = 0`.
    pub fn levi_check(&self, r: &Subspace, h: &Subspace) -> Result<bool, LieError> {
        if r.dim() + h.dim() != self.dim() {
            return Err(LieError::DimensionMismatch {
                expected: self.dim(),
                got: r.dim() + h.dim(),
            });
        }
        if !self.is_ideal(r) || !self.is_solvable_subspace(r) || !self.is_subalgebra(h) {
            return Ok(false);
        }
        if !r.intersection(h).is_zero() {
            return Ok(false);
        }
        if h.is_zero() {
            return Ok(true);
        }
        let names = (1..=h.dim()).map(|i| format!("H{i}")).collect();
        let sub = self.subalgebra(h.basis(), names)?;
        Ok(!sub.killing_form().det().is_zero())
    }

    /// Default complement for Levi checks: the largest set of basis
    /// elements outside the radical whose span is a subalgebra with
    /// nondegenerate Killing form.
    pub fn levi_heuristic(&self) -> Result<(Subspace, Subspace), LieError> {
        let r = self.radical()?;
        let m = self.dim();
        let outside: Vec<usize> = (0..m).filter(|&i| !r.contains(&unit(m, i))).collect();
        let need = m - r.dim();
        let h = choose(&outside, need)
            .into_iter()
            .map(|idx| self.span_of(&idx))
            .find(|h| self.levi_check(&r, h).unwrap_or(false))
            .unwrap_or_else(|| Subspace::zero(m));
        Ok((r, h))
    }

    /// Coefficients of `v` as a combination of basis names.
    pub fn describe(&self, v: &[Rational]) -> String {
        combination_text(v, &self.names)
    }

    /// Names of a subspace's basis vectors.
    pub fn describe_space(&self, s: &Subspace) -> Vec<String> {
        s.basis().iter().map(|v| self.describe(v)).collect()
    }
}

fn derived_chain(g: &LieAlgebra, start: Subspace) -> Vec<Subspace> {
    let mut chain = vec![start];
    loop {
        let cur = chain.last().unwrap();
        if cur.is_zero() {
            break;
        }
        let next = g.bracket_space(cur, cur);
        if &next == cur {
            break;
        }
        chain.push(next);
    }
    chain
}

fn choose(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (pos, &first) in items.iter().enumerate() {
        for mut rest in choose(&items[pos + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests;
