//! Exact symbolic expression kernel.
//!
//! Two representations live here:
//!
//! * [`Expr`], a plain tree used for parsing, printing and reports;
//! * [`RatExpr`], the canonical rational-function form over a set of
//!   kernels (symbols, jet variables, opaque function atoms and elementary
//!   function kernels). Every "is this zero" decision is made on `RatExpr`.
//!
//! The free functions in this module are the tree-level API: they accept and
//! return `Expr`, canonicalizing on the way.

mod eval;
mod expr;
mod ops;
mod parse;
mod poly;
mod print;
mod ratexpr;
mod sampler;

use std::collections::BTreeMap;

use thiserror::Error;

pub use eval::{eval_f64, CompiledExprs, EvalError, NumericEnv, SINGULARITY_GUARD};
pub use expr::{int, rat, ElemFn, Expr, FuncApp, JetVar, Rational, Symbol};
pub use ops::{apply_elem, canonicalize, collect_rat, monomial_of, Bindings, Collected};
pub use parse::{parse_expr, ParseError, ParseErrorKind, Parser};
pub use poly::{Atom, Monomial, Poly};
pub use print::{to_latex, LatexStyle};
pub use ratexpr::RatExpr;
pub use sampler::{sample_is_zero, sampler_enabled, Sampler, SAMPLER_ENV};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expression is not polynomial in the collected variable {0}")]
    NonPolynomial(String),
    #[error("randomized zero test disagrees with the canonical form for {0}")]
    SamplerDisagreement(String),
}

pub(crate) fn ratexpr_atom_name(a: &Atom) -> String {
    ratexpr::atom_to_expr(a).to_string()
}

/// Canonical form of a tree. Panics only on expressions that are not
/// well-defined (division by a canonically zero expression); use
/// [`try_canonical`] to handle those.
pub fn to_canonical(e: &Expr) -> Expr {
    try_canonical(e).expect("expression is well-defined").to_expr()
}

pub fn try_canonical(e: &Expr) -> Result<RatExpr, KernelError> {
    canonicalize(e)
}

/// Partial derivative in the symbol `v`.
pub fn differentiate(e: &Expr, v: &str) -> Result<Expr, KernelError> {
    Ok(canonicalize(e)?.diff_sym(v).to_expr())
}

/// Simultaneous substitution followed by canonicalization.
pub fn substitute(e: &Expr, b: &Bindings) -> Result<Expr, KernelError> {
    Ok(canonicalize(e)?.substitute(b)?.to_expr())
}

/// Decide whether `e` is identically zero.
///
/// With `LIESYM_DEBUG_SAMPLER=1` the decision is cross-checked against the
/// randomized evaluator and a disagreement panics.
pub fn is_zero(e: &Expr) -> bool {
    if sampler_enabled() {
        return is_zero_checked(e).expect("zero tests agree");
    }
    canonicalize(e).map(|r| r.is_zero()).unwrap_or(false)
}

/// Canonical zero test, confirmed by exact evaluation at random points.
pub fn is_zero_checked(e: &Expr) -> Result<bool, KernelError> {
    let canonical = canonicalize(e)?.is_zero();
    match sample_is_zero(e, 8, 0x5eed) {
        Some(sampled) if sampled != canonical => Err(KernelError::SamplerDisagreement(e.to_string())),
        _ => Ok(canonical),
    }
}

/// Coefficients of `e` as a polynomial in the given symbols or jets.
pub fn collect(e: &Expr, vars: &[Expr]) -> Result<BTreeMap<Vec<u32>, Expr>, KernelError> {
    let atoms = vars
        .iter()
        .map(|v| match v {
            Expr::Sym(s) => Ok(Atom::Sym(s.clone())),
            Expr::Jet(j) => Ok(Atom::Jet(j.clone())),
            Expr::Func(f) => Ok(Atom::Func(f.clone())),
            other => Err(KernelError::Domain(format!("cannot collect over {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let c = collect_rat(&canonicalize(e)?, &atoms)?;
    Ok(c.into_iter().map(|(k, v)| (k, v.to_expr())).collect())
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}
