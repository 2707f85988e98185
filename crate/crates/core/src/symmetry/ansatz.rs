use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::SymmetryError;
use crate::geometry::{CoordChart, Metric};
use crate::symexpr::{canonicalize, parse_expr, Atom, RatExpr, Symbol};

/// Which trigonometric kernel families multiply the polynomial part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzKernels {
    /// Angles with `{1, sin, cos, cot, csc}`.
    pub polar: Vec<Symbol>,
    /// Angles with `{1, sin, cos}`.
    pub azimuth: Vec<Symbol>,
}

/// Finite search space: each unknown coefficient function is a rational
/// combination of `basis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ansatz {
    pub degree: u32,
    pub poly_vars: Vec<Symbol>,
    pub kernels: AnsatzKernels,
    pub basis: Vec<RatExpr>,
}

fn parse(s: &str) -> RatExpr {
    canonicalize(&parse_expr(s).expect("built-in kernel parses")).expect("built-in kernel is defined")
}

fn polar_kernels(a: &Symbol) -> Vec<RatExpr> {
    ["1", "sin(#)", "cos(#)", "cot(#)", "csc(#)"]
        .iter()
        .map(|k| parse(&k.replace('#', a.name())))
        .collect()
}

fn azimuth_kernels(a: &Symbol) -> Vec<RatExpr> {
    ["1", "sin(#)", "cos(#)"]
        .iter()
        .map(|k| parse(&k.replace('#', a.name())))
        .collect()
}

/// Monomials of total degree `<= deg` in `vars`, by degree then lexicographically.
fn monomials(vars: &[Symbol], deg: u32) -> Vec<RatExpr> {
    fn rec(vars: &[Symbol], left: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
        if cur.len() == vars.len() {
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(vars, left - e, out, cur);
            cur.pop();
        }
    }
    let mut exps = Vec::new();
    rec(vars, deg, &mut exps, &mut Vec::new());
    exps.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    exps.iter()
        .map(|e| {
            vars.iter().zip(e).fold(RatExpr::one(), |acc, (v, k)| {
                &acc * &RatExpr::atom(Atom::Sym(v.clone())).powi(*k as i64).expect("nonnegative power")
            })
        })
        .collect()
}

impl Ansatz {
    /// `{monomials of degree <= deg in poly_vars} × polar kernels × azimuth kernels`.
    pub fn new(degree: u32, poly_vars: Vec<Symbol>, kernels: AnsatzKernels) -> Self {
        let mut basis = monomials(&poly_vars, degree);
        for a in &kernels.polar {
            basis = product(&basis, &polar_kernels(a));
        }
        for a in &kernels.azimuth {
            basis = product(&basis, &azimuth_kernels(a));
        }
        Ansatz {
            degree,
            poly_vars,
            kernels,
            basis,
        }
    }

    /// Default ansatz for a metric: polynomial in the parameter and the
    /// non-angle coordinates; angles occurring in the metric get the polar
    /// kernels, the remaining angles the azimuthal ones.
    pub fn for_metric(g: &Metric, degree: u32) -> Self {
        let ch = g.chart();
        let used = g.used_coords();
        let mut poly_vars = vec![ch.param().clone()];
        poly_vars.extend(ch.coords().iter().filter(|c| !ch.is_angle(c)).cloned());
        let (polar, azimuth) = ch.angles().iter().cloned().partition(|a| used.contains(a));
        Ansatz::new(degree, poly_vars, AnsatzKernels { polar, azimuth })
    }

    /// Purely polynomial ansatz in the parameter and all coordinates.
    pub fn polynomial(chart: &CoordChart, degree: u32) -> Self {
        Ansatz::new(
            degree,
            chart.base_symbols(),
            AnsatzKernels {
                polar: vec![],
                azimuth: vec![],
            },
        )
    }

    /// Custom basis.
    pub fn from_basis(basis: Vec<RatExpr>) -> Self {
        Ansatz {
            degree: 0,
            poly_vars: vec![],
            kernels: AnsatzKernels {
                polar: vec![],
                azimuth: vec![],
            },
            basis,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Non-empty with pairwise distinct elements.
    pub fn validate(&self) -> Result<(), SymmetryError> {
        if self.basis.is_empty() {
            return Err(SymmetryError::EmptyAnsatz);
        }
        for i in 0..self.basis.len() {
            for j in 0..i {
                if self.basis[i] == self.basis[j] {
                    return Err(SymmetryError::AnsatzDuplicate(j, i));
                }
            }
        }
        Ok(())
    }

    /// Derivatives must stay within the kernels of the basis.
    pub fn check_closed(&self, derivatives: &[RatExpr], chart: &CoordChart) -> Result<(), SymmetryError> {
        let mut allowed: BTreeSet<Atom> = self.basis.iter().flat_map(|b| b.atoms()).collect();
        allowed.extend(chart.base_symbols().into_iter().map(Atom::Sym));
        // cos and sin kernels are interchangeable through the identity.
        let partners: Vec<Atom> = allowed
            .iter()
            .filter_map(|a| match a {
                Atom::Sin(u) => Some(Atom::Cos(u.clone())),
                Atom::Cos(u) => Some(Atom::Sin(u.clone())),
                _ => None,
            })
            .collect();
        allowed.extend(partners);
        for d in derivatives {
            if let Some(a) = d.atoms().into_iter().find(|a| !allowed.contains(a)) {
                return Err(SymmetryError::AnsatzNotClosed(format!(
                    "derivative {d} introduces the kernel {}",
                    RatExpr::atom(a)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut kernels = vec!["1".to_string()];
        for a in &self.kernels.polar {
            for k in ["sin", "cos", "cot", "csc"] {
                kernels.push(format!("{k}({a})"));
            }
        }
        for a in &self.kernels.azimuth {
            for k in ["sin", "cos"] {
                kernels.push(format!("{k}({a})"));
            }
        }
        json!({
            "degree": self.degree,
            "variables": self.poly_vars.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "kernels": kernels,
            "size": self.basis.len(),
        })
    }
}

fn product(a: &[RatExpr], b: &[RatExpr]) -> Vec<RatExpr> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for y in b {
        for x in a {
            out.push(x * y);
        }
    }
    out
}
