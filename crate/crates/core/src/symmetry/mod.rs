//! Noether and Lie point symmetries of geodesic equations.
//!
//! * [`noether_residual`] / [`verify_noether`] check
//!   `X^{[1]}L + (Dξ)L − DA = 0`;
//! * [`liepoint_residuals`] / [`verify_liepoint`] check
//!   `X^{[2]}E_i = 0` on the solution manifold `ẍ = G(x, ẋ)`;
//! * [`determining_system`] and [`solve_determining`] find all symmetries
//!   inside a finite ansatz.

mod ansatz;
mod determining;

use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{geodesic_lagrangian, geodesic_system, GeodesicSystem, GeometryError, Metric};
use crate::jets::{prolong, total_derivative, BundleVectorField, JetError};
use crate::symexpr::{KernelError, RatExpr};

pub use ansatz::{Ansatz, AnsatzKernels};
pub use determining::{
    determining_system, solve_determining, DeterminingEquation, DeterminingSystem, SymmetrySolution, Target,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("{0} is not a Noether symmetry; its first integral is undefined")]
    NotASymmetry(String),
    #[error("ansatz is empty")]
    EmptyAnsatz,
    #[error("ansatz is not derivative-closed: {0}")]
    AnsatzNotClosed(String),
    #[error("ansatz basis elements {0} and {1} coincide")]
    AnsatzDuplicate(usize, usize),
    #[error("ansatz basis is linearly dependent")]
    AnsatzDependent,
    #[error("residual has degree {0} in the velocities, above the bound 3")]
    DegreeBound(u32),
    #[error("determining equation is not linear homogeneous in the unknown functions: {0}")]
    NotLinear(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Noether,
    LiePoint,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Noether => "noether",
            Mode::LiePoint => "liepoint",
        }
    }
}

/// `X^{[1]}L + (D_s ξ) L − D_s A`.
pub fn noether_residual(x: &BundleVectorField, l: &RatExpr, a: &RatExpr) -> Result<RatExpr, SymmetryError> {
    let ch = x.chart();
    let p = prolong(x, 1)?;
    let dxi = total_derivative(&x.xi, ch)?;
    let da = total_derivative(a, ch)?;
    Ok(&(&p.apply(l)? + &(&dxi * l)) - &da)
}

/// `X^{[2]}E_i` with `ẍ ↦ G` substituted, one entry per equation.
pub fn liepoint_residuals(x: &BundleVectorField, sys: &GeodesicSystem) -> Result<Vec<RatExpr>, SymmetryError> {
    let p = prolong(x, 2)?;
    let on_shell = sys.on_shell();
    sys.rhs()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let r = &p.eta2[i] - &p.apply(g)?;
            Ok(r.substitute(&on_shell)?)
        })
        .collect()
}

/// Noether first integral `I = A − ξL − (η^α − ξẋ^α) ∂L/∂ẋ^α`.
///
/// With this sign `D_s I = 0` along solutions; for `∂_s` it equals `L`.
pub fn noether_first_integral(x: &BundleVectorField, l: &RatExpr, a: &RatExpr) -> Result<RatExpr, SymmetryError> {
    if !noether_residual(x, l, a)?.is_zero() {
        return Err(SymmetryError::NotASymmetry(x.name.clone()));
    }
    Ok(noether_charge(x, l, a))
}

/// The Noether charge of `x` without checking that `x` is a symmetry; it
/// is conserved only when the residual vanishes.
pub fn noether_charge(x: &BundleVectorField, l: &RatExpr, a: &RatExpr) -> RatExpr {
    let ch = x.chart();
    let mut acc = a - &(&x.xi * l);
    for i in 0..ch.dim() {
        let char_i = &x.eta[i] - &(&x.xi * &ch.velocity(i));
        if char_i.is_zero() {
            continue;
        }
        acc = &acc - &(&char_i * &l.diff(&ch.jet(i, 1)));
    }
    acc
}

/// True if `D_s I` vanishes on the solutions of `sys`.
pub fn is_conserved(i: &RatExpr, sys: &GeodesicSystem) -> Result<bool, SymmetryError> {
    Ok(total_derivative(i, sys.chart())?.substitute(&sys.on_shell())?.is_zero())
}

/// Outcome of verifying one candidate generator.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub field: BundleVectorField,
    pub mode: Mode,
    pub residuals: Vec<RatExpr>,
    pub pass: bool,
    pub first_integral: Option<RatExpr>,
}

impl SymmetryReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "name": self.field.name,
            "xi": self.field.xi.to_string(),
            "eta": self.field.eta.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "pass": self.pass,
            "residuals": self.residuals.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        });
        if let Some(i) = &self.first_integral {
            v["first_integral"] = json!(i.to_string());
        }
        v
    }
}

/// Noether check with gauge `A` (default 0); passing fields carry their
/// first integral.
pub fn verify_noether(x: &BundleVectorField, g: &Metric, a: Option<&RatExpr>) -> Result<SymmetryReport, SymmetryError> {
    let zero = RatExpr::zero();
    let a = a.unwrap_or(&zero);
    let l = geodesic_lagrangian(g);
    let r = noether_residual(x, &l, a)?;
    let pass = r.is_zero();
    Ok(SymmetryReport {
        field: x.clone(),
        mode: Mode::Noether,
        residuals: vec![r],
        pass,
        first_integral: pass.then(|| noether_charge(x, &l, a)),
    })
}

pub fn verify_liepoint(x: &BundleVectorField, g: &Metric) -> Result<SymmetryReport, SymmetryError> {
    verify_liepoint_system(x, &geodesic_system(g)?)
}

pub fn verify_liepoint_system(x: &BundleVectorField, sys: &GeodesicSystem) -> Result<SymmetryReport, SymmetryError> {
    let residuals = liepoint_residuals(x, sys)?;
    let pass = residuals.iter().all(RatExpr::is_zero);
    Ok(SymmetryReport {
        field: x.clone(),
        mode: Mode::LiePoint,
        residuals,
        pass,
        first_integral: None,
    })
}

pub fn verify(x: &BundleVectorField, g: &Metric, mode: Mode) -> Result<SymmetryReport, SymmetryError> {
    match mode {
        Mode::Noether => verify_noether(x, g, None),
        Mode::LiePoint => verify_liepoint(x, g),
    }
}

#[cfg(test)]
mod tests;
