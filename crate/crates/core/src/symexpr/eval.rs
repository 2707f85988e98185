//! Floating-point evaluation, used only by the numerical integrator and the
//! optimal-system reduction. Nothing in the exact kernel depends on it.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use super::expr::{ElemFn, Expr, FuncApp, JetVar, Symbol};
use super::poly::{Atom, Poly};
use super::ratexpr::RatExpr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no numeric value bound for {0}")]
    Unbound(String),
    #[error("singular value: denominator {0:e} is below the 1e-12 guard")]
    Singular(f64),
    #[error("non-finite value encountered")]
    NonFinite,
}

/// Numeric values for the leaves of an expression.
#[derive(Clone, Debug, Default)]
pub struct NumericEnv {
    pub symbols: HashMap<Symbol, f64>,
    pub jets: HashMap<JetVar, f64>,
    pub functions: HashMap<FuncApp, f64>,
}

impl NumericEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, v: f64) -> &mut Self {
        self.symbols.insert(Symbol::new(name), v);
        self
    }

    pub fn set_jet(&mut self, j: JetVar, v: f64) -> &mut Self {
        self.jets.insert(j, v);
        self
    }
}

/// Smallest magnitude accepted for a divisor.
pub const SINGULARITY_GUARD: f64 = 1e-12;

fn guarded_div(a: f64, b: f64) -> Result<f64, EvalError> {
    if b.abs() < SINGULARITY_GUARD {
        return Err(EvalError::Singular(b));
    }
    finite(a / b)
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Evaluate a tree in double precision.
pub fn eval_f64(e: &Expr, env: &NumericEnv) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Num(q) => q.to_f64().unwrap_or(f64::NAN),
        Expr::Sym(s) => *env.symbols.get(s).ok_or_else(|| EvalError::Unbound(s.to_string()))?,
        Expr::Jet(j) => *env.jets.get(j).ok_or_else(|| EvalError::Unbound(e.to_string()))?,
        Expr::Func(f) => *env.functions.get(f).ok_or_else(|| EvalError::Unbound(e.to_string()))?,
        Expr::Add(items) => {
            let mut acc = 0.0;
            for it in items {
                acc += eval_f64(it, env)?;
            }
            acc
        }
        Expr::Mul(items) => {
            let mut acc = 1.0;
            for it in items {
                acc *= eval_f64(it, env)?;
            }
            acc
        }
        Expr::Pow(b, q) => {
            let x = eval_f64(b, env)?;
            if q.is_integer() {
                let n = q.to_integer().to_i32().ok_or(EvalError::NonFinite)?;
                if n < 0 {
                    guarded_div(1.0, x.powi(-n))?
                } else {
                    x.powi(n)
                }
            } else {
                let p = q.to_f64().unwrap_or(f64::NAN);
                if p < 0.0 {
                    guarded_div(1.0, x.powf(-p))?
                } else {
                    x.powf(p)
                }
            }
        }
        Expr::Apply(f, a) => {
            let x = eval_f64(a, env)?;
            match f {
                ElemFn::Sin => x.sin(),
                ElemFn::Cos => x.cos(),
                ElemFn::Tan => guarded_div(x.sin(), x.cos())?,
                ElemFn::Cot => guarded_div(x.cos(), x.sin())?,
                ElemFn::Csc => guarded_div(1.0, x.sin())?,
                ElemFn::Sec => guarded_div(1.0, x.cos())?,
                ElemFn::Exp => x.exp(),
                ElemFn::Ln => x.ln(),
                ElemFn::Sqrt => x.sqrt(),
                ElemFn::Arctan => x.atan(),
            }
        }
    };
    finite(v)
}

/// A list of canonical expressions compiled for repeated evaluation with
/// the leaves (`inputs`) supplied positionally.
#[derive(Clone, Debug)]
pub struct CompiledExprs {
    inputs: Vec<Atom>,
    kernels: Vec<(KernelOp, usize)>,
    exprs: Vec<usize>,
    rats: Vec<(CPoly, CPoly)>,
}

#[derive(Clone, Debug)]
enum KernelOp {
    Sin,
    Cos,
    Exp,
    Ln,
    Atan,
    Root(f64),
}

/// Polynomial over slot indices: slots `0..inputs` are inputs, the rest are
/// kernel values.
#[derive(Clone, Debug)]
struct CPoly(Vec<(f64, Vec<(usize, i32)>)>);

impl CPoly {
    fn eval(&self, slots: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(c, m)| m.iter().fold(*c, |acc, (i, e)| acc * slots[*i].powi(*e)))
            .sum()
    }
}

struct Builder {
    inputs: Vec<Atom>,
    kernel_atoms: Vec<Atom>,
    kernels: Vec<(KernelOp, usize)>,
    rats: Vec<(CPoly, CPoly)>,
}

impl Builder {
    fn slot(&mut self, a: &Atom) -> Result<usize, EvalError> {
        if let Some(i) = self.inputs.iter().position(|x| x == a) {
            return Ok(i);
        }
        if let Some(i) = self.kernel_atoms.iter().position(|x| x == a) {
            return Ok(self.inputs.len() + i);
        }
        let (op, arg) = match a {
            Atom::Sin(u) => (KernelOp::Sin, u),
            Atom::Cos(u) => (KernelOp::Cos, u),
            Atom::Exp(u) => (KernelOp::Exp, u),
            Atom::Ln(u) => (KernelOp::Ln, u),
            Atom::Atan(u) => (KernelOp::Atan, u),
            Atom::Root(u, e) => (KernelOp::Root(e.to_f64().unwrap_or(f64::NAN)), u),
            other => return Err(EvalError::Unbound(super::ratexpr_atom_name(other))),
        };
        let r = self.rat(arg)?;
        self.kernel_atoms.push(a.clone());
        self.kernels.push((op, r));
        Ok(self.inputs.len() + self.kernel_atoms.len() - 1)
    }

    fn poly(&mut self, p: &Poly) -> Result<CPoly, EvalError> {
        let mut out = Vec::new();
        for (m, c) in p.terms() {
            let mut f = Vec::new();
            for (a, e) in m.pairs() {
                f.push((self.slot(a)?, *e as i32));
            }
            out.push((c.to_f64().unwrap_or(f64::NAN), f));
        }
        Ok(CPoly(out))
    }

    fn rat(&mut self, r: &RatExpr) -> Result<usize, EvalError> {
        let n = self.poly(r.num())?;
        let d = self.poly(r.den())?;
        self.rats.push((n, d));
        Ok(self.rats.len() - 1)
    }
}

impl CompiledExprs {
    /// Compile `exprs`; every leaf atom must appear in `inputs`.
    pub fn new(inputs: &[Atom], exprs: &[RatExpr]) -> Result<Self, EvalError> {
        let mut b = Builder {
            inputs: inputs.to_vec(),
            kernel_atoms: Vec::new(),
            kernels: Vec::new(),
            rats: Vec::new(),
        };
        let mut idx = Vec::new();
        for e in exprs {
            idx.push(b.rat(e)?);
        }
        Ok(CompiledExprs {
            inputs: b.inputs,
            kernels: b.kernels,
            exprs: idx,
            rats: b.rats,
        })
    }

    pub fn inputs(&self) -> &[Atom] {
        &self.inputs
    }

    fn rat_value(&self, i: usize, slots: &[f64]) -> Result<f64, EvalError> {
        let (n, d) = &self.rats[i];
        guarded_div(n.eval(slots), d.eval(slots))
    }

    /// Evaluate all compiled expressions at the given input values.
    pub fn eval(&self, values: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut slots = values.to_vec();
        // Kernels are pushed after their arguments' kernels, so a single
        // forward pass suffices.
        for (op, r) in &self.kernels {
            let x = self.rat_value(*r, &slots)?;
            slots.push(finite(match op {
                KernelOp::Sin => x.sin(),
                KernelOp::Cos => x.cos(),
                KernelOp::Exp => x.exp(),
                KernelOp::Ln => x.ln(),
                KernelOp::Atan => x.atan(),
                KernelOp::Root(p) => x.powf(*p),
            })?);
        }
        self.exprs.iter().map(|i| self.rat_value(*i, &slots)).collect()
    }
}
