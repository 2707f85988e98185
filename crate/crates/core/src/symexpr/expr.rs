//! Surface expression trees.
//!
//! [`Expr`] is what the parser produces and what reports print. All
//! arithmetic decisions go through [`RatExpr`](super::RatExpr), the
//! canonical rational-function form; `Expr` only offers light structural
//! flattening on construction.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number used everywhere in the kernel.
pub type Rational = BigRational;

/// Build a rational from machine integers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Build an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Application of an opaque function to argument symbols, carrying a
/// partial-derivative multi-order (one entry per argument).
///
/// `M(t)` has `orders == [0]`, `M'(t)` has `orders == [1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncApp {
    pub name: Symbol,
    pub args: Vec<Symbol>,
    pub orders: Vec<u32>,
}

impl FuncApp {
    pub fn new(name: &str, args: &[&str]) -> Self {
        FuncApp {
            name: Symbol::new(name),
            args: args.iter().map(|a| Symbol::new(a)).collect(),
            orders: vec![0; args.len()],
        }
    }

    /// Same function with the derivative order in `arg` raised by `k`.
    /// Returns `None` when the function does not depend on `arg`.
    pub fn derivative(&self, arg: &Symbol, k: u32) -> Option<FuncApp> {
        let pos = self.args.iter().position(|a| a == arg)?;
        let mut out = self.clone();
        out.orders[pos] += k;
        Some(out)
    }

    pub fn total_order(&self) -> u32 {
        self.orders.iter().sum()
    }

    /// The underived function this atom belongs to.
    pub fn base(&self) -> FuncApp {
        FuncApp {
            name: self.name.clone(),
            args: self.args.clone(),
            orders: vec![0; self.args.len()],
        }
    }
}

/// A jet coordinate: the `order`-th derivative of the coordinate `coord`
/// with respect to the curve parameter `param`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub coord: Symbol,
    pub param: Symbol,
    pub order: u8,
}

impl JetVar {
    pub fn new(coord: &Symbol, param: &Symbol, order: u8) -> Self {
        JetVar {
            coord: coord.clone(),
            param: param.clone(),
            order,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElemFn {
    Sin,
    Cos,
    Tan,
    Cot,
    Csc,
    Sec,
    Exp,
    Ln,
    Sqrt,
    Arctan,
}

impl ElemFn {
    pub const ALL: [ElemFn; 10] = [
        ElemFn::Sin,
        ElemFn::Cos,
        ElemFn::Tan,
        ElemFn::Cot,
        ElemFn::Csc,
        ElemFn::Sec,
        ElemFn::Exp,
        ElemFn::Ln,
        ElemFn::Sqrt,
        ElemFn::Arctan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElemFn::Sin => "sin",
            ElemFn::Cos => "cos",
            ElemFn::Tan => "tan",
            ElemFn::Cot => "cot",
            ElemFn::Csc => "csc",
            ElemFn::Sec => "sec",
            ElemFn::Exp => "exp",
            ElemFn::Ln => "ln",
            ElemFn::Sqrt => "sqrt",
            ElemFn::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<ElemFn> {
        ElemFn::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Symbolic expression tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Sym(Symbol),
    Jet(JetVar),
    Func(FuncApp),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Apply(ElemFn, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(int(n))
    }

    pub fn num(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn func(name: &str, args: &[&str]) -> Expr {
        Expr::Func(FuncApp::new(name, args))
    }

    pub fn jet(coord: &str, param: &str, order: u8) -> Expr {
        Expr::Jet(JetVar::new(&Symbol::new(coord), &Symbol::new(param), order))
    }

    pub fn apply(f: ElemFn, arg: Expr) -> Expr {
        Expr::Apply(f, Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::apply(ElemFn::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::apply(ElemFn::Cos, arg)
    }

    /// `base^exp`, folding nested integer powers.
    pub fn pow(base: Expr, exp: Rational) -> Expr {
        if exp.is_one() {
            return base;
        }
        match base {
            Expr::Pow(inner, e) if e.is_integer() && exp.is_integer() => Expr::Pow(inner, e * exp),
            other => Expr::Pow(Box::new(other), exp),
        }
    }

    pub fn powi(base: Expr, exp: i64) -> Expr {
        Expr::pow(base, int(exp))
    }

    /// n-ary sum with flattening of nested sums.
    pub fn sum(items: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match it {
                Expr::Add(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    /// n-ary product with flattening of nested products; a leading numeric
    /// factor is merged with other numeric factors.
    pub fn product(items: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut has_coeff = false;
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match it {
                Expr::Mul(inner) => {
                    for f in inner {
                        if let Expr::Num(q) = f {
                            coeff *= q;
                            has_coeff = true;
                        } else {
                            out.push(f);
                        }
                    }
                }
                Expr::Num(q) => {
                    coeff *= q;
                    has_coeff = true;
                }
                other => out.push(other),
            }
        }
        if has_coeff && !coeff.is_one() {
            out.insert(0, Expr::Num(coeff));
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::Mul(out),
        }
    }

    pub fn is_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    /// Visit every node, parents before children.
    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Add(items) | Expr::Mul(items) => items.iter().for_each(|e| e.walk(f)),
            Expr::Pow(b, _) => b.walk(f),
            Expr::Apply(_, a) => a.walk(f),
            _ => {}
        }
    }

    /// True when some jet variable occurs in the tree.
    pub fn has_jets(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, Expr::Jet(_)) {
                found = true;
            }
        });
        found
    }

    pub fn is_negative_literal(&self) -> bool {
        match self {
            Expr::Num(q) => q.is_negative(),
            Expr::Mul(items) => matches!(items.first(), Some(Expr::Num(q)) if q.is_negative()),
            _ => false,
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::Num(q)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, Expr::powi(rhs, -1)])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(q) => Expr::Num(-q),
            other => Expr::product(vec![Expr::int(-1), other]),
        }
    }
}
