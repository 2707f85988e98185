//! Canonical rational-function form.
//!
//! A [`RatExpr`] is `num / den` with
//! - `den` free of `cos` kernels and monic in the monomial order,
//! - `num` of degree at most one in every `cos(u)`,
//! - `gcd(num, den) = 1` in the free polynomial ring.
//!
//! Over the ring of kernels modulo `sin^2 + cos^2 = 1` this representation
//! is unique, so structural equality is mathematical equality.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{int, Expr, Rational};
use super::poly::{Atom, Monomial, Poly};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatExpr {
    num: Poly,
    den: Poly,
}

/// Largest multiple-angle expansion performed symbolically.
const MAX_ANGLE_MULTIPLE: i64 = 8;

impl RatExpr {
    pub fn zero() -> Self {
        RatExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatExpr::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        RatExpr {
            num: Poly::constant(q),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        RatExpr::constant(int(n))
    }

    pub fn atom(a: Atom) -> Self {
        RatExpr {
            num: Poly::atom(a),
            den: Poly::one(),
        }
    }

    pub fn sym(name: &str) -> Self {
        RatExpr::atom(Atom::sym(name))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatExpr {
            num: p.reduce_trig(),
            den: Poly::one(),
        }
    }

    /// `num / den`, normalized.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, KernelError> {
        if den.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Ok(normalize(num.reduce_trig(), den.reduce_trig()))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        if !self.den.is_one() {
            return None;
        }
        match self.num.as_monomial() {
            Some((m, c)) if c.is_one() && m.pairs().len() == 1 && m.pairs()[0].1 == 1 => {
                Some(&m.pairs()[0].0)
            }
            _ => None,
        }
    }

    /// Every atom in numerator and denominator (top level only).
    pub fn atoms(&self) -> Vec<Atom> {
        let mut v = self.num.atoms();
        v.extend(self.den.atoms());
        v.sort();
        v.dedup();
        v
    }

    /// Atoms at every nesting level, including inside kernel arguments.
    pub fn atoms_deep(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for a in self.atoms() {
            if let Some(inner) = a.argument() {
                out.extend(inner.atoms_deep());
            }
            out.push(a);
        }
        out.sort();
        out.dedup();
        out
    }

    /// True if `a` occurs anywhere, including inside kernel arguments.
    pub fn depends_on(&self, a: &Atom) -> bool {
        self.atoms().iter().any(|x| {
            x == a
                || x.argument().is_some_and(|inner| inner.depends_on(a))
                || matches!((x, a), (Atom::Func(f), Atom::Sym(s)) if f.args.contains(s))
        })
    }

    pub fn scale(&self, q: &Rational) -> RatExpr {
        if q.is_zero() {
            return RatExpr::zero();
        }
        RatExpr {
            num: self.num.scale(q),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, other: &RatExpr) -> Result<RatExpr, KernelError> {
        Ok(self * &other.inv()?)
    }

    pub fn inv(&self) -> Result<RatExpr, KernelError> {
        if self.num.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Ok(normalize(self.den.clone(), self.num.clone()))
    }

    pub fn powi(&self, n: i64) -> Result<RatExpr, KernelError> {
        if n < 0 {
            return self.inv()?.powi(-n);
        }
        if n == 0 {
            return Ok(RatExpr::one());
        }
        if self.den.is_one() {
            return Ok(RatExpr::from_poly(self.num.pow(n as u32)));
        }
        Ok(normalize(self.num.pow(n as u32), self.den.pow(n as u32)))
    }

    /// `self^e` for a rational exponent.
    pub fn pow_rational(&self, e: &Rational) -> Result<RatExpr, KernelError> {
        if e.is_integer() {
            let n = e.to_integer().to_i64().ok_or(KernelError::Domain("exponent too large".into()))?;
            return self.powi(n);
        }
        if self.is_zero() {
            return if e.is_positive() {
                Ok(RatExpr::zero())
            } else {
                Err(KernelError::DivisionByZero)
            };
        }
        if let Some(c) = self.as_constant() {
            if let Some(r) = exact_root(&c, e.denom()) {
                let p = e.numer().to_i64().ok_or(KernelError::Domain("exponent too large".into()))?;
                return RatExpr::constant(r).powi(p);
            }
        }
        let whole = e.floor();
        let frac = e - &whole;
        let w = whole
            .to_integer()
            .to_i64()
            .ok_or(KernelError::Domain("exponent too large".into()))?;
        let root = RatExpr::atom(Atom::Root(Arc::new(self.clone()), frac));
        Ok(&self.powi(w)? * &root)
    }

    pub fn sin(arg: &RatExpr) -> RatExpr {
        trig_pair(arg).0
    }

    pub fn cos(arg: &RatExpr) -> RatExpr {
        trig_pair(arg).1
    }

    pub fn exp(arg: &RatExpr) -> RatExpr {
        if arg.is_zero() {
            return RatExpr::one();
        }
        if !arg.den.is_one() {
            return RatExpr::atom(Atom::Exp(Arc::new(arg.clone())));
        }
        let mut acc = RatExpr::one();
        for (m, c) in arg.num.terms() {
            let (unit, mult) = split_multiple(m, c);
            let base = RatExpr::atom(Atom::Exp(Arc::new(unit)));
            let factor = base.powi(mult).expect("exp kernel is nonzero");
            acc = &acc * &factor;
        }
        acc
    }

    pub fn ln(arg: &RatExpr) -> Result<RatExpr, KernelError> {
        if arg.is_zero() {
            return Err(KernelError::Domain("ln(0)".into()));
        }
        if arg.is_one() {
            return Ok(RatExpr::zero());
        }
        Ok(RatExpr::atom(Atom::Ln(Arc::new(arg.clone()))))
    }

    pub fn atan(arg: &RatExpr) -> RatExpr {
        if arg.is_zero() {
            return RatExpr::zero();
        }
        if arg.num.leading_is_negative() {
            return -&RatExpr::atom(Atom::Atan(Arc::new(-arg)));
        }
        RatExpr::atom(Atom::Atan(Arc::new(arg.clone())))
    }

    /// Convert back to a tree in a deterministic shape.
    pub fn to_expr(&self) -> Expr {
        if self.den.is_one() {
            return poly_to_expr(&self.num, None);
        }
        if let Some((dm, _)) = self.den.as_monomial() {
            return poly_to_expr(&self.num, Some(dm));
        }
        Expr::product(vec![
            poly_to_expr(&self.num, None),
            Expr::powi(poly_to_expr(&self.den, None), -1),
        ])
    }
}

fn normalize(num: Poly, den: Poly) -> RatExpr {
    if num.is_zero() {
        return RatExpr::zero();
    }
    let (mut num, mut den) = (num, den);
    // Rationalize: multiply through by the conjugate in each cos kernel.
    while let Some(c) = den.atoms().into_iter().find(Atom::is_cos) {
        let (p, q) = den.split_linear(&c);
        let conj = p.sub(&q.mul(&Poly::atom(c)));
        num = num.mul(&conj);
        den = den.mul(&conj);
    }
    if let Some(c) = den.as_constant() {
        return RatExpr {
            num: num.scale(&c.recip()),
            den: Poly::one(),
        };
    }
    let g = num.gcd(&den);
    if !g.is_one() {
        num = num.div_exact(&g).expect("gcd divides numerator");
        den = den.div_exact(&g).expect("gcd divides denominator");
    }
    let (den, lc) = den.monic();
    if !lc.is_one() {
        num = num.scale(&lc.recip());
    }
    RatExpr { num, den }
}

/// Exact `k`-th root of a rational, if it exists.
fn exact_root(q: &Rational, k: &BigInt) -> Option<Rational> {
    let k = k.to_u32()?;
    if q.is_negative() && k % 2 == 0 {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(k);
        (r.pow(k) == n.abs()).then(|| if n.is_negative() { -r } else { r })
    };
    Some(Rational::new(root(q.numer())?, root(q.denom())?))
}

/// Split the term `c*m` into a unit argument and an integer multiplicity:
/// `c = p/r` gives `(m/r, p)`; a non-integral constant gives `(|c|, ±1)`.
fn split_multiple(m: &Monomial, c: &Rational) -> (RatExpr, i64) {
    let p = c.numer().to_i64();
    match p {
        Some(p) if p.abs() <= MAX_ANGLE_MULTIPLE => {
            let unit = Rational::new(BigInt::one(), c.denom().clone());
            (RatExpr::from_poly(Poly::monomial(m.clone(), unit)), p)
        }
        _ => {
            let sign = if c.is_negative() { -1 } else { 1 };
            (RatExpr::from_poly(Poly::monomial(m.clone(), c.abs())), sign)
        }
    }
}

/// `(sin(arg), cos(arg))` with arguments expanded by angle addition.
fn trig_pair(arg: &RatExpr) -> (RatExpr, RatExpr) {
    if arg.is_zero() {
        return (RatExpr::zero(), RatExpr::one());
    }
    if !arg.den.is_one() {
        let (base, flip) = if arg.num.leading_is_negative() {
            (-arg, true)
        } else {
            (arg.clone(), false)
        };
        let base = Arc::new(base);
        let s = RatExpr::atom(Atom::Sin(base.clone()));
        let c = RatExpr::atom(Atom::Cos(base));
        return (if flip { -&s } else { s }, c);
    }
    let mut sin_acc = RatExpr::zero();
    let mut cos_acc = RatExpr::one();
    for (m, c) in arg.num.terms() {
        // A constant term is a single opaque angle: sin(3) is not expanded
        // through sin(1).
        let (unit, mult) = if m.is_one() {
            (RatExpr::constant(c.abs()), if c.is_negative() { -1 } else { 1 })
        } else {
            split_multiple(m, c)
        };
        let unit = Arc::new(unit);
        let s1 = RatExpr::atom(Atom::Sin(unit.clone()));
        let c1 = RatExpr::atom(Atom::Cos(unit));
        let (mut sn, mut cn) = (RatExpr::zero(), RatExpr::one());
        for _ in 0..mult.abs() {
            let next_s = &(&sn * &c1) + &(&cn * &s1);
            let next_c = &(&cn * &c1) - &(&sn * &s1);
            sn = next_s;
            cn = next_c;
        }
        if mult < 0 {
            sn = -&sn;
        }
        let next_s = &(&sin_acc * &cn) + &(&cos_acc * &sn);
        let next_c = &(&cos_acc * &cn) - &(&sin_acc * &sn);
        sin_acc = next_s;
        cos_acc = next_c;
    }
    (sin_acc, cos_acc)
}

pub(crate) fn atom_to_expr(a: &Atom) -> Expr {
    use super::expr::ElemFn;
    match a {
        Atom::Sym(s) => Expr::Sym(s.clone()),
        Atom::Jet(j) => Expr::Jet(j.clone()),
        Atom::Func(f) => Expr::Func(f.clone()),
        Atom::Sin(u) => Expr::apply(ElemFn::Sin, u.to_expr()),
        Atom::Cos(u) => Expr::apply(ElemFn::Cos, u.to_expr()),
        Atom::Exp(u) => Expr::apply(ElemFn::Exp, u.to_expr()),
        Atom::Ln(u) => Expr::apply(ElemFn::Ln, u.to_expr()),
        Atom::Atan(u) => Expr::apply(ElemFn::Arctan, u.to_expr()),
        Atom::Root(b, e) => Expr::Pow(Box::new(b.to_expr()), e.clone()),
    }
}

fn poly_to_expr(p: &Poly, den: Option<&Monomial>) -> Expr {
    let mut terms = Vec::new();
    for (m, c) in p.terms().rev() {
        let mut exps: Vec<(Atom, i64)> = m.pairs().iter().map(|(a, e)| (a.clone(), *e as i64)).collect();
        if let Some(d) = den {
            for (a, e) in d.pairs() {
                match exps.iter_mut().find(|(x, _)| x == a) {
                    Some(slot) => slot.1 -= *e as i64,
                    None => exps.push((a.clone(), -(*e as i64))),
                }
            }
            exps.retain(|(_, e)| *e != 0);
            exps.sort_by(|x, y| x.0.cmp(&y.0));
        }
        let mut factors = vec![Expr::Num(c.clone())];
        for (a, e) in exps {
            factors.push(Expr::powi(atom_to_expr(&a), e));
        }
        terms.push(Expr::product(factors));
    }
    Expr::sum(terms)
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatExpr {
                num: self.num.add(&rhs.num),
                den: Poly::one(),
            };
        }
        if self.den == rhs.den {
            return normalize(self.num.add(&rhs.num), self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let da = self.den.div_exact(&g).expect("gcd divides");
        let db = rhs.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&db).add(&rhs.num.mul(&da));
        let den = self.den.mul(&db);
        normalize(num, den)
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        self + &(-rhs)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() || rhs.is_zero() {
            return RatExpr::zero();
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if self.den.is_one() && rhs.den.is_one() {
            let num = self.num.mul(&rhs.num);
            return RatExpr { num, den: Poly::one() };
        }
        normalize(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatExpr {
            type Output = RatExpr;
            fn $m(self, rhs: RatExpr) -> RatExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatExpr> for RatExpr {
            type Output = RatExpr;
            fn $m(self, rhs: &RatExpr) -> RatExpr {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        -&self
    }
}

impl std::iter::Sum for RatExpr {
    fn sum<I: Iterator<Item = RatExpr>>(iter: I) -> RatExpr {
        iter.fold(RatExpr::zero(), |a, b| &a + &b)
    }
}

impl std::fmt::Display for RatExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl From<Rational> for RatExpr {
    fn from(q: Rational) -> Self {
        RatExpr::constant(q)
    }
}

impl From<i64> for RatExpr {
    fn from(n: i64) -> Self {
        RatExpr::int(n)
    }
}
