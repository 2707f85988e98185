//! Randomized exact zero test.
//!
//! An independent check of the canonical form: the raw tree is evaluated in
//! exact rational arithmetic at random points. Symbols, jets and opaque
//! function atoms get independent random values. Trigonometric kernels are
//! evaluated on rational points of the unit circle. For each monomial `m`
//! that occurs in a polynomial argument, all multiples `c*m` are measured in
//! a common unit `m/L`, so angle-addition and multiple-angle identities hold
//! exactly at the sample point. Exponentials use the same unit scheme with
//! positive rationals. `ln`, `arctan` and irrational roots have no exact
//! rational values, so they get opaque random values keyed by their
//! canonical argument.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{ElemFn, Expr, Rational};
use super::ops::canonicalize;
use super::poly::{Atom, Monomial};
use super::ratexpr::RatExpr;

/// Environment variable enabling the cross-check inside [`super::is_zero`].
pub const SAMPLER_ENV: &str = "LIESYM_DEBUG_SAMPLER";

pub fn sampler_enabled() -> bool {
    std::env::var(SAMPLER_ENV).is_ok_and(|v| v == "1")
}

/// Multiples above this size are treated as opaque units, as the canonical
/// form does.
const MAX_MULTIPLE: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Atom(Atom),
    Unit(Monomial),
    TrigOpaque(RatExpr),
    ExpOpaque(RatExpr),
    Ln(RatExpr),
    Atan(RatExpr),
    Root(RatExpr, Rational),
}

/// Exact value `(c, s)` of a point on the unit circle.
#[derive(Clone, Debug)]
struct Circle {
    c: Rational,
    s: Rational,
}

impl Circle {
    fn one() -> Self {
        Circle {
            c: Rational::one(),
            s: Rational::zero(),
        }
    }

    fn mul(&self, o: &Circle) -> Circle {
        Circle {
            c: &self.c * &o.c - &self.s * &o.s,
            s: &self.s * &o.c + &self.c * &o.s,
        }
    }

    fn conj(&self) -> Circle {
        Circle {
            c: self.c.clone(),
            s: -self.s.clone(),
        }
    }

    fn pow(&self, k: i64) -> Circle {
        let mut base = if k < 0 { self.conj() } else { self.clone() };
        let mut n = k.unsigned_abs();
        let mut acc = Circle::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }
}

struct Fail;

/// Seeded sampler holding the random assignment for one sample point.
pub struct Sampler {
    rng: ChaCha8Rng,
    values: HashMap<Key, Rational>,
    circles: HashMap<Key, Circle>,
    units: HashMap<Monomial, BigInt>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            values: HashMap::new(),
            circles: HashMap::new(),
            units: HashMap::new(),
        }
    }

    fn random_rational(&mut self) -> Rational {
        loop {
            let n: i64 = self.rng.gen_range(-40..=40);
            let d: i64 = self.rng.gen_range(1..=13);
            if n != 0 {
                return Rational::new(n.into(), d.into());
            }
        }
    }

    fn value(&mut self, k: Key) -> Rational {
        if let Some(v) = self.values.get(&k) {
            return v.clone();
        }
        let v = self.random_rational();
        self.values.insert(k, v.clone());
        v
    }

    fn positive(&mut self, k: Key) -> Rational {
        if let Some(v) = self.values.get(&k) {
            return v.clone();
        }
        let v = self.random_rational().abs();
        self.values.insert(k, v.clone());
        v
    }

    fn circle(&mut self, k: Key) -> Circle {
        if let Some(v) = self.circles.get(&k) {
            return v.clone();
        }
        let t = self.random_rational();
        let d = Rational::one() + &t * &t;
        let v = Circle {
            c: (Rational::one() - &t * &t) / &d,
            s: (Rational::from_integer(2.into()) * &t) / &d,
        };
        self.circles.insert(k, v.clone());
        v
    }

    /// Record, per monomial, the lcm of the coefficient denominators seen in
    /// trig/exp arguments.
    fn scan(&mut self, e: &Expr) -> Result<(), Fail> {
        let mut err = false;
        let mut args = Vec::new();
        e.walk(&mut |n| {
            if let Expr::Apply(f, a) = n {
                if !matches!(f, ElemFn::Ln | ElemFn::Arctan | ElemFn::Sqrt) {
                    args.push((**a).clone());
                }
            }
        });
        for a in args {
            match canonicalize(&a) {
                Ok(r) if r.den().is_one() => {
                    for (m, c) in r.num().terms() {
                        let l = self.units.entry(m.clone()).or_insert_with(BigInt::one);
                        *l = l.lcm(c.denom());
                    }
                }
                Ok(_) => {}
                Err(_) => err = true,
            }
        }
        if err {
            Err(Fail)
        } else {
            Ok(())
        }
    }

    /// Express a polynomial argument as integer multiples of monomial units.
    /// `None` when a multiple is too large to expand.
    fn multiples(&self, r: &RatExpr) -> Option<Vec<(Monomial, i64)>> {
        let mut out = Vec::new();
        for (m, c) in r.num().terms() {
            let l = self.units.get(m).cloned().unwrap_or_else(BigInt::one);
            let k = c * Rational::from_integer(l);
            let k = k.to_integer().to_i64().filter(|k| k.abs() <= MAX_MULTIPLE * 4)?;
            out.push((m.clone(), k));
        }
        Some(out)
    }

    fn trig(&mut self, a: &Expr) -> Result<Circle, Fail> {
        let r = canonicalize(a).map_err(|_| Fail)?;
        if r.den().is_one() {
            if let Some(parts) = self.multiples(&r) {
                let mut acc = Circle::one();
                for (m, k) in parts {
                    let constant = m.is_one();
                    let unit = if constant {
                        // Constant angles are opaque, as in the canonical form.
                        let c = r.num().terms().find(|(t, _)| t.is_one()).map(|(_, c)| c.abs()).expect("constant term");
                        self.circle(Key::TrigOpaque(RatExpr::constant(c)))
                    } else {
                        self.circle(Key::Unit(m))
                    };
                    let k = if constant { k.signum() } else { k };
                    acc = acc.mul(&unit.pow(k));
                }
                return Ok(acc);
            }
        }
        if r.num().leading_is_negative() {
            Ok(self.circle(Key::TrigOpaque(-&r)).conj())
        } else {
            Ok(self.circle(Key::TrigOpaque(r)))
        }
    }

    fn exp(&mut self, a: &Expr) -> Result<Rational, Fail> {
        let r = canonicalize(a).map_err(|_| Fail)?;
        if r.den().is_one() {
            if let Some(parts) = self.multiples(&r) {
                let mut acc = Rational::one();
                for (m, k) in parts {
                    let w = self.exp_unit(m);
                    acc *= pow_q(&w, k)?;
                }
                return Ok(acc);
            }
        }
        Ok(self.positive(Key::ExpOpaque(r)))
    }

    fn exp_unit(&mut self, m: Monomial) -> Rational {
        // Small integers keep the powers manageable.
        let k = Key::Unit(m);
        if let Some(v) = self.values.get(&k) {
            return v.clone();
        }
        let n: i64 = self.rng.gen_range(2..=5);
        let d: i64 = self.rng.gen_range(1..=3);
        let v = Rational::new(n.into(), d.into());
        self.values.insert(k, v.clone());
        v
    }

    fn eval(&mut self, e: &Expr) -> Result<Rational, Fail> {
        Ok(match e {
            Expr::Num(q) => q.clone(),
            Expr::Sym(s) => self.value(Key::Atom(Atom::Sym(s.clone()))),
            Expr::Jet(j) => self.value(Key::Atom(Atom::Jet(j.clone()))),
            Expr::Func(f) => self.value(Key::Atom(Atom::Func(f.clone()))),
            Expr::Add(items) => {
                let mut acc = Rational::zero();
                for it in items {
                    acc += self.eval(it)?;
                }
                acc
            }
            Expr::Mul(items) => {
                let mut acc = Rational::one();
                for it in items {
                    acc *= self.eval(it)?;
                }
                acc
            }
            Expr::Pow(b, q) => {
                let v = self.eval(b)?;
                if q.is_integer() {
                    pow_q(&v, q.to_integer().to_i64().ok_or(Fail)?)?
                } else {
                    let whole = q.floor();
                    let frac = q - &whole;
                    let w = pow_q(&v, whole.to_integer().to_i64().ok_or(Fail)?)?;
                    let base = canonicalize(b).map_err(|_| Fail)?;
                    if base.is_zero() {
                        return Err(Fail);
                    }
                    let root = match base.as_constant() {
                        Some(c) => exact_root(&c, &frac).ok_or(Fail)?,
                        None => self.positive(Key::Root(base, frac)),
                    };
                    w * root
                }
            }
            Expr::Apply(f, a) => match f {
                ElemFn::Sin => self.trig(a)?.s,
                ElemFn::Cos => self.trig(a)?.c,
                ElemFn::Tan => {
                    let p = self.trig(a)?;
                    div(p.s, p.c)?
                }
                ElemFn::Cot => {
                    let p = self.trig(a)?;
                    div(p.c, p.s)?
                }
                ElemFn::Csc => div(Rational::one(), self.trig(a)?.s)?,
                ElemFn::Sec => div(Rational::one(), self.trig(a)?.c)?,
                ElemFn::Exp => self.exp(a)?,
                ElemFn::Ln => {
                    let r = canonicalize(a).map_err(|_| Fail)?;
                    if r.is_one() {
                        Rational::zero()
                    } else {
                        self.value(Key::Ln(r))
                    }
                }
                ElemFn::Arctan => {
                    let r = canonicalize(a).map_err(|_| Fail)?;
                    if r.is_zero() {
                        Rational::zero()
                    } else if r.num().leading_is_negative() {
                        -self.value(Key::Atan(-&r))
                    } else {
                        self.value(Key::Atan(r))
                    }
                }
                ElemFn::Sqrt => self.eval(&Expr::Pow(a.clone(), Rational::new(1.into(), 2.into())))?,
            },
        })
    }
}

fn div(a: Rational, b: Rational) -> Result<Rational, Fail> {
    if b.is_zero() {
        Err(Fail)
    } else {
        Ok(a / b)
    }
}

fn pow_q(v: &Rational, k: i64) -> Result<Rational, Fail> {
    if k < 0 {
        if v.is_zero() {
            return Err(Fail);
        }
        return Ok(num_traits::pow(v.recip(), k.unsigned_abs() as usize));
    }
    Ok(num_traits::pow(v.clone(), k as usize))
}

fn exact_root(c: &Rational, frac: &Rational) -> Option<Rational> {
    let k = frac.denom().to_u32()?;
    if c.is_negative() && k % 2 == 0 {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(k);
        (r.pow(k) == n.abs()).then(|| if n.is_negative() { -r } else { r })
    };
    let base = Rational::new(root(c.numer())?, root(c.denom())?);
    Some(num_traits::pow(base, frac.numer().to_usize()?))
}

/// Evaluate `e` at `points` random points.
///
/// Returns `Some(true)` if every sample is zero, `Some(false)` if some
/// sample is nonzero, and `None` when no sample point could be evaluated
/// (every attempt hit a singularity).
pub fn sample_is_zero(e: &Expr, points: usize, seed: u64) -> Option<bool> {
    let mut evaluated = 0;
    let mut attempts = 0u64;
    while evaluated < points && attempts < 4 * points as u64 + 8 {
        let mut s = Sampler::new(seed.wrapping_add(attempts.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        attempts += 1;
        if s.scan(e).is_err() {
            return None;
        }
        match s.eval(e) {
            Ok(v) if !v.is_zero() => return Some(false),
            Ok(_) => evaluated += 1,
            Err(Fail) => continue,
        }
    }
    (evaluated > 0).then_some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn z(s: &str) -> Option<bool> {
        sample_is_zero(&parse_expr(s).unwrap(), 6, 7)
    }

    #[test]
    fn identities_sample_to_zero() {
        assert_eq!(z("sin(theta)^2 + cos(theta)^2 - 1"), Some(true));
        assert_eq!(z("sin(x/2)*cos(x/2)*2 - sin(x)"), Some(true));
        assert_eq!(z("cos(a + b) - cos(a)*cos(b) + sin(a)*sin(b)"), Some(true));
        assert_eq!(z("exp(x)^2 - exp(2*x)"), Some(true));
        assert_eq!(z("(x^2 - 1)/(x - 1) - x - 1"), Some(true));
    }

    #[test]
    fn nonzero_is_detected() {
        assert_eq!(z("sin(theta) - cos(theta)"), Some(false));
        assert_eq!(z("theta - sin(theta)"), Some(false));
        assert_eq!(z("D(M(t), t) - M(t)"), Some(false));
    }
}
