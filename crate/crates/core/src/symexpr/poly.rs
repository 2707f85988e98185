//! Sparse multivariate polynomials over the rationals, in kernel atoms.
//!
//! Monomials are ordered lexicographically with the smallest atom as the
//! most significant variable; this is a proper monomial order, so the last
//! entry of a [`Poly`] is its leading term and division by a single
//! polynomial decides divisibility.
//!
//! Multiplication keeps every `cos(u)` at exponent at most one by
//! rewriting `cos(u)^2 -> 1 - sin(u)^2`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::expr::{FuncApp, JetVar, Rational, Symbol};
use super::ratexpr::RatExpr;

/// A kernel of the canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Sym(Symbol),
    Jet(JetVar),
    Func(FuncApp),
    Sin(Arc<RatExpr>),
    Cos(Arc<RatExpr>),
    Exp(Arc<RatExpr>),
    Ln(Arc<RatExpr>),
    Atan(Arc<RatExpr>),
    /// `base^e` with `0 < e < 1`.
    Root(Arc<RatExpr>, Rational),
}

impl Atom {
    pub fn sym(name: &str) -> Atom {
        Atom::Sym(Symbol::new(name))
    }

    pub fn is_cos(&self) -> bool {
        matches!(self, Atom::Cos(_))
    }

    /// Partner `sin` atom of a `cos` atom.
    pub fn sin_partner(&self) -> Option<Atom> {
        match self {
            Atom::Cos(a) => Some(Atom::Sin(a.clone())),
            _ => None,
        }
    }

    /// Inner argument for compound kernels.
    pub fn argument(&self) -> Option<&RatExpr> {
        match self {
            Atom::Sin(a) | Atom::Cos(a) | Atom::Exp(a) | Atom::Ln(a) | Atom::Atan(a) => Some(a),
            Atom::Root(a, _) => Some(a),
            _ => None,
        }
    }
}

/// Product of atom powers, sorted by atom with no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Atom, u32)>) -> Self {
        pairs.retain(|(_, e)| *e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(pairs.len());
        for (a, e) in pairs {
            match out.last_mut() {
                Some((last, le)) if *last == a => *le += e,
                _ => out.push((a, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        match self.0.binary_search_by(|(x, _)| x.cmp(a)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        let b = &other.0;
        for (a, e) in &self.0 {
            if j < b.len() && b[j].0 < *a {
                return None;
            }
            if j < b.len() && b[j].0 == *a {
                if b[j].1 > *e {
                    return None;
                }
                if *e > b[j].1 {
                    out.push((a.clone(), e - b[j].1));
                }
                j += 1;
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (a, e) in &self.0 {
            let f = other.exponent(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    /// Componentwise maximum of exponents.
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut pairs = Vec::new();
        for (a, e) in &self.0 {
            pairs.push((a.clone(), (*e).max(other.exponent(a))));
        }
        for (a, e) in &other.0 {
            if self.exponent(a) == 0 {
                pairs.push((a.clone(), *e));
            }
        }
        Monomial::from_pairs(pairs)
    }

    /// Remove `atom` and return its exponent with the rest.
    pub fn split_off(&self, atom: &Atom) -> (u32, Monomial) {
        let mut rest = self.0.clone();
        match rest.binary_search_by(|(x, _)| x.cmp(atom)) {
            Ok(i) => {
                let (_, e) = rest.remove(i);
                (e, Monomial(rest))
            }
            Err(_) => (0, Monomial(rest)),
        }
    }

    fn with_exponent(&self, atom: &Atom, e: u32) -> Monomial {
        let mut rest = self.0.clone();
        match rest.binary_search_by(|(x, _)| x.cmp(atom)) {
            Ok(i) => {
                if e == 0 {
                    rest.remove(i);
                } else {
                    rest[i].1 = e;
                }
            }
            Err(i) => {
                if e > 0 {
                    rest.insert(i, (atom.clone(), e));
                }
            }
        }
        Monomial(rest)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Lexicographic order, smallest atom most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, e)), Some((y, f))) => match x.cmp(y) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::one(), q);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom) -> Poly {
        Poly::monomial(Monomial::atom(a, 1), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }.reduce_trig()
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p.reduce_trig()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single term, when there is exactly one.
    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Every atom occurring in some monomial.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = Vec::new();
        for m in self.terms.keys() {
            for (a, _) in m.pairs() {
                v.push(a.clone());
            }
        }
        v.sort();
        v.dedup();
        v
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.terms.keys().any(|m| m.exponent(a) > 0)
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(x, c)| (x.mul(m), c * q)).collect(),
        }
        .reduce_trig()
    }

    pub(crate) fn raw_mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        self.raw_mul(other).reduce_trig()
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    fn needs_trig_reduction(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.pairs().iter().any(|(a, e)| *e >= 2 && a.is_cos()))
    }

    /// Rewrite `cos(u)^k`, `k >= 2`, through `cos(u)^2 = 1 - sin(u)^2`.
    pub fn reduce_trig(self) -> Poly {
        if !self.needs_trig_reduction() {
            return self;
        }
        let mut out = Poly::zero();
        for (m, c) in self.terms {
            let heavy: Vec<(Atom, u32)> = m
                .pairs()
                .iter()
                .filter(|(a, e)| *e >= 2 && a.is_cos())
                .cloned()
                .collect();
            if heavy.is_empty() {
                out.add_term(m, c);
                continue;
            }
            let mut base = m.clone();
            let mut factor = Poly::constant(c);
            for (a, e) in heavy {
                base = base.with_exponent(&a, e % 2);
                let sin = a.sin_partner().unwrap();
                let one_minus = Poly::one().sub(&Poly::monomial_raw(Monomial::atom(sin, 2)));
                for _ in 0..e / 2 {
                    factor = factor.raw_mul(&one_minus);
                }
            }
            for (fm, fc) in factor.terms {
                out.add_term(base.mul(&fm), fc);
            }
        }
        out
    }

    pub(crate) fn monomial_raw(m: Monomial) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::one());
        Poly { terms }
    }

    /// Formal partial derivative treating `a` as an independent variable.
    pub fn formal_derivative(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(a);
            if e == 0 {
                continue;
            }
            let m2 = rest.with_exponent(a, e - 1);
            out.add_term(m2, c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Make the leading coefficient one; returns the factor divided out.
    pub fn monic(&self) -> (Poly, Rational) {
        let lc = self.leading_coeff();
        if lc.is_zero() || lc.is_one() {
            return (self.clone(), Rational::one());
        }
        (self.scale(&lc.recip()), lc)
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if let Some((dm, dc)) = d.as_monomial() {
            let inv = dc.recip();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.div(dm)?, c * &inv);
            }
            return Some(Poly { terms });
        }
        let (dlm, dlc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = rm.div(&dlm)?;
            let qc = rc / &dlc;
            // Division happens in the free polynomial ring: no trig rewriting.
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), -(c * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Write `self = p + x*q` for an atom occurring at most linearly.
    pub(crate) fn split_linear(&self, x: &Atom) -> (Poly, Poly) {
        let mut c = self.coeffs_in(x);
        debug_assert!(c.len() <= 2);
        c.resize(2, Poly::zero());
        let q = c.pop().unwrap();
        let p = c.pop().unwrap();
        (p, q)
    }

    /// Split into coefficients of powers of `x`.
    pub(crate) fn coeffs_in(&self, x: &Atom) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(x);
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, Poly::zero());
            }
            out[e].add_term(rest, c.clone());
        }
        out
    }

    pub(crate) fn from_coeffs(x: &Atom, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                out.add_term(m.with_exponent(x, e as u32), c.clone());
            }
        }
        out
    }

    /// Greatest common divisor in the free polynomial ring, made monic.
    ///
    /// Uses the monomial shortcut where possible and a recursive primitive
    /// remainder sequence otherwise.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic().0;
        }
        if other.is_zero() {
            return self.monic().0;
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if let Some((m, _)) = self.as_monomial() {
            return Poly::monomial_raw(monomial_gcd_with(m, other));
        }
        if let Some((m, _)) = other.as_monomial() {
            return Poly::monomial_raw(monomial_gcd_with(m, self));
        }
        if self == other {
            return self.monic().0;
        }
        // Strip common monomial content first; it keeps the recursion shallow.
        let ma = self.monomial_content();
        let mb = other.monomial_content();
        let mg = ma.gcd(&mb);
        let a = if ma.is_one() { self.clone() } else { self.div_monomial(&ma) };
        let b = if mb.is_one() { other.clone() } else { other.div_monomial(&mb) };
        let g = gcd_recursive(&a, &b);
        let out = if mg.is_one() {
            g
        } else {
            g.raw_mul(&Poly::monomial_raw(mg))
        };
        out.monic().0
    }

    fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let mut g = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (x.div(m).expect("monomial content divides"), c.clone()))
                .collect(),
        }
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if let (Some((ma, _)), Some((mb, _))) = (self.as_monomial(), other.as_monomial()) {
            return Poly::monomial_raw(ma.lcm(mb));
        }
        let g = self.gcd(other);
        let q = other.div_exact(&g).expect("gcd divides");
        self.raw_mul(&q).monic().0
    }

    /// Substitute atoms by polynomials (only used where images are polynomial).
    pub fn map_terms<F>(&self, mut f: F) -> Poly
    where
        F: FnMut(&Monomial, &Rational) -> Poly,
    {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out = out.add(&f(m, c));
        }
        out
    }
}

fn monomial_gcd_with(m: &Monomial, p: &Poly) -> Monomial {
    let mut g = m.clone();
    for x in p.terms.keys() {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    g
}

/// Smallest atom present in either polynomial.
fn main_variable(a: &Poly, b: &Poly) -> Option<Atom> {
    let first = |p: &Poly| p.terms.keys().filter_map(|m| m.pairs().first().map(|(x, _)| x.clone())).min();
    match (first(a), first(b)) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.monic().0 } else { g.gcd(c) };
        if g.is_one() {
            break;
        }
    }
    g
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(|p| p.is_zero()) {
        v.pop();
    }
}

fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.raw_mul(lb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.raw_mul(&lr));
        }
        trim(&mut next);
        r = next;
    }
    r
}

fn primitive(coeffs: &[Poly]) -> Vec<Poly> {
    let c = content(coeffs);
    if c.is_one() {
        return coeffs.to_vec();
    }
    coeffs
        .iter()
        .map(|p| p.div_exact(&c).expect("content divides coefficient"))
        .collect()
}

fn gcd_recursive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let x = match main_variable(a, b) {
        Some(x) => x,
        None => return Poly::one(),
    };
    let ua = a.coeffs_in(&x);
    let ub = b.coeffs_in(&x);
    if ua.len() == 1 {
        // `a` free of x: gcd divides every x-coefficient of b.
        return a.gcd(&content(&ub));
    }
    if ub.len() == 1 {
        return b.gcd(&content(&ua));
    }
    let ca = content(&ua);
    let cb = content(&ub);
    let c = ca.gcd(&cb);
    let mut pa = primitive(&ua);
    let mut pb = primitive(&ub);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        let r = pseudo_remainder(&pa, &pb);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            pb = vec![Poly::one()];
            break;
        }
        pa = pb;
        pb = primitive(&r);
    }
    let g = Poly::from_coeffs(&x, &primitive(&pb));
    let out = g.raw_mul(&c);
    let (m, _) = out.monic();
    m
}

impl Poly {
    /// Sign of the leading coefficient.
    pub fn leading_is_negative(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::expr::int;

    fn x() -> Poly {
        Poly::atom(Atom::sym("x"))
    }
    fn y() -> Poly {
        Poly::atom(Atom::sym("y"))
    }

    #[test]
    fn lex_order_is_multiplicative() {
        let mx = Monomial::atom(Atom::sym("x"), 1);
        let my = Monomial::atom(Atom::sym("y"), 1);
        assert!(mx > my);
        assert!(mx.mul(&my) > my);
        assert!(Monomial::one() < my);
    }

    #[test]
    fn gcd_of_products() {
        let a = x().add(&y()).mul(&x().sub(&Poly::one()));
        let b = x().add(&y()).mul(&y().add(&Poly::constant(int(3))));
        let g = a.gcd(&b);
        assert_eq!(g, x().add(&y()));
    }

    #[test]
    fn exact_division() {
        let a = x().pow(2).sub(&y().pow(2));
        let d = x().sub(&y());
        assert_eq!(a.div_exact(&d), Some(x().add(&y())));
        assert_eq!(a.div_exact(&x().add(&Poly::one())), None);
    }

    #[test]
    fn monomial_gcd_shortcut() {
        let a = x().pow(3).mul(&y());
        let b = x().pow(2).add(&x().mul(&y()));
        assert_eq!(a.gcd(&b), x());
    }
}
