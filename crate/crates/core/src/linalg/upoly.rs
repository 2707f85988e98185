//! Univariate polynomials over ℚ, used for minimal polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::QMatrix;
use crate::symexpr::Rational;

/// Coefficients in increasing degree, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![Rational::one()])
    }

    pub fn constant(q: Rational) -> Self {
        UPoly::new(vec![q])
    }

    /// `x - a`
    pub fn linear(a: Rational) -> Self {
        UPoly::new(vec![-a, Rational::one()])
    }

    /// `x^2 + c`
    pub fn quadratic(c: Rational) -> Self {
        UPoly::new(vec![c, Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        UPoly(self.0.iter().map(|c| c * &l).collect())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> UPoly {
        UPoly::new(self.0.iter().map(|c| c * q).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> UPoly {
        (0..k).fold(UPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        let inv = d.lead().recip();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g = gcd`, `g` monic.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::one(), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Evaluate at a square matrix (Horner).
    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.0.iter().rev() {
            acc = &acc * m;
            acc = acc.add(&QMatrix::identity(n).scale(c));
        }
        acc
    }

    /// Distinct rational roots, by the rational root theorem.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut roots = Vec::new();
        // Strip the power of x.
        let low = self.0.iter().position(|c| !c.is_zero()).unwrap_or(0);
        if low > 0 {
            roots.push(Rational::zero());
        }
        let p = UPoly::new(self.0[low..].to_vec());
        if p.degree() == Some(0) {
            return roots;
        }
        // Clear denominators.
        let l = p.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.0.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sign in [1, -1] {
                    let q = Rational::new(num.clone() * sign, den.clone());
                    if !roots.contains(&q) && p.eval(&q).is_zero() {
                        roots.push(q);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{int, rat};

    #[test]
    fn roots_and_gcd() {
        // (x - 1/2)(x + 3)(x^2 + 1) x
        let p = UPoly::linear(rat(1, 2))
            .mul(&UPoly::linear(int(-3)))
            .mul(&UPoly::quadratic(int(1)))
            .mul(&UPoly::linear(int(0)));
        assert_eq!(p.rational_roots(), vec![int(-3), int(0), rat(1, 2)]);
        let g = p.gcd(&UPoly::quadratic(int(1)).mul(&UPoly::linear(int(7))));
        assert_eq!(g, UPoly::quadratic(int(1)));
    }

    #[test]
    fn extended_euclid() {
        let a = UPoly::quadratic(int(1));
        let b = UPoly::linear(int(2));
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, UPoly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), UPoly::one());
    }
}
