//! Text and LaTeX printers for [`Expr`].
//!
//! The text form is accepted by the parser, so `parse(print(e))` has the same
//! canonical form as `e`.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::expr::{ElemFn, Expr, FuncApp, JetVar, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum = 1,
    Product = 2,
    Power = 3,
    Atom = 4,
}

fn prec(e: &Expr) -> Prec {
    match e {
        Expr::Add(_) => Prec::Sum,
        Expr::Mul(_) => Prec::Product,
        Expr::Num(q) if q.is_negative() => Prec::Sum,
        Expr::Num(q) if !q.is_integer() => Prec::Product,
        Expr::Pow(..) => Prec::Power,
        _ => Prec::Atom,
    }
}

/// Split a product into sign, numerator factors and denominator factors.
struct Fraction<'a> {
    negative: bool,
    coeff: Rational,
    num: Vec<Expr>,
    den: Vec<Expr>,
    _src: std::marker::PhantomData<&'a ()>,
}

fn split_fraction(items: &[Expr]) -> Fraction<'_> {
    let mut coeff = Rational::one();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for it in items {
        match it {
            Expr::Num(q) => coeff *= q,
            Expr::Pow(b, e) if e.is_negative() => {
                let flipped = -e;
                den.push(if flipped.is_one() { (**b).clone() } else { Expr::Pow(b.clone(), flipped) });
            }
            other => num.push(other.clone()),
        }
    }
    let negative = coeff.is_negative();
    Fraction {
        negative,
        coeff: coeff.abs(),
        num,
        den,
        _src: std::marker::PhantomData,
    }
}

fn write_jet(f: &mut impl Write, j: &JetVar) -> fmt::Result {
    if j.order == 1 {
        write!(f, "D({}, {})", j.coord, j.param)
    } else {
        write!(f, "D({}, {}, {})", j.coord, j.param, j.order)
    }
}

fn write_func(f: &mut impl Write, a: &FuncApp) -> fmt::Result {
    let mut inner = format!("{}(", a.name);
    for (i, s) in a.args.iter().enumerate() {
        if i > 0 {
            inner.push_str(", ");
        }
        inner.push_str(s.name());
    }
    inner.push(')');
    for (arg, k) in a.args.iter().zip(&a.orders) {
        if *k == 1 {
            inner = format!("D({inner}, {arg})");
        } else if *k > 1 {
            inner = format!("D({inner}, {arg}, {k})");
        }
    }
    f.write_str(&inner)
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min: Prec) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, lead: Option<&Rational>, items: &[Expr]) -> fmt::Result {
    let mut first = true;
    if let Some(c) = lead {
        write!(f, "{}", c.numer())?;
        first = false;
    }
    for it in items {
        if !first {
            f.write_str("*")?;
        }
        write_wrapped(f, it, Prec::Power)?;
        first = false;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Jet(j) => write_jet(f, j),
            Expr::Func(a) => write_func(f, a),
            Expr::Add(items) => {
                for (i, it) in items.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{it}")?;
                    } else if it.is_negative_literal() {
                        write!(f, " - ")?;
                        write_wrapped(f, &(-it.clone()), Prec::Product)?;
                    } else {
                        write!(f, " + ")?;
                        write_wrapped(f, it, Prec::Product)?;
                    }
                }
                Ok(())
            }
            Expr::Mul(items) => {
                let fr = split_fraction(items);
                if fr.negative {
                    f.write_str("-")?;
                }
                let lead = (!fr.coeff.numer().is_one() || fr.num.is_empty()).then_some(&fr.coeff);
                write_factors(f, lead, &fr.num)?;
                if fr.den.is_empty() && fr.coeff.is_integer() {
                    return Ok(());
                }
                f.write_str("/")?;
                let mut den = fr.den.clone();
                let dc = fr.coeff.denom().clone();
                if !dc.is_one() {
                    den.insert(0, Expr::Num(Rational::from_integer(dc)));
                }
                if den.len() == 1 {
                    write_wrapped(f, &den[0], Prec::Power)
                } else {
                    f.write_str("(")?;
                    write_factors(f, None, &den)?;
                    f.write_str(")")
                }
            }
            Expr::Pow(b, e) => {
                write_wrapped(f, b, Prec::Atom)?;
                if e.is_integer() {
                    write!(f, "^{}", e.numer())
                } else {
                    write!(f, "^({}/{})", e.numer(), e.denom())
                }
            }
            Expr::Apply(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Options for LaTeX output.
#[derive(Clone, Copy, Debug, Default)]
pub struct LatexStyle {
    /// Render first and second jet variables with dots (`\dot{t}`) instead
    /// of `t'`, `t''`.
    pub prime_jets: bool,
}

fn latex_name(name: &str) -> String {
    const GREEK: [&str; 24] = [
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu",
        "nu", "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega", "varphi",
    ];
    if GREEK.contains(&name) {
        format!("\\{name}")
    } else if name.chars().count() > 1 {
        format!("\\mathrm{{{name}}}")
    } else {
        name.to_string()
    }
}

fn latex_prec(e: &Expr) -> Prec {
    match e {
        Expr::Mul(items) if items.iter().any(|x| matches!(x, Expr::Pow(_, q) if q.is_negative())) => Prec::Atom,
        Expr::Num(q) if !q.is_integer() => Prec::Atom,
        other => prec(other),
    }
}

fn latex_wrapped(e: &Expr, min: Prec, st: LatexStyle) -> String {
    let s = latex(e, st);
    if latex_prec(e) < min {
        format!("\\left({s}\\right)")
    } else {
        s
    }
}

fn latex_product(items: &[Expr], st: LatexStyle) -> String {
    items
        .iter()
        .map(|x| latex_wrapped(x, Prec::Power, st))
        .collect::<Vec<_>>()
        .join(" ")
}

fn latex(e: &Expr, st: LatexStyle) -> String {
    match e {
        Expr::Num(q) => {
            if q.is_integer() {
                q.numer().to_string()
            } else if q.is_negative() {
                format!("-\\frac{{{}}}{{{}}}", -q.numer(), q.denom())
            } else {
                format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
            }
        }
        Expr::Sym(s) => latex_name(s.name()),
        Expr::Jet(j) => {
            let base = latex_name(j.coord.name());
            match (j.order, st.prime_jets) {
                (1, false) => format!("\\dot{{{base}}}"),
                (2, false) => format!("\\ddot{{{base}}}"),
                (k, _) => format!("{base}^{{({k})}}"),
            }
        }
        Expr::Func(a) => {
            let args = a.args.iter().map(|s| latex_name(s.name())).collect::<Vec<_>>().join(", ");
            let name = latex_name(a.name.name());
            let total = a.total_order();
            if a.args.len() == 1 || total == 0 {
                let primes = "'".repeat(total as usize);
                format!("{name}{primes}({args})")
            } else {
                let parts = a
                    .args
                    .iter()
                    .zip(&a.orders)
                    .filter(|(_, k)| **k > 0)
                    .map(|(s, k)| {
                        let v = latex_name(s.name());
                        if *k == 1 {
                            format!("\\partial {v}")
                        } else {
                            format!("\\partial {v}^{{{k}}}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("\\frac{{\\partial^{{{total}}} {name}}}{{{parts}}}({args})")
            }
        }
        Expr::Add(items) => {
            let mut out = String::new();
            for (i, it) in items.iter().enumerate() {
                if i == 0 {
                    out.push_str(&latex(it, st));
                } else if it.is_negative_literal() {
                    out.push_str(" - ");
                    out.push_str(&latex_wrapped(&(-it.clone()), Prec::Product, st));
                } else {
                    out.push_str(" + ");
                    out.push_str(&latex_wrapped(it, Prec::Product, st));
                }
            }
            out
        }
        Expr::Mul(items) => {
            let fr = split_fraction(items);
            let sign = if fr.negative { "-" } else { "" };
            let mut num = fr.num.clone();
            if !fr.coeff.numer().is_one() || num.is_empty() {
                num.insert(0, Expr::Num(Rational::from_integer(fr.coeff.numer().clone())));
            }
            let mut den = fr.den.clone();
            if !fr.coeff.denom().is_one() {
                den.insert(0, Expr::Num(Rational::from_integer(fr.coeff.denom().clone())));
            }
            if den.is_empty() {
                format!("{sign}{}", latex_product(&num, st))
            } else {
                let n = num.iter().map(|x| latex_wrapped(x, Prec::Product, st)).collect::<Vec<_>>().join(" ");
                format!("{sign}\\frac{{{n}}}{{{}}}", latex_product(&den, st))
            }
        }
        Expr::Pow(b, q) => {
            if *q == Rational::new(1.into(), 2.into()) {
                return format!("\\sqrt{{{}}}", latex(b, st));
            }
            let exp = if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            };
            if let Expr::Apply(f, a) = &**b {
                if matches!(f, ElemFn::Sin | ElemFn::Cos | ElemFn::Tan | ElemFn::Cot | ElemFn::Csc | ElemFn::Sec)
                    && !q.is_negative()
                {
                    return format!("\\{}^{{{exp}}}{}", f.name(), latex_arg(a, st));
                }
            }
            format!("{}^{{{exp}}}", latex_wrapped(b, Prec::Atom, st))
        }
        Expr::Apply(f, a) => match f {
            ElemFn::Sqrt => format!("\\sqrt{{{}}}", latex(a, st)),
            ElemFn::Arctan => format!("\\arctan{}", latex_arg(a, st)),
            ElemFn::Exp => format!("e^{{{}}}", latex(a, st)),
            other => format!("\\{}{}", other.name(), latex_arg(a, st)),
        },
    }
}

fn latex_arg(a: &Expr, st: LatexStyle) -> String {
    match a {
        Expr::Sym(_) | Expr::Jet(_) => format!(" {}", latex(a, st)),
        _ => format!("\\left({}\\right)", latex(a, st)),
    }
}

/// LaTeX rendering of an expression.
pub fn to_latex(e: &Expr, style: LatexStyle) -> String {
    latex(e, style)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    #[test]
    fn text_forms() {
        for (src, want) in [
            ("-(1 - M(t)/r + Q(t)/r^2)", "-(1 - M(t)/r + Q(t)/r^2)"),
            ("sin(theta)^2", "sin(theta)^2"),
            ("x^(1/2)", "x^(1/2)"),
            ("D(M(t), t, 2)", "D(M(t), t, 2)"),
            ("D(t, s)", "D(t, s)"),
            ("3/4*x", "3*x/4"),
        ] {
            assert_eq!(parse_expr(src).unwrap().to_string(), want);
        }
    }

    #[test]
    fn latex_forms() {
        let st = LatexStyle::default();
        let e = parse_expr("D(M(t), t)/r - D(t, s)^2").unwrap();
        assert_eq!(to_latex(&e, st), "\\frac{M'(t)}{r} - \\dot{t}^{2}");
        let e = parse_expr("sin(theta)^2*D(phi, s)").unwrap();
        assert_eq!(to_latex(&e, st), "\\sin^{2} \\theta \\dot{\\phi}");
    }
}
