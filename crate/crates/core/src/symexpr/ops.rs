//! Canonicalization, differentiation, substitution and collection.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use super::expr::{ElemFn, Expr, FuncApp, Rational, Symbol};
use super::poly::{Atom, Monomial, Poly};
use super::ratexpr::RatExpr;
use super::KernelError;

/// Bring a tree into canonical rational form.
pub fn canonicalize(e: &Expr) -> Result<RatExpr, KernelError> {
    Ok(match e {
        Expr::Num(q) => RatExpr::constant(q.clone()),
        Expr::Sym(s) => RatExpr::atom(Atom::Sym(s.clone())),
        Expr::Jet(j) => RatExpr::atom(Atom::Jet(j.clone())),
        Expr::Func(f) => RatExpr::atom(Atom::Func(f.clone())),
        Expr::Add(items) => {
            let mut acc = RatExpr::zero();
            for it in items {
                acc = &acc + &canonicalize(it)?;
            }
            acc
        }
        Expr::Mul(items) => {
            let mut acc = RatExpr::one();
            for it in items {
                acc = &acc * &canonicalize(it)?;
            }
            acc
        }
        Expr::Pow(b, q) => canonicalize(b)?.pow_rational(q)?,
        Expr::Apply(f, a) => apply_elem(*f, &canonicalize(a)?)?,
    })
}

pub fn apply_elem(f: ElemFn, a: &RatExpr) -> Result<RatExpr, KernelError> {
    let sin = || RatExpr::sin(a);
    let cos = || RatExpr::cos(a);
    Ok(match f {
        ElemFn::Sin => sin(),
        ElemFn::Cos => cos(),
        ElemFn::Tan => sin().checked_div(&cos())?,
        ElemFn::Cot => cos().checked_div(&sin())?,
        ElemFn::Csc => sin().inv()?,
        ElemFn::Sec => cos().inv()?,
        ElemFn::Exp => RatExpr::exp(a),
        ElemFn::Ln => RatExpr::ln(a)?,
        ElemFn::Sqrt => a.pow_rational(&Rational::new(1.into(), 2.into()))?,
        ElemFn::Arctan => RatExpr::atan(a),
    })
}

/// Derivative of a single kernel with respect to the variable `v`.
fn atom_derivative(a: &Atom, v: &Atom) -> RatExpr {
    if a == v {
        return RatExpr::one();
    }
    match a {
        Atom::Sym(_) | Atom::Jet(_) => RatExpr::zero(),
        Atom::Func(f) => match v {
            Atom::Sym(s) => f
                .derivative(s, 1)
                .map(|g| RatExpr::atom(Atom::Func(g)))
                .unwrap_or_else(RatExpr::zero),
            _ => RatExpr::zero(),
        },
        Atom::Sin(u) => {
            let du = u.diff(v);
            if du.is_zero() {
                return du;
            }
            &RatExpr::atom(Atom::Cos(u.clone())) * &du
        }
        Atom::Cos(u) => {
            let du = u.diff(v);
            if du.is_zero() {
                return du;
            }
            -&(&RatExpr::atom(Atom::Sin(u.clone())) * &du)
        }
        Atom::Exp(u) => {
            let du = u.diff(v);
            if du.is_zero() {
                return du;
            }
            &RatExpr::atom(a.clone()) * &du
        }
        Atom::Ln(u) => {
            let du = u.diff(v);
            if du.is_zero() {
                return du;
            }
            du.checked_div(u).expect("ln argument is nonzero")
        }
        Atom::Atan(u) => {
            let du = u.diff(v);
            if du.is_zero() {
                return du;
            }
            let den = &RatExpr::one() + &(&**u * &**u);
            du.checked_div(&den).expect("1 + u^2 is nonzero")
        }
        Atom::Root(b, e) => {
            let db = b.diff(v);
            if db.is_zero() {
                return db;
            }
            let me = RatExpr::atom(a.clone()).scale(e);
            (&me * &db).checked_div(b).expect("root base is nonzero")
        }
    }
}

fn poly_derivative(p: &Poly, v: &Atom) -> RatExpr {
    let mut poly_part = Poly::zero();
    let mut rest = RatExpr::zero();
    for a in p.atoms() {
        let da = atom_derivative(&a, v);
        if da.is_zero() {
            continue;
        }
        let fd = p.formal_derivative(&a);
        if da.is_polynomial() {
            poly_part = poly_part.add(&fd.mul(da.num()));
        } else {
            rest = &rest + &(&RatExpr::from_poly(fd) * &da);
        }
    }
    &RatExpr::from_poly(poly_part) + &rest
}

impl RatExpr {
    /// Partial derivative with respect to a symbol or jet variable.
    pub fn diff(&self, v: &Atom) -> RatExpr {
        let dn = poly_derivative(self.num(), v);
        if self.den().is_constant() {
            return dn.scale(&self.den().as_constant().unwrap().recip());
        }
        let dd = poly_derivative(self.den(), v);
        let n = RatExpr::from_poly(self.num().clone());
        let d = RatExpr::from_poly(self.den().clone());
        if dd.is_zero() {
            return dn.checked_div(&d).expect("denominator is nonzero");
        }
        let top = &(&dn * &d) - &(&n * &dd);
        top.checked_div(&(&d * &d)).expect("denominator is nonzero")
    }

    pub fn diff_sym(&self, name: &str) -> RatExpr {
        self.diff(&Atom::sym(name))
    }

    /// Simultaneous substitution of kernels.
    pub fn substitute(&self, b: &Bindings) -> Result<RatExpr, KernelError> {
        if b.is_empty() {
            return Ok(self.clone());
        }
        let mut cache: HashMap<Atom, Option<RatExpr>> = HashMap::new();
        let mut changed = false;
        for a in self.atoms() {
            let img = b.image(&a)?;
            changed |= img.is_some();
            cache.insert(a, img);
        }
        if !changed {
            return Ok(self.clone());
        }
        let num = subst_poly(self.num(), &cache)?;
        let den = subst_poly(self.den(), &cache)?;
        num.checked_div(&den)
    }
}

fn subst_poly(p: &Poly, cache: &HashMap<Atom, Option<RatExpr>>) -> Result<RatExpr, KernelError> {
    let mut fixed = Poly::zero();
    let mut acc = RatExpr::zero();
    for (m, c) in p.terms() {
        let mut kept = Vec::new();
        let mut factor = RatExpr::constant(c.clone());
        for (a, e) in m.pairs() {
            match cache.get(a).and_then(|x| x.as_ref()) {
                Some(img) => factor = &factor * &img.powi(*e as i64)?,
                None => kept.push((a.clone(), *e)),
            }
        }
        let km = Monomial::from_pairs(kept);
        if let Some(q) = factor.as_constant() {
            fixed = fixed.add(&Poly::monomial(km, q));
        } else {
            acc = &acc + &(&factor * &RatExpr::from_poly(Poly::monomial(km, Rational::one())));
        }
    }
    Ok(&acc + &RatExpr::from_poly(fixed))
}

/// Finite map from kernels (or whole opaque functions) to replacements.
///
/// Substitution is simultaneous: images are never re-substituted.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    atoms: BTreeMap<Atom, RatExpr>,
    functions: BTreeMap<Symbol, (Vec<Symbol>, RatExpr)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.functions.is_empty()
    }

    pub fn bind(&mut self, key: Atom, value: RatExpr) -> &mut Self {
        self.atoms.insert(key, value);
        self
    }

    pub fn with(mut self, key: Atom, value: RatExpr) -> Self {
        self.atoms.insert(key, value);
        self
    }

    pub fn bind_symbol(&mut self, name: &str, value: RatExpr) -> &mut Self {
        self.bind(Atom::sym(name), value)
    }

    /// Bind an opaque function by its body in the formal parameters; all
    /// derivative atoms of the function follow by differentiation.
    pub fn bind_function(&mut self, name: &str, params: &[Symbol], body: RatExpr) -> &mut Self {
        self.functions
            .insert(Symbol::new(name), (params.to_vec(), body));
        self
    }

    pub fn get(&self, key: &Atom) -> Option<&RatExpr> {
        self.atoms.get(key)
    }

    /// Image of one atom, or `None` when the atom is untouched.
    fn image(&self, a: &Atom) -> Result<Option<RatExpr>, KernelError> {
        if let Some(v) = self.atoms.get(a) {
            return Ok(Some(v.clone()));
        }
        match a {
            Atom::Func(f) => match self.functions.get(&f.name) {
                Some((params, body)) => Ok(Some(function_image(f, params, body)?)),
                None => Ok(None),
            },
            Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) | Atom::Ln(u) | Atom::Atan(u) => {
                let nu = u.substitute(self)?;
                if nu == **u {
                    return Ok(None);
                }
                Ok(Some(match a {
                    Atom::Sin(_) => RatExpr::sin(&nu),
                    Atom::Cos(_) => RatExpr::cos(&nu),
                    Atom::Exp(_) => RatExpr::exp(&nu),
                    Atom::Ln(_) => RatExpr::ln(&nu)?,
                    _ => RatExpr::atan(&nu),
                }))
            }
            Atom::Root(base, e) => {
                let nb = base.substitute(self)?;
                if nb == **base {
                    return Ok(None);
                }
                Ok(Some(nb.pow_rational(e)?))
            }
            Atom::Sym(_) | Atom::Jet(_) => Ok(None),
        }
    }
}

fn function_image(f: &FuncApp, params: &[Symbol], body: &RatExpr) -> Result<RatExpr, KernelError> {
    if params.len() != f.args.len() {
        return Err(KernelError::Domain(format!(
            "function {} bound with {} parameters, used with {}",
            f.name,
            params.len(),
            f.args.len()
        )));
    }
    let mut rename = Bindings::new();
    for (p, a) in params.iter().zip(&f.args) {
        if p != a {
            rename.bind(Atom::Sym(p.clone()), RatExpr::atom(Atom::Sym(a.clone())));
        }
    }
    let mut out = body.substitute(&rename)?;
    for (arg, k) in f.args.iter().zip(&f.orders) {
        for _ in 0..*k {
            out = out.diff(&Atom::Sym(arg.clone()));
        }
    }
    Ok(out)
}

/// Exponent vector (in the order of the requested variables) to coefficient.
pub type Collected = BTreeMap<Vec<u32>, RatExpr>;

/// Group `e` by monomials in `vars`; coefficients are free of `vars`.
pub fn collect_rat(e: &RatExpr, vars: &[Atom]) -> Result<Collected, KernelError> {
    for a in e.den().atoms() {
        if vars.contains(&a) || a.argument().is_some_and(|u| vars.iter().any(|v| u.depends_on(v))) {
            return Err(KernelError::NonPolynomial(super::ratexpr_atom_name(&a).to_string()));
        }
    }
    let mut parts: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (m, c) in e.num().terms() {
        let mut key = vec![0u32; vars.len()];
        let mut rest = Vec::new();
        for (a, k) in m.pairs() {
            if let Some(i) = vars.iter().position(|v| v == a) {
                key[i] = *k;
            } else {
                if a.argument().is_some_and(|u| vars.iter().any(|v| u.depends_on(v))) {
                    return Err(KernelError::NonPolynomial(super::ratexpr_atom_name(a)));
                }
                rest.push((a.clone(), *k));
            }
        }
        let entry = parts.entry(key).or_default();
        *entry = entry.add(&Poly::monomial(Monomial::from_pairs(rest), c.clone()));
    }
    let mut out = Collected::new();
    for (k, p) in parts {
        if p.is_zero() {
            continue;
        }
        out.insert(k, RatExpr::from_parts(p, e.den().clone())?);
    }
    Ok(out)
}

/// Monomial in `vars` for an exponent vector.
pub fn monomial_of(vars: &[Atom], key: &[u32]) -> RatExpr {
    let pairs = vars.iter().cloned().zip(key.iter().copied()).collect();
    RatExpr::from_poly(Poly::monomial(Monomial::from_pairs(pairs), Rational::one()))
}
